"""Command-line front end.

Usage::

    lienard orbit      --config run.json --out out/
    lienard floquet    --config run.json
    lienard conditions --config run.json
    lienard sweep      --config run.json --epsilon 0.001 --epsilon 0.01

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 a hypothesis check failed.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .conditions import check_cls, check_de_castro
from .config import RunConfig, config_from_dict, load_config
from .errors import ConfigError, LienardError
from .floquet import StabilityReport, stability_report
from .orbit import find_periodic_orbit, write_orbit_csv
from .perturb import detect_periodicity_loss, sweep_epsilon, write_sweep_csv
from .svg import render_phase_svg

log = logging.getLogger("lienard")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_HYPOTHESIS = 0, 1, 2, 3


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _portraits(traj, cfg: RunConfig, anchor_u: float, stem: str, out: Path, title: str):
    full = replace(cfg.plot, zoom=1.0, center=None, title=title)
    _write(out / f"{stem}.svg", render_phase_svg(traj, full))
    if cfg.plot.zoom != 1.0:
        zoomed = replace(cfg.plot, center=(anchor_u, 0.0), title=f"{title} (x{cfg.plot.zoom:g})")
        _write(out / f"{stem}_zoom.svg", render_phase_svg(traj, zoomed))


def _find_orbit(cfg: RunConfig):
    sysm = cfg.build_system()
    orbit = find_periodic_orbit(sysm, cfg.a_guess, tol=cfg.orbit_tol, cfg=cfg.stepper)
    return sysm, orbit


def cmd_orbit(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    try:
        _, orbit = _find_orbit(cfg)
    except LienardError as exc:
        print(f"orbit: no periodic orbit found: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    write_orbit_csv(orbit.trajectory, out / "orbit.csv")
    _portraits(orbit.trajectory, cfg, orbit.a, "orbit", out, f"periodic orbit, {cfg.system}")
    summary = (
        f"system: {cfg.system}\n"
        f"a: {orbit.a:#.7g}\n"
        f"tau0: {orbit.tau0:#.7g}\n"
        f"residual: {orbit.residual:.3e}\n"
        f"iterations: {orbit.iterations}\n"
    )
    _write(out / "summary.txt", summary)
    print(summary, end="")
    return EXIT_OK


def cmd_floquet(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    try:
        sysm, orbit = _find_orbit(cfg)
        rep = stability_report(
            sysm, orbit, cfg.stepper, poly=cfg.polynomial(), example=cfg.is_example
        )
    except LienardError as exc:
        print(f"floquet: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    with open(out / "stability.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=StabilityReport.CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow(rep.as_row())
    text = rep.to_text()
    _write(out / "stability.txt", text)
    print(text, end="")
    return EXIT_OK


def cmd_conditions(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    sysm = cfg.build_system()
    cls = check_cls(sysm, cfg.grid)
    dc = check_de_castro(sysm, cfg.grid)
    text = "[levinson-smith]\n" + cls.to_text() + "[de-castro]\n" + dc.to_text()
    _write(out / "conditions.txt", text)
    print(text, end="")
    return EXIT_OK if cls.all_ok and dc.all_ok else EXIT_HYPOTHESIS


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.epsilons:
        print("sweep: the epsilon list is empty", file=sys.stderr)
        return EXIT_CONFIG
    out = _outdir(cfg)
    try:
        sysm, orbit = _find_orbit(cfg)
    except LienardError as exc:
        print(f"sweep: unperturbed orbit not found: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    rows = []
    for eps in sorted(cfg.epsilons):
        # one epsilon at a time so only one long trajectory is held in memory
        (row,) = sweep_epsilon(
            sysm, cfg.perturbation_for, [eps], cfg.stepper, orbit=orbit,
            periodicity_tol=cfg.periodicity_tol, n_returns=cfg.n_returns,
            settle=cfg.settle, keep_trajectories=True,
        )
        if row.result is not None:
            _portraits(
                row.result.trajectory, cfg, orbit.a, f"phase_eps_{eps:.6g}", out,
                f"eps = {eps:.6g}",
            )
            row = replace(row, result=replace(row.result, trajectory=None))
        else:
            log.warning("eps=%g failed: %s", eps, row.error)
        rows.append(row)
    write_sweep_csv(rows, out / "sweep.csv")
    loss = detect_periodicity_loss(rows)
    lines = [f"tau0: {orbit.tau0:#.7g}", f"a: {orbit.a:#.7g}"]
    for r in rows:
        tau = "failed" if r.tau is None else f"{r.tau:.4f}"
        lines.append(f"eps={r.epsilon:.6g} tau={tau} drift={r.drift:.3e} periodic={r.periodic}")
    if loss is None:
        lines.append("periodicity loss: none")
    else:
        lines.append(f"periodicity loss: eps={loss.epsilon:.6g}" + (f" ({loss.note})" if loss.note else ""))
    text = "\n".join(lines) + "\n"
    _write(out / "sweep_summary.txt", text)
    print(text, end="")
    if all(r.error is not None for r in rows):
        return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {
    "orbit": cmd_orbit,
    "floquet": cmd_floquet,
    "conditions": cmd_conditions,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lienard",
        description="Periodic orbits, multipliers and forced responses of Lienard equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--epsilon", type=float, action="append",
                       help="forcing amplitude; repeat for several (overrides config)")
        p.add_argument("--a-guess", type=float, help="orbit seed on the section, must be < 0")
        p.add_argument("--step", type=float, help="fixed integration step")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else config_from_dict({})
    over = {}
    if args.out is not None:
        over["out"] = args.out
    if args.epsilon is not None:
        over["epsilons"] = args.epsilon
    if args.a_guess is not None:
        over["a_guess"] = args.a_guess
    if args.step is not None:
        over["stepper"] = {"step": args.step}
    if not over:
        return cfg
    # route overrides through the same validation as file values
    checked = config_from_dict(over)
    kw = {k: getattr(checked, k) for k in over}
    if "stepper" in kw:
        kw["stepper"] = replace(cfg.stepper, step=checked.stepper.step)
    return replace(cfg, **kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
