"""Command-line front end.

Subcommands are thin wrappers over the library; numeric output is printed
with 10 significant digits (or 3 decimals under --round-3), and --json emits
a record {"command", "inputs", "results"} that echoes the parsed flags.
Stochastic commands require an explicit --seed and report it back.

Exit codes: 0 success, 2 domain or parse error (including unreadable input
files), 3 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .errors import UnliError
from .loss import BvnParams, unli_1d, unli_2d
from .mc import GridSpec, run_grid, write_grid_csv
from .trial import (
    ArmSpec,
    bootstrap_evpi_curve,
    closed_evpi_curve,
    copd_preset,
    estimate_inb_bvn,
    load_trial_csv,
    synth_trial,
    write_trial_csv,
)
from .voi import evpi_three, evpi_two, write_curve_csv

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3


def _fmt(value: float, round3: bool) -> str:
    return f"{value:.3f}" if round3 else f"{value:.10g}"


def _emit(args, results: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        inputs = {
            k: v
            for k, v in vars(args).items()
            if k not in ("func", "json", "command") and v is not None
        }
        print(json.dumps({"command": args.command, "inputs": inputs, "results": results}))
    else:
        for line in lines:
            print(line)


def _wtp_grid(wtp_min: float, wtp_max: float, wtp_step: float) -> list[float]:
    if wtp_step <= 0:
        raise UnliError(f"--wtp-step must be positive, got {wtp_step}")
    if wtp_max < wtp_min:
        raise UnliError("--wtp-max must be >= --wtp-min")
    wtps = []
    k = 0
    while True:
        w = wtp_min + k * wtp_step
        if w > wtp_max * (1 + 1e-12) + 1e-9:
            break
        wtps.append(w)
        k += 1
    return wtps


def _load_trial(path: str):
    try:
        return load_trial_csv(path)
    except OSError as exc:
        raise UnliError(f"file error: cannot read trial file {path}: {exc}") from exc


def cmd_unli1d(args) -> int:
    value = unli_1d(args.mu, args.sd)
    _emit(args, {"unli": value}, [_fmt(value, args.round_3)])
    return EXIT_OK


def cmd_unli2d(args) -> int:
    p = BvnParams(args.mu1, args.mu2, args.sd1, args.sd2, args.rho)
    b = unli_2d(p)
    results = {"total": b.total}
    lines = [_fmt(b.total, args.round_3)]
    if args.breakdown:
        results = {"u12": b.u12, "v12": b.v12, "u21": b.u21, "v21": b.v21, "total": b.total}
        lines = [
            f"u12 {_fmt(b.u12, args.round_3)}",
            f"v12 {_fmt(b.v12, args.round_3)}",
            f"u21 {_fmt(b.u21, args.round_3)}",
            f"v21 {_fmt(b.v21, args.round_3)}",
            f"total {_fmt(b.total, args.round_3)}",
        ]
    _emit(args, results, lines)
    return EXIT_OK


def cmd_simgrid(args) -> int:
    grid = GridSpec()
    rows = run_grid(grid, args.n, args.seed)
    write_grid_csv(rows, args.out, round3=args.round_3)
    if args.plot:
        from .report import save_grid_plot

        save_grid_plot(rows, args.plot)
    worst = max(abs(r.diff) / r.mc_se for r in rows if r.mc_se > 0)
    results = {
        "rows": len(rows),
        "n": args.n,
        "seed": args.seed,
        "max_abs_diff_over_se": worst,
        "out": args.out,
    }
    lines = [f"wrote {len(rows)} rows to {args.out}", f"max |closed - mc| / se = {worst:.3f}"]
    if args.plot:
        results["plot"] = args.plot
        lines.append(f"wrote figure to {args.plot}")
    _emit(args, results, lines)
    return EXIT_OK


def cmd_evpi(args) -> int:
    three = [args.mu1, args.mu2, args.sd1, args.sd2, args.rho]
    two = [args.mu_inb, args.sd_inb]
    trial = [args.trial, args.ref_arm, args.wtp]
    touched = [any(v is not None for v in g) for g in (three, two, trial)]
    complete = [all(v is not None for v in g) for g in (three, two, trial)]
    if sum(touched) != 1 or not complete[touched.index(True)]:
        raise UnliError(
            "provide exactly one complete flag group: --mu1/--mu2/--sd1/--sd2/--rho, "
            "--mu-inb/--sd-inb, or --trial/--ref-arm/--wtp"
        )
    if complete[0]:
        value = evpi_three(BvnParams(args.mu1, args.mu2, args.sd1, args.sd2, args.rho))
    elif complete[1]:
        value = evpi_two(args.mu_inb, args.sd_inb)
    else:
        d = _load_trial(args.trial)
        value = evpi_three(estimate_inb_bvn(d, args.wtp, args.ref_arm))
    _emit(args, {"evpi": value}, [_fmt(value, args.round_3)])
    return EXIT_OK


def cmd_evpi_curve(args) -> int:
    wtps = _wtp_grid(args.wtp_min, args.wtp_max, args.wtp_step)
    d = _load_trial(args.trial)
    if args.method == "closed":
        curve = closed_evpi_curve(d, wtps, args.ref_arm)
    else:
        if args.seed is None:
            raise UnliError("--method bootstrap is stochastic and requires an explicit --seed")
        curve = bootstrap_evpi_curve(d, wtps, args.boot_b, args.seed)
    write_curve_csv(curve, args.out)
    if args.plot:
        from .report import save_curve_plot

        save_curve_plot(curve, args.plot)
    results = {
        "method": curve.method,
        "points": [[w, e] for w, e in curve.points],
        "out": args.out,
    }
    if args.method == "bootstrap":
        results["seed"] = args.seed
        results["boot_b"] = args.boot_b
    lines = [f"wrote {len(curve.points)} points to {args.out}"]
    if args.plot:
        results["plot"] = args.plot
        lines.append(f"wrote figure to {args.plot}")
    _emit(args, results, lines)
    return EXIT_OK


def _specs_from_json(path: str) -> tuple[ArmSpec, ...]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as exc:
        raise UnliError(f"file error: cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UnliError(f"invalid spec JSON in {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise UnliError("spec JSON must be a list of arm objects")
    fields = ("name", "n", "mean_cost", "sd_cost", "mean_effect", "sd_effect", "cost_effect_corr")
    specs = []
    for entry in raw:
        missing = [f for f in fields if f not in entry]
        if missing:
            raise UnliError(f"arm object missing field(s): {', '.join(missing)}")
        specs.append(ArmSpec(**{f: entry[f] for f in fields}))
    return tuple(specs)


def cmd_synth(args) -> int:
    if (args.preset is None) == (args.spec is None):
        raise UnliError("provide exactly one of --preset or --spec")
    specs = copd_preset() if args.preset else _specs_from_json(args.spec)
    d = synth_trial(specs, args.seed)
    write_trial_csv(d, args.out)
    results = {
        "patients": len(d),
        "arms": {arm: n for arm, n in zip(d.arms, d.arm_sizes())},
        "seed": args.seed,
        "out": args.out,
    }
    _emit(args, results, [f"wrote {len(d)} patients ({results['arms']}) to {args.out}"])
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--round-3", action="store_true", help="print values with 3 decimals")
    parser.add_argument("--json", action="store_true", help="emit a JSON record instead of text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unli",
        description="Closed-form unit normal loss integrals and EVPI for up to three strategies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("unli1d", help="E[max(Y, 0)] for Y ~ N(mu, sd^2)")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sd", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_unli1d)

    p = sub.add_parser("unli2d", help="E[max(Y1, Y2, 0)] for bivariate normal (Y1, Y2)")
    p.add_argument("--mu1", type=float, required=True)
    p.add_argument("--mu2", type=float, required=True)
    p.add_argument("--sd1", type=float, required=True)
    p.add_argument("--sd2", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--breakdown", action="store_true", help="print the four terms and the total")
    _add_common(p)
    p.set_defaults(func=cmd_unli2d)

    p = sub.add_parser("simgrid", help="closed form vs Monte Carlo over the 252-cell grid")
    p.add_argument("--n", type=int, required=True, help="Monte Carlo samples per cell")
    p.add_argument("--seed", type=int, required=True, help="master seed (per-cell seeds derived)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--grid-default", action="store_true",
                   help="use the default 252-cell factorial grid (the only grid; kept explicit)")
    p.add_argument("--plot", help="also render a diagnostic figure to this path")
    _add_common(p)
    p.set_defaults(func=cmd_simgrid)

    p = sub.add_parser("evpi", help="expected value of perfect information")
    p.add_argument("--mu1", type=float)
    p.add_argument("--mu2", type=float)
    p.add_argument("--sd1", type=float)
    p.add_argument("--sd2", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--mu-inb", type=float, help="two-strategy mode: INB mean")
    p.add_argument("--sd-inb", type=float, help="two-strategy mode: INB standard deviation")
    p.add_argument("--trial", help="trial mode: patient CSV path")
    p.add_argument("--ref-arm", help="trial mode: reference arm label")
    p.add_argument("--wtp", type=float, help="trial mode: willingness to pay")
    _add_common(p)
    p.set_defaults(func=cmd_evpi)

    p = sub.add_parser("evpi-curve", help="EVPI over a willingness-to-pay sweep")
    p.add_argument("--trial", required=True)
    p.add_argument("--ref-arm", required=True)
    p.add_argument("--wtp-min", type=float, required=True)
    p.add_argument("--wtp-max", type=float, required=True)
    p.add_argument("--wtp-step", type=float, required=True)
    p.add_argument("--method", choices=("closed", "bootstrap"), required=True)
    p.add_argument("--boot-b", type=int, default=1000, help="bootstrap replicates per point")
    p.add_argument("--seed", type=int, help="required for --method bootstrap")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--plot", help="also render the curve to this path")
    _add_common(p)
    p.set_defaults(func=cmd_evpi_curve)

    p = sub.add_parser("synth", help="generate a synthetic three-arm trial CSV")
    p.add_argument("--preset", choices=("copd",), help="bundled calibrated preset")
    p.add_argument("--spec", help="JSON file with three arm spec objects")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
