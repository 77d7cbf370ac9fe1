"""Command-line front end: ``qutrit-invariants {eval,named,maximize,sample,grid,verify}``.

Payload goes to stdout (or ``--out``); diagnostics go to stderr.  Exit codes:
0 success, 1 failed verification, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import closed_form as cf
from .invariants_matrix import fundamental_invariants
from .optimize import OptConfig, maximize_abs, objective
from .states import NAMED_TAGS, QutritState, named_state, semisimple_to_tensor
from .stats import (
    histogram,
    histogram_auto,
    last_bin_fraction,
    sample_and_evaluate,
    sorted_curve,
    sorted_curve_csv,
    sphere_grid,
    write_csv,
)

log = logging.getLogger("qutrit_invariants")

OBJECTIVE_CHOICES = ("i6", "i9", "i12", "delta", "s_index")
_UPPER = {"I6": cf.M_I6, "I9": cf.M_I9, "I12": cf.M_I12, "Delta333": cf.M_DELTA, "S_I": cf.M_S_INDEX}


class UsageError(Exception):
    """Bad flag combination or unreadable input (exit status 2)."""


def _triple(text: str) -> tuple[float, float, float]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b,c got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return vals


def _bins(text: str) -> int | str:
    if text == "auto":
        return text
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--bins takes an integer >= 2 or 'auto', got {text!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError("--bins must be >= 2")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", type=Path, help="write the payload here instead of stdout")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--threads", type=_positive, default=None, help="worker threads (default: all cores)")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(
        prog="qutrit-invariants",
        description="SLOCC invariants I6, I9, I12 and the hyperdeterminant of 3-qutrit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate the invariants of a state")
    p.add_argument("input", nargs="?", help="state file (JSON or CSV); '-' reads stdin")
    p.add_argument("--semisimple", type=_triple, metavar="a,b,c")
    p.add_argument("--path", choices=("matrix", "closed"))
    p.add_argument(
        "--no-normalize",
        action="store_true",
        help="use the --semisimple triple as given instead of rescaling it to unit norm",
    )

    p = sub.add_parser("named", parents=[common], help="amplitudes and invariants of a named state")
    p.add_argument("tag", help=f"one of {', '.join(NAMED_TAGS)} (parameters as tag:x,y)")

    p = sub.add_parser("maximize", parents=[common], help="multi-start maximization of |f| on the semi-simple sphere")
    p.add_argument("--objective", choices=OBJECTIVE_CHOICES, default="delta")
    p.add_argument("--restarts", type=_positive, default=64)
    p.add_argument("--max-iters", type=_positive, default=2000)

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo statistics over random semi-simple states")
    p.add_argument("--samples", type=_positive, default=500_000)
    p.add_argument("--bins", type=_bins, default=100)
    p.add_argument("--objective", choices=OBJECTIVE_CHOICES)
    p.add_argument(
        "--kind",
        choices=("summary", "table", "histogram", "curve"),
        default="summary",
        help="summary (JSON only), raw sample table, histogram or sorted curve",
    )

    p = sub.add_parser("grid", parents=[common], help="signed objective values on a spherical grid")
    p.add_argument("--objective", choices=OBJECTIVE_CHOICES, default="delta")
    p.add_argument("--n-theta", type=_positive, default=91)
    p.add_argument("--n-phi", type=_positive, default=180)

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--quick", action="store_true", help="skip the 500k-sample statistics")
    p.add_argument("--blocks-asset", type=Path, help=argparse.SUPPRESS)
    p.set_defaults(format=None)
    return parser


# -- helpers ------------------------------------------------------------------

def _emit(text: str, args) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        args.out.write_text(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _read_state(path: str) -> QutritState:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        if text.lstrip().startswith(("{", "[")):
            return QutritState.from_json(text)
        return QutritState.from_csv(text)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse state in {path}: {exc}") from None


# -- subcommands -----------------------------------------------------------------

def cmd_eval(args) -> int:
    if args.semisimple is not None and args.input is not None:
        raise UsageError("give either a state file or --semisimple, not both")
    if args.semisimple is None and args.input is None:
        raise UsageError("eval needs a state file or --semisimple a,b,c")
    if args.semisimple is None:
        if args.path == "closed":
            raise UsageError("--path closed requires --semisimple")
        path = "matrix"
        inv = fundamental_invariants(_read_state(args.input))
    else:
        path = args.path or "closed"
        x = np.array(args.semisimple, dtype=float)
        n = float(np.linalg.norm(x))
        if not args.no_normalize and n > 0.0:
            x = x / n
        a, b, c = (float(t) for t in x)
        if path == "closed":
            inv = cf.invariants_ss(a, b, c)
        else:
            inv = fundamental_invariants(semisimple_to_tensor((a, b, c)))
    if args.format == "csv":
        _emit(inv.to_csv(), args)
    else:
        _emit(_json({**inv.to_dict(), "path": path}), args)
    return 0


def cmd_named(args) -> int:
    try:
        state = named_state(args.tag)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad parameters for {args.tag!r}: {exc}") from None
    inv = fundamental_invariants(state)
    mags = inv.magnitudes()
    if args.format == "csv":
        _emit(write_csv(["tag", "absI6", "absI9", "absI12", "absDelta"], [[args.tag, *mags.values()]]), args)
    else:
        payload = {
            "tag": args.tag,
            "label": state.label,
            "approximate": state.approximate,
            "state": state.to_dict(),
            "invariants": inv.to_dict(),
            "magnitudes": mags,
        }
        _emit(_json(payload), args)
    return 0


def cmd_maximize(args) -> int:
    cfg = OptConfig(restarts=args.restarts, max_iters=args.max_iters, rng_seed=args.seed)
    res = maximize_abs(objective(args.objective), cfg, keep_trace=args.verbose)
    log.info("best |%s| = %.17g after %d iterations", res.objective, res.best_value, res.iterations_used)
    if args.format == "csv":
        rows = [[*p, v] for p, v in res.all_local_optima]
        _emit(write_csv(["a", "b", "c", "value"], rows), args)
    else:
        _emit(_json(res.to_dict(verbose=args.verbose)), args)
    return 0


def _hist(values, bins, upper, tag):
    return histogram_auto(values, tag) if bins == "auto" else histogram(values, bins, upper, tag)


def cmd_sample(args) -> int:
    tags = [objective(args.objective).tag] if args.objective else list(_UPPER)
    if args.kind in ("histogram", "curve") and not args.objective:
        raise UsageError(f"--kind {args.kind} needs --objective")
    if args.kind == "summary" and args.format == "csv":
        raise UsageError("the summary is JSON only; use --kind table|histogram|curve for CSV")
    table = sample_and_evaluate(args.samples, tags, seed=args.seed, threads=args.threads)

    if args.kind == "table":
        if args.format == "csv":
            _emit(table.to_csv(), args)
        else:
            _emit(_json({"seed": args.seed, "columns": {k: v.tolist() for k, v in table.columns.items()}}), args)
        return 0
    if args.kind == "curve":
        vals = table.values(tags[0])
        if args.format == "csv":
            _emit(sorted_curve_csv(vals), args)
        else:
            _emit(_json({"seed": args.seed, "objective": tags[0], "curve": sorted_curve(vals).tolist()}), args)
        return 0
    if args.kind == "histogram":
        h = _hist(table.values(tags[0]), args.bins, _UPPER[tags[0]], tags[0])
        if args.format == "csv":
            _emit(h.to_csv(), args)
        else:
            _emit(_json({"seed": args.seed, **h.to_dict()}), args)
        return 0

    summary = {"seed": args.seed, "samples": args.samples, "bins": args.bins, "objectives": {}}
    for tag in tags:
        vals = table.values(tag)
        h = _hist(vals, args.bins, _UPPER[tag], tag)
        summary["objectives"][tag] = {
            "upper": _UPPER[tag],
            "max_observed": float(vals.max()),
            "last_bin_fraction": last_bin_fraction(h),
            "last_bin_percent": 100.0 * last_bin_fraction(h),
        }
    _emit(_json(summary), args)
    return 0


def cmd_grid(args) -> int:
    grid = sphere_grid(objective(args.objective).tag, args.n_theta, args.n_phi)
    if args.format == "csv":
        _emit(grid.to_csv(), args)
    else:
        payload = {
            "objective": grid.objective_tag,
            "theta": grid.theta.tolist(),
            "phi": grid.phi.tolist(),
            "values": grid.values.tolist(),
        }
        _emit(_json(payload), args)
    return 0


def cmd_verify(args) -> int:
    from .verify import format_report, run_checks

    if args.format == "csv":
        raise UsageError("verify prints a text table (default) or JSON")
    checks = run_checks(quick=args.quick, threads=args.threads, asset_path=args.blocks_asset, seed=args.seed)
    if args.format == "json":
        payload = {
            "seed": args.seed,
            "quick": args.quick,
            "passed": all(c.passed for c in checks),
            "checks": [
                {"name": c.name, "passed": c.passed, "measured": c.measured, "expected": c.expected}
                for c in checks
            ],
        }
        _emit(_json(payload), args)
    else:
        _emit(format_report(checks), args)
    return 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "eval": cmd_eval,
    "named": cmd_named,
    "maximize": cmd_maximize,
    "sample": cmd_sample,
    "grid": cmd_grid,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    np.seterr(all="ignore")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qutrit-invariants {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
