"""Command-line front end.

Subcommands::

    cm-lab eval          print one derivative value of a named function
    cm-lab check         run a CM/LCM grid check, optionally writing a report
    cm-lab sweep         run a theta-family sweep from a JSON spec file
    cm-lab laplace-check cross-check the series vs integral forms of psi_p

Exit codes: 0 clean, 1 a violation (or cross-check excess) was found,
2 usage / domain / parse errors.  The environment variable
``CM_LAB_PRECISION`` overrides the default working precision (decimal
digits); an explicit ``--digits`` flag wins over the environment.

Reports are deterministic: repeated runs with equal flags produce
byte-identical files (pass ``--timestamp`` to embed a wall-clock stamp).
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from datetime import datetime, timezone
from typing import Any

from .checker import (
    DEFAULT_CHECK_ORDER,
    GridSpec,
    check_cm,
    check_lcm,
    laplace_crosscheck,
)
from .errors import CmLabError, InvalidSpec
from .functions import FUNCTION_KINDS, FunctionSpec, ThetaFamily, build
from .jets import derivative
from .kernel import DEFAULT_PRECISION_DIGITS, EvalConfig, Real
from .report import check_report_document, table_report_document

__all__ = ["main", "entry_point"]

EVAL_FUNCTIONS = (
    "theta-alpha",
    "f",
    "g",
    "h",
    "log-q",
    "q",
    "log-qp",
    "qp",
    "psi",
    "psi-p",
    "psi-q",
    "open-problem-exponent",
)

_SPACINGS = {"log": "logarithmic", "logarithmic": "logarithmic", "uniform": "uniform"}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--digits",
        type=int,
        default=None,
        help="working precision in decimal digits "
        f"(default: $CM_LAB_PRECISION or {DEFAULT_PRECISION_DIGITS})",
    )
    parser.add_argument(
        "--timestamp",
        action="store_true",
        help="embed a wall-clock timestamp in reports (breaks byte-identical reruns)",
    )


def _add_function_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fn", required=True, choices=EVAL_FUNCTIONS, help="function name")
    parser.add_argument("--alpha", default=None, help="exponent for theta-alpha")
    parser.add_argument("--p", type=int, default=None, help="p index for the p-analogues")
    parser.add_argument("--q", default=None, help="q parameter in (0,1) for the q-analogues")
    parser.add_argument(
        "--theta-family",
        default="identity",
        choices=("identity", "affine", "rational", "q_bracket"),
        help="theta family for open-problem-exponent",
    )
    parser.add_argument(
        "--theta-params",
        default="",
        help="comma-separated theta parameters (affine: a,b; rational: a,b,c,d)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cm-lab",
        description="High-precision complete-monotonicity laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate the n-th derivative of a function")
    _add_function_flags(p_eval)
    p_eval.add_argument("--t", required=True, help="evaluation point (decimal string)")
    p_eval.add_argument("--n", type=int, default=0, help="derivative order (default 0)")
    _add_common(p_eval)

    p_check = sub.add_parser("check", help="run a CM/LCM check on a grid")
    _add_function_flags(p_check)
    p_check.add_argument("--mode", required=True, choices=("cm", "lcm"))
    p_check.add_argument("--lo", default="0.005", help="grid lower endpoint (default 0.005)")
    p_check.add_argument("--hi", default="0.995", help="grid upper endpoint (default 0.995)")
    p_check.add_argument("--points", type=int, default=200, help="grid size (default 200)")
    p_check.add_argument(
        "--spacing", default="log", choices=sorted(_SPACINGS), help="grid spacing (default log)"
    )
    p_check.add_argument(
        "--order", type=int, default=DEFAULT_CHECK_ORDER,
        help=f"maximum derivative order (default {DEFAULT_CHECK_ORDER})",
    )
    p_check.add_argument("--out", default=None, help="write the report to this path")
    p_check.add_argument("--format", default="json", choices=("json", "csv"))
    _add_common(p_check)

    p_sweep = sub.add_parser("sweep", help="run a theta-family sweep from a spec file")
    p_sweep.add_argument("spec", help="path to the JSON sweep specification")
    p_sweep.add_argument("--out", default=None, help="write the report to this path")
    p_sweep.add_argument("--format", default="json", choices=("json", "csv"))
    _add_common(p_sweep)

    p_lap = sub.add_parser(
        "laplace-check", help="series-vs-integral cross-check of the psi_p kernel"
    )
    p_lap.add_argument("--p-values", default="1,5,50", help="comma list of p indices")
    p_lap.add_argument("--x-values", default="0.1,1,2.5", help="comma list of x points")
    p_lap.add_argument("--out", default=None, help="write the report to this path")
    p_lap.add_argument("--format", default="json", choices=("json", "csv"))
    _add_common(p_lap)

    return parser


def _resolve_digits(args: argparse.Namespace) -> int:
    if args.digits is not None:
        return args.digits
    env = os.environ.get("CM_LAB_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError as err:
            raise InvalidSpec(f"CM_LAB_PRECISION must be an integer, got {env!r}") from err
    return DEFAULT_PRECISION_DIGITS


def _timestamp(args: argparse.Namespace) -> str | None:
    if getattr(args, "timestamp", False):
        return datetime.now(timezone.utc).isoformat()
    return None


def _theta_from_args(args: argparse.Namespace, digits: int) -> ThetaFamily:
    params = tuple(
        Real(s.strip(), digits) for s in args.theta_params.split(",") if s.strip()
    )
    return ThetaFamily(args.theta_family, params)


def _spec_from_args(args: argparse.Namespace, digits: int) -> FunctionSpec:
    kind = args.fn
    kwargs: dict[str, Any] = {}
    if kind == "theta-alpha":
        if args.alpha is None:
            raise InvalidSpec("theta-alpha requires --alpha")
        kwargs["alpha"] = Real(args.alpha, digits)
    if kind in ("log-qp", "qp", "psi-p"):
        if args.p is None:
            raise InvalidSpec(f"{kind} requires --p")
        kwargs["p"] = args.p
    if kind in ("psi-q", "open-problem-exponent"):
        if args.q is None:
            raise InvalidSpec(f"{kind} requires --q")
        kwargs["q"] = Real(args.q, digits)
    if kind == "open-problem-exponent":
        kwargs["theta"] = _theta_from_args(args, digits)
    return FunctionSpec(kind, **kwargs)


def _cmd_eval(args: argparse.Namespace) -> int:
    digits = _resolve_digits(args)
    cfg = EvalConfig(precision_digits=digits)
    spec = _spec_from_args(args, digits)
    t = Real(args.t, digits)
    value = derivative(build(spec), args.n, t, cfg)
    print(value.decimal())
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    digits = _resolve_digits(args)
    cfg = EvalConfig(precision_digits=digits)
    spec = _spec_from_args(args, digits)
    grid = GridSpec(
        Real(args.lo, digits), Real(args.hi, digits), args.points, _SPACINGS[args.spacing]
    )
    runner = check_cm if args.mode == "cm" else check_lcm
    report = runner(spec, grid, args.order, cfg)

    invocation = {
        "command": "check",
        "fn": args.fn,
        "mode": args.mode,
        "lo": args.lo,
        "hi": args.hi,
        "points": args.points,
        "spacing": _SPACINGS[args.spacing],
        "order": args.order,
        "digits": digits,
        "alpha": args.alpha,
        "p": args.p,
        "q": args.q,
    }
    doc = check_report_document(report, cfg, invocation, _timestamp(args))
    if args.out:
        doc.write(args.out, args.format)

    print(
        f"function={report.function.describe()} mode={report.mode} "
        f"interval=[{grid.lo.decimal()},{grid.hi.decimal()}] points={grid.count} "
        f"spacing={grid.spacing} orders<= {report.max_order} digits={digits}"
    )
    print(
        f"min_margin={report.min_margin.decimal()} strict={report.strict} "
        f"violations={len(report.violations)} failed_points={len(report.failed_points)}"
    )
    for v in report.violations[:10]:
        print(f"violation t={v.t.decimal()} order={v.order} value={v.value.decimal()}")
    if len(report.violations) > 10:
        print(f"... {len(report.violations) - 10} more violations in the report")
    return 1 if report.violations else 0


def _param_values(raw: Any, digits: int, where: str) -> list[Real]:
    """A sweep parameter is a scalar or a {lo, hi, steps} uniform grid."""
    if isinstance(raw, (str, int, float)):
        return [Real(str(raw), digits)]
    if isinstance(raw, dict):
        try:
            lo = Real(str(raw["lo"]), digits)
            hi = Real(str(raw["hi"]), digits)
            steps = int(raw["steps"])
        except (KeyError, ValueError) as err:
            raise InvalidSpec(f"bad parameter grid for {where}: {raw!r}") from err
        if steps < 1:
            raise InvalidSpec(f"parameter grid for {where} needs steps >= 1")
        if steps == 1:
            return [lo]
        span = hi - lo
        return [lo + span * (Real(i, digits) / (steps - 1)) for i in range(steps)]
    raise InvalidSpec(f"parameter for {where} must be a scalar or lo/hi/steps grid")


_FAMILY_PARAMS = {"identity": (), "affine": ("a", "b"), "rational": ("a", "b", "c", "d")}


def _family_combinations(
    entry: dict[str, Any], digits: int
) -> list[tuple[ThetaFamily, str]]:
    """Expand one sweep family entry into (ThetaFamily, parameter label) rows."""
    if not isinstance(entry, dict) or "family" not in entry:
        raise InvalidSpec(f"sweep family entries need a 'family' key: {entry!r}")
    family = entry["family"]
    if family == "q_bracket":
        return [(ThetaFamily("q_bracket"), "-")]
    if family == "identity":
        return [(ThetaFamily("identity"), "-")]
    if family not in _FAMILY_PARAMS:
        raise InvalidSpec(f"unknown theta family {family!r}")
    names = _FAMILY_PARAMS[family]
    missing = [n for n in names if n not in entry]
    if missing:
        raise InvalidSpec(f"family {family!r} is missing parameters {missing}")
    grids = [_param_values(entry[n], digits, f"{family}.{n}") for n in names]
    out = []
    for combo in itertools.product(*grids):
        label = ",".join(f"{n}={v.decimal()}" for n, v in zip(names, combo))
        out.append((ThetaFamily(family, tuple(combo)), label))
    return out


def _load_sweep_spec(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise InvalidSpec(f"cannot read sweep spec {path}: {err}") from err
    for key in ("q_values", "families", "interval"):
        if key not in payload:
            raise InvalidSpec(f"sweep spec is missing the {key!r} key")
    if not payload["q_values"] or not payload["families"]:
        raise InvalidSpec("sweep spec needs nonempty q_values and families")
    return payload


def _cmd_sweep(args: argparse.Namespace) -> int:
    digits_default = _resolve_digits(args)
    payload = _load_sweep_spec(args.spec)
    digits = int(payload.get("precision_digits", digits_default))
    cfg = EvalConfig(precision_digits=digits)
    interval = payload["interval"]
    try:
        grid = GridSpec(
            Real(str(interval["lo"]), digits),
            Real(str(interval["hi"]), digits),
            int(interval.get("points", 32)),
            _SPACINGS[interval.get("spacing", "uniform")],
        )
    except (KeyError, ValueError) as err:
        raise InvalidSpec(f"bad sweep interval: {interval!r}") from err
    max_order = int(payload.get("max_order", 8))

    rows: list[dict[str, Any]] = []
    for q_raw in payload["q_values"]:
        q = Real(str(q_raw), digits)
        for entry in payload["families"]:
            for theta, label in _family_combinations(entry, digits):
                row: dict[str, Any] = {
                    "family": theta.family_id,
                    "parameters": label,
                    "q": q.decimal(),
                }
                try:
                    spec = FunctionSpec("open-problem-exponent", q=q, theta=theta)
                    report = check_lcm(spec, grid, max_order, cfg)
                except CmLabError as err:
                    row["verdict"] = "error"
                    row["min_margin"] = ""
                    row["error"] = f"{type(err).__name__}: {err}"
                else:
                    row["verdict"] = "violation" if report.violations else "no-violation"
                    row["min_margin"] = report.min_margin.decimal()
                    row["error"] = ""
                rows.append(row)
                print(
                    f"q={row['q']} family={row['family']} params={row['parameters']} "
                    f"verdict={row['verdict']}"
                )

    summary = {
        "rows": len(rows),
        "violations": sum(1 for r in rows if r["verdict"] == "violation"),
        "errors": sum(1 for r in rows if r["verdict"] == "error"),
        "interval": {
            "lo": grid.lo.decimal(),
            "hi": grid.hi.decimal(),
            "count": grid.count,
            "spacing": grid.spacing,
        },
        "max_order": max_order,
    }
    invocation = {"command": "sweep", "spec": args.spec, "digits": digits}
    doc = table_report_document(
        "sweep",
        ["family", "parameters", "q", "verdict", "min_margin", "error"],
        rows,
        summary,
        cfg,
        invocation,
        _timestamp(args),
    )
    if args.out:
        doc.write(args.out, args.format)
    print(f"sweep complete: {summary['rows']} rows, {summary['violations']} violations")
    return 0


def _cmd_laplace(args: argparse.Namespace) -> int:
    digits = _resolve_digits(args)
    cfg = EvalConfig(precision_digits=digits)
    try:
        p_values = [int(s) for s in args.p_values.split(",") if s.strip()]
        x_values = [s.strip() for s in args.x_values.split(",") if s.strip()]
    except ValueError as err:
        raise InvalidSpec(f"bad p/x lists: {err}") from err
    if not p_values or not x_values:
        raise InvalidSpec("laplace-check needs nonempty p and x lists")

    bound = cfg.quadrature_target_error * 10
    rows = []
    worst = None
    for p in p_values:
        for x in x_values:
            disc = laplace_crosscheck(p, Real(x, digits), cfg)
            ok = disc.value <= bound.value
            rows.append(
                {
                    "p": p,
                    "x": Real(x, digits).decimal(),
                    "discrepancy": disc.decimal(),
                    "within_bound": ok,
                }
            )
            worst = disc if worst is None or disc.value > worst.value else worst
            print(f"p={p} x={x} discrepancy={disc.decimal()} ok={ok}")

    failed = [r for r in rows if not r["within_bound"]]
    summary = {
        "bound": bound.decimal(),
        "worst_discrepancy": worst.decimal() if worst is not None else "",
        "failures": len(failed),
    }
    invocation = {
        "command": "laplace-check",
        "p_values": p_values,
        "x_values": x_values,
        "digits": digits,
    }
    doc = table_report_document(
        "laplace",
        ["p", "x", "discrepancy", "within_bound"],
        rows,
        summary,
        cfg,
        invocation,
        _timestamp(args),
    )
    if args.out:
        doc.write(args.out, args.format)
    return 1 if failed else 0


_COMMANDS = {
    "eval": _cmd_eval,
    "check": _cmd_check,
    "sweep": _cmd_sweep,
    "laplace-check": _cmd_laplace,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CmLabError, ValueError) as err:
        print(f"cm-lab: error: {err}", file=sys.stderr)
        return 2


def entry_point() -> None:  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
