"""
Command-line entry point.

    arithfwd price    --curve flat:0.05 --model sigma=0.07,a=0.51,eta=0.04,b=0.86,rho=-0.27 --start 30 --end 120
    arithfwd table    tables/table1.json --paths 100000 --seed 42
    arithfwd factors  --curve flat:0.05 --model json:params.json --start 360 --end 540
    arithfwd mc-check --curve flat:0.05 --model ... --start 30 --end 120 --paths 100000

Exit status: 0 on success, 2 on bad input, 1 on numerical failure (or a
failed cross-check).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .curve import DiscountCurve, FlatCurve, PillarCurve, on_forwards
from .factors import factor_terms
from .forwards import ALL_METHODS, DEFAULT_TIME_STEPS, arithmetic_forward, factor_table, price
from .g2pp import G2ppParams
from .montecarlo import McConfig, mc_arithmetic_forward, mc_factor, mc_factor_direct, simulate_paths
from .quadrature import DEFAULT_ORDER
from .timegrid import AccrualGrid, DayCountBasis, build_grid

TABLE_COLUMNS = ["sigma", "a", "eta", "b", "rho", "A1", "Fa", "err_murex", "err_lin", "err_pw"]


class SpecError(ValueError):
    """Malformed command-line or spec-file input (exit status 2)."""


@dataclass(frozen=True)
class RunSpec:
    curve: DiscountCurve
    model: G2ppParams
    start_day: int
    end_day: int
    methods: tuple[str, ...]
    order: int
    mc: McConfig | None
    fmt: str
    out: str
    basis: DayCountBasis

    def grid(self) -> AccrualGrid:
        return build_grid(self.start_day, self.end_day, self.basis)


def parse_curve(text: str) -> DiscountCurve:
    kind, _, arg = text.partition(":")
    if kind == "flat" and arg:
        try:
            return FlatCurve(float(arg))
        except ValueError as exc:
            raise SpecError(f"--curve: bad flat rate {arg!r}") from exc
    if kind == "csv" and arg:
        try:
            return PillarCurve.from_csv(arg)
        except (OSError, ValueError, KeyError) as exc:
            raise SpecError(f"--curve: {exc}") from exc
    raise SpecError(f"--curve must be flat:<rate> or csv:<path>, got {text!r}")


def parse_model(text: str) -> G2ppParams:
    try:
        if text.startswith("json:"):
            return G2ppParams.from_json(text[5:])
        pairs = {}
        for item in text.split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise SpecError(f"--model: expected key=value, got {item!r}")
            pairs[key.strip()] = float(val)
        return G2ppParams.from_dict(pairs)
    except SpecError:
        raise
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise SpecError(f"--model: {exc}") from exc


def _add_common(p: argparse.ArgumentParser, *, period: bool = True) -> None:
    p.add_argument("--curve", default="flat:0.05", help="flat:<rate> or csv:<path> (default flat:0.05)")
    if period:
        p.add_argument("--model", required=True, help="sigma=..,a=..,eta=..,b=..,rho=.. or json:<path>")
        p.add_argument("--start", type=int, required=True, help="T_s in days")
        p.add_argument("--end", type=int, required=True, help="T_e in days")
    p.add_argument("--basis", type=int, default=360, help="day-count denominator (default 360)")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER, help="Gauss-Hermite nodes per dimension")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arithfwd", description="Arithmetic-average overnight forwards under G2++")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price forwards for one period")
    _add_common(p)
    p.add_argument("--method", default="exact,murex,linear,piecewise", help=f"comma list from {','.join(ALL_METHODS)}")
    p.add_argument("--midpoint", type=int, default=None)
    p.add_argument("--time-steps", type=int, default=DEFAULT_TIME_STEPS)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("table", help="reproduce a table of factors and relative errors")
    p.add_argument("spec", help="JSON table spec file")
    _add_common(p, period=False)
    p.add_argument("--errors-vs", choices=("exact", "mc"), default="exact", help="denominator of the error columns")

    p = sub.add_parser("factors", help="emit exact, linear and piecewise factor curves as CSV")
    _add_common(p)
    p.add_argument("--midpoint", type=int, default=None)

    p = sub.add_parser("mc-check", help="cross-check quadrature against Monte Carlo")
    _add_common(p)
    return parser


def _mc_config(args) -> McConfig:
    try:
        return McConfig(args.paths, args.seed, args.antithetic)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def _run_spec(args, methods=("exact",), fmt="json") -> RunSpec:
    if args.order < 1 or args.order > 128:
        raise SpecError(f"--order must be in [1, 128], got {args.order}")
    if args.end <= args.start:
        raise SpecError(f"--end must be greater than --start (start={args.start}, end={args.end})")
    if args.start < 0:
        raise SpecError(f"--start must be >= 0, got {args.start}")
    if not methods:
        raise SpecError("--method list is empty")
    try:
        basis = DayCountBasis(args.basis)
    except ValueError as exc:
        raise SpecError(f"--basis: {exc}") from exc
    return RunSpec(
        curve=parse_curve(args.curve),
        model=parse_model(args.model),
        start_day=args.start,
        end_day=args.end,
        methods=tuple(methods),
        order=args.order,
        mc=_mc_config(args),
        fmt=fmt,
        out=args.out,
        basis=basis,
    )


@contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _fmt5(x: float) -> str:
    return f"{x:.5f}"


def cmd_price(args) -> int:
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise SpecError(f"--method: unknown method(s) {unknown}")
    spec = _run_spec(args, methods, args.format)
    grid = spec.grid()
    if args.midpoint is not None and not 1 < args.midpoint < grid.K:
        raise SpecError(f"--midpoint must satisfy 1 < m < K={grid.K}, got {args.midpoint}")
    quotes = price(spec.model, spec.curve, grid, spec.methods, spec.order, spec.mc, args.midpoint, args.time_steps)
    with _output(spec.out) as fh:
        if spec.fmt == "json":
            json.dump([q.to_dict() for q in quotes], fh, indent=2)
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "value", "std_error", "Ts_days", "Te_days"])
            for q in quotes:
                d = q.to_dict()
                w.writerow([d["method"], repr(d["value"]), "" if d["std_error"] is None else repr(d["std_error"]),
                            d["Ts_days"], d["Te_days"]])
    return 0


def load_table_spec(path: str | Path) -> tuple[dict, list[G2ppParams]]:
    """Split a table spec file into its period header and parameter rows."""
    try:
        with open(path, encoding="utf-8") as fh:
            items = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"table spec: {exc}") from exc
    if not isinstance(items, list):
        raise SpecError("table spec must be a JSON array")
    headers = [it for it in items if isinstance(it, dict) and "start_day" in it]
    rows = [it for it in items if isinstance(it, dict) and "start_day" not in it]
    if len(headers) != 1:
        raise SpecError("table spec needs exactly one {\"start_day\", \"end_day\"} header object")
    header = headers[0]
    if "end_day" not in header or not all(isinstance(header[k], int) for k in ("start_day", "end_day")):
        raise SpecError("table spec header needs integer start_day and end_day")
    if not rows or len(rows) + 1 != len(items):
        raise SpecError("table spec needs at least one parameter object and nothing else")
    try:
        params = [G2ppParams.from_dict(r) for r in rows]
    except (ValueError, TypeError) as exc:
        raise SpecError(f"table spec: {exc}") from exc
    return header, params


def table_rows(
    params: list[G2ppParams],
    curve: DiscountCurve,
    grid: AccrualGrid,
    cfg: McConfig,
    order: int = DEFAULT_ORDER,
    errors_vs: str = "exact",
) -> list[dict]:
    """Numeric table rows; Fa from Monte Carlo, everything else from quadrature."""
    out = []
    for p in params:
        exact = arithmetic_forward(p, curve, grid, "exact", order)
        murex = arithmetic_forward(p, curve, grid, "murex", order).value
        lin = arithmetic_forward(p, curve, grid, "linear", order).value
        pw = arithmetic_forward(p, curve, grid, "piecewise", order).value
        mc = mc_arithmetic_forward(simulate_paths(p, curve, grid, cfg))
        ref = exact.value if errors_vs == "exact" else mc.value
        out.append({
            **p.to_dict(),
            "A1": float(exact.factor_curve.values[0]),
            "Fa": mc.value,
            "Fa_se": mc.std_error,
            "Fa_exact": exact.value,
            "err_murex": murex / ref - 1.0,
            "err_lin": lin / ref - 1.0,
            "err_pw": pw / ref - 1.0,
        })
    return out


def cmd_table(args) -> int:
    header, params = load_table_spec(args.spec)
    if args.order < 1 or args.order > 128:
        raise SpecError(f"--order must be in [1, 128], got {args.order}")
    try:
        grid = build_grid(header["start_day"], header["end_day"], DayCountBasis(args.basis))
    except ValueError as exc:
        raise SpecError(f"table spec: {exc}") from exc
    curve = parse_curve(args.curve)
    rows = table_rows(params, curve, grid, _mc_config(args), args.order, args.errors_vs)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in rows:
            w.writerow([repr(r[c]) for c in TABLE_COLUMNS[:5]] + [_fmt5(r[c]) for c in TABLE_COLUMNS[5:]])
    return 0


def cmd_factors(args) -> int:
    spec = _run_spec(args)
    grid = spec.grid()
    if grid.K < 3:
        raise SpecError(f"factor curves need at least 3 periods, got K={grid.K}")
    if args.midpoint is not None and not 1 < args.midpoint < grid.K:
        raise SpecError(f"--midpoint must satisfy 1 < m < K={grid.K}, got {args.midpoint}")
    exact, lin, pw = factor_table(spec.model, spec.curve, grid, spec.order, args.midpoint)
    with _output(spec.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "T_k", "A_exact", "A_lin", "A_pw"])
        for k in range(grid.K):
            w.writerow([k + 1, repr(float(grid.times[k])), repr(float(exact.values[k])),
                        repr(float(lin.values[k])), repr(float(pw.values[k]))])
    return 0


def mc_check(spec: RunSpec, n_sigma: float = 3.0) -> tuple[bool, list[str]]:
    """Quadrature vs Monte Carlo for F_a and A_1; returns (passed, report lines)."""
    grid = spec.grid()
    exact = arithmetic_forward(spec.model, spec.curve, grid, "exact", spec.order)
    terms = factor_terms(spec.model, spec.curve, grid, 1, spec.order)
    panel = simulate_paths(spec.model, spec.curve, grid, spec.mc)
    f1 = float(on_forwards(spec.curve, grid)[0])
    checks = [
        ("Fa", exact.value, mc_arithmetic_forward(panel)),
        ("A1", terms.value, mc_factor_direct(panel, 1, f1)),
        ("A1_ratio", terms.ratio_form, mc_factor(panel, 1)),
    ]
    lines = [f"# paths={spec.mc.n_paths} seed={spec.mc.seed} antithetic={spec.mc.antithetic} order={spec.order}"]
    ok_all = True
    for name, quad, est in checks:
        # deterministic models have zero standard error; allow rounding only
        floor = 1e-12 * max(abs(quad), 1e-300)
        ok = est.within(quad, n_sigma, floor)
        ok_all &= ok
        z = (est.value - quad) / est.std_error if est.std_error > floor else 0.0
        lines.append(
            f"{name:9s} quadrature={quad!r} mc={est.value!r} se={est.std_error!r} z={z:+.3f} {'PASS' if ok else 'FAIL'}"
        )
    lines.append("PASS" if ok_all else "FAIL")
    return ok_all, lines


def cmd_mc_check(args) -> int:
    spec = _run_spec(args)
    ok, lines = mc_check(spec)
    with _output(spec.out) as fh:
        fh.write("\n".join(lines) + "\n")
    return 0 if ok else 1


COMMANDS = {"price": cmd_price, "table": cmd_table, "factors": cmd_factors, "mc-check": cmd_mc_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SpecError as exc:
        print(f"arithfwd: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FloatingPointError, MemoryError) as exc:
        print(f"arithfwd: numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"arithfwd: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
