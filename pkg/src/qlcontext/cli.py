"""Command-line front end: ``qlcontext {analyze,simulate,evolve,sweep}``."""
from __future__ import annotations

import argparse
import ast
import csv
import io
import math
import operator
import sys
from pathlib import Path

import numpy as np

from . import io as qio
from .complex_repr import ObservableOperator, QLState
from .core import (
    CLASSIFICATION_TOL,
    DEGENERACY_FLOOR,
    ContextualData,
    interference_coefficient,
    profile_from_lambdas,
)
from .dynamics import Hamiltonian, build_hamiltonian, sample_linear
from .ensemble import preset, sample_counts, two_scale_collect
from .errors import DegenerateDenominator, SchemaError
from .report import (
    EXIT_DEGENERATE,
    EXIT_IO,
    EXIT_NOT_TRIGONOMETRIC,
    EXIT_OK,
    EXIT_VALIDATION,
    Settings,
    analyze,
    error_object,
    exit_code_for,
)

EPILOG = f"""\
exit codes:
  {EXIT_OK}  success
  2  command-line usage error
  {EXIT_VALIDATION}  input violates the data schema or probability invariants
  {EXIT_DEGENERATE}  observables not mutually incompatible (a zero transition probability / degenerate denominator)
  {EXIT_NOT_TRIGONOMETRIC}  context is not trigonometric and --allow-hyperbolic was not given
  {EXIT_IO}  file missing, unreadable or not parseable
"""


def _emit(text: str, output: str | None) -> None:
    if output:
        qio.atomic_write(output, text)
    else:
        sys.stdout.write(text)


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, "" if value is None else value))


def report_to_csv(body: dict) -> str:
    rows: list = []
    _flatten("", body, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("field", "value"))
    for key, value in rows:
        w.writerow((key, repr(value) if isinstance(value, float) else value))
    return buf.getvalue()


def _settings(args) -> Settings:
    return Settings(
        classification_tol=args.tolerance,
        sum_tol=getattr(args, "sum_tolerance", None),
        degeneracy_floor=getattr(args, "floor", DEGENERACY_FLOOR),
        allow_hyperbolic=args.allow_hyperbolic,
    )


# ---------------------------------------------------------------- analyze


def cmd_analyze(args) -> int:
    source = qio.load_input(args.input, args.input_format)
    info = {"path": Path(args.input).name, "checksum": qio.checksum(qio.read_bytes(args.input))}
    report = analyze(source, _settings(args), info)
    body = report.to_dict()
    _emit(report_to_csv(body) if args.format == "csv" else qio.dumps(body), args.output)
    return report.exit_code


# --------------------------------------------------------------- simulate


def _load_scenario(args):
    if args.preset:
        scenario = preset(args.preset)
        return scenario.spec, scenario.space
    obj, _ = qio.read_json(args.spec)
    return qio.spec_from_dict(obj), qio.space_from_dict(obj.get("space"))


def _analyze_counts(table, settings):
    """Analysis of simulated counts; failures become embedded error objects."""
    try:
        report = analyze(table, settings, {"source": "simulation", "seed": table.seed})
        return report.to_dict(), report.exit_code
    except Exception as exc:  # noqa: BLE001 - mapped to the exit-code contract
        code = exit_code_for(exc)
        return error_object(exc, code), code


def cmd_simulate(args) -> int:
    spec, space = _load_scenario(args)
    settings = _settings(args)
    if args.steps and args.steps > 1:
        if args.format == "csv":
            raise SchemaError("--format", "csv output holds a single count table; drop --steps or use json")
        steps = two_scale_collect(spec, args.steps, args.samples, args.seed, space, args.tolerance)
        out, code = [], EXIT_OK
        for step in steps:
            report, c = _analyze_counts(step.result.table, settings)
            code = code or c
            out.append({"t": step.t, "counts": qio.counts_to_dict(step.result.table), "report": report})
        _emit(qio.dumps({"spec": spec.to_dict(), "samples_per_step": args.samples, "seed": args.seed, "steps": out}), args.output)
        return code
    table = sample_counts(spec, args.samples, args.seed, space)
    report, code = _analyze_counts(table, settings)
    if args.format == "csv":
        _emit(qio.counts_to_csv(table), args.output)
        if args.report:
            qio.atomic_write(args.report, qio.dumps(report))
    else:
        _emit(qio.dumps({"spec": spec.to_dict(), "counts": qio.counts_to_dict(table), "report": report}), args.output)
    return code


# ----------------------------------------------------------------- evolve


def _state_from(obj: dict) -> QLState:
    if "report" in obj and isinstance(obj["report"], dict):
        obj = obj["report"]
    if obj.get("psi_re") is None or obj.get("psi_im") is None:
        raise SchemaError("psi_re", "input carries no complex state (needs psi_re and psi_im)")
    try:
        psi = np.array(obj["psi_re"], dtype=float) + 1j * np.array(obj["psi_im"], dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("psi_re", "amplitudes must be numbers") from None
    if psi.shape != (2,):
        raise SchemaError("psi_re", "a state needs exactly two amplitudes")
    return QLState(psi)


def _hamiltonian_from(h: dict, state_obj: dict) -> Hamiltonian:
    """Explicit ``matrix`` or ``b`` (matrix or "report") plus ``potential`` coefficients."""
    if "matrix" in h:
        return Hamiltonian(qio.parse_complex_matrix(h["matrix"], "hamiltonian.matrix"))
    if "b" not in h:
        raise SchemaError("hamiltonian", "needs 'matrix' or 'b'")
    src = state_obj.get("report", state_obj)
    if h["b"] == "report":
        b = (src.get("operators") or {}).get("b")
        if b is None:
            raise SchemaError("hamiltonian.b", "input report has no b operator")
        b_matrix = qio.parse_complex_matrix(b, "operators.b")
    else:
        b_matrix = qio.parse_complex_matrix(h["b"], "hamiltonian.b")
    space = qio.space_from_dict(h.get("space") or (src.get("data") or {}).get("space"))
    return build_hamiltonian(ObservableOperator(b_matrix), h.get("potential", []), space)


def cmd_evolve(args) -> int:
    state_obj, _ = qio.read_json(args.input)
    h_obj, _ = qio.read_json(args.hamiltonian)
    psi0 = _state_from(state_obj)
    H = _hamiltonian_from(h_obj, state_obj)
    traj = sample_linear(H, psi0, args.t, args.steps)
    energy = [float(np.real(np.vdot(s.amplitudes, H.matrix @ s.amplitudes))) for s in traj.states]
    out = {
        "hamiltonian": qio.complex_matrix(H.matrix),
        "times": traj.times.tolist(),
        "psi_re": [s.amplitudes.real.tolist() for s in traj.states],
        "psi_im": [s.amplitudes.imag.tolist() for s in traj.states],
        "born": traj.born().tolist(),
        "energy": energy,
        "norm_drift": traj.norm_drift(),
        "energy_drift": float(max(energy) - min(energy)),
    }
    _emit(qio.dumps(out), args.output)
    return EXIT_OK


# ------------------------------------------------------------------ sweep

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Float literal or simple arithmetic in ``pi`` such as ``2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except SyntaxError:
        raise ValueError(f"cannot parse number {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """Comma list ``0,pi/2,pi`` or range ``start:stop:num`` (inclusive)."""
    if ":" in text:
        start, stop, num = text.split(":")
        return np.linspace(parse_number(start), parse_number(stop), int(num)).tolist()
    return [parse_number(t) for t in text.split(",") if t.strip()]


SWEEP_COLUMNS = ("theta", "lambda", "pa_x1", "lambda_x2", "classification", "in_bounds")


def sweep_rows(pb, P, thetas=None, pa_values=None, tolerance: float = CLASSIFICATION_TOL) -> list[dict]:
    """Interference curve p^a(x1) over a phase grid or a p^a(x1) grid."""
    pb = np.asarray(pb, dtype=float)
    P = np.asarray(P, dtype=float)
    A, B = float(pb[0] * P[0, 0]), float(pb[1] * P[0, 1])
    rows = []
    if thetas is not None:
        points = [(t, A + B + 2.0 * math.cos(t) * math.sqrt(A * B)) for t in thetas]
    else:
        points = [(None, float(pa)) for pa in pa_values]
    for theta, pa1 in points:
        in_bounds = bool(0.0 <= pa1 <= 1.0)
        data = ContextualData.from_arrays([pa1, 1.0 - pa1], pb, P, provenance="empirical")
        try:
            lam1 = math.cos(theta) if theta is not None else interference_coefficient(data, 0)
            lam2 = interference_coefficient(data, 1)
        except DegenerateDenominator:
            rows.append({"theta": theta, "lambda": None, "pa_x1": pa1, "lambda_x2": None,
                         "classification": "degenerate", "in_bounds": in_bounds})
            continue
        prof = profile_from_lambdas([lam1, lam2], tolerance)
        rows.append({
            "theta": theta if theta is not None else prof.phases[0],
            "lambda": lam1,
            "pa_x1": pa1,
            "lambda_x2": lam2,
            "classification": prof.classification.value if in_bounds else "out-of-bounds",
            "in_bounds": in_bounds,
        })
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.input:
        source = qio.load_input(args.input, args.input_format)
        if not isinstance(source, ContextualData):
            raise SchemaError("--input", "sweep needs a probabilities file, not counts")
        pb, P = source.pb, source.P
    else:
        if not (args.pb and args.P):
            raise SchemaError("--pb/--P", "give --input or both --pb and --P")
        pb = [parse_number(t) for t in args.pb.split(",")]
        P = np.array([parse_number(t) for t in args.P.split(",")]).reshape(2, 2)
    if (args.theta is None) == (args.pa is None):
        raise SchemaError("--theta/--pa", "give exactly one of --theta and --pa")
    if args.theta is not None:
        rows = sweep_rows(pb, P, thetas=parse_grid(args.theta), tolerance=args.tolerance)
    else:
        rows = sweep_rows(pb, P, pa_values=parse_grid(args.pa), tolerance=args.tolerance)
    if not rows:
        raise SchemaError("grid", "grid is empty")
    if args.format == "json":
        _emit(qio.dumps(rows), args.output)
    else:
        _emit(sweep_csv(rows), args.output)
    return EXIT_OK


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlcontext",
        description="Interference analysis and quantum-like representation of contextual probability data.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json", "csv"), default="json"):
        p.add_argument("--output", "-o", help="output path (default: stdout)")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--tolerance", type=float, default=CLASSIFICATION_TOL,
                       help="classification tolerance on |lambda| vs 1 (default %(default)s)")
        p.add_argument("--allow-hyperbolic", action="store_true",
                       help="accept hyperbolic / hyper-trigonometric contexts with exit code 0")

    p = sub.add_parser("analyze", help="analyse counts or probabilities", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--input-format", choices=qio.FORMATS)
    p.add_argument("--sum-tolerance", type=float, help="override the probability-sum tolerance")
    p.add_argument("--floor", type=float, default=DEGENERACY_FLOOR, help="degeneracy floor for denominators")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="sample an ensemble and analyse the counts", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", "--input", dest="spec", help="ensemble spec JSON")
    src.add_argument("--preset", help="built-in scenario name")
    p.add_argument("--samples", "-n", type=int, default=100_000, help="systems per context / per step")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=1, help="coarse time steps (two-scale collection)")
    p.add_argument("--report", help="with --format csv: where to write the analysis report")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evolve", help="linear evolution of a state", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", "-i", required=True, help="state JSON or analyze report")
    p.add_argument("--hamiltonian", required=True, help="Hamiltonian JSON: matrix, or b + potential")
    p.add_argument("--t", type=float, required=True, help="final time")
    p.add_argument("--steps", type=int, default=100)
    common(p, formats=("json",))
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="interference curve over a phase or probability grid", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", "-i", help="probabilities JSON supplying pb and P")
    p.add_argument("--input-format", choices=qio.FORMATS)
    p.add_argument("--pb", help="pb(y1),pb(y2)")
    p.add_argument("--P", help="P(x1|y1),P(x1|y2),P(x2|y1),P(x2|y2)")
    p.add_argument("--theta", help="phase grid: 0,pi/2,pi or start:stop:num")
    p.add_argument("--pa", help="pa(x1) grid: list or start:stop:num")
    common(p, default="csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure maps to a documented exit code
        try:
            code = exit_code_for(exc)
        except Exception:
            raise exc
        print(f"qlcontext {args.command}: {exc}", file=sys.stderr)
        _emit(qio.dumps(error_object(exc, code)), getattr(args, "output", None))
        return code


if __name__ == "__main__":
    sys.exit(main())
