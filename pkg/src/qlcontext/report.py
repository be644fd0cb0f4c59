"""End-to-end analysis of one context: estimation, profile, representation, operators."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import io as qio
from .complex_repr import (
    build_amplitude,
    commutator_norm,
    expectation,
    operator_a,
    operator_b,
    to_bloch,
)
from .core import (
    CLASSIFICATION_TOL,
    DEGENERACY_FLOOR,
    Classification,
    ContextualData,
    check_incompatibility,
    interference_profile,
    is_doubly_stochastic,
    validate_data,
)
from .ensemble import CountTable, estimate_data, lambda_standard_errors
from .errors import (
    DegenerateDenominator,
    EmptyFiltration,
    NotHyperbolic,
    NotTrigonometric,
    ParseError,
    QLError,
    SchemaError,
    ZeroTotal,
)
from .hyperbolic import build_hyperbolic_amplitude, hyp_born

SCHEMA = "qlcontext.report/1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_DEGENERATE = 4
EXIT_NOT_TRIGONOMETRIC = 5
EXIT_IO = 6

VON_NEUMANN_NOTE = (
    "transition probabilities are treated as depending only on the b = y filtration; "
    "compare several preceding contexts (von_neumann_test) before relying on the amplitude"
)


class InvalidData(QLError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NotIncompatible(QLError):
    """Some transition probability is zero, so the observables are not incompatible."""


@dataclass(frozen=True)
class Settings:
    classification_tol: float = CLASSIFICATION_TOL
    sum_tol: float | None = None
    degeneracy_floor: float = DEGENERACY_FLOOR
    allow_hyperbolic: bool = False


@dataclass(frozen=True)
class AnalysisReport:
    """Serializable outcome of ``analyze``; ``exit_code`` follows the CLI contract."""

    body: dict
    exit_code: int

    def to_dict(self) -> dict:
        return self.body


def _vec(x) -> list:
    return [float(v) for v in x]


def analyze(
    source: Union[CountTable, ContextualData],
    settings: Settings = Settings(),
    input_info: dict | None = None,
) -> AnalysisReport:
    """Run the full pipeline.

    Raises InvalidData, NotIncompatible or DegenerateDenominator for inputs
    that cannot be analysed at all.  A context without a constructible
    amplitude still yields a report, with a nonzero exit code when the
    hyperbolic representation was not enabled.
    """
    table = None
    se = None
    if isinstance(source, CountTable):
        table = source
        data, se = estimate_data(table)
    else:
        data = source
    sum_tol = data.sum_tolerance if settings.sum_tol is None else settings.sum_tol
    violations = validate_data(data, sum_tol)
    if violations:
        raise InvalidData(violations)
    incompatible = check_incompatibility(data.P, 0.0)
    if not incompatible:
        raise NotIncompatible("a transition probability is zero; interference is undefined")
    doubly = is_doubly_stochastic(data.P, sum_tol)
    profile = interference_profile(data, settings.classification_tol, settings.degeneracy_floor)
    if table is not None:
        profile = profile.with_errors(lambda_standard_errors(data, table))

    body = {
        "schema": SCHEMA,
        "input": dict(input_info or {}, provenance=data.provenance.value),
        "tolerances": {
            "classification": settings.classification_tol,
            "probability_sum": sum_tol,
            "degeneracy_floor": settings.degeneracy_floor,
        },
        "data": qio.data_to_dict(data),
        "counts": qio.counts_to_dict(table) if table is not None else None,
        "standard_errors": None if se is None else {
            "pa": _vec(se.pa), "pb": _vec(se.pb), "P": se.P.tolist(),
        },
        "classification": profile.classification.value,
        "lambda": _vec(profile.lambdas),
        "lambda_se": None if profile.lambda_se is None else _vec(profile.lambda_se),
        "theta": _vec(profile.phases),
        "signs": list(profile.signs),
        "outcome_kinds": list(profile.outcome_kinds),
        "representation": "none",
        "representation_note": None,
        "psi_re": None,
        "psi_im": None,
        "phase_convention": None,
        "split_complex": None,
        "born": None,
        "operators": {"a": qio.complex_matrix(operator_a(data.space).matrix), "b": None, "commutator_norm": None},
        "expectations": {"a": float(np.dot(data.space.a_values, data.pa)), "b": None},
        "bloch": None,
        "purity": None,
        "diagnostics": {
            "incompatible": incompatible,
            "doubly_stochastic": doubly,
            "von_neumann": VON_NEUMANN_NOTE,
        },
    }
    exit_code = EXIT_OK
    cls = profile.classification

    if cls is Classification.TRIGONOMETRIC:
        state = build_amplitude(data, profile)
        conv = state.phase_convention
        body.update(
            representation="complex",
            psi_re=_vec(state.amplitudes.real),
            psi_im=_vec(state.amplitudes.imag),
            phase_convention={"xi_y1": _vec(conv.xi_y1), "xi_y2": _vec(conv.xi_y2), "branch": conv.branch},
            born=_vec(state.probabilities()),
        )
        a_op = operator_a(data.space)
        body["expectations"]["a"] = expectation(a_op, state)
        if doubly:
            b_op = operator_b(data, profile)
            body["operators"]["b"] = qio.complex_matrix(b_op.matrix)
            body["operators"]["commutator_norm"] = commutator_norm(a_op, b_op)
            body["expectations"]["b"] = expectation(b_op, state)
        else:
            body["operators"]["note"] = "transition matrix is not doubly stochastic; no symmetric b operator"
        rho = to_bloch(state)
        body["bloch"] = _vec(rho.bloch)
        body["purity"] = rho.purity
    elif not settings.allow_hyperbolic:
        body["representation_note"] = (
            f"context is {cls.value}; rerun with --allow-hyperbolic to accept non-trigonometric contexts"
        )
        exit_code = EXIT_NOT_TRIGONOMETRIC
    elif cls is Classification.HYPERBOLIC:
        amp = build_hyperbolic_amplitude(data, profile)
        body.update(
            representation="hyperbolic",
            split_complex={"u": [z.u for z in amp.amplitudes], "v": [z.v for z in amp.amplitudes]},
            born=[hyp_born(amp, x) for x in (0, 1)],
        )
    else:
        body["representation_note"] = (
            "hyper-trigonometric context: one outcome is trigonometric and the other hyperbolic, "
            "and no single amplitude mixes the two"
        )
    body["exit_code"] = exit_code
    return AnalysisReport(body, exit_code)


def error_object(exc: BaseException, code: int) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, InvalidData):
        err["violations"] = [
            {"field": v.field, "message": v.message, "magnitude": v.magnitude} for v in exc.violations
        ]
    location = getattr(exc, "location", None)
    if location is not None:
        err["location"] = location
    return {"schema": SCHEMA, "error": err}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ParseError, OSError)):
        return EXIT_IO
    if isinstance(exc, (DegenerateDenominator, NotIncompatible, EmptyFiltration)):
        return EXIT_DEGENERATE
    if isinstance(exc, (NotTrigonometric, NotHyperbolic)):
        return EXIT_NOT_TRIGONOMETRIC
    if isinstance(exc, (InvalidData, SchemaError, ZeroTotal, ValueError, QLError)):
        return EXIT_VALIDATION
    raise exc
