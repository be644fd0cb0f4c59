"""Contextual probability data for two dichotomous observables.

A context C is summarised by its probabilistic image: the marginals p^a, p^b
measured under C and the transition probabilities p(x|y) measured under the
filtration contexts C_y.  Everything here is a pure function of that image.

Index conventions: a-outcomes and b-outcomes are addressed by 0/1.
Transition matrices are indexed ``P[x, y] = p(a=x | b=y)`` so columns sum to 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateDenominator

# Analytic inputs are exact up to rounding; empirical or user-rounded inputs are not.
ANALYTIC_SUM_TOL = 1e-12
EMPIRICAL_SUM_TOL = 1e-6
DEGENERACY_FLOOR = 1e-12
CLASSIFICATION_TOL = 1e-9

ArrayLike = Union[Sequence[float], np.ndarray]


def _frozen(values, shape, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OutcomeSpace:
    """Labels and numeric values of the two outcomes of a and of b."""

    a_labels: tuple[str, str] = ("x1", "x2")
    b_labels: tuple[str, str] = ("y1", "y2")
    a_values: tuple[float, float] = (1.0, -1.0)
    b_values: tuple[float, float] = (1.0, -1.0)

    def __post_init__(self):
        for name in ("a_labels", "b_labels", "a_values", "b_values"):
            value = tuple(getattr(self, name))
            if len(value) != 2:
                raise ValueError(f"{name} must have exactly two entries, got {len(value)}")
            if name.endswith("values"):
                value = tuple(float(v) for v in value)
            else:
                value = tuple(str(v) for v in value)
            if value[0] == value[1]:
                raise ValueError(f"{name} entries must be distinct, got {value}")
            object.__setattr__(self, name, value)

    def to_dict(self) -> dict:
        return {
            "a_labels": list(self.a_labels),
            "b_labels": list(self.b_labels),
            "a_values": list(self.a_values),
            "b_values": list(self.b_values),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OutcomeSpace":
        default = cls()
        return cls(
            a_labels=tuple(d.get("a_labels", default.a_labels)),
            b_labels=tuple(d.get("b_labels", default.b_labels)),
            a_values=tuple(d.get("a_values", default.a_values)),
            b_values=tuple(d.get("b_values", default.b_values)),
        )


@dataclass(frozen=True)
class TransitionMatrix:
    """``entries[x, y] = p(a=x | b=y)``; read-only 2x2 array."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries, (2, 2)))

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)


@dataclass(frozen=True)
class ContextProbabilities:
    pa: np.ndarray
    pb: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pa", _frozen(self.pa, (2,)))
        object.__setattr__(self, "pb", _frozen(self.pb, (2,)))


class Provenance(str, enum.Enum):
    ANALYTIC = "analytic"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class ContextualData:
    """The probabilistic image D(O, C) of one context."""

    context_id: str
    space: OutcomeSpace
    marginals: ContextProbabilities
    transitions: TransitionMatrix
    provenance: Provenance = Provenance.ANALYTIC

    def __post_init__(self):
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @classmethod
    def from_arrays(
        cls,
        pa: ArrayLike,
        pb: ArrayLike,
        P: ArrayLike,
        context_id: str = "C",
        space: OutcomeSpace | None = None,
        provenance: Provenance | str = Provenance.ANALYTIC,
    ) -> "ContextualData":
        return cls(
            context_id=context_id,
            space=space if space is not None else OutcomeSpace(),
            marginals=ContextProbabilities(pa, pb),
            transitions=TransitionMatrix(P),
            provenance=Provenance(provenance),
        )

    @property
    def pa(self) -> np.ndarray:
        return self.marginals.pa

    @property
    def pb(self) -> np.ndarray:
        return self.marginals.pb

    @property
    def P(self) -> np.ndarray:
        return self.transitions.entries

    @property
    def sum_tolerance(self) -> float:
        if self.provenance is Provenance.EMPIRICAL:
            return EMPIRICAL_SUM_TOL
        return ANALYTIC_SUM_TOL

    def swap_b(self) -> "ContextualData":
        """Same context with the labels y1 and y2 exchanged."""
        space = OutcomeSpace(
            self.space.a_labels,
            self.space.b_labels[::-1],
            self.space.a_values,
            self.space.b_values[::-1],
        )
        return ContextualData.from_arrays(
            self.pa, self.pb[::-1], self.P[:, ::-1], self.context_id, space, self.provenance
        )


@dataclass(frozen=True)
class Violation:
    field: str
    message: str
    magnitude: float

    def __str__(self):
        return self.message


def validate_data(data: ContextualData, tol: float | None = None) -> list[Violation]:
    """Return every broken invariant of ``data``; an empty list means valid.

    ``tol`` defaults to the tolerance implied by the data's provenance.
    """
    tol = data.sum_tolerance if tol is None else tol
    report: list[Violation] = []

    def check_range(name, values):
        for idx, p in np.ndenumerate(values):
            if not (0.0 <= p <= 1.0) or math.isnan(p):
                where = "".join(f"[{i}]" for i in idx)
                dist = p if p < 0 else p - 1.0
                report.append(Violation(f"{name}{where}", f"{name}{where} = {p:.12g} outside [0, 1]", abs(dist)))

    for name, values in (("pa", data.pa), ("pb", data.pb), ("P", data.P)):
        check_range(name, values)
    for name, values in (("pa", data.pa), ("pb", data.pb)):
        s = float(values.sum())
        if abs(s - 1.0) > tol:
            report.append(Violation(name, f"{name} sums to {s:.12g}", abs(s - 1.0)))
    for j, s in enumerate(data.transitions.column_sums()):
        if abs(s - 1.0) > tol:
            label = data.space.b_labels[j]
            report.append(Violation(f"P[:, {j}]", f"column {label} sums to {s:.12g}", abs(s - 1.0)))
    return report


def _matrix(P) -> np.ndarray:
    return np.asarray(P.entries if isinstance(P, TransitionMatrix) else P, dtype=float)


def classical_ftp(pb: ArrayLike, P) -> np.ndarray:
    """Classical total probability: q(x) = sum_y pb(y) P(x|y)."""
    pb = np.asarray(pb, dtype=float)
    P = _matrix(P)
    return P[:, 0] * pb[0] + P[:, 1] * pb[1]


def _terms(pb, P, x: int) -> tuple[float, float]:
    # (pb(y1) P(x|y1), pb(y2) P(x|y2))
    return float(pb[0] * P[x, 0]), float(pb[1] * P[x, 1])


def interference_coefficient(
    data: ContextualData, x: int, floor: float = DEGENERACY_FLOOR
) -> float:
    """Normalised deviation of p^a(x) from the classical total probability.

    Raises DegenerateDenominator when 2 sqrt(A B) < ``floor``.
    """
    A, B = _terms(data.pb, data.P, x)
    denom = 2.0 * math.sqrt(A * B)
    if denom < floor:
        raise DegenerateDenominator(x, denom)
    return (float(data.pa[x]) - (A + B)) / denom


class Classification(str, enum.Enum):
    TRIGONOMETRIC = "trigonometric"
    HYPERBOLIC = "hyperbolic"
    HYPER_TRIGONOMETRIC = "hyper-trigonometric"


def arccosh_stable(c: float) -> float:
    """arccosh for c >= 1 written to avoid cancellation near 1."""
    c = abs(c)
    return math.log(c + math.sqrt(c * c - 1.0)) if c > 1.0 else 0.0


@dataclass(frozen=True)
class InterferenceProfile:
    """Per-outcome interference coefficients and the phases they induce.

    ``phases`` holds an angle in [0, pi] for trigonometric outcomes and a
    nonnegative hyperbolic parameter for hyperbolic ones; ``signs`` carries
    the sign of lambda so that lambda = sign * cosh(phase) in the latter case.
    ``lambda_se`` is filled only for empirical profiles.
    """

    lambdas: tuple[float, float]
    phases: tuple[float, float]
    signs: tuple[int, int]
    classification: Classification
    tolerance: float = CLASSIFICATION_TOL
    lambda_se: tuple[float, float] | None = None

    @property
    def outcome_kinds(self) -> tuple[str, str]:
        return tuple(
            "trigonometric" if abs(lam) <= 1.0 + self.tolerance else "hyperbolic"
            for lam in self.lambdas
        )

    def with_errors(self, lambda_se) -> "InterferenceProfile":
        return InterferenceProfile(
            self.lambdas, self.phases, self.signs, self.classification, self.tolerance,
            tuple(float(s) for s in lambda_se),
        )


def profile_from_lambdas(lambdas: ArrayLike, tolerance: float = CLASSIFICATION_TOL) -> InterferenceProfile:
    phases, signs, hyperbolic = [], [], []
    for lam in lambdas:
        lam = float(lam)
        signs.append(1 if lam >= 0 else -1)
        if abs(lam) <= 1.0 + tolerance:
            phases.append(math.acos(min(1.0, max(-1.0, lam))))
            hyperbolic.append(False)
        else:
            phases.append(arccosh_stable(lam))
            hyperbolic.append(True)
    if not any(hyperbolic):
        cls = Classification.TRIGONOMETRIC
    elif all(hyperbolic):
        cls = Classification.HYPERBOLIC
    else:
        cls = Classification.HYPER_TRIGONOMETRIC
    return InterferenceProfile(
        (float(lambdas[0]), float(lambdas[1])), tuple(phases), tuple(signs), cls, tolerance
    )


def interference_profile(
    data: ContextualData,
    tolerance: float = CLASSIFICATION_TOL,
    floor: float = DEGENERACY_FLOOR,
) -> InterferenceProfile:
    """Coefficients, phases and classification for both a-outcomes.

    A degenerate denominator for either outcome fails the whole profile.
    """
    lambdas = [interference_coefficient(data, x, floor) for x in (0, 1)]
    return profile_from_lambdas(lambdas, tolerance)


def check_incompatibility(P, floor: float = 0.0) -> bool:
    """True iff every transition probability exceeds ``floor``."""
    return bool(np.all(_matrix(P) > floor))


def is_doubly_stochastic(P, tol: float = ANALYTIC_SUM_TOL) -> bool:
    M = _matrix(P)
    return bool(np.all(np.abs(M.sum(axis=1) - 1.0) <= tol) and np.all(np.abs(M.sum(axis=0) - 1.0) <= tol))


def reconstruct_marginal(profile: InterferenceProfile, pb: ArrayLike, P) -> np.ndarray:
    """p^a recomputed from lambda through the interference form of total probability."""
    pb = np.asarray(pb, dtype=float)
    P = _matrix(P)
    out = np.empty(2)
    for x in (0, 1):
        A, B = _terms(pb, P, x)
        out[x] = (A + B) + 2.0 * profile.lambdas[x] * math.sqrt(A * B)
    return out


def interference_weights(data: ContextualData) -> np.ndarray:
    """sqrt(pb(y1)P(x|y1) pb(y2)P(x|y2)) for each x."""
    return np.array([math.sqrt(np.prod(_terms(data.pb, data.P, x))) for x in (0, 1)])
