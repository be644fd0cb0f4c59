"""Complex amplitudes, observable operators and Bloch geometry for trigonometric contexts.

The amplitude of a context is

    psi(x) = sqrt(pb(y1) P(x|y1)) + exp(i xi(x)) sqrt(pb(y2) P(x|y2)),

with xi(x) the interference phase of outcome x, so |psi(x)|^2 reproduces
p^a(x).  States live in the a-basis; the Bloch z-axis is aligned with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    ANALYTIC_SUM_TOL,
    Classification,
    ContextualData,
    InterferenceProfile,
    OutcomeSpace,
    interference_profile,
    is_doubly_stochastic,
)
from .errors import BadWeights, NotDoublyStochastic, NotTrigonometric

PRINCIPAL = "principal"
ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class PhaseConvention:
    """Phases xi(x|y) used to assemble an amplitude.

    ``xi_y1`` is always (0, 0).  Under the principal branch ``xi_y2`` equals the
    arccos phases; under the orthogonal branch the second outcome gets
    theta(x1) + pi instead, which keeps the b-eigenbasis orthonormal.
    """

    xi_y1: tuple[float, float]
    xi_y2: tuple[float, float]
    branch: str = PRINCIPAL


@dataclass(frozen=True)
class QLState:
    amplitudes: np.ndarray
    phase_convention: PhaseConvention | None = None

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=complex)
        if arr.shape != (2,):
            raise ValueError(f"a state needs two amplitudes, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


@dataclass(frozen=True)
class ObservableOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"operator must be 2x2, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class DensityState:
    matrix: np.ndarray
    bloch: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        r = np.array(self.bloch, dtype=float)
        m.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "bloch", r)

    @classmethod
    def from_bloch(cls, r: Sequence[float]) -> "DensityState":
        """Inverse of the ``to_bloch`` convention: rho[0, 1] = (r_x + i r_y) / 2."""
        rx, ry, rz = np.asarray(r, dtype=float)
        rho = 0.5 * np.array([[1 + rz, rx + 1j * ry], [rx - 1j * ry, 1 - rz]])
        return cls(rho, (rx, ry, rz))

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.bloch))


def _check_trigonometric(profile: InterferenceProfile):
    if profile.classification is not Classification.TRIGONOMETRIC:
        raise NotTrigonometric(
            f"context is {profile.classification.value}; "
            "a complex amplitude exists only for |lambda| <= 1"
        )


def build_amplitude(
    data: ContextualData,
    profile: InterferenceProfile | None = None,
    branch: str = PRINCIPAL,
) -> QLState:
    """Complex amplitude of a trigonometric context.

    ``branch="orthogonal"`` replaces the second phase by theta(x1) + pi; it is
    only consistent with the data for doubly stochastic transitions, where
    lambda(x2) = -lambda(x1).
    """
    if profile is None:
        profile = interference_profile(data)
    _check_trigonometric(profile)
    theta = profile.phases
    if branch == PRINCIPAL:
        xi2 = (theta[0], theta[1])
    elif branch == ORTHOGONAL:
        if not is_doubly_stochastic(data.P, data.sum_tolerance):
            raise NotDoublyStochastic("the orthogonal branch requires doubly stochastic transitions")
        xi2 = (theta[0], theta[0] + math.pi)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    psi = np.empty(2, dtype=complex)
    for x in (0, 1):
        A = data.pb[0] * data.P[x, 0]
        B = data.pb[1] * data.P[x, 1]
        psi[x] = math.sqrt(A) + np.exp(1j * xi2[x]) * math.sqrt(B)
    return QLState(psi, PhaseConvention((0.0, 0.0), xi2, branch))


def born_probability(state: QLState, x: int) -> float:
    """|(psi, e_x)|^2 in the a-basis."""
    return float(abs(state.amplitudes[x]) ** 2)


def operator_a(space: OutcomeSpace) -> ObservableOperator:
    return ObservableOperator(np.diag(np.array(space.a_values, dtype=complex)))


def b_eigenbasis(data: ContextualData, profile: InterferenceProfile | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors u_y1, u_y2 of the b-operator in the a-basis.

    u_y1(x) = sqrt(P(x|y1)); u_y2(x) = exp(i xi(x|y2)) sqrt(P(x|y2)) with the
    orthogonal-branch phases (theta(x1), theta(x1) + pi).
    """
    if profile is None:
        profile = interference_profile(data)
    _check_trigonometric(profile)
    if not is_doubly_stochastic(data.P, data.sum_tolerance):
        raise NotDoublyStochastic(
            "b has a symmetric operator only when the transition matrix is doubly stochastic"
        )
    t1 = profile.phases[0]
    u1 = np.sqrt(data.P[:, 0]).astype(complex)
    u2 = np.exp(1j * np.array([t1, t1 + math.pi])) * np.sqrt(data.P[:, 1])
    return u1, u2


def operator_b(data: ContextualData, profile: InterferenceProfile | None = None) -> ObservableOperator:
    """Spectral construction sum_y b_value(y) |u_y><u_y|."""
    u1, u2 = b_eigenbasis(data, profile)
    b1, b2 = data.space.b_values
    return ObservableOperator(b1 * np.outer(u1, u1.conj()) + b2 * np.outer(u2, u2.conj()))


def expectation(op: ObservableOperator, state: QLState) -> float:
    """(op psi, psi); the imaginary part vanishes for Hermitian operators."""
    psi = state.amplitudes
    return float(np.real(np.vdot(psi, op.matrix @ psi)))


def commutator_norm(op1: ObservableOperator, op2: ObservableOperator) -> float:
    A, B = op1.matrix, op2.matrix
    return float(np.linalg.norm(A @ B - B @ A, "fro"))


def to_bloch(state: QLState) -> DensityState:
    """Bloch vector with z along the a-basis and r_x + i r_y = 2 psi(x1) conj(psi(x2)).

    The y-axis is therefore the mirror image of the one given by the usual
    Pauli sigma_y; radius, purity and the x/z components are unaffected.
    """
    psi = state.amplitudes
    rho = np.outer(psi, psi.conj())
    c = psi[0] * np.conj(psi[1])
    r = np.array([2 * c.real, 2 * c.imag, abs(psi[0]) ** 2 - abs(psi[1]) ** 2])
    return DensityState(rho, r)


def mix(states: Sequence[DensityState], weights: Sequence[float]) -> DensityState:
    """Convex combination of density states."""
    w = np.asarray(weights, dtype=float)
    if len(states) == 0 or w.shape != (len(states),):
        raise BadWeights("need one weight per state and at least one state")
    if np.any(w < 0) or abs(w.sum() - 1.0) > ANALYTIC_SUM_TOL:
        raise BadWeights(f"weights must be nonnegative and sum to 1, got {w.tolist()}")
    rho = sum(wi * s.matrix for wi, s in zip(w, states))
    r = sum(wi * s.bloch for wi, s in zip(w, states))
    return DensityState(rho, r)


def representation_collision(d1: ContextualData, d2: ContextualData, tol: float = 1e-10) -> bool:
    """True when two contexts are mapped to the same amplitude."""
    if d1.space != d2.space:
        raise ValueError("contexts must share one outcome space")
    psi1 = build_amplitude(d1).amplitudes
    psi2 = build_amplitude(d2).amplitudes
    return bool(np.max(np.abs(psi1 - psi2)) <= tol)
