"""Schrodinger-type evolution of two-component states (units with hbar = 1)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .complex_repr import ObservableOperator, QLState
from .core import OutcomeSpace
from .errors import BadCoefficients, NonHermitianInput, NormViolation, NotOrthonormal

HERMITIAN_TOL = 1e-12

StepMap = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Hamiltonian:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Hamiltonian must be 2x2, got {m.shape}")
        err = float(np.max(np.abs(m - m.conj().T)))
        if err > HERMITIAN_TOL:
            raise NonHermitianInput(f"Hamiltonian is not Hermitian (max |H - H^dagger| = {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    def propagator(self, t: float) -> np.ndarray:
        """exp(-i H t) from the spectral decomposition."""
        mu, V = self.eigh()
        return (V * np.exp(-1j * mu * t)) @ V.conj().T


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple[QLState, ...]

    def born(self) -> np.ndarray:
        return np.array([s.probabilities() for s in self.states])

    def norm_drift(self) -> float:
        return float(max(abs(s.norm - 1.0) for s in self.states))


def build_hamiltonian(
    b_op: ObservableOperator, potential_coeffs: Sequence[float], space: OutcomeSpace
) -> Hamiltonian:
    """b^2 / 2 + V(a) with V given by ascending polynomial coefficients.

    V(a) is diagonal in the a-basis: diag(V(a_value(x1)), V(a_value(x2))).
    """
    b = b_op.matrix
    coeffs = list(potential_coeffs) or [0.0]
    v = npoly.polyval(np.array(space.a_values), coeffs)
    return Hamiltonian(0.5 * (b @ b) + np.diag(v))


def evolve_linear(H: Hamiltonian, psi0: QLState, t: float) -> QLState:
    return QLState(H.propagator(t) @ psi0.amplitudes)


def sample_linear(H: Hamiltonian, psi0: QLState, t_final: float, steps: int) -> Trajectory:
    """States at ``steps + 1`` evenly spaced times in [0, t_final]."""
    times = np.linspace(0.0, t_final, steps + 1)
    mu, V = H.eigh()
    c0 = V.conj().T @ psi0.amplitudes
    states = tuple(QLState(V @ (np.exp(-1j * mu * t) * c0)) for t in times)
    return Trajectory(times, states)


@dataclass(frozen=True)
class StationaryStates:
    energies: tuple[float, float]
    states: tuple[QLState, QLState]
    degenerate: bool

    def __iter__(self):
        return iter(zip(self.energies, self.states))


def stationary_states(H: Hamiltonian, degeneracy_tol: float = 1e-12) -> StationaryStates:
    """Eigenpairs in ascending energy order.

    When the two energies coincide the returned basis is just some orthonormal pair.
    """
    mu, V = H.eigh()
    return StationaryStates(
        (float(mu[0]), float(mu[1])),
        (QLState(V[:, 0]), QLState(V[:, 1])),
        bool(abs(mu[1] - mu[0]) < degeneracy_tol),
    )


def superpose(psi1: QLState, psi2: QLState, k1: complex, k2: complex, tol: float = 1e-10) -> QLState:
    a, b = psi1.amplitudes, psi2.amplitudes
    if abs(np.vdot(a, b)) > tol or abs(psi1.norm - 1) > tol or abs(psi2.norm - 1) > tol:
        raise NotOrthonormal("superposed states must be orthonormal")
    if abs(abs(k1) ** 2 + abs(k2) ** 2 - 1.0) > 1e-12:
        raise BadCoefficients(f"|k1|^2 + |k2|^2 must be 1, got {abs(k1) ** 2 + abs(k2) ** 2!r}")
    return QLState(k1 * a + k2 * b)


def linear_step(H: Hamiltonian) -> StepMap:
    """Step map of the linear evolution, reusable by evolve_nonlinear."""
    mu, V = H.eigh()
    Vh = V.conj().T

    def step(psi, dt):
        return V @ (np.exp(-1j * mu * dt) * (Vh @ psi))

    return step


def phase_rotation_step(g: float) -> StepMap:
    """Reference nonlinear map psi(x) -> exp(-i g |psi(x)|^2 dt) psi(x)."""

    def step(psi, dt):
        return np.exp(-1j * g * np.abs(psi) ** 2 * dt) * psi

    return step


def evolve_nonlinear(
    step_map: StepMap, psi0: QLState, dt: float, n_steps: int, tol: float = 1e-8
) -> Trajectory:
    """Iterate a norm-preserving map, enforcing the unitarity contract at every step."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    psi = np.array(psi0.amplitudes)
    states = [QLState(psi)]
    for k in range(1, n_steps + 1):
        psi = np.asarray(step_map(psi, dt), dtype=complex)
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > tol:
            raise NormViolation(k, norm)
        states.append(QLState(psi))
    return Trajectory(dt * np.arange(n_steps + 1), tuple(states))
