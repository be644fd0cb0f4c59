"""Hidden-variable Monte Carlo model of contexts, filtrations and frequency data.

Every simulated system carries definite values of a and b.  A context is an
ensemble described by the joint table ``joint[x, y]``.  Measuring a or b under
the context reads the stored value.  A b = y filtration selects systems with
b = y; in ``Disturbing`` mode the selection then redraws a from the kernel
column ``disturbance[:, y]``, erasing any memory of the preceding context.
That erasure is what lets the interference coefficient differ from zero.

All sampling goes through ``numpy.random.Generator``.  Functions accept either
an integer seed or a Generator (``np.random.default_rng`` passes one through).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .core import (
    CLASSIFICATION_TOL,
    ContextualData,
    InterferenceProfile,
    OutcomeSpace,
    Provenance,
    interference_profile,
)
from .errors import EmptyFiltration, ZeroTotal

Seed = Union[int, np.random.Generator, np.random.SeedSequence, None]


class Mode(str, enum.Enum):
    DISTURBING = "disturbing"
    NON_DISTURBING = "non-disturbing"


def _table(values, name) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble S_C of a context plus the filtration disturbance kernel.

    ``joint[x, y]`` is the fraction of systems with a = x and b = y.
    ``disturbance[x, y]`` is the distribution of a after a b = y filtration;
    it is ignored (and may be omitted) in non-disturbing mode.
    """

    context_id: str
    joint: np.ndarray
    disturbance: np.ndarray | None = None
    mode: Mode = Mode.DISTURBING

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        joint = _table(self.joint, "joint")
        if np.any(joint < 0) or abs(joint.sum() - 1.0) > 1e-12:
            raise ValueError(f"joint must be a probability table, got {joint.tolist()}")
        object.__setattr__(self, "joint", joint)
        if self.disturbance is None:
            if self.mode is Mode.DISTURBING:
                raise ValueError("a disturbing ensemble needs a disturbance kernel")
        else:
            q = _table(self.disturbance, "disturbance")
            if np.any(q < 0) or np.any(np.abs(q.sum(axis=0) - 1.0) > 1e-12):
                raise ValueError(f"disturbance columns must be distributions, got {q.tolist()}")
            object.__setattr__(self, "disturbance", q)

    @property
    def pa(self) -> np.ndarray:
        return self.joint.sum(axis=1)

    @property
    def pb(self) -> np.ndarray:
        return self.joint.sum(axis=0)

    def transition(self) -> np.ndarray:
        """Exact p(a=x | C_y) implied by the mode."""
        if self.mode is Mode.DISTURBING:
            return np.array(self.disturbance)
        pb = self.pb
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.joint / pb

    def analytic_data(self, space: OutcomeSpace | None = None) -> ContextualData:
        return ContextualData.from_arrays(self.pa, self.pb, self.transition(), self.context_id, space)

    def to_dict(self) -> dict:
        d = {
            "context_id": self.context_id,
            "mode": self.mode.value,
            "joint": self.joint.tolist(),
        }
        if self.disturbance is not None:
            d["disturbance"] = self.disturbance.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        return cls(d.get("context_id", "C"), d["joint"], d.get("disturbance"), d.get("mode", "disturbing"))


@dataclass(frozen=True)
class CountTable:
    """Raw frequencies from one context and its two filtrations.

    ``n_a_given_y[x, y]`` counts a = x among systems filtered on b = y.
    """

    n_a: tuple[int, int]
    n_b: tuple[int, int]
    n_a_given_y: tuple[tuple[int, int], tuple[int, int]]
    seed: int | None = None
    context_id: str = "C"
    space: OutcomeSpace = field(default_factory=OutcomeSpace)

    def __post_init__(self):
        object.__setattr__(self, "n_a", tuple(int(c) for c in self.n_a))
        object.__setattr__(self, "n_b", tuple(int(c) for c in self.n_b))
        object.__setattr__(self, "n_a_given_y", tuple(tuple(int(c) for c in row) for row in self.n_a_given_y))
        counts = [*self.n_a, *self.n_b, *itertools.chain(*self.n_a_given_y)]
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")

    @property
    def totals(self) -> dict[str, int]:
        q = self.n_a_given_y
        return {
            "context_a": sum(self.n_a),
            "context_b": sum(self.n_b),
            "filtration_y1": q[0][0] + q[1][0],
            "filtration_y2": q[0][1] + q[1][1],
        }


def _rng(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _draw_systems(joint: np.ndarray, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    cell = rng.choice(4, size=n, p=joint.ravel())
    return cell // 2, cell % 2


def sample_context(spec: EnsembleSpec, n: int, seed: Seed = None) -> tuple[np.ndarray, np.ndarray]:
    """Counts (n_a, n_b) of a- and b-measurements under the context itself.

    The a- and b-measurements use separate draws of ``n`` systems each: in a
    disturbing ensemble a b-measurement would itself act as a filtration.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = _rng(seed)
    a, _ = _draw_systems(spec.joint, n, rng)
    _, b = _draw_systems(spec.joint, n, rng)
    return np.bincount(a, minlength=2), np.bincount(b, minlength=2)


def filtered_systems(spec: EnsembleSpec, y: int, n: int, seed: Seed = None) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) values of ``n`` systems after a b = y filtration."""
    pb = spec.pb[y]
    if pb <= 0:
        raise EmptyFiltration(f"p(b = {y}) = 0 in ensemble {spec.context_id!r}")
    rng = _rng(seed)
    column = spec.joint[:, y] / pb
    if spec.mode is Mode.DISTURBING:
        column = spec.disturbance[:, y]
    a = (rng.random(n) >= column[0]).astype(np.int64)
    b = np.full(n, y, dtype=np.int64)
    return a, b


def sample_filtration(spec: EnsembleSpec, y: int, n: int, seed: Seed = None) -> np.ndarray:
    """Counts of a-outcomes under the filtration context C_y."""
    a, _ = filtered_systems(spec, y, n, seed)
    return np.bincount(a, minlength=2)


def repeat_b_frequency(spec: EnsembleSpec, y: int, n: int, seed: Seed = None) -> float:
    """Fraction of filtered systems that answer b = y again when re-asked."""
    _, b = filtered_systems(spec, y, n, seed)
    return float(np.mean(b == y))


def sample_counts(spec: EnsembleSpec, n: int, seed: Seed = None, space: OutcomeSpace | None = None) -> CountTable:
    rng = _rng(seed)
    n_a, n_b = sample_context(spec, n, rng)
    f1 = sample_filtration(spec, 0, n, rng)
    f2 = sample_filtration(spec, 1, n, rng)
    return CountTable(
        tuple(n_a), tuple(n_b), ((f1[0], f2[0]), (f1[1], f2[1])),
        seed=seed if isinstance(seed, int) else None,
        context_id=spec.context_id,
        space=space if space is not None else OutcomeSpace(),
    )


@dataclass(frozen=True)
class StandardErrors:
    pa: np.ndarray
    pb: np.ndarray
    P: np.ndarray


def estimate_data(table: CountTable, space: OutcomeSpace | None = None) -> tuple[ContextualData, StandardErrors]:
    """Frequencies and binomial standard errors sqrt(p(1-p)/n)."""
    totals = table.totals
    for name, total in totals.items():
        if total <= 0:
            raise ZeroTotal(f"no observations recorded for {name}")
    n_a = np.array(table.n_a, dtype=float)
    n_b = np.array(table.n_b, dtype=float)
    q = np.array(table.n_a_given_y, dtype=float)
    pa = n_a / totals["context_a"]
    pb = n_b / totals["context_b"]
    col_totals = np.array([totals["filtration_y1"], totals["filtration_y2"]], dtype=float)
    P = q / col_totals
    se = StandardErrors(
        np.sqrt(pa * (1 - pa) / totals["context_a"]),
        np.sqrt(pb * (1 - pb) / totals["context_b"]),
        np.sqrt(P * (1 - P) / col_totals),
    )
    space = space if space is not None else table.space
    data = ContextualData.from_arrays(pa, pb, P, table.context_id, space, Provenance.EMPIRICAL)
    return data, se


def lambda_gradient(data: ContextualData, x: int) -> np.ndarray:
    """d lambda(x) / d (pa(x), pb(y1), P(x|y1), P(x|y2)), with pb(y2) = 1 - pb(y1)."""
    pb1, pb2 = data.pb
    P1, P2 = data.P[x]
    A, B = pb1 * P1, pb2 * P2
    D = 2.0 * math.sqrt(A * B)
    lam = (data.pa[x] - A - B) / D
    dA = -1.0 / D - lam / (2.0 * A)
    dB = -1.0 / D - lam / (2.0 * B)
    return np.array([1.0 / D, dA * P1 - dB * P2, dA * pb1, dB * pb2])


def lambda_standard_errors(data: ContextualData, table: CountTable) -> np.ndarray:
    """First-order (delta method) standard error of each lambda(x).

    The four estimated inputs come from independent samples, so their
    variances add with no covariance terms.
    """
    t = table.totals
    out = np.empty(2)
    for x in (0, 1):
        pa, pb1 = data.pa[x], data.pb[0]
        P1, P2 = data.P[x]
        var = np.array([
            pa * (1 - pa) / t["context_a"],
            pb1 * (1 - pb1) / t["context_b"],
            P1 * (1 - P1) / t["filtration_y1"],
            P2 * (1 - P2) / t["filtration_y2"],
        ])
        g = lambda_gradient(data, x)
        out[x] = math.sqrt(float(np.sum(g * g * var)))
    return out


@dataclass(frozen=True)
class ExperimentResult:
    table: CountTable
    data: ContextualData
    errors: StandardErrors
    profile: InterferenceProfile


def _experiment(spec, n, rng, seed, space, tolerance) -> ExperimentResult:
    table = sample_counts(spec, n, rng, space)
    table = CountTable(table.n_a, table.n_b, table.n_a_given_y, seed, table.context_id, table.space)
    data, se = estimate_data(table)
    profile = interference_profile(data, tolerance)
    return ExperimentResult(table, data, se, profile.with_errors(lambda_standard_errors(data, table)))


def run_interference_experiment(
    spec: EnsembleSpec,
    n: int,
    seed: int,
    space: OutcomeSpace | None = None,
    tolerance: float = CLASSIFICATION_TOL,
) -> ExperimentResult:
    """Sample the context and both filtrations, then estimate lambda with error bars."""
    return _experiment(spec, n, np.random.default_rng(seed), seed, space, tolerance)


@dataclass(frozen=True)
class VonNeumannResult:
    discrepancy: float
    threshold: float
    passed: bool
    estimates: tuple[float, ...]
    standard_errors: tuple[float, ...]


def von_neumann_test(
    specs: Sequence[EnsembleSpec],
    y: int,
    n: int,
    seed: int,
    shared_seed: bool = False,
    n_sigma: float = 3.0,
) -> VonNeumannResult:
    """Compare the post-filtration transition q(x1|y) across preceding contexts.

    Passes when every pairwise difference is below ``n_sigma`` standard errors
    of that difference.  ``discrepancy`` is the largest absolute difference and
    ``threshold`` the n_sigma bound of that same pair.  With ``shared_seed``
    each context is sampled from an identically seeded generator; otherwise
    each gets an independent child stream of ``seed``.
    """
    if len(specs) < 2:
        raise ValueError("need at least two contexts to compare")
    if shared_seed:
        rngs = [np.random.default_rng(seed) for _ in specs]
    else:
        rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(specs))]
    est, se = [], []
    for spec, rng in zip(specs, rngs):
        counts = sample_filtration(spec, y, n, rng)
        q = counts[0] / n
        est.append(float(q))
        se.append(math.sqrt(q * (1 - q) / n))
    passed = True
    worst, worst_threshold = -1.0, 0.0
    for i, j in itertools.combinations(range(len(specs)), 2):
        d = abs(est[i] - est[j])
        bound = n_sigma * math.hypot(se[i], se[j])
        if not d < bound and not (d == 0.0 and bound == 0.0):
            passed = False
        if d > worst:
            worst, worst_threshold = d, bound
    return VonNeumannResult(worst, worst_threshold, passed, tuple(est), tuple(se))


@dataclass(frozen=True)
class TimeStep:
    t: int
    result: ExperimentResult


def interpolate_specs(start: EnsembleSpec, stop: EnsembleSpec, n_steps: int) -> list[EnsembleSpec]:
    """Linear schedule of ensembles from ``start`` to ``stop`` (both included)."""
    if start.mode is not stop.mode:
        raise ValueError("cannot interpolate between different modes")
    out = []
    for s in np.linspace(0.0, 1.0, n_steps):
        joint = (1 - s) * start.joint + s * stop.joint
        joint = joint / joint.sum()
        dist = None
        if start.disturbance is not None and stop.disturbance is not None:
            dist = (1 - s) * start.disturbance + s * stop.disturbance
            dist = dist / dist.sum(axis=0)
        out.append(EnsembleSpec(start.context_id, joint, dist, start.mode))
    return out


def two_scale_collect(
    spec: EnsembleSpec | Sequence[EnsembleSpec],
    n_ql_steps: int,
    samples_per_step: int,
    seed: int,
    space: OutcomeSpace | None = None,
    tolerance: float = CLASSIFICATION_TOL,
) -> list[TimeStep]:
    """One estimated profile per coarse time step.

    Each coarse step gathers ``samples_per_step`` fine-time observations per
    context.  ``spec`` may be a single static ensemble or a schedule with one
    ensemble per step.  A single generator runs through all steps, so one step
    reproduces ``run_interference_experiment`` with the same seed.
    """
    if samples_per_step <= 0:
        raise ValueError("samples_per_step must be positive")
    schedule = [spec] * n_ql_steps if isinstance(spec, EnsembleSpec) else list(spec)
    if len(schedule) != n_ql_steps:
        raise ValueError(f"schedule has {len(schedule)} ensembles for {n_ql_steps} steps")
    rng = np.random.default_rng(seed)
    return [
        TimeStep(t, _experiment(s, samples_per_step, rng, seed, space, tolerance))
        for t, s in enumerate(schedule)
    ]


@dataclass(frozen=True)
class Scenario:
    spec: EnsembleSpec
    space: OutcomeSpace
    description: str


def _independent(pa, pb) -> np.ndarray:
    return np.outer(pa, pb)


PRESETS: dict[str, Scenario] = {
    "canonical": Scenario(
        EnsembleSpec("canonical", _independent([0.75, 0.25], [0.5, 0.5]), [[0.5, 0.5], [0.5, 0.5]]),
        OutcomeSpace(),
        "trigonometric context with lambda = (0.5, -0.5)",
    ),
    "hyperbolic": Scenario(
        EnsembleSpec("hyperbolic", _independent([0.95, 0.05], [0.5, 0.5]), [[0.9, 0.1], [0.1, 0.9]]),
        OutcomeSpace(),
        "hyperbolic context with lambda = (1.5, -1.5)",
    ),
    "classical": Scenario(
        EnsembleSpec("classical", [[0.3, 0.1], [0.2, 0.4]], None, Mode.NON_DISTURBING),
        OutcomeSpace(),
        "non-disturbing ensemble obeying classical total probability",
    ),
    "opinion-poll": Scenario(
        EnsembleSpec("opinion-poll", [[0.42, 0.28], [0.12, 0.18]], [[0.7, 0.8], [0.3, 0.2]]),
        OutcomeSpace(
            a_labels=("against-pollution:yes", "against-pollution:no"),
            b_labels=("lower-gasoline-prices:yes", "lower-gasoline-prices:no"),
        ),
        "two survey questions whose filtration disturbs the other answer",
    ),
    "grandmother-neurons": Scenario(
        EnsembleSpec("grandmother-neurons", [[0.3, 0.2], [0.1, 0.4]], [[0.6, 0.3], [0.4, 0.7]]),
        OutcomeSpace(
            a_labels=("n1:firing", "n1:nonfiring"),
            b_labels=("n2:firing", "n2:nonfiring"),
            a_values=(1.0, 0.0),
            b_values=(1.0, 0.0),
        ),
        "firing frequencies of two grandmother neurons in coupled networks",
    ),
}


def preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
