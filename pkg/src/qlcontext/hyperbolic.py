"""Split-complex numbers and amplitudes for contexts with |lambda| > 1.

A split-complex number u + j v has j*j = +1.  Its squared modulus u^2 - v^2
plays the role |z|^2 plays for complex numbers, so that

    |sqrt(A) + s e^{j theta} sqrt(B)|^2 = A + B + 2 s sqrt(AB) cosh(theta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    Classification,
    ContextualData,
    InterferenceProfile,
    interference_profile,
)
from .errors import NotHyperbolic


@dataclass(frozen=True)
class HyperbolicNumber:
    """u + j v, carried internally in light-cone coordinates (u + v, u - v).

    Products are componentwise there and the squared modulus is a single
    product, so u^2 - v^2 keeps full relative precision even when u and v
    are large and nearly equal (e.g. e^{j theta} for large theta).
    """

    u: float
    v: float = 0.0
    lightcone: tuple[float, float] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if self.lightcone is None:
            object.__setattr__(self, "lightcone", (self.u + self.v, self.u - self.v))

    @classmethod
    def from_lightcone(cls, plus: float, minus: float) -> "HyperbolicNumber":
        return cls((plus + minus) / 2, (plus - minus) / 2, (float(plus), float(minus)))

    def __add__(self, other):
        (p1, m1), (p2, m2) = self.lightcone, _coerce(other).lightcone
        return HyperbolicNumber.from_lightcone(p1 + p2, m1 + m2)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        p, m = self.lightcone
        return HyperbolicNumber.from_lightcone(-p, -m)

    def __mul__(self, other):
        return hyp_mul(self, _coerce(other))

    __rmul__ = __mul__

    def conjugate(self) -> "HyperbolicNumber":
        p, m = self.lightcone
        return HyperbolicNumber.from_lightcone(m, p)

    @property
    def modulus2(self) -> float:
        """u^2 - v^2; negative outside the light cone."""
        p, m = self.lightcone
        return p * m


def _coerce(x) -> HyperbolicNumber:
    if isinstance(x, HyperbolicNumber):
        return x
    return HyperbolicNumber(float(x), 0.0)


def hyp_mul(a: HyperbolicNumber, b: HyperbolicNumber) -> HyperbolicNumber:
    """(a.u b.u + a.v b.v) + j (a.u b.v + a.v b.u), evaluated on the light cone."""
    (p1, m1), (p2, m2) = a.lightcone, b.lightcone
    return HyperbolicNumber.from_lightcone(p1 * p2, m1 * m2)


def hyp_exp(theta: float) -> HyperbolicNumber:
    """e^{j theta} = cosh(theta) + j sinh(theta)."""
    return HyperbolicNumber.from_lightcone(math.exp(theta), math.exp(-theta))


@dataclass(frozen=True)
class HyperbolicAmplitude:
    amplitudes: tuple[HyperbolicNumber, HyperbolicNumber]
    phases: tuple[float, float]
    signs: tuple[int, int]


def build_hyperbolic_amplitude(
    data: ContextualData, profile: InterferenceProfile | None = None
) -> HyperbolicAmplitude:
    if profile is None:
        profile = interference_profile(data)
    if profile.classification is not Classification.HYPERBOLIC:
        raise NotHyperbolic(
            f"context is {profile.classification.value}; "
            "a split-complex amplitude needs |lambda| > 1 for both outcomes"
        )
    comps = []
    for x in (0, 1):
        sqrt_a = math.sqrt(data.pb[0] * data.P[x, 0])
        sqrt_b = math.sqrt(data.pb[1] * data.P[x, 1])
        comps.append(sqrt_a + profile.signs[x] * hyp_exp(profile.phases[x]) * sqrt_b)
    return HyperbolicAmplitude(tuple(comps), tuple(profile.phases), tuple(profile.signs))


def hyp_born(amp: HyperbolicAmplitude, x: int) -> float:
    return amp.amplitudes[x].modulus2
