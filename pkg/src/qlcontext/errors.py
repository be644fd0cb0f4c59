"""Exception hierarchy shared by every module of the package."""


class QLError(Exception):
    """Base class for all errors raised by qlcontext."""


class DegenerateDenominator(QLError):
    """Some product p^b(y) p(x|y) vanishes, so the interference coefficient is undefined.

    This is the numerical face of a failed incompatibility check: at least one
    transition probability (or b-marginal) is zero.
    """

    def __init__(self, outcome: int, denominator: float):
        self.outcome = outcome
        self.denominator = denominator
        super().__init__(
            f"interference denominator for a-outcome {outcome} is {denominator:.3g}; "
            "the observables are not mutually incompatible for this outcome"
        )


class NotTrigonometric(QLError):
    """A complex amplitude was requested for a context with |lambda| > 1."""


class NotHyperbolic(QLError):
    """A split-complex amplitude was requested for a context that is not hyperbolic."""


class NotDoublyStochastic(QLError):
    """The b-observable only has a symmetric operator for doubly stochastic transitions."""


class BadWeights(QLError, ValueError):
    pass


class NotOrthonormal(QLError, ValueError):
    pass


class BadCoefficients(QLError, ValueError):
    pass


class NormViolation(QLError):
    """A supposedly norm-preserving evolution map changed the norm of the state."""

    def __init__(self, step: int, norm: float):
        self.step = step
        self.norm = norm
        super().__init__(f"state norm {norm!r} after step {step} breaks unitarity")


class NonHermitianInput(QLError, ValueError):
    pass


class EmptyFiltration(QLError):
    """Filtering on b = y is impossible because p(y) = 0 in the ensemble."""


class ZeroTotal(QLError, ValueError):
    pass


class ParseError(QLError):
    pass


class SchemaError(QLError):
    """Input parsed but does not match the expected layout.

    ``location`` names the offending row or JSON field.
    """

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")
