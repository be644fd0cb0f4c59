"""Interference analysis and quantum-like representation of contextual probability data."""
from .complex_repr import (
    DensityState,
    ObservableOperator,
    QLState,
    b_eigenbasis,
    born_probability,
    build_amplitude,
    commutator_norm,
    expectation,
    mix,
    operator_a,
    operator_b,
    representation_collision,
    to_bloch,
)
from .core import (
    Classification,
    ContextualData,
    InterferenceProfile,
    OutcomeSpace,
    TransitionMatrix,
    check_incompatibility,
    classical_ftp,
    interference_coefficient,
    interference_profile,
    is_doubly_stochastic,
    reconstruct_marginal,
    validate_data,
)
from .dynamics import (
    Hamiltonian,
    Trajectory,
    build_hamiltonian,
    evolve_linear,
    evolve_nonlinear,
    stationary_states,
    superpose,
)
from .ensemble import (
    CountTable,
    EnsembleSpec,
    Mode,
    estimate_data,
    run_interference_experiment,
    sample_context,
    sample_filtration,
    two_scale_collect,
    von_neumann_test,
)
from .hyperbolic import (
    HyperbolicAmplitude,
    HyperbolicNumber,
    build_hyperbolic_amplitude,
    hyp_born,
    hyp_exp,
    hyp_mul,
)

__version__ = "0.1.0"
