"""Builders and closed forms for the decay, ammonium and Kaon scenario families."""

from .ammonium import (
    OscillationParams,
    ammonium_initial_state,
    ammonium_probs_closed,
    ammonium_schedule,
    ammonium_step_matrix,
    oscillation_from_hamiltonian,
    sqm_reference_probs,
    uv_theta_from_ab,
)
from .decay import (
    DecayParams,
    alpha_from_gamma,
    decay_initial_state,
    decay_schedule,
    decay_step_matrix,
    decay_survival_closed,
    exponential_sweep,
    pqr,
    zeno_sweep,
)
from .kaon import (
    EigenmodeDecomposition,
    IntensityParams,
    KaonParams,
    intensity_reference,
    kaon_eigenmodes,
    kaon_initial_state,
    kaon_params_sample,
    kaon_schedule,
    kaon_step_matrix,
    kaon_survival_closed,
)

__all__ = [
    "OscillationParams",
    "ammonium_initial_state",
    "ammonium_probs_closed",
    "ammonium_schedule",
    "ammonium_step_matrix",
    "oscillation_from_hamiltonian",
    "sqm_reference_probs",
    "uv_theta_from_ab",
    "DecayParams",
    "alpha_from_gamma",
    "decay_initial_state",
    "decay_schedule",
    "decay_step_matrix",
    "decay_survival_closed",
    "exponential_sweep",
    "pqr",
    "zeno_sweep",
    "EigenmodeDecomposition",
    "IntensityParams",
    "KaonParams",
    "intensity_reference",
    "kaon_eigenmodes",
    "kaon_initial_state",
    "kaon_params_sample",
    "kaon_schedule",
    "kaon_step_matrix",
    "kaon_survival_closed",
]
