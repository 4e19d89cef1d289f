"""Lossy scattershot boson sampling: exact distributions, source models,
likelihood-ratio validation and classical-vs-quantum sampling-time sweeps."""

__version__ = "0.1.0"

from .distribution import (
    DISTINGUISHABLE,
    INDISTINGUISHABLE,
    LossConfig,
    OutputDistribution,
    bs_probability,
    detected_distribution,
    distinguishable_probability,
    full_distribution,
    lossy_distribution,
    lossy_distribution_combined,
    sample_events,
    total_variation_distance,
)
from .linalg import build_submatrix, haar_random_unitary, matrix_from_json, matrix_to_json
from .permanent import (
    TimingModel,
    fit_timing_model,
    permanent_glynn,
    permanent_glynn_parallel,
    permanent_naive,
    permanents_batch,
)
from .sources import (
    MwParams,
    QdParams,
    SpdcParams,
    monte_carlo_mw,
    monte_carlo_spdc,
    p_fake_in,
    p_gen2,
    p_mw_in,
    p_mw_lossy,
    p_mw_lossy_dark,
    p_qd,
    p_sbs,
    p_sbs_fake,
    p_sbs_lossy,
    spdc_number_prob,
)
from .states import COLLISION_FREE, FULL_FOCK, enumerate_states
from .supremacy import (
    SupremacyPoint,
    crossing_modes,
    supremacy_sweep,
    t_classical,
    t_classical_lossy,
    t_quantum_mw,
    t_quantum_qd,
    t_quantum_spdc,
)
from .validation import (
    ValidationResult,
    fit_sample_scaling,
    likelihood_trajectory,
    min_samples_to_validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
