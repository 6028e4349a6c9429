"""Decay of a discrete level coupled to a finite band.

Exact survival amplitudes from the band cut integral and bound-state poles,
a continued-sheet representation for long times, and a discretized
Hamiltonian used as an independent reference.
"""
from .amplitude import (
    ContourParts,
    ShortTimeFit,
    SpectralDensity,
    SurvivalSeries,
    chain_closed_form,
    cut_integral,
    fgr_probability,
    fgr_rate,
    fgr_time,
    second_sheet_amplitude,
    second_sheet_parts,
    short_time_check,
    short_time_fit,
    spectral_density,
    survival_amplitude,
    survival_series,
    tail_exponent,
)
from .band_models import (
    BandModel,
    ModelKind,
    SystemParams,
    delta,
    delta_integral,
    second_sheet_sigma,
    sigma_prime,
    standard_sigma,
)
from .errors import (
    DecayCutError,
    DecoupledLevel,
    DegenerateInput,
    DegenerateNodes,
    NoConvergence,
    NonFinite,
    NoSignChange,
    OnCut,
    UnsupportedModel,
    ValidationFailure,
)
from .oracle import OracleSystem, discretize, eigensolve, eigensolve_dense, evolve, oracle_amplitude, oracle_series
from .poles import (
    BoundPole,
    ResonancePole,
    bound_state_overlap,
    count_strip_zeros,
    find_real_poles,
    find_resonance_pole,
    find_resonance_poles,
)

__version__ = "0.1.0"
