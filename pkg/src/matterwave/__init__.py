"""Transient dynamics of phase-modulated cut-off matter waves.

Exact time-dependent transmitted wavefunctions for the quantum-shutter
release of a modulated wave 2 sin(kx) cos(dk x) through finite-range
potentials, together with the quantum-beat and Rabi-oscillation
approximations, delay-time and phase-time extraction, and an independent
Crank-Nicolson grid oracle.
"""

from .analysis import (
    DelayReport,
    FrequencyEstimate,
    FrontNotFoundError,
    PeakEstimate,
    PhaseTimeResult,
    delay_time_analytic,
    delay_time_measured,
    estimate_frequency,
    find_main_front_peak,
    front_window,
    interference_onset_time,
    phase_time,
    spectral_amplitude_at,
)
from .asymptotics import (
    BeatCoefficients,
    psi_two_level,
    rabi_probability,
    rho_beats_x0,
    rho_two_level,
    rho_two_level_free,
)
from .constants import DEFAULT_CONSTANTS, PhysicsConstants
from .model import (
    DeltaWell,
    FrequencySet,
    ModulatedPacket,
    PoleError,
    QTransformML,
    ResonanceData,
    frequencies,
    plane_wave_q_poles,
    q_transform_modulated,
    q_transform_plane,
    transmission_delta,
)
from .oracle import (
    CrankNicolson,
    GridState,
    InfeasibleDomainError,
    OracleReport,
    delta_well_run,
    free_modulated_run,
    initialize_cutoff,
    step_crank_nicolson,
)
from .solver import (
    ComplexTrace,
    DensityTrace,
    delta_density_trace,
    delta_transmission,
    density,
    free_density_trace,
    psi_delta,
    psi_delta_components,
    psi_free,
    psi_general,
    unit_transmission,
)
from .specfun import (
    faddeeva,
    moshinsky,
    moshinsky_arg,
    moshinsky_asymptotic,
    moshinsky_reflected,
)

__version__ = "0.1.0"
