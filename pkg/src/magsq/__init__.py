"""Gaussian-dynamics simulator for magnon squeezing in optomagnomechanics.

Two protocols are covered: stationary squeezing through a linear (beam
splitter) magnon-phonon coupling under two-tone cavity driving, and transient
squeezing through a dispersive coupling using a two-step drive sequence. The
package exposes the model builders, a generic Gaussian-moment engine, named
figure reproductions and a command-line interface (``magsq``).
"""

from .dispersive_system import (
    CALIBRATED_RABI,
    DispersiveOmmParams,
    MeanFieldTrajectory,
    ProtocolResult,
    ProtocolSchedule,
    Step1Averages,
    Step1Report,
    calibrate_rabi,
    interlude_evolve,
    run_protocol,
    step1_averages,
    step1_steady,
    step2_evolve_full,
    step2_evolve_rwa,
    step2_mean_field,
)
from .errors import (
    ConfigurationError,
    DegeneracyError,
    DimensionError,
    DomainError,
    IntegrationError,
    MagsqError,
    SearchError,
    StabilityError,
    StateError,
)
from .gaussian import (
    BogoliubovParams,
    GaussianState,
    MomentModel,
    SqueezingTrace,
    StateReport,
    VACUUM_VARIANCE,
    bogoliubov_occupancy,
    bogoliubov_params,
    hurwitz_margin,
    integrate_moments,
    quadrature_variance,
    solve_lyapunov,
    squeezing_db,
    symplectic_eigenvalues,
    symplectic_form,
    validate_state,
    wigner_gaussian,
)
from .linear_system import (
    LinearOmmParams,
    SteadyReport,
    build_model,
    optimal_ratio,
    squeezing_vs_ratio,
    steady_state,
)
from .quantities import (
    C_LIGHT,
    HBAR,
    K_B,
    DriveTone,
    MagnonDriveSpec,
    coupling_from_power,
    drive_amplitude,
    power_from_coupling,
    rabi_frequency,
    thermal_occupancy,
)
from .scenarios import ScenarioResult, ScenarioSpec, export, run_scenario, sweep

__version__ = "0.1.0"

__all__ = [
    "BogoliubovParams", "CALIBRATED_RABI", "C_LIGHT", "ConfigurationError",
    "DegeneracyError", "DimensionError", "DispersiveOmmParams", "DomainError",
    "DriveTone", "GaussianState", "HBAR", "IntegrationError", "K_B",
    "LinearOmmParams", "MagnonDriveSpec", "MagsqError", "MeanFieldTrajectory",
    "MomentModel", "ProtocolResult", "ProtocolSchedule", "ScenarioResult",
    "ScenarioSpec", "SearchError", "SqueezingTrace", "StabilityError",
    "StateError", "StateReport", "SteadyReport", "Step1Averages", "Step1Report",
    "VACUUM_VARIANCE", "bogoliubov_occupancy", "bogoliubov_params",
    "build_model", "calibrate_rabi", "coupling_from_power", "drive_amplitude",
    "export", "hurwitz_margin", "integrate_moments", "interlude_evolve",
    "optimal_ratio", "power_from_coupling", "quadrature_variance",
    "rabi_frequency", "run_protocol", "run_scenario", "solve_lyapunov",
    "squeezing_db", "squeezing_vs_ratio", "steady_state", "step1_averages",
    "step1_steady", "step2_evolve_full", "step2_evolve_rwa", "step2_mean_field",
    "sweep", "symplectic_eigenvalues", "symplectic_form", "thermal_occupancy",
    "validate_state", "wigner_gaussian",
]
