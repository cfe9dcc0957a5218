"""Physical constants and conversions between laboratory and model quantities.

All angular frequencies and rates are stored in rad/s internally. Laboratory
inputs quoted as nu = omega/2pi (the universal convention in the source
literature) are converted at the boundary (see `cli`). Constants are
CODATA-2018 and fixed at build time for reproducibility.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

from .errors import ConfigurationError, DomainError

TWO_PI = 2.0 * math.pi

# CODATA-2018 (SI). h and k_B are exact by definition since the 2019
# redefinition; hbar = h / 2pi.
HBAR = 1.054571817e-34  # reduced Planck constant [J s]
K_B = 1.380649e-23      # Boltzmann constant [J/K]
C_LIGHT = 299792458.0   # speed of light in vacuum [m/s]

Sideband = Literal["stokes", "anti_stokes"]


@dataclass(frozen=True)
class DriveTone:
    """A single laser drive tone.

    Parameters
    ----------
    power:
        Optical power [W], >= 0.
    frequency:
        Angular frequency of the tone [rad/s], > 0.
    phase:
        Drive phase [rad].
    """

    power: float
    frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if self.power < 0:
            raise DomainError(f"drive power must be >= 0, got {self.power}")
        if self.frequency <= 0:
            raise DomainError(f"drive frequency must be > 0, got {self.frequency}")


@dataclass(frozen=True)
class MagnonDriveSpec:
    """Magnon drive, given either directly as a Rabi frequency or assembled
    from the microwave field amplitude and the spin ensemble.

    Exactly one of the two specification routes must be supplied: either
    ``rabi`` alone, or all of ``field_amplitude`` (B_d [T]), ``spin_count``
    (total spins) and ``gyromagnetic_ratio`` [rad/(s T)] with optional
    ``phase`` [rad].
    """

    rabi: complex | None = None
    field_amplitude: float | None = None
    spin_count: float | None = None
    gyromagnetic_ratio: float | None = None
    phase: float = 0.0

    def __post_init__(self):
        field_route = [self.field_amplitude, self.spin_count, self.gyromagnetic_ratio]
        has_field = any(v is not None for v in field_route)
        if (self.rabi is None) == (not has_field):
            raise ConfigurationError(
                "supply either rabi directly or the (field, spins, gyromagnetic "
                "ratio) triplet, not both and not neither"
            )
        if has_field and any(v is None for v in field_route):
            raise ConfigurationError(
                "field route requires field_amplitude, spin_count and "
                "gyromagnetic_ratio together"
            )
        if self.spin_count is not None and self.spin_count <= 0:
            raise DomainError(f"spin count must be > 0, got {self.spin_count}")


def thermal_occupancy(frequency: float, temperature: float) -> float:
    """Mean thermal excitation number of a bosonic mode (Bose-Einstein).

    Parameters
    ----------
    frequency:
        Mode angular frequency [rad/s], > 0.
    temperature:
        Bath temperature [K], >= 0. T = 0 returns exactly 0 (no exp overflow).
    """
    if frequency <= 0:
        raise DomainError(f"frequency must be > 0, got {frequency}")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = HBAR * frequency / (K_B * temperature)
    if x > 700.0:  # 1/expm1 would overflow; occupancy ~ exp(-x) underflows cleanly
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def drive_amplitude(tone: DriveTone, cavity_linewidth: float) -> complex:
    """Cavity-drive coupling strength E = sqrt(kappa P / hbar omega) e^{i phi}.

    Parameters
    ----------
    tone:
        The drive tone (power, frequency, phase).
    cavity_linewidth:
        Cavity amplitude dissipation rate kappa [rad/s], > 0.

    Returns
    -------
    complex
        Drive amplitude [rad/s].
    """
    if cavity_linewidth <= 0:
        raise DomainError(f"cavity linewidth must be > 0, got {cavity_linewidth}")
    magnitude = math.sqrt(cavity_linewidth * tone.power / (HBAR * tone.frequency))
    return magnitude * cmath.exp(1j * tone.phase)


def sideband_amplitude(
    drive: complex, cavity_linewidth: float, mech_frequency: float, sideband: Sideband
) -> complex:
    """Steady intracavity amplitude a = -iE / (kappa/2 -/+ i omega_b) for a tone
    on the anti-Stokes (upper, -) or Stokes (lower, +) sideband."""
    if sideband == "anti_stokes":
        denom = cavity_linewidth / 2 - 1j * mech_frequency
    elif sideband == "stokes":
        denom = cavity_linewidth / 2 + 1j * mech_frequency
    else:
        raise DomainError(f"unknown sideband {sideband!r}")
    return -1j * drive / denom


def coupling_from_power(
    tone: DriveTone,
    g0: float,
    cavity_linewidth: float,
    mech_frequency: float,
    sideband: Sideband,
) -> complex:
    """Effective optomechanical coupling G = g0 * a for a sideband drive tone.

    Parameters
    ----------
    tone:
        Drive tone at omega_a - omega_b (``sideband="stokes"``) or
        omega_a + omega_b (``sideband="anti_stokes"``).
    g0:
        Bare optomechanical coupling [rad/s], > 0.
    cavity_linewidth, mech_frequency:
        kappa and omega_b [rad/s], > 0.

    Returns
    -------
    complex
        Effective coupling [rad/s] with magnitude
        g0 |E| / sqrt(kappa^2/4 + omega_b^2).
    """
    for name, value in (("g0", g0), ("cavity_linewidth", cavity_linewidth),
                        ("mech_frequency", mech_frequency)):
        if value <= 0:
            raise DomainError(f"{name} must be > 0, got {value}")
    drive = drive_amplitude(tone, cavity_linewidth)
    return g0 * sideband_amplitude(drive, cavity_linewidth, mech_frequency, sideband)


def power_from_coupling(
    coupling: float,
    g0: float,
    cavity_linewidth: float,
    mech_frequency: float,
    drive_frequency: float,
) -> float:
    """Drive power [W] producing a given effective coupling magnitude.

    Exact inverse of `coupling_from_power` (round-trip relative error
    below 1e-12 over many decades of power).
    """
    for name, value in (("g0", g0), ("cavity_linewidth", cavity_linewidth),
                        ("mech_frequency", mech_frequency),
                        ("drive_frequency", drive_frequency)):
        if value <= 0:
            raise DomainError(f"{name} must be > 0, got {value}")
    coupling = abs(coupling)
    amplitude = coupling * math.hypot(cavity_linewidth / 2, mech_frequency) / g0
    return amplitude**2 * HBAR * drive_frequency / cavity_linewidth


def rabi_frequency(spec: MagnonDriveSpec) -> complex:
    """Magnon-drive Rabi frequency Omega [rad/s].

    Returns the directly supplied value unchanged, or assembles
    (sqrt(5)/4) gamma sqrt(N) B_d e^{i phi0} from the field route.
    """
    if spec.rabi is not None:
        return complex(spec.rabi)
    magnitude = (
        math.sqrt(5.0) / 4.0
        * spec.gyromagnetic_ratio
        * math.sqrt(spec.spin_count)
        * spec.field_amplitude
    )
    return magnitude * cmath.exp(1j * spec.phase)


def vacuum_wavelength_to_angular_frequency(wavelength: float) -> float:
    """Convert a vacuum wavelength [m] to angular frequency [rad/s]."""
    if wavelength <= 0:
        raise DomainError(f"wavelength must be > 0, got {wavelength}")
    return TWO_PI * C_LIGHT / wavelength
