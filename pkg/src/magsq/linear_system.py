"""Cavity-phonon-magnon network with a linear (beam-splitter) magnon-phonon
coupling, driven by a two-tone laser on the cavity sidebands.

After linearization and the rotating-wave approximation the fluctuations obey
a constant drift/diffusion model in the quadratures
(X_a, Y_a, q, p, X_m, Y_m); the steady state follows from the Lyapunov
equation. This module builds that model, extracts the steady squeezing of the
mechanical displacement and magnon phase quadrature, and searches the
drive-ratio axis for the squeezing optimum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import quantities
from .errors import DomainError, SearchError, StabilityError
from .gaussian import (
    GaussianState,
    MomentModel,
    SqueezingTrace,
    bogoliubov_occupancy,
    bogoliubov_params,
    hurwitz_margin,
    solve_lyapunov,
    squeezing_db,
)
from .quantities import TWO_PI, DriveTone

# quadrature indices in the 6 x 6 model
IDX_MECH_Q = 2
IDX_MAGNON_Y = 5

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LinearOmmParams:
    """Physical parameters of the linear-coupling system.

    Defaults reproduce the GHz-mechanics configuration (thin-film sample,
    mechanical and magnon modes resonant at 2pi x 10 GHz) used for all
    stationary-squeezing results. All rates are angular [rad/s]; drive
    strength enters as the red-tone effective coupling ``g_minus`` and the
    blue/red ratio ``ratio`` = G+/G-.
    """

    wavelength: float = 1064e-9
    omega_mech: float = TWO_PI * 10e9
    omega_magnon: float = TWO_PI * 10e9
    kappa_cav: float = TWO_PI * 100e6
    kappa_magnon: float = TWO_PI * 1e6
    gamma_mech: float = TWO_PI * 10e3
    g0: float = TWO_PI * 100e3
    g_magnomech: float = TWO_PI * 10e6
    g_minus: float = TWO_PI * 15e6
    ratio: float = 0.76
    temperature: float = 0.01

    def __post_init__(self):
        positive = {
            "wavelength": self.wavelength, "omega_mech": self.omega_mech,
            "omega_magnon": self.omega_magnon, "kappa_cav": self.kappa_cav,
            "kappa_magnon": self.kappa_magnon, "gamma_mech": self.gamma_mech,
            "g0": self.g0,
        }
        for name, value in positive.items():
            if value <= 0:
                raise DomainError(f"{name} must be > 0, got {value}")
        if self.g_magnomech < 0 or self.g_minus < 0:
            raise DomainError("couplings must be >= 0")
        if self.temperature < 0:
            raise DomainError("temperature must be >= 0")
        if not 0.0 <= self.ratio < 1.0:
            raise StabilityError(
                f"ratio G+/G- = {self.ratio} outside the stable range [0, 1)",
                margin=self.ratio - 1.0,
            )
        # the interaction picture removing both omega_b and omega_m only
        # closes when the two modes are resonant
        if not math.isclose(self.omega_mech, self.omega_magnon, rel_tol=1e-9):
            raise DomainError(
                "magnon and mechanical modes must be resonant "
                f"(got {self.omega_magnon} vs {self.omega_mech} rad/s)"
            )

    @property
    def omega_cav(self) -> float:
        return quantities.vacuum_wavelength_to_angular_frequency(self.wavelength)

    @property
    def g_plus(self) -> float:
        return self.ratio * self.g_minus

    @classmethod
    def from_drive_powers(
        cls,
        power_minus: float,
        power_plus: float,
        phase_minus: float = 0.0,
        phase_plus: float = 0.0,
        **overrides,
    ) -> "LinearOmmParams":
        """Build parameters from the two sideband drive powers [W]."""
        base = cls(**overrides)
        omega_cav = base.omega_cav
        tones = (
            DriveTone(power_minus, omega_cav - base.omega_mech, phase_minus),
            DriveTone(power_plus, omega_cav + base.omega_mech, phase_plus),
        )
        g_minus = abs(quantities.coupling_from_power(
            tones[0], base.g0, base.kappa_cav, base.omega_mech, "stokes"))
        g_plus = abs(quantities.coupling_from_power(
            tones[1], base.g0, base.kappa_cav, base.omega_mech, "anti_stokes"))
        if g_minus == 0 and g_plus > 0:
            raise StabilityError("blue-tone drive without red tone is unstable", margin=g_plus)
        ratio = 0.0 if g_minus == 0 else g_plus / g_minus
        return replace(base, g_minus=g_minus, ratio=ratio)


@dataclass(frozen=True)
class SteadyReport:
    """Steady state with its derived squeezing metrics.

    ``s_mech_db`` is the squeezing of the mechanical displacement variance,
    ``s_magnon_db`` of the magnon phase quadrature; ``n_bogoliubov`` is the
    occupation of the mechanical Bogoliubov mode and ``margin`` the Hurwitz
    margin of the drift (negative for any emitted report).
    """

    state: GaussianState
    s_mech_db: float
    s_magnon_db: float
    n_bogoliubov: float
    margin: float


def build_model(params: LinearOmmParams) -> MomentModel:
    """Assemble the 6 x 6 constant drift and diffusion matrices.

    The drift couples the cavity quadratures to the mechanical ones through
    G+ -/+ G- and the mechanical to the magnon ones through the beam-splitter
    rate; the diffusion is diagonal with kappa/2 per cavity quadrature
    (optical bath effectively at zero occupancy) and gamma (N + 1/2) for the
    thermal mechanical and magnon baths.

    A warning is emitted (and flagged in ``meta``) when any rate exceeds a
    tenth of the mechanical frequency, straining the rotating-wave
    approximation the model is built on.
    """
    g_minus, g_plus = params.g_minus, params.g_plus
    if g_plus >= g_minus and g_plus > 0:
        raise StabilityError("requires G+ < G-", margin=g_plus - g_minus)
    kc, km, gb = params.kappa_cav, params.kappa_magnon, params.gamma_mech
    gm = params.g_magnomech

    rates = {"kappa_cav": kc, "kappa_magnon": km, "gamma_mech": gb,
             "g_minus": g_minus, "g_plus": g_plus}
    violations = [name for name, rate in rates.items()
                  if rate > params.omega_mech / 10.0]
    if violations:
        warnings.warn(
            "rotating-wave approximation strained: "
            + ", ".join(violations) + " exceed omega_mech / 10",
            stacklevel=2,
        )

    diff = g_plus - g_minus
    total = g_plus + g_minus
    drift = np.array([
        [-kc / 2, 0.0,     0.0,     diff,    0.0,     0.0],
        [0.0,     -kc / 2, total,   0.0,     0.0,     0.0],
        [0.0,     diff,    -gb / 2, 0.0,     0.0,     gm],
        [total,   0.0,     0.0,     -gb / 2, -gm,     0.0],
        [0.0,     0.0,     0.0,     gm,      -km / 2, 0.0],
        [0.0,     0.0,     -gm,     0.0,     0.0,     -km / 2],
    ])
    n_mech = quantities.thermal_occupancy(params.omega_mech, params.temperature)
    n_magnon = quantities.thermal_occupancy(params.omega_magnon, params.temperature)
    diffusion = np.diag([
        kc / 2, kc / 2,
        gb * (n_mech + 0.5), gb * (n_mech + 0.5),
        km * (n_magnon + 0.5), km * (n_magnon + 0.5),
    ])
    return MomentModel(drift=drift, diffusion=diffusion,
                       meta={"rwa_violations": tuple(violations)})


def steady_state(params: LinearOmmParams) -> SteadyReport:
    """Steady-state report via the Lyapunov equation."""
    model = build_model(params)
    margin = hurwitz_margin(model.drift)
    cov = solve_lyapunov(model.drift, model.diffusion)
    state = GaussianState(np.zeros(6), cov)
    if params.ratio > 0:
        r = bogoliubov_params(params.g_plus, params.g_minus).r
    else:
        r = 0.0
    return SteadyReport(
        state=state,
        s_mech_db=squeezing_db(cov[IDX_MECH_Q, IDX_MECH_Q]),
        s_magnon_db=squeezing_db(cov[IDX_MAGNON_Y, IDX_MAGNON_Y]),
        n_bogoliubov=bogoliubov_occupancy(cov[2:4, 2:4], r),
        margin=margin,
    )


def squeezing_vs_ratio(params: LinearOmmParams, ratio_grid) -> SqueezingTrace:
    """Steady squeezing of both modes across a grid of drive ratios G+/G-.

    G- stays fixed at ``params.g_minus``. Unstable grid points (none occur
    for ratios in [0, 1)) are marked NaN rather than dropped.
    """
    ratio_grid = np.asarray(ratio_grid, dtype=float)
    if np.any((ratio_grid < 0) | (ratio_grid >= 1)):
        raise DomainError("ratio grid values must lie in [0, 1)")
    n = ratio_grid.size
    variances = np.full((n, 2), np.nan)
    n_bog = np.full(n, np.nan)
    margins = np.full(n, np.nan)
    stable = np.zeros(n, dtype=bool)
    for i, ratio in enumerate(ratio_grid):
        try:
            report = steady_state(replace(params, ratio=float(ratio)))
        except StabilityError:
            continue
        cov = report.state.cov
        variances[i] = (cov[IDX_MECH_Q, IDX_MECH_Q], cov[IDX_MAGNON_Y, IDX_MAGNON_Y])
        n_bog[i] = report.n_bogoliubov
        margins[i] = report.margin
        stable[i] = True
    return SqueezingTrace.from_variances(
        axis=ratio_grid,
        labels=("mech_q", "magnon_Y"),
        variances=variances,
        axis_label="coupling ratio G+/G-",
        extras={"n_bogoliubov": n_bog, "margin": margins, "stable": stable},
        meta={"g_minus": params.g_minus, "temperature": params.temperature},
    )


def _magnon_squeezing_at(params: LinearOmmParams, ratio: float) -> float:
    report = steady_state(replace(params, ratio=float(ratio)))
    return report.s_magnon_db


def optimal_ratio(params: LinearOmmParams, tolerance: float = 1e-4) -> dict:
    """Drive ratio maximizing the stationary magnon squeezing.

    A coarse scan (step 0.01) brackets the maximum; golden-section search
    then refines the bracket down to ``tolerance`` on the ratio axis.

    Returns
    -------
    dict
        ``{"ratio": argmax, "s_magnon_db": maximum}``.
    """
    if tolerance <= 0:
        raise DomainError("tolerance must be > 0")
    grid = np.arange(0.0, 0.999, 0.01)
    values = np.full(grid.size, -np.inf)
    for i, ratio in enumerate(grid):
        try:
            values[i] = _magnon_squeezing_at(params, ratio)
        except StabilityError:
            continue
    if not np.any(np.isfinite(values)):
        raise SearchError("no stable point found on the ratio grid")
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = min(grid[min(k + 1, grid.size - 1)], 0.999)

    # golden-section refinement of the bracket
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _magnon_squeezing_at(params, c)
    fd = _magnon_squeezing_at(params, d)
    while b - a > tolerance:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _magnon_squeezing_at(params, c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _magnon_squeezing_at(params, d)
    best_ratio = c if fc > fd else d
    best_value = max(fc, fd)
    if best_value < values[k]:  # never fall below the scanned maximum
        best_ratio, best_value = float(grid[k]), float(values[k])
    return {"ratio": float(best_ratio), "s_magnon_db": float(best_value)}
