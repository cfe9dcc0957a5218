"""Model-agnostic engine for Gaussian moment dynamics.

The state of any linearized bosonic network driven by Gaussian noise is fully
described by the vector of first moments and the covariance matrix (CM) of the
quadrature fluctuations. This module provides the machinery shared by all
concrete models in the package:

- algebraic Lyapunov steady states (A V + V A^T = -D),
- time integration of first and second moments for constant or
  time-dependent drift,
- stability analysis,
- squeezing metrics (dB below vacuum), Bogoliubov-mode occupancy,
- Gaussian Wigner-function evaluation and physicality checks.

Quadratures are ordered as (X_1, Y_1, ..., X_n, Y_n) with X = (o + o*)/sqrt(2)
and Y = i(o* - o)/sqrt(2), so the vacuum variance is 1/2. All drift and
diffusion matrices in the package follow this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from .errors import (
    DegeneracyError,
    DimensionError,
    DomainError,
    IntegrationError,
    StabilityError,
    StateError,
)

VACUUM_VARIANCE = 0.5

FloatArray = NDArray[np.float64]


def symplectic_form(n_modes: int) -> FloatArray:
    """Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def _symmetrize(matrix: FloatArray) -> FloatArray:
    return 0.5 * (matrix + matrix.T)


def _frozen(array: FloatArray) -> FloatArray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state of n modes: mean quadrature vector and 2n x 2n CM.

    The covariance matrix must be symmetric (relative asymmetry below 1e-10)
    with non-negative diagonal. Physicality (Heisenberg) is not enforced on
    construction; use `validate_state` for that.
    """

    mean: FloatArray
    cov: FloatArray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionError(
                f"mean/cov shapes {mean.shape}/{cov.shape} are inconsistent"
            )
        if mean.size % 2 != 0 or mean.size == 0:
            raise DimensionError("quadrature vector length must be a positive even number")
        scale = max(1.0, float(np.linalg.norm(cov)))
        if np.linalg.norm(cov - cov.T) > 1e-10 * scale:
            raise StateError("covariance matrix is not symmetric")
        if np.any(np.diag(cov) < 0):
            raise StateError("covariance diagonal has negative entries")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(_symmetrize(cov)))

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def mode_cov(self, mode_index: int) -> FloatArray:
        """2 x 2 marginal CM of one mode."""
        if not 0 <= mode_index < self.n_modes:
            raise IndexError(f"mode index {mode_index} out of range")
        i = 2 * mode_index
        return np.array(self.cov[i:i + 2, i:i + 2])

    @classmethod
    def vacuum(cls, n_modes: int) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))

    @classmethod
    def thermal(cls, occupancies: Sequence[float]) -> "GaussianState":
        """Product thermal state with the given per-mode occupation numbers."""
        diag = np.repeat([n + VACUUM_VARIANCE for n in occupancies], 2)
        return cls(np.zeros(diag.size), np.diag(diag))


@dataclass(frozen=True)
class MomentModel:
    """Drift/diffusion description of a linear Gaussian system.

    Parameters
    ----------
    drift:
        Constant 2n x 2n matrix, or a callable t -> matrix for
        time-dependent dynamics.
    diffusion:
        Constant symmetric positive-semidefinite 2n x 2n matrix.
    mean_forcing:
        Optional inhomogeneous term for the first moments, t -> vector.
    meta:
        Free-form diagnostics (e.g. rotating-wave-validity flags).
    """

    drift: FloatArray | Callable[[float], FloatArray]
    diffusion: FloatArray
    mean_forcing: Callable[[float], FloatArray] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        diffusion = _symmetrize(np.asarray(self.diffusion, dtype=float))
        if diffusion.ndim != 2 or diffusion.shape[0] != diffusion.shape[1]:
            raise DimensionError("diffusion matrix must be square")
        min_eig = float(np.linalg.eigvalsh(diffusion).min())
        if min_eig < -1e-12 * max(1.0, float(np.linalg.norm(diffusion))):
            raise StateError("diffusion matrix is not positive semidefinite")
        object.__setattr__(self, "diffusion", _frozen(diffusion))
        if not callable(self.drift):
            drift = np.asarray(self.drift, dtype=float)
            if drift.shape != diffusion.shape:
                raise DimensionError("drift and diffusion shapes differ")
            object.__setattr__(self, "drift", _frozen(drift))

    @property
    def is_time_dependent(self) -> bool:
        return callable(self.drift)

    def drift_at(self, t: float) -> FloatArray:
        if callable(self.drift):
            return np.asarray(self.drift(t), dtype=float)
        return self.drift


@dataclass(frozen=True)
class BogoliubovParams:
    """Squeezing parameter r and effective coupling of the Bogoliubov mode."""

    r: float
    g_tilde: float


@dataclass(frozen=True)
class StateReport:
    """Physicality report for a Gaussian state (report-only, never raises)."""

    symmetric: bool
    physical: bool
    min_symplectic_eigenvalue: float


@dataclass(frozen=True)
class SqueezingTrace:
    """Series of quadrature variances and squeezing levels along an axis.

    ``variances`` and ``squeezing_db`` have shape (len(axis), len(labels));
    NaN entries mark points skipped as unstable (flagged in ``extras``).
    """

    axis: FloatArray
    labels: tuple[str, ...]
    variances: FloatArray
    squeezing_db: FloatArray
    axis_label: str = ""
    extras: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        variances = np.atleast_2d(np.asarray(self.variances, dtype=float))
        expected = (axis.size, len(self.labels))
        if variances.shape != expected:
            raise DimensionError(f"variances shape {variances.shape} != {expected}")
        finite = variances[np.isfinite(variances)]
        if np.any(finite <= 0):
            raise StateError("finite variances must be strictly positive")
        object.__setattr__(self, "axis", _frozen(axis))
        object.__setattr__(self, "variances", _frozen(variances))
        object.__setattr__(self, "squeezing_db",
                           _frozen(np.atleast_2d(np.asarray(self.squeezing_db, dtype=float))))
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_variances(cls, axis, labels, variances, axis_label="", extras=None, meta=None):
        variances = np.atleast_2d(np.asarray(variances, dtype=float))
        with np.errstate(invalid="ignore", divide="ignore"):
            db = -10.0 * np.log10(variances / VACUUM_VARIANCE)
        return cls(axis=np.asarray(axis, dtype=float), labels=tuple(labels),
                   variances=variances, squeezing_db=db, axis_label=axis_label,
                   extras=extras or {}, meta=meta or {})

    def column(self, label: str, db: bool = True) -> FloatArray:
        j = self.labels.index(label)
        return np.array((self.squeezing_db if db else self.variances)[:, j])


def hurwitz_margin(drift: FloatArray) -> float:
    """Largest real part among the eigenvalues of a drift matrix.

    The dynamics is asymptotically stable iff the returned value is < 0.
    """
    drift = np.asarray(drift, dtype=float)
    if drift.ndim != 2 or drift.shape[0] != drift.shape[1]:
        raise DimensionError(f"drift matrix must be square, got shape {drift.shape}")
    return float(np.linalg.eigvals(drift).real.max())


def solve_lyapunov(drift: FloatArray, diffusion: FloatArray) -> FloatArray:
    """Steady-state covariance from A V + V A^T = -D.

    Solves by Kronecker vectorization, (I (x) A + A (x) I) vec(V) = -vec(D),
    followed by one refinement step and symmetrization. System sizes here are
    tiny (2n <= 12), so the dense O(n^6) solve is irrelevant.

    Raises
    ------
    StabilityError
        If A is not Hurwitz (no steady state exists).
    """
    drift = np.asarray(drift, dtype=float)
    diffusion = np.asarray(diffusion, dtype=float)
    if drift.shape != diffusion.shape:
        raise DimensionError("drift and diffusion shapes differ")
    margin = hurwitz_margin(drift)
    if margin >= 0:
        raise StabilityError(
            f"drift matrix is not Hurwitz (max Re eigenvalue = {margin:.3e})", margin
        )
    n = drift.shape[0]
    eye = np.eye(n)
    kron = np.kron(eye, drift) + np.kron(drift, eye)
    cov = np.linalg.solve(kron, -diffusion.reshape(-1, order="F")).reshape(n, n, order="F")
    # one Newton refinement knocks the residual down to rounding level
    residual = drift @ cov + cov @ drift.T + diffusion
    cov = cov - np.linalg.solve(kron, residual.reshape(-1, order="F")).reshape(n, n, order="F")
    cov = _symmetrize(cov)
    residual = np.linalg.norm(drift @ cov + cov @ drift.T + diffusion)
    tolerance = 1e-10 * max(1.0, float(np.linalg.norm(diffusion)))
    if residual > tolerance:
        raise ArithmeticError(
            f"Lyapunov residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
        )
    return cov


def integrate_moments(
    model: MomentModel,
    initial: GaussianState,
    t_grid: Sequence[float],
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> list[GaussianState]:
    """Propagate mean and covariance through d<u>/dt = A(t)<u> + f(t) and
    dV/dt = A(t) V + V A(t)^T + D, sampled on ``t_grid``.

    Integration uses an embedded adaptive Runge-Kutta 5(4) pair; the CM is
    propagated as a full matrix with symmetrization applied inside the
    right-hand side, which keeps drift-asymmetry error from accumulating.

    Parameters
    ----------
    t_grid:
        Strictly increasing sample times [s]; ``initial`` is the state at
        ``t_grid[0]``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be strictly increasing with >= 2 points")
    dim = initial.mean.size
    if model.diffusion.shape[0] != dim:
        raise DimensionError("model and initial state dimensions differ")
    diffusion = model.diffusion
    forcing = model.mean_forcing

    def rhs(t: float, y: FloatArray) -> FloatArray:
        drift = model.drift_at(t)
        mean = y[:dim]
        cov = _symmetrize(y[dim:].reshape(dim, dim))
        dmean = drift @ mean
        if forcing is not None:
            dmean = dmean + forcing(t)
        dcov = drift @ cov + cov @ drift.T + diffusion
        return np.concatenate([dmean, dcov.reshape(-1)])

    y0 = np.concatenate([initial.mean, initial.cov.reshape(-1)])
    sol = solve_ivp(
        rhs, (t_grid[0], t_grid[-1]), y0,
        method="RK45", t_eval=t_grid, rtol=rtol, atol=atol,
    )
    if not sol.success:
        reached = float(sol.t[-1]) if sol.t.size else float(t_grid[0])
        raise IntegrationError(
            f"moment integration failed at t = {reached:.6e} s: {sol.message}", reached
        )
    states = []
    for k in range(t_grid.size):
        mean = sol.y[:dim, k]
        cov = _symmetrize(sol.y[dim:, k].reshape(dim, dim))
        states.append(GaussianState(mean, cov))
    return states


def quadrature_variance(state: GaussianState, index: int) -> float:
    """Variance of one quadrature (diagonal CM entry)."""
    if not 0 <= index < state.mean.size:
        raise IndexError(f"quadrature index {index} out of range")
    return float(state.cov[index, index])


def squeezing_db(variance):
    """Squeezing below vacuum in dB: -10 log10(variance / (1/2)).

    Positive values mean the variance is below the vacuum level. Accepts
    scalars or arrays; NaN entries pass through (used for unstable sweep
    points).
    """
    arr = np.asarray(variance, dtype=float)
    finite = arr[np.isfinite(arr)]
    if np.any(finite <= 0):
        raise DomainError("variance must be strictly positive")
    with np.errstate(invalid="ignore"):
        out = -10.0 * np.log10(arr / VACUUM_VARIANCE)
    return float(out) if np.isscalar(variance) else out


def bogoliubov_params(g_plus: float, g_minus: float) -> BogoliubovParams:
    """Squeezing parameter and Bogoliubov coupling for a two-tone drive pair.

    r = ln((G- + G+) / (G- - G+)) / 2 and g_tilde = sqrt(G-^2 - G+^2),
    defined on the stable branch 0 <= G+ < G-.
    """
    if g_plus < 0 or g_minus <= 0:
        raise DomainError("couplings must satisfy G+ >= 0 and G- > 0")
    if g_plus >= g_minus:
        raise StabilityError(
            f"G+ = {g_plus:.6e} >= G- = {g_minus:.6e}: outside the stable domain",
            margin=g_plus - g_minus,
        )
    r = 0.5 * np.log((g_minus + g_plus) / (g_minus - g_plus))
    g_tilde = float(np.sqrt(g_minus**2 - g_plus**2))
    return BogoliubovParams(r=float(r), g_tilde=g_tilde)


def _require_single_mode_cov(block: FloatArray) -> FloatArray:
    block = np.asarray(block, dtype=float)
    if block.shape != (2, 2):
        raise DimensionError(f"expected a 2 x 2 covariance block, got {block.shape}")
    scale = max(1.0, float(np.linalg.norm(block)))
    if abs(block[0, 1] - block[1, 0]) > 1e-10 * scale:
        raise StateError("covariance block is not symmetric")
    if block[0, 0] <= 0 or block[1, 1] <= 0:
        raise StateError("covariance block has non-positive variances")
    if float(np.linalg.det(block)) < 0.25 * (1 - 1e-8):
        raise StateError("covariance block violates the Heisenberg bound")
    return _symmetrize(block)


def bogoliubov_occupancy(mech_block: FloatArray, r: float) -> float:
    """Occupation of the Bogoliubov mode B = cosh(r) b + sinh(r) b*.

    With the (X, Y) convention used throughout, the single-mode moments follow
    from the CM block as <b* b> = (V_qq + V_pp - 1)/2 and
    <b^2> + <b*^2> = V_qq - V_pp, giving

        N_B = cosh^2(r) n + sinh^2(r) (n + 1) + cosh(r) sinh(r) (V_qq - V_pp).
    """
    block = _require_single_mode_cov(mech_block)
    occupancy = (block[0, 0] + block[1, 1] - 1.0) / 2.0
    anomalous = block[0, 0] - block[1, 1]
    ch, sh = np.cosh(r), np.sinh(r)
    return float(ch**2 * occupancy + sh**2 * (occupancy + 1.0) + ch * sh * anomalous)


def wigner_gaussian(
    state: GaussianState,
    mode_index: int,
    q_axis: Sequence[float],
    p_axis: Sequence[float],
) -> FloatArray:
    """Wigner function of one mode's Gaussian marginal on a phase-space grid.

    Returns W with shape (len(q_axis), len(p_axis)), W[i, j] evaluated at
    (q_axis[i], p_axis[j]):

        W(u) = exp(-(u - mu)^T V2^{-1} (u - mu) / 2) / (2 pi sqrt(det V2)).
    """
    block = state.mode_cov(mode_index)
    det = float(np.linalg.det(block))
    if det <= 1e-300:
        raise DegeneracyError("marginal covariance matrix is singular")
    inv = np.linalg.inv(block)
    mu = state.mean[2 * mode_index:2 * mode_index + 2]
    dq = np.asarray(q_axis, dtype=float) - mu[0]
    dp = np.asarray(p_axis, dtype=float) - mu[1]
    # quadratic form expanded on the separable grid
    quad = (
        inv[0, 0] * dq[:, None]**2
        + 2.0 * inv[0, 1] * dq[:, None] * dp[None, :]
        + inv[1, 1] * dp[None, :]**2
    )
    return np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det))


def symplectic_eigenvalues(cov: FloatArray) -> FloatArray:
    """Symplectic spectrum of a CM: |eigenvalues of i Omega V|, one per mode.

    The spectrum of i Omega V comes in +/- pairs; sorting the absolute values
    and taking every other entry yields one eigenvalue per mode.
    """
    cov = np.asarray(cov, dtype=float)
    n_modes = cov.shape[0] // 2
    spectrum = np.linalg.eigvals(1j * symplectic_form(n_modes) @ cov)
    return np.sort(np.abs(spectrum))[::2]


def validate_state(state: GaussianState, tolerance: float = 1e-8) -> StateReport:
    """Check symmetry and physicality (V + i Omega / 2 >= 0) of a state.

    Physicality is evaluated through the symplectic eigenvalues, all of which
    must be >= 1/2 - tolerance. Report-only: never raises.
    """
    cov = state.cov
    scale = max(1.0, float(np.linalg.norm(cov)))
    symmetric = bool(np.linalg.norm(cov - cov.T) <= 1e-10 * scale)
    nus = symplectic_eigenvalues(cov)
    min_nu = float(nus.min())
    physical = symmetric and min_nu >= VACUUM_VARIANCE - tolerance
    return StateReport(symmetric=symmetric, physical=physical,
                       min_symplectic_eigenvalue=min_nu)
