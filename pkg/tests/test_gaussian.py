import math

import numpy as np
import pytest
from scipy.linalg import solve_continuous_lyapunov

from magsq import gaussian as ga
from magsq.errors import (
    DegeneracyError,
    DimensionError,
    DomainError,
    StabilityError,
    StateError,
)


def random_stable_model(rng, n):
    """Random Hurwitz drift (eigenvalue real parts shifted below -0.1) and
    random PSD diffusion."""
    drift = rng.standard_normal((n, n))
    drift -= (np.linalg.eigvals(drift).real.max() + 0.1) * np.eye(n)
    root = rng.standard_normal((n, n))
    return drift, root @ root.T


class TestGaussianState:
    def test_vacuum(self):
        state = ga.GaussianState.vacuum(3)
        assert state.n_modes == 3
        assert np.allclose(state.cov, 0.5 * np.eye(6))

    def test_thermal(self):
        state = ga.GaussianState.thermal([0.0, 2.0])
        assert np.allclose(np.diag(state.cov), [0.5, 0.5, 2.5, 2.5])

    def test_rejects_asymmetric_cov(self):
        cov = np.array([[1.0, 0.5], [0.1, 1.0]])
        with pytest.raises(StateError):
            ga.GaussianState(np.zeros(2), cov)

    def test_rejects_negative_diagonal(self):
        with pytest.raises(StateError):
            ga.GaussianState(np.zeros(2), np.diag([1.0, -0.2]))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionError):
            ga.GaussianState(np.zeros(3), np.eye(4))

    def test_arrays_are_immutable(self):
        state = ga.GaussianState.vacuum(1)
        with pytest.raises(ValueError):
            state.cov[0, 0] = 7.0


class TestHurwitzMargin:
    def test_identity(self):
        assert ga.hurwitz_margin(-np.eye(4)) == pytest.approx(-1.0)

    def test_matches_eigensolver(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((5, 5))
        assert ga.hurwitz_margin(a) == pytest.approx(
            float(np.linalg.eigvals(a).real.max()))

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionError):
            ga.hurwitz_margin(np.zeros((2, 3)))


class TestSolveLyapunov:
    def test_single_damped_thermal_mode(self):
        kappa, occupancy = 2 * math.pi * 1e6, 1.7
        drift = -(kappa / 2) * np.eye(2)
        diffusion = kappa * (occupancy + 0.5) * np.eye(2)
        cov = ga.solve_lyapunov(drift, diffusion)
        assert np.allclose(cov, (occupancy + 0.5) * np.eye(2), rtol=1e-12)

    def test_raises_on_unstable_drift(self):
        with pytest.raises(StabilityError) as err:
            ga.solve_lyapunov(np.eye(2), np.eye(2))
        assert err.value.margin == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(12))
    def test_residual_on_random_stable_models(self, seed):
        rng = np.random.default_rng(seed)
        drift, diffusion = random_stable_model(rng, 4)
        cov = ga.solve_lyapunov(drift, diffusion)
        residual = np.linalg.norm(drift @ cov + cov @ drift.T + diffusion)
        assert residual <= 1e-10 * max(1.0, np.linalg.norm(diffusion))
        assert np.allclose(cov, cov.T)

    @pytest.mark.parametrize("seed", [3, 11, 42])
    def test_against_scipy_solver(self, seed):
        rng = np.random.default_rng(seed)
        drift, diffusion = random_stable_model(rng, 6)
        ours = ga.solve_lyapunov(drift, diffusion)
        reference = solve_continuous_lyapunov(drift, -diffusion)
        assert np.allclose(ours, reference, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 5])
    def test_against_long_time_integration(self, seed):
        # independent oracle: relax dV/dt = AV + VA^T + D to stationarity
        rng = np.random.default_rng(seed)
        drift, diffusion = random_stable_model(rng, 4)
        algebraic = ga.solve_lyapunov(drift, diffusion)
        model = ga.MomentModel(drift=drift, diffusion=diffusion)
        horizon = 20.0 / abs(ga.hurwitz_margin(drift))
        final = ga.integrate_moments(model, ga.GaussianState.vacuum(2),
                                     [0.0, horizon])[-1]
        error = np.linalg.norm(final.cov - algebraic) / np.linalg.norm(algebraic)
        assert error < 1e-6


class TestIntegrateMoments:
    def test_zero_drift_zero_diffusion_is_constant(self):
        model = ga.MomentModel(drift=np.zeros((2, 2)), diffusion=np.zeros((2, 2)))
        initial = ga.GaussianState(np.array([0.3, -0.1]), np.diag([0.7, 0.9]))
        states = ga.integrate_moments(model, initial, np.linspace(0, 5.0, 7))
        for state in states:
            assert np.allclose(state.mean, initial.mean, atol=1e-12)
            assert np.allclose(state.cov, initial.cov, atol=1e-12)

    def test_mean_follows_damped_oscillator(self):
        gamma, omega = 0.31, 4.7
        drift = np.array([[-gamma / 2, omega], [-omega, -gamma / 2]])
        model = ga.MomentModel(drift=drift, diffusion=np.zeros((2, 2)))
        initial = ga.GaussianState(np.array([1.0, 0.0]), 0.5 * np.eye(2))
        t = np.linspace(0, 3.0, 11)
        states = ga.integrate_moments(model, initial, t)
        for tk, state in zip(t, states):
            expected = math.exp(-gamma * tk / 2) * np.array(
                [math.cos(omega * tk), -math.sin(omega * tk)])
            assert np.allclose(state.mean, expected, atol=1e-9)

    def test_mean_forcing_term(self):
        gamma = 2.0
        drift = -(gamma / 2) * np.eye(2)
        force = np.array([1.5, 0.0])
        model = ga.MomentModel(drift=drift, diffusion=np.zeros((2, 2)),
                               mean_forcing=lambda t: force)
        initial = ga.GaussianState(np.zeros(2), 0.5 * np.eye(2))
        states = ga.integrate_moments(model, initial, [0.0, 40.0])
        assert np.allclose(states[-1].mean, force / (gamma / 2), rtol=1e-8)

    def test_time_dependent_drift_matches_closed_form(self):
        # V' = -g(t) V - V g(t) + 0 with scalar g(t) has V(t) = V0 exp(-2 G(t))
        def drift(t):
            return -np.cos(t) * np.eye(2)

        model = ga.MomentModel(drift=drift, diffusion=np.zeros((2, 2)))
        initial = ga.GaussianState(np.zeros(2), 0.8 * np.eye(2))
        t = np.linspace(0, 2.5, 6)
        states = ga.integrate_moments(model, initial, t)
        for tk, state in zip(t, states):
            expected = 0.8 * math.exp(-2 * math.sin(tk)) * np.eye(2)
            assert np.allclose(state.cov, expected, rtol=1e-8)

    def test_rejects_bad_grid(self):
        model = ga.MomentModel(drift=np.zeros((2, 2)), diffusion=np.zeros((2, 2)))
        initial = ga.GaussianState.vacuum(1)
        with pytest.raises(DomainError):
            ga.integrate_moments(model, initial, [0.0, 0.0, 1.0])
        with pytest.raises(DomainError):
            ga.integrate_moments(model, initial, [0.0])


class TestSqueezingMetrics:
    def test_quadrature_variance_vacuum(self):
        assert ga.quadrature_variance(ga.GaussianState.vacuum(2), 3) == 0.5

    def test_quadrature_variance_thermal(self):
        state = ga.GaussianState.thermal([1.2])
        assert ga.quadrature_variance(state, 0) == pytest.approx(1.7)

    def test_quadrature_variance_squeezed(self):
        r = 0.8
        cov = np.diag([math.exp(2 * r) / 2, math.exp(-2 * r) / 2])
        state = ga.GaussianState(np.zeros(2), cov)
        assert ga.quadrature_variance(state, 1) == pytest.approx(math.exp(-2 * r) / 2)

    def test_quadrature_variance_out_of_range(self):
        with pytest.raises(IndexError):
            ga.quadrature_variance(ga.GaussianState.vacuum(1), 2)

    def test_squeezing_db_reference_points(self):
        assert ga.squeezing_db(0.5) == 0.0
        assert ga.squeezing_db(0.25) == pytest.approx(3.010299956639812, rel=1e-12)
        assert ga.squeezing_db(0.5 * 10**-1.3) == pytest.approx(13.0, rel=1e-12)

    def test_squeezing_db_strictly_decreasing(self):
        variances = np.linspace(0.01, 3.0, 40)
        values = ga.squeezing_db(variances)
        assert np.all(np.diff(values) < 0)

    def test_squeezing_db_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            ga.squeezing_db(0.0)
        with pytest.raises(DomainError):
            ga.squeezing_db(np.array([0.5, -1.0]))

    def test_squeezing_db_propagates_nan(self):
        out = ga.squeezing_db(np.array([0.5, np.nan]))
        assert out[0] == 0.0 and np.isnan(out[1])


class TestBogoliubov:
    def test_params_cooling_limit(self):
        params = ga.bogoliubov_params(0.0, 3.0)
        assert params.r == 0.0
        assert params.g_tilde == pytest.approx(3.0)

    def test_params_golden_076(self):
        params = ga.bogoliubov_params(0.76, 1.0)
        assert params.r == pytest.approx(0.9962150823451031, rel=1e-12)

    def test_params_golden_095(self):
        g_minus = 2 * math.pi * 0.3e6
        params = ga.bogoliubov_params(0.95 * g_minus, g_minus)
        assert params.r == pytest.approx(1.8317808230648232, rel=1e-12)
        assert params.g_tilde == pytest.approx(
            g_minus * 0.31224989991991993, rel=1e-12)

    def test_params_rejects_unstable_domain(self):
        with pytest.raises(StabilityError):
            ga.bogoliubov_params(1.0, 1.0)
        with pytest.raises(StabilityError):
            ga.bogoliubov_params(1.2, 1.0)

    def test_occupancy_vacuum(self):
        assert ga.bogoliubov_occupancy(0.5 * np.eye(2), 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_occupancy_thermal_r_zero(self):
        occupancy = 2.4
        block = (occupancy + 0.5) * np.eye(2)
        assert ga.bogoliubov_occupancy(block, 0.0) == pytest.approx(occupancy)

    def test_occupancy_vanishes_for_matched_squeezed_vacuum(self):
        # a squeezed vacuum with the matching r is the Bogoliubov ground state
        r = 0.9
        block = np.diag([math.exp(-2 * r) / 2, math.exp(2 * r) / 2])
        assert ga.bogoliubov_occupancy(block, r) == pytest.approx(0.0, abs=1e-12)

    def test_occupancy_rejects_unphysical_block(self):
        with pytest.raises(StateError):
            ga.bogoliubov_occupancy(0.1 * np.eye(2), 0.0)


class TestWigner:
    def test_vacuum_peak_value(self):
        state = ga.GaussianState.vacuum(1)
        w = ga.wigner_gaussian(state, 0, [0.0], [0.0])
        assert w[0, 0] == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_normalization_within_1e4(self):
        r = 1.49  # ~13 dB squeezed state
        cov = np.diag([math.exp(-2 * r) / 2, math.exp(2 * r) / 2])
        state = ga.GaussianState(np.array([0.4, -0.2]), cov)
        q = np.linspace(-8 * math.sqrt(cov[0, 0]), 8 * math.sqrt(cov[0, 0]), 401) + 0.4
        p = np.linspace(-8 * math.sqrt(cov[1, 1]), 8 * math.sqrt(cov[1, 1]), 401) - 0.2
        w = ga.wigner_gaussian(state, 0, q, p)
        integral = np.trapezoid(np.trapezoid(w, p, axis=1), q)
        assert integral == pytest.approx(1.0, abs=1e-4)

    def test_displaced_mean_shifts_peak(self):
        cov = np.kron(np.eye(2), 0.5 * np.eye(2))
        state = ga.GaussianState(np.array([0.0, 0.0, 1.5, -0.7]), cov)
        w = ga.wigner_gaussian(state, 1, [1.5], [-0.7])
        assert w[0, 0] == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_cross_correlated_block(self):
        block = np.array([[0.9, 0.3], [0.3, 0.8]])
        state = ga.GaussianState(np.zeros(2), block)
        point = np.array([0.4, 0.6])
        w = ga.wigner_gaussian(state, 0, [point[0]], [point[1]])
        inv = np.linalg.inv(block)
        expected = math.exp(-0.5 * point @ inv @ point) / (
            2 * math.pi * math.sqrt(np.linalg.det(block)))
        assert w[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_singular_marginal_rejected(self):
        state = ga.GaussianState(np.zeros(2), np.diag([1.0, 0.0]))
        with pytest.raises(DegeneracyError):
            ga.wigner_gaussian(state, 0, [0.0], [0.0])


class TestValidateState:
    def test_vacuum_is_physical(self):
        report = ga.validate_state(ga.GaussianState.vacuum(2))
        assert report.symmetric and report.physical
        assert report.min_symplectic_eigenvalue == pytest.approx(0.5)

    def test_below_vacuum_isotropic_is_unphysical(self):
        report = ga.validate_state(ga.GaussianState(np.zeros(2), 0.1 * np.eye(2)))
        assert not report.physical

    def test_squeezed_vacuum_is_borderline_physical(self):
        r = 1.2
        cov = np.diag([math.exp(-2 * r) / 2, math.exp(2 * r) / 2])
        report = ga.validate_state(ga.GaussianState(np.zeros(2), cov))
        assert report.physical
        assert report.min_symplectic_eigenvalue == pytest.approx(0.5, rel=1e-10)

    @pytest.mark.parametrize("seed", range(6))
    def test_lyapunov_steady_states_are_physical(self, seed):
        # bosonic-network drifts preserve physicality; generic random drifts
        # need not, so build a passive network plus local damping
        rng = np.random.default_rng(seed)
        n = 2
        omega = ga.symplectic_form(n)
        h = rng.standard_normal((2 * n, 2 * n))
        h = h + h.T + 2 * n * np.eye(2 * n)  # positive definite Hamiltonian
        gammas = rng.uniform(0.5, 2.0, n)
        occupancies = rng.uniform(0.0, 3.0, n)
        damping = np.diag(np.repeat(gammas / 2, 2))
        drift = omega @ h - damping
        diffusion = np.diag(np.repeat(gammas * (occupancies + 0.5), 2))
        cov = ga.solve_lyapunov(drift, diffusion)
        report = ga.validate_state(ga.GaussianState(np.zeros(2 * n), cov))
        assert report.physical


class TestSymplectic:
    def test_form_blocks(self):
        omega = ga.symplectic_form(2)
        assert omega[0, 1] == 1 and omega[1, 0] == -1
        assert np.allclose(omega @ omega.T, np.eye(4))

    def test_thermal_spectrum(self):
        cov = np.diag([0.5, 0.5, 2.5, 2.5])
        nus = ga.symplectic_eigenvalues(cov)
        assert np.allclose(sorted(nus), [0.5, 2.5])


class TestSqueezingTrace:
    def test_from_variances(self):
        trace = ga.SqueezingTrace.from_variances(
            axis=[0.0, 1.0], labels=("a",), variances=[[0.5], [0.25]])
        assert trace.column("a")[1] == pytest.approx(3.010299956639812)

    def test_rejects_nonpositive_finite_variance(self):
        with pytest.raises(StateError):
            ga.SqueezingTrace.from_variances(
                axis=[0.0], labels=("a",), variances=[[-1.0]])

    def test_nan_marks_pass_through(self):
        trace = ga.SqueezingTrace.from_variances(
            axis=[0.0, 1.0], labels=("a",), variances=[[0.5], [np.nan]])
        assert np.isnan(trace.column("a")[1])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            ga.SqueezingTrace.from_variances(
                axis=[0.0, 1.0], labels=("a", "b"), variances=[[0.5], [0.5]])
