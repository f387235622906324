import numpy as np
import pytest

from oracles import random_density_matrix
from spinmet.coarsen import CoarseningModel, coarsen_axis, coarsened_family
from spinmet.errors import DomainError
from spinmet.fisher import (
    independent_precision,
    qfi_spectral,
    simultaneous_precision,
)
from spinmet.measurement import (
    MleResult,
    OutcomeDistribution,
    Povm,
    cfi_matrix,
    mle_fit,
    povm_probability_family,
    probabilities,
    qubit_probability_family,
    sample_outcomes,
    standard_povm,
)
from spinmet.spincore import FieldParams, boltzmann_populations, spin_operators, thermal_state

# fig-2 style physical point: tanh(delta/2) = 1/3 at unit alpha
T_FIG2 = (1 - (1 / 3) ** 2) / 4
DELTA_FIG2 = 2 * np.arctanh(1 / 3)
OMEGA_FIG2 = DELTA_FIG2 * T_FIG2


class TestStandardPovm:
    def test_completeness_exact(self):
        povm = standard_povm()
        total = sum(povm.effects)
        assert np.abs(total - np.eye(2)).max() == 0.0

    def test_third_effect(self):
        povm = standard_povm()
        pi3 = povm.effects[2]
        assert np.allclose(pi3, [[0.25, -0.25], [-0.25, 0.75]])
        eigs = np.linalg.eigvalsh(pi3)
        assert eigs.min() > 0  # det = 1/8 > 0, strictly positive effect
        assert abs(eigs.prod() - 1 / 8) < 1e-15

    def test_trace_vector(self):
        povm = standard_povm()
        traces = [float(np.trace(e).real) for e in povm.effects]
        assert traces == [0.5, 0.5, 1.0]

    def test_invalid_povm_rejected(self):
        with pytest.raises(DomainError):
            Povm(effects=(np.eye(2), np.eye(2)))
        with pytest.raises(DomainError):
            Povm(effects=(np.array([[1.5, 0], [0, 1.0]]), np.array([[-0.5, 0], [0, 0.0]])))


class TestProbabilities:
    def test_maximally_mixed(self):
        dist = probabilities(standard_povm(), np.eye(2) / 2)
        assert np.allclose(dist.probs, [0.25, 0.25, 0.5])

    def test_coarsened_thermal_closed_form(self):
        sys = spin_operators(0.5)
        theta, delta, eta = np.pi / 3, 0.9, 0.6
        rho = thermal_state(sys, FieldParams(theta, delta, 1.0)).rho
        rho = coarsen_axis(rho, sys, CoarseningModel("z", eta))
        dist = probabilities(standard_povm(), rho)
        pops, _ = boltzmann_populations(sys, delta)
        p1, p2 = pops[0], pops[1]
        g = np.exp(-eta**2 / 2)
        expected_p1 = 0.5 * (p1 * np.cos(theta / 2) ** 2 + p2 * np.sin(theta / 2) ** 2)
        expected_p2 = (p1 - p2) * (g / 4) * np.sin(theta) + 0.25
        assert abs(dist.probs[0] - expected_p1) < 1e-12
        assert abs(dist.probs[1] - expected_p2) < 1e-12
        assert abs(dist.probs.sum() - 1.0) < 1e-14

    def test_affine_in_state(self):
        rng = np.random.default_rng(13)
        povm = standard_povm()
        rho_a = random_density_matrix(2, rng)
        rho_b = random_density_matrix(2, rng)
        mixed = probabilities(povm, (rho_a + rho_b) / 2).probs
        averaged = (probabilities(povm, rho_a).probs + probabilities(povm, rho_b).probs) / 2
        assert np.abs(mixed - averaged).max() < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            probabilities(standard_povm(), np.eye(3) / 3)

    @pytest.mark.parametrize("axis", ["y", "z"])
    def test_fast_family_matches_matrix_route(self, axis):
        temperature = 0.7
        model = CoarseningModel(axis, 0.8)
        fast = qubit_probability_family(temperature, model)
        slow = povm_probability_family(
            standard_povm(),
            coarsened_family(0.5, 1.0, 1.0, temperature, model),
        )
        for point in [(0.4, 0.5), (np.pi / 3, 1.1), (2.5, 2.0)]:
            assert np.abs(fast(point).probs - slow(point).probs).max() < 1e-12


class TestCfiMatrix:
    def test_constant_family_is_zero(self):
        fam = lambda point: OutcomeDistribution(probs=np.array([0.2, 0.3, 0.5]))
        f = cfi_matrix(fam, [1.0, 1.0])
        assert np.abs(f.entries).max() == 0.0

    @pytest.mark.parametrize("axis", ["y", "z"])
    def test_against_symbolic_derivatives(self, axis):
        # independent oracle: differentiate the closed-form outcome
        # probabilities symbolically and assemble the information matrix
        sympy = pytest.importorskip("sympy")
        th, om = sympy.symbols("th om", positive=True)
        temperature, eta = 0.7, 0.6
        g = sympy.exp(-sympy.Rational(1, 2) * eta**2)
        d = -sympy.tanh(om / (2 * temperature))
        x_scale, z_scale = {"y": (g, g), "z": (g, 1)}[axis]
        p1 = (1 + d * z_scale * sympy.cos(th)) / 4
        p2 = (1 + d * x_scale * sympy.sin(th)) / 4
        p3 = 1 - p1 - p2
        probs = [p1, p2, p3]
        entries = sympy.zeros(2, 2)
        for p in probs:
            dth, dom = sympy.diff(p, th), sympy.diff(p, om)
            entries[0, 0] += dth**2 / p
            entries[0, 1] += dth * dom / p
            entries[1, 1] += dom**2 / p
        entries[1, 0] = entries[0, 1]
        point = (np.pi / 3, 0.9)
        expected = np.array(
            sympy.lambdify((th, om), entries, "numpy")(point[0], point[1]), dtype=float
        )
        fam = qubit_probability_family(temperature, CoarseningModel(axis, eta))
        got = cfi_matrix(fam, point)
        assert np.abs(got.entries - expected).max() < 1e-7

    def test_data_processing_under_qfi(self):
        temperature = 0.7
        worst = np.inf
        for theta in [0.4, np.pi / 3, 2.2]:
            for delta in [0.5, 1.5]:
                for eta in [0.0, 0.6, 1.2]:
                    for axis in ["y", "z"]:
                        omega = delta * temperature
                        model = CoarseningModel(axis, eta)
                        state_fam = coarsened_family(0.5, theta, omega, temperature, model)
                        f_q = qfi_spectral(state_fam, state_fam.point0)
                        f_c = cfi_matrix(
                            qubit_probability_family(temperature, model), (theta, omega)
                        )
                        gap = np.linalg.eigvalsh(f_q.entries - f_c.entries).min()
                        worst = min(worst, gap)
        assert worst > -1e-8

    def test_y_axis_povm_keeps_advantage(self):
        t = np.sqrt(1 / 3)
        temperature = (1 - t**2) / 4
        omega = 2 * np.arctanh(t) * temperature
        for eta in np.linspace(0.0, 2.0, 11):
            fam = qubit_probability_family(temperature, CoarseningModel("y", eta))
            f = cfi_matrix(fam, (np.pi / 3, omega))
            assert simultaneous_precision(f) < independent_precision(f)

    def test_drops_zero_probability_outcomes(self):
        def fam(point):
            return np.array([point[0] * 0.5, 1.0 - point[0] * 0.5, 0.0])

        with pytest.warns(UserWarning, match="dropping"):
            f = cfi_matrix(fam, [0.5, 1.0])
        assert f.entries[0, 0] > 0


class TestSampling:
    def test_degenerate_distribution(self):
        hist = sample_outcomes(OutcomeDistribution(probs=np.array([1.0, 0.0, 0.0])), 1000, seed=4)
        assert list(hist.counts) == [1000, 0, 0]

    def test_frequencies_concentrate(self):
        dist = OutcomeDistribution(probs=np.array([0.25, 0.25, 0.5]))
        n = 10**6
        hist = sample_outcomes(dist, n, seed=123)
        for count, p in zip(hist.counts, dist.probs):
            sigma = np.sqrt(p * (1 - p) / n)
            assert abs(count / n - p) < 4 * sigma

    def test_deterministic_given_seed(self):
        dist = OutcomeDistribution(probs=np.array([0.3, 0.3, 0.4]))
        a = sample_outcomes(dist, 5000, seed=77)
        b = sample_outcomes(dist, 5000, seed=77)
        assert np.array_equal(a.counts, b.counts)
        c = sample_outcomes(dist, 5000, seed=77, stream=1)
        assert not np.array_equal(a.counts, c.counts)

    def test_metadata_recorded(self):
        hist = sample_outcomes(OutcomeDistribution(probs=np.array([0.5, 0.5])), 10, seed=1)
        assert "Philox" in hist.prng
        assert hist.counts.sum() == hist.n == 10


class TestMleFit:
    def fig2_family(self, eta=0.0):
        return qubit_probability_family(T_FIG2, CoarseningModel("z", eta))

    def test_exact_counts_recover_truth(self):
        fam = self.fig2_family()
        truth = (np.pi / 3, OMEGA_FIG2)
        counts = fam(truth).probs * 10**6
        result = mle_fit(counts, fam, init=truth)
        assert result.converged
        assert abs(result.theta_hat - truth[0]) < 1e-6
        assert abs(result.omega_hat - truth[1]) < 1e-6

    def test_sampled_counts_within_standard_errors(self):
        fam = self.fig2_family()
        truth = (np.pi / 3, OMEGA_FIG2)
        n = 10**6
        f_c = cfi_matrix(fam, truth)
        cov = np.linalg.inv(f_c.entries) / n
        hist = sample_outcomes(fam(truth), n, seed=2024)
        result = mle_fit(hist, fam, init=truth)
        assert result.seed == 2024
        assert abs(result.theta_hat - truth[0]) < 5 * np.sqrt(cov[0, 0])
        assert abs(result.omega_hat - truth[1]) < 5 * np.sqrt(cov[1, 1])
        assert np.isfinite(result.loglik)

    def test_replication_covariance_matches_information(self):
        fam = self.fig2_family()
        truth = (np.pi / 3, OMEGA_FIG2)
        n, reps = 10**5, 500
        dist = fam(truth)
        estimates = np.empty((reps, 2))
        for rep in range(reps):
            hist = sample_outcomes(dist, n, seed=515, stream=rep)
            result = mle_fit(hist, fam, init=truth)
            estimates[rep] = (result.theta_hat, result.omega_hat)
        empirical = np.trace(np.cov(estimates.T))
        f_c = cfi_matrix(fam, truth)
        theoretical = np.trace(np.linalg.inv(f_c.entries)) / n
        assert abs(empirical / theoretical - 1.0) < 0.10

    def test_bias_shrinks_with_sample_size(self):
        fam = self.fig2_family()
        truth = np.array([np.pi / 3, OMEGA_FIG2])
        dist = fam(truth)
        scale = None
        biases = []
        for n in [10**3, 10**4, 10**5, 10**6]:
            reps = 40
            ests = np.empty((reps, 2))
            for rep in range(reps):
                hist = sample_outcomes(dist, n, seed=99, stream=rep)
                result = mle_fit(hist, fam, init=truth)
                ests[rep] = (result.theta_hat, result.omega_hat)
            bias = ests.mean(axis=0) - truth
            if scale is None:
                scale = np.array([1.0, truth[0] / truth[1]])
            biases.append(float(np.linalg.norm(bias * scale)))
        assert all(b2 < b1 for b1, b2 in zip(biases, biases[1:]))

    def test_flat_likelihood_is_flagged(self):
        # omega sensitivity dies when the populations saturate
        fam = self.fig2_family()

        def saturated(point):
            return fam((point[0], 50 * T_FIG2))  # pin delta at 50: no omega effect

        counts = np.array([100, 400, 500], dtype=float)
        result = mle_fit(counts, saturated, init=(1.0, 1.0))
        assert not result.converged or result.flags
        assert any("omega" in f or "singular" in f for f in result.flags)

    def test_rejects_empty_counts(self):
        with pytest.raises(DomainError):
            mle_fit(np.zeros(3), self.fig2_family(), init=(1.0, 1.0))

    def test_result_type_fields(self):
        fam = self.fig2_family()
        truth = (np.pi / 3, OMEGA_FIG2)
        counts = fam(truth).probs * 1000
        result = mle_fit(counts, fam, init=truth)
        assert isinstance(result, MleResult)
        assert 0 < result.theta_hat < np.pi
        assert result.omega_hat > 0
