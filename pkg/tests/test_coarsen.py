import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import averaged_rotation_quadrature, random_density_matrix
from spinmet.coarsen import (
    CoarseningModel,
    bloch_vector,
    coarsen_axis,
    coarsened_family,
    dephase_z,
    gamma,
)
from spinmet.errors import DomainError
from spinmet.spincore import FieldParams, boltzmann_populations, spin_operators, thermal_state


class TestGamma:
    def test_zero_jitter(self):
        assert gamma(0.0) == 1.0

    def test_large_jitter_underflows_to_zero(self):
        assert gamma(100.0) == 0.0

    def test_unit_jitter(self):
        assert abs(gamma(1.0) - np.exp(-0.5)) < 1e-15

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            gamma(-0.1)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=0.0, max_value=10.0))
    def test_monotone_decreasing(self, a, b):
        lo, hi = sorted([a, b])
        assert gamma(hi) <= gamma(lo) <= 1.0


class TestCoarseningModel:
    def test_gamma_property(self):
        model = CoarseningModel(axis="y", eta=0.8)
        assert abs(model.gamma - np.exp(-0.32)) < 1e-15

    def test_rejects_bad_axis(self):
        with pytest.raises(DomainError):
            CoarseningModel(axis="w", eta=0.1)

    def test_rejects_negative_eta(self):
        with pytest.raises(DomainError):
            CoarseningModel(axis="x", eta=-1.0)


class TestDephaseZ:
    def test_zero_eta_identity(self):
        sys = spin_operators(1)
        rho = thermal_state(sys, FieldParams(0.7, 1.0, 1.0)).rho
        assert np.abs(dephase_z(rho, sys, 0.0) - rho).max() == 0.0

    def test_full_dephasing_keeps_diagonal_only(self):
        sys = spin_operators(1.5)
        rho = thermal_state(sys, FieldParams(0.7, 1.0, 1.0)).rho
        out = dephase_z(rho, sys, 100.0)
        assert np.abs(out - np.diag(np.diag(out))).max() == 0.0
        assert np.abs(np.diag(out) - np.diag(rho)).max() == 0.0

    def test_spin_half_thermal_closed_form(self):
        # the qubit image has the off-diagonal scaled by gamma and the
        # populations p1 cos^2(theta/2) + p2 sin^2(theta/2) on the diagonal
        sys = spin_operators(0.5)
        theta, delta, eta = 0.9, 1.3, 0.6
        rho = thermal_state(sys, FieldParams(theta, delta, 1.0)).rho
        out = dephase_z(rho, sys, eta)
        pops, _ = boltzmann_populations(sys, delta)
        p1, p2 = pops[0], pops[1]
        g = np.exp(-eta**2 / 2)
        expected = np.array(
            [
                [
                    p1 * np.cos(theta / 2) ** 2 + p2 * np.sin(theta / 2) ** 2,
                    (p1 - p2) * g * np.sin(theta) / 2,
                ],
                [
                    (p1 - p2) * g * np.sin(theta) / 2,
                    p2 * np.cos(theta / 2) ** 2 + p1 * np.sin(theta / 2) ** 2,
                ],
            ]
        )
        assert np.abs(out - expected).max() < 1e-12

    def test_dimension_mismatch(self):
        sys = spin_operators(1)
        with pytest.raises(DomainError):
            dephase_z(np.eye(2) / 2, sys, 0.5)


class TestCoarsenAxis:
    def test_z_axis_equals_dephase(self):
        sys = spin_operators(1)
        rho = thermal_state(sys, FieldParams(1.1, 0.8, 1.0)).rho
        model = CoarseningModel(axis="z", eta=0.7)
        assert np.abs(coarsen_axis(rho, sys, model) - dephase_z(rho, sys, 0.7)).max() == 0.0

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    @pytest.mark.parametrize("spin", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("eta", [0.3, 1.0, 2.0])
    def test_against_quadrature_oracle(self, axis, spin, eta):
        sys = spin_operators(spin)
        rho = thermal_state(sys, FieldParams(0.9, 1.1, 1.0)).rho
        got = coarsen_axis(rho, sys, CoarseningModel(axis=axis, eta=eta))
        generator = {"x": sys.sx, "y": sys.sy, "z": sys.sz}[axis]
        expected = averaged_rotation_quadrature(rho, generator, eta)
        assert np.abs(got - expected).max() < 1e-10

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_spin_half_bloch_damping_pattern(self, axis):
        # the component along the jitter axis is untouched, the two
        # perpendicular components are scaled by exactly gamma
        sys = spin_operators(0.5)
        theta, eta = 0.8, 0.9
        rho = thermal_state(sys, FieldParams(theta, 1.2, 1.0)).rho
        r0 = bloch_vector(rho).r
        r1 = bloch_vector(coarsen_axis(rho, sys, CoarseningModel(axis=axis, eta=eta))).r
        g = gamma(eta)
        keep = {"x": 0, "y": 1, "z": 2}[axis]
        for i in range(3):
            scale = 1.0 if i == keep else g
            assert abs(r1[i] - scale * r0[i]) < 1e-14

    def test_spin_half_y_axis_scales_plane(self):
        sys = spin_operators(0.5)
        theta, delta, eta = 1.1, 0.9, 0.7
        rho = thermal_state(sys, FieldParams(theta, delta, 1.0)).rho
        r1 = bloch_vector(coarsen_axis(rho, sys, CoarseningModel(axis="y", eta=eta))).r
        pops, _ = boltzmann_populations(sys, delta)
        d = pops[0] - pops[1]
        g = gamma(eta)
        assert abs(abs(r1[0]) - abs(d) * g * np.sin(theta)) < 1e-14
        assert abs(r1[1]) < 1e-14
        assert abs(abs(r1[2]) - abs(d) * g * np.cos(theta)) < 1e-14

    def test_spin_half_x_axis_preserves_x(self):
        sys = spin_operators(0.5)
        theta, delta, eta = 1.1, 0.9, 0.7
        rho = thermal_state(sys, FieldParams(theta, delta, 1.0)).rho
        r0 = bloch_vector(rho).r
        r1 = bloch_vector(coarsen_axis(rho, sys, CoarseningModel(axis="x", eta=eta))).r
        g = gamma(eta)
        assert abs(r1[0] - r0[0]) < 1e-14
        assert abs(abs(r1[2]) - g * abs(r0[2])) < 1e-14


class TestChannelLaws:
    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    @pytest.mark.parametrize("spin", [0.5, 1.0, 1.5, 2.0])
    def test_trace_hermiticity_positivity(self, axis, spin):
        sys = spin_operators(spin)
        rng = np.random.default_rng(7)
        for _ in range(5):
            rho = random_density_matrix(sys.dim, rng)
            out = coarsen_axis(rho, sys, CoarseningModel(axis=axis, eta=0.8))
            assert abs(np.trace(out).real - 1.0) < 1e-14
            assert abs(np.trace(out).imag) < 1e-14
            assert np.abs(out - out.conj().T).max() < 1e-12
            assert np.linalg.eigvalsh(out).min() > -1e-12

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    @pytest.mark.parametrize("spin", [0.5, 1.0, 2.0])
    def test_semigroup_in_quadrature(self, axis, spin):
        # composing jitters adds their variances
        sys = spin_operators(spin)
        rng = np.random.default_rng(11)
        rho = random_density_matrix(sys.dim, rng)
        eta1, eta2 = 0.6, 1.1
        combined = CoarseningModel(axis=axis, eta=np.hypot(eta1, eta2))
        step1 = coarsen_axis(rho, sys, CoarseningModel(axis=axis, eta=eta1))
        step2 = coarsen_axis(step1, sys, CoarseningModel(axis=axis, eta=eta2))
        assert np.abs(step2 - coarsen_axis(rho, sys, combined)).max() < 1e-12


class TestCoarsenedFamily:
    def test_zero_eta_equals_thermal_family(self):
        fam = coarsened_family(1.0, 0.9, 1.2, 0.8, CoarseningModel(axis="x", eta=0.0))
        sys = spin_operators(1.0)
        for point in [(0.9, 1.2), (0.5, 0.7), (2.0, 2.4)]:
            expected = thermal_state(sys, FieldParams(point[0], point[1], 0.8)).rho
            assert np.abs(fam(point) - expected).max() < 1e-14

    def test_nominal_point_attached(self):
        fam = coarsened_family(0.5, 0.9, 1.2, 0.8, CoarseningModel(axis="z", eta=0.5))
        assert fam.point0 == (0.9, 1.2)

    def test_outputs_are_valid_states(self):
        fam = coarsened_family(1.0, 0.9, 1.2, 0.8, CoarseningModel(axis="y", eta=0.8))
        rng = np.random.default_rng(3)
        for _ in range(50):
            theta = rng.uniform(0.05, np.pi - 0.05)
            omega = rng.uniform(0.1, 3.0)
            rho = fam((theta, omega))
            assert abs(np.trace(rho).real - 1.0) < 1e-12
            assert np.linalg.eigvalsh(rho).min() > -1e-12
