"""Fock-space foundations: cutoffs, coefficients, Hermite functions, state type."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import constants

from optherm.errors import ConfigError, CutoffError, StateValidationError
from optherm.hilbert import (
    CoherentAmplitude,
    FockCutoff,
    OscillatorSpec,
    ProbeState,
    coherent_coefficients,
    dnbar_dtemperature,
    eigendecompose_hermitian,
    hermite_functions,
    nbar_from_temperature,
    temperature_from_nbar,
)
from conftest import random_density_matrix


class TestFockCutoff:
    def test_dim(self):
        assert FockCutoff(5).dim == 6

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_rejects_bad_nmax(self, bad):
        with pytest.raises(ConfigError):
            FockCutoff(bad)

    @given(st.floats(min_value=0.0, max_value=4.0))
    def test_for_alpha_controls_tail(self, alpha):
        cutoff = FockCutoff.for_alpha(alpha)
        c = coherent_coefficients(alpha, cutoff)  # raises if the tail is too big
        assert float(np.sum(c * c)) >= 1.0 - 1e-12


class TestOccupation:
    def test_log2_ratio_gives_unit_occupation(self):
        omega = 1e7
        t = constants.hbar * omega / (constants.k * math.log(2.0))
        assert nbar_from_temperature(t, omega) == pytest.approx(1.0, rel=1e-12)

    def test_unit_ratio(self):
        omega = 1e7
        t = constants.hbar * omega / constants.k
        expected = 1.0 / (math.e - 1.0)
        assert nbar_from_temperature(t, omega) == pytest.approx(expected, rel=1e-12)

    def test_low_temperature_limit(self):
        assert nbar_from_temperature(1e-6, 1e9) < 1e-10

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_roundtrip(self, nbar):
        omega = 1e7
        t = temperature_from_nbar(nbar, omega)
        assert nbar_from_temperature(t, omega) == pytest.approx(nbar, rel=1e-10)

    @pytest.mark.parametrize("t,omega", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
    def test_domain_errors(self, t, omega):
        with pytest.raises(ConfigError):
            nbar_from_temperature(t, omega)

    def test_occupation_jacobian(self):
        omega, t, dt = 1e7, 0.002, 1e-9
        numeric = (nbar_from_temperature(t + dt, omega)
                   - nbar_from_temperature(t - dt, omega)) / (2.0 * dt)
        assert dnbar_dtemperature(t, omega) == pytest.approx(numeric, rel=1e-6)

    def test_oscillator_spec_from_temperature(self):
        omega = 1e7
        t = constants.hbar * omega / (constants.k * math.log(2.0))
        spec = OscillatorSpec.from_temperature(t, omega)
        assert spec.nbar == pytest.approx(1.0, rel=1e-12)

    def test_negative_nbar_rejected(self):
        with pytest.raises(ConfigError):
            OscillatorSpec(-0.1)


class TestCoherentCoefficients:
    def test_vacuum(self):
        c = coherent_coefficients(0.0, FockCutoff(5))
        assert c[0] == 1.0
        assert np.all(c[1:] == 0.0)

    def test_alpha_two_ground_amplitude(self):
        c = coherent_coefficients(2.0, FockCutoff.for_alpha(2.0))
        assert c[0] == pytest.approx(math.exp(-2.0), rel=1e-14)

    def test_alpha_three_tail(self):
        c = coherent_coefficients(3.0, FockCutoff(40))
        assert float(np.sum(c * c)) >= 1.0 - 1e-12

    def test_poisson_distribution(self):
        alpha = 1.7
        c = coherent_coefficients(alpha, FockCutoff.for_alpha(alpha))
        for n in range(21):
            expected = math.exp(-alpha**2) * alpha ** (2 * n) / math.factorial(n)
            assert c[n] ** 2 == pytest.approx(expected, rel=1e-12)

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffError):
            coherent_coefficients(3.0, FockCutoff(5))

    def test_amplitude_type(self):
        with pytest.raises(ConfigError):
            CoherentAmplitude(-1.0)
        assert float(CoherentAmplitude(2.5)) == 2.5


class TestHermiteFunctions:
    def test_ground_state_at_origin(self):
        psi = hermite_functions(0.0, FockCutoff(1))
        assert psi[0] == pytest.approx(math.pi**-0.25, rel=1e-14)

    @given(st.floats(min_value=-5.0, max_value=5.0))
    def test_first_excited(self, x):
        psi = hermite_functions(x, FockCutoff(1))
        assert psi[1] == pytest.approx(math.sqrt(2.0) * x * psi[0], abs=1e-14)

    def test_orthonormality(self):
        xs = np.linspace(-12.0, 12.0, 4001)
        psi = hermite_functions(xs, FockCutoff(20))
        gram = np.trapezoid(psi[:, None, :] * psi[None, :, :], xs, axis=-1)
        assert np.max(np.abs(gram - np.eye(21))) < 1e-8

    def test_array_shape(self):
        xs = np.zeros((3, 4))
        assert hermite_functions(xs, FockCutoff(5)).shape == (6, 3, 4)


class TestProbeState:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(StateValidationError):
            ProbeState(m)

    def test_trace_deficit_is_cutoff_error(self):
        with pytest.raises(CutoffError):
            ProbeState(0.9 * np.eye(2, dtype=complex))

    def test_rejects_negative_eigenvalue(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(StateValidationError):
            ProbeState(m)

    def test_rejects_non_square(self):
        with pytest.raises(StateValidationError):
            ProbeState(np.ones((2, 3), dtype=complex))

    def test_elements_immutable(self):
        rho = ProbeState(np.eye(2, dtype=complex) / 2)
        with pytest.raises(ValueError):
            rho.elements[0, 0] = 5.0


class TestEigendecomposition:
    def test_ground_state_projector(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        vals, _ = eigendecompose_hermitian(ProbeState(rho))
        assert vals[0] == pytest.approx(1.0, abs=1e-14)
        assert np.all(vals[1:] == 0.0)

    def test_diagonal_state_sorted(self):
        diag = np.array([0.1, 0.4, 0.2, 0.3])
        vals, _ = eigendecompose_hermitian(ProbeState(np.diag(diag).astype(complex)))
        assert np.allclose(vals, np.sort(diag)[::-1])

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_reconstruction(self, seed):
        rho = random_density_matrix(12, seed)
        vals, vecs = eigendecompose_hermitian(rho)
        rebuilt = (vecs * vals) @ vecs.conj().T
        assert np.max(np.abs(rebuilt - rho.elements)) < 1e-10
        assert float(np.sum(vals)) == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.diff(vals) <= 1e-15)

    def test_requires_probe_state(self):
        with pytest.raises(StateValidationError):
            eigendecompose_hermitian(np.eye(2))
