"""Probe-state construction, validation oracle, diffusion channel, Kerr map."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optherm.errors import ConfigError, CutoffError
from optherm.dynamics import (
    CouplingParams,
    DiffusionWidth,
    KerrStrength,
    apply_kerr,
    bipartite_oracle,
    coherence_factors,
    coherence_factors_dnbar,
    default_mech_cutoff,
    diffusion_equivalence_width,
    kerr_phase_matrix,
    phase_diffusion_channel,
    probe_state,
    probe_state_small_tau,
    thermal_populations,
)
from optherm.hilbert import FockCutoff, OscillatorSpec, ProbeState, coherent_coefficients
from conftest import coherent_projector

params = st.tuples(
    st.floats(min_value=0.1, max_value=1.5),   # alpha
    st.floats(min_value=0.0, max_value=2.0),   # nbar
    st.floats(min_value=0.0, max_value=1.0),   # g
    st.floats(min_value=0.0, max_value=2.0 * math.pi),  # tau
)


class TestCouplingParams:
    def test_eta_and_phase_lag(self):
        cpl = CouplingParams(0.3, math.pi)
        assert cpl.eta == pytest.approx(2.0, abs=1e-14)
        assert cpl.phase_lag == pytest.approx(math.pi, abs=1e-14)

    @pytest.mark.parametrize("g,tau", [(-0.1, 1.0), (0.1, -1.0), (math.nan, 1.0)])
    def test_domain(self, g, tau):
        with pytest.raises(ConfigError):
            CouplingParams(g, tau)


class TestProbeState:
    def test_zero_coupling_is_coherent_projector(self):
        cutoff = FockCutoff.for_alpha(1.5)
        rho = probe_state(1.5, OscillatorSpec(0.7), CouplingParams(0.0, 2.1), cutoff)
        expected = coherent_projector(1.5, cutoff)
        assert np.max(np.abs(rho.elements - expected.elements)) < 1e-14

    def test_full_period_is_pure(self):
        # cos(2 pi) - 1 = 0: no damping, only the Kerr-like coherent phase.
        cutoff = FockCutoff.for_alpha(1.0)
        rho = probe_state(1.0, OscillatorSpec(1.0), CouplingParams(0.4, 2.0 * math.pi), cutoff)
        purity = float(np.trace(rho.elements @ rho.elements).real)
        assert purity == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.abs(np.abs(rho.elements) - coherent_projector(1.0, cutoff).elements)) < 1e-12

    @given(params)
    def test_diagonal_is_photon_distribution(self, p):
        alpha, nbar, g, tau = p
        cutoff = FockCutoff.for_alpha(alpha)
        rho = probe_state(alpha, OscillatorSpec(nbar), CouplingParams(g, tau), cutoff)
        c = coherent_coefficients(alpha, cutoff)
        assert np.max(np.abs(np.diag(rho.elements).real - c * c)) < 1e-14

    @given(params)
    def test_state_valid_over_sweep(self, p):
        alpha, nbar, g, tau = p
        cutoff = FockCutoff.for_alpha(alpha)
        rho = probe_state(alpha, OscillatorSpec(nbar), CouplingParams(g, tau), cutoff)
        assert isinstance(rho, ProbeState)

    def test_derivative_factor_matches_finite_difference(self):
        cpl = CouplingParams(0.3, 2.0)
        dim = 8
        dn = 1e-6
        up = coherence_factors(OscillatorSpec(0.5 + dn), cpl, dim)
        dn_ = coherence_factors(OscillatorSpec(0.5 - dn), cpl, dim)
        mid = coherence_factors(OscillatorSpec(0.5), cpl, dim)
        numeric = (up - dn_) / (2.0 * dn)
        analytic = mid * coherence_factors_dnbar(cpl, dim)
        assert np.max(np.abs(numeric - analytic)) < 1e-8


class TestSmallTau:
    def test_zero_gtau_is_projector(self):
        cutoff = FockCutoff.for_alpha(1.0)
        rho = probe_state_small_tau(1.0, OscillatorSpec(1.0), CouplingParams(0.0, 0.5), cutoff)
        assert np.max(np.abs(rho.elements - coherent_projector(1.0, cutoff).elements)) < 1e-14

    def test_depends_only_on_gtau(self):
        cutoff = FockCutoff.for_alpha(1.0)
        osc = OscillatorSpec(0.5)
        a = probe_state_small_tau(1.0, osc, CouplingParams(2.0, 0.01), cutoff)
        b = probe_state_small_tau(1.0, osc, CouplingParams(1.0, 0.02), cutoff)
        assert np.max(np.abs(a.elements - b.elements)) == 0.0

    def test_cubic_error_scaling(self):
        cutoff = FockCutoff.for_alpha(1.0)
        osc = OscillatorSpec(0.5)

        def err(tau):
            exact = probe_state(1.0, osc, CouplingParams(1.0, tau), cutoff)
            approx = probe_state_small_tau(1.0, osc, CouplingParams(1.0, tau), cutoff)
            return np.max(np.abs(exact.elements - approx.elements))

        e1, e2 = err(0.01), err(0.005)
        # halving tau should shrink the error by ~2^3
        assert 5.0 < e1 / e2 < 12.0


class TestBipartiteOracle:
    def test_zero_coupling(self):
        cutoff = FockCutoff.for_alpha(1.0)
        rho = bipartite_oracle(1.0, OscillatorSpec(0.5), CouplingParams(0.0, math.pi), cutoff)
        assert np.max(np.abs(rho.elements - coherent_projector(1.0, cutoff).elements)) < 1e-12

    def test_pure_mechanics_agreement(self):
        cutoff = FockCutoff.for_alpha(1.0)
        osc, cpl = OscillatorSpec(0.0), CouplingParams(0.3, math.pi)
        direct = probe_state(1.0, osc, cpl, cutoff)
        oracle = bipartite_oracle(1.0, osc, cpl, cutoff)
        assert np.max(np.abs(direct.elements - oracle.elements)) < 1e-8

    def test_thermal_agreement_with_fixed_cutoff(self):
        cutoff = FockCutoff.for_alpha(1.0)
        osc, cpl = OscillatorSpec(1.0), CouplingParams(0.3, math.pi)
        direct = probe_state(1.0, osc, cpl, cutoff)
        oracle = bipartite_oracle(1.0, osc, cpl, cutoff, cutoff_mech=FockCutoff(60))
        assert np.max(np.abs(direct.elements - oracle.elements)) < 1e-6

    def test_insufficient_mech_cutoff_detected(self):
        cutoff = FockCutoff.for_alpha(1.0)
        with pytest.raises(CutoffError):
            bipartite_oracle(
                1.0, OscillatorSpec(2.0), CouplingParams(0.6, math.pi), cutoff,
                cutoff_mech=FockCutoff(4),
            )

    def test_default_mech_cutoff_converged(self):
        cutoff = FockCutoff.for_alpha(1.0)
        osc, cpl = OscillatorSpec(1.0), CouplingParams(0.6, math.pi)
        base = default_mech_cutoff(1.0, osc, cpl, cutoff)
        a = bipartite_oracle(1.0, osc, cpl, cutoff, cutoff_mech=base)
        b = bipartite_oracle(1.0, osc, cpl, cutoff, cutoff_mech=FockCutoff(2 * base.n_max))
        assert np.max(np.abs(a.elements - b.elements)) < 1e-9

    def test_thermal_populations_normalized(self):
        p = thermal_populations(0.8, 200)
        assert float(np.sum(p)) == pytest.approx(1.0, abs=1e-12)
        assert thermal_populations(0.0, 5)[0] == 1.0


class TestPhaseDiffusion:
    def test_zero_width_is_identity(self):
        rho = coherent_projector(1.0, FockCutoff.for_alpha(1.0))
        out = phase_diffusion_channel(rho, DiffusionWidth(0.0))
        assert np.max(np.abs(out.elements - rho.elements)) == 0.0

    def test_large_width_dephases(self):
        rho = coherent_projector(1.0, FockCutoff.for_alpha(1.0))
        out = phase_diffusion_channel(rho, DiffusionWidth(50.0))
        off = out.elements - np.diag(np.diag(out.elements))
        assert np.max(np.abs(off)) < 1e-12

    def test_quadrature_oracle(self):
        # Average of e^{-i theta n} rho e^{+i theta n} over a zero-mean
        # Gaussian theta with variance 4 delta^2, whose characteristic
        # function e^{-2 k^2 delta^2} is the channel's damping factor.
        delta = 0.3
        rho = coherent_projector(1.0, FockCutoff.for_alpha(1.0))
        thetas = np.linspace(-16.0 * delta, 16.0 * delta, 20001)
        weights = np.exp(-(thetas**2) / (8.0 * delta**2)) / math.sqrt(8.0 * math.pi * delta**2)
        n = np.arange(rho.dim)
        avg = np.zeros_like(rho.elements)
        for theta, w in zip(thetas, weights):
            u = np.exp(-1j * theta * n)
            avg = avg + w * (u[:, None] * rho.elements * u.conj()[None, :])
        avg *= thetas[1] - thetas[0]
        closed = phase_diffusion_channel(rho, DiffusionWidth(delta))
        assert np.max(np.abs(avg - closed.elements)) < 1e-8

    @given(st.floats(min_value=0.0, max_value=5.0))
    def test_output_remains_state(self, delta):
        rho = coherent_projector(1.2, FockCutoff.for_alpha(1.2))
        out = phase_diffusion_channel(rho, DiffusionWidth(delta))
        assert isinstance(out, ProbeState)  # PSD/trace/Hermiticity revalidated

    def test_negative_width_rejected(self):
        with pytest.raises(ConfigError):
            DiffusionWidth(-0.1)


class TestDiffusionEquivalence:
    def test_full_period_width_zero(self):
        w = diffusion_equivalence_width(OscillatorSpec(1.0), CouplingParams(0.3, 2.0 * math.pi))
        assert w.delta == pytest.approx(0.0, abs=1e-8)

    def test_direct_value(self):
        w = diffusion_equivalence_width(OscillatorSpec(1.0), CouplingParams(0.3, math.pi))
        assert w.delta**2 == pytest.approx(0.27, rel=1e-12)

    def test_composed_reconstruction(self):
        # coherent phase (a Kerr-like factor) followed by pure diffusion
        # rebuilds the probe state elementwise.
        alpha, osc, cpl = 1.5, OscillatorSpec(0.7), CouplingParams(0.4, 2.0)
        cutoff = FockCutoff.for_alpha(alpha)
        phased = apply_kerr(
            coherent_projector(alpha, cutoff),
            KerrStrength(-2.0 * cpl.g**2 * cpl.phase_lag),
        )
        composed = phase_diffusion_channel(phased, diffusion_equivalence_width(osc, cpl))
        direct = probe_state(alpha, osc, cpl, cutoff)
        assert np.max(np.abs(composed.elements - direct.elements)) < 1e-12


class TestKerr:
    def test_zero_chi_identity(self):
        rho = coherent_projector(1.0, FockCutoff.for_alpha(1.0))
        out = apply_kerr(rho, KerrStrength(0.0))
        assert np.max(np.abs(out.elements - rho.elements)) == 0.0

    def test_cancellation_value(self):
        assert KerrStrength.cancellation(0.5).chi == pytest.approx(2.0 * math.pi * 0.25)

    def test_cancellation_gives_real_elements(self):
        g = 0.4
        cutoff = FockCutoff.for_alpha(2.0)
        rho = probe_state(2.0, OscillatorSpec(0.5), CouplingParams(g, math.pi), cutoff)
        out = apply_kerr(rho, KerrStrength.cancellation(g))
        assert np.max(np.abs(out.elements.imag)) < 1e-12

    def test_half_chi_halves_phases(self):
        g = 0.4
        cutoff = FockCutoff.for_alpha(1.0)
        rho = probe_state(1.0, OscillatorSpec(0.5), CouplingParams(g, math.pi), cutoff)
        half = apply_kerr(rho, KerrStrength(math.pi * g * g))
        # squaring the unit phase of the half-cancelled element recovers the
        # original phase (mod 2 pi), checked without angle unwrapping
        full_elem, half_elem = rho.elements[3, 1], half.elements[3, 1]
        residual = half_elem**2 / abs(half_elem) ** 2 * np.conj(full_elem) / abs(full_elem)
        assert np.angle(residual) == pytest.approx(0.0, abs=1e-10)

    def test_unitary_in_effect(self):
        rho = probe_state(1.0, OscillatorSpec(0.5), CouplingParams(0.3, 1.2),
                          FockCutoff.for_alpha(1.0))
        out = apply_kerr(rho, KerrStrength(1.7))
        before = np.linalg.eigvalsh(rho.elements)
        after = np.linalg.eigvalsh(out.elements)
        assert np.max(np.abs(before - after)) < 1e-12

    def test_phase_matrix_unit_modulus(self):
        m = kerr_phase_matrix(KerrStrength(0.9), 6)
        assert np.max(np.abs(np.abs(m) - 1.0)) < 1e-14
