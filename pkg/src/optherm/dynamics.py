"""Construction of the optical probe state.

The radiation-pressure coupling conserves photon number, so the reduced
optical state has a closed form: each Fock element picks up a coherent
phase quadratic in photon number and a temperature-dependent Gaussian
damping of the off-diagonals. This module provides that closed form, its
small-time limit, a brute-force bipartite oracle used only for validation,
the equivalent random-phase diffusion channel, and the Kerr transformation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CutoffError, PrecisionError
from .hilbert import (
    CoherentAmplitude,
    FockCutoff,
    OscillatorSpec,
    ProbeState,
    coherent_coefficients,
)


@dataclass(frozen=True)
class CouplingParams:
    """Dimensionless coupling g = g0/Omega and interaction time tau = Omega*t."""

    g: float
    tau: float

    def __post_init__(self):
        if not np.isfinite(self.g) or self.g < 0:
            raise ConfigError(f"g must be real and >= 0, got {self.g}")
        if not np.isfinite(self.tau) or self.tau < 0:
            raise ConfigError(f"tau must be real and >= 0, got {self.tau}")

    @property
    def eta(self) -> complex:
        """Conditional mechanical displacement factor 1 - exp(-i tau)."""
        return 1.0 - np.exp(-1j * self.tau)

    @property
    def phase_lag(self) -> float:
        """tau - sin(tau), the accumulated nonlinear phase per photon-number^2."""
        return self.tau - math.sin(self.tau)


@dataclass(frozen=True)
class DiffusionWidth:
    """Standard deviation of the Gaussian random phase; 0 is the identity channel."""

    delta: float

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta < 0:
            raise ConfigError(f"delta must be real and >= 0, got {self.delta}")


@dataclass(frozen=True)
class KerrStrength:
    """Tunable Kerr parameter chi; chi = 2*pi*g^2 cancels the coherent phase at tau = pi."""

    chi: float

    @classmethod
    def cancellation(cls, g: float) -> "KerrStrength":
        return cls(2.0 * math.pi * g * g)


def _number_grids(dim: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(dim, dtype=float)
    return n[:, None], n[None, :]


def coherence_factors(osc: OscillatorSpec, cpl: CouplingParams, dim: int) -> np.ndarray:
    """Elementwise factor multiplying c_n c_m^* in the reduced probe state.

    Entry (n, m) is exp[i g^2 (n^2 - m^2)(tau - sin tau)]
    * exp[g^2 (m - n)^2 (1 + 2 nbar)(cos tau - 1)].
    """
    n, m = _number_grids(dim)
    g2 = cpl.g * cpl.g
    phase = g2 * (n * n - m * m) * cpl.phase_lag
    damping = g2 * (m - n) ** 2 * (1.0 + 2.0 * osc.nbar) * (math.cos(cpl.tau) - 1.0)
    return np.exp(damping + 1j * phase)


def coherence_factors_dnbar(cpl: CouplingParams, dim: int) -> np.ndarray:
    """d/dnbar of the log of :func:`coherence_factors` (real, elementwise)."""
    n, m = _number_grids(dim)
    return cpl.g * cpl.g * (m - n) ** 2 * 2.0 * (math.cos(cpl.tau) - 1.0)


def probe_state(
    alpha: CoherentAmplitude | float,
    osc: OscillatorSpec,
    cpl: CouplingParams,
    cutoff: FockCutoff,
) -> ProbeState:
    """Exact reduced optical state after the optomechanical interaction."""
    c = coherent_coefficients(alpha, cutoff)
    elements = np.outer(c, c.conj()) * coherence_factors(osc, cpl, cutoff.dim)
    return ProbeState(elements)


def probe_state_small_tau(
    alpha: CoherentAmplitude | float,
    osc: OscillatorSpec,
    cpl: CouplingParams,
    cutoff: FockCutoff,
) -> ProbeState:
    """Small-tau limit: pure Gaussian dephasing with width g*tau, no coherent phase.

    Intended for tau << 1; the validity region is documented by tests, not
    enforced here.
    """
    c = coherent_coefficients(alpha, cutoff)
    n, m = _number_grids(cutoff.dim)
    gt2 = (cpl.g * cpl.tau) ** 2
    damping = -0.5 * gt2 * (m - n) ** 2 * (1.0 + 2.0 * osc.nbar)
    return ProbeState(np.outer(c, c.conj()) * np.exp(damping))


def thermal_populations(nbar: float, dim: int) -> np.ndarray:
    """Fock populations p_k = nbar^k / (1 + nbar)^(k+1) of a thermal state."""
    if nbar == 0.0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    k = np.arange(dim)
    ratio = nbar / (1.0 + nbar)
    return np.exp(k * math.log(ratio)) / (1.0 + nbar)


def default_mech_cutoff(
    alpha: CoherentAmplitude | float,
    osc: OscillatorSpec,
    cpl: CouplingParams,
    cutoff_light: FockCutoff,
) -> FockCutoff:
    """Mechanical truncation for the bipartite oracle.

    Sized from the largest conditional displacement excursion reached during
    the evolution, 2*g*n*sin(min(tau, pi)/2) for the largest photon number n
    carrying non-negligible coherent weight (|c_n|^2 >= 1e-9; smaller blocks
    cannot move an element by more than ~1e-9), plus a thermal-tail margin.
    Validated by doubling-convergence tests.
    """
    c = coherent_coefficients(alpha, cutoff_light)
    significant = np.nonzero(c * c >= 1e-9)[0]
    n_sig = int(significant[-1]) if significant.size else 0
    d = 2.0 * cpl.g * n_sig * math.sin(min(cpl.tau, math.pi) / 2.0)
    return FockCutoff(max(2, math.ceil(20.0 * (osc.nbar + 1.0) + d * d + 8.0 * d)))


def bipartite_oracle(
    alpha: CoherentAmplitude | float,
    osc: OscillatorSpec,
    cpl: CouplingParams,
    cutoff_light: FockCutoff,
    cutoff_mech: FockCutoff | None = None,
    leakage_tol: float = 1e-8,
) -> ProbeState:
    """Brute-force reduced state from the truncated joint evolution.

    Builds the (dimensionless) joint Hamiltonian b^dag b - g a^dag a (b^dag+b)
    on the light (x) mechanics product space, evolves the product of the
    coherent projector with the Fock-diagonal thermal mixture by matrix
    exponentiation, and partial-traces the mechanics. The Hamiltonian is
    block diagonal in photon number, so the exponential is taken block by
    block (eigendecomposition of each Hermitian block); this is exactly the
    joint-space computation, organized along the conserved quantity.

    Exists solely to validate :func:`probe_state`.
    """
    c = coherent_coefficients(alpha, cutoff_light)
    if cutoff_mech is None:
        cutoff_mech = default_mech_cutoff(alpha, osc, cpl, cutoff_light)
    dim_m = cutoff_mech.dim

    p = thermal_populations(osc.nbar, dim_m)
    thermal_tail = 1.0 - float(np.sum(p))
    if thermal_tail > leakage_tol:
        raise CutoffError(
            f"thermal tail mass {thermal_tail:.3e} exceeds {leakage_tol:.1e}"
        )
    sqrt_p = np.sqrt(p)

    k = np.arange(dim_m, dtype=float)
    ladder = np.sqrt(k[1:])  # <k|b|k+1>
    free = np.diag(k)

    # B_n = U_n sqrt(rho_M); Tr_M of the evolved joint state is then
    # rho_L[n, m] = c_n c_m^* <B_m, B_n>.
    blocks = np.empty((cutoff_light.dim, dim_m, dim_m), dtype=complex)
    boundary_rows = min(3, dim_m)
    worst_leak = thermal_tail
    for n in range(cutoff_light.dim):
        h_n = free.copy()
        coupling = -cpl.g * n * ladder
        h_n[np.arange(dim_m - 1), np.arange(1, dim_m)] += coupling
        h_n[np.arange(1, dim_m), np.arange(dim_m - 1)] += coupling
        w, v = np.linalg.eigh(h_n)
        u_n = (v * np.exp(-1j * w * cpl.tau)) @ v.conj().T
        unit_dev = np.max(np.abs(u_n @ u_n.conj().T - np.eye(dim_m)))
        if unit_dev > 1e-10:
            raise PrecisionError(f"propagator unitarity residual {unit_dev:.3e}")
        b_n = u_n * sqrt_p[None, :]
        # Occupancy leaked to the top mechanical levels, weighted by the
        # photon-number population it multiplies.
        leak = c[n] ** 2 * float(np.sum(np.abs(b_n[-boundary_rows:]) ** 2))
        worst_leak = max(worst_leak, leak)
        blocks[n] = b_n
    if worst_leak > leakage_tol:
        raise CutoffError(
            f"mechanical trace leakage {worst_leak:.3e} exceeds {leakage_tol:.1e}; "
            f"increase the mechanical cutoff (n_max = {cutoff_mech.n_max})"
        )

    flat = blocks.reshape(cutoff_light.dim, -1)
    overlaps = flat @ flat.conj().T  # overlaps[n, m] = Tr[U_n rho_M U_m^dag]
    elements = np.outer(c, c.conj()) * overlaps
    return ProbeState(elements)


def phase_diffusion_channel(rho: ProbeState, width: DiffusionWidth) -> ProbeState:
    """Gaussian random-phase average: off-diagonals damped by exp(-2(n-m)^2 delta^2)."""
    n, m = _number_grids(rho.dim)
    factor = np.exp(-2.0 * (n - m) ** 2 * width.delta**2)
    return ProbeState(rho.elements * factor)


def diffusion_equivalence_width(osc: OscillatorSpec, cpl: CouplingParams) -> DiffusionWidth:
    """Width for which pure phase diffusion reproduces the probe's damping.

    2 delta^2 = g^2 (1 + 2 nbar)(1 - cos tau).
    """
    delta2 = 0.5 * cpl.g**2 * (1.0 + 2.0 * osc.nbar) * (1.0 - math.cos(cpl.tau))
    return DiffusionWidth(math.sqrt(max(delta2, 0.0)))


def kerr_phase_matrix(kerr: KerrStrength, dim: int) -> np.ndarray:
    """Elementwise unitary factor exp(-i (chi/2)(n^2 - m^2))."""
    n, m = _number_grids(dim)
    return np.exp(-0.5j * kerr.chi * (n * n - m * m))


def apply_kerr(rho: ProbeState, kerr: KerrStrength) -> ProbeState:
    """Kerr unitary exp(-i chi/2 (a^dag a)^2) acting by conjugation."""
    return ProbeState(rho.elements * kerr_phase_matrix(kerr, rho.dim))
