"""Fock-space numerical foundations.

Everything downstream works with truncated Fock-basis matrices; this module
fixes the truncation policy, the normalized-Hermite quadrature machinery and
the validated density-matrix type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .errors import ConfigError, CutoffError, StateValidationError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-9
PSD_TOL = -1e-10

#: Default tail-mass tolerance for coherent-state truncation.
COHERENT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FockCutoff:
    """Truncation of the photon-number basis; matrices have shape (n_max+1,)**2."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ConfigError(f"n_max must be an integer >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @classmethod
    def for_alpha(cls, alpha: float) -> "FockCutoff":
        """Cutoff guaranteeing coherent tail mass < 1e-12 for alpha <= 4."""
        a = abs(float(alpha))
        return cls(max(1, math.ceil(a * a + 8.0 * a + 10.0)))


@dataclass(frozen=True)
class CoherentAmplitude:
    """Real, nonnegative coherent amplitude of the input light."""

    alpha: float

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ConfigError(f"alpha must be real and >= 0, got {self.alpha}")

    def __float__(self) -> float:
        return float(self.alpha)


@dataclass(frozen=True)
class OscillatorSpec:
    """Thermal occupation of the mechanical mode, optionally derived from (T, Omega)."""

    nbar: float
    temperature: float | None = None
    omega: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.nbar) or self.nbar < 0:
            raise ConfigError(f"nbar must be real and >= 0, got {self.nbar}")

    @classmethod
    def from_temperature(cls, temperature: float, omega: float) -> "OscillatorSpec":
        nbar = nbar_from_temperature(temperature, omega)
        return cls(nbar=nbar, temperature=temperature, omega=omega)


def nbar_from_temperature(temperature: float, omega: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar*Omega/(kB*T)) - 1).

    ``temperature`` in kelvin, ``omega`` in rad/s.
    """
    if not (temperature > 0):
        raise ConfigError(f"temperature must be > 0, got {temperature}")
    if not (omega > 0):
        raise ConfigError(f"omega must be > 0, got {omega}")
    x = constants.hbar * omega / (constants.k * temperature)
    if x < 1.0:
        return 1.0 / math.expm1(x)
    em = math.exp(-x)  # avoids overflow of exp(x) deep in the quantum regime
    return em / (1.0 - em)


def dnbar_dtemperature(temperature: float, omega: float) -> float:
    """Jacobian of the Bose-Einstein occupation in temperature.

    Converts Fisher information between parameterizations via
    F(T) = F(nbar) * (dnbar/dT)^2.
    """
    if not (temperature > 0):
        raise ConfigError(f"temperature must be > 0, got {temperature}")
    if not (omega > 0):
        raise ConfigError(f"omega must be > 0, got {omega}")
    x = constants.hbar * omega / (constants.k * temperature)
    em = math.exp(-x)
    return (x / temperature) * em / (1.0 - em) ** 2


def temperature_from_nbar(nbar: float, omega: float) -> float:
    """Inverse of :func:`nbar_from_temperature` (used for cross-checks)."""
    if not (nbar > 0):
        raise ConfigError(f"nbar must be > 0 to invert, got {nbar}")
    if not (omega > 0):
        raise ConfigError(f"omega must be > 0, got {omega}")
    return constants.hbar * omega / (constants.k * math.log1p(1.0 / nbar))


@dataclass(frozen=True)
class ProbeState:
    """Fock-basis density matrix of the optical probe.

    Validated on construction: Hermitian to 1e-12, unit trace to 1e-9
    (trace deficits signal an insufficient cutoff, not a bug to renormalize
    away), and positive semidefinite to -1e-10.
    """

    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.elements, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise StateValidationError(f"density matrix must be square, got {rho.shape}")
        herm_dev = np.max(np.abs(rho - rho.conj().T))
        if herm_dev > HERMITICITY_TOL:
            raise StateValidationError(f"not Hermitian: max deviation {herm_dev:.3e}")
        tr = np.real(np.trace(rho))
        if abs(tr - 1.0) > TRACE_TOL:
            raise CutoffError(
                f"trace = {tr!r} deviates from 1 beyond {TRACE_TOL}; "
                "increase the Fock cutoff"
            )
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < PSD_TOL:
            raise StateValidationError(f"not PSD: min eigenvalue {min_eig:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]


def coherent_coefficients(
    alpha: CoherentAmplitude | float,
    cutoff: FockCutoff,
    tail_tol: float = COHERENT_TAIL_TOL,
) -> np.ndarray:
    """Fock amplitudes c_n = exp(-alpha^2/2) alpha^n / sqrt(n!).

    Uses the stable recurrence c_{n+1} = c_n * alpha / sqrt(n+1); raises
    :class:`CutoffError` if the truncated norm falls below 1 - tail_tol.
    """
    a = float(alpha)
    if a < 0:
        raise ConfigError(f"alpha must be >= 0, got {a}")
    c = np.zeros(cutoff.dim)
    c[0] = math.exp(-0.5 * a * a)
    for n in range(cutoff.n_max):
        c[n + 1] = c[n] * a / math.sqrt(n + 1)
    norm = float(np.sum(c * c))
    if norm < 1.0 - tail_tol:
        raise CutoffError(
            f"coherent tail mass {1.0 - norm:.3e} exceeds {tail_tol:.1e} "
            f"at n_max = {cutoff.n_max}"
        )
    return c


def hermite_functions(x, cutoff: FockCutoff) -> np.ndarray:
    """Normalized Hermite functions psi_n(x) = <x|n> for n = 0..n_max.

    psi_n(x) = exp(-x^2/2) H_n(x) / sqrt(2^n n! sqrt(pi)), evaluated by the
    three-term recurrence on the functions themselves so no factorial ever
    appears explicitly. ``x`` may be a scalar or an array; the returned
    array has shape (n_max+1,) + shape(x).
    """
    xs = np.asarray(x, dtype=float)
    psi = np.zeros((cutoff.dim,) + xs.shape)
    psi[0] = np.pi ** -0.25 * np.exp(-0.5 * xs * xs)
    if cutoff.n_max >= 1:
        psi[1] = math.sqrt(2.0) * xs * psi[0]
    for n in range(1, cutoff.n_max):
        psi[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * xs * psi[n]
            - math.sqrt(n / (n + 1)) * psi[n - 1]
        )
    return psi


def eigendecompose_hermitian(rho: ProbeState) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a validated state, eigenvalues descending.

    Small negative eigenvalues within the PSD tolerance are floored at zero;
    columns of the returned matrix are the matching eigenvectors. The
    reconstruction V diag(w) V^dagger equals rho to 1e-10 in max-norm.
    """
    if not isinstance(rho, ProbeState):
        raise StateValidationError(
            "eigendecompose_hermitian requires a validated ProbeState"
        )
    vals, vecs = np.linalg.eigh(rho.elements)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    if vals[-1] < PSD_TOL:
        raise StateValidationError(f"min eigenvalue {vals[-1]:.3e} below PSD tolerance")
    np.clip(vals, 0.0, None, out=vals)
    return vals, vecs
