"""Linearized-regime benchmark in the Gaussian formalism.

Covariance-matrix convention: vacuum = identity (sigma = <{dr, dr^T}>), and
the symplectic form is a direct sum of [[0, 1], [-1, 0]] blocks. Everything
here is 2x2 / 4x4 algebra; the closed forms are cross-checked against the
matrix-exponential evolution by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import ConfigError, PrecisionError
from .metrology import FisherResult

SYMPLECTIC_TOL = 1e-10

_OMEGA_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), _OMEGA_BLOCK)


@dataclass(frozen=True)
class CovarianceState:
    """First moments and covariance of a 1- or 2-mode Gaussian state."""

    first_moments: np.ndarray
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        r = np.asarray(self.first_moments, dtype=float)
        s = np.asarray(self.cov, dtype=float)
        if s.shape not in ((2, 2), (4, 4)) or r.shape != (s.shape[0],):
            raise ConfigError(f"bad covariance shapes {r.shape}, {s.shape}")
        sym_dev = np.max(np.abs(s - s.T))
        if sym_dev > 1e-12:
            raise ConfigError(f"covariance not symmetric: {sym_dev:.3e}")
        omega = symplectic_form(s.shape[0] // 2)
        min_eig = float(np.linalg.eigvalsh(s + 1j * omega)[0])
        if min_eig < -1e-10:
            raise ConfigError(f"uncertainty relation violated: min eig {min_eig:.3e}")
        r.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "first_moments", r)
        object.__setattr__(self, "cov", s)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2


@dataclass(frozen=True)
class GeneralDyneSetting:
    """Gaussian measurement: rotated squeezed projector R(theta) diag(z, 1/z) R(theta)^T."""

    z: float
    theta: float

    def __post_init__(self):
        if not (self.z > 0):
            raise ConfigError(f"z must be > 0, got {self.z}")

    @property
    def sigma_m(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        r = np.array([[c, s], [-s, c]])
        return r @ np.diag([self.z, 1.0 / self.z]) @ r.T


def linearized_hamiltonian_matrix(g: float, alpha: float) -> np.ndarray:
    """Quadratic-form matrix of the linearized Hamiltonian, in units Omega = 1.

    Basis ordering (X, Y, Q, P); the only coupling is -2 g alpha between the
    optical amplitude quadrature and the mechanical position.
    """
    h = np.zeros((4, 4))
    h[0, 2] = h[2, 0] = -2.0 * g * alpha
    h[2, 2] = 1.0
    h[3, 3] = 1.0
    return h


def initial_covariance(nbar: float) -> CovarianceState:
    """Coherent light (x) thermal mechanics: diag(1, 1, 2 nbar + 1, 2 nbar + 1)."""
    if nbar < 0:
        raise ConfigError(f"nbar must be >= 0, got {nbar}")
    return CovarianceState(
        np.zeros(4), np.diag([1.0, 1.0, 2.0 * nbar + 1.0, 2.0 * nbar + 1.0])
    )


def symplectic_propagator(g: float, alpha: float, tau: float) -> np.ndarray:
    """S(tau) = exp(omega H tau); checked symplectic to 1e-10."""
    omega = symplectic_form(2)
    s = expm(omega @ linearized_hamiltonian_matrix(g, alpha) * tau)
    residual = np.max(np.abs(s @ omega @ s.T - omega))
    if residual > SYMPLECTIC_TOL:
        raise PrecisionError(f"symplectic residual {residual:.3e}")
    return s


def evolve_covariance(
    sigma0: CovarianceState, g: float, alpha: float, tau: float
) -> CovarianceState:
    """Evolve the joint covariance under the linearized dynamics."""
    if tau < 0:
        raise ConfigError(f"tau must be >= 0, got {tau}")
    s = symplectic_propagator(g, alpha, tau)
    cov = s @ sigma0.cov @ s.T
    cov = 0.5 * (cov + cov.T)
    return CovarianceState(s @ sigma0.first_moments, cov)


def reduced_optical(joint: CovarianceState) -> CovarianceState:
    """Partial trace over the mechanics: keep the optical 2x2 block."""
    if joint.n_modes != 2:
        raise ConfigError("reduced_optical needs a two-mode state")
    return CovarianceState(joint.first_moments[:2].copy(), joint.cov[:2, :2].copy())


def sigma_L_closed_form(g: float, alpha: float, nbar: float, tau: float) -> np.ndarray:
    """Reduced optical covariance [[1, f], [f, 1 + h + f^2]]."""
    f = 4.0 * g**2 * alpha**2 * (tau - math.sin(tau))
    h = 8.0 * g**2 * alpha**2 * (1.0 - math.cos(tau)) * (2.0 * nbar + 1.0)
    return np.array([[1.0, f], [f, 1.0 + h + f * f]])


def dsigma_L_dnbar(g: float, alpha: float, tau: float) -> np.ndarray:
    """Analytic derivative of the reduced covariance: only h depends on nbar."""
    dh = 16.0 * g**2 * alpha**2 * (1.0 - math.cos(tau))
    return np.array([[0.0, 0.0], [0.0, dh]])


def gaussian_qfi(
    sigma_builder,
    nbar: float,
    dsigma: np.ndarray | None = None,
    dn: float = 1e-6,
) -> FisherResult:
    """Single-mode Gaussian QFI from the covariance matrix.

    F_Q = Tr[(sigma^-1 dsigma)^2] / (2 (1 + mu^2)) + 2 (dmu)^2 / (1 - mu^4)
    with purity mu = 1/sqrt(det sigma); the second term is dropped in the
    pure-state limit where both numerator and denominator vanish.
    """
    sigma = np.asarray(sigma_builder(nbar), dtype=float)
    det = float(np.linalg.det(sigma))
    if det <= 0:
        raise ConfigError(f"singular covariance, det = {det!r}")
    if dsigma is None:
        step = dn * (1.0 + nbar)
        lo = max(nbar - step, 0.0)
        hi = nbar + step
        dsigma = (np.asarray(sigma_builder(hi)) - np.asarray(sigma_builder(lo))) / (hi - lo)
    mu = 1.0 / math.sqrt(det)
    sigma_inv = np.linalg.inv(sigma)
    ddet = det * float(np.trace(sigma_inv @ dsigma))  # Jacobi's formula
    dmu = -0.5 * det ** -1.5 * ddet
    value = float(np.trace(sigma_inv @ dsigma @ sigma_inv @ dsigma)) / (
        2.0 * (1.0 + mu * mu)
    )
    if 1.0 - mu**4 >= 1e-12:
        value += 2.0 * dmu * dmu / (1.0 - mu**4)
    return FisherResult(
        value=value,
        parameter_point={"nbar": nbar},
        method="gaussian_covariance",
        numerics={"purity": mu},
    )


def gaussian_qfi_closed_form(g: float, alpha: float, nbar: float, tau: float) -> float:
    """Analytic QFI of the linearized model."""
    ga2 = g * g * alpha * alpha
    ct = math.cos(tau)
    return (8.0 * ga2 * (ct - 1.0)) / (
        (2.0 * nbar + 1.0) * (4.0 * ga2 * (2.0 * nbar + 1.0) * (ct - 1.0) - 1.0)
    )


def generaldyne_cfi(
    sigma_l: np.ndarray, dsigma_l: np.ndarray, setting: GeneralDyneSetting
) -> FisherResult:
    """CFI of a Gaussian measurement: (1/2) Tr[(Sigma^-1 dSigma)^2], Sigma = (sigma_L + sigma_M)/2."""
    big = 0.5 * (np.asarray(sigma_l, dtype=float) + setting.sigma_m)
    dbig = 0.5 * np.asarray(dsigma_l, dtype=float)
    inv = np.linalg.inv(big)
    value = 0.5 * float(np.trace(inv @ dbig @ inv @ dbig))
    return FisherResult(
        value=value,
        parameter_point={"z": setting.z, "theta": setting.theta},
        method="generaldyne",
    )


def homodyne_cfi_limit(
    sigma_l: np.ndarray,
    dsigma_l: np.ndarray,
    theta: float,
    z: float = 1e-6,
    consistency_tol: float = 1e-3,
) -> float:
    """Homodyne CFI as the squeezed limit of general-dyne detection.

    Evaluated at z and z/10; a relative disagreement above the tolerance
    raises :class:`PrecisionError` (the trace formula is smooth in z, so the
    two must agree once z is small enough).
    """
    f1 = generaldyne_cfi(sigma_l, dsigma_l, GeneralDyneSetting(z, theta)).value
    f2 = generaldyne_cfi(sigma_l, dsigma_l, GeneralDyneSetting(z / 10.0, theta)).value
    if abs(f1 - f2) > consistency_tol * max(abs(f2), 1e-300):
        raise PrecisionError(
            f"homodyne limit not converged at z = {z:g}: {f1!r} vs {f2!r}"
        )
    return f2


def homodyne_cfi_closed_form(g: float, alpha: float, nbar: float, theta: float) -> float:
    """Printed closed form of the homodyne CFI at tau = pi."""
    ga = g * alpha
    num = 2.0 * (4.0 * ga * math.sin(theta)) ** 4
    den = (
        math.cos(theta) ** 2
        - 4.0 * math.pi * ga * ga * math.sin(2.0 * theta)
        + (1.0 + 16.0 * ga * ga * (1.0 + 2.0 * nbar) + 16.0 * math.pi**2 * ga**4)
        * math.sin(theta) ** 2
    ) ** 2
    return num / den
