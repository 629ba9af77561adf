"""Wigner functions of Fock-basis density matrices on phase-space grids.

Production path: associated-Laguerre closed form for the Fock kernels,
evaluated diagonal-by-diagonal with upward recurrences (stable to dimensions
of order 60 in double precision). The defining line-integral form is kept as
an independent quadrature oracle for cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, CutoffError, PrecisionError
from .hilbert import FockCutoff, ProbeState, hermite_functions

IMAG_RESIDUE_TOL = 1e-10
COVERAGE_TOL = 1e-4
WIGNER_LOWER_BOUND = -1.0 / math.pi


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Rectangular grid of Wigner values, W[i, j] = W(q[i], p[j])."""

    q: np.ndarray
    p: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        w = np.asarray(self.values, dtype=float)
        if w.shape != (q.size, p.size):
            raise ConfigError(f"grid shape mismatch: {w.shape} vs ({q.size}, {p.size})")
        for arr in (q, p, w):
            arr.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "values", w)

    @property
    def cell_area(self) -> float:
        return float((self.q[1] - self.q[0]) * (self.p[1] - self.p[0]))

    def normalization(self) -> float:
        return float(np.sum(self.values) * self.cell_area)


def default_half_width(alpha: float) -> float:
    """Covers the coherent support: sqrt(2)*alpha + 5."""
    return math.sqrt(2.0) * abs(alpha) + 5.0


def _laguerre_diagonal_sum(rho: np.ndarray, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Sum rho[m, n] * kernel[m, n] over all (m, n), organized by k = m - n.

    ``a`` is sqrt(2)(q - i p) on the grid, ``x`` = |a|^2 = 2 r^2. For m >= n
    the kernel is (1/pi) e^{-x/2} (-1)^n sqrt(n!/m!) a^{m-n} L_n^{m-n}(x);
    the m < n half follows by Hermitian symmetry.
    """
    dim = rho.shape[0]
    env = np.exp(-0.5 * x) / math.pi
    total = np.zeros(a.shape, dtype=complex)
    lg = gammaln(np.arange(dim + 1) + 1.0)
    for k in range(dim):
        base = env * a**k
        # upward recurrence in n for L_n^k(x)
        l_prev = np.ones_like(x)
        l_curr = 1.0 + k - x
        for n in range(dim - k):
            lag = l_prev if n == 0 else l_curr
            if n >= 1:
                l_next = ((2.0 * n + 1.0 + k - x) * l_curr - (n + k) * l_prev) / (n + 1.0)
                l_prev, l_curr = l_curr, l_next
            coeff = (-1.0) ** n * math.exp(0.5 * (lg[n] - lg[n + k]))
            term = coeff * base * lag
            if k == 0:
                total += rho[n, n].real * term
            else:
                total += rho[n + k, n] * term + rho[n, n + k] * np.conj(term)
    return total


def wigner_grid(
    rho: ProbeState,
    q: np.ndarray | None = None,
    p: np.ndarray | None = None,
    half_width: float | None = None,
    points: int = 201,
    check_coverage: bool = True,
) -> PhaseSpaceGrid:
    """Wigner function of ``rho`` on a rectangular grid.

    Raises :class:`CutoffError` when the grid fails to capture the state
    (normalization deficit above 1e-4); pass ``check_coverage=False`` when
    evaluating on a deliberately partial grid.
    """
    if q is None or p is None:
        if half_width is None:
            # fall back to the cutoff-implied support
            half_width = math.sqrt(2.0 * rho.dim) + 5.0
        axis = np.linspace(-half_width, half_width, points)
        q = axis if q is None else q
        p = axis if p is None else p
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    qq, pp = np.meshgrid(q, p, indexing="ij")
    a = math.sqrt(2.0) * (qq - 1j * pp)
    x = np.abs(a) ** 2
    w = _laguerre_diagonal_sum(rho.elements, a, x)
    residue = float(np.max(np.abs(w.imag)))
    if residue > IMAG_RESIDUE_TOL:
        raise PrecisionError(f"Wigner imaginary residue {residue:.3e}")
    grid = PhaseSpaceGrid(q, p, w.real)
    if check_coverage:
        deficit = abs(grid.normalization() - 1.0)
        if deficit > COVERAGE_TOL:
            raise CutoffError(
                f"phase-space grid too small: normalization deficit {deficit:.3e}"
            )
    return grid


def wigner_min(grid: PhaseSpaceGrid) -> float:
    """Most negative Wigner value on the grid (negativity witness)."""
    return float(np.min(grid.values))


def wigner_line_integral_oracle(
    rho: ProbeState,
    q: float,
    p: float,
    x_half_width: float | None = None,
    n_points: int = 4001,
) -> float:
    """Direct quadrature of W(q,p) = (1/pi) int <q+x|rho|q-x> e^{-2ipx} dx.

    Validation oracle for the Laguerre-kernel path; O(dim^2) per point.
    """
    if x_half_width is None:
        x_half_width = math.sqrt(2.0 * rho.dim) + 8.0 + abs(q)
    xs = np.linspace(-x_half_width, x_half_width, n_points)
    cutoff = FockCutoff(rho.dim - 1)
    psi_plus = hermite_functions(q + xs, cutoff)
    psi_minus = hermite_functions(q - xs, cutoff)
    bra_rho_ket = np.einsum("nk,nm,mk->k", psi_plus, rho.elements, psi_minus)
    integrand = bra_rho_ket * np.exp(-2j * p * xs)
    value = np.trapezoid(integrand, xs) / math.pi
    return float(value.real)
