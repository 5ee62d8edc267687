"""Periodic trigonometric eigenbasis on the unit torus [0, 1).

Mode ``j`` (1-based) is ``cos((j-1) pi x)`` for odd ``j`` and ``sin(j pi x)``
for even ``j``; both have angular frequency ``2 pi k`` with ``k = j // 2``.
The basis is not normalized: ``||e_1||_H^2 = 1`` and ``||e_j||_H^2 = 1/2``
otherwise.  Coefficient vectors in this module are 0-based arrays, entry
``n - 1`` holding the coordinate of ``e_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AliasingError, DomainError

NORM_KINDS = ("H", "V", "DA")


def _check_mode(j):
    if int(j) != j or j < 1:
        raise DomainError(f"mode index must be an integer >= 1, got {j!r}")


def mode_frequency(j):
    """Integer frequency ``k`` such that ``e_j`` oscillates like ``2 pi k x``."""
    j = np.asarray(j)
    return j // 2


def eigenfunction_value(j, x):
    _check_mode(j)
    if j % 2 == 1:
        return np.cos((j - 1) * np.pi * x)
    return np.sin(j * np.pi * x)


def laplacian_eigenvalue(j):
    _check_mode(j)
    return float((2.0 * np.pi * (j // 2)) ** 2)


def basis_h_norm_sq(N):
    h = np.full(N, 0.5)
    h[0] = 1.0
    return h


@dataclass(frozen=True)
class SpectrumTable:
    """Laplacian and ``A_0 = (-Delta + 1)^2`` spectra for the first ``N`` modes."""

    N: int
    nu2: float
    lap_eig: np.ndarray = field(repr=False)
    a0_eig: np.ndarray = field(repr=False)

    @property
    def h_norm_sq(self):
        return basis_h_norm_sq(self.N)

    @property
    def a_eig(self):
        """Eigenvalues of ``A = nu2 * A_0``."""
        return self.nu2 * self.a0_eig


def spectrum(N, nu2=1.0):
    if N < 1:
        raise DomainError(f"mode count must be positive, got {N}")
    k = np.arange(1, N + 1) // 2
    lap = (2.0 * np.pi * k) ** 2
    return SpectrumTable(N=N, nu2=float(nu2), lap_eig=lap, a0_eig=(lap + 1.0) ** 2)


@dataclass
class SpectralState:
    coeffs: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)

    @property
    def N(self):
        return self.coeffs.shape[0]


def _coeffs(state):
    return np.asarray(getattr(state, "coeffs", state), dtype=float)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform periodic grid ``x_i = (i - 1) / M`` with weights ``1 / M``."""

    M: int

    def __post_init__(self):
        if self.M < 2:
            raise DomainError(f"grid needs at least 2 nodes, got {self.M}")

    @property
    def nodes(self):
        return np.arange(self.M) / self.M

    @property
    def weights(self):
        return np.full(self.M, 1.0 / self.M)


# -- coefficient <-> half-spectrum (numpy.fft.rfft layout) -------------------

def _to_rfft(c, M, deriv=0):
    N = c.shape[0]
    if N // 2 >= M / 2:
        raise AliasingError(f"{N} modes cannot be represented on {M} nodes")
    X = np.zeros(M // 2 + 1, dtype=complex)
    X[0] = c[0]
    if N > 1:
        kmax = N // 2
        ks = np.arange(1, kmax + 1)
        sin_c = c[1::2][:kmax]                  # e_{2k}
        cos_c = np.zeros(kmax)
        tail = c[2::2]                          # e_{2k+1}
        cos_c[: tail.shape[0]] = tail
        X[1 : kmax + 1] = 0.5 * (cos_c - 1j * sin_c)
        if deriv:
            X[1 : kmax + 1] *= (2j * np.pi * ks) ** deriv
    if deriv:
        X[0] = 0.0
    return X * M


def _from_rfft(X, M, N):
    X = X / M
    c = np.empty(N)
    c[0] = X[0].real
    kmax = N // 2
    ks = np.arange(1, kmax + 1)
    c[1::2] = -2.0 * X[ks].imag[: c[1::2].shape[0]]
    c[2::2] = 2.0 * X[ks].real[: c[2::2].shape[0]]
    return c


def evaluate_on_grid(state, grid):
    """Sample ``sum_n coeffs[n] e_n`` at the grid nodes."""
    c = _coeffs(state)
    return np.fft.irfft(_to_rfft(c, grid.M), n=grid.M)


def derivative_on_grid(state, grid):
    """Exact x-derivative of the series, sampled at the grid nodes."""
    c = _coeffs(state)
    return np.fft.irfft(_to_rfft(c, grid.M, deriv=1), n=grid.M)


def project(samples, grid, N):
    """Quadrature L2 projection of grid samples onto ``span{e_1..e_N}``.

    ``coeffs[n] = (sum_i samples[i] e_n(x_i) / M) / ||e_n||_H^2``, evaluated
    with a real FFT.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.M,):
        raise DomainError(f"expected {grid.M} samples, got shape {samples.shape}")
    if grid.M <= N:
        raise AliasingError(f"grid of {grid.M} nodes aliases {N} modes (need M > N)")
    return SpectralState(_from_rfft(np.fft.rfft(samples), grid.M, N))


def evaluate_at(state, x):
    """Evaluate the series at arbitrary torus points (direct summation)."""
    c = _coeffs(state)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return kernels.kernel("eval_series")(c, x)


def derivative_matrix(N):
    """Matrix of d/dx restricted to ``span{e_1..e_N}`` (top cosine partner dropped)."""
    D = np.zeros((N, N))
    for j in range(2, N + 1):
        k = j // 2
        w = 2.0 * np.pi * k
        if j % 2 == 1:
            D[2 * k - 1, j - 1] = -w            # cos -> -sin
        elif 2 * k + 1 <= N:
            D[2 * k, j - 1] = w                 # sin -> cos
    return D


def norm(state, kind, table):
    c = _coeffs(state)
    if c.shape[0] != table.N:
        raise DomainError(f"state has {c.shape[0]} modes, table has {table.N}")
    w = c * c * table.h_norm_sq
    if kind == "H":
        return float(np.sqrt(w.sum()))
    if kind == "V":
        return float(np.sqrt(table.nu2 * (table.a0_eig * w).sum()))
    if kind == "DA":
        return float(np.sqrt(table.nu2 ** 2 * (table.a0_eig ** 2 * w).sum()))
    raise DomainError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
