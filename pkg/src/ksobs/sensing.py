"""Point sensors: placement, admissibility, output matrices and constants."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConstructionError, DomainError, RangeError
from .spectral import basis_h_norm_sq, eigenfunction_value, evaluate_at, spectrum

CUBIC_DEGREE = 3
_INT64_MAX = 2**63 - 1

REFERENCE_QUARTERS = (0.0, 0.25, 0.5, 0.75)
REFERENCE_EIGHTHS = (0.125, 0.375, 0.625, 0.875)


def monomial_count(m, p):
    """Number of monomials in ``m`` variables with total degree at most ``p``."""
    if m < 1 or p < 0:
        raise DomainError(f"need m >= 1 and p >= 0, got m={m}, p={p}")
    n = math.comb(m + p, p)
    if n > _INT64_MAX:
        raise RangeError(f"monomial count for m={m}, p={p} exceeds 64-bit range")
    return n


def monomial_exponents(d, p=CUBIC_DEGREE):
    """Exponent tuples of the monomials of degree <= p, ordered by total degree."""
    out = []
    for total in range(p + 1):
        for kappa in itertools.product(range(total + 1), repeat=d):
            if sum(kappa) == total:
                out.append(kappa)
    return out


@dataclass(frozen=True)
class ReferenceSet:
    points: tuple
    d: int = 1

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.d}")
        pts = tuple(float(x) for x in self.points) if self.d == 1 else tuple(tuple(map(float, x)) for x in self.points)
        object.__setattr__(self, "points", pts)

    def as_array(self):
        return np.asarray(self.points, dtype=float).reshape(len(self.points), self.d)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    rank: int
    size: int
    matrix: np.ndarray = field(repr=False)

    @property
    def verdict(self):
        return "admissible" if self.admissible else "rank-deficient"


def validate_reference_set(ref, rtol=1e-10):
    """Rank test of the cubic-monomial evaluation matrix at the reference points."""
    expected = monomial_count(ref.d, CUBIC_DEGREE)
    if len(ref.points) != expected:
        raise DomainError(f"d={ref.d} reference set needs {expected} points, got {len(ref.points)}")
    X = ref.as_array()
    exps = monomial_exponents(ref.d)
    MM = np.array([[np.prod(x ** np.array(k)) for k in exps] for x in X])
    tol = rtol * np.linalg.norm(MM, axis=1).max()
    _, R, _ = scipy.linalg.qr(MM, pivoting=True)
    rank = int(np.sum(np.abs(np.diag(R)) > tol))
    return AdmissibilityReport(admissible=rank == expected, rank=rank, size=expected, matrix=MM)


@dataclass(frozen=True)
class SensorSet:
    """Ordered sensor locations on the 1-D torus."""

    points: np.ndarray
    S: int = 1
    reference: tuple | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("sensor points must be a nonempty 1-D list")
        if np.any(pts < 0) or np.any(pts >= 1):
            raise DomainError("sensor points must lie in [0, 1)")
        if np.unique(pts).size != pts.size:
            raise DomainError("sensor points must be pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def S_sigma(self):
        return self.points.shape[0]

    def subset(self, idx):
        return SensorSet(self.points[list(idx)], S=self.S, reference=None)


def sensor_points(ref, S):
    """Tile ``S`` rescaled copies of the reference set over the torus."""
    if S < 1:
        raise DomainError(f"refinement level must be >= 1, got {S}")
    if isinstance(ref, ReferenceSet):
        if ref.d != 1:
            raise DomainError("sensor placement is implemented for d = 1")
        base = np.asarray(ref.points)
    else:
        base = np.asarray(ref, dtype=float)
    k = np.arange(S)[:, None]
    pts = (k + base[None, :]) / S
    return SensorSet(pts.ravel(), S=S, reference=tuple(base.tolist()))


def measure(state, sensors, matrices=None):
    """Output vector ``w_j = y(x_j)``; uses the output matrix when supplied."""
    if matrices is not None:
        return matrices.E_plain @ np.asarray(getattr(state, "coeffs", state), dtype=float)
    return evaluate_at(state, sensors.points)


@dataclass(frozen=True)
class OutputMatrices:
    E_plain: np.ndarray
    E_weighted: np.ndarray
    D_alpha: np.ndarray
    sensors: SensorSet

    @property
    def N(self):
        return self.E_plain.shape[1]

    @property
    def S_sigma(self):
        return self.E_plain.shape[0]


def output_matrices(sensors, table):
    x = sensors.points
    E = np.column_stack([eigenfunction_value(c, x) for c in range(1, table.N + 1)])
    alpha = table.a0_eig
    return OutputMatrices(E_plain=E, E_weighted=E / alpha[None, :], D_alpha=alpha.copy(), sensors=sensors)


def export_matrix_csv(matrix, path):
    """Row-major ``r,c,value`` dump with 1-based indices."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "c", "value"])
        for (r, c), v in np.ndenumerate(np.asarray(matrix)):
            w.writerow([r + 1, c + 1, f"{v:.17g}"])


# ---------------------------------------------------------------------------
# Oblique projection and constants
# ---------------------------------------------------------------------------

def leading_block(matrices):
    """Square block of ``E_plain`` over the first ``S_sigma`` modes."""
    n = matrices.S_sigma
    if matrices.N < n:
        raise DomainError(f"need at least {n} modes, have {matrices.N}")
    return matrices.E_plain[:, :n]


def oblique_projection(matrices):
    """Coefficient-space matrix of ``h -> Psi Efrak^{-1} Z_S h``.

    Projects onto the first ``S_sigma`` modes along the kernel of the output
    map, restricted to ``span{e_1..e_N}``.
    """
    n = matrices.S_sigma
    B = leading_block(matrices)
    if np.linalg.cond(B) > 1e12:
        raise ConstructionError("leading eigenbasis block is singular at these sensors")
    P = np.zeros((matrices.N, matrices.N))
    P[:n, :] = np.linalg.solve(B, matrices.E_plain)
    return P


def cps_closed_form(S, nu2):
    return nu2 * (16.0 * S * S * np.pi**2 + 1.0) ** 2 * (2.0 * S) ** -0.5


def sensor_gram(sensors):
    """``Efrak^T Efrak`` over the first ``4S`` modes (mode-by-mode Gram matrix)."""
    n = sensors.S_sigma
    E = np.column_stack([eigenfunction_value(j, sensors.points) for j in range(1, n + 1)])
    return E.T @ E


def cps_numeric(sensors, table):
    """Norm of the oblique projection, D(A) norm over the Euclidean output norm.

    Builds ``Efrak`` with columns rescaled by ``||e_j||_{D(A)}^{-1}`` and
    returns the square root of the largest eigenvalue of
    ``Efrak_bar^{-T} Efrak_bar^{-1}``.
    """
    n = sensors.S_sigma
    if table.N < n:
        raise DomainError(f"need at least {n} modes, have {table.N}")
    E = np.column_stack([eigenfunction_value(j, sensors.points) for j in range(1, n + 1)])
    if np.linalg.cond(E) > 1e12:
        raise ConstructionError("sensor matrix is singular; sensor set is inadmissible")
    da_norm = table.nu2 * table.a0_eig[:n] * np.sqrt(table.h_norm_sq[:n])
    Ebar = E / da_norm[None, :]
    Einv = np.linalg.inv(Ebar)
    Pi_bar = Einv.T @ Einv
    return float(np.sqrt(np.linalg.eigvalsh(0.5 * (Pi_bar + Pi_bar.T))[-1]))


def poincare_estimate(sensors, N, table):
    """Smallest Rayleigh quotient ``||v||_{D(A)}^2 / ||v||_V^2`` over the sensor kernel.

    Galerkin truncation to ``span{e_1..e_N}``; an upper estimate of the
    infinite-dimensional infimum.
    """
    if table.N < N:
        raise DomainError(f"table has {table.N} modes, need {N}")
    if N <= sensors.S_sigma:
        raise DomainError(f"kernel is trivial: N={N} <= S_sigma={sensors.S_sigma}")
    tab = table if table.N == N else spectrum(N, table.nu2)
    E = np.column_stack([eigenfunction_value(c, sensors.points) for c in range(1, N + 1)])
    Q = scipy.linalg.null_space(E)
    if Q.shape[1] == 0:
        raise DomainError("sensor kernel is empty")
    h = basis_h_norm_sq(N)
    da = tab.nu2**2 * tab.a0_eig**2 * h
    v = tab.nu2 * tab.a0_eig * h
    Ka = Q.T @ (da[:, None] * Q)
    Kv = Q.T @ (v[:, None] * Q)
    return float(scipy.linalg.eigh(Ka, Kv, eigvals_only=True, subset_by_index=[0, 0])[0])
