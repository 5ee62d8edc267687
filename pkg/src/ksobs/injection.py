"""Output injection ``-lambda A^{-1} Z_S^* Lambda`` in Galerkin coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, DomainError
from .sensing import OutputMatrices, leading_block
from .spectral import basis_h_norm_sq

COND_LIMIT = 1e12


def _sym_eigmin(Eu, Du):
    """Smallest eigenvalue of ``Lbar + Lbar^T``, accurate relative to itself.

    ``Lbar + Lbar^T = Eu^{-T} C Eu^{-1}`` with ``C = Du G + G Du`` and
    ``G = Eu^T Eu``.  Writing ``C = Du^{1/2} K Du^{1/2}`` keeps ``K`` well
    conditioned for the graded ``Du``, so the inverse
    ``F K^{-1} F^T`` (``F = Eu Du^{-1/2}``) is formed without the
    ``eps * alpha_max`` absolute error a dense eigensolver would put on
    the bottom of the spectrum.  Returns ``nan`` when the symmetric part
    is not positive definite.
    """
    r = np.sqrt(Du)
    G = Eu.T @ Eu
    K = (Du[:, None] + Du[None, :]) / (r[:, None] * r[None, :]) * G
    F = Eu / r[None, :]
    Minv = F @ np.linalg.solve(K, F.T)
    ev = np.linalg.eigvalsh(0.5 * (Minv + Minv.T))
    if not ev[0] > 0:
        return float("nan")
    return 1.0 / ev[-1]


def build_lambda(matrices, S_sigma=None, cond_limit=COND_LIMIT):
    """Weighting matrix ``Lambda`` and the applied scale ``1 / eigmin``.

    ``Lambda_bar = Eu^{-T} Du Eu^T`` with ``Eu`` the leading square block of
    the plain output matrix and ``Du`` the matching ``alpha`` block;
    ``Lambda = Lambda_bar / eigmin(Lambda_bar + Lambda_bar^T)``.

    Returns ``(Lambda, scale, Lambda_bar)``.
    """
    n = matrices.S_sigma if S_sigma is None else S_sigma
    if n != matrices.S_sigma:
        raise DomainError(f"S_sigma={n} does not match {matrices.S_sigma} sensors")
    Eu = leading_block(matrices)
    cond = np.linalg.cond(Eu)
    if not np.isfinite(cond) or cond > cond_limit:
        raise ConstructionError(
            f"leading {n}x{n} eigenbasis block has condition number {cond:.3g} > {cond_limit:.0e}; "
            "sensor set is numerically inadmissible for this basis ordering"
        )
    Du = matrices.D_alpha[:n]
    Lbar = np.linalg.solve(Eu.T, Du[:, None] * Eu.T)
    eigmin = _sym_eigmin(Eu, Du)
    if not eigmin > 0:
        raise ConstructionError("Lambda_bar + Lambda_bar^T is not positive definite")
    scale = 1.0 / eigmin
    return Lbar * scale, scale, Lbar


def sym_part_extremes(matrices, scale=1.0):
    """``(eigmin, eigmax)`` of ``scale * (Lambda_bar + Lambda_bar^T)``.

    The bottom comes from :func:`_sym_eigmin`; the top from a dense solve,
    which is already accurate relative to the largest eigenvalue.
    """
    n = matrices.S_sigma
    Eu = leading_block(matrices)
    Du = matrices.D_alpha[:n]
    Lbar = np.linalg.solve(Eu.T, Du[:, None] * Eu.T)
    top = np.linalg.eigvalsh(Lbar + Lbar.T)[-1]
    return scale * _sym_eigmin(Eu, Du), scale * float(top)


def _gain_matrix(matrices, scale):
    """``D_alpha^{-1} E^T Lambda`` with the leading block taken exactly.

    ``E^T Eu^{-T} = (Eu^{-1} E)^T`` and ``Eu^{-1} E = [I | Eu^{-1} E_rest]``,
    so the first ``S_sigma`` rows reduce to ``scale * Eu^T`` without
    round-off amplified by ``alpha_max / alpha_1``.
    """
    n, N = matrices.S_sigma, matrices.N
    Eu = leading_block(matrices)
    Du = matrices.D_alpha[:n]
    W = np.zeros((N, n))
    W[:n] = np.eye(n)
    if N > n:
        W[n:] = np.linalg.solve(Eu, matrices.E_plain[:, n:]).T
    W = W * Du[None, :] / matrices.D_alpha[:, None]
    return scale * (W @ Eu.T)


@dataclass(frozen=True)
class InjectionOperator:
    """Built injection operator.

    ``exact_projection=False`` uses the coordinate formula
    ``I = -(lambda/nu2) D_alpha^{-1} E^T Lambda omega``.  With ``True`` each
    coordinate is further divided by ``||e_n||_H^2``, which gives the exact
    H-orthogonal Galerkin coordinates of ``-lambda A^{-1} Z_S^* Lambda omega``
    for the unnormalized basis.

    ``factored=True`` asserts that ``Lambda`` is ``scale * Lambda_bar`` from
    :func:`build_lambda`; the gain is then assembled from the exact
    leading-block factorization instead of the dense product.
    """

    lambda_gain: float
    Lambda: np.ndarray = field(repr=False)
    scale: float
    matrices: OutputMatrices = field(repr=False)
    nu2: float
    exact_projection: bool = False
    factored: bool = False
    gain: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.lambda_gain < 0:
            raise DomainError(f"gain must be nonnegative, got {self.lambda_gain}")
        m = self.matrices
        if self.factored:
            G = _gain_matrix(m, self.scale)
        else:
            G = (m.E_plain.T / m.D_alpha[:, None]) @ self.Lambda
        G = -(self.lambda_gain / self.nu2) * G
        if self.exact_projection:
            G = G / basis_h_norm_sq(m.N)[:, None]
        object.__setattr__(self, "gain", G)

    @property
    def S_sigma(self):
        return self.Lambda.shape[0]

    @property
    def N(self):
        return self.matrices.N

    def with_gain(self, lambda_gain):
        return InjectionOperator(
            lambda_gain, self.Lambda, self.scale, self.matrices, self.nu2, self.exact_projection, self.factored
        )


def build_injection(matrices, lambda_gain, nu2, exact_projection=False, cond_limit=COND_LIMIT):
    Lam, scale, _ = build_lambda(matrices, cond_limit=cond_limit)
    return InjectionOperator(float(lambda_gain), Lam, scale, matrices, float(nu2), exact_projection, factored=True)


def injection_coefficients(op, omega):
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (op.S_sigma,):
        raise DomainError(f"output error must have length {op.S_sigma}, got shape {omega.shape}")
    return op.gain @ omega


def monotonicity_check(op, omega):
    """``omega^T Lambda omega - |omega|^2 / 2``; nonnegative up to rounding."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (op.S_sigma,):
        raise DomainError(f"output error must have length {op.S_sigma}, got shape {omega.shape}")
    return float(omega @ op.Lambda @ omega - 0.5 * omega @ omega)
