"""Galerkin Kuramoto-Sivashinsky dynamics, observer coupling and IMEX stepping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BlowUpError, DomainError, StepSizeError
from .sensing import SensorSet, output_matrices
from .spectral import (
    QuadratureGrid,
    SpectralState,
    _from_rfft,
    _to_rfft,
    project,
    spectrum,
)

VARIANTS = ("flame", "fluid")
BLOWUP_THRESHOLD = 1e12


@dataclass(frozen=True)
class ModelParams:
    nu2: float = 1e-6
    nu1: float = 1e-2
    nu0: float = 1e-2
    variant: str = "flame"

    def __post_init__(self):
        for name in ("nu2", "nu1", "nu0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @classmethod
    def standard(cls, variant="flame"):
        return cls(nu2=1e-6, nu1=1e-2, nu0=1e-2 if variant == "flame" else 1.0, variant=variant)


def linear_coefficient(n, params):
    """Growth rate ``-nu2 abar_n^2 + nu1 abar_n`` of mode ``n`` (scalar or array)."""
    n = np.asarray(n)
    if np.any(n < 1):
        raise DomainError("mode index must be >= 1")
    lap = (2.0 * np.pi * (n // 2)) ** 2
    out = -params.nu2 * lap**2 + params.nu1 * lap
    return float(out) if out.ndim == 0 else out


def unstable_mode_count(params, N):
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    return int(np.count_nonzero(linear_coefficient(np.arange(1, N + 1), params) >= 0))


def _check_dealiased(N, grid):
    if grid.M < 4 * N:
        raise DomainError(f"grid of {grid.M} nodes is not dealiased for {N} modes (need M >= 4N)")


def flame_nonlinearity(state, grid, params):
    """Galerkin coordinates of ``nu0 |dy/dx|^2 / 2``."""
    c = np.asarray(getattr(state, "coeffs", state), dtype=float)
    _check_dealiased(c.shape[0], grid)
    dx = np.fft.irfft(_to_rfft(c, grid.M, deriv=1), n=grid.M)
    dens = kernels.kernel("flame_density")(dx, params.nu0)
    return SpectralState(_from_rfft(np.fft.rfft(dens), grid.M, c.shape[0]))


def fluid_nonlinearity(state, grid, params):
    """Galerkin coordinates of ``nu0 y dy/dx``."""
    c = np.asarray(getattr(state, "coeffs", state), dtype=float)
    _check_dealiased(c.shape[0], grid)
    u = np.fft.irfft(_to_rfft(c, grid.M), n=grid.M)
    dx = np.fft.irfft(_to_rfft(c, grid.M, deriv=1), n=grid.M)
    dens = kernels.kernel("fluid_density")(u, dx, params.nu0)
    return SpectralState(_from_rfft(np.fft.rfft(dens), grid.M, c.shape[0]))


def nonlinearity(state, grid, params):
    if params.variant == "flame":
        return flame_nonlinearity(state, grid, params)
    return fluid_nonlinearity(state, grid, params)


def imex_step(y, F, F_old, dt, a):
    """Crank-Nicolson on ``a * y`` plus Adams-Bashforth-2 on ``F``.

    ``y_new (1 - dt a / 2) = y (1 + dt a / 2) + dt (3/2 F - 1/2 F_old)``.
    Passing ``F_old = F`` gives the explicit-Euler bootstrap step.
    """
    y = np.asarray(y, dtype=float)
    a = np.broadcast_to(np.asarray(a, dtype=float), y.shape)
    if np.any(1.0 - 0.5 * dt * a == 0.0):
        raise StepSizeError(f"implicit factor vanishes for dt={dt}")
    return kernels.kernel("imex_update")(
        np.ascontiguousarray(y),
        np.ascontiguousarray(a),
        np.asarray(F, dtype=float),
        np.asarray(F_old, dtype=float),
        float(dt),
    )


def standard_initial_states(N, grid):
    """Nominal ``1 + sin(4 pi x)`` and estimate ``cos(2 pi x)(1 + sin(2 pi x))``."""
    x = grid.nodes
    yr = project(1.0 + np.sin(4 * np.pi * x), grid, N)
    ye = project(np.cos(2 * np.pi * x) * (1.0 + np.sin(2 * np.pi * x)), grid, N)
    return yr, ye


@dataclass
class SimulationConfig:
    params: ModelParams
    sensors: SensorSet
    N: int = 200
    dt: float = 1e-3
    t_end: float = 20.0
    grid_M: int = 2048
    lambda_gain: float = 0.0
    initial_nominal: SpectralState | None = None
    initial_estimate: SpectralState | None = None
    keep_states: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.N < 1 or 4 * self.N > self.grid_M:
            raise DomainError(f"need 1 <= N <= grid_M / 4, got N={self.N}, grid_M={self.grid_M}")
        if self.t_end < self.dt:
            raise DomainError(f"t_end={self.t_end} is shorter than one step")

    @property
    def steps(self):
        return int(np.floor(self.t_end / self.dt + 1e-9))

    @property
    def grid(self):
        return QuadratureGrid(self.grid_M)

    def initial_states(self):
        if self.initial_nominal is None or self.initial_estimate is None:
            yr, ye = standard_initial_states(self.N, self.grid)
        yr = self.initial_nominal if self.initial_nominal is not None else yr
        ye = self.initial_estimate if self.initial_estimate is not None else ye
        for s in (yr, ye):
            if s.N != self.N:
                raise DomainError(f"initial state has {s.N} modes, config has N={self.N}")
        return yr, ye


@dataclass
class TimeSeries:
    t: np.ndarray
    norm_H: np.ndarray
    norm_V: np.ndarray
    out_err: np.ndarray
    nominal: np.ndarray | None = field(default=None, repr=False)
    estimate: np.ndarray | None = field(default=None, repr=False)
    nu2: float = 1.0

    def __len__(self):
        return self.t.shape[0]

    def truncated(self, count):
        cut = lambda a: None if a is None else a[:count].copy()
        return TimeSeries(
            self.t[:count].copy(), self.norm_H[:count].copy(), self.norm_V[:count].copy(),
            self.out_err[:count].copy(), cut(self.nominal), cut(self.estimate), self.nu2,
        )

    @classmethod
    def empty(cls, S_sigma=0, nu2=1.0):
        z = np.zeros(0)
        return cls(z, z.copy(), z.copy(), np.zeros((0, S_sigma)), None, None, nu2)


def simulate(config, injection=None):
    """Co-evolve nominal state and observer estimate; record the error each step.

    ``config.lambda_gain`` overrides the gain stored in ``injection`` (its
    ``Lambda`` is reused).

    The nominal system has no injection.  The observer's explicit term is its
    nonlinearity plus the injection driven by the output error
    ``measure(estimate) - measure(nominal)``.
    """
    p = config.params
    N, dt, grid = config.N, config.dt, config.grid
    if injection is None:
        matrices = output_matrices(config.sensors, spectrum(N, p.nu2))
        G = None
    else:
        if injection.N != N:
            raise DomainError(f"injection built for N={injection.N}, config has N={N}")
        if not np.array_equal(injection.matrices.sensors.points, config.sensors.points):
            raise DomainError("injection operator was built for a different sensor set")
        if injection.lambda_gain != config.lambda_gain:
            injection = injection.with_gain(config.lambda_gain)
        matrices = injection.matrices
        G = injection.gain if injection.lambda_gain != 0.0 else None
    E = matrices.E_plain

    table = spectrum(N, p.nu2)
    h = table.h_norm_sq
    wV = p.nu2 * table.a0_eig * h
    a = linear_coefficient(np.arange(1, N + 1), p)
    if np.any(1.0 - 0.5 * dt * a == 0.0):
        raise StepSizeError(f"implicit factor vanishes for dt={dt}")
    step = kernels.kernel("imex_update")
    nl = flame_nonlinearity if p.variant == "flame" else fluid_nonlinearity

    def explicit(y, omega):
        F = -nl(y, grid, p).coeffs
        if G is not None:
            F += G @ omega
        return F

    yr0, ye0 = config.initial_states()
    yr = yr0.coeffs.copy()
    ye = ye0.coeffs.copy()

    K = config.steps + 1
    S = E.shape[0]
    ts = TimeSeries(
        t=np.arange(K) * dt,
        norm_H=np.empty(K),
        norm_V=np.empty(K),
        out_err=np.empty((K, S)),
        nominal=np.empty((K, N)) if config.keep_states else None,
        estimate=np.empty((K, N)) if config.keep_states else None,
        nu2=p.nu2,
    )

    def record(k, yr, ye, omega):
        z = ye - yr
        z2 = z * z
        ts.norm_H[k] = np.sqrt(np.dot(z2, h))
        ts.norm_V[k] = np.sqrt(np.dot(z2, wV))
        ts.out_err[k] = omega
        if config.keep_states:
            ts.nominal[k] = yr
            ts.estimate[k] = ye

    omega = E @ (ye - yr)
    record(0, yr, ye, omega)
    Fr_old = -nl(yr, grid, p).coeffs
    Fe_old = explicit(ye, omega)
    Fr, Fe = Fr_old, Fe_old
    for k in range(1, K):
        yr = step(yr, a, Fr, Fr_old, dt)
        ye = step(ye, a, Fe, Fe_old, dt)
        big = max(np.abs(yr).max(), np.abs(ye).max())
        if not np.isfinite(big) or big > BLOWUP_THRESHOLD:
            raise BlowUpError(k * dt, float(big), ts.truncated(k))
        omega = E @ (ye - yr)
        record(k, yr, ye, omega)
        if k + 1 < K:
            Fr_old, Fe_old = Fr, Fe
            Fr = -nl(yr, grid, p).coeffs
            Fe = explicit(ye, omega)
    return ts
