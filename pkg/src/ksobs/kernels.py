"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``KSOBS_DISABLE_NUMBA`` is unset (or ``0``).  Both implementations
are always importable as ``<name>_numpy`` / ``<name>_numba`` so tests and the
benchmark can compare them directly.

Fourier transforms stay in ``numpy.fft`` on both paths; numba has no FFT.
"""

from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("KSOBS_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")
HAVE_NUMBA = numba is not None


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)


# ---------------------------------------------------------------------------
# Crank-Nicolson / Adams-Bashforth update, per mode
# ---------------------------------------------------------------------------

def imex_update_numpy(y, a, F, F_old, dt):
    num = (1.0 + 0.5 * dt * a) * y + dt * (1.5 * F - 0.5 * F_old)
    return num / (1.0 - 0.5 * dt * a)


@_njit
def imex_update_numba(y, a, F, F_old, dt):
    out = np.empty_like(y)
    for n in range(y.shape[0]):
        h = 0.5 * dt * a[n]
        out[n] = ((1.0 + h) * y[n] + dt * (1.5 * F[n] - 0.5 * F_old[n])) / (1.0 - h)
    return out


# ---------------------------------------------------------------------------
# Pointwise nonlinear densities on the quadrature grid
# ---------------------------------------------------------------------------

def flame_density_numpy(dx, nu0):
    return 0.5 * nu0 * dx * dx


@_njit
def flame_density_numba(dx, nu0):
    out = np.empty_like(dx)
    for i in range(dx.shape[0]):
        out[i] = 0.5 * nu0 * dx[i] * dx[i]
    return out


def fluid_density_numpy(u, dx, nu0):
    return nu0 * u * dx


@_njit
def fluid_density_numba(u, dx, nu0):
    out = np.empty_like(u)
    for i in range(u.shape[0]):
        out[i] = nu0 * u[i] * dx[i]
    return out


# ---------------------------------------------------------------------------
# Direct evaluation of a trig series at arbitrary points
# ---------------------------------------------------------------------------

def eval_series_numpy(coeffs, x):
    n = coeffs.shape[0]
    j = np.arange(1, n + 1)
    freq = np.where(j % 2 == 1, j - 1, j) * np.pi
    phase = np.outer(x, freq)
    basis = np.where(j % 2 == 1, np.cos(phase), np.sin(phase))
    return basis @ coeffs


@_njit
def eval_series_numba(coeffs, x):
    # angle-addition recurrence: one sin/cos pair per point
    n = coeffs.shape[0]
    out = np.empty(x.shape[0])
    for p in range(x.shape[0]):
        th = 2.0 * np.pi * x[p]
        c1 = np.cos(th)
        s1 = np.sin(th)
        ck = 1.0
        sk = 0.0
        acc = coeffs[0]
        k = 1
        while 2 * k - 1 < n:
            ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
            acc += coeffs[2 * k - 1] * sk
            if 2 * k < n:
                acc += coeffs[2 * k] * ck
            k += 1
        out[p] = acc
    return out


_KERNELS = ("imex_update", "flame_density", "fluid_density", "eval_series")
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def _bind(backend):
    g = globals()
    for name in _KERNELS:
        g[name] = g[f"{name}_{backend}"]


def set_backend(backend):
    """Select ``"numba"`` or ``"numpy"`` for the unsuffixed kernel names."""
    global BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    BACKEND = backend
    _bind(backend)


@contextlib.contextmanager
def use_backend(backend):
    previous = BACKEND
    set_backend(backend)
    try:
        yield
    finally:
        set_backend(previous)


def kernel(name):
    """Late-bound lookup so callers follow :func:`set_backend` switches."""
    return globals()[name]


_bind(BACKEND)
