import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ksobs import kernels
from ksobs.dynamics import ModelParams, SimulationConfig, simulate
from ksobs.sensing import REFERENCE_EIGHTHS, sensor_points

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")

finite = st.floats(-1e3, 1e3)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 17, elements=finite), arrays(np.float64, 17, elements=st.floats(-1e4, 0.0)),
       st.floats(1e-5, 1e-2))
def test_imex_update_agrees(y, a, dt):
    F, F_old = np.sin(y), np.cos(y)
    np.testing.assert_allclose(
        kernels.imex_update_numba(y, a, F, F_old, dt),
        kernels.imex_update_numpy(y, a, F, F_old, dt),
        rtol=1e-14, atol=1e-12,
    )


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 33, elements=finite))
def test_densities_agree(u):
    dx = u[::-1].copy()
    assert np.allclose(kernels.flame_density_numba(dx, 0.3), kernels.flame_density_numpy(dx, 0.3), rtol=1e-15)
    assert np.allclose(kernels.fluid_density_numba(u, dx, 0.3), kernels.fluid_density_numpy(u, dx, 0.3), rtol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 8, 41])
def test_eval_series_agrees(n, rng):
    c = rng.standard_normal(n)
    x = rng.random(25)
    np.testing.assert_allclose(kernels.eval_series_numba(c, x), kernels.eval_series_numpy(c, x), atol=1e-11)


def test_backend_switching():
    start = kernels.BACKEND
    with kernels.use_backend("numpy"):
        assert kernels.BACKEND == "numpy"
        assert kernels.kernel("imex_update") is kernels.imex_update_numpy
    assert kernels.BACKEND == start
    with pytest.raises(ValueError):
        kernels.set_backend("cuda")


def test_simulation_identical_across_backends():
    cfg = SimulationConfig(ModelParams.standard("flame"), sensor_points(REFERENCE_EIGHTHS, 2),
                           N=32, grid_M=128, t_end=0.5)
    with kernels.use_backend("numpy"):
        a = simulate(cfg)
    with kernels.use_backend("numba"):
        b = simulate(cfg)
    np.testing.assert_allclose(a.norm_V, b.norm_V, rtol=1e-12)
