import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ksobs.errors import AliasingError, DomainError
from ksobs.spectral import (
    QuadratureGrid,
    SpectralState,
    derivative_matrix,
    derivative_on_grid,
    eigenfunction_value,
    evaluate_at,
    evaluate_on_grid,
    laplacian_eigenvalue,
    mode_frequency,
    norm,
    project,
    spectrum,
)

from conftest import brute_project, series

# mpmath, 30 digits: sqrt(1e-6 (4 pi^2 + 1)^2 / 2)
E2_V_NORM = 0.028622563579742066


def test_eigenfunction_values():
    assert eigenfunction_value(1, 0.3) == 1.0
    assert eigenfunction_value(2, 0.25) == pytest.approx(1.0)
    assert eigenfunction_value(3, 0.5) == pytest.approx(-1.0)
    assert eigenfunction_value(4, 0.125) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        eigenfunction_value(0, 0.1)


def test_laplacian_eigenvalues():
    assert laplacian_eigenvalue(1) == 0.0
    assert laplacian_eigenvalue(2) == pytest.approx(4 * np.pi**2)
    assert laplacian_eigenvalue(3) == pytest.approx(4 * np.pi**2)
    assert laplacian_eigenvalue(5) == pytest.approx(16 * np.pi**2)
    with pytest.raises(DomainError):
        laplacian_eigenvalue(0)
    assert list(mode_frequency(np.arange(1, 7))) == [0, 1, 1, 2, 2, 3]


def test_spectrum_table():
    t = spectrum(5, 1e-6)
    assert t.a0_eig[0] == 1.0
    assert t.a0_eig[1] == pytest.approx((4 * np.pi**2 + 1) ** 2)
    assert np.allclose(t.a_eig, 1e-6 * t.a0_eig)
    assert list(t.h_norm_sq) == [1.0, 0.5, 0.5, 0.5, 0.5]
    with pytest.raises(DomainError):
        spectrum(0)


def test_norms_of_basis_vectors():
    t = spectrum(4, 1e-6)
    e1 = SpectralState([1.0, 0, 0, 0])
    e2 = SpectralState([0, 1.0, 0, 0])
    assert norm(e1, "H", t) == 1.0
    assert norm(e2, "H", t) == pytest.approx(np.sqrt(0.5))
    assert norm(e2, "V", t) == pytest.approx(E2_V_NORM, rel=1e-12)
    assert norm(e2, "DA", t) == pytest.approx(1e-6 * (4 * np.pi**2 + 1) ** 2 * np.sqrt(0.5))
    with pytest.raises(DomainError):
        norm(e2, "W", t)
    with pytest.raises(DomainError):
        norm(SpectralState([1.0]), "H", t)


def test_h_norm_matches_quadrature(rng):
    c = rng.standard_normal(9)
    x = (np.arange(2000) + 0.5) / 2000
    direct = np.sqrt(np.mean(series(c, x) ** 2))
    assert norm(SpectralState(c), "H", spectrum(9)) == pytest.approx(direct, rel=1e-12)


def test_project_matches_brute_quadrature():
    f = lambda x: np.exp(np.sin(2 * np.pi * x)) + 0.3 * np.cos(6 * np.pi * x)
    grid = QuadratureGrid(256)
    got = project(f(grid.nodes), grid, 15).coeffs
    assert np.allclose(got, brute_project(f, 15), atol=1e-12)


def test_evaluate_on_grid_matches_direct_sum(rng):
    c = rng.standard_normal(11)
    grid = QuadratureGrid(64)
    assert np.allclose(evaluate_on_grid(c, grid), series(c, grid.nodes), atol=1e-12)
    x = rng.random(7)
    assert np.allclose(evaluate_at(SpectralState(c), x), series(c, x), atol=1e-12)


def test_derivative_on_grid_exact():
    grid = QuadratureGrid(32)
    c = np.zeros(6)
    c[3] = 1.0                           # sin(4 pi x)
    c[4] = 2.0                           # 2 cos(4 pi x)
    x = grid.nodes
    expected = 4 * np.pi * np.cos(4 * np.pi * x) - 8 * np.pi * np.sin(4 * np.pi * x)
    assert np.allclose(derivative_on_grid(c, grid), expected, atol=1e-11)


def test_derivative_matrix_agrees_with_grid_derivative(rng):
    N = 9
    c = rng.standard_normal(N)
    c[-1] = 0.0                          # top cosine has its sine partner outside the span
    grid = QuadratureGrid(64)
    via_matrix = evaluate_on_grid(derivative_matrix(N) @ c, grid)
    assert np.allclose(via_matrix, derivative_on_grid(c, grid), atol=1e-10)


def test_aliasing_guards():
    grid = QuadratureGrid(16)
    with pytest.raises(AliasingError):
        project(np.zeros(16), grid, 16)
    with pytest.raises(AliasingError):
        evaluate_on_grid(np.zeros(17), grid)
    with pytest.raises(DomainError):
        project(np.zeros(15), grid, 4)
    with pytest.raises(DomainError):
        QuadratureGrid(1)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-1e3, 1e3)))
def test_project_inverts_evaluate(c):
    grid = QuadratureGrid(128)
    back = project(evaluate_on_grid(c, grid), grid, c.shape[0]).coeffs
    assert np.allclose(back, c, atol=1e-9 * (1 + np.abs(c).max()))


def test_quadrature_exact_for_basis_pairs():
    grid = QuadratureGrid(64)
    x = grid.nodes
    for j in range(1, 32):
        for k in range(1, 32):
            if (j // 2) + (k // 2) >= 32:
                continue
            discrete = np.mean(eigenfunction_value(j, x) * eigenfunction_value(k, x))
            exact = (1.0 if j == 1 else 0.5) if j == k else 0.0
            assert abs(discrete - exact) < 1e-12


def test_evaluate_examples():
    assert np.allclose(evaluate_on_grid([1.0, 0, 0], QuadratureGrid(8)), 1.0)
    assert np.allclose(evaluate_on_grid([0.0, 1.0, 0.0], QuadratureGrid(4)), [0, 1, 0, -1], atol=1e-15)


def test_project_examples():
    grid = QuadratureGrid(64)
    x = grid.nodes
    e = lambda n: np.eye(10)[n - 1]
    assert np.allclose(project(np.sin(2 * np.pi * x), grid, 10).coeffs, e(2), atol=1e-14)
    assert np.allclose(project(1 + np.sin(4 * np.pi * x), grid, 10).coeffs, e(1) + e(4), atol=1e-14)
    sq = project(np.sin(2 * np.pi * x) ** 2, grid, 10).coeffs
    assert np.allclose(sq, 0.5 * e(1) - 0.5 * e(5), atol=1e-14)
    assert np.allclose(sq, brute_project(lambda t: np.sin(2 * np.pi * t) ** 2, 10), atol=1e-12)


def test_parity_table_up_to_64():
    tab = spectrum(64)
    for k in range(1, 65):
        expected = 4 * np.pi**2 * ((k - 1) / 2) ** 2 if k % 2 else 4 * np.pi**2 * (k / 2) ** 2
        assert tab.lap_eig[k - 1] == pytest.approx(expected, abs=1e-9)
        assert laplacian_eigenvalue(k) == pytest.approx(expected, abs=1e-9)
    assert np.all(tab.a0_eig[1:] > 1.0) and tab.a0_eig[0] == 1.0


def test_zero_state_norms():
    t = spectrum(6, 1e-6)
    for kind in ("H", "V", "DA"):
        assert norm(np.zeros(6), kind, t) == 0.0


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 12, elements=st.floats(-1e3, 1e3)), st.floats(1e-8, 1e2))
def test_norm_ordering(c, nu2):
    t = spectrum(12, nu2)
    h, v, da = (norm(c, k, t) ** 2 for k in ("H", "V", "DA"))
    assert v >= nu2 * h * (1 - 1e-12)
    assert da >= nu2 * v * (1 - 1e-12)
