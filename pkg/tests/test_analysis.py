import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksobs.analysis import (
    default_window,
    error_norm_series,
    export_csv,
    fit_decay_rate,
    read_csv,
    write_summary,
)
from ksobs.dynamics import ModelParams, SimulationConfig, TimeSeries, simulate
from ksobs.errors import DomainError, KSObsError
from ksobs.injection import build_injection
from ksobs.sensing import REFERENCE_EIGHTHS, output_matrices, sensor_points
from ksobs.spectral import spectrum

T = np.linspace(0.0, 5.0, 501)


def test_exact_exponential_fit():
    fit = fit_decay_rate(T, 3.0 * np.exp(-2.0 * T))
    assert fit.rate == pytest.approx(2.0, abs=1e-9)
    assert fit.rsq == 1.0
    assert fit.window == default_window(T) == (2.5, 5.0)
    assert fit.transient == pytest.approx(1.0)
    assert fit.decaying


def test_constant_series_has_zero_rate():
    fit = fit_decay_rate(T, np.full_like(T, 7.0))
    assert fit.rate == pytest.approx(0.0, abs=1e-12)
    assert not fit.decaying


def test_perturbed_exponential_fit():
    fit = fit_decay_rate(T, 3.0 * np.exp(-2.0 * T) * (1 + 0.01 * np.sin(T)), window=(0.0, 5.0))
    assert fit.rate == pytest.approx(2.0, abs=0.02)
    assert 0.0 <= fit.rsq <= 1.0


def test_transient_bound_detects_hump():
    y = np.exp(-T) * (1 + 2 * np.exp(-((T - 1) ** 2) * 20))
    assert fit_decay_rate(T, y, window=(0.0, 5.0)).transient > 1.5


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(-3.0, 3.0))
def test_fit_is_scale_invariant(scale, mu):
    y = np.exp(-mu * T) * (1 + 0.05 * np.cos(3 * T))
    a = fit_decay_rate(T, y)
    b = fit_decay_rate(T, scale * y)
    assert b.rate == pytest.approx(a.rate, abs=1e-9)
    assert b.intercept - a.intercept == pytest.approx(np.log(scale), abs=1e-9)


def test_fit_rejects_bad_windows():
    y = np.exp(-T)
    y[400] = 0.0
    with pytest.raises(DomainError, match="nonpositive"):
        fit_decay_rate(T, y)
    assert fit_decay_rate(T, y, window=(0.0, 3.9)).rate == pytest.approx(1.0)
    with pytest.raises(DomainError, match="samples"):
        fit_decay_rate(T, np.exp(-T), window=(0.0, 0.05))
    with pytest.raises(DomainError):
        fit_decay_rate(T, np.exp(-T)[:-1])


def _short_run(lam=0.0, same=False, t_end=0.3):
    p = ModelParams.standard("flame")
    s = sensor_points(REFERENCE_EIGHTHS, 2)
    cfg = SimulationConfig(p, s, N=32, grid_M=128, t_end=t_end, lambda_gain=lam)
    if same:
        cfg.initial_estimate = cfg.initial_states()[0]
    inj = build_injection(output_matrices(s, spectrum(32, p.nu2)), lam, p.nu2) if lam else None
    return simulate(cfg, inj)


def test_error_norm_series():
    ts = _short_run()
    t, n = error_norm_series(ts, "V")
    assert len(t) == len(n) == 301
    assert np.array_equal(error_norm_series(ts, "H")[1], ts.norm_H)
    assert not error_norm_series(_short_run(same=True), "H")[1].any()
    with pytest.raises(DomainError):
        error_norm_series(ts, "DA")


def test_csv_round_trip(tmp_path):
    ts = _short_run()
    path = export_csv(ts, tmp_path / "run.csv")
    header, data = read_csv(path)
    assert header[:3] == ["t", "norm_H", "norm_V"] and header[-1] == "out_err_8"
    assert len(path.read_text().splitlines()) == len(ts) + 1
    assert np.array_equal(data[:, 2], ts.norm_V)
    assert np.array_equal(data[:, 3:], ts.out_err)


def test_csv_empty_series(tmp_path):
    path = export_csv(TimeSeries.empty(4), tmp_path / "e.csv")
    assert path.read_text() == "t,norm_H,norm_V,out_err_1,out_err_2,out_err_3,out_err_4\n"


def test_csv_unwritable_path(tmp_path):
    with pytest.raises(KSObsError, match="cannot write"):
        export_csv(TimeSeries.empty(1), tmp_path / "missing" / "x.csv")


def test_write_summary(tmp_path):
    p = write_summary([{"lambda": 0.1, "verdict": "decay"}], tmp_path / "s.csv", ["lambda", "verdict"])
    assert p.read_text() == "lambda,verdict\n0.10000000000000001,decay\n"


@pytest.mark.slow
def test_rate_increases_with_gain():
    p = ModelParams.standard("flame")
    s = sensor_points(REFERENCE_EIGHTHS, 9)
    m = output_matrices(s, spectrum(200, p.nu2))
    rates = []
    for lam in (2e-6, 3e-6, 5e-6):
        cfg = SimulationConfig(p, s, t_end=1.0, lambda_gain=lam, keep_states=False)
        ts = simulate(cfg, build_injection(m, lam, p.nu2))
        rates.append(fit_decay_rate(ts.t, ts.norm_V, window=(0.0, 1.0)).rate)
    assert rates[0] > 0
    for a, b in zip(rates, rates[1:]):
        assert b >= 0.95 * a
