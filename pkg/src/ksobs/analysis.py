"""Error-norm series, exponential decay fits and CSV export."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, KSObsError

MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class DecayFit:
    rate: float          # decay rate; positive when the norm shrinks
    intercept: float     # log-amplitude at t = 0
    rsq: float
    window: tuple
    transient: float     # max of norm(t) / (norm(t0) exp(-rate (t - t0))) over the window

    @property
    def decaying(self):
        return self.rate > 0


def error_norm_series(ts, kind="V"):
    if kind == "H":
        return ts.t.copy(), ts.norm_H.copy()
    if kind == "V":
        return ts.t.copy(), ts.norm_V.copy()
    raise DomainError(f"unknown norm kind {kind!r}; expected 'H' or 'V'")


def default_window(t):
    t = np.asarray(t, dtype=float)
    return (0.5 * (t[0] + t[-1]), float(t[-1]))


def fit_decay_rate(t, norm, window=None):
    """Least-squares line through ``(t, log norm)`` on ``window``.

    The window defaults to the second half of the time span.
    """
    t = np.asarray(t, dtype=float)
    norm = np.asarray(norm, dtype=float)
    if t.shape != norm.shape or t.ndim != 1:
        raise DomainError("time and norm arrays must be 1-D and of equal length")
    if t.size == 0:
        raise DomainError("empty series")
    window = default_window(t) if window is None else (float(window[0]), float(window[1]))
    sel = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)
    tw, nw = t[sel], norm[sel]
    if np.any(~(nw > 0)):
        bad = tw[~(nw > 0)][0]
        raise DomainError(f"nonpositive norm at t={bad:.6g} inside fit window {window}; restrict the window")
    if tw.size < MIN_FIT_SAMPLES:
        raise DomainError(f"fit window {window} holds {tw.size} samples, need >= {MIN_FIT_SAMPLES}")
    logn = np.log(nw)
    slope, intercept = np.polyfit(tw, logn, 1)
    resid = logn - (slope * tw + intercept)
    ss_tot = float(np.sum((logn - logn.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot <= 1e-300 or ss_res <= 1e-24 * max(ss_tot, 1.0):
        rsq = 1.0
    else:
        rsq = float(min(1.0, max(0.0, 1.0 - ss_res / ss_tot)))
    rate = -float(slope)
    transient = float(np.max(nw / (nw[0] * np.exp(-rate * (tw - tw[0])))))
    return DecayFit(rate=rate, intercept=float(intercept), rsq=rsq, window=window, transient=transient)


def _fmt(v):
    return f"{v:.17g}"


def export_csv(ts, path):
    """One row per record: ``t,norm_H,norm_V,out_err_1..out_err_S``."""
    S = ts.out_err.shape[1] if ts.out_err.ndim == 2 else 0
    header = ["t", "norm_H", "norm_V"] + [f"out_err_{j}" for j in range(1, S + 1)]
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for k in range(len(ts.t)):
                row = [ts.t[k], ts.norm_H[k], ts.norm_V[k], *ts.out_err[k]]
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise KSObsError(f"cannot write time series to {path}: {exc}") from exc
    return path


def read_csv(path):
    """Parse a file written by :func:`export_csv` back into arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.zeros((0, len(header)))
    return header, data


def write_summary(rows, path, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return path
