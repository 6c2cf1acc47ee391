"""Decay-algebra norms, off-diagonal profiles and envelope fits.

Four norms quantify off-diagonal decay of a section: a polynomial sup norm,
its weighted generalization, a weighted Schur row/column-sum norm, and a
summed per-diagonal sup norm.  Profiles collect per-offset maxima over an
interior window (boundary columns of a section are truncated, so the outer
margin is excluded before fitting decay envelopes).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .matrices import SectionMatrix, _offset_grid
from .weights import eval_weight


def _weight_matrix(a, w):
    offsets = _offset_grid(a.n)
    # evaluate on offsets -2n..2n once, then index; keeps tabulated errors exact
    rng = np.arange(-2 * a.n, 2 * a.n + 1)
    table = eval_weight(w, rng)
    return table[offsets + 2 * a.n]


def norm_jaffard(a, s):
    """sup |a_jk| (1 + |j-k|)^s."""
    if s < 0:
        raise ValueError("decay exponent s must be nonnegative")
    offsets = np.abs(_offset_grid(a.n))
    return float(np.max(np.abs(a.data) * (1.0 + offsets) ** float(s)))


def norm_weighted(a, w):
    """sup |a_jk| v(j-k)."""
    return float(np.max(np.abs(a.data) * _weight_matrix(a, w)))


def norm_schur(a, w):
    """max of the weighted sup row sum and weighted sup column sum."""
    weighted = np.abs(a.data) * _weight_matrix(a, w)
    return float(max(np.max(weighted.sum(axis=1)), np.max(weighted.sum(axis=0))))


def norm_gbs(a, w):
    """sum over offsets m of v(m) sup_j |a_{j, j-m}|."""
    absdata = np.abs(a.data)
    total = 0.0
    for m in range(-2 * a.n, 2 * a.n + 1):
        # diagonal with row - col = m sits at numpy offset -m
        d = np.diagonal(absdata, offset=-m)
        if d.size:
            total += float(eval_weight(w, m)) * float(np.max(d))
    return total


@dataclass(frozen=True)
class DecayProfile:
    """Per-offset maxima d[m] = max |a_jk| over |j-k| = m, interior window only."""

    d: np.ndarray
    probe_margin: int

    def __post_init__(self):
        arr = np.asarray(self.d, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "d", arr)


def profile(a, probe_margin=None):
    """Fold the section to per-offset maxima, skipping ``probe_margin`` boundary
    rows/columns on each side (default n // 2)."""
    if probe_margin is None:
        probe_margin = a.n // 2
    if not 0 <= probe_margin <= a.n:
        raise ValueError("probe margin must lie in [0, n]")
    p = a.n - probe_margin
    core = np.abs(a.data[a.n - p : a.n + p + 1, a.n - p : a.n + p + 1])
    d = np.empty(2 * p + 1)
    for m in range(2 * p + 1):
        hi = np.diagonal(core, offset=m)
        lo = np.diagonal(core, offset=-m)
        d[m] = max(np.max(hi), np.max(lo))
    return DecayProfile(d=d, probe_margin=int(probe_margin))


@dataclass(frozen=True)
class DecayFit:
    """Least-squares envelope fit of a profile on a window of offsets.

    model "polynomial": d[m] ~ c_hat (1+m)^-s_hat; model "exponential":
    d[m] ~ c_hat gamma_hat^m.  r_squared is clamped to [0, 1].
    """

    model: str
    c_hat: float
    r_squared: float
    window: tuple
    s_hat: float | None = None
    gamma_hat: float | None = None

    def to_record(self):
        rec = {"model": self.model, "c_hat": self.c_hat, "r2": self.r_squared}
        if self.model == "polynomial":
            rec["s_hat"] = self.s_hat
        else:
            rec["gamma_hat"] = self.gamma_hat
        return rec


def _fit_points(p, window):
    if window is None:
        window = (2, (len(p.d) - 1) // 2)
    lo, hi = int(window[0]), int(window[1])
    lo = max(lo, 2)  # offsets 0 and 1 are dominated by the diagonal, never fit
    ms = np.arange(lo, hi + 1)
    ms = ms[ms < len(p.d)]
    vals = p.d[ms] if ms.size else np.empty(0)
    keep = vals > 0.0  # zero maxima carry no envelope information in log space
    ms, vals = ms[keep], vals[keep]
    if ms.size < 8:
        raise ValueError(
            "need at least 8 nonzero offsets in the fit window, have %d" % ms.size
        )
    return (lo, hi), ms, vals


def _r_squared(logy, pred):
    ss_res = float(np.sum((logy - pred) ** 2))
    ss_tot = float(np.sum((logy - np.mean(logy)) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - ss_res / ss_tot)))


def fit_polynomial(p, window=None):
    """Fit log d[m] = log c - s log(1+m); the sign of s_hat is not constrained."""
    window, ms, vals = _fit_points(p, window)
    x = np.log1p(ms)
    y = np.log(vals)
    coef, intercept = np.polyfit(x, y, 1)
    pred = coef * x + intercept
    return DecayFit(
        model="polynomial",
        s_hat=float(-coef),
        c_hat=float(np.exp(intercept)),
        r_squared=_r_squared(y, pred),
        window=window,
    )


def fit_exponential(p, window=None):
    """Fit log d[m] = log c + m log gamma."""
    window, ms, vals = _fit_points(p, window)
    x = ms.astype(float)
    y = np.log(vals)
    coef, intercept = np.polyfit(x, y, 1)
    pred = coef * x + intercept
    return DecayFit(
        model="exponential",
        gamma_hat=float(np.exp(coef)),
        c_hat=float(np.exp(intercept)),
        r_squared=_r_squared(y, pred),
        window=window,
    )


def save_profile_csv(p, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["offset", "value"])
        for m, v in enumerate(p.d):
            writer.writerow([m, repr(float(v))])


def save_fit_json(fit, path):
    with open(path, "w") as fh:
        json.dump(fit.to_record(), fh, indent=2, sort_keys=True)
