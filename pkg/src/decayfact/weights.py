"""Admissible weight functions on the integers and their diagnostics.

A weight is an even, positive function v with v(0) = 1 used to measure
off-diagonal decay.  The standard family is

    v(k) = exp(a * |k|**b) * (1 + |k|)**s,

submultiplicative for a, s >= 0 and 0 <= b <= 1, with subexponential growth
(the root test v(n k)**(1/n) -> 1) exactly when b < 1.  Tabulated weights are
given on a symmetric window and refuse evaluation outside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: half-widths used for the default growth-rate samples, 2**4 .. 2**20
_DEFAULT_GRS_EXPONENTS = range(4, 21)


@dataclass(frozen=True)
class Weight:
    """Either the standard three-parameter family or a tabulated window.

    For ``kind="standard"`` the parameters a, b, s define
    exp(a|k|^b)(1+|k|)^s.  For ``kind="tabulated"`` ``values`` holds
    [v(0), v(1), ..., v(W)]; evenness supplies negative arguments and
    evaluation beyond the window is an error.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    s: float = 0.0
    values: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("standard", "tabulated"):
            raise ValueError("weight kind must be 'standard' or 'tabulated'")
        if self.kind == "tabulated":
            vals = tuple(float(v) for v in self.values)
            if not vals:
                raise ValueError("tabulated weight needs at least v(0)")
            if any(v <= 0.0 for v in vals):
                raise ValueError("tabulated weight values must be positive")
            if vals[0] != 1.0:
                raise ValueError("weight must satisfy v(0) = 1")
            object.__setattr__(self, "values", vals)

    @property
    def window(self):
        """Largest |k| a tabulated weight can evaluate; None for standard."""
        if self.kind == "tabulated":
            return len(self.values) - 1
        return None


def standard_weight(a=0.0, b=0.0, s=0.0):
    return Weight(kind="standard", a=float(a), b=float(b), s=float(s))


def tabulated_weight(values):
    return Weight(kind="tabulated", values=tuple(values))


def eval_weight(w, k):
    """v(k) for integer (or integer array) argument k."""
    if w.kind == "standard":
        ak = np.abs(np.asarray(k, dtype=float))
        out = np.exp(w.a * ak**w.b) * (1.0 + ak) ** w.s
        return float(out) if np.isscalar(k) else out
    ak = np.abs(np.asarray(k))
    if np.any(ak > w.window):
        raise ValueError(
            "tabulated weight evaluated outside its window [-%d, %d]"
            % (w.window, w.window)
        )
    table = np.asarray(w.values)
    out = table[ak]
    return float(out) if np.isscalar(k) else out


def grs_estimate(w, k, n):
    """Root-test sample v(n k)**(1/n); tends to 1 iff the weight grows subexponentially."""
    if k == 0:
        raise ValueError("growth-rate sample needs k != 0")
    if n < 1:
        raise ValueError("growth-rate sample needs n >= 1")
    if w.kind == "standard":
        # evaluate in log space so huge v(nk) cannot overflow
        ank = abs(float(n * k))
        logv = w.a * ank**w.b + w.s * math.log1p(ank)
        return math.exp(logv / n)
    return float(eval_weight(w, n * k)) ** (1.0 / n)


def subconvolutive_constant(w, window):
    """max_k sum_{|j|<=window} v(j)^-1 v(k-j)^-1 / v(k)^-1 over |k| <= window.

    Finite (and modest) constants indicate 1/v convolves into itself, the
    hypothesis behind the Schur-type norm estimates.  For tabulated weights
    the window must not exceed half the tabulated window.
    """
    if window < 0:
        raise ValueError("window must be nonnegative")
    if w.window is not None and 2 * window > w.window:
        raise ValueError("need tabulated window >= 2 * requested window")
    j = np.arange(-window, window + 1)
    vinv = 1.0 / eval_weight(w, j)
    worst = 0.0
    for k in range(-window, window + 1):
        conv = float(np.sum(vinv * (1.0 / eval_weight(w, k - j))))
        ratio = conv * eval_weight(w, k)
        worst = max(worst, ratio)
    return worst


@dataclass(frozen=True)
class WeightCheckReport:
    even_ok: bool
    normalized_ok: bool
    submultiplicative_ok: bool
    max_submult_ratio: float
    grs_estimates: tuple        # ((k, n, estimate), ...)
    grs_plausible: bool
    grs_tol: float
    subconvolutive: float | None = None


def _default_grs_samples(w):
    if w.kind == "standard":
        return [(1, 2**p) for p in _DEFAULT_GRS_EXPONENTS]
    return [(1, n) for p in _DEFAULT_GRS_EXPONENTS if (n := 2**p) <= w.window]


def check_admissible(w, window=64, grs_samples=None, grs_tol=0.02,
                     with_subconvolutive=False):
    """Report evenness, normalization, submultiplicativity and growth samples.

    Submultiplicativity (v(j+k) <= v(j)v(k)) is checked for all |j|, |k| <=
    window.  Growth is classified plausible when the largest-n sampled root
    v(nk)^(1/n) stays below 1 + grs_tol.  Failures are carried in the report,
    not raised.
    """
    if w.window is not None and 2 * window > w.window:
        raise ValueError("need tabulated window >= 2 * check window")
    k = np.arange(-window, window + 1)
    vk = eval_weight(w, k)
    even_ok = bool(np.max(np.abs(vk - vk[::-1])) == 0.0)
    normalized_ok = eval_weight(w, 0) == 1.0
    vsum = eval_weight(w, k[:, None] + k[None, :])
    ratio = vsum / (vk[:, None] * vk[None, :])
    max_ratio = float(np.max(ratio))
    submult_ok = max_ratio <= 1.0 + 1e-12

    if grs_samples is None:
        grs_samples = _default_grs_samples(w)
    estimates = tuple((kk, nn, grs_estimate(w, kk, nn)) for kk, nn in grs_samples)
    if estimates:
        largest_n = max(estimates, key=lambda t: t[1])
        plausible = largest_n[2] < 1.0 + grs_tol
    else:
        plausible = False

    sub = subconvolutive_constant(w, window) if with_subconvolutive else None
    return WeightCheckReport(
        even_ok=even_ok,
        normalized_ok=normalized_ok,
        submultiplicative_ok=submult_ok,
        max_submult_ratio=max_ratio,
        grs_estimates=estimates,
        grs_plausible=bool(plausible),
        grs_tol=float(grs_tol),
        subconvolutive=sub,
    )


def weight_to_dict(w):
    if w.kind == "standard":
        return {"kind": "standard", "a": w.a, "b": w.b, "s": w.s}
    return {"kind": "tabulated", "values": list(w.values)}


def weight_from_dict(d):
    if d.get("kind") == "standard":
        return standard_weight(d.get("a", 0.0), d.get("b", 0.0), d.get("s", 0.0))
    if d.get("kind") == "tabulated":
        return tabulated_weight(d["values"])
    raise ValueError("unknown weight kind %r" % d.get("kind"))
