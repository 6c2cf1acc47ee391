"""Finite sections of bi-infinite matrices and their basic operations.

A SectionMatrix stores the central (2n+1) x (2n+1) window of a bi-infinite
matrix; logical row/column indices run over -n..n and map to storage index
j + n.  All entries are complex128 and instances are immutable: every
operation returns a new section.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import StabilizationError


@dataclass(frozen=True)
class SectionMatrix:
    n: int
    data: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.complex128, order="C", copy=True)
        m = 2 * self.n + 1
        if self.n < 0:
            raise ValueError("half-width n must be nonnegative")
        if arr.shape != (m, m):
            raise ValueError(
                "section with half-width %d needs shape (%d, %d), got %r"
                % (self.n, m, m, arr.shape)
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def size(self):
        return 2 * self.n + 1

    def at(self, j, k):
        """Entry at logical indices j, k in -n..n."""
        if abs(j) > self.n or abs(k) > self.n:
            raise IndexError("logical index outside [-%d, %d]" % (self.n, self.n))
        return complex(self.data[j + self.n, k + self.n])

    def adjoint(self):
        return SectionMatrix(self.n, self.data.conj().T)

    def max_abs(self):
        return float(np.max(np.abs(self.data)))

    def __add__(self, other):
        self._check_compat(other)
        return SectionMatrix(self.n, self.data + other.data)

    def __sub__(self, other):
        self._check_compat(other)
        return SectionMatrix(self.n, self.data - other.data)

    def __matmul__(self, other):
        self._check_compat(other)
        return SectionMatrix(self.n, self.data @ other.data)

    def _check_compat(self, other):
        if not isinstance(other, SectionMatrix):
            raise TypeError("expected a SectionMatrix")
        if other.n != self.n:
            raise ValueError("half-widths differ: %d vs %d" % (self.n, other.n))


def identity(n):
    return SectionMatrix(n, np.eye(2 * n + 1, dtype=np.complex128))


@dataclass(frozen=True)
class SymbolSeries:
    """Finitely supported Laurent coefficients {offset: coefficient}."""

    coeffs: dict

    def __post_init__(self):
        clean = {int(m): complex(c) for m, c in self.coeffs.items()}
        object.__setattr__(self, "coeffs", clean)

    @property
    def support(self):
        return sorted(self.coeffs)

    def max_offset(self):
        return max((abs(m) for m in self.coeffs), default=0)

    def coefficient(self, m):
        return self.coeffs.get(int(m), 0.0 + 0.0j)


# ---------------------------------------------------------------------------
# generators (bit-reproducible in the seed)
# ---------------------------------------------------------------------------

def _random_signs_and_magnitudes(m, seed):
    rng = np.random.default_rng(seed)
    mag = rng.uniform(0.5, 1.0, size=(m, m))
    sgn = rng.integers(0, 2, size=(m, m)) * 2.0 - 1.0
    return mag * sgn


def _offset_grid(n):
    j = np.arange(-n, n + 1)
    return np.subtract.outer(j, j)


def generate_jaffard(n, s, c=1.0, seed=0):
    """Random section with polynomial envelope c (1+|j-k|)^-s."""
    if s < 0:
        raise ValueError("decay exponent s must be nonnegative")
    env = c * (1.0 + np.abs(_offset_grid(n))) ** (-float(s))
    vals = env * _random_signs_and_magnitudes(2 * n + 1, seed)
    return SectionMatrix(n, vals, label="jaffard(s=%g)" % s)


def generate_expdecay(n, gamma, c=1.0, seed=0):
    """Random section with exponential envelope c gamma^|j-k|, 0 < gamma < 1."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("decay rate gamma must lie in (0, 1)")
    env = c * float(gamma) ** np.abs(_offset_grid(n))
    vals = env * _random_signs_and_magnitudes(2 * n + 1, seed)
    return SectionMatrix(n, vals, label="expdecay(gamma=%g)" % gamma)


def generate_banded(n, bandwidth, seed=0):
    """Random section vanishing outside |j-k| <= bandwidth, entries in [-1, 1]."""
    if bandwidth < 0:
        raise ValueError("bandwidth must be nonnegative")
    env = (np.abs(_offset_grid(n)) <= bandwidth).astype(float)
    vals = env * _random_signs_and_magnitudes(2 * n + 1, seed)
    return SectionMatrix(n, vals, label="banded(N=%d)" % bandwidth)


def laurent_from_symbol(sym, n):
    """Constant-diagonal section a_{j,k} = c_{j-k} from symbol coefficients."""
    if sym.max_offset() > 2 * n:
        raise ValueError("symbol support exceeds the section offset range [-2n, 2n]")
    offsets = _offset_grid(n)
    vals = np.zeros_like(offsets, dtype=np.complex128)
    for m, cm in sym.coeffs.items():
        vals[offsets == m] = cm
    return SectionMatrix(n, vals, label="laurent")


def make_spd(a, delta):
    """a* a + delta I; Hermitian, and positive definite for delta > 0."""
    m = a.size
    vals = a.data.conj().T @ a.data + float(delta) * np.eye(m)
    return SectionMatrix(a.n, vals, label="spd")


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------

def proj_lower(a):
    """Keep entries with j >= k (lower triangle including the diagonal)."""
    return SectionMatrix(a.n, np.tril(a.data))


def proj_strict_upper(a):
    """Keep entries with j < k; complements proj_lower exactly."""
    return SectionMatrix(a.n, np.triu(a.data, 1))


def diag_scale(a, z):
    """Scale the m-th diagonal by z^m: entry (j,k) -> z^(j-k) a_{jk}."""
    z = complex(z)
    if z == 0:
        raise ValueError("diagonal scaling parameter must be nonzero")
    return SectionMatrix(a.n, np.power(z, _offset_grid(a.n)) * a.data)


@dataclass(frozen=True)
class BlockPartition:
    """The four sub-blocks of a section split at logical index 0.

    a11 covers rows/cols -n..-1, a22 covers 0..n; a12/a21 are the rectangular
    couplings.  Blocks are read-only array views that tile the parent exactly.
    """

    n: int
    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray


def block_partition(a):
    n = a.n
    d = a.data
    return BlockPartition(
        n=n,
        a11=d[:n, :n],
        a12=d[:n, n:],
        a21=d[n:, :n],
        a22=d[n:, n:],
    )


def opnorm_estimate(a, iters=200, tol=1e-12, seed=24_000):
    """Operator-norm (largest singular value) estimate by power iteration on a*a.

    The returned value never exceeds the true norm (up to roundoff): it is the
    square root of a Rayleigh quotient of a*a.  The starting vector is drawn
    from a fixed-seed generator so estimates are reproducible.
    """
    d = a.data if isinstance(a, SectionMatrix) else np.asarray(a, dtype=np.complex128)
    m = d.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    x /= np.linalg.norm(x)
    prev = 0.0
    est = 0.0
    for _ in range(iters):
        y = d @ x
        est = float(np.linalg.norm(y))
        if est == 0.0:
            return 0.0
        x = d.conj().T @ y
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return est
        x /= nx
        if abs(est - prev) <= tol * est:
            break
        prev = est
    return est


def stabilized_section(generator, probe_halfwidth=8, tol=1e-10, n_start=16,
                       n_max=1024):
    """Double the half-width until the central probe window stops changing.

    ``generator(n)`` must deterministically build the section at half-width n
    (reuse the same seed).  Returns the first section whose central
    (2w+1)^2 probe entries moved by less than tol (max norm) under doubling.
    """
    if probe_halfwidth > n_start:
        raise ValueError("probe half-width exceeds the starting section")
    prev = generator(n_start)
    n = n_start
    last_change = np.inf
    while n < n_max:
        n *= 2
        cur = generator(n)
        w = probe_halfwidth
        a0 = prev.data[prev.n - w : prev.n + w + 1, prev.n - w : prev.n + w + 1]
        a1 = cur.data[cur.n - w : cur.n + w + 1, cur.n - w : cur.n + w + 1]
        last_change = float(np.max(np.abs(a1 - a0)))
        if last_change < tol:
            return cur
        prev = cur
    raise StabilizationError(n_max, last_change)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def save_matrix(a, path):
    """Write {"n", "re", "im"} JSON; "im" is omitted for real sections."""
    payload = {"n": a.n, "re": a.data.real.tolist()}
    if np.any(a.data.imag != 0.0):
        payload["im"] = a.data.imag.tolist()
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_matrix(path):
    with open(path) as fh:
        payload = json.load(fh)
    re = np.asarray(payload["re"], dtype=float)
    im = np.asarray(payload["im"], dtype=float) if "im" in payload else 0.0
    return SectionMatrix(int(payload["n"]), re + 1j * im)


def save_symbol(sym, path):
    offsets = sym.support
    payload = {
        "offsets": offsets,
        "re": [sym.coeffs[m].real for m in offsets],
        "im": [sym.coeffs[m].imag for m in offsets],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_symbol(path):
    with open(path) as fh:
        payload = json.load(fh)
    offsets = payload["offsets"]
    re = payload["re"]
    im = payload.get("im", [0.0] * len(offsets))
    return SymbolSeries(
        {int(m): complex(r, i) for m, r, i in zip(offsets, re, im)}
    )
