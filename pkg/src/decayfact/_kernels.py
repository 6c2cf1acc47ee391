"""Elimination kernels with two interchangeable backends.

Every kernel exists twice: an explicit-loop version compiled with numba
(``*_numba``) and a vectorized pure-numpy version (``*_numpy``).  The active
backend is chosen once at import time: numba if it is importable, unless the
environment variable ``DECAYFACT_BACKEND`` is set to ``"numpy"``.  Both
variants stay importable so they can be cross-checked and benchmarked against
each other (see benchmarks/bench_kernels.py).

Kernels never raise; they return a status integer (-1 on success, otherwise
the 0-based step that failed) and leave structured exceptions to the wrappers
in factorizations.py.  All kernels expect square C-contiguous complex128
arrays and do not modify their inputs.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None
    HAVE_NUMBA = False

_REQUESTED = os.environ.get("DECAYFACT_BACKEND", "").strip().lower()
if _REQUESTED not in ("", "numpy", "numba"):
    raise ValueError(
        "DECAYFACT_BACKEND must be 'numpy' or 'numba', got %r" % _REQUESTED
    )
if _REQUESTED == "numba" and not HAVE_NUMBA:
    raise ImportError("DECAYFACT_BACKEND=numba requested but numba is not importable")

BACKEND = "numpy" if _REQUESTED == "numpy" or not HAVE_NUMBA else "numba"


def active_backend():
    """Name of the backend the dispatching kernels run on."""
    return BACKEND


def _noop_jit(func):
    return func


_jit = numba.njit(cache=True) if HAVE_NUMBA else _noop_jit


# ---------------------------------------------------------------------------
# LU without pivoting (Doolittle, unit lower diagonal stored implicitly)
# ---------------------------------------------------------------------------

def _lu_loops(a, tol_abs):
    m = a.shape[0]
    lu = a.copy()
    for k in range(m):
        piv = lu[k, k]
        if abs(piv) <= tol_abs:
            return lu, k
        for i in range(k + 1, m):
            lik = lu[i, k] / piv
            lu[i, k] = lik
            for j in range(k + 1, m):
                lu[i, j] -= lik * lu[k, j]
    return lu, -1


lu_numba = _jit(_lu_loops)


def lu_numpy(a, tol_abs):
    m = a.shape[0]
    lu = a.copy()
    for k in range(m):
        piv = lu[k, k]
        if abs(piv) <= tol_abs:
            return lu, k
        lu[k + 1 :, k] /= piv
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, -1


# ---------------------------------------------------------------------------
# Cholesky, lower factor with positive real diagonal
# ---------------------------------------------------------------------------

def _cholesky_loops(a):
    m = a.shape[0]
    c = np.zeros((m, m), dtype=np.complex128)
    for j in range(m):
        s = a[j, j].real
        for k in range(j):
            s -= c[j, k].real ** 2 + c[j, k].imag ** 2
        if s <= 0.0:
            return c, j
        d = np.sqrt(s)
        c[j, j] = d
        for i in range(j + 1, m):
            t = a[i, j]
            for k in range(j):
                t -= c[i, k] * np.conj(c[j, k])
            c[i, j] = t / d
    return c, -1


cholesky_numba = _jit(_cholesky_loops)


def cholesky_numpy(a):
    m = a.shape[0]
    c = np.zeros((m, m), dtype=np.complex128)
    for j in range(m):
        s = a[j, j].real - float(np.sum(np.abs(c[j, :j]) ** 2))
        if s <= 0.0:
            return c, j
        d = np.sqrt(s)
        c[j, j] = d
        if j + 1 < m:
            c[j + 1 :, j] = (a[j + 1 :, j] - c[j + 1 :, :j] @ np.conj(c[j, :j])) / d
    return c, -1


# ---------------------------------------------------------------------------
# QR by successive reflector eliminations
# ---------------------------------------------------------------------------

def _qr_loops(a):
    m = a.shape[0]
    r = a.copy()
    q = np.eye(m, dtype=np.complex128)
    v = np.zeros(m, dtype=np.complex128)
    for k in range(m):
        normx2 = 0.0
        for i in range(k, m):
            normx2 += r[i, k].real ** 2 + r[i, k].imag ** 2
        if normx2 == 0.0:
            return q, r, k
        normx = np.sqrt(normx2)
        x0 = r[k, k]
        if x0.real != 0.0 or x0.imag != 0.0:
            phase = x0 / abs(x0)
        else:
            phase = 1.0 + 0.0j
        alpha = -phase * normx
        vnorm2 = 0.0
        for i in range(k, m):
            v[i] = r[i, k]
            if i == k:
                v[i] -= alpha
            vnorm2 += v[i].real ** 2 + v[i].imag ** 2
        beta = 2.0 / vnorm2
        # r[k:, k:] <- (I - beta v v*) r[k:, k:]
        for j in range(k, m):
            w = 0.0 + 0.0j
            for i in range(k, m):
                w += np.conj(v[i]) * r[i, j]
            w *= beta
            for i in range(k, m):
                r[i, j] -= w * v[i]
        r[k, k] = alpha
        for i in range(k + 1, m):
            r[i, k] = 0.0  # exact zero pattern below the diagonal
        # q[:, k:] <- q[:, k:] (I - beta v v*)
        for i in range(m):
            w = 0.0 + 0.0j
            for j in range(k, m):
                w += q[i, j] * v[j]
            w *= beta
            for j in range(k, m):
                q[i, j] -= w * np.conj(v[j])
    return q, r, -1


qr_numba = _jit(_qr_loops)


def qr_numpy(a):
    m = a.shape[0]
    r = a.copy()
    q = np.eye(m, dtype=np.complex128)
    for k in range(m):
        x = r[k:, k]
        normx2 = float(np.sum(x.real**2 + x.imag**2))
        if normx2 == 0.0:
            return q, r, k
        normx = np.sqrt(normx2)
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0.0 else 1.0 + 0.0j
        alpha = -phase * normx
        v = x.copy()
        v[0] -= alpha
        beta = 2.0 / float(np.sum(v.real**2 + v.imag**2))
        w = np.conj(v) @ r[k:, k:]
        r[k:, k:] -= beta * np.outer(v, w)
        r[k, k] = alpha
        r[k + 1 :, k] = 0.0
        wq = q[:, k:] @ v
        q[:, k:] -= beta * np.outer(wq, np.conj(v))
    return q, r, -1


# ---------------------------------------------------------------------------
# Triangular inversion by substitution (exact zero pattern preserved)
# ---------------------------------------------------------------------------

def _tri_inv_lower_loops(t):
    m = t.shape[0]
    x = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        if t[i, i].real == 0.0 and t[i, i].imag == 0.0:
            return x, i
    for j in range(m):
        x[j, j] = 1.0 / t[j, j]
        for i in range(j + 1, m):
            s = 0.0 + 0.0j
            for k in range(j, i):
                s += t[i, k] * x[k, j]
            x[i, j] = -s / t[i, i]
    return x, -1


tri_inv_lower_numba = _jit(_tri_inv_lower_loops)


def tri_inv_lower_numpy(t):
    m = t.shape[0]
    x = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        if t[i, i] == 0.0:
            return x, i
    for i in range(m):
        # row i of the inverse from rows < i; columns > i stay exactly zero
        x[i, :i] = -(t[i, :i] @ x[:i, :i]) / t[i, i]
        x[i, i] = 1.0 / t[i, i]
    return x, -1


def _tri_inv_upper_loops(t):
    m = t.shape[0]
    x = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        if t[i, i].real == 0.0 and t[i, i].imag == 0.0:
            return x, i
    for j in range(m - 1, -1, -1):
        x[j, j] = 1.0 / t[j, j]
        for i in range(j - 1, -1, -1):
            s = 0.0 + 0.0j
            for k in range(i + 1, j + 1):
                s += t[i, k] * x[k, j]
            x[i, j] = -s / t[i, i]
    return x, -1


tri_inv_upper_numba = _jit(_tri_inv_upper_loops)


def tri_inv_upper_numpy(t):
    m = t.shape[0]
    x = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        if t[i, i] == 0.0:
            return x, i
    for i in range(m - 1, -1, -1):
        x[i, i + 1 :] = -(t[i, i + 1 :] @ x[i + 1 :, i + 1 :]) / t[i, i]
        x[i, i] = 1.0 / t[i, i]
    return x, -1


# ---------------------------------------------------------------------------
# Dispatch table
# ---------------------------------------------------------------------------

if BACKEND == "numba":
    lu_factor = lu_numba
    cholesky_factor = cholesky_numba
    qr_factor = qr_numba
    tri_inv_lower = tri_inv_lower_numba
    tri_inv_upper = tri_inv_upper_numba
else:
    lu_factor = lu_numpy
    cholesky_factor = cholesky_numpy
    qr_factor = qr_numpy
    tri_inv_lower = tri_inv_lower_numpy
    tri_inv_upper = tri_inv_upper_numpy
