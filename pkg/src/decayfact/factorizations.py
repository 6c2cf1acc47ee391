"""Direct factorizations of sections and exact entrywise cross-checks.

Conventions, fixed across the package:
  * LU is unpivoted with unit lower-triangular L; a numerically zero pivot is
    a structured breakdown, not a reordering trigger (pivoting would destroy
    the triangular correspondence the package studies).
  * Cholesky returns the lower factor with positive real diagonal.
  * QR normalizes phases so diag(R) is real positive.
  * polar returns unitary times Hermitian positive ("right", a = u p) or the
    mirrored "left" variant (a = p u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    NonConvergenceError,
    NotHermitianError,
    NotPositiveDefiniteError,
    NumericalError,
    PivotBreakdownError,
    RankDeficiencyError,
    SingularTriangularError,
)
from .matrices import SectionMatrix, opnorm_estimate

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FactorizationResult:
    """Factors in product order (f1 @ f2 approximates the input) plus the
    relative residual max|a - f1 f2| / max|a| at construction time."""

    kind: str
    f1: SectionMatrix
    f2: SectionMatrix
    residual: float
    convention: str

    @property
    def factors(self):
        return self.f1, self.f2


def relative_residual(a, f1, f2):
    denom = float(np.max(np.abs(a.data)))
    num = float(np.max(np.abs(a.data - f1.data @ f2.data)))
    return num / denom


def _check_hermitian(a, tol=HERMITIAN_TOL):
    asym = float(np.max(np.abs(a.data - a.data.conj().T)))
    bound = tol * float(np.max(np.abs(a.data)))
    if asym > bound:
        raise NotHermitianError(asym, bound)


def lu_unpivoted(a, tol_pivot=1e-13):
    """Doolittle factorization a = L U, unit diagonal on L.

    Requires every leading principal minor to be numerically nonsingular:
    breakdown is reported as the 1-based elimination step whose pivot fell
    below tol_pivot * max|a|.
    """
    tol_abs = float(tol_pivot) * float(np.max(np.abs(a.data)))
    lu, status = _kernels.lu_factor(a.data, tol_abs)
    if status >= 0:
        raise PivotBreakdownError(status + 1, pivot=lu[status, status])
    m = a.size
    lmat = np.tril(lu, -1) + np.eye(m)
    umat = np.triu(lu)
    f1 = SectionMatrix(a.n, lmat, label="L")
    f2 = SectionMatrix(a.n, umat, label="U")
    return FactorizationResult(
        kind="lu",
        f1=f1,
        f2=f2,
        residual=relative_residual(a, f1, f2),
        convention="unit_lower",
    )


def cholesky(a, hermitian_tol=HERMITIAN_TOL):
    """a = C C* with lower-triangular C, positive real diagonal."""
    _check_hermitian(a, hermitian_tol)
    c, status = _kernels.cholesky_factor(a.data)
    if status >= 0:
        # row `status` of the partial factor is complete, so the offending
        # pivot a_kk - sum |c_kj|^2 can be reconstructed for the error
        pivot = float(a.data[status, status].real
                      - np.sum(np.abs(c[status, :status]) ** 2))
        raise NotPositiveDefiniteError(status + 1, pivot=pivot)
    f1 = SectionMatrix(a.n, c, label="C")
    f2 = f1.adjoint()
    return FactorizationResult(
        kind="cholesky",
        f1=f1,
        f2=f2,
        residual=relative_residual(a, f1, f2),
        convention="lower_positive_diagonal",
    )


def qr(a):
    """a = Q R by successive reflector eliminations; diag(R) real positive."""
    q, r, status = _kernels.qr_factor(a.data)
    if status >= 0:
        raise RankDeficiencyError(status + 1)
    d = np.diagonal(r).copy()
    phases = np.conj(d) / np.abs(d)
    r = phases[:, None] * r
    q = q * np.conj(phases)[None, :]
    # phase rotation leaves ~1 ulp of imaginary dust on diag(R); pin it
    np.fill_diagonal(r, np.abs(d))
    f1 = SectionMatrix(a.n, q, label="Q")
    f2 = SectionMatrix(a.n, r, label="R")
    return FactorizationResult(
        kind="qr",
        f1=f1,
        f2=f2,
        residual=relative_residual(a, f1, f2),
        convention="r_diag_positive",
    )


def triangular_inverse(t, kind="lower"):
    """Invert a triangular section by substitution, preserving the exact
    triangular zero pattern.  ``kind`` names the triangle of t."""
    if kind not in ("lower", "upper"):
        raise ValueError("kind must be 'lower' or 'upper'")
    off = np.triu(t.data, 1) if kind == "lower" else np.tril(t.data, -1)
    if np.any(off != 0.0):
        raise ValueError("input is not exactly %s triangular" % kind)
    fn = _kernels.tri_inv_lower if kind == "lower" else _kernels.tri_inv_upper
    x, status = fn(t.data)
    if status >= 0:
        raise SingularTriangularError(status + 1)
    return SectionMatrix(t.n, x, label=t.label + "_inv" if t.label else "")


def polar(a, side="right", max_iter=100, tol=1e-12):
    """Polar factorization by the averaging iteration x <- (x + x^-*) / 2.

    side="right": a = u p with u unitary and p = u* a Hermitian PSD;
    side="left":  a = p u with p = a u*.  The input must be invertible.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    cond_gate = opnorm_estimate(a)
    x = np.asarray(a.data)
    try:
        inv0 = np.linalg.inv(x)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("input is singular: %s" % exc) from None
    if cond_gate * opnorm_estimate(inv0) > 1e12:
        raise NumericalError("input is numerically singular (condition > 1e12)")
    xk = x.copy()
    xinv_adj = inv0.conj().T
    delta = np.inf
    for _ in range(max_iter):
        xnext = 0.5 * (xk + xinv_adj)
        delta = float(np.max(np.abs(xnext - xk)))
        xk = xnext
        if delta <= tol * float(np.max(np.abs(xk))):
            break
        xinv_adj = np.linalg.inv(xk).conj().T
    else:
        raise NonConvergenceError("polar iteration", max_iter, delta)
    u = SectionMatrix(a.n, xk, label="U_polar")
    if side == "right":
        p = xk.conj().T @ a.data
        p = 0.5 * (p + p.conj().T)  # fold roundoff asymmetry
        f1, f2 = u, SectionMatrix(a.n, p, label="P")
        kind = "polar_right"
    else:
        p = a.data @ xk.conj().T
        p = 0.5 * (p + p.conj().T)
        f1, f2 = SectionMatrix(a.n, p, label="P"), u
        kind = "polar_left"
    return FactorizationResult(
        kind=kind,
        f1=f1,
        f2=f2,
        residual=relative_residual(a, f1, f2),
        convention="newton",
    )


# ---------------------------------------------------------------------------
# entrywise cross-checks between factors and blocks of the inverse
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriangularBoundReport:
    """Comparison of factor entries against expressions built only from the
    inverse: LHS from the LU factors, RHS from blocks of a^-1 (lower-right
    check) and of the upper-left block's inverse (upper-left check).
    The two sides agree analytically, so max violation (LHS - RHS) and max
    mismatch |LHS - RHS| are both roundoff-sized for well-conditioned input."""

    n: int
    lower_right_max_violation: float
    upper_left_max_violation: float
    lower_right_max_mismatch: float
    upper_left_max_mismatch: float

    @property
    def max_violation(self):
        return max(self.lower_right_max_violation, self.upper_left_max_violation)

    @property
    def max_mismatch(self):
        return max(self.lower_right_max_mismatch, self.upper_left_max_mismatch)


def verify_triangular_entry_bounds(a, tol_pivot=1e-13):
    """Check that triangular-factor entries are reproduced from the inverse.

    Lower-right check: with b22 the lower-right block of a^-1 (logical
    indices >= 0) and beta = b22^-1, row k of (L22)^-1 below the diagonal
    equals -beta[k, :k] @ inv(beta[:k, :k]).

    Upper-left check: with alpha the inverse of the upper-left block of a
    (logical indices < 0), the below-diagonal part of column c of L11 equals
    -inv(alpha[c+1:, c+1:]) @ alpha[c+1:, c].

    Both right-hand sides use no LU quantities, so the comparison is a
    genuine dual-route consistency check.
    """
    n = a.n
    res = lu_unpivoted(a, tol_pivot=tol_pivot)
    lmat = res.f1.data
    b = np.linalg.inv(a.data)

    # lower-right: rows of the inverse of L's lower-right block
    l22 = lmat[n:, n:]
    lam22, status = _kernels.tri_inv_lower(np.ascontiguousarray(l22))
    if status >= 0:
        raise SingularTriangularError(status + 1)
    b22 = b[n:, n:]
    beta = np.linalg.inv(b22)
    lr_viol = 0.0
    lr_mis = 0.0
    for k in range(1, n + 1):
        lhs = np.abs(lam22[k, :k])
        rhs_vec = np.linalg.solve(beta[:k, :k].T, beta[k, :k])
        rhs = np.abs(rhs_vec)
        lr_viol = max(lr_viol, float(np.max(lhs - rhs)))
        lr_mis = max(lr_mis, float(np.max(np.abs(lhs - rhs))))

    # upper-left: below-diagonal columns of L11 from alpha = (a11)^-1
    l11 = lmat[:n, :n]
    alpha = np.linalg.inv(a.data[:n, :n])
    ul_viol = 0.0
    ul_mis = 0.0
    for c in range(n - 1):
        lhs = np.abs(l11[c + 1 :, c])
        rhs_vec = np.linalg.solve(alpha[c + 1 :, c + 1 :], alpha[c + 1 :, c])
        rhs = np.abs(rhs_vec)
        ul_viol = max(ul_viol, float(np.max(lhs - rhs)))
        ul_mis = max(ul_mis, float(np.max(np.abs(lhs - rhs))))

    return TriangularBoundReport(
        n=n,
        lower_right_max_violation=lr_viol,
        upper_left_max_violation=ul_viol,
        lower_right_max_mismatch=lr_mis,
        upper_left_max_mismatch=ul_mis,
    )


@dataclass(frozen=True)
class CornerBlockReport:
    n: int
    max_discrepancy: float


def verify_corner_block_relation(a, tol_pivot=1e-13):
    """The coupling block of L equals a21 times the inverse of the upper
    factor of the standalone upper-left LU: L21 = a21 @ U11^-1.

    L21 comes from the full-section LU; U11 from an independent LU of the
    upper-left block alone (the two agree by uniqueness of unpivoted LU).
    """
    n = a.n
    res = lu_unpivoted(a, tol_pivot=tol_pivot)
    l21 = res.f1.data[n:, :n]

    a11 = np.ascontiguousarray(a.data[:n, :n])
    tol_abs = float(tol_pivot) * float(np.max(np.abs(a11))) if n else 0.0
    lu11, status = _kernels.lu_factor(a11, tol_abs)
    if status >= 0:
        raise PivotBreakdownError(status + 1, pivot=lu11[status, status])
    u11 = np.triu(lu11)
    u11_inv, status = _kernels.tri_inv_upper(np.ascontiguousarray(u11))
    if status >= 0:
        raise SingularTriangularError(status + 1)
    expected = a.data[n:, :n] @ u11_inv
    return CornerBlockReport(
        n=n, max_discrepancy=float(np.max(np.abs(l21 - expected)))
    )
