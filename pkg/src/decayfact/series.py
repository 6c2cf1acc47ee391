"""Constructive triangular factorization by alternating-projection series.

For a section a = I + m whose distance to the identity is an operator-norm
contraction, the inverse triangular factors are limits of the recursions

    t_1 = P m,  t_{j+1} = P[m t_j]      (P  = lower projection, diagonal kept)
    s_1 = Q m,  s_{j+1} = Q[s_j m]      (Q  = strictly upper projection)

with  l_inv = I - t_1 + t_2 - ...  and  u_inv = I - s_1 + s_2 - ... .  The
series places the whole diagonal in the lower factor; align_with_unit_diagonal
moves it to the upper factor to match the direct LU convention.  Related
helpers rescale positive definite input into the contraction regime and
precondition general input with diagonal-scaled reference factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonConvergenceError,
    NotContractionError,
    NotPositiveDefiniteError,
    NumericalError,
)
from .factorizations import (
    FactorizationResult,
    _check_hermitian,
    relative_residual,
    triangular_inverse,
)
from .matrices import SectionMatrix, diag_scale, identity, opnorm_estimate


@dataclass(frozen=True)
class SeriesLUResult:
    """Truncated series for the inverse factors: l_inv is lower triangular
    (diagonal included), u_inv is unit upper triangular."""

    l_inv: SectionMatrix
    u_inv: SectionMatrix
    terms_used: int
    last_term_norm: float
    contraction_norm: float


def series_lu_inverse(a, tol=1e-12, max_terms=500):
    """Sum the alternating projection series for L^-1 and U^-1.

    The contraction gate measures the operator norm of a - I (not a decay
    norm); input with estimate >= 1 is rejected.  Terms are added until the
    larger of the two newest terms drops below tol in max norm.
    """
    m = a.size
    mdat = a.data - np.eye(m)
    contraction = opnorm_estimate(SectionMatrix(a.n, mdat))
    if contraction >= 1.0:
        raise NotContractionError(contraction)

    l_acc = np.eye(m, dtype=np.complex128)
    u_acc = np.eye(m, dtype=np.complex128)
    t = np.tril(mdat)
    s = np.triu(mdat, 1)
    sign = -1.0
    terms = 0
    last = np.inf
    for terms in range(1, max_terms + 1):
        l_acc += sign * t
        u_acc += sign * s
        last = max(float(np.max(np.abs(t))), float(np.max(np.abs(s))))
        if last < tol:
            break
        t = np.tril(t @ mdat)
        s = np.triu(mdat @ s, 1)
        sign = -sign
    else:
        raise NonConvergenceError("projection series", max_terms, last)

    return SeriesLUResult(
        l_inv=SectionMatrix(a.n, l_acc, label="L_inv_series"),
        u_inv=SectionMatrix(a.n, u_acc, label="U_inv_series"),
        terms_used=terms,
        last_term_norm=last,
        contraction_norm=contraction,
    )


def align_with_unit_diagonal(sr):
    """Invert the series factors and move the diagonal from L to U, matching
    the unpivoted-LU convention (unit lower diagonal)."""
    l_raw = triangular_inverse(sr.l_inv, kind="lower")
    u_raw = triangular_inverse(sr.u_inv, kind="upper")
    d = np.diagonal(l_raw.data).copy()
    lmat = l_raw.data / d[None, :]   # scale columns: unit diagonal
    umat = d[:, None] * u_raw.data   # scale rows: diagonal moves to U
    return (
        SectionMatrix(sr.l_inv.n, lmat, label="L"),
        SectionMatrix(sr.l_inv.n, umat, label="U"),
    )


def spd_rescale(a, iters=200):
    """Scale Hermitian positive definite a by alpha = 2 / (lmin + lmax) so
    that I - alpha a is a contraction; returns (alpha, scaled section)."""
    _check_hermitian(a)
    lmax = opnorm_estimate(a, iters=iters)
    if lmax == 0.0:
        raise NotPositiveDefiniteError(1, pivot=0.0)
    shifted = SectionMatrix(a.n, lmax * np.eye(a.size) - a.data)
    lmin = lmax - opnorm_estimate(shifted, iters=iters)
    if lmin <= 0.0:
        raise NotPositiveDefiniteError(1, pivot=lmin)
    alpha = 2.0 / (lmin + lmax)
    scaled = SectionMatrix(a.n, alpha * a.data, label=a.label)
    check = opnorm_estimate(identity(a.n) - scaled, iters=iters)
    if check >= 1.0:
        raise NumericalError(
            "rescaled section is not a contraction (estimate %.6f)" % check
        )
    return alpha, scaled


def series_cholesky(a, tol=1e-12, max_terms=500):
    """Cholesky factor via the projection series on the rescaled section.

    Rescale a to alpha a, run the series, align, then fold the diagonal of U
    and the scale back into the lower factor: c = L sqrt(diag(U) / alpha).
    """
    alpha, scaled = spd_rescale(a)
    sr = series_lu_inverse(scaled, tol=tol, max_terms=max_terms)
    lmat, umat = align_with_unit_diagonal(sr)
    d = np.diagonal(umat.data).real
    if np.any(d <= 0.0):
        step = int(np.argmax(d <= 0.0))
        raise NotPositiveDefiniteError(step + 1, pivot=float(d[step]))
    c = lmat.data * np.sqrt(d / alpha)[None, :]
    f1 = SectionMatrix(a.n, c, label="C")
    f2 = f1.adjoint()
    return FactorizationResult(
        kind="cholesky",
        f1=f1,
        f2=f2,
        residual=relative_residual(a, f1, f2),
        convention="series",
    )


def precondition_by_scaling(a, l_ref, u_ref, eps):
    """Conjugate a by diagonal-scaled reference factors:

        a' = diag_scale(l_ref, eps)^-1  a  diag_scale(u_ref, 1/eps)^-1.

    Off-diagonals of both scaled references shrink by eps^|offset|, pulling
    a' toward the identity so the series gate can pass.  Reference factors
    must be lower/upper triangular (typically a coarse direct LU of a).
    """
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    fl = diag_scale(l_ref, eps)
    fu = diag_scale(u_ref, 1.0 / eps)
    fl_inv = triangular_inverse(fl, kind="lower")
    fu_inv = triangular_inverse(fu, kind="upper")
    return SectionMatrix(a.n, fl_inv.data @ a.data @ fu_inv.data, label="preconditioned")
