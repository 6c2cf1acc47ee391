"""Matrix functions on sections: exponential, Hermitian square root, contour
functional calculus, and a square-root route to the polar factorization.

The contour route evaluates f(a) = (2 pi i)^-1 integral of f(z)(z - a)^-1 by
a trapezoid rule on a circle enclosing the spectrum; each node is a dense
resolvent solve (row-pivoted, which is fine here: no triangular structure is
claimed for resolvents).  It cross-checks the series/elimination routes on
the functions both can compute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonConvergenceError, NotPositiveDefiniteError, NumericalError
from .factorizations import FactorizationResult, _check_hermitian, relative_residual
from .matrices import SectionMatrix, opnorm_estimate

#: Taylor terms below this max-norm are considered converged
EXPM_TERM_TOL = 1e-16


def expm(a, term_tol=EXPM_TERM_TOL, max_terms=400):
    """Scaling-and-squaring exponential with a straight Taylor core.

    The input is scaled by 2^-j until its max-entry norm is at most 0.5,
    the Taylor series is summed until the newest term drops below term_tol
    in max norm, and the result is squared back j times.
    """
    m = a.size
    maxabs = float(np.max(np.abs(a.data)))
    j = 0
    scaled = a.data.copy()
    while maxabs > 0.5:
        maxabs *= 0.5
        j += 1
    if j:
        scaled = scaled / (2.0**j)
    result = np.eye(m, dtype=np.complex128)
    term = np.eye(m, dtype=np.complex128)
    for k in range(1, max_terms + 1):
        term = term @ scaled / k
        result += term
        if float(np.max(np.abs(term))) < term_tol:
            break
    else:  # pragma: no cover - the scaled series always meets the gate
        raise NonConvergenceError("exponential series", max_terms,
                                  float(np.max(np.abs(term))))
    for _ in range(j):
        result = result @ result
    return SectionMatrix(a.n, result, label="expm")


def sqrtm_hpd(a, tol=1e-13, max_iter=60):
    """Principal square root of a Hermitian positive definite section by the
    coupled averaging iteration y <- (y + z^-1)/2, z <- (z + y^-1)/2."""
    _check_hermitian(a)
    _, status = _kernels.cholesky_factor(np.ascontiguousarray(a.data))
    if status >= 0:
        raise NotPositiveDefiniteError(status + 1)
    m = a.size
    y = np.asarray(a.data, dtype=np.complex128).copy()
    z = np.eye(m, dtype=np.complex128)
    scale = float(np.max(np.abs(a.data)))
    delta = np.inf
    for _ in range(max_iter):
        try:
            zinv = np.linalg.inv(z)
            yinv = np.linalg.inv(y)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("square-root iterate is singular: %s" % exc) from None
        y, z = 0.5 * (y + zinv), 0.5 * (z + yinv)
        y = 0.5 * (y + y.conj().T)  # iterates stay Hermitian; fold roundoff
        z = 0.5 * (z + z.conj().T)
        delta = float(np.max(np.abs(y @ y - a.data)))
        if delta <= tol * scale:
            return SectionMatrix(a.n, y, label="sqrt")
    raise NonConvergenceError("square-root iteration", max_iter, delta)


@dataclass(frozen=True)
class Contour:
    """Circle contour for the functional calculus."""

    center: complex
    radius: float
    points: int

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("contour radius must be positive")
        if self.points < 8 or self.points % 2:
            raise ValueError("contour needs an even number of points, at least 8")


def default_contour(a, points=256, pad=1.25):
    """Circle centered at the mean diagonal entry with radius pad times the
    norm-distance of a to that center; encloses the whole spectrum."""
    center = complex(np.trace(a.data) / a.size)
    shifted = SectionMatrix(a.n, a.data - center * np.eye(a.size))
    radius = pad * opnorm_estimate(shifted)
    if radius == 0.0:
        radius = pad  # scalar multiple of the identity: any circle works
    return Contour(center=center, radius=float(radius), points=int(points))


#: named scalar functions usable from configs and the command line
FUNCTION_REGISTRY = {
    "one": lambda z: 1.0 + 0.0j,
    "identity": lambda z: z,
    "exp": np.exp,
    "inverse": lambda z: 1.0 / z,
    "sqrt_principal": lambda z: np.sqrt(z + 0.0j),
}


def riesz_dunford(a, f, contour=None):
    """Trapezoid contour functional calculus for f(a).

    The spectrum must lie strictly inside the contour; for the default
    centered circle the operator-norm gate radius > norm(a - center) is a
    sufficient check and is enforced.  f may be a callable or a name from
    FUNCTION_REGISTRY.
    """
    if isinstance(f, str):
        try:
            f = FUNCTION_REGISTRY[f]
        except KeyError:
            raise ValueError("unknown function name %r" % f) from None
    if contour is None:
        contour = default_contour(a)
    shifted = SectionMatrix(a.n, a.data - contour.center * np.eye(a.size))
    if opnorm_estimate(shifted) >= contour.radius:
        raise ValueError(
            "norm gate failed: spectrum may touch the contour "
            "(norm distance >= radius)"
        )
    m = a.size
    thetas = 2.0 * np.pi * np.arange(contour.points) / contour.points
    acc = np.zeros((m, m), dtype=np.complex128)
    eye = np.eye(m, dtype=np.complex128)
    for theta in thetas:
        rot = np.exp(1j * theta)
        lam = contour.center + contour.radius * rot
        try:
            resolvent = np.linalg.solve(lam * eye - a.data, eye)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                "resolvent solve failed at a node (eigenvalue near contour): %s" % exc
            ) from None
        acc += complex(f(lam)) * rot * resolvent
    acc *= contour.radius / contour.points
    return SectionMatrix(a.n, acc, label="riesz_dunford")


def polar_via_sqrt(a):
    """Right polar factorization via p = (a* a)^(1/2), u = a p^-1.

    Independent route from the averaging iteration in factorizations.polar;
    the two agree for invertible input.
    """
    gram = SectionMatrix(a.n, a.data.conj().T @ a.data)
    p = sqrtm_hpd(gram)
    try:
        pinv = np.linalg.inv(p.data)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("positive factor is singular: %s" % exc) from None
    u = SectionMatrix(a.n, a.data @ pinv, label="U_polar")
    f2 = SectionMatrix(a.n, p.data, label="P")
    return FactorizationResult(
        kind="polar_right",
        f1=u,
        f2=f2,
        residual=relative_residual(a, u, f2),
        convention="via_sqrt",
    )
