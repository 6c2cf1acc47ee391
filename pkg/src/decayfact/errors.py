"""Structured numerical errors raised by the factorization and series routines."""


class NumericalError(Exception):
    """Base class for structured numerical failures (as opposed to usage errors)."""


class PivotBreakdownError(NumericalError):
    """Unpivoted elimination hit a numerically zero pivot.

    ``step`` is the 1-based elimination step at which the pivot failed.
    """

    def __init__(self, step, pivot=None):
        self.step = step
        self.pivot = pivot
        msg = "pivot breakdown at step %d" % step
        if pivot is not None:
            msg += " (|pivot| = %.3e)" % abs(pivot)
        super().__init__(msg)


class NotHermitianError(NumericalError):
    def __init__(self, asymmetry, bound):
        self.asymmetry = asymmetry
        self.bound = bound
        super().__init__(
            "input is not Hermitian: max|a - a*| = %.3e exceeds %.3e" % (asymmetry, bound)
        )


class NotPositiveDefiniteError(NumericalError):
    """Hermitian input produced a nonpositive pivot (1-based ``step``)."""

    def __init__(self, step, pivot=None):
        self.step = step
        self.pivot = pivot
        msg = "nonpositive pivot at step %d" % step
        if pivot is not None:
            msg += " (pivot = %.3e)" % pivot
        super().__init__(msg)


class RankDeficiencyError(NumericalError):
    """Orthogonal elimination met a zero column norm (1-based ``step``)."""

    def __init__(self, step):
        self.step = step
        super().__init__("zero column norm at elimination step %d" % step)


class SingularTriangularError(NumericalError):
    """Triangular matrix has a zero diagonal entry (1-based ``step``)."""

    def __init__(self, step):
        self.step = step
        super().__init__("zero diagonal entry at position %d" % step)


class NotContractionError(NumericalError):
    """Series construction requires the operator-norm distance to the identity < 1."""

    def __init__(self, norm_estimate):
        self.norm_estimate = norm_estimate
        super().__init__(
            "distance to identity in operator norm is %.6f >= 1; series would diverge"
            % norm_estimate
        )


class NonConvergenceError(NumericalError):
    def __init__(self, what, iterations, last_delta):
        self.what = what
        self.iterations = iterations
        self.last_delta = last_delta
        super().__init__(
            "%s did not converge within %d iterations (last increment %.3e)"
            % (what, iterations, last_delta)
        )


class StabilizationError(NumericalError):
    """Doubling the section size never stabilized the probed central entries."""

    def __init__(self, n_max, last_change):
        self.n_max = n_max
        self.last_change = last_change
        super().__init__(
            "central entries still changing by %.3e at half-width %d" % (last_change, n_max)
        )
