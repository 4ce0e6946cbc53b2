"""Exception hierarchy shared by all modules."""


class WeakBesovError(Exception):
    """Base class for library errors."""


class TailBudgetExceeded(WeakBesovError):
    """The materialized zero list cannot meet the requested truncation error."""


class ZeroOnRay(WeakBesovError):
    """A boundary-derivative term overflowed because a zero sits on the ray of xi."""


class IllConditioned(WeakBesovError):
    """Evaluation point too close to a boundary singularity."""


class InconclusiveDepth(WeakBesovError):
    """The examined annulus range cannot distinguish the classification."""


class DepthLimit(WeakBesovError):
    """Grid refinement hit the configured maximum depth."""


class RangeTooNarrow(WeakBesovError):
    """The supremum over the lambda grid was attained at lambda_max."""


class QuadratureStall(WeakBesovError):
    """Angular doubling reached its cap before meeting the tolerance."""


class EvaluationFailure(WeakBesovError):
    """A user function failed while being sampled on a grid."""
