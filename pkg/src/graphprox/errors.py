"""Exception types raised across the package.

Everything derives from GraphProxError so callers can catch the whole
family with one clause.  The ValueError / RuntimeError mixins keep the
types usable with idiomatic ``except ValueError`` blocks as well.
"""


class GraphProxError(Exception):
    """Base class for all errors raised by graphprox."""


class IndexOutOfRange(GraphProxError, ValueError):
    """A node index is negative or >= the declared node count."""


class SelfLoop(GraphProxError, ValueError):
    """An edge connects a node to itself."""


class IsolatedNode(GraphProxError, ValueError):
    """An operation requiring positive degrees met a degree-zero node."""


class NoConvergence(GraphProxError, RuntimeError):
    """An iterative computation failed to reach its tolerance."""


class AlphaOutOfRange(GraphProxError, ValueError):
    """A kernel parameter alpha lies outside its valid open interval."""


class NotPSD(GraphProxError, ValueError):
    """A matrix required to be positive semi-definite is not."""


class BadK(GraphProxError, ValueError):
    """A requested cluster count k is < 1 or > number of points."""


class MalformedDistance(GraphProxError, ValueError):
    """A squared-distance matrix is not symmetric with a zero diagonal."""


class EigFailure(GraphProxError, RuntimeError):
    """The symmetric eigendecomposition did not converge."""


class BadRange(GraphProxError, ValueError):
    """Numeric bounds are inconsistent (e.g. min > max, non-positive)."""


class Infeasible(GraphProxError, ValueError):
    """Benchmark parameters admit no valid realization."""


class GenerationFailed(GraphProxError, RuntimeError):
    """Benchmark generation exhausted its retry budget."""


class LengthMismatch(GraphProxError, ValueError):
    """Two label vectors that must align have different lengths."""


class TooFewNodes(GraphProxError, ValueError):
    """A computation needs more nodes than the input provides."""


class MixedSweep(GraphProxError, ValueError):
    """Result rows from different sweep axes were mixed in one plot."""


class ConfigError(GraphProxError, ValueError):
    """An experiment configuration file is malformed or inconsistent."""


class SkipLimitExceeded(GraphProxError, RuntimeError):
    """Too large a fraction of replicates had to be skipped in a cell."""


class SweepError(GraphProxError, RuntimeError):
    """Every cell of a sweep failed; no results were produced."""
