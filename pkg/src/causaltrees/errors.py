"""Exception taxonomy shared across the package."""


class CausalTreeError(Exception):
    """Base class for all errors raised by this package."""


# --- graph construction / validation ---

class CycleError(CausalTreeError):
    """The edge set contains a directed cycle."""


class MultipleParentsError(CausalTreeError):
    """Some node has more than one parent."""


class DisconnectedError(CausalTreeError):
    """The edge set does not span all nodes."""


class MultipleRootsError(CausalTreeError):
    """More than one node has no parent."""


class NotEquivalentError(CausalTreeError):
    """The two trees do not share a skeleton (or differ beyond one path)."""


class EqualTreesError(CausalTreeError):
    """The two trees are identical, so there is no reversed path."""


# --- solver ---

class InfeasibleError(CausalTreeError):
    """No spanning arborescence exists under the given constraints."""


# --- data quality ---

class LengthMismatch(CausalTreeError):
    """Paired arrays have different lengths."""


class NonFiniteInput(CausalTreeError):
    """Input contains NaN or infinity."""


class TooFewSamples(CausalTreeError):
    """Not enough observations for the requested computation."""


class DegenerateSample(CausalTreeError):
    """Sample collapses to identical points even after tie-breaking jitter."""


class DegenerateColumn(CausalTreeError):
    """A data column has zero variance (or an identically-zero residual)."""


# --- scoring / inference / diagnostics ---

class ForbiddenEdgeInTree(CausalTreeError):
    """A tree uses an edge marked forbidden in the weight matrix."""


class ZeroMoment(CausalTreeError):
    """A moment estimate is zero where a logarithm or ratio needs it positive."""


class NoTriples(CausalTreeError):
    """The tree admits no (parent, child, other-neighbour) triples."""


class CholeskyFailure(CausalTreeError):
    """Covariance factorization failed even after jitter escalation."""
