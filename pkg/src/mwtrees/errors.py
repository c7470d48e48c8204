"""Exception types shared across the package."""


class MWTreesError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInput(MWTreesError):
    """Input violates a geometric precondition (coincident points, bad beta, ...)."""


class InvalidParallelogram(MWTreesError):
    """Corner or anchor coordinates violate the winged-parallelogram invariants."""


class NotIsomorphic(MWTreesError):
    """The two trees admit no isomorphism compatible with the requested roots."""


class NotACaterpillar(MWTreesError):
    """Removing the leaves of the tree does not leave a path."""


class InvalidLeafSet(MWTreesError):
    """A vertex id passed as a leaf-set member is not a leaf of the tree."""


class SparseViolation(MWTreesError):
    """A leaf set does not satisfy the sparseness conditions needed for pruning."""


class HeightTooSmall(MWTreesError):
    """Pruned-pair construction needs a rooted tree of height at least 2."""


class InvalidSpec(MWTreesError):
    """A generator was asked for a nonsensical size or profile."""


class EmptyKeepSet(MWTreesError):
    """Leaf subsets passed to the star redraw are empty or of unequal size."""


class MissingAnnotation(MWTreesError):
    """The drawing lacks the annotation (corners, line) required by the operation."""


class InvalidEps(MWTreesError):
    """A tolerance or target value must be a finite positive real."""


class NoSafeEps(MWTreesError):
    """The perturbation search bottomed out without finding a safe offset."""


class DegenerateGeometry(MWTreesError):
    """A construction produced coordinates too extreme to verify reliably."""


class ParseError(MWTreesError):
    """A document failed to parse; the message names the offending field."""
