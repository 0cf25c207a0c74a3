"""Exception hierarchy shared by all treedist modules.

Every error a metric can raise is a subclass of TreeDistError, so callers
(and the CLI) can catch one type and still report a precise diagnostic.
"""


class TreeDistError(Exception):
    """Base class for all treedist errors."""


class ValidationError(TreeDistError):
    """A tree failed a structural invariant."""


class DuplicateLabelError(ValidationError):
    """Two leaves in one tree carry the same label."""


class NegativeWeightError(ValidationError):
    """An edge weight is negative."""


class LabelSetMismatchError(TreeDistError):
    """The two trees are not defined over the same label set."""


class RootednessError(TreeDistError):
    """Operation requires rooted (or unrooted) input and got the opposite."""


class UnrootedInputError(RootednessError):
    """Operation requires a rooted tree."""


class UnweightedInputError(TreeDistError):
    """Operation requires edge weights."""


class UnknownLabelError(TreeDistError):
    """A label was requested that no leaf of the tree carries."""


class EdgeNotFoundError(TreeDistError):
    """The named edge is not an edge of the tree."""


class DomainError(TreeDistError):
    """Numeric argument outside the operation's domain."""


class SubsetSizeError(TreeDistError):
    """Induced-topology query with a subset of the wrong size."""


class TooLargeError(TreeDistError):
    """Input exceeds the size bound of an exact desk-scale search."""


class NewickError(TreeDistError):
    """Base class for Newick parsing problems."""


class NewickSyntaxError(NewickError):
    """Malformed Newick text; carries line and column of the offence."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class EmptyInputError(NewickError):
    """No tree found in the input text."""


class AmbiguousMatchingError(TreeDistError):
    """Raw-mode RFL found more than one admissible edge matching.

    ``candidates`` holds every distance value the competing matchings
    produce, sorted ascending.
    """

    def __init__(self, candidates):
        self.candidates = tuple(sorted(candidates))
        super().__init__(
            "edge matching is not unique; candidate values: "
            + ", ".join(repr(c) for c in self.candidates)
        )


class DegenerateVarianceError(TreeDistError):
    """Correlation undefined: one side has zero variance."""


class ZeroTotalLengthError(TreeDistError):
    """Similarity measure undefined: a tree has zero total edge weight."""


class InvalidTargetError(TreeDistError):
    """Regraft target edge violates the prune-and-regraft preconditions."""


class RootPruneError(TreeDistError):
    """The root itself cannot be pruned."""


class NonConvergenceError(TreeDistError):
    """Defensive guard: iterative refinement exceeded its proven bound."""
