"""Exception hierarchy shared across the package."""


class Topo9imError(Exception):
    """Base class for all errors raised by this package."""


class RationalParseError(Topo9imError, ValueError):
    """Text does not denote an exact rational number."""


class EmptyGeometryError(Topo9imError):
    """An operation needed a nonempty polytope and got an empty one."""


class UnboundedError(Topo9imError):
    """A halfspace system describes an unbounded set; bodies must be bounded."""


class InvalidBodyError(Topo9imError):
    """Geometry is not a bounded, full-dimensional convex body."""


class UnsupportedCompositeError(Topo9imError):
    """Interior, closure and boundary apply to leaf bodies only."""


class ExprSyntaxError(Topo9imError, ValueError):
    """Textual set expression failed to parse."""


class UnclassifiableMatrixError(Topo9imError):
    """A nine-bit matrix matched none of the eight relation patterns."""


class VocabularyConflictError(Topo9imError):
    """A property was redeclared with different characteristics or inverse."""


class RuleSyntaxError(Topo9imError):
    """Rule text failed to parse; carries the source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class SafetyError(Topo9imError):
    """A head or select variable does not occur in the rule body."""


class UnknownBuiltinError(Topo9imError):
    """A builtin-namespaced atom names no known builtin."""


class MissingGeometryError(Topo9imError):
    """A topological builtin referenced an individual with no body."""


class ComparisonTypeError(Topo9imError, TypeError):
    """A comparison builtin received a non-numeric or unbound operand."""


class SceneError(Topo9imError):
    """A scene manifest is malformed or references bad data."""


class UsageError(Topo9imError):
    """Bad command-line invocation."""
