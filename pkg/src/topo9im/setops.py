"""Set-operator expression trees over convex bodies.

An expression combines body leaves with complement, union, intersection,
difference and symmetric difference.  The topological unaries (interior,
boundary, closure) are restricted to leaves: on a single convex body
they reduce to a mode flag, while on composites they would need genuine
boundary bookkeeping that this package deliberately leaves out.  The
payoff of the restriction is that plain pointwise membership is exact
for every expression, which is all the nine-intersection tests need.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import ExprSyntaxError, UnsupportedCompositeError
from .exact import Location, Point3
from .polytope import Body, classify_point


class Mode(Enum):
    CLOSED = "C"
    INTERIOR = "I"
    BOUNDARY = "B"


class SetExpr:
    """Base class; immutable nodes, construct via the module functions."""

    __slots__ = ()

    def _member(self, p: Point3) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Leaf(SetExpr):
    body: Body
    mode: Mode = Mode.CLOSED

    def _member(self, p: Point3) -> bool:
        loc = classify_point(self.body, p)
        if self.mode is Mode.CLOSED:
            return loc is not Location.OUT
        if self.mode is Mode.INTERIOR:
            return loc is Location.IN
        return loc is Location.ON


@dataclass(frozen=True)
class Complement(SetExpr):
    child: SetExpr

    def _member(self, p: Point3) -> bool:
        return not self.child._member(p)


@dataclass(frozen=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr

    def _member(self, p: Point3) -> bool:
        return self.left._member(p) or self.right._member(p)


@dataclass(frozen=True)
class Intersection(SetExpr):
    left: SetExpr
    right: SetExpr

    def _member(self, p: Point3) -> bool:
        return self.left._member(p) and self.right._member(p)


@dataclass(frozen=True)
class Difference(SetExpr):
    left: SetExpr
    right: SetExpr

    def _member(self, p: Point3) -> bool:
        return self.left._member(p) and not self.right._member(p)


@dataclass(frozen=True)
class SymDiff(SetExpr):
    left: SetExpr
    right: SetExpr

    def _member(self, p: Point3) -> bool:
        return self.left._member(p) != self.right._member(p)


def _as_leaf(x, op: str) -> Leaf:
    if isinstance(x, Body):
        return Leaf(x, Mode.CLOSED)
    if isinstance(x, Leaf):
        return x
    raise UnsupportedCompositeError(f"{op} applies to leaf bodies only")


def closed(body: Body) -> Leaf:
    """The body as a closed point set."""
    return Leaf(body, Mode.CLOSED)


def interior(x) -> Leaf:
    """I(x).  Idempotent on interior leaves; I(C(A)) = I(A) for a convex
    body.  The interior of a boundary leaf would be empty, which this
    algebra has no node for, so it is rejected like a composite."""
    leaf = _as_leaf(x, "interior")
    if leaf.mode is Mode.BOUNDARY:
        raise UnsupportedCompositeError("interior of a boundary leaf is not representable")
    return Leaf(leaf.body, Mode.INTERIOR)


def boundary(x) -> Leaf:
    """B(x).  For a convex body, closed set, interior and boundary all
    share the same boundary surface."""
    leaf = _as_leaf(x, "boundary")
    return Leaf(leaf.body, Mode.BOUNDARY)


def closure(x) -> Leaf:
    """C(x).  Closure of the closed leaf or the interior leaf is the
    closed body; the boundary surface is already closed."""
    leaf = _as_leaf(x, "closure")
    if leaf.mode is Mode.BOUNDARY:
        return leaf
    return Leaf(leaf.body, Mode.CLOSED)


def exterior(x) -> SetExpr:
    """E(x) = complement of the closed body."""
    return Complement(closure(x))


def complement(e) -> Complement:
    return Complement(_coerce(e))


def union(a, b) -> Union:
    return Union(_coerce(a), _coerce(b))


def intersection(a, b) -> Intersection:
    return Intersection(_coerce(a), _coerce(b))


def difference(a, b) -> Difference:
    return Difference(_coerce(a), _coerce(b))


def symdiff(a, b) -> SymDiff:
    return SymDiff(_coerce(a), _coerce(b))


def _coerce(e) -> SetExpr:
    if isinstance(e, Body):
        return Leaf(e, Mode.CLOSED)
    if isinstance(e, SetExpr):
        return e
    raise TypeError(f"not a set expression: {e!r}")


def member(e: SetExpr, p: Point3) -> bool:
    """Exact membership of the point in the set the expression denotes."""
    return _coerce(e)._member(p)


# --- textual form ---------------------------------------------------------
#
# expr := NAME "(" expr ("," expr)* ")" | IDENT
# where NAME is one of I, B, C, comp, union, inter, diff, symdiff and a
# bare IDENT is the closed body bound to that name.

_TOKEN_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[(),])")

_UNARY = {"I": interior, "B": boundary, "C": closure, "comp": complement}
_BINARY = {"union": union, "inter": intersection, "diff": difference, "symdiff": symdiff}


def parse_expr(text: str, bindings) -> SetExpr:
    """Parse the textual expression form against a name -> Body mapping."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ExprSyntaxError(f"unexpected character {text[pos:].strip()[0]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    it = iter(tokens)
    current = next(it, None)

    def advance():
        nonlocal current
        tok, current = current, next(it, None)
        return tok

    def expect(tok):
        if current != tok:
            raise ExprSyntaxError(f"expected {tok!r}, got {current!r}")
        advance()

    def parse() -> SetExpr:
        if current is None:
            raise ExprSyntaxError("unexpected end of expression")
        name = advance()
        if name in "(),":
            raise ExprSyntaxError(f"unexpected {name!r}")
        if current != "(":
            if name not in bindings:
                raise ExprSyntaxError(f"unknown body name {name!r}")
            return Leaf(bindings[name], Mode.CLOSED)
        advance()
        args = [parse()]
        while current == ",":
            advance()
            args.append(parse())
        expect(")")
        if name in _UNARY:
            if len(args) != 1:
                raise ExprSyntaxError(f"{name} takes one argument")
            return _UNARY[name](args[0])
        if name in _BINARY:
            if len(args) != 2:
                raise ExprSyntaxError(f"{name} takes two arguments")
            return _BINARY[name](args[0], args[1])
        raise ExprSyntaxError(f"unknown operator {name!r}")

    result = parse()
    if current is not None:
        raise ExprSyntaxError(f"trailing input at {current!r}")
    return result
