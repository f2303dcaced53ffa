"""Exact rational scalars and the low-level geometric predicates.

Every emptiness decision downstream reduces to sign tests done here, so
nothing in this module may round: scalars are arbitrary-precision
rationals, halfspace coefficients are canonical integers, and rank is
computed by exact elimination.  Decimal input text is read as the exact
decimal value (0.1 means 1/10, not the nearest binary float).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import gcd

from .errors import RationalParseError

# Exact rational scalar used throughout the public API.
Rat = Fraction

_RAT_RE = re.compile(r"-?\d+(?:\.\d+)?$|-?\d+/\d+$")


def parse_rational(text: str) -> Rat:
    """Parse ``digits``, ``digits.digits`` or ``digits/digits`` (optional
    leading minus) into an exact rational."""
    token = text.strip()
    if not _RAT_RE.match(token):
        raise RationalParseError(f"not a rational number: {token!r}")
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise RationalParseError(f"zero denominator: {token!r}")
        return Fraction(int(num), int(den))
    return Fraction(token)  # Fraction reads decimal text exactly


class Side(Enum):
    """Position of a point relative to a halfspace boundary plane."""

    NEG = -1  # strictly inside the halfspace
    ON = 0
    POS = 1  # strictly outside


class Location(Enum):
    """Position of a point relative to a polytope."""

    IN = "in"
    ON = "on"
    OUT = "out"


@dataclass(frozen=True, order=True)
class Point3:
    """Point in model units; coordinates are exact rationals."""

    x: Rat
    y: Rat
    z: Rat

    @cached_property
    def homogeneous(self) -> tuple[int, int, int, int]:
        """Integer form (xn, yn, zn, d) with d > 0; used by hot sign tests."""
        dx, dy, dz = self.x.denominator, self.y.denominator, self.z.denominator
        d = dx * dy // gcd(dx, dy)
        d = d * dz // gcd(d, dz)
        return (
            self.x.numerator * (d // dx),
            self.y.numerator * (d // dy),
            self.z.numerator * (d // dz),
            d,
        )

    def coords(self) -> tuple[Rat, Rat, Rat]:
        return (self.x, self.y, self.z)

    def __str__(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"


def point(x, y, z) -> Point3:
    """Build a Point3, accepting ints, Fractions or rational text."""
    return Point3(_as_rat(x), _as_rat(y), _as_rat(z))


def _as_rat(v) -> Rat:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return parse_rational(v)
    raise TypeError(f"not an exact rational: {v!r}")


def _primitive(ints: tuple[int, ...]) -> tuple[int, ...]:
    """Divide by the gcd; zero vector stays zero.  Sign is preserved."""
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g <= 1:
        return ints
    return tuple(v // g for v in ints)


@dataclass(frozen=True)
class Halfspace:
    """Closed halfspace {p : a.p <= b}.

    Coefficients are stored as the canonical integer representative of
    the defining inequality (primitive vector, obtained by positive
    scaling only, which leaves the point set unchanged).  Used with an
    equality constraint it denotes the plane a.p = b.
    """

    a: tuple[int, int, int]
    b: int

    def __post_init__(self):
        a1, a2, a3, b = *self.a, self.b
        lcm = 1
        fracs = [_as_rat(v) for v in (a1, a2, a3, b)]
        for f in fracs:
            lcm = lcm * f.denominator // gcd(lcm, f.denominator)
        ints = tuple(int(f * lcm) for f in fracs)
        ints = _primitive(ints)
        if ints[:3] == (0, 0, 0):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", ints[:3])
        object.__setattr__(self, "b", ints[3])

    def plane_key(self) -> tuple[int, int, int, int]:
        """Sign-normalized key identifying the boundary plane (a.p = b)."""
        v = (*self.a, self.b)
        for c in v[:3]:
            if c > 0:
                return v
            if c < 0:
                return tuple(-x for x in v)
        return v

    def flipped(self) -> "Halfspace":
        """The opposite halfspace {p : a.p >= b}."""
        return Halfspace(tuple(-c for c in self.a), -self.b)

    def eval_at(self, p: Point3) -> Rat:
        a1, a2, a3 = self.a
        return a1 * p.x + a2 * p.y + a3 * p.z - self.b

    def __str__(self) -> str:
        a1, a2, a3 = self.a
        return f"{a1}x{a2:+}y{a3:+}z <= {self.b}"


def halfspace(a1, a2, a3, b) -> Halfspace:
    """Build the halfspace a1*x + a2*y + a3*z <= b from rational inputs."""
    return Halfspace((_as_rat(a1), _as_rat(a2), _as_rat(a3)), _as_rat(b))


def side(h: Halfspace, p: Point3) -> Side:
    """Sign of a.p - b: NEG strictly inside, ON on the plane, POS outside."""
    s = _side_int(h.a, h.b, p.homogeneous)
    return Side.NEG if s < 0 else Side.ON if s == 0 else Side.POS


def _side_int(a: tuple[int, int, int], b: int, hom: tuple[int, int, int, int]) -> int:
    # sign of a.p - b with p = (xn, yn, zn, d) / d, d > 0
    xn, yn, zn, d = hom
    v = a[0] * xn + a[1] * yn + a[2] * zn - b * d
    return -1 if v < 0 else (0 if v == 0 else 1)


def dot3(u: tuple, v: tuple):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross3(u: tuple, v: tuple) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def sub(p: Point3, q: Point3) -> tuple[Rat, Rat, Rat]:
    return (p.x - q.x, p.y - q.y, p.z - q.z)


def det3(r0: tuple, r1: tuple, r2: tuple):
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def intersect_planes(h1: Halfspace, h2: Halfspace, h3: Halfspace) -> Point3 | None:
    """Unique common point of three boundary planes, or None if the
    normals are linearly dependent.  Solved by Cramer's rule on the
    integer coefficients, so the result is exact."""
    rows = (h1.a, h2.a, h3.a)
    d = det3(*rows)
    if d == 0:
        return None
    b = (h1.b, h2.b, h3.b)

    def replaced(col: int) -> int:
        return det3(
            *(tuple(b[i] if j == col else rows[i][j] for j in range(3)) for i in range(3))
        )

    return Point3(Fraction(replaced(0), d), Fraction(replaced(1), d), Fraction(replaced(2), d))


def affine_dim(points: list[Point3]) -> int:
    """Dimension of the affine hull: -1 for no points, else the exact
    rank of the difference vectors (Gaussian elimination on rationals)."""
    if not points:
        return -1
    p0 = points[0]
    rows = [list(sub(p, p0)) for p in points[1:]]
    rank = 0
    for col in range(3):
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col] != 0:
                f = rows[i][col] / pr[col]
                for j in range(col, 3):
                    rows[i][j] -= f * pr[j]
        rank += 1
        if rank == 3:
            break
    return rank
