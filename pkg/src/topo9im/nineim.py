"""The 9-intersection matrix and the eight named body relations.

For two bounded full-dimensional convex bodies the matrix R(A,B) holds
the emptiness bit of every pairing of interior, boundary and exterior.
Convexity collapses each bit to a small exact decision:

* interior-interior is nonempty exactly when dim(A ∩ B) = 3;
* the exterior column/row reduces to vertex containment (a convex A
  leaves B exactly when some vertex of A does);
* interior-boundary needs a facet of B whose intersection with A has a
  relative interior point strictly inside A;
* boundary-boundary, in the full-dimensional-intersection case, holds
  exactly when some vertex of K = A ∩ B lies on both boundaries: any
  point of ∂A ∩ ∂B lies on a face of K cut out by a supporting plane
  of A and one of B, and every nonempty face of K contains a vertex
  of K.

When dim(A ∩ B) is 0, 1 or 2 the intersection lies on both boundaries
(interiors cannot meet), so the boundary-boundary bit is forced true
and interior-boundary false; dim -1 forces the whole contact block
false.  Exterior-exterior is always true for bounded bodies.

Every true bit carries a concrete witness point, so callers can
re-check each decision through plain set membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import InvalidBodyError, UnclassifiableMatrixError
from .exact import Location, Point3
from .polytope import (
    Body,
    Polytope,
    _contains_closed,
    classify_point,
    cross_section,
    intersect,
    relint_point,
)

_CELLS = ("II", "IB", "IE", "BI", "BB", "BE", "EI", "EB", "EE")


@dataclass(frozen=True)
class Matrix9:
    """Nine emptiness bits, row part of A by column part of B; True
    means the intersection is nonempty."""

    ii: bool
    ib: bool
    ie: bool
    bi: bool
    bb: bool
    be: bool
    ei: bool
    eb: bool
    ee: bool

    def bits(self) -> tuple[bool, ...]:
        return (self.ii, self.ib, self.ie, self.bi, self.bb, self.be,
                self.ei, self.eb, self.ee)

    def serialize(self) -> str:
        """Row-major T/F string, e.g. disjoint is \"FFTFFTTTT\"."""
        return "".join("T" if b else "F" for b in self.bits())

    @classmethod
    def from_string(cls, text: str) -> "Matrix9":
        if len(text) != 9 or set(text) - {"T", "F"}:
            raise ValueError(f"not a nine-bit T/F string: {text!r}")
        return cls(*(c == "T" for c in text))

    def transpose(self) -> "Matrix9":
        return Matrix9(self.ii, self.bi, self.ei, self.ib, self.bb,
                       self.eb, self.ie, self.be, self.ee)

    def matches(self, pattern: str) -> bool:
        """Conformance against a 9-character pattern with `*` wildcards."""
        return all(p == "*" or p == c for p, c in zip(pattern, self.serialize()))

    def __str__(self) -> str:
        return self.serialize()


class TopoRelation(Enum):
    """The eight binary topological relations between bodies."""

    DISJOINT = "Disjoint"
    MEETS = "Meets"
    EQUALS = "Equals"
    INSIDE = "Inside"
    CONTAINS = "Contains"
    COVERS = "Covers"
    COVERED_BY = "CoveredBy"
    OVERLAPS = "Overlaps"

    @property
    def prop_local(self) -> str:
        """Property local name, e.g. `coveredBy`."""
        return self.value[0].lower() + self.value[1:]

    @property
    def topo_property(self) -> str:
        """Namespace-qualified KB property name, e.g. `topo:coveredBy`."""
        return "topo:" + self.prop_local

    def __str__(self) -> str:
        return self.value


_FULL_PATTERN = {
    TopoRelation.DISJOINT: "FFTFFTTTT",
    TopoRelation.MEETS: "FFTFTTTTT",
    TopoRelation.EQUALS: "TFFFTFFFT",
    TopoRelation.INSIDE: "TFFTFFTTT",
    TopoRelation.CONTAINS: "TTTFFTFFT",
    TopoRelation.COVERED_BY: "TFFTTFTTT",
    TopoRelation.COVERS: "TTTFTTFFT",
    TopoRelation.OVERLAPS: "TTTTTTTTT",
}

_BY_PATTERN = {pat: rel for rel, pat in _FULL_PATTERN.items()}

# Minimal distinguishing patterns: only the cells needed to separate a
# relation from the other seven are pinned, the rest are wildcards.
# For meets the pinned cells are empty interiors plus touching
# boundaries (an interior-boundary contact without interior-interior
# contact is impossible for full-dimensional bodies).  The inside
# pattern is the transpose of the contains pattern.
_PARTIAL_PATTERN = {
    TopoRelation.DISJOINT: "FFTFFTTTT",
    TopoRelation.MEETS: "F***T****",
    TopoRelation.EQUALS: "*FFF*FFF*",
    TopoRelation.CONTAINS: "T*****FF*",
    TopoRelation.INSIDE: "T*F**F***",
}

_INVERSE = {
    TopoRelation.INSIDE: TopoRelation.CONTAINS,
    TopoRelation.CONTAINS: TopoRelation.INSIDE,
    TopoRelation.COVERS: TopoRelation.COVERED_BY,
    TopoRelation.COVERED_BY: TopoRelation.COVERS,
}


def classify(m: Matrix9) -> TopoRelation:
    """The unique named relation whose full pattern equals the matrix."""
    try:
        return _BY_PATTERN[m.serialize()]
    except KeyError:
        raise UnclassifiableMatrixError(
            f"matrix {m.serialize()} matches none of the eight relations"
        ) from None


def inverse_relation(r: TopoRelation) -> TopoRelation:
    return _INVERSE.get(r, r)


def relation_pattern(r: TopoRelation) -> str:
    """Conformance pattern for the relation: the printed partial matrix
    where the source gives one, the completed pattern otherwise."""
    return _PARTIAL_PATTERN.get(r, _FULL_PATTERN[r])


def _ensure_body(x) -> Body:
    if not isinstance(x, Polytope):
        raise InvalidBodyError(f"not a polytope: {x!r}")
    return x.to_body()


def _outside_vertex(A: Body, B: Body) -> Point3 | None:
    """First vertex of A outside B, None when A is a subset of B."""
    for v, hom in zip(A.vertices, A.vertex_homs()):
        if not _contains_closed(B, hom):
            return v
    return None


def _push_inside(A: Body, v: Point3, B: Body) -> Point3:
    """A point strictly inside A and still outside B, found by sliding
    from the outside vertex v toward the centroid of A.  Terminates
    because B is closed and v is outside it."""
    c = relint_point(A)
    t = Fraction(1, 2)
    while True:
        w = Point3(v.x + t * (c.x - v.x), v.y + t * (c.y - v.y), v.z + t * (c.z - v.z))
        if classify_point(B, w) is Location.OUT:
            return w
        t /= 2


def _avg(points) -> Point3:
    n = len(points)
    return Point3(
        sum(p.x for p in points) / n,
        sum(p.y for p in points) / n,
        sum(p.z for p in points) / n,
    )


def _facet_probe(K: Polytope, B: Body, A: Body) -> Point3 | None:
    """Witness for interior(A) meeting boundary(B), or None.

    For each facet plane of B, G = K ∩ plane is A ∩ facet.  If G meets
    the interior of A then the whole relative interior of G lies in it,
    so probing the vertex average of G decides the facet exactly.
    """
    for hs_index, _ in B.facets:
        pts = cross_section(K, B.halfspaces[hs_index])
        if pts:
            g = _avg(pts)
            if classify_point(A, g) is Location.IN:
                return g
    return None


def _boundary_vertex(K: Polytope, A: Body, B: Body) -> Point3 | None:
    """Vertex of K on both boundaries, or None.

    Complete when dim K = 3: a point of bd(A) ∩ bd(B) lies in K and on
    a supporting plane of A and one of B, so K cut by those two planes
    is a nonempty face of K; every nonempty face of a polytope contains
    one of its vertices, and faces only move points further onto the
    boundaries, never off them.  Scanning K's vertices therefore finds
    a shared boundary point whenever one exists."""
    for v in K.vertices:
        if classify_point(A, v) is Location.ON and classify_point(B, v) is Location.ON:
            return v
    return None


def _bbox_separated(A: Body, B: Body) -> bool:
    # strictly separated bounding intervals on some axis imply A and B
    # are disjoint and the intersection can be skipped entirely
    for (a0, a1), (b0, b1) in zip(A.bbox(), B.bbox()):
        if a1 < b0 or b1 < a0:
            return True
    return False


def compute_matrix_with_witnesses(A, B) -> tuple[Matrix9, dict[str, Point3]]:
    """The matrix plus one witness point per true bit, keyed II..EE."""
    A = _ensure_body(A)
    B = _ensure_body(B)
    w: dict[str, Point3] = {}

    abox, bbox_ = A.bbox(), B.bbox()
    w["EE"] = Point3(
        max(abox[0][1], bbox_[0][1]) + 1,
        max(abox[1][1], bbox_[1][1]) + 1,
        max(abox[2][1], bbox_[2][1]) + 1,
    )

    va = _outside_vertex(A, B)
    a_leaves_b = va is not None
    if a_leaves_b:
        w["BE"] = va
        w["IE"] = _push_inside(A, va, B)
    vb = _outside_vertex(B, A)
    b_leaves_a = vb is not None
    if b_leaves_a:
        w["EB"] = vb
        w["EI"] = _push_inside(B, vb, A)

    if _bbox_separated(A, B):
        d = -1
    else:
        K = intersect(A, B)
        d = K.dim

    ii = ib = bi = bb = False
    if d == 3:
        ii = True
        w["II"] = relint_point(K)
        g = _facet_probe(K, B, A)
        if g is not None:
            ib = True
            w["IB"] = g
        g = _facet_probe(K, A, B)
        if g is not None:
            bi = True
            w["BI"] = g
        v = _boundary_vertex(K, A, B)
        if v is not None:
            bb = True
            w["BB"] = v
    elif d >= 0:
        # K has no volume, so no point of K is interior to either body:
        # p in K ∩ int(A) plus any q in int(B) gives segment points near
        # p lying in int(A) ∩ int(B), making K full-dimensional.  Hence
        # all of K lies on both boundaries.
        bb = True
        w["BB"] = relint_point(K)

    m = Matrix9(ii=ii, ib=ib, ie=a_leaves_b, bi=bi, bb=bb, be=a_leaves_b,
                ei=b_leaves_a, eb=b_leaves_a, ee=True)
    return m, w


def compute_matrix(A, B) -> Matrix9:
    """The exact 9-intersection matrix of two bodies."""
    return compute_matrix_with_witnesses(A, B)[0]


def classify_pair(A, B) -> TopoRelation:
    """compute_matrix + classify in one call."""
    return classify(compute_matrix(A, B))
