"""Convex polytopes with exact dual representation.

A polytope here carries both descriptions at once: an irredundant list
of closed halfspaces (plus equality planes spanning the affine hull for
lower-dimensional sets) and the exact vertex list, together with the
facet incidence and the intrinsic dimension.  All construction funnels
through one canonical builder that derives every field from the vertex
set, so two polytopes describing the same point set come out
representation-identical (same vertex order, same facet planes).  That
canonicalization is what makes downstream runs byte-reproducible.

Algorithms are deliberately the simple exact ones:

* hulls enumerate candidate supporting planes from point triples and
  keep the ones with the whole cloud on one side;
* halfspace systems are vertexed by intersecting plane triples and
  keeping feasible points;
* unboundedness is decided by testing the recession cone for a nonzero
  direction, and raw feasibility falls back to Fourier-Motzkin
  elimination when the system has no basic feasible point.

Everything is O(n^3)-ish per polytope, which is fine for the facet
counts this package targets (tens, not thousands).
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .errors import EmptyGeometryError, InvalidBodyError, UnboundedError
from .exact import (
    Halfspace,
    Location,
    Point3,
    Rat,
    _as_rat,
    _primitive,
    _side_int,
    affine_dim,
    cross3,
    det3,
    dot3,
    intersect_planes,
)

_AXES = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class Polytope:
    """Bounded convex polytope; immutable after construction.

    Build instances through :func:`hull_from_points`,
    :func:`from_halfspaces`, :func:`intersect` or :func:`box`, never by
    calling the constructor directly.
    """

    __slots__ = ("halfspaces", "equalities", "vertices", "facets", "dim",
                 "_edges", "_homs", "_bbox")

    def __init__(self, halfspaces, equalities, vertices, facets, dim):
        self.halfspaces: tuple[Halfspace, ...] = tuple(halfspaces)
        self.equalities: tuple[Halfspace, ...] = tuple(equalities)
        self.vertices: tuple[Point3, ...] = tuple(vertices)
        self.facets: tuple[tuple[int, tuple[int, ...]], ...] = tuple(facets)
        self.dim: int = dim
        self._edges = None
        self._homs = None
        self._bbox = None

    def __repr__(self):
        return f"<{type(self).__name__} dim={self.dim} V={len(self.vertices)} F={len(self.facets)}>"

    def is_empty(self) -> bool:
        return self.dim == -1

    def vertex_homs(self) -> tuple[tuple[int, int, int, int], ...]:
        if self._homs is None:
            self._homs = tuple(v.homogeneous for v in self.vertices)
        return self._homs

    def bbox(self) -> tuple[tuple[Rat, Rat], tuple[Rat, Rat], tuple[Rat, Rat]]:
        """Exact axis-aligned bounds ((x0,x1),(y0,y1),(z0,z1))."""
        if self.is_empty():
            raise EmptyGeometryError("empty polytope has no bounding box")
        if self._bbox is None:
            xs = [v.x for v in self.vertices]
            ys = [v.y for v in self.vertices]
            zs = [v.z for v in self.vertices]
            self._bbox = ((min(xs), max(xs)), (min(ys), max(ys)), (min(zs), max(zs)))
        return self._bbox

    def edges(self) -> tuple[tuple[int, int], ...]:
        """Vertex-index pairs of the 1-faces.

        Two vertices of a 3-polytope span an edge exactly when they lie
        on two common facets; for a polygon one shared facet (an edge
        support line) is enough.
        """
        if self._edges is None:
            if self.dim < 1:
                self._edges = ()
            elif self.dim == 1:
                self._edges = ((0, 1),)
            else:
                need = 2 if self.dim == 3 else 1
                vfac = defaultdict(set)
                for fi, (_, vids) in enumerate(self.facets):
                    for vid in vids:
                        vfac[vid].add(fi)
                out = []
                n = len(self.vertices)
                for i in range(n):
                    fi_ = vfac[i]
                    for j in range(i + 1, n):
                        if len(fi_ & vfac[j]) >= need:
                            out.append((i, j))
                self._edges = tuple(out)
        return self._edges

    def facet_plane(self, facet_index: int) -> Halfspace:
        return self.halfspaces[self.facets[facet_index][0]]

    def to_body(self) -> "Body":
        if self.dim != 3 or self.equalities:
            raise InvalidBodyError(
                f"body must be full-dimensional and bounded; got dim {self.dim}"
            )
        if isinstance(self, Body):
            return self
        return Body(self.halfspaces, self.equalities, self.vertices, self.facets, self.dim)


class Body(Polytope):
    """Full-dimensional bounded convex polytope (dim 3, no equalities)."""

    __slots__ = ()

    def __init__(self, halfspaces, equalities, vertices, facets, dim):
        super().__init__(halfspaces, equalities, vertices, facets, dim)
        if self.dim != 3 or self.equalities or len(self.facets) < 4:
            raise InvalidBodyError(
                f"body must be full-dimensional and bounded; got dim {self.dim}"
            )

    @classmethod
    def from_points(cls, points) -> "Body":
        return hull_from_points(points).to_body()


_EMPTY = Polytope((), (), (), (), -1)


def _plane(normal: tuple[int, int, int], b) -> Halfspace:
    """Sign-normalized halfspace used as an equality plane."""
    h = Halfspace(normal, b)
    key = h.plane_key()
    return h if (*h.a, h.b) == key else Halfspace(key[:3], key[3])


def _int_dir(p: Point3, q: Point3) -> tuple[int, int, int]:
    """Primitive integer vector parallel to q - p (same orientation)."""
    dx, dy, dz = q.x - p.x, q.y - p.y, q.z - p.z
    lcm = 1
    for f in (dx, dy, dz):
        lcm = lcm * f.denominator // gcd(lcm, f.denominator)
    return _primitive((int(dx * lcm), int(dy * lcm), int(dz * lcm)))


def _rank3(normals) -> int:
    """Rank of a collection of integer 3-vectors (early-outs at 3)."""
    n1 = None
    n2 = None
    for n in normals:
        if n == (0, 0, 0):
            continue
        if n1 is None:
            n1 = n
        elif n2 is None:
            if cross3(n1, n) != (0, 0, 0):
                n2 = n
        elif det3(n1, n2, n) != 0:
            return 3
    return 0 if n1 is None else 1 if n2 is None else 2


def _polytope_from_points(points) -> Polytope:
    """Canonical builder: derive every representation field from a point
    cloud.  Vertices come out lexicographically sorted, facet planes in
    canonical integer form, so the result is independent of input
    order."""
    pts = sorted(set(points))
    if not pts:
        return _EMPTY
    dim = affine_dim(pts)
    if dim == 0:
        p = pts[0]
        eqs = tuple(_plane(ax, dot3(ax, (p.x, p.y, p.z))) for ax in _AXES)
        return Polytope((), eqs, (p,), (), 0)
    if dim == 1:
        return _build_segment(pts)
    if dim == 2:
        return _build_polygon(pts)
    return _build_solid(pts)


def _build_segment(pts) -> Polytope:
    # lexicographic order is monotone along a line, so the extremes are
    # the first and last points
    vmin, vmax = pts[0], pts[-1]
    u = _int_dir(vmin, vmax)
    normals = [n for n in (cross3(u, ax) for ax in _AXES) if n != (0, 0, 0)]
    n1 = _primitive(normals[0])
    n2 = next(_primitive(n) for n in normals[1:] if cross3(n1, n) != (0, 0, 0))
    eqs = tuple(
        sorted(
            (_plane(n, dot3(n, (vmin.x, vmin.y, vmin.z))) for n in (n1, n2)),
            key=lambda h: h.plane_key(),
        )
    )
    neg_u = tuple(-c for c in u)
    lo = Halfspace(neg_u, dot3(neg_u, (vmin.x, vmin.y, vmin.z)))
    hi = Halfspace(u, dot3(u, (vmax.x, vmax.y, vmax.z)))
    return Polytope((lo, hi), eqs, (vmin, vmax), ((0, (0,)), (1, (1,))), 1)


def _plane_row(normal, hom) -> tuple[int, int, int, int]:
    """Canonical integer row (a1,a2,a3,b) of the plane with the given
    integer normal through the point with homogeneous form ``hom``."""
    nx, ny, nz = normal
    xn, yn, zn, d = hom
    return _primitive((nx * d, ny * d, nz * d, nx * xn + ny * yn + nz * zn))


def _row_key(row) -> tuple[int, int, int, int]:
    for c in row[:3]:
        if c > 0:
            return row
        if c < 0:
            return tuple(-x for x in row)
    return row


def _orient_supporting(row, homs) -> tuple[int, int, int, int] | None:
    """Flip the plane row so every point satisfies a.p <= b, or None
    when points lie strictly on both sides.  Pure integer arithmetic:
    this is the hot loop of hull construction."""
    a1, a2, a3, b = row
    lo = hi = False
    for xn, yn, zn, d in homs:
        v = a1 * xn + a2 * yn + a3 * zn - b * d
        if v < 0:
            lo = True
            if hi:
                return None
        elif v > 0:
            hi = True
            if lo:
                return None
    return row if not hi else (-a1, -a2, -a3, -b)


def _build_polygon(pts) -> Polytope:
    p0 = pts[0]
    p1 = next(p for p in pts if p != p0)
    u = _int_dir(p0, p1)
    n = None
    for p in pts:
        w = cross3(u, _int_dir(p0, p)) if p not in (p0, p1) else (0, 0, 0)
        if w != (0, 0, 0):
            n = _primitive(w)
            break
    plane = _plane(n, dot3(n, (p0.x, p0.y, p0.z)))
    homs = [p.homogeneous for p in pts]
    supports: list[Halfspace] = []
    seen = set()
    npts = len(pts)
    for i in range(npts):
        for j in range(i + 1, npts):
            a = cross3(_int_dir(pts[i], pts[j]), n)
            row = _plane_row(a, homs[i])
            key = _row_key(row)
            if key in seen:
                continue
            seen.add(key)
            side = _orient_supporting(row, homs)
            if side is not None:
                supports.append(Halfspace(side[:3], side[3]))
    supports.sort(key=lambda h: (*h.a, h.b))
    return _assemble(pts, supports, (plane,), 2)


def _build_solid(pts) -> Polytope:
    n = len(pts)
    homs = [p.homogeneous for p in pts]
    dirs = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dirs[i][j] = _int_dir(pts[i], pts[j])
    supports: list[Halfspace] = []
    seen = set()
    for i in range(n):
        hom_i = homs[i]
        for j in range(i + 1, n):
            dij = dirs[i][j]
            for k in range(j + 1, n):
                normal = cross3(dij, dirs[i][k])
                if normal == (0, 0, 0):
                    continue
                row = _plane_row(normal, hom_i)
                key = _row_key(row)
                if key in seen:
                    continue
                seen.add(key)
                side = _orient_supporting(row, homs)
                if side is not None:
                    supports.append(Halfspace(side[:3], side[3]))
    supports.sort(key=lambda h: (*h.a, h.b))
    return _assemble(pts, supports, (), 3)


def _assemble(pts, supports, equalities, dim) -> Polytope:
    """Keep the extreme points (active-normal rank 3, counting equality
    normals) and wire up facet incidence."""
    eq_normals = [e.a for e in equalities]
    vertices = []
    for p in pts:
        hom = p.homogeneous
        act = [fi for fi, h in enumerate(supports) if _side_int(h.a, h.b, hom) == 0]
        if _rank3(eq_normals + [supports[fi].a for fi in act]) == 3:
            vertices.append((p, act))
    facet_members = defaultdict(list)
    for vid, (_, act) in enumerate(vertices):
        for fi in act:
            facet_members[fi].append(vid)
    facets = tuple(
        (fi, tuple(facet_members[fi])) for fi in range(len(supports))
    )
    return Polytope(supports, equalities, tuple(p for p, _ in vertices), facets, dim)


def hull_from_points(points) -> Polytope:
    """Convex hull of a finite point set, any intrinsic dimension."""
    pts = list(points)
    if not pts:
        raise EmptyGeometryError("cannot take the hull of no points")
    return _polytope_from_points(pts)


def _dedupe_ineqs(hs) -> list[Halfspace]:
    out = []
    seen = set()
    for h in hs:
        if h not in seen:
            seen.add(h)
            out.append(h)
    return out


def _dedupe_planes(eq) -> list[Halfspace]:
    out = []
    seen = set()
    for h in eq:
        k = h.plane_key()
        if k not in seen:
            seen.add(k)
            out.append(h)
    return out


def _satisfies(hom, ineqs, eqs) -> bool:
    for h in eqs:
        if _side_int(h.a, h.b, hom) != 0:
            return False
    for h in ineqs:
        if _side_int(h.a, h.b, hom) > 0:
            return False
    return True


def _enumerate_vertices(ineqs, eqs) -> list[Point3]:
    """Basic feasible points: intersect every rank-3 triple of boundary
    planes and keep the points satisfying the whole system."""
    planes = _dedupe_planes(list(eqs) + list(ineqs))
    m = len(planes)
    found = set()
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                p = intersect_planes(planes[i], planes[j], planes[k])
                if p is not None and p not in found and _satisfies(p.homogeneous, ineqs, eqs):
                    found.add(p)
    return sorted(found)


def _fm_feasible(rows) -> bool:
    """Fourier-Motzkin feasibility for integer rows (a1,a2,a3,b) meaning
    a.x <= b.  Keeps only the tightest bound per direction after each
    elimination to stay small."""
    rows = list(rows)
    for var in range(3):
        pos = [r for r in rows if r[var] > 0]
        neg = [r for r in rows if r[var] < 0]
        rest = [r for r in rows if r[var] == 0]
        combined = []
        for u in pos:
            cu = u[var]
            for l in neg:
                cl = -l[var]
                combined.append(tuple(u[t] * cl + l[t] * cu for t in range(4)))
        tight: dict[tuple[int, int, int], Fraction] = {}
        for r in rest + combined:
            a = r[:3]
            if a == (0, 0, 0):
                if r[3] < 0:
                    return False
                continue
            g = gcd(gcd(abs(a[0]), abs(a[1])), abs(a[2]))
            key = tuple(c // g for c in a)
            bound = Fraction(r[3], g)
            if key not in tight or bound < tight[key]:
                tight[key] = bound
        rows = [
            (k[0] * b.denominator, k[1] * b.denominator, k[2] * b.denominator, b.numerator)
            for k, b in tight.items()
        ]
    return True


def _system_rows(ineqs, eqs):
    rows = [(*h.a, h.b) for h in ineqs]
    for e in eqs:
        rows.append((*e.a, e.b))
        rows.append((*(-c for c in e.a), -e.b))
    return rows


def _has_recession_direction(ineqs, eqs) -> bool:
    """Does {d : a.d <= 0, e.d = 0} contain a nonzero direction?  Any
    nonzero direction scales so that some coordinate is +-1, so six
    slice feasibility checks decide it."""
    base = [(*h.a, 0) for h in ineqs]
    for e in eqs:
        base.append((*e.a, 0))
        base.append((*(-c for c in e.a), 0))
    for axis in range(3):
        for sign in (1, -1):
            unit = [0, 0, 0]
            unit[axis] = 1
            fix = [(*unit, sign), (*(-c for c in unit), -sign)]
            if _fm_feasible(base + fix):
                return True
    return False


def from_halfspaces(hs, eq=()) -> Polytope:
    """Polytope described by closed halfspaces plus equality planes.

    Empty systems come back as the empty polytope (dim -1); an
    unbounded feasible set raises :class:`UnboundedError`.
    """
    ineqs = _dedupe_ineqs(hs)
    eqs = _dedupe_planes(eq)
    verts = _enumerate_vertices(ineqs, eqs)
    if verts:
        if _has_recession_direction(ineqs, eqs):
            raise UnboundedError("halfspace system has an unbounded direction")
        return _polytope_from_points(verts)
    if _fm_feasible(_system_rows(ineqs, eqs)):
        # nonempty but without a basic feasible point: contains a line
        raise UnboundedError("halfspace system has an unbounded direction")
    return _EMPTY


def feasible(hs, eq=()) -> bool:
    """Exact feasibility of the closed system (halfspaces + equality
    planes).  Tries vertex enumeration first, falls back to
    Fourier-Motzkin for vertex-free systems."""
    ineqs = _dedupe_ineqs(hs)
    eqs = _dedupe_planes(eq)
    if not ineqs and not eqs:
        return True
    if _enumerate_vertices(ineqs, eqs):
        return True
    return _fm_feasible(_system_rows(ineqs, eqs))


def _contains_closed(P: Polytope, hom) -> bool:
    return _satisfies(hom, P.halfspaces, P.equalities)


def intersect(P: Polytope, Q: Polytope) -> Polytope:
    """Exact intersection; empty result has dim -1.

    For two bodies the candidate vertices are found directly (vertices
    of one inside the other, plus edge/facet-plane crossings), which
    avoids the cubic plane-triple sweep of the general path.  Both
    paths feed the same canonical builder.
    """
    if P.is_empty() or Q.is_empty():
        return _EMPTY
    if P.dim == 3 and Q.dim == 3:
        cands = set()
        for A, B in ((P, Q), (Q, P)):
            for v, hom in zip(A.vertices, A.vertex_homs()):
                if _contains_closed(B, hom):
                    cands.add(v)
            homs = A.vertex_homs()
            for (i, j) in A.edges():
                u, v = A.vertices[i], A.vertices[j]
                for h in B.halfspaces:
                    su = _side_int(h.a, h.b, homs[i])
                    sv = _side_int(h.a, h.b, homs[j])
                    if su * sv < 0:
                        eu, ev = h.eval_at(u), h.eval_at(v)
                        t = eu / (eu - ev)
                        w = Point3(
                            u.x + t * (v.x - u.x),
                            u.y + t * (v.y - u.y),
                            u.z + t * (v.z - u.z),
                        )
                        if _contains_closed(B, w.homogeneous):
                            cands.add(w)
        return _polytope_from_points(cands)
    ineqs = _dedupe_ineqs(list(P.halfspaces) + list(Q.halfspaces))
    eqs = _dedupe_planes(list(P.equalities) + list(Q.equalities))
    # both operands are bounded polytopes, so no recession check needed
    return _polytope_from_points(_enumerate_vertices(ineqs, eqs))


def classify_point(P: Polytope, p: Point3) -> Location:
    """IN strictly inside all halfspaces, ON for boundary membership,
    OUT otherwise.  For lower-dimensional polytopes IN is impossible
    and ON means membership."""
    if P.is_empty():
        return Location.OUT
    hom = p.homogeneous
    if P.dim < 3:
        return Location.ON if _satisfies(hom, P.halfspaces, P.equalities) else Location.OUT
    on = False
    for h in P.halfspaces:
        s = _side_int(h.a, h.b, hom)
        if s > 0:
            return Location.OUT
        if s == 0:
            on = True
    return Location.ON if on else Location.IN


def is_subset(P: Polytope, Q: Polytope) -> bool:
    """P within Q; complete for convex operands because it suffices to
    test the vertices of P against the halfspaces (and equalities) of Q."""
    for hom in P.vertex_homs():
        if not _satisfies(hom, Q.halfspaces, Q.equalities):
            return False
    return True


def relint_point(P: Polytope) -> Point3:
    """Equal-weight vertex average; lies in the relative interior."""
    if P.is_empty():
        raise EmptyGeometryError("empty polytope has no relative interior")
    n = len(P.vertices)
    return Point3(
        sum(v.x for v in P.vertices) / n,
        sum(v.y for v in P.vertices) / n,
        sum(v.z for v in P.vertices) / n,
    )


def cross_section(P: Polytope, plane: Halfspace) -> list[Point3]:
    """Vertices of P intersected with the plane a.x = b: the vertices of
    P lying on the plane plus the crossing points of its edges."""
    homs = P.vertex_homs()
    signs = [_side_int(plane.a, plane.b, h) for h in homs]
    out = {v for v, s in zip(P.vertices, signs) if s == 0}
    for (i, j) in P.edges():
        if signs[i] * signs[j] < 0:
            u, v = P.vertices[i], P.vertices[j]
            eu, ev = plane.eval_at(u), plane.eval_at(v)
            t = eu / (eu - ev)
            out.add(Point3(
                u.x + t * (v.x - u.x),
                u.y + t * (v.y - u.y),
                u.z + t * (v.z - u.z),
            ))
    return sorted(out)


def box(x0, x1, y0, y1, z0, z1) -> Body:
    """Axis-aligned box body [x0,x1] x [y0,y1] x [z0,z1]."""
    bounds = [_as_rat(b) for b in (x0, x1, y0, y1, z0, z1)]
    hs = []
    for axis, (lo, hi) in enumerate(zip(bounds[0::2], bounds[1::2])):
        a = [0, 0, 0]
        a[axis] = 1
        hs.append(Halfspace(tuple(a), hi))
        a[axis] = -1
        hs.append(Halfspace(tuple(a), -lo))
    return from_halfspaces(hs).to_body()


def facet_loops(P: Polytope) -> list[tuple[int, list[int]]]:
    """Facet vertex indices in cyclic (counterclockwise from outside)
    order, for mesh export and plotting.  Exact angular sort around the
    facet centroid, so the ordering is deterministic."""
    loops = []
    for fi, (hi, vids) in enumerate(P.facets):
        if len(vids) <= 3:
            loops.append((fi, list(vids)))
            continue
        pts = [P.vertices[v] for v in vids]
        n = len(pts)
        cx = sum(p.x for p in pts) / n
        cy = sum(p.y for p in pts) / n
        cz = sum(p.z for p in pts) / n
        normal = P.halfspaces[hi].a
        vecs = [(p.x - cx, p.y - cy, p.z - cz) for p in pts]
        ref = vecs[0]

        def half(w):
            s = det3(normal, ref, w)
            if s != 0:
                return 0 if s > 0 else 1
            return 0 if dot3(ref, w) > 0 else 1

        def ang(i, j):
            hi_, hj = half(vecs[i]), half(vecs[j])
            if hi_ != hj:
                return hi_ - hj
            s = det3(normal, vecs[i], vecs[j])
            return 0 if s == 0 else (-1 if s > 0 else 1)

        order = sorted(range(len(vids)), key=cmp_to_key(ang))
        loops.append((fi, [vids[i] for i in order]))
    return loops
