"""Exact qualitative topology for convex polyhedral bodies.

The package classifies pairs of bodies into the eight binary
topological relations by evaluating the nine interior/boundary/exterior
intersections with exact rational arithmetic, stores the results in a
small knowledge base with relation characteristics, and evaluates Horn
rules whose topological builtins are answered by the geometry engine.
"""

from .errors import (
    ComparisonTypeError,
    EmptyGeometryError,
    ExprSyntaxError,
    InvalidBodyError,
    MissingGeometryError,
    RationalParseError,
    RuleSyntaxError,
    SafetyError,
    SceneError,
    Topo9imError,
    UnboundedError,
    UnclassifiableMatrixError,
    UnknownBuiltinError,
    UnsupportedCompositeError,
    UsageError,
    VocabularyConflictError,
)
from .exact import Halfspace, Location, Point3, Rat, Side, halfspace, parse_rational, point
from .kb import (
    BASE_IRI,
    Characteristic,
    KnowledgeBase,
    PropertyDef,
    Violation,
    preload_topo_vocabulary,
)
from .nineim import (
    Matrix9,
    TopoRelation,
    classify,
    classify_pair,
    compute_matrix,
    compute_matrix_with_witnesses,
    inverse_relation,
    relation_pattern,
)
from .polytope import (
    Body,
    Polytope,
    box,
    classify_point,
    facet_loops,
    feasible,
    from_halfspaces,
    hull_from_points,
    intersect,
    is_subset,
    relint_point,
)
from .rules import QueryResult, RunResult, parse_program, run
from .scene import export, load_manifest, load_scene, parse_off, qualify_all
from .setops import (
    SetExpr,
    boundary,
    closed,
    closure,
    complement,
    difference,
    exterior,
    interior,
    intersection,
    member,
    parse_expr,
    symdiff,
    union,
)

__version__ = "0.1.0"

__all__ = [
    "BASE_IRI",
    "Body",
    "Characteristic",
    "ComparisonTypeError",
    "EmptyGeometryError",
    "ExprSyntaxError",
    "Halfspace",
    "InvalidBodyError",
    "KnowledgeBase",
    "Location",
    "Matrix9",
    "MissingGeometryError",
    "Point3",
    "Polytope",
    "PropertyDef",
    "QueryResult",
    "Rat",
    "RationalParseError",
    "RuleSyntaxError",
    "RunResult",
    "SafetyError",
    "SceneError",
    "SetExpr",
    "Side",
    "Topo9imError",
    "TopoRelation",
    "UnboundedError",
    "UnclassifiableMatrixError",
    "UnknownBuiltinError",
    "UnsupportedCompositeError",
    "UsageError",
    "Violation",
    "VocabularyConflictError",
    "boundary",
    "box",
    "classify",
    "classify_pair",
    "classify_point",
    "closed",
    "closure",
    "complement",
    "compute_matrix",
    "compute_matrix_with_witnesses",
    "difference",
    "export",
    "exterior",
    "facet_loops",
    "feasible",
    "from_halfspaces",
    "halfspace",
    "hull_from_points",
    "interior",
    "intersect",
    "intersection",
    "inverse_relation",
    "is_subset",
    "load_manifest",
    "load_scene",
    "member",
    "parse_expr",
    "parse_off",
    "parse_program",
    "parse_rational",
    "point",
    "preload_topo_vocabulary",
    "qualify_all",
    "relation_pattern",
    "relint_point",
    "run",
    "union",
    "symdiff",
    "__version__",
]
