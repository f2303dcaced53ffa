"""Scene ingestion, batch pairwise qualification, persistence.

A scene is a JSON manifest listing individuals, their classes, optional
data attributes, and optional OFF mesh paths.  Mesh faces are ignored
on purpose: the convex hull of the vertex set is recomputed, which
tolerates sloppy face descriptions and guarantees the body invariants.
Numeric literals in the manifest are read exactly (decimal text never
becomes a binary float).

`qualify_all` classifies every unordered pair of geometric individuals
once and asserts the relation plus its inverse or symmetric
counterpart, then materializes.  Pairs may be classified in parallel
(`TOPO9IM_THREADS`), but assertions always happen in sorted pair order,
so output files are byte-identical regardless of worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import InvalidBodyError, SceneError, UsageError
from .exact import Point3, parse_rational
from .kb import KnowledgeBase, preload_topo_vocabulary
from .nineim import TopoRelation, classify, compute_matrix, inverse_relation
from .polytope import Body, facet_loops, hull_from_points


@dataclass
class SceneEntry:
    id: str
    cls: str | None = None
    geometry: str | None = None
    attributes: dict = field(default_factory=dict)


def load_manifest(path) -> list[SceneEntry]:
    """Read and validate the manifest JSON; exact numeric literals."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(), parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise SceneError(f"{path}: manifest must be an object with an 'entries' list")
    entries = []
    seen = set()
    for i, raw in enumerate(doc["entries"]):
        if not isinstance(raw, dict) or not isinstance(raw.get("id"), str):
            raise SceneError(f"{path}: entry {i} needs a string 'id'")
        eid = raw["id"]
        if eid in seen:
            raise SceneError(f"{path}: duplicate id {eid!r}")
        seen.add(eid)
        attrs = raw.get("attributes", {})
        if not isinstance(attrs, dict):
            raise SceneError(f"{path}: entry {eid!r}: attributes must be an object")
        entries.append(SceneEntry(
            id=eid,
            cls=raw.get("class"),
            geometry=raw.get("geometry"),
            attributes=dict(attrs),
        ))
    return entries


def parse_off(text: str) -> list[Point3]:
    """Vertices of an ASCII OFF mesh, parsed exactly.  Faces are ignored."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise SceneError("empty OFF file")
    if lines[0].upper() == "OFF":
        lines.pop(0)
    if not lines:
        raise SceneError("OFF file has no counts line")
    counts = lines.pop(0).split()
    try:
        nv = int(counts[0])
    except (IndexError, ValueError):
        raise SceneError(f"bad OFF counts line: {' '.join(counts)!r}") from None
    if nv < 1 or len(lines) < nv:
        raise SceneError(f"OFF file declares {nv} vertices, found {len(lines)} lines")
    points = []
    for line in lines[:nv]:
        parts = line.split()
        if len(parts) < 3:
            raise SceneError(f"bad OFF vertex line: {line!r}")
        points.append(Point3(*(parse_rational(p) for p in parts[:3])))
    return points


def load_scene(manifest_path) -> tuple[KnowledgeBase, dict[str, Body]]:
    """Build the knowledge base and the geometry registry for a scene.

    Every entry becomes an individual (with class and attribute
    assertions); entries with geometry load to bodies and join the
    reflexive-closure domain.  Validation failures name the entry."""
    manifest_path = Path(manifest_path)
    entries = load_manifest(manifest_path)
    kb = preload_topo_vocabulary(KnowledgeBase())
    registry: dict[str, Body] = {}
    for entry in entries:
        if entry.cls:
            kb.add_individual(entry.id, entry.cls)
        else:
            kb.add_individual(entry.id)
        for prop, value in sorted(entry.attributes.items()):
            kb.assert_data(entry.id, prop, value)
        if entry.geometry is None:
            continue
        mesh_path = manifest_path.parent / entry.geometry
        points = parse_off(mesh_path.read_text())
        try:
            registry[entry.id] = hull_from_points(points).to_body()
        except InvalidBodyError as exc:
            raise InvalidBodyError(f"{entry.id}: {exc}") from exc
        kb.add_domain_individual(entry.id)
    return kb, registry


def _classify_pair(item):
    a_id, b_id, A, B = item
    return a_id, b_id, classify(compute_matrix(A, B)).value


def _thread_count() -> int:
    raw = os.environ.get("TOPO9IM_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TOPO9IM_THREADS must be an integer, got {raw!r}") from None
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def qualify_all(kb: KnowledgeBase, registry: dict[str, Body]) -> KnowledgeBase:
    """Classify every unordered pair once, assert the relation and its
    inverse/symmetric counterpart, then materialize."""
    ids = sorted(registry)
    items = [(a, b, registry[a], registry[b])
             for i, a in enumerate(ids) for b in ids[i + 1:]]
    workers = _thread_count()
    if workers > 1 and len(items) > 1:
        chunk = max(1, len(items) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_classify_pair, items, chunksize=chunk))
    else:
        results = [_classify_pair(item) for item in items]
    for a, b, value in sorted(results):
        rel = TopoRelation(value)
        kb.assert_triple(a, rel.topo_property, b)
        kb.assert_triple(b, inverse_relation(rel).topo_property, a)
    kb.materialize()
    return kb


# --- exports -------------------------------------------------------------


def _relation_property(name: str) -> str:
    local = name[5:] if name.startswith("topo:") else name
    for rel in TopoRelation:
        if rel.prop_local.lower() == local.lower():
            return rel.topo_property
    raise UsageError(f"unknown relation {name!r}")


def export_obj(kb: KnowledgeBase, registry: dict[str, Body], path,
               focus: str | None = None, relation: str | None = None) -> list[Path]:
    """Merged OBJ mesh (plus MTL sidecar) of all bodies.

    With a focus individual and a relation name, every body x with
    topo:rel(x, focus) in the knowledge base gets the highlight
    material; everything else is neutral.  Coordinates are emitted as
    floats: this export is for visualization, not for round trips."""
    path = Path(path)
    highlight: set[str] = set()
    if (focus is None) != (relation is None):
        raise UsageError("--focus and --relation must be given together")
    if focus is not None:
        prop = _relation_property(relation)
        highlight = {x for x in registry if kb.has_triple(x, prop, focus)}
    mtl_path = path.with_suffix(".mtl")
    obj = [f"mtllib {mtl_path.name}"]
    base = 1
    for name in sorted(registry):
        body = registry[name]
        obj.append(f"o {name}")
        obj.append("usemtl highlight" if name in highlight else "usemtl neutral")
        for v in body.vertices:
            obj.append(f"v {float(v.x):.9g} {float(v.y):.9g} {float(v.z):.9g}")
        for _, loop in facet_loops(body):
            obj.append("f " + " ".join(str(base + i) for i in loop))
        base += len(body.vertices)
    path.write_text("\n".join(obj) + "\n")
    mtl_path.write_text(
        "newmtl neutral\nKd 0.72 0.72 0.72\n\n"
        "newmtl highlight\nKd 0.90 0.22 0.18\n"
    )
    return [path, mtl_path]


def export(kb: KnowledgeBase, registry: dict[str, Body], fmt: str, path,
           focus: str | None = None, relation: str | None = None) -> list[Path]:
    """Write the knowledge base (or scene mesh) to a file; returns the
    paths written."""
    path = Path(path)
    if fmt == "json":
        path.write_text(kb.to_json())
        return [path]
    if fmt == "ntriples":
        path.write_text(kb.to_ntriples())
        return [path]
    if fmt == "obj":
        return export_obj(kb, registry, path, focus, relation)
    raise UsageError(f"unknown export format {fmt!r}")
