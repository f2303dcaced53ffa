"""Scene report: delimited relation table plus rendered figures.

Writes three artifacts into an output directory: `relations.tsv` (one
row per unordered pair with the relation name and the row-major
intersection pattern), `relations.png` (relation frequency bar chart),
and `scene.png` (a 3D view of the bodies).  Rendering uses the Agg
backend so it works headless."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from mpl_toolkits.mplot3d.art3d import Poly3DCollection

from .kb import KnowledgeBase
from .nineim import TopoRelation, classify, compute_matrix
from .polytope import Body, facet_loops

_COLORS = ("#4878cf", "#e8923c", "#5fa35f", "#c65b5b",
           "#8172b2", "#937860", "#d684bd", "#6b6b6b")


def pair_rows(registry: dict[str, Body]) -> list[tuple[str, str, str, str]]:
    """(a, b, relation, pattern) for every unordered pair, sorted."""
    ids = sorted(registry)
    rows = []
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            m = compute_matrix(registry[a], registry[b])
            rows.append((a, b, classify(m).value, m.serialize()))
    return rows


def relations_tsv(rows: list[tuple[str, str, str, str]]) -> str:
    out = ["a\tb\trelation\tmatrix"]
    out.extend("\t".join(row) for row in rows)
    return "\n".join(out) + "\n"


def _relation_chart(rows, path: Path) -> None:
    counts = {rel.value: 0 for rel in TopoRelation}
    for _, _, name, _ in rows:
        counts[name] += 1
    names = list(counts)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(names, [counts[n] for n in names], color="#4878cf")
    ax.set_ylabel("pairs")
    ax.set_title("Topological relations")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _scene_view(registry: dict[str, Body], path: Path) -> None:
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    lo = [None, None, None]
    hi = [None, None, None]
    for k, name in enumerate(sorted(registry)):
        body = registry[name]
        pts = [(float(v.x), float(v.y), float(v.z)) for v in body.vertices]
        polys = [[pts[i] for i in loop] for _, loop in facet_loops(body)]
        color = _COLORS[k % len(_COLORS)]
        ax.add_collection3d(Poly3DCollection(
            polys, facecolors=color, edgecolors="black",
            linewidths=0.6, alpha=0.45))
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        cz = sum(p[2] for p in pts) / len(pts)
        ax.text(cx, cy, cz, name, fontsize=8)
        for axis in range(3):
            vals = [p[axis] for p in pts]
            lo[axis] = min(vals) if lo[axis] is None else min(lo[axis], min(vals))
            hi[axis] = max(vals) if hi[axis] is None else max(hi[axis], max(vals))
    if lo[0] is not None:
        span = max(h - l for l, h in zip(lo, hi)) or 1.0
        for axis, setter in enumerate((ax.set_xlim, ax.set_ylim, ax.set_zlim)):
            mid = (lo[axis] + hi[axis]) / 2
            setter(mid - span / 2 - 0.5, mid + span / 2 + 0.5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(kb: KnowledgeBase, registry: dict[str, Body], outdir) -> list[Path]:
    """Render the report bundle; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = pair_rows(registry)
    tsv = outdir / "relations.tsv"
    tsv.write_text(relations_tsv(rows))
    chart = outdir / "relations.png"
    _relation_chart(rows, chart)
    view = outdir / "scene.png"
    _scene_view(registry, view)
    return [tsv, chart, view]
