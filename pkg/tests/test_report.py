import json

from topo9im import box, load_scene, qualify_all
from topo9im.cli import main
from topo9im.report import pair_rows, relations_tsv, write_report


def test_pair_rows_sorted_with_patterns():
    registry = {
        "b": box(1, 2, 0, 1, 0, 1),
        "a": box(0, 1, 0, 1, 0, 1),
        "c": box(9, 10, 0, 1, 0, 1),
    }
    rows = pair_rows(registry)
    assert [(r[0], r[1]) for r in rows] == [("a", "b"), ("a", "c"), ("b", "c")]
    assert rows[0][2] == "Meets" and rows[0][3] == "FFTFTTTTT"
    assert rows[1][2] == "Disjoint"


def test_relations_tsv_format():
    text = relations_tsv([("a", "b", "Meets", "FFTFTTTTT")])
    assert text == "a\tb\trelation\tmatrix\na\tb\tMeets\tFFTFTTTTT\n"


def _write_scene(tmp_path):
    def off(dx):
        lines = ["OFF", "8 0 0"]
        for z in (0, 1):
            for y in (0, 1):
                for x in (0, 1):
                    lines.append(f"{x + dx} {y} {z}")
        return "\n".join(lines) + "\n"

    (tmp_path / "a.off").write_text(off(0))
    (tmp_path / "b.off").write_text(off(1))
    (tmp_path / "m.json").write_text(json.dumps({"entries": [
        {"id": "a", "class": "Box", "geometry": "a.off"},
        {"id": "b", "class": "Box", "geometry": "b.off"},
    ]}))
    return tmp_path / "m.json"


def test_write_report_bundle(tmp_path):
    manifest = _write_scene(tmp_path)
    kb, registry = load_scene(manifest)
    qualify_all(kb, registry)
    paths = write_report(kb, registry, tmp_path / "out")
    names = sorted(p.name for p in paths)
    assert names == ["relations.png", "relations.tsv", "scene.png"]
    for p in paths:
        assert p.stat().st_size > 0
    tsv = (tmp_path / "out" / "relations.tsv").read_text()
    assert tsv.splitlines()[1] == "a\tb\tMeets\tFFTFTTTTT"
    # PNG magic bytes
    for p in paths:
        if p.suffix == ".png":
            assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_report(tmp_path, capsys):
    manifest = _write_scene(tmp_path)
    rc = main(["report", str(manifest), "-o", str(tmp_path / "rep")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "relations.tsv" in out
    assert (tmp_path / "rep" / "scene.png").exists()
