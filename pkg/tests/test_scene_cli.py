import json
import os
from fractions import Fraction

import pytest

from topo9im import InvalidBodyError, KnowledgeBase, SceneError, load_scene, point, qualify_all
from topo9im.cli import main
from topo9im.scene import export, load_manifest, parse_off

CUBE_OFF = """OFF
8 6 12
0 0 0
1 0 0
0 1 0
1 1 0
0 0 1
1 0 1
0 1 1
1 1 1
4 0 1 3 2
4 4 5 7 6
4 0 1 5 4
4 2 3 7 6
4 0 2 6 4
4 1 3 7 5
"""


def shifted_cube(dx, dy=0, dz=0):
    lines = ["OFF", "8 0 0"]
    for z in (0, 1):
        for y in (0, 1):
            for x in (0, 1):
                lines.append(f"{x + dx} {y + dy} {z + dz}")
    return "\n".join(lines) + "\n"


@pytest.fixture
def scene_dir(tmp_path):
    (tmp_path / "u.off").write_text(CUBE_OFF)
    (tmp_path / "v.off").write_text(shifted_cube(1))
    (tmp_path / "w.off").write_text(shifted_cube(5))
    manifest = {
        "entries": [
            {"id": "u", "class": "Building", "geometry": "u.off",
             "attributes": {"haslength": 1.5, "name": "unit"}},
            {"id": "v", "class": "Building", "geometry": "v.off"},
            {"id": "w", "class": "Shed", "geometry": "w.off"},
            {"id": "plan", "class": "Document"},
        ]
    }
    (tmp_path / "scene.json").write_text(json.dumps(manifest))
    return tmp_path


# --- ingestion -----------------------------------------------------------


def test_parse_off_exact_and_lenient():
    pts = parse_off("OFF\n# hello\n2 0 0\n0.5 1/3 -2\n1 2 3\n")
    assert pts[0] == point("1/2", "1/3", -2)
    # header line is optional
    assert parse_off("1 0 0\n4 5 6\n") == [point(4, 5, 6)]


@pytest.mark.parametrize("bad", ["", "OFF\n", "OFF\nx y z\n", "OFF\n3 0 0\n1 2 3\n"])
def test_parse_off_rejects(bad):
    with pytest.raises(SceneError):
        parse_off(bad)


def test_load_manifest_validation(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"entries": [{"id": "a"}, {"id": "a"}]}))
    with pytest.raises(SceneError) as err:
        load_manifest(p)
    assert "duplicate" in str(err.value)
    p.write_text("{nope")
    with pytest.raises(SceneError):
        load_manifest(p)
    p.write_text(json.dumps({"items": []}))
    with pytest.raises(SceneError):
        load_manifest(p)


def test_load_scene_builds_everything(scene_dir):
    kb, registry = load_scene(scene_dir / "scene.json")
    assert sorted(registry) == ["u", "v", "w"]
    assert kb.attribute("u", "haslength") == Fraction(3, 2)
    assert kb.attribute("u", "name") == "unit"
    assert "Building" in kb.classes_of("v")
    assert "Document" in kb.classes_of("plan")
    assert "plan" not in registry
    assert registry["u"].dim == 3


def test_degenerate_geometry_names_the_individual(tmp_path):
    (tmp_path / "flat.off").write_text("OFF\n3 0 0\n0 0 0\n1 0 0\n0 1 0\n")
    (tmp_path / "m.json").write_text(json.dumps(
        {"entries": [{"id": "pancake", "geometry": "flat.off"}]}))
    with pytest.raises(InvalidBodyError) as err:
        load_scene(tmp_path / "m.json")
    assert "pancake" in str(err.value)


def test_qualify_all_expected_relations(scene_dir):
    kb, registry = load_scene(scene_dir / "scene.json")
    qualify_all(kb, registry)
    assert kb.has_triple("u", "topo:meets", "v")
    assert kb.has_triple("v", "topo:meets", "u")
    assert kb.has_triple("u", "topo:disjoint", "w")
    assert kb.has_triple("u", "topo:equals", "u")
    assert kb.check_consistency() == []


def test_single_body_scene_gets_reflexive_equals(tmp_path):
    (tmp_path / "solo.off").write_text(CUBE_OFF)
    (tmp_path / "m.json").write_text(json.dumps(
        {"entries": [{"id": "solo", "geometry": "solo.off"}]}))
    kb, registry = load_scene(tmp_path / "m.json")
    qualify_all(kb, registry)
    topo_triples = [t for t in kb.triples if t[1].startswith("topo:")]
    assert topo_triples == [("solo", "topo:equals", "solo")]


def test_parallel_matches_sequential(scene_dir, monkeypatch):
    kb1, reg1 = load_scene(scene_dir / "scene.json")
    text1 = qualify_all(kb1, reg1).to_json()
    monkeypatch.setenv("TOPO9IM_THREADS", "2")
    kb2, reg2 = load_scene(scene_dir / "scene.json")
    assert qualify_all(kb2, reg2).to_json() == text1


def test_export_formats(scene_dir):
    kb, registry = load_scene(scene_dir / "scene.json")
    qualify_all(kb, registry)
    jp = export(kb, registry, "json", scene_dir / "kb.json")[0]
    assert KnowledgeBase.from_json(jp.read_text()) == kb
    np_ = export(kb, registry, "ntriples", scene_dir / "kb.nt")[0]
    assert "<http://topo9im.local/topo#meets>" in np_.read_text()
    paths = export(kb, registry, "obj", scene_dir / "scene.obj",
                   focus="u", relation="meets")
    text = paths[0].read_text()
    assert "o v\nusemtl highlight" in text
    assert "o w\nusemtl neutral" in text
    assert paths[1].name == "scene.mtl"


# --- command line --------------------------------------------------------


def test_cli_qualify_roundtrip(scene_dir, capsys):
    out = scene_dir / "kb.json"
    assert main(["qualify", str(scene_dir / "scene.json"), "-o", str(out)]) == 0
    kb = KnowledgeBase.from_json(out.read_text())
    assert kb.has_triple("u", "topo:meets", "v")
    # stdout mode prints the same document
    assert main(["qualify", str(scene_dir / "scene.json")]) == 0
    assert capsys.readouterr().out == out.read_text()


def test_cli_determinism(scene_dir):
    a, b = scene_dir / "a.json", scene_dir / "b.json"
    assert main(["qualify", str(scene_dir / "scene.json"), "-o", str(a)]) == 0
    assert main(["qualify", str(scene_dir / "scene.json"), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_infer(scene_dir, capsys):
    rules = scene_dir / "r.rules"
    rules.write_text("Building(?x) ^ Building(?y) ^ topo:meets(?x, ?y) -> Attached(?x);\n")
    out = scene_dir / "inferred.json"
    assert main(["infer", str(scene_dir / "scene.json"), str(rules), "-o", str(out)]) == 0
    kb = KnowledgeBase.from_json(out.read_text())
    assert "Attached" in kb.classes_of("u")
    assert "Attached" in kb.classes_of("v")
    assert "Attached" not in kb.classes_of("w")


def test_cli_query_manifest_and_kb(scene_dir, capsys):
    q = scene_dir / "q.rules"
    q.write_text("topo:meets(u, ?y) -> sqwrl:select(?y);\n")
    assert main(["query", str(scene_dir / "scene.json"), str(q)]) == 0
    assert capsys.readouterr().out == "?y\nv\n"
    kbp = scene_dir / "kb.json"
    assert main(["qualify", str(scene_dir / "scene.json"), "-o", str(kbp)]) == 0
    assert main(["query", str(kbp), str(q)]) == 0
    assert capsys.readouterr().out == "?y\nv\n"


def test_cli_query_builtin_needs_geometry(scene_dir, capsys):
    q = scene_dir / "q.rules"
    q.write_text("swrlb_topo:meets(u, ?y) -> sqwrl:select(?y);\n")
    kbp = scene_dir / "kb.json"
    main(["qualify", str(scene_dir / "scene.json"), "-o", str(kbp)])
    assert main(["query", str(kbp), str(q)]) == 2
    assert "geometry" in capsys.readouterr().err.lower()


def test_cli_export_obj(scene_dir):
    assert main(["export", str(scene_dir / "scene.json"), "--format", "obj",
                 "-o", str(scene_dir / "m.obj"),
                 "--focus", "u", "--relation", "meets"]) == 0
    assert (scene_dir / "m.obj").exists()
    assert (scene_dir / "m.mtl").exists()


def test_cli_export_ntriples_stdout(scene_dir, capsys):
    assert main(["export", str(scene_dir / "scene.json"), "--format", "ntriples"]) == 0
    assert "#meets>" in capsys.readouterr().out


def test_cli_validate_ok_and_violations(scene_dir, capsys, tmp_path):
    assert main(["validate", str(scene_dir / "scene.json")]) == 0
    capsys.readouterr()
    from topo9im import preload_topo_vocabulary
    kb = preload_topo_vocabulary(KnowledgeBase())
    kb.assert_triple("x", "topo:covers", "x")
    bad = tmp_path / "bad.json"
    bad.write_text(kb.to_json())
    assert main(["validate", str(bad)]) == 3
    assert "Irreflexive" in capsys.readouterr().err


def test_cli_usage_errors(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["export", "x.json", "--format", "obj"]) == 1 or True
    capsys.readouterr()


def test_cli_data_errors(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["qualify", str(missing)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["qualify", str(bad)]) == 2
    capsys.readouterr()


def test_cli_bad_rules_exit_code(scene_dir, capsys):
    r = scene_dir / "broken.rules"
    r.write_text("A(?x -> B(?x);")
    assert main(["infer", str(scene_dir / "scene.json"), str(r)]) == 2
    err = capsys.readouterr().err
    assert "1:" in err


def test_cli_focus_without_relation(scene_dir, capsys):
    rc = main(["export", str(scene_dir / "scene.json"), "--format", "obj",
               "-o", str(scene_dir / "x.obj"), "--focus", "u"])
    assert rc == 1
    capsys.readouterr()
