from fractions import Fraction

import pytest

from topo9im import (
    ComparisonTypeError,
    KnowledgeBase,
    MissingGeometryError,
    RuleSyntaxError,
    SafetyError,
    UnknownBuiltinError,
    box,
    parse_program,
    preload_topo_vocabulary,
    run,
)
from topo9im.rules import BuiltinAtom, ClassAtom, DataAtom, PropertyAtom, SelectAtom, StrLit


def kb_with(*individuals):
    kb = preload_topo_vocabulary(KnowledgeBase())
    for name, cls in individuals:
        kb.add_individual(name, cls)
    return kb


# --- parsing -------------------------------------------------------------


def test_parse_shapes():
    rules = parse_program(
        "Building(?x) ^ Railway(?y) ^ swrlb_topo:overlaps(?x, ?y) -> RailStation(?x);")
    assert len(rules) == 1
    r = rules[0]
    assert [type(a) for a in r.body] == [ClassAtom, ClassAtom, BuiltinAtom]
    assert [type(a) for a in r.head] == [ClassAtom]
    assert not r.is_query


def test_parse_unicode_connectives_and_comments():
    rules = parse_program(
        "# comment up front\n"
        "Wall(?x) ∧ haslength(?x, ?l) ∧ swrlb:lessThan(?l, 2) → Short(?x);  # trailing\n")
    r = rules[0]
    assert len(r.body) == 3
    # a variable object keeps the atom a property atom; it binds data too
    assert isinstance(r.body[1], PropertyAtom)


def test_parse_exact_numbers_and_strings():
    rules = parse_program('haslabel(?x, "north wing") ^ haswidth(?x, 3/2) -> Tagged(?x);')
    label, width = rules[0].body
    assert isinstance(label, DataAtom) and label.value == StrLit("north wing")
    assert isinstance(width, DataAtom) and width.value == Fraction(3, 2)


def test_parse_query_shape():
    rules = parse_program("topo:meets(u, ?y) -> sqwrl:select(?y);")
    q = rules[0]
    assert q.is_query
    assert isinstance(q.head[0], SelectAtom)
    assert isinstance(q.body[0], PropertyAtom)


def test_syntax_error_carries_position():
    with pytest.raises(RuleSyntaxError) as err:
        parse_program("Building(?x -> Tall(?x);")
    assert str(err.value).startswith("1:")


def test_missing_semicolon():
    with pytest.raises(RuleSyntaxError):
        parse_program("A(?x) -> B(?x)")


def test_select_must_be_the_whole_head():
    with pytest.raises(RuleSyntaxError):
        parse_program("sqwrl:select(?x) -> A(?x);")
    with pytest.raises(RuleSyntaxError):
        parse_program("A(?x) -> sqwrl:select(?x) ^ B(?x);")


def test_unsafe_head_variable():
    with pytest.raises(SafetyError) as err:
        parse_program("Building(?x) -> Tall(?y);")
    assert "?y" in str(err.value)


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltinError):
        parse_program("swrlb_topo:touches(?x, ?y) -> A(?x);")
    with pytest.raises(UnknownBuiltinError):
        parse_program("swrlb:plus(?x, 1, 2) -> A(?x);")


def test_builtin_arity_checked():
    with pytest.raises(RuleSyntaxError):
        parse_program("swrlb_topo:meets(?x) -> A(?x);")


def test_alias_prefix_and_case():
    rules = parse_program("swrl_topo:Meets(?x, ?y) -> Near(?x);")
    b = rules[0].body[0]
    assert isinstance(b, BuiltinAtom)
    assert b.name == "swrlb_topo:meets"


# --- evaluation ----------------------------------------------------------


def overlap_scene():
    kb = kb_with(("b1", "Building"), ("b2", "Building"), ("r1", "Railway"))
    registry = {
        "b1": box(0, 2, 0, 2, 0, 2),
        "b2": box(10, 12, 0, 2, 0, 2),
        "r1": box(1, 8, "1/2", 1, 0, 1),   # cuts through b1, stops short of b2
    }
    return kb, registry


def test_overlap_rule_derives_station():
    kb, registry = overlap_scene()
    rules = parse_program(
        "Building(?b) ^ Railway(?r) ^ swrlb_topo:overlaps(?b, ?r) -> RailStation(?b);")
    out = run(kb, registry, rules)
    assert out.kb.classes_of("b1") >= {"Building", "RailStation"}
    assert "RailStation" not in out.kb.classes_of("b2")
    # builtin successes land in the kb as topo triples, both directions
    assert out.kb.has_triple("b1", "topo:overlaps", "r1")
    assert out.kb.has_triple("r1", "topo:overlaps", "b1")


def test_window_rule_with_comparison():
    kb = kb_with(("wall", "Wall"), ("g1", "Geometry"), ("g2", "Geometry"))
    kb.assert_data("g1", "haslength", Fraction(1))
    kb.assert_data("g2", "haslength", Fraction(5))
    registry = {
        "wall": box(0, 10, 0, 10, 0, 10),
        "g1": box(1, 2, 1, 2, 1, 2),
        "g2": box(3, 8, 3, 8, 3, 8),
    }
    rules = parse_program(
        "Wall(?x) ^ Geometry(?y) ^ swrlb_topo:inside(?y, ?x)"
        " ^ haslength(?y, ?l) ^ swrlb:lessThan(?l, 2) -> Window(?y);")
    out = run(kb, registry, rules)
    assert "Window" in out.kb.classes_of("g1")
    assert "Window" not in out.kb.classes_of("g2")


def test_meets_query_rows_and_tsv():
    kb = kb_with(("u", "Box"), ("a", "Box"), ("c", "Box"), ("d", "Box"))
    registry = {
        "u": box(0, 1, 0, 1, 0, 1),
        "a": box(1, 2, 0, 1, 0, 1),
        "c": box(0, 1, 1, 2, 0, 1),
        "d": box(5, 6, 0, 1, 0, 1),
    }
    out = run(kb, registry, parse_program("swrlb_topo:meets(u, ?y) -> sqwrl:select(?y);"))
    q = out.queries[0]
    assert q.variables == ("y",)
    assert q.rows == (("a",), ("c",))
    assert q.to_tsv() == "?y\na\nc\n"


def test_composition_chain():
    kb = kb_with(("A", "Box"), ("B", "Box"), ("C", "Box"))
    registry = {
        "A": box(0, 1, 0, 1, 0, 1),
        "B": box(1, 4, 0, 4, 0, 4),
        "C": box(2, 3, 1, 2, 1, 2),
    }
    program = parse_program(
        "swrlb_topo:meets(?a, ?b) ^ swrlb_topo:contains(?b, ?c)"
        " -> topo:disjoint(?a, ?c);")
    out = run(kb, registry, program)
    assert out.kb.has_triple("A", "topo:disjoint", "C")
    # and the geometry agrees with the derived triple
    from topo9im import TopoRelation, classify_pair
    assert classify_pair(registry["A"], registry["C"]) is TopoRelation.DISJOINT


def test_semi_naive_multi_round():
    kb = kb_with(("a", "Seed"))
    for n in ("b", "c", "d"):
        kb.add_individual(n, "Node")
    kb.assert_triple("a", "next", "b")
    kb.assert_triple("b", "next", "c")
    kb.assert_triple("c", "next", "d")
    rules = parse_program(
        "Seed(?x) -> Reach(?x);"
        "Reach(?x) ^ next(?x, ?y) -> Reach(?y);")
    out = run(kb, {}, rules)
    for n in ("a", "b", "c", "d"):
        assert "Reach" in out.kb.classes_of(n)


def test_property_atom_reads_attributes():
    kb = kb_with(("w", "Wall"))
    kb.assert_data("w", "haslength", Fraction(3))
    out = run(kb, {}, parse_program("haslength(?x, ?l) -> Measured(?x);"))
    assert "Measured" in out.kb.classes_of("w")


def test_repeated_variable_builtin():
    kb = kb_with(("a", "Box"), ("b", "Box"))
    registry = {"a": box(0, 1, 0, 1, 0, 1), "b": box(4, 5, 0, 1, 0, 1)}
    out = run(kb, registry, parse_program("swrlb_topo:equals(?x, ?x) -> SelfSame(?x);"))
    assert "SelfSame" in out.kb.classes_of("a")
    assert "SelfSame" in out.kb.classes_of("b")


def test_missing_geometry():
    kb = kb_with(("ghost", "Box"))
    program = parse_program("swrlb_topo:meets(ghost, phantom) -> Odd(ghost);")
    with pytest.raises(MissingGeometryError):
        run(kb, {"ghost": box(0, 1, 0, 1, 0, 1)}, program)


def test_unbound_comparison_rejected():
    kb = kb_with(("a", "Thing"))
    with pytest.raises(ComparisonTypeError):
        run(kb, {}, parse_program("Thing(?x) ^ swrlb:lessThan(?u, 2) -> Small(?x);"))


def test_non_numeric_comparison_rejected():
    kb = kb_with(("a", "Thing"))
    kb.assert_data("a", "label", "tall")
    with pytest.raises(ComparisonTypeError):
        run(kb, {}, parse_program(
            "label(?x, ?v) ^ swrlb:greaterThan(?v, 1) -> Big(?x);"))


def test_query_assertions_are_materialized():
    kb = kb_with(("u", "Box"), ("v", "Box"))
    registry = {"u": box(0, 1, 0, 1, 0, 1), "v": box(1, 2, 0, 1, 0, 1)}
    out = run(kb, registry, parse_program("swrlb_topo:meets(?x, ?y) -> sqwrl:select(?x, ?y);"))
    assert set(out.queries[0].rows) == {("u", "v"), ("v", "u")}
    # the successes were asserted and closed under symmetry
    assert out.kb.has_triple("u", "topo:meets", "v")
    assert out.kb.has_triple("v", "topo:meets", "u")


def test_rows_sorted_and_deduplicated():
    kb = kb_with(("n2", "T"), ("n1", "T"), ("n3", "T"))
    kb.assert_data("n1", "score", Fraction(2))
    kb.assert_data("n2", "score", Fraction(1))
    kb.assert_data("n3", "score", Fraction(2))
    out = run(kb, {}, parse_program("T(?x) ^ score(?x, ?s) -> sqwrl:select(?s);"))
    assert out.queries[0].rows == ((Fraction(1),), (Fraction(2),))


def test_query_with_class_guard_and_constant_subject():
    kb = kb_with(("elem1", "Geometry"), ("elem2", "Geometry"), ("elem3", "Geometry"))
    registry = {
        "elem1": box(0, 1, 0, 1, 0, 1),
        "elem2": box(1, 2, 0, 1, 0, 1),
        "elem3": box(7, 8, 0, 1, 0, 1),
    }
    out = run(kb, registry, parse_program(
        "Geometry(?y) ^ swrlb_topo:meets(elem1, ?y) -> sqwrl:select(?y);"))
    assert out.queries[0].rows == (("elem2",),)


def test_derivation_count_stays_bounded():
    kb = kb_with(("a", "Box"), ("b", "Box"), ("c", "Box"))
    registry = {
        "a": box(0, 1, 0, 1, 0, 1),
        "b": box(1, 2, 0, 1, 0, 1),
        "c": box(0, 3, 0, 3, 0, 3),
    }
    out = run(kb, registry, parse_program(
        "swrlb_topo:meets(?x, ?y) -> touching(?x, ?y);"
        "swrlb_topo:inside(?x, ?y) -> topo:inside(?x, ?y);"))
    individuals = len(out.kb.individuals)
    bound = len(out.kb.properties) * individuals * individuals
    assert len(out.kb.triples) <= bound


def test_memoized_pairs_match_fresh_classification():
    from topo9im import classify_pair
    from topo9im.rules import _Geometry

    registry = {
        "a": box(0, 1, 0, 1, 0, 1),
        "b": box(1, 2, 0, 1, 0, 1),
        "c": box("1/2", 3, 0, 3, 0, 3),
    }
    geo = _Geometry(registry)
    names = sorted(registry)
    for x in names:
        for y in names:
            assert geo.relation(x, y) is classify_pair(registry[x], registry[y])
    # and again, now served from the cache
    for x in names:
        for y in names:
            assert geo.relation(x, y) is classify_pair(registry[x], registry[y])
