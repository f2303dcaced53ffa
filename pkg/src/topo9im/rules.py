"""Horn rules with topological builtins: parser and forward chaining.

The rule language is a small conjunctive fragment: a body of atoms, an
arrow, a head of atoms, terminated by a semicolon.  Atoms over plain
names match knowledge-base facts (classes, object triples, data
attributes); atoms in the ``swrlb_topo:`` namespace are resolved by the
geometry engine itself, so a rule can qualify pairs of bodies on
demand, without a prior global qualification pass.  A head consisting
of a single ``sqwrl:select`` atom turns the rule into a query.

Evaluation is semi-naive forward chaining: the first round evaluates
every rule against the whole store, later rounds only join each rule
through the facts derived in the previous round.  Derivation is
monotone (no negation), so the fixpoint exists and is independent of
rule order.  Every successful topological builtin also asserts the
corresponding ``topo:`` triple, which is what enriches the knowledge
base as a side effect of rule evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ComparisonTypeError,
    MissingGeometryError,
    RuleSyntaxError,
    SafetyError,
    UnknownBuiltinError,
)
from .kb import KnowledgeBase
from .nineim import TopoRelation, classify, compute_matrix, inverse_relation

# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


@dataclass(frozen=True)
class StrLit:
    """Quoted string literal (kept distinct from individual names)."""

    value: str


# A term is Var | str (individual name) | Fraction | StrLit.


@dataclass(frozen=True)
class ClassAtom:
    cls: str
    term: object


@dataclass(frozen=True)
class PropertyAtom:
    prop: str
    subject: object
    object: object


@dataclass(frozen=True)
class DataAtom:
    prop: str
    subject: object
    value: object


@dataclass(frozen=True)
class BuiltinAtom:
    name: str  # canonical, e.g. "swrlb_topo:meets", "swrlb:lessThan"
    args: tuple


@dataclass(frozen=True)
class SelectAtom:
    variables: tuple


@dataclass(frozen=True)
class Rule:
    body: tuple
    head: tuple
    line: int
    column: int

    @property
    def is_query(self) -> bool:
        return len(self.head) == 1 and isinstance(self.head[0], SelectAtom)


# --- tokenizer ---------------------------------------------------------------

_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?(?:/\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z_][A-Za-z0-9_]*)?")


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "(),;":
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch in "^∧":
            tokens.append(("and", ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "→":
            tokens.append(("implies", ch, line, col))
            i += 1
            col += 1
            continue
        if text.startswith("->", i):
            tokens.append(("implies", "->", line, col))
            i += 2
            col += 2
            continue
        if ch == "?":
            m = _IDENT_RE.match(text, i + 1)
            if m is None or ":" in m.group(0):
                raise RuleSyntaxError("expected a variable name after '?'", line, col)
            tokens.append(("var", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                raise RuleSyntaxError("unterminated string literal", line, col)
            tokens.append(("string", text[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            tokens.append(("number", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m is not None:
            tokens.append(("ident", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        raise RuleSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(("eof", "", line, col))
    return tokens


# --- parser ------------------------------------------------------------------

_TOPO_LOCALS = {r.prop_local.lower(): r.prop_local for r in TopoRelation}
_COMPARE_LOCALS = {"lessthan": "lessThan", "greaterthan": "greaterThan", "equal": "equal"}

TOPO_BUILTIN_PREFIX = "swrlb_topo:"
_RELATION_BY_BUILTIN = {TOPO_BUILTIN_PREFIX + r.prop_local: r for r in TopoRelation}


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok[0] != "eof":
            self.pos += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.current
        if tok[0] != kind:
            got = repr(tok[1]) if tok[1] else "end of input"
            raise RuleSyntaxError(f"expected {what or kind}, got {got}", tok[2], tok[3])
        return self.advance()

    def program(self):
        rules = []
        while self.current[0] != "eof":
            rules.append(self.rule())
            self.expect(";", "';' after rule")
        return rules

    def rule(self) -> Rule:
        _, _, line, col = self.current
        body = self.atoms()
        self.expect("implies", "'->'")
        head = self.atoms()
        return _validate_rule(body, head, line, col)

    def atoms(self):
        out = [self.atom()]
        while self.current[0] == "and":
            self.advance()
            out.append(self.atom())
        return out

    def atom(self):
        kind, name, line, col = self.current
        if kind != "ident":
            raise RuleSyntaxError(f"expected an atom, got {name!r}" if name else
                                  "expected an atom, got end of input", line, col)
        self.advance()
        self.expect("(", "'('")
        terms = [self.term()]
        while self.current[0] == ",":
            self.advance()
            terms.append(self.term())
        self.expect(")", "')'")
        return _classify_atom(name, terms, line, col)

    def term(self):
        kind, value, line, col = self.advance()
        if kind == "var":
            return Var(value)
        if kind == "ident":
            return value
        if kind == "number":
            return Fraction(value)
        if kind == "string":
            return StrLit(value)
        raise RuleSyntaxError(f"expected a term, got {value!r}" if value else
                              "expected a term, got end of input", line, col)


def _require_names(terms, what, line, col):
    for t in terms:
        if isinstance(t, (Fraction, StrLit)):
            raise RuleSyntaxError(f"{what} takes variables or names, not literals", line, col)


def _classify_atom(name, terms, line, col):
    ns, sep, local = name.partition(":")
    nsl = ns.lower() if sep else ""
    if nsl in ("swrlb_topo", "swrl_topo"):
        canon = _TOPO_LOCALS.get(local.lower())
        if canon is None:
            raise UnknownBuiltinError(f"unknown topological builtin {name!r}")
        if len(terms) != 2:
            raise RuleSyntaxError(f"{name} takes two arguments", line, col)
        _require_names(terms, name, line, col)
        return BuiltinAtom(TOPO_BUILTIN_PREFIX + canon, tuple(terms))
    if nsl == "swrlb":
        canon = _COMPARE_LOCALS.get(local.lower())
        if canon is None:
            raise UnknownBuiltinError(f"unknown builtin {name!r}")
        if len(terms) != 2:
            raise RuleSyntaxError(f"{name} takes two arguments", line, col)
        return BuiltinAtom("swrlb:" + canon, tuple(terms))
    if nsl == "sqwrl":
        if local.lower() != "select":
            raise UnknownBuiltinError(f"unknown builtin {name!r}")
        if not terms or not all(isinstance(t, Var) for t in terms):
            raise RuleSyntaxError("sqwrl:select takes variables only", line, col)
        return SelectAtom(tuple(terms))
    if len(terms) == 1:
        _require_names(terms, name, line, col)
        return ClassAtom(name, terms[0])
    if len(terms) == 2:
        if isinstance(terms[0], (Fraction, StrLit)):
            raise RuleSyntaxError("atom subject must be a variable or name", line, col)
        if isinstance(terms[1], (Fraction, StrLit)):
            return DataAtom(name, terms[0], terms[1])
        return PropertyAtom(name, terms[0], terms[1])
    raise RuleSyntaxError(f"{name} takes one or two arguments", line, col)


def _atom_vars(atom):
    if isinstance(atom, ClassAtom):
        parts = (atom.term,)
    elif isinstance(atom, PropertyAtom):
        parts = (atom.subject, atom.object)
    elif isinstance(atom, DataAtom):
        parts = (atom.subject, atom.value)
    elif isinstance(atom, BuiltinAtom):
        parts = atom.args
    else:
        parts = atom.variables
    return {t.name for t in parts if isinstance(t, Var)}


def _validate_rule(body, head, line, col) -> Rule:
    if any(isinstance(a, SelectAtom) for a in body):
        raise RuleSyntaxError("sqwrl:select may only appear as the head", line, col)
    body_vars = set()
    for a in body:
        body_vars |= _atom_vars(a)
    if any(isinstance(a, SelectAtom) for a in head):
        if len(head) != 1:
            raise RuleSyntaxError("a query head is a single sqwrl:select atom", line, col)
    else:
        for a in head:
            if not isinstance(a, (ClassAtom, PropertyAtom)):
                raise RuleSyntaxError(
                    "rule heads may contain class and property atoms only", line, col
                )
    for a in head:
        unsafe = _atom_vars(a) - body_vars
        if unsafe:
            raise SafetyError(
                f"head variable ?{sorted(unsafe)[0]} does not occur in the rule body"
            )
    return Rule(tuple(body), tuple(head), line, col)


def parse_program(text: str):
    """Parse rule text into a list of rules/queries; positions are 1-based."""
    return _Parser(_tokenize(text)).program()


# --- evaluation ---------------------------------------------------------------


@dataclass(frozen=True)
class QueryResult:
    variables: tuple
    rows: tuple

    def to_tsv(self) -> str:
        lines = ["\t".join("?" + v for v in self.variables)]
        for row in self.rows:
            lines.append("\t".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    return str(v)


@dataclass
class RunResult:
    kb: KnowledgeBase
    queries: list


class _Geometry:
    """Registry of named bodies with a memoized pair classifier: one
    matrix computation per unordered pair serves all eight builtins."""

    def __init__(self, registry):
        self.registry = dict(registry)
        self.names = sorted(self.registry)
        self._cache = {}

    def relation(self, a: str, b: str) -> TopoRelation:
        if a not in self.registry:
            raise MissingGeometryError(f"no geometry bound to individual {a!r}")
        if b not in self.registry:
            raise MissingGeometryError(f"no geometry bound to individual {b!r}")
        key = (a, b)
        if key not in self._cache:
            r = classify(compute_matrix(self.registry[a], self.registry[b]))
            self._cache[key] = r
            self._cache[(b, a)] = inverse_relation(r)
        return self._cache[key]


def _subst(term, binding):
    if isinstance(term, Var):
        return binding.get(term.name, term)
    if isinstance(term, StrLit):
        return term.value
    return term


def _is_generator(atom) -> bool:
    return not (isinstance(atom, BuiltinAtom) and atom.name.startswith("swrlb:"))


def _match_class(kb, atom, binding, delta):
    t = _subst(atom.term, binding)
    if isinstance(t, Var):
        if delta is None:
            for x in kb.instances_of(atom.cls):
                yield {**binding, t.name: x}
        else:
            for f in sorted(delta):
                if f[0] == "class" and f[2] == atom.cls:
                    yield {**binding, t.name: f[1]}
    else:
        if delta is None:
            if isinstance(t, str) and atom.cls in kb.classes_of(t):
                yield binding
        elif ("class", t, atom.cls) in delta:
            yield binding


def _property_facts(kb, prop, delta):
    if delta is not None:
        return sorted((f[1], f[3]) for f in delta if f[0] == "triple" and f[2] == prop)
    pairs = kb.pairs_of(prop)
    pairs += sorted((s, attrs[prop]) for s, attrs in kb.attributes.items() if prop in attrs)
    return pairs


def _match_pairs(pairs, t1, t2, binding):
    for s, o in pairs:
        b = binding
        if isinstance(t1, Var):
            b = {**b, t1.name: s}
        elif t1 != s:
            continue
        v2 = t2 if not isinstance(t2, Var) else b.get(t2.name, t2)
        if isinstance(v2, Var):
            b = {**b, v2.name: o}
        elif v2 != o:
            continue
        yield b


def _match_property(kb, atom, binding, delta):
    t1 = _subst(atom.subject, binding)
    t2 = _subst(atom.object, binding)
    yield from _match_pairs(_property_facts(kb, atom.prop, delta), t1, t2, binding)


def _match_data(kb, atom, binding, delta):
    if delta is not None:
        return
    t1 = _subst(atom.subject, binding)
    value = _subst(atom.value, binding)
    pairs = sorted((s, attrs[atom.prop]) for s, attrs in kb.attributes.items()
                   if atom.prop in attrs)
    yield from _match_pairs(pairs, t1, value, binding)


def _match_topo_builtin(kb, geo, atom, binding, delta, added):
    if delta is not None:
        return
    rel = _RELATION_BY_BUILTIN[atom.name]
    t1 = _subst(atom.args[0], binding)
    t2 = _subst(atom.args[1], binding)
    for t in (t1, t2):
        if not isinstance(t, Var) and t not in geo.registry:
            raise MissingGeometryError(f"no geometry bound to individual {t!r}")
    lefts = geo.names if isinstance(t1, Var) else [t1]
    for a in lefts:
        b1 = {**binding, t1.name: a} if isinstance(t1, Var) else binding
        u2 = t2 if not isinstance(t2, Var) else b1.get(t2.name, t2)
        rights = geo.names if isinstance(u2, Var) else [u2]
        for b in rights:
            if geo.relation(a, b) is rel:
                if kb.assert_triple(a, rel.topo_property, b):
                    added.add(("triple", a, rel.topo_property, b))
                yield {**b1, u2.name: b} if isinstance(u2, Var) else b1


def _check_comparison(atom, binding):
    op = atom.name[len("swrlb:"):]
    x = _subst(atom.args[0], binding)
    y = _subst(atom.args[1], binding)
    for v in (x, y):
        if isinstance(v, Var):
            raise ComparisonTypeError(f"comparison operand ?{v.name} is unbound")
    if op == "equal":
        if isinstance(x, Fraction) != isinstance(y, Fraction):
            raise ComparisonTypeError(
                f"swrlb:equal operands have incompatible types: {x!r}, {y!r}"
            )
        return x == y
    if not isinstance(x, Fraction) or not isinstance(y, Fraction):
        raise ComparisonTypeError(f"swrlb:{op} needs numeric operands: {x!r}, {y!r}")
    return x < y if op == "lessThan" else x > y


def _eval_body(kb, geo, atoms, delta_pos, delta, added):
    """All bindings satisfying the body.  With a delta position, that
    atom matches only last-round facts (the semi-naive join)."""
    generators = [a for a in atoms if _is_generator(a)]
    filters = [a for a in atoms if not _is_generator(a)]
    bindings = [{}]
    for idx, atom in enumerate(generators):
        restrict = delta if idx == delta_pos else None
        out = []
        for b in bindings:
            if isinstance(atom, ClassAtom):
                out.extend(_match_class(kb, atom, b, restrict))
            elif isinstance(atom, PropertyAtom):
                out.extend(_match_property(kb, atom, b, restrict))
            elif isinstance(atom, DataAtom):
                out.extend(_match_data(kb, atom, b, restrict))
            else:
                out.extend(_match_topo_builtin(kb, geo, atom, b, restrict, added))
        bindings = out
        if not bindings:
            return []
    return [b for b in bindings if all(_check_comparison(f, b) for f in filters)]


def _assert_head(kb, head, binding, added):
    for atom in head:
        if isinstance(atom, ClassAtom):
            x = _subst(atom.term, binding)
            if atom.cls not in kb.classes_of(x):
                kb.assert_class(x, atom.cls)
                added.add(("class", x, atom.cls))
        else:
            s = _subst(atom.subject, binding)
            o = _subst(atom.object, binding)
            if kb.assert_triple(s, atom.prop, o):
                added.add(("triple", s, atom.prop, o))


def _delta_positions(rule):
    generators = [a for a in rule.body if _is_generator(a)]
    return [i for i, a in enumerate(generators)
            if isinstance(a, (ClassAtom, PropertyAtom))]


def run(kb: KnowledgeBase, registry, rules) -> RunResult:
    """Evaluate the program: forward-chain the rules to fixpoint over
    the knowledge base, materialize, then answer the queries.

    Topological builtins resolve against the geometry registry (name ->
    Body) and assert their successes as topo: triples.  Comparison
    builtins act as filters and require bound operands."""
    geo = _Geometry(registry)
    defs = [r for r in rules if not r.is_query]
    queries = [r for r in rules if r.is_query]

    added: set = set()
    for rule in defs:
        for b in _eval_body(kb, geo, rule.body, None, None, added):
            _assert_head(kb, rule.head, b, added)
    delta = added
    while delta:
        added = set()
        for rule in defs:
            for pos in _delta_positions(rule):
                for b in _eval_body(kb, geo, rule.body, pos, delta, added):
                    _assert_head(kb, rule.head, b, added)
        delta = added

    kb.materialize()

    results = []
    query_added: set = set()
    for q in queries:
        select = q.head[0]
        rows = set()
        for b in _eval_body(kb, geo, q.body, None, None, query_added):
            rows.add(tuple(b[v.name] for v in select.variables))
        results.append(QueryResult(
            tuple(v.name for v in select.variables),
            tuple(sorted(rows, key=_row_key)),
        ))
    if query_added:
        kb.materialize()
    return RunResult(kb, results)


def _row_key(row):
    return tuple((1, str(v)) if isinstance(v, str) else (0, v) for v in row)
