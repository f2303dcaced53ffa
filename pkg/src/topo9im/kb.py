"""Knowledge base: classes, individuals, characteristic-bearing
properties, triples; materialization and consistency checking.

This is deliberately a small fragment of an ontology store.  Properties
carry logical characteristics (symmetric, transitive, ...) and an
optional inverse; materialization closes the triple set under those
semantics; the consistency checker reports characteristic violations as
data rather than raising.  There is no class expression language and no
individual merging: `topo:equals` is an ordinary property that happens
to be reflexive, symmetric and transitive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from .errors import VocabularyConflictError

BASE_IRI = "http://topo9im.local/topo#"

Literal = Fraction | str


class Characteristic(Enum):
    SYMMETRIC = "Symmetric"
    ASYMMETRIC = "Asymmetric"
    TRANSITIVE = "Transitive"
    REFLEXIVE = "Reflexive"
    IRREFLEXIVE = "Irreflexive"
    FUNCTIONAL = "Functional"


_EXCLUSIVE = (
    (Characteristic.SYMMETRIC, Characteristic.ASYMMETRIC),
    (Characteristic.REFLEXIVE, Characteristic.IRREFLEXIVE),
)


@dataclass(frozen=True)
class PropertyDef:
    """Declared object property with its logical characteristics."""

    name: str
    characteristics: frozenset = frozenset()
    inverse_of: str | None = None

    def __post_init__(self):
        chars = frozenset(self.characteristics)
        object.__setattr__(self, "characteristics", chars)
        for a, b in _EXCLUSIVE:
            if a in chars and b in chars:
                raise VocabularyConflictError(
                    f"{self.name}: {a.value} and {b.value} are mutually exclusive"
                )

    def has(self, c: Characteristic) -> bool:
        return c in self.characteristics


@dataclass(frozen=True)
class Violation:
    """One characteristic violation found by check_consistency."""

    prop: str
    kind: str
    subject: str
    objects: tuple[str, ...]

    def __str__(self) -> str:
        if self.kind == "Functional":
            return (f"{self.kind} violation: {self.prop}({self.subject}, ...) has "
                    f"multiple objects {', '.join(self.objects)}")
        if self.kind == "Asymmetric":
            return (f"{self.kind} violation: {self.prop} holds both ways between "
                    f"{self.subject} and {self.objects[0]}")
        return f"{self.kind} violation: {self.prop}({self.subject}, {self.objects[0]})"


class KnowledgeBase:
    """Mutable store of classes, individuals, properties and triples.

    Single writer at a time; all reads are safe between mutations.
    """

    def __init__(self):
        self.classes: set[str] = set()
        self.individuals: dict[str, set[str]] = {}
        self.attributes: dict[str, dict[str, Literal]] = {}
        self.properties: dict[str, PropertyDef] = {}
        self.triples: set[tuple[str, str, str]] = set()
        self.domain: set[str] = set()  # individuals eligible for reflexive closure

    # --- declarations ----------------------------------------------------

    def add_class(self, name: str) -> None:
        self.classes.add(name)

    def add_individual(self, name: str, *classes: str) -> None:
        self.individuals.setdefault(name, set())
        for c in classes:
            self.assert_class(name, c)

    def add_domain_individual(self, name: str) -> None:
        """Mark an individual (typically one carrying geometry) as part
        of the reflexive-closure domain."""
        self.add_individual(name)
        self.domain.add(name)

    def declare_property(self, name: str, characteristics=(), inverse_of: str | None = None) -> PropertyDef:
        """Declare or re-declare a property; identical redeclaration is a
        no-op, a differing one raises.  Declaring an inverse links the
        other property back when it exists."""
        pd = PropertyDef(name, frozenset(characteristics), inverse_of)
        existing = self.properties.get(name)
        if existing is not None:
            if existing == pd:
                return existing
            raise VocabularyConflictError(f"property {name} redeclared differently")
        self.properties[name] = pd
        if inverse_of is not None:
            other = self.properties.get(inverse_of)
            if other is not None:
                if other.inverse_of is None:
                    self.properties[inverse_of] = replace(other, inverse_of=name)
                elif other.inverse_of != name:
                    raise VocabularyConflictError(
                        f"{inverse_of} already has inverse {other.inverse_of}"
                    )
        return pd

    # --- assertions -------------------------------------------------------

    def assert_class(self, individual: str, cls: str) -> None:
        self.classes.add(cls)
        self.individuals.setdefault(individual, set()).add(cls)

    def assert_triple(self, s: str, p: str, o: str) -> bool:
        """Add an object triple; returns True when it was new.  The
        property and both individuals are declared on the fly if needed."""
        if p not in self.properties:
            self.declare_property(p)
        self.individuals.setdefault(s, set())
        self.individuals.setdefault(o, set())
        before = len(self.triples)
        self.triples.add((s, p, o))
        return len(self.triples) != before

    def assert_data(self, s: str, p: str, value) -> None:
        if isinstance(value, int) and not isinstance(value, bool):
            value = Fraction(value)
        if not isinstance(value, (Fraction, str)):
            raise TypeError(f"literal must be an exact number or string: {value!r}")
        self.individuals.setdefault(s, set())
        self.attributes.setdefault(s, {})[p] = value

    # --- queries ----------------------------------------------------------

    def has_triple(self, s: str, p: str, o: str) -> bool:
        return (s, p, o) in self.triples

    def classes_of(self, individual: str) -> set[str]:
        return self.individuals.get(individual, set())

    def instances_of(self, cls: str):
        return sorted(n for n, cs in self.individuals.items() if cls in cs)

    def pairs_of(self, prop: str):
        return sorted((s, o) for (s, p, o) in self.triples if p == prop)

    def attribute(self, individual: str, prop: str):
        return self.attributes.get(individual, {}).get(prop)

    # --- semantics --------------------------------------------------------

    def _topo_participants(self) -> set[str]:
        out = set()
        for s, p, o in self.triples:
            if p.startswith("topo:"):
                out.add(s)
                out.add(o)
        return out

    def materialize(self) -> "KnowledgeBase":
        """Close the triples under symmetry, transitivity, inverses and
        reflexivity; monotone over a finite domain, so it terminates."""
        reflexive_props = [n for n, pd in self.properties.items()
                           if pd.has(Characteristic.REFLEXIVE)]
        while True:
            new: list[tuple[str, str, str]] = []
            by_ps: dict[tuple[str, str], set[str]] = {}
            for s, p, o in self.triples:
                by_ps.setdefault((p, s), set()).add(o)
            for s, p, o in self.triples:
                pd = self.properties.get(p)
                if pd is None:
                    continue
                if pd.has(Characteristic.SYMMETRIC) and (o, p, s) not in self.triples:
                    new.append((o, p, s))
                inv = pd.inverse_of
                if inv is not None and (o, inv, s) not in self.triples:
                    new.append((o, inv, s))
                if pd.has(Characteristic.TRANSITIVE):
                    for o2 in by_ps.get((p, o), ()):
                        if (s, p, o2) not in self.triples:
                            new.append((s, p, o2))
            if reflexive_props:
                scope = self._topo_participants() | self.domain
                for p in reflexive_props:
                    for x in scope:
                        if (x, p, x) not in self.triples:
                            new.append((x, p, x))
            if not new:
                return self
            for t in new:
                self.assert_triple(*t)

    def check_consistency(self) -> list[Violation]:
        """Every Irreflexive, Asymmetric and Functional violation in the
        current triple set; materialize first for a complete report."""
        out: list[Violation] = []
        for name in sorted(self.properties):
            pd = self.properties[name]
            pairs = self.pairs_of(name)
            pair_set = set(pairs)
            if pd.has(Characteristic.IRREFLEXIVE):
                for s, o in pairs:
                    if s == o:
                        out.append(Violation(name, "Irreflexive", s, (o,)))
            if pd.has(Characteristic.ASYMMETRIC):
                for s, o in pairs:
                    if s < o and (o, s) in pair_set:
                        out.append(Violation(name, "Asymmetric", s, (o,)))
            if pd.has(Characteristic.FUNCTIONAL):
                by_subject: dict[str, list[str]] = {}
                for s, o in pairs:
                    by_subject.setdefault(s, []).append(o)
                for s, objs in sorted(by_subject.items()):
                    if len(objs) > 1:
                        out.append(Violation(name, "Functional", s, tuple(objs)))
        return out

    # --- persistence ------------------------------------------------------

    def to_document(self) -> dict:
        """Canonical JSON-ready form; deterministic for identical content."""
        return {
            "classes": sorted(self.classes),
            "properties": {
                name: {
                    "characteristics": sorted(c.value for c in pd.characteristics),
                    "inverse_of": pd.inverse_of,
                }
                for name, pd in sorted(self.properties.items())
            },
            "individuals": {
                name: {
                    "classes": sorted(cs),
                    "attributes": {
                        p: _encode_literal(v)
                        for p, v in sorted(self.attributes.get(name, {}).items())
                    },
                    "geometric": name in self.domain,
                }
                for name, cs in sorted(self.individuals.items())
            },
            "triples": sorted(list(t) for t in self.triples),
        }

    @classmethod
    def from_document(cls, doc: dict) -> "KnowledgeBase":
        kb = cls()
        try:
            for c in doc.get("classes", ()):
                kb.add_class(c)
            for name, pdoc in doc.get("properties", {}).items():
                kb.declare_property(
                    name,
                    [Characteristic(c) for c in pdoc.get("characteristics", ())],
                    pdoc.get("inverse_of"),
                )
            for name, idoc in doc.get("individuals", {}).items():
                kb.add_individual(name, *idoc.get("classes", ()))
                for p, enc in idoc.get("attributes", {}).items():
                    kb.assert_data(name, p, _decode_literal(enc))
                if idoc.get("geometric"):
                    kb.domain.add(name)
            for s, p, o in doc.get("triples", ()):
                kb.assert_triple(s, p, o)
        except (TypeError, KeyError, AttributeError) as exc:
            raise ValueError(f"malformed knowledge-base document: {exc}") from exc
        return kb

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "KnowledgeBase":
        return cls.from_document(json.loads(text))

    def to_ntriples(self) -> str:
        """Line-based export of the object triples, `topo:` expanded to
        the fixed base IRI, one `<s> <p> <o> .` line each, sorted."""
        lines = []
        for s, p, o in sorted(self.triples):
            lines.append(f"{_iri(s)} {_iri(p)} {_iri(o)} .")
        return "\n".join(lines) + ("\n" if lines else "")

    # --- misc ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (self.classes == other.classes
                and self.individuals == other.individuals
                and self.attributes == other.attributes
                and self.properties == other.properties
                and self.triples == other.triples
                and self.domain == other.domain)

    def __repr__(self):
        return (f"<KnowledgeBase {len(self.individuals)} individuals, "
                f"{len(self.properties)} properties, {len(self.triples)} triples>")


def _iri(name: str) -> str:
    if name.startswith("topo:"):
        return f"<{BASE_IRI}{name[5:]}>"
    return f"<{name}>"


def _encode_literal(v: Literal) -> dict:
    if isinstance(v, Fraction):
        return {"num": str(v)}
    return {"str": v}


def _decode_literal(enc) -> Literal:
    if not isinstance(enc, dict) or len(enc) != 1:
        raise ValueError(f"malformed literal encoding: {enc!r}")
    if "num" in enc:
        return Fraction(enc["num"])
    if "str" in enc:
        return enc["str"]
    raise ValueError(f"malformed literal encoding: {enc!r}")


_TOPO_CHARS = {
    "topo:disjoint": {Characteristic.SYMMETRIC, Characteristic.IRREFLEXIVE},
    "topo:meets": {Characteristic.SYMMETRIC, Characteristic.IRREFLEXIVE},
    "topo:overlaps": {Characteristic.SYMMETRIC, Characteristic.IRREFLEXIVE},
    "topo:equals": {Characteristic.TRANSITIVE, Characteristic.SYMMETRIC,
                    Characteristic.REFLEXIVE},
    "topo:inside": {Characteristic.TRANSITIVE, Characteristic.ASYMMETRIC,
                    Characteristic.IRREFLEXIVE},
    "topo:contains": {Characteristic.TRANSITIVE, Characteristic.ASYMMETRIC,
                      Characteristic.IRREFLEXIVE},
    "topo:covers": {Characteristic.ASYMMETRIC, Characteristic.IRREFLEXIVE},
    "topo:coveredBy": {Characteristic.ASYMMETRIC, Characteristic.IRREFLEXIVE},
}

_TOPO_INVERSES = {
    "topo:inside": "topo:contains",
    "topo:contains": "topo:inside",
    "topo:covers": "topo:coveredBy",
    "topo:coveredBy": "topo:covers",
}


def preload_topo_vocabulary(kb: KnowledgeBase) -> KnowledgeBase:
    """Declare the eight topological properties with their
    characteristics and the two inverse pairs.

    The assignments follow the relation semantics: equals is an
    equivalence, inside/contains are strict orders and inverses of
    each other, covers/coveredBy are the non-transitive strict pair
    (stacking two coverings can leave a gap between the outer pair),
    and disjoint, meets and overlaps are symmetric and irreflexive.
    """
    for name in sorted(_TOPO_CHARS):
        kb.declare_property(name, _TOPO_CHARS[name], _TOPO_INVERSES.get(name))
    return kb
