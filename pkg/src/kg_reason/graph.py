"""In-memory knowledge graph with adjacency indexes and a type projection.

The graph interns entity, relation and type labels to dense integer ids.
Entity and type labels are compared after canonicalization (surrounding
whitespace trimmed, underscores unified with spaces), so ``William Anders``
and ``William_Anders`` name the same entity. Relation labels are compared
case-sensitively and verbatim.

Graphs are immutable once built and safe for concurrent readers.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import NamedTuple

from .errors import GraphLoadError, UnknownEntityError


def canonical_label(label: str) -> str:
    """Canonical comparison form for entity and type labels."""
    return label.strip().replace("_", " ")


class Triple(NamedTuple):
    """One directed edge, all fields interned ids of the owning graph."""

    head: int
    relation: int
    tail: int


class Interner:
    """Bidirectional label table handing out dense integer ids."""

    def __init__(self, canonicalize: Callable[[str], str] | None = None):
        self._canonicalize = canonicalize or str.strip
        self._by_key: dict[str, int] = {}
        self._labels: list[str] = []

    def intern(self, label: str) -> int:
        key = self._canonicalize(label)
        found = self._by_key.get(key)
        if found is not None:
            return found
        new_id = len(self._labels)
        self._by_key[key] = new_id
        self._labels.append(label.strip())
        return new_id

    def lookup(self, label: str) -> int | None:
        return self._by_key.get(self._canonicalize(label))

    def label(self, ident: int) -> str:
        return self._labels[ident]

    def labels(self) -> list[str]:
        return list(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: str) -> bool:
        return self.lookup(label) is not None


class KnowledgeGraph:
    """Indexed triple store. Use :func:`load_graph` or :meth:`from_triples`."""

    def __init__(self) -> None:
        self._entities = Interner(canonical_label)
        self._relations = Interner()
        self._types = Interner(canonical_label)
        self.triples: tuple[Triple, ...] = ()
        self.out_index: dict[int, dict[int, set[int]]] = {}
        self.in_index: dict[int, dict[int, set[int]]] = {}
        self.entity_types: dict[int, frozenset[int]] = {}
        self.duplicate_count = 0
        self._positions: dict[Triple, int] = {}

    @classmethod
    def from_triples(
        cls,
        triples: Iterable[tuple[str, str, str]],
        entity_types: Iterable[tuple[str, str]] = (),
    ) -> "KnowledgeGraph":
        """Build a graph from label triples and optional (entity, type) pairs."""
        g = cls()
        ordered: list[Triple] = []
        for head, relation, tail in triples:
            t = Triple(
                g._entities.intern(head),
                g._relations.intern(relation),
                g._entities.intern(tail),
            )
            if t in g._positions:
                g.duplicate_count += 1
                continue
            g._positions[t] = len(ordered)
            ordered.append(t)
            g.out_index.setdefault(t.head, {}).setdefault(t.relation, set()).add(t.tail)
            g.in_index.setdefault(t.tail, {}).setdefault(t.relation, set()).add(t.head)
        g.triples = tuple(ordered)
        typed: dict[int, set[int]] = {}
        for entity, type_label in entity_types:
            eid = g._entities.intern(entity)
            typed.setdefault(eid, set()).add(g._types.intern(type_label))
        g.entity_types = {eid: frozenset(ts) for eid, ts in typed.items()}
        return g

    # label/id plumbing -------------------------------------------------

    def entity_id(self, label: str) -> int:
        found = self._entities.lookup(label)
        if found is None:
            raise UnknownEntityError(label)
        return found

    def maybe_entity_id(self, label: str) -> int | None:
        return self._entities.lookup(label)

    def entity_label(self, ident: int) -> str:
        return self._entities.label(ident)

    def relation_label(self, ident: int) -> str:
        return self._relations.label(ident)

    def maybe_relation_id(self, label: str) -> int | None:
        return self._relations.lookup(label)

    def type_label(self, ident: int) -> str:
        return self._types.label(ident)

    def maybe_type_id(self, label: str) -> int | None:
        return self._types.lookup(label)

    def intern_type(self, label: str) -> int:
        return self._types.intern(label)

    def has_entity(self, label: str) -> bool:
        return label in self._entities

    def entity_labels(self) -> set[str]:
        return set(self._entities.labels())

    def relation_labels(self) -> set[str]:
        return set(self._relations.labels())

    def triple_labels(self, t: Triple) -> tuple[str, str, str]:
        return (
            self.entity_label(t.head),
            self.relation_label(t.relation),
            self.entity_label(t.tail),
        )

    def position(self, t: Triple) -> int:
        """Load-order position of a triple."""
        return self._positions[t]

    def num_entities(self) -> int:
        return len(self._entities)

    # id-level queries ---------------------------------------------------

    def incident_relation_ids(self, eid: int, direction: str = "both") -> set[int]:
        rels: set[int] = set()
        if direction in ("outgoing", "both"):
            rels.update(self.out_index.get(eid, {}))
        if direction in ("incoming", "both"):
            rels.update(self.in_index.get(eid, {}))
        return rels

    def neighbor_ids(self, eid: int) -> set[int]:
        nbrs: set[int] = set()
        for targets in self.out_index.get(eid, {}).values():
            nbrs.update(targets)
        for sources in self.in_index.get(eid, {}).values():
            nbrs.update(sources)
        return nbrs


@dataclass
class TypeGraph:
    """Projection mapping each entity type to the relations incident to
    entities carrying that type.
    """

    graph: KnowledgeGraph
    type_relations: dict[int, frozenset[int]]
    empty: bool = False

    def resolve_type(self, label: str) -> int | None:
        return self.graph.maybe_type_id(label)

    def has_type(self, label: str) -> bool:
        return self.graph.maybe_type_id(label) is not None

    def type_labels(self) -> set[str]:
        return {self.graph.type_label(t) for t in self.type_relations}

    def relation_ids_for(self, tid: int) -> frozenset[int]:
        return self.type_relations.get(tid, frozenset())


def load_graph(triples_path: str, types_path: str | None = None) -> KnowledgeGraph:
    """Load a graph from a tab-separated triple file and optional type file.

    Triple lines are ``head<TAB>relation<TAB>tail``; type lines are
    ``entity<TAB>type``. Lines starting with ``#`` and blank lines are
    skipped. Duplicate triples are dropped and counted on the returned
    graph. Entities appearing only in the type file are still interned.
    """
    types = _read_tsv(types_path, 2) if types_path is not None else ()
    g = KnowledgeGraph.from_triples(_read_tsv(triples_path, 3), types)
    if not g.triples:
        raise GraphLoadError(triples_path, None, "no triples in file")
    return g


def _read_tsv(path: str, width: int):
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise GraphLoadError(path, None, str(exc)) from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != width:
                raise GraphLoadError(
                    path, lineno, f"expected {width} tab-separated fields, got {len(fields)}"
                )
            stripped = tuple(f.strip() for f in fields)
            if any(not f for f in stripped):
                raise GraphLoadError(path, lineno, "empty field")
            yield stripped


def relations_of_entity(
    g: KnowledgeGraph, entity: str, direction: str = "both"
) -> set[str]:
    """Labels of relations on edges where the entity is head or tail.

    Raises :class:`UnknownEntityError` for labels not interned in the graph.
    """
    if direction not in ("outgoing", "incoming", "both"):
        raise ValueError(f"bad direction: {direction!r}")
    eid = g.entity_id(entity)
    return {g.relation_label(r) for r in g.incident_relation_ids(eid, direction)}


def build_type_graph(g: KnowledgeGraph) -> TypeGraph:
    """Project the graph onto its type vocabulary.

    Each type maps to the union of relations incident (either direction) to
    the entities carrying it. A graph without type assignments produces an
    empty projection flagged with ``empty=True``.
    """
    acc: dict[int, set[int]] = {}
    for eid, tids in g.entity_types.items():
        rels = g.incident_relation_ids(eid, "both")
        for tid in tids:
            acc.setdefault(tid, set()).update(rels)
    return TypeGraph(
        graph=g,
        type_relations={t: frozenset(r) for t, r in acc.items()},
        empty=not g.entity_types,
    )


def relations_of_type(tg: TypeGraph, type_label: str) -> set[str]:
    """Relation labels recorded for a type; empty set for unknown types."""
    tid = tg.graph.maybe_type_id(type_label)
    if tid is None:
        return set()
    return {tg.graph.relation_label(r) for r in tg.type_relations.get(tid, frozenset())}


def relations_within_n_hops(g: KnowledgeGraph, seed: str, n: int) -> set[str]:
    """Labels of relations on edges reachable within n undirected hops.

    An edge is within hop i when one endpoint sits at distance i - 1 from
    the seed, so the result is the union of relations incident to every
    node at distance <= n - 1.
    """
    if n < 1:
        raise ValueError("hop count must be >= 1")
    seed_id = g.entity_id(seed)
    distances = {seed_id: 0}
    frontier = deque([seed_id])
    while frontier:
        node = frontier.popleft()
        if distances[node] >= n - 1:
            continue
        for nbr in g.neighbor_ids(node):
            if nbr not in distances:
                distances[nbr] = distances[node] + 1
                frontier.append(nbr)
    rels: set[int] = set()
    for node, dist in distances.items():
        if dist <= n - 1:
            rels.update(g.incident_relation_ids(node, "both"))
    return {g.relation_label(r) for r in rels}


def triples_matching(
    g: KnowledgeGraph, endpoints: Iterable[str], relations: Iterable[str]
) -> list[Triple]:
    """Triples whose relation is in ``relations`` and whose head or tail is
    in ``endpoints``, deduplicated, in load order. Unknown labels simply
    match nothing.
    """
    endpoint_ids = {e for e in (g.maybe_entity_id(x) for x in endpoints) if e is not None}
    relation_ids = {r for r in (g.maybe_relation_id(x) for x in relations) if r is not None}
    return match_triples_by_id(g, endpoint_ids, relation_ids)


def match_triples_by_id(
    g: KnowledgeGraph, endpoint_ids: set[int], relation_ids: set[int]
) -> list[Triple]:
    """Index-backed form of :func:`triples_matching` over interned ids."""
    found: set[Triple] = set()
    for eid in endpoint_ids:
        for rid, tails in g.out_index.get(eid, {}).items():
            if rid in relation_ids:
                found.update(Triple(eid, rid, t) for t in tails)
        for rid, heads in g.in_index.get(eid, {}).items():
            if rid in relation_ids:
                found.update(Triple(h, rid, eid) for h in heads)
    return sorted(found, key=g.position)
