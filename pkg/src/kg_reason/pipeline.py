"""Three-stage orchestration: segment, retrieve, assemble evidence, infer.

The pipeline holds only immutable shared state (graph, type projection,
backend, defaults), so one instance may serve many queries concurrently.
Each run produces a :class:`Conclusion` carrying the evidence graph and a
full stage trace; on failure the trace travels with the raised
:class:`~kg_reason.errors.PipelineError`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Union

from .backends import Backend
from .candidates import (
    CONCRETE,
    TYPE_REF,
    VARIABLE,
    Mention,
    RelationCandidates,
    extract_nhop_candidates,
    extract_relation_candidates,
)
from .errors import (
    AssemblyError,
    KGReasonError,
    PipelineError,
    QueryError,
    RetrievalError,
    SegmentationParseError,
)
from .graph import KnowledgeGraph, Triple, TypeGraph, build_type_graph, match_triples_by_id
from .parsing import (
    AnswerCandidate,
    RetrievedRelations,
    SubSentence,
    Verdict,
    parse_answer,
    parse_relations,
    parse_segmentation,
    parse_verdict,
)
from .prompts import (
    INFERENCE,
    QA_INFERENCE_TEMPLATE,
    RETRIEVAL,
    RETRIEVAL_TEMPLATE,
    SEGMENTATION,
    SEGMENTATION_TEMPLATE,
    VERIFICATION_INFERENCE_TEMPLATE,
    render_entity_set,
    render_prompt,
    render_relation_list,
    render_triple_list,
)

CLAIM = "claim"
QUESTION = "question"


@dataclass(frozen=True)
class Query:
    """A claim to verify or a question to answer, with its seed mentions."""

    kind: str
    text: str
    mentions: tuple[Mention, ...]
    hops: int | None = None

    @classmethod
    def claim(cls, text: str, mentions: tuple[Mention, ...] | list[Mention]) -> "Query":
        mentions = tuple(mentions)
        if not text.strip():
            raise QueryError("claim text is empty")
        if not any(m.kind in (CONCRETE, TYPE_REF) for m in mentions):
            raise QueryError("a claim needs at least one concrete or type mention")
        return cls(CLAIM, text, mentions)

    @classmethod
    def question(cls, text: str, seed: Mention, hops: int) -> "Query":
        if not text.strip():
            raise QueryError("question text is empty")
        if seed.kind != CONCRETE:
            raise QueryError("a question needs exactly one concrete seed mention")
        if hops not in (1, 2, 3):
            raise QueryError(f"hops must be 1, 2 or 3, got {hops}")
        return cls(QUESTION, text, (seed,), hops)

    @property
    def seed(self) -> Mention:
        return self.mentions[0]


@dataclass
class EvidenceGraph:
    """Retrieved sub-graph, ordered by graph load order, deduplicated."""

    graph: KnowledgeGraph
    triples: tuple[Triple, ...]
    per_subsentence: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.triples)

    def labels(self) -> list[tuple[str, str, str]]:
        return [self.graph.triple_labels(t) for t in self.triples]

    @property
    def is_empty(self) -> bool:
        return not self.triples


def linearize(evidence: EvidenceGraph) -> str:
    """Render the evidence triples for prompt inclusion; ``[]`` when empty."""
    return render_triple_list(evidence.labels())


@dataclass
class StageTrace:
    """Raw prompts, responses and parsed artifacts for every executed stage."""

    segmentation: dict | None = None
    retrieval: list[dict] = field(default_factory=list)
    assembly: dict | None = None
    inference: dict | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def backend_calls(self) -> int:
        calls = 0
        if self.segmentation is not None:
            calls += 1
        calls += len(self.retrieval)
        if self.inference is not None:
            calls += 1
        return calls

    def to_record(self) -> dict:
        return {
            "segmentation": self.segmentation,
            "retrieval": self.retrieval,
            "assembly": self.assembly,
            "inference": self.inference,
            "timings": self.timings,
        }


@dataclass
class Conclusion:
    result: Union[Verdict, AnswerCandidate]
    evidence: EvidenceGraph
    trace: StageTrace


def _mention_record(m: Mention) -> dict:
    return {"kind": m.kind, "surface": m.surface}


class Pipeline:
    """Runs queries against one graph through a pluggable backend."""

    def __init__(
        self,
        graph: KnowledgeGraph,
        type_graph: TypeGraph | None = None,
        backend: Backend | None = None,
        *,
        k: int = 5,
        shots: int = 12,
    ):
        if backend is None:
            raise ValueError("a completion backend is required")
        self.graph = graph
        self.type_graph = type_graph if type_graph is not None else build_type_graph(graph)
        self.backend = backend
        self.k = k
        self.shots = shots

    # stages --------------------------------------------------------------

    def segment(self, query: Query, trace: StageTrace | None = None) -> list[SubSentence]:
        """Split the query into sub-sentences via the segmentation prompt.

        One-hop questions whose response fails the grammar degrade to a
        single sub-sentence spanning the whole question.
        """
        trace = trace if trace is not None else StageTrace()
        prompt = render_prompt(
            SEGMENTATION_TEMPLATE,
            {
                "CLAIM": query.text,
                "ENTITY_SET": render_entity_set([m.surface for m in query.mentions]),
            },
            self.shots,
        )
        response = self.backend.complete(prompt, SEGMENTATION)
        notes: list[str] = []
        trace.segmentation = {"prompt": prompt, "response": response, "notes": notes}
        try:
            subsentences = parse_segmentation(
                response, query.mentions, self.type_graph, notes
            )
        except SegmentationParseError:
            if query.kind == QUESTION and query.hops == 1:
                notes.append("parse failed; fell back to the whole question")
                subsentences = [SubSentence(1, query.text, query.mentions)]
            else:
                raise
        trace.segmentation["subsentences"] = [
            {"index": s.index, "text": s.text, "mentions": [_mention_record(m) for m in s.mentions]}
            for s in subsentences
        ]
        return subsentences

    def retrieve(
        self,
        subsentences: list[SubSentence],
        query: Query,
        trace: StageTrace | None = None,
    ) -> dict[int, RetrievedRelations]:
        """Pick up to k relations per sub-sentence from its candidate pool.

        Claims build the pool per sub-sentence from its mentions; questions
        share the n-hop pool of the seed across all sub-sentences.
        """
        trace = trace if trace is not None else StageTrace()
        shared: RelationCandidates | None = None
        if query.kind == QUESTION:
            shared = extract_nhop_candidates(query.seed.surface, query.hops, self.graph)
        retrieved: dict[int, RetrievedRelations] = {}
        for sub in subsentences:
            if shared is not None:
                offered = RelationCandidates(shared.relations, sub.index)
            else:
                pool = extract_relation_candidates(sub.mentions, self.graph, self.type_graph)
                offered = RelationCandidates(pool.relations, sub.index)
            if not offered.relations:
                raise RetrievalError(
                    f"no candidate relations for sub-sentence {sub.index}: {sub.text!r}"
                )
            prompt = render_prompt(
                RETRIEVAL_TEMPLATE,
                {
                    "SENTENCE": sub.text,
                    "RELATION_SET": render_relation_list(offered.relations),
                    "TOP_K": str(self.k),
                },
                self.shots,
            )
            response = self.backend.complete(prompt, RETRIEVAL)
            notes: list[str] = []
            parsed = parse_relations(response, offered, self.k, notes)
            retrieved[sub.index] = parsed
            trace.retrieval.append(
                {
                    "index": sub.index,
                    "offered": list(offered.relations),
                    "prompt": prompt,
                    "response": response,
                    "relations": list(parsed.relations),
                    "notes": notes,
                }
            )
        return retrieved

    def assemble(
        self,
        subsentences: list[SubSentence],
        retrieved: dict[int, RetrievedRelations],
        query: Query,
        trace: StageTrace | None = None,
    ) -> EvidenceGraph:
        """Collect matching triples sub-sentence by sub-sentence.

        A binding environment carries variable values forward: each
        sub-sentence anchors on its concrete mentions plus the current
        bindings of its variables, matches triples over its retrieved
        relations, drops triples whose non-anchor endpoint contradicts a
        type mention, then rebinds its variables to the matched endpoints
        outside the anchor set.
        """
        g = self.graph
        bindings: dict[str, set[int]] = {}
        positions: set[int] = set()
        per_sub_positions: dict[int, list[int]] = {}
        for sub in subsentences:
            relations = retrieved[sub.index].relations
            relation_ids = {
                r
                for r in (g.maybe_relation_id(label) for label in relations)
                if r is not None
            }
            anchors: set[int] = set()
            for m in sub.mentions:
                if m.kind == CONCRETE:
                    anchors.add(m.ref)
                elif m.kind == VARIABLE:
                    anchors.update(bindings.get(m.ref, set()))
            if not anchors:
                raise AssemblyError(
                    f"sub-sentence {sub.index} has no anchored entities: {sub.text!r}"
                )
            matched = match_triples_by_id(g, anchors, relation_ids)
            type_ids = {m.ref for m in sub.mentions if m.kind == TYPE_REF}
            if type_ids:
                matched = [
                    t for t in matched if _endpoints_fit_types(g, t, anchors, type_ids)
                ]
            endpoint_ids = {e for t in matched for e in (t.head, t.tail)}
            for m in sub.mentions:
                if m.kind == VARIABLE:
                    bindings[m.ref] = endpoint_ids - anchors
            sub_positions = [g.position(t) for t in matched]
            per_sub_positions[sub.index] = sub_positions
            positions.update(sub_positions)
        ordered = sorted(positions)
        index_of = {pos: i for i, pos in enumerate(ordered)}
        evidence = EvidenceGraph(
            graph=g,
            triples=tuple(g.triples[pos] for pos in ordered),
            per_subsentence={
                idx: tuple(index_of[p] for p in sorted(set(pos_list)))
                for idx, pos_list in per_sub_positions.items()
            },
        )
        if trace is not None:
            trace.assembly = {
                "triples": evidence.labels(),
                "empty_evidence": evidence.is_empty,
                "bindings": {
                    name: sorted(g.entity_label(e) for e in values)
                    for name, values in bindings.items()
                },
            }
        return evidence

    def infer(
        self,
        query: Query,
        evidence: EvidenceGraph,
        trace: StageTrace | None = None,
    ) -> Conclusion:
        """Derive a verdict (claims) or a grounded answer entity (questions)."""
        trace = trace if trace is not None else StageTrace()
        template = (
            QA_INFERENCE_TEMPLATE if query.kind == QUESTION else VERIFICATION_INFERENCE_TEMPLATE
        )
        prompt = render_prompt(
            template,
            {"CLAIM": query.text, "EVIDENCE_SET": linearize(evidence)},
            self.shots,
        )
        response = self.backend.complete(prompt, INFERENCE)
        trace.inference = {"prompt": prompt, "response": response}
        if query.kind == QUESTION:
            result: Verdict | AnswerCandidate = parse_answer(response, evidence.labels())
            trace.inference["answer"] = result.entity
        else:
            result = parse_verdict(response)
            trace.inference["verdict"] = result.label
        return Conclusion(result=result, evidence=evidence, trace=trace)

    # end to end -----------------------------------------------------------

    def run(self, query: Query) -> Conclusion:
        """Run all stages; failures are wrapped with their stage name.

        Evidence assembly counts as part of the graph-retrieval stage. The
        partial trace is attached to the raised error.
        """
        trace = StageTrace()
        subsentences = self._stage(
            "segmentation", trace, lambda: self.segment(query, trace)
        )
        retrieved = self._stage(
            "retrieval", trace, lambda: self.retrieve(subsentences, query, trace)
        )
        evidence = self._stage(
            "retrieval", trace, lambda: self.assemble(subsentences, retrieved, query, trace)
        )
        return self._stage("inference", trace, lambda: self.infer(query, evidence, trace))

    def _stage(self, name: str, trace: StageTrace, thunk):
        start = time.perf_counter()
        try:
            return thunk()
        except PipelineError:
            raise
        except KGReasonError as exc:
            raise PipelineError(name, exc, trace) from exc
        finally:
            trace.timings[name] = trace.timings.get(name, 0.0) + time.perf_counter() - start


def _endpoints_fit_types(
    g: KnowledgeGraph, triple: Triple, anchors: set[int], type_ids: set[int]
) -> bool:
    # Entities without recorded types pass unfiltered.
    for endpoint in (triple.head, triple.tail):
        if endpoint in anchors:
            continue
        recorded = g.entity_types.get(endpoint)
        if recorded and not (recorded & type_ids):
            return False
    return True
