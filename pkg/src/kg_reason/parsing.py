"""Parsers for the structured responses each stage expects.

All parsers accept arbitrary UTF-8 text and either return a value or raise
one of the typed errors from :mod:`kg_reason.errors`; they never raise
anything else. Callers may pass a ``notes`` list to collect trace remarks
about skipped lines or dropped items.
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass

from .candidates import Mention, RelationCandidates
from .errors import (
    AnswerGroundingError,
    RelationParseError,
    SegmentationParseError,
    VerdictParseError,
)
from .graph import TypeGraph, canonical_label

SUPPORTED = "Supported"
REFUTED = "Refuted"


@dataclass(frozen=True)
class SubSentence:
    """One segmented unit with its entity mentions (at most two)."""

    index: int
    text: str
    mentions: tuple[Mention, ...]


@dataclass(frozen=True)
class RetrievedRelations:
    """Relations picked by the backend for one sub-sentence, at most k."""

    relations: tuple[str, ...]
    k: int


@dataclass(frozen=True)
class Verdict:
    label: str  # SUPPORTED | REFUTED
    rationale: str


@dataclass(frozen=True)
class AnswerCandidate:
    entity: str
    rationale: str


_SEGMENT_LINE = re.compile(
    r"^\s*\d+\.\s*(?P<text>.*),\s*Entity set:\s*\[(?P<entities>.*)\]\s*$"
)


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in ("'", '"'):
        return token[1:-1]
    return token


def parse_segmentation(
    response: str,
    query_mentions: Sequence[Mention],
    type_graph: TypeGraph | None = None,
    notes: list[str] | None = None,
) -> list[SubSentence]:
    """Parse numbered ``<n>. <sentence>, Entity set: [...]`` lines.

    Entity surfaces are resolved against the query's mentions first, then
    the type vocabulary, and otherwise become variables. Lines that fail the
    grammar, or that carry more than two entities, are skipped with a note.
    Raises :class:`SegmentationParseError` when no line parses.
    """
    by_surface = {canonical_label(m.surface): m for m in query_mentions}
    parsed: list[SubSentence] = []
    for raw_line in response.splitlines():
        if not raw_line.strip():
            continue
        match = _SEGMENT_LINE.match(raw_line)
        if match is None:
            _note(notes, f"line failed grammar: {raw_line!r}")
            continue
        surfaces = [_unquote(t) for t in re.split(r"\s*##\s*", match.group("entities"))]
        surfaces = [s for s in surfaces if s]
        if not surfaces:
            _note(notes, f"line has an empty entity set: {raw_line!r}")
            continue
        if len(surfaces) > 2:
            _note(notes, f"line carries more than two entities: {raw_line!r}")
            continue
        mentions = tuple(
            _resolve_surface(s, by_surface, type_graph) for s in surfaces
        )
        parsed.append(SubSentence(len(parsed) + 1, match.group("text").strip(), mentions))
    if not parsed:
        raise SegmentationParseError("no response line matched the segmentation grammar")
    return parsed


def _resolve_surface(
    surface: str,
    by_surface: dict[str, Mention],
    type_graph: TypeGraph | None,
) -> Mention:
    known = by_surface.get(canonical_label(surface))
    if known is not None:
        return known
    if type_graph is not None:
        tid = type_graph.resolve_type(surface)
        if tid is not None:
            return Mention.type_ref(surface, tid)
    return Mention.variable(surface)


_BRACKETED = re.compile(r"\[([^\[\]]*)\]")
_QUOTED = re.compile(r"'([^']*)'|\"([^\"]*)\"")


def parse_relations(
    response: str,
    offered: RelationCandidates | Sequence[str],
    k: int,
    notes: list[str] | None = None,
) -> RetrievedRelations:
    """Parse the first bracketed list and filter it against the offered pool.

    Items are matched case-sensitively; unmatched items are dropped with a
    note. The result keeps response order, has no duplicates, and is
    truncated to k. If every item was dropped, the first k offered labels
    are used instead. Raises :class:`RelationParseError` when no bracketed
    list is present.
    """
    if k < 1:
        raise RelationParseError(f"k must be >= 1, got {k}")
    pool = tuple(offered.relations if isinstance(offered, RelationCandidates) else offered)
    match = _BRACKETED.search(response)
    if match is None:
        raise RelationParseError("no bracketed list in response")
    inner = match.group(1)
    items = [a or b for a, b in _QUOTED.findall(inner)]
    if not items:
        items = [piece.strip() for piece in inner.split(",") if piece.strip()]
    offered_set = set(pool)
    kept: list[str] = []
    for item in items:
        if item in offered_set:
            if item not in kept:
                kept.append(item)
        else:
            _note(notes, f"dropped relation not in the offered set: {item!r}")
    if not kept:
        _note(notes, "no offered relation matched; falling back to the first k offered")
        kept = list(pool[:k])
    return RetrievedRelations(tuple(kept[:k]), k)


_VERDICT_TOKEN = re.compile(r"^\s*(true|false)\b", re.IGNORECASE)


def parse_verdict(response: str) -> Verdict:
    """Map a leading True/False token to a verdict.

    The rationale is whatever follows the first comma. Raises
    :class:`VerdictParseError` when neither token leads the response.
    """
    match = _VERDICT_TOKEN.match(response)
    if match is None:
        raise VerdictParseError(f"response does not start with True/False: {response[:80]!r}")
    label = SUPPORTED if match.group(1).lower() == "true" else REFUTED
    rationale = response.split(",", 1)[1].strip() if "," in response else ""
    return Verdict(label, rationale)


def parse_answer(
    response: str, evidence: Sequence[tuple[str, str, str]]
) -> AnswerCandidate:
    """Ground the response in the evidence endpoints.

    The answer is the longest evidence endpoint label (canonicalized,
    case-insensitive) found anywhere in the response; the full response is
    kept as the rationale. Raises :class:`AnswerGroundingError` when the
    evidence is empty or no endpoint is mentioned.
    """
    if not evidence:
        raise AnswerGroundingError("cannot ground an answer in empty evidence")
    endpoints: list[str] = []
    seen: set[str] = set()
    for head, _, tail in evidence:
        for label in (head, tail):
            key = canonical_label(label)
            if key not in seen:
                seen.add(key)
                endpoints.append(label)
    haystack = canonical_label(response).lower()
    best: str | None = None
    best_len = -1
    for label in endpoints:
        needle = canonical_label(label).lower()
        if needle and needle in haystack and len(needle) > best_len:
            best = label
            best_len = len(needle)
    if best is None:
        raise AnswerGroundingError("no evidence entity appears in the response")
    return AnswerCandidate(entity=best, rationale=response)


def _note(notes: list[str] | None, message: str) -> None:
    if notes is not None:
        notes.append(message)


__all__ = [
    "SUPPORTED",
    "REFUTED",
    "SubSentence",
    "RetrievedRelations",
    "Verdict",
    "AnswerCandidate",
    "parse_segmentation",
    "parse_relations",
    "parse_verdict",
    "parse_answer",
]
