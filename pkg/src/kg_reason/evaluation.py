"""Dataset loaders and the batch evaluation harness.

Verification datasets are line-delimited JSON records with ``claim``,
``entities``, ``label`` and an optional ``type``. Question datasets follow
the ``question with [seed]<TAB>answer|answer`` text convention. The harness
scores verification by verdict accuracy and questions by Hits@1, counting
pipeline errors as incorrect under the stage that failed.
"""

from __future__ import annotations

import json
import re
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .backends import Backend, BackendConfig, as_backend
from .candidates import resolve_mention
from .errors import DatasetLoadError, KGReasonError, PipelineError
from .graph import KnowledgeGraph, TypeGraph, canonical_label
from .parsing import REFUTED, SUPPORTED
from .pipeline import Pipeline, Query

REASONING_TYPES = ("one-hop", "conjunction", "existence", "multi-hop", "negation")

_STAGES = ("segmentation", "retrieval", "inference")


@dataclass(frozen=True)
class VerificationExample:
    claim: str
    entities: tuple[str, ...]
    gold: str  # SUPPORTED | REFUTED
    reasoning_type: str | None = None


@dataclass(frozen=True)
class QAExample:
    question: str  # original text, seed still bracketed
    text: str  # prompt text, brackets removed
    seed: str
    hops: int
    gold_answers: tuple[str, ...]


def load_verification_dataset(path: str) -> list[VerificationExample]:
    """Load claim records from a line-delimited JSON file."""
    examples: list[VerificationExample] = []
    for lineno, record in _read_jsonl(path):
        try:
            claim = record["claim"]
            entities = tuple(record["entities"])
            label = _normalize_label(path, lineno, record["label"])
        except (KeyError, TypeError) as exc:
            raise DatasetLoadError(path, lineno, f"missing field ({exc})") from exc
        if not entities:
            raise DatasetLoadError(path, lineno, "entities must be non-empty")
        reasoning = record.get("type")
        if reasoning is not None:
            reasoning = str(reasoning).strip().lower()
            if reasoning not in REASONING_TYPES:
                raise DatasetLoadError(path, lineno, f"unknown reasoning type {reasoning!r}")
        examples.append(VerificationExample(claim, entities, label, reasoning))
    if not examples:
        raise DatasetLoadError(path, None, "dataset is empty")
    return examples


def _normalize_label(path: str, lineno: int, raw: object) -> str:
    label = str(raw).strip().lower()
    if label == "supported":
        return SUPPORTED
    if label == "refuted":
        return REFUTED
    raise DatasetLoadError(path, lineno, f"unknown label {raw!r}")


def _read_jsonl(path: str):
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise DatasetLoadError(path, None, str(exc)) from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetLoadError(path, lineno, f"bad JSON ({exc})") from exc


_BRACKETED_SEED = re.compile(r"\[([^\[\]]+)\]")


def load_qa_dataset(path: str, hops: int) -> list[QAExample]:
    """Load ``question<TAB>answer|answer`` lines; the seed sits in brackets."""
    examples: list[QAExample] = []
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise DatasetLoadError(path, None, str(exc)) from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DatasetLoadError(path, lineno, "expected question<TAB>answers")
            question, answer_field = parts
            seeds = _BRACKETED_SEED.findall(question)
            if len(seeds) != 1:
                raise DatasetLoadError(
                    path, lineno, f"expected exactly one bracketed seed, got {len(seeds)}"
                )
            answers = tuple(a.strip() for a in answer_field.split("|") if a.strip())
            if not answers:
                raise DatasetLoadError(path, lineno, "no gold answers")
            text = _BRACKETED_SEED.sub(lambda m: m.group(1), question).strip()
            examples.append(QAExample(question, text, seeds[0], hops, answers))
    if not examples:
        raise DatasetLoadError(path, None, "dataset is empty")
    return examples


@dataclass
class EvalReport:
    """Aggregate metrics for one harness run, with its configuration echo."""

    n: int
    correct: int
    metric_name: str  # "accuracy" | "hits_at_1"
    metric_value: float
    mean_evidence_triples: float | None
    mean_evidence_by_gold: dict[str, float] | None
    stage_failures: dict[str, int]
    config: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "correct": self.correct,
            self.metric_name: self.metric_value,
            "mean_evidence_triples": self.mean_evidence_triples,
            "mean_evidence_by_gold": self.mean_evidence_by_gold,
            "stage_failures": self.stage_failures,
            "config": self.config,
        }

    def to_text(self) -> str:
        lines = [
            f"examples:          {self.n}",
            f"correct:           {self.correct}",
            f"{self.metric_name + ':':<18} {self.metric_value:.4f}",
        ]
        if self.mean_evidence_triples is not None:
            lines.append(f"mean evidence:     {self.mean_evidence_triples:.2f}")
        if self.mean_evidence_by_gold:
            for gold, mean in sorted(self.mean_evidence_by_gold.items()):
                lines.append(f"  {gold:<16} {mean:.2f}")
        failures = {s: c for s, c in self.stage_failures.items() if c}
        lines.append(f"stage failures:    {failures or 'none'}")
        lines.append(f"config:            {self.config}")
        return "\n".join(lines)


def build_query(
    example: VerificationExample | QAExample, g: KnowledgeGraph, tg: TypeGraph
) -> Query:
    """Turn a dataset example into a pipeline query."""
    if isinstance(example, VerificationExample):
        mentions = tuple(resolve_mention(label, g, tg) for label in example.entities)
        return Query.claim(example.claim, mentions)
    seed = resolve_mention(example.seed, g, tg)
    return Query.question(example.text, seed, example.hops)


def evaluate(
    dataset: Sequence[VerificationExample] | Sequence[QAExample],
    g: KnowledgeGraph,
    tg: TypeGraph,
    backend: Backend | BackendConfig,
    *,
    k: int,
    shots: int = 12,
    width: int = 1,
    trace_path: str | None = None,
) -> EvalReport:
    """Run the pipeline over the dataset and aggregate metrics.

    Per-example failures are data: they score as incorrect and increment
    the failing stage's counter. When ``trace_path`` is given, one JSON
    record per example is appended in dataset order.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    if isinstance(backend, BackendConfig):
        backend_desc = f"{backend.endpoint} ({backend.model})"
    else:
        backend_desc = type(backend).__name__
    backend = as_backend(backend)
    pipeline = Pipeline(g, tg, backend, k=k, shots=shots)
    is_qa = isinstance(dataset[0], QAExample)

    def run_one(example) -> dict:
        record: dict = {"input": example.question if is_qa else example.claim}
        try:
            query = build_query(example, g, tg)
            conclusion = pipeline.run(query)
        except PipelineError as exc:
            record.update(
                error={"stage": exc.stage, "message": str(exc.cause)},
                correct=False,
                trace=exc.trace.to_record() if exc.trace else None,
            )
            return record
        except KGReasonError as exc:
            # query construction failures land before the first stage
            record.update(
                error={"stage": "segmentation", "message": str(exc)},
                correct=False,
                trace=None,
            )
            return record
        record["evidence_size"] = len(conclusion.evidence)
        record["trace"] = conclusion.trace.to_record()
        if is_qa:
            predicted = conclusion.result.entity
            gold = {canonical_label(a) for a in example.gold_answers}
            record["predicted"] = predicted
            record["correct"] = canonical_label(predicted) in gold
        else:
            record["predicted"] = conclusion.result.label
            record["correct"] = conclusion.result.label == example.gold
        return record

    if width <= 1:
        records = [run_one(example) for example in dataset]
    else:
        with ThreadPoolExecutor(max_workers=width) as pool:
            records = list(pool.map(run_one, dataset))

    correct = sum(1 for r in records if r["correct"])
    failures = {stage: 0 for stage in _STAGES}
    for r in records:
        error = r.get("error")
        if error:
            failures[error["stage"]] = failures.get(error["stage"], 0) + 1
    sizes = [r["evidence_size"] for r in records if "evidence_size" in r]
    mean_evidence = sum(sizes) / len(sizes) if sizes else None
    by_gold: dict[str, float] | None = None
    if not is_qa:
        by_gold = {}
        for gold in (SUPPORTED, REFUTED):
            gold_sizes = [
                r["evidence_size"]
                for r, ex in zip(records, dataset)
                if "evidence_size" in r and ex.gold == gold
            ]
            if gold_sizes:
                by_gold[gold] = sum(gold_sizes) / len(gold_sizes)
    report = EvalReport(
        n=len(records),
        correct=correct,
        metric_name="hits_at_1" if is_qa else "accuracy",
        metric_value=correct / len(records),
        mean_evidence_triples=mean_evidence,
        mean_evidence_by_gold=by_gold,
        stage_failures=failures,
        config={
            "k": k,
            "shots": shots,
            "width": width,
            "backend": backend_desc,
        },
    )
    if trace_path is not None:
        with open(trace_path, "a", encoding="utf-8") as out:
            for r in records:
                out.write(json.dumps(r, ensure_ascii=False) + "\n")
    return report


def ablate(
    dataset: Sequence[VerificationExample] | Sequence[QAExample],
    g: KnowledgeGraph,
    tg: TypeGraph,
    backend_source: BackendConfig | Callable[[], Backend],
    *,
    k_values: Sequence[int],
    shot_values: Sequence[int],
    width: int = 1,
    trace_path: str | None = None,
) -> list[EvalReport]:
    """One evaluate run per (k, shots) grid cell, each on a fresh backend.

    ``backend_source`` must produce a new backend per cell so scripted
    sequence replay starts over; a config or a zero-argument factory works.
    """
    if not k_values or not shot_values:
        raise ValueError("k_values and shot_values must be non-empty")
    reports: list[EvalReport] = []
    for k in k_values:
        for shots in shot_values:
            if isinstance(backend_source, BackendConfig):
                backend = as_backend(backend_source)
            else:
                backend = backend_source()
            reports.append(
                evaluate(
                    dataset,
                    g,
                    tg,
                    backend,
                    k=k,
                    shots=shots,
                    width=width,
                    trace_path=trace_path,
                )
            )
    return reports


def write_report(report: EvalReport, path: str) -> None:
    Path(path).write_text(
        json.dumps(report.to_record(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
