"""Knowledge-graph reasoning with pluggable completion backends.

The pipeline turns a claim or question into sub-sentences, retrieves the
matching relations and evidence sub-graph from an in-memory knowledge
graph, and asks a completion backend for the final verdict or answer.
"""

from .backends import (
    API_KEY_ENV,
    Backend,
    BackendConfig,
    HttpBackend,
    MockBackend,
    make_backend,
    prompt_hash,
)
from .candidates import (
    Mention,
    RelationCandidates,
    extract_nhop_candidates,
    extract_relation_candidates,
    resolve_mention,
)
from .errors import KGReasonError, PipelineError
from .evaluation import (
    EvalReport,
    QAExample,
    VerificationExample,
    ablate,
    evaluate,
    load_qa_dataset,
    load_verification_dataset,
)
from .graph import (
    KnowledgeGraph,
    Triple,
    TypeGraph,
    build_type_graph,
    canonical_label,
    load_graph,
    relations_of_entity,
    relations_of_type,
    relations_within_n_hops,
    triples_matching,
)
from .parsing import (
    REFUTED,
    SUPPORTED,
    AnswerCandidate,
    RetrievedRelations,
    SubSentence,
    Verdict,
    parse_answer,
    parse_relations,
    parse_segmentation,
    parse_verdict,
)
from .pipeline import Conclusion, EvidenceGraph, Pipeline, Query, StageTrace, linearize
from .prompts import (
    QA_INFERENCE_TEMPLATE,
    RETRIEVAL_TEMPLATE,
    SEGMENTATION_TEMPLATE,
    VERIFICATION_INFERENCE_TEMPLATE,
    PromptTemplate,
    render_entity_set,
    render_prompt,
    render_relation_list,
    render_triple_list,
)

__version__ = "0.1.0"

__all__ = [
    "API_KEY_ENV",
    "AnswerCandidate",
    "Backend",
    "BackendConfig",
    "Conclusion",
    "EvalReport",
    "EvidenceGraph",
    "HttpBackend",
    "KGReasonError",
    "KnowledgeGraph",
    "Mention",
    "MockBackend",
    "Pipeline",
    "PipelineError",
    "PromptTemplate",
    "QAExample",
    "QA_INFERENCE_TEMPLATE",
    "Query",
    "REFUTED",
    "RETRIEVAL_TEMPLATE",
    "RelationCandidates",
    "RetrievedRelations",
    "SEGMENTATION_TEMPLATE",
    "SUPPORTED",
    "StageTrace",
    "SubSentence",
    "Triple",
    "TypeGraph",
    "VERIFICATION_INFERENCE_TEMPLATE",
    "Verdict",
    "VerificationExample",
    "ablate",
    "build_type_graph",
    "canonical_label",
    "evaluate",
    "extract_nhop_candidates",
    "extract_relation_candidates",
    "linearize",
    "load_graph",
    "load_qa_dataset",
    "load_verification_dataset",
    "make_backend",
    "parse_answer",
    "parse_relations",
    "parse_segmentation",
    "parse_verdict",
    "prompt_hash",
    "relations_of_entity",
    "relations_of_type",
    "relations_within_n_hops",
    "render_entity_set",
    "render_prompt",
    "render_relation_list",
    "render_triple_list",
    "resolve_mention",
    "triples_matching",
]
