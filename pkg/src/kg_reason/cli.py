"""Command-line interface.

Subcommands: ``verify`` (one claim), ``answer`` (one question), ``eval``
(batch run) and ``ablate`` (k/shots grid). Exit codes: 0 success, 1 usage
error, 2 data or load error (including unparseable responses), 3 backend
error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .backends import BackendConfig, make_backend
from .candidates import CONCRETE, VARIABLE, resolve_mention
from .errors import (
    BackendError,
    DatasetLoadError,
    GraphLoadError,
    KGReasonError,
    PipelineError,
    QueryError,
    UnknownEntityError,
)
from .evaluation import (
    ablate,
    evaluate,
    load_qa_dataset,
    load_verification_dataset,
    write_report,
)
from .graph import build_type_graph, load_graph
from .pipeline import Pipeline, Query, linearize

DEFAULT_K_VERIFICATION = 5
DEFAULT_K_QA = 3
DEFAULT_SHOTS = 12

_USAGE_EXIT = 1
_DATA_EXIT = 2
_BACKEND_EXIT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="kg-reason", description="Knowledge-graph reasoning pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--graph", required=True, help="tab-separated triple file")
        p.add_argument("--types", help="tab-separated entity/type file")
        p.add_argument(
            "--backend",
            required=True,
            help="base URL of a chat-completions server, or mock:<script-path>",
        )
        p.add_argument("--model", default="gpt-3.5-turbo")
        p.add_argument("--temperature", type=float, default=0.2)
        p.add_argument("--top-p", type=float, default=0.1)
        p.add_argument("--retries", type=int, default=2)
        p.add_argument("--timeout", type=float, default=30.0)
        p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
        p.add_argument("--k", type=int)
        p.add_argument("--trace", help="append per-query trace records to this file")

    verify = sub.add_parser("verify", help="verify one claim")
    add_common(verify)
    verify.add_argument("--claim", required=True)
    verify.add_argument("--entities", required=True, nargs="+")

    answer = sub.add_parser("answer", help="answer one question")
    add_common(answer)
    answer.add_argument("--question", required=True, help="question with the seed in [brackets]")
    answer.add_argument("--hops", required=True, type=int, choices=(1, 2, 3))

    for name in ("eval", "ablate"):
        p = sub.add_parser(name, help=f"{name} over a dataset")
        add_common(p)
        p.add_argument("--task", required=True, choices=("verification", "qa"))
        p.add_argument("--dataset", required=True)
        p.add_argument("--hops", type=int, choices=(1, 2, 3))
        p.add_argument("--width", type=int, default=1, help="worker pool width")
        p.add_argument("--report", help="write the machine-readable report here")
        if name == "ablate":
            p.add_argument("--k-values", required=True, help="comma-separated, e.g. 1,3,5")
            p.add_argument("--shot-values", required=True, help="comma-separated, e.g. 4,8,12")
    return parser


def _backend_config(args: argparse.Namespace) -> BackendConfig:
    return BackendConfig(
        endpoint=args.backend,
        model=args.model,
        temperature=args.temperature,
        top_p=args.top_p,
        max_retries=args.retries,
        timeout=args.timeout,
    )


def _default_k(args: argparse.Namespace, qa: bool) -> int:
    if args.k is not None:
        return args.k
    return DEFAULT_K_QA if qa else DEFAULT_K_VERIFICATION


def _dump_trace(trace, path: str | None, extra: dict) -> None:
    if path is None or trace is None:
        return
    record = dict(extra)
    record["trace"] = trace.to_record()
    with open(path, "a", encoding="utf-8") as out:
        out.write(json.dumps(record, ensure_ascii=False) + "\n")


def _cmd_verify(args: argparse.Namespace) -> int:
    g = load_graph(args.graph, args.types)
    tg = build_type_graph(g)
    backend = make_backend(_backend_config(args))
    mentions = tuple(resolve_mention(label, g, tg) for label in args.entities)
    for mention, label in zip(mentions, args.entities):
        if mention.kind == VARIABLE:
            raise UnknownEntityError(label)
    query = Query.claim(args.claim, mentions)
    pipeline = Pipeline(g, tg, backend, k=_default_k(args, qa=False), shots=args.shots)
    try:
        conclusion = pipeline.run(query)
    except PipelineError as exc:
        _dump_trace(exc.trace, args.trace, {"input": args.claim, "error": str(exc)})
        raise
    print(conclusion.result.label)
    print(f"Evidence: {linearize(conclusion.evidence)}")
    _dump_trace(
        conclusion.trace, args.trace, {"input": args.claim, "predicted": conclusion.result.label}
    )
    return 0


def _cmd_answer(args: argparse.Namespace) -> int:
    g = load_graph(args.graph, args.types)
    tg = build_type_graph(g)
    backend = make_backend(_backend_config(args))
    seeds = re.findall(r"\[([^\[\]]+)\]", args.question)
    if len(seeds) != 1:
        raise QueryError("the question must carry exactly one [bracketed] seed entity")
    text = args.question.replace(f"[{seeds[0]}]", seeds[0])
    seed = resolve_mention(seeds[0], g, tg)
    if seed.kind != CONCRETE:
        raise UnknownEntityError(seeds[0])
    query = Query.question(text, seed, args.hops)
    pipeline = Pipeline(g, tg, backend, k=_default_k(args, qa=True), shots=args.shots)
    try:
        conclusion = pipeline.run(query)
    except PipelineError as exc:
        _dump_trace(exc.trace, args.trace, {"input": args.question, "error": str(exc)})
        raise
    print(conclusion.result.entity)
    _dump_trace(
        conclusion.trace, args.trace, {"input": args.question, "predicted": conclusion.result.entity}
    )
    return 0


def _load_dataset(args: argparse.Namespace):
    if args.task == "qa":
        if args.hops is None:
            raise _UsageError("--hops is required for --task qa")
        return load_qa_dataset(args.dataset, args.hops)
    if args.hops is not None:
        raise _UsageError("--hops only applies to --task qa")
    return load_verification_dataset(args.dataset)


def _cmd_eval(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args)
    g = load_graph(args.graph, args.types)
    tg = build_type_graph(g)
    report = evaluate(
        dataset,
        g,
        tg,
        _backend_config(args),
        k=_default_k(args, qa=args.task == "qa"),
        shots=args.shots,
        width=args.width,
        trace_path=args.trace,
    )
    print(report.to_text())
    if args.report:
        write_report(report, args.report)
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args)
    g = load_graph(args.graph, args.types)
    tg = build_type_graph(g)
    try:
        k_values = [int(v) for v in args.k_values.split(",") if v]
        shot_values = [int(v) for v in args.shot_values.split(",") if v]
    except ValueError as exc:
        raise _UsageError(f"bad grid value: {exc}")
    reports = ablate(
        dataset,
        g,
        tg,
        _backend_config(args),
        k_values=k_values,
        shot_values=shot_values,
        width=args.width,
        trace_path=args.trace,
    )
    for report in reports:
        print(f"--- k={report.config['k']} shots={report.config['shots']}")
        print(report.to_text())
    if args.report:
        records = [r.to_record() for r in reports]
        with open(args.report, "w", encoding="utf-8") as out:
            json.dump(records, out, ensure_ascii=False, indent=2)
            out.write("\n")
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "answer": _cmd_answer,
    "eval": _cmd_eval,
    "ablate": _cmd_ablate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except (GraphLoadError, DatasetLoadError, UnknownEntityError, QueryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return _BACKEND_EXIT
    except PipelineError as exc:
        print(f"error[{exc.stage}]: {exc.cause}", file=sys.stderr)
        if isinstance(exc.cause, BackendError):
            return _BACKEND_EXIT
        return _DATA_EXIT
    except KGReasonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
