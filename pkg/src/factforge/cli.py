"""Command-line interface: verify, revise, perturb, eval, serve, demo."""

from __future__ import annotations

import argparse
import json
import sys
import time

from .bench import MatchConfig, load_gold_file, load_links_file, perturb, score
from .demo import run_demo
from .errors import (
    BackendUnavailable,
    BudgetExceeded,
    FactForgeError,
    FixtureMiss,
    NoCandidateCorrection,
)
from .model import VerdictLabel, VerificationReport, canonical_json, canonical_json_line
from .pipeline import PipelineConfig, build_components, verify_passage
from .retrieve import KgSnapshot
from .revise import propose_revisions, revision_result_to_dict

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BACKEND = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the CLI contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, payload: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(payload)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        from .demo import demo_config
        return demo_config()
    return PipelineConfig.from_file(path)


def _cmd_verify(args) -> int:
    config = _load_config(args.config)
    if args.top_k:
        config = config.apply_overrides({"top_k": args.top_k})
    if args.strict_step1:
        config = config.apply_overrides({"strict_step1": True})
    text = _read_text(args.input)
    if not text.strip():
        print("error: input text is empty", file=sys.stderr)
        return EXIT_INPUT
    deadline = time.monotonic() + args.budget if args.budget else None
    report = verify_passage(text, config, deadline=deadline)
    _write(args.out, canonical_json(report.to_dict()))
    return EXIT_OK


def _cmd_revise(args) -> int:
    config = _load_config(args.config)
    with open(args.report, encoding="utf-8") as fh:
        report = VerificationReport.from_dict(json.load(fh))
    components = build_components(config)
    sentences = []
    for sentence in report.sentences:
        if not any(v.label is VerdictLabel.QUESTIONABLE for v in sentence.verdicts):
            continue
        try:
            result = propose_revisions(sentence.text, sentence.verdicts,
                                       components.backend, components.tasks)
            sentences.append(revision_result_to_dict(result))
        except NoCandidateCorrection as exc:
            sentences.append({"text": sentence.text, "revisions": [],
                              "no_candidate": [], "failed": [], "rejected": 0,
                              "note": str(exc)})
    _write(args.out, canonical_json({"sentences": sentences}))
    return EXIT_OK


def _cmd_perturb(args) -> int:
    snapshot = KgSnapshot.load(args.kg, args.aliases)
    records = load_links_file(args.links)
    lines = []
    skipped = 0
    for index, (text, links) in enumerate(records):
        try:
            instance = perturb(text, links, snapshot, f"{args.seed}:{index}",
                               source_id=f"instance-{index}")
        except FactForgeError:
            skipped += 1
            continue
        lines.append(canonical_json_line(instance.to_dict()))
    _write(args.out, "".join(line + "\n" for line in lines))
    if skipped:
        print(f"skipped {skipped} sentence(s) with no eligible link", file=sys.stderr)
    return EXIT_OK


def _load_reports(path: str) -> list[VerificationReport]:
    with open(path, encoding="utf-8") as fh:
        content = fh.read()
    stripped = content.lstrip()
    if stripped.startswith("["):
        return [VerificationReport.from_dict(d) for d in json.loads(content)]
    if stripped.startswith("{") and "\n{" not in content.strip():
        return [VerificationReport.from_dict(json.loads(content))]
    return [VerificationReport.from_dict(json.loads(line))
            for line in content.splitlines() if line.strip()]


def _cmd_eval(args) -> int:
    reports = _load_reports(args.system)
    gold = load_gold_file(args.gold)
    config = MatchConfig(span_mode=args.span_match)
    result = score(reports, gold, config)
    print(result.format_table())
    if args.out:
        _write(args.out, canonical_json(result.to_dict()))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    config = _load_config(args.config)
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return EXIT_OK


def _cmd_demo(args) -> int:
    result = run_demo(args.out)
    print(f"ask: {result.ask_answer}")
    for report in (result.states_report, result.age_report):
        for sentence in report.sentences:
            print(f"sentence: {sentence.text}")
            for v in sentence.verdicts:
                surface = sentence.text[v.span.start:v.span.end]
                print(f"  [{v.label.value}] {surface!r} "
                      f"({len(v.evidence)} evidence item(s))")
    for proposal in result.age_revisions.proposals:
        print(f"revision: {proposal.original!r} -> {proposal.revised!r}")
    if args.out:
        print(f"wrote reports to {args.out}/")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="factforge",
                     description="Fact verification, revision, and benchmark tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify a text file and write a report")
    p.add_argument("--input", required=True, help="text file, or - for stdin")
    p.add_argument("--config", help="pipeline config JSON (default: bundled demo)")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--top-k", type=int, dest="top_k")
    p.add_argument("--strict-step1", action="store_true", dest="strict_step1")
    p.add_argument("--budget", type=float, help="wall-clock budget in seconds")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("revise", help="propose revisions for a report")
    p.add_argument("--report", required=True)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_revise)

    p = sub.add_parser("perturb", help="build perturbed gold data from links")
    p.add_argument("--links", required=True, help="JSONL of {text, links}")
    p.add_argument("--kg", required=True, help="KG snapshot TSV")
    p.add_argument("--aliases", help="predicate alias TSV")
    p.add_argument("--seed", type=int, required=True,
                   help="instance i uses rng seed '<seed>:<i>'")
    p.add_argument("--out", help="gold JSONL path (default: stdout)")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("eval", help="score reports against gold annotations")
    p.add_argument("--system", required=True, help="report JSON, JSON array, or JSONL")
    p.add_argument("--gold", required=True, help="gold JSONL")
    p.add_argument("--span-match", choices=["exact", "jaccard"], default="exact")
    p.add_argument("--out", help="also write the eval report JSON here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("demo", help="run the bundled fixture demo end to end")
    p.add_argument("--out", help="directory for the demo reports")
    p.set_defaults(func=_cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (BackendUnavailable, FixtureMiss, BudgetExceeded) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (FactForgeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
