"""Pipeline configuration and the split/extract/ask/retrieve/decide run."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import (
    AnswerLeak,
    BudgetExceeded,
    InconsistentGroup,
    MalformedQGenOutput,
    NoAlignment,
    UnparseableOutput,
    ValidationError,
)
from .extract import (
    Sentence,
    align_span,
    extract_facts,
    find_occurrences,
    group_extended,
    split_sentences,
)
from .llm import ENV_MODEL, ENV_TOKEN, ENV_URL, HttpBackend, LlmBackend, MockBackend
from .model import (
    CharSpan,
    DiagnosticsTally,
    SentenceResult,
    Triple,
    Verdict,
    VerificationReport,
    validate_report,
)
from .prompts import PromptTask, TaskSpec, default_tasks
from .questions import generate_question
from .retrieve import (
    FixtureWebAdapter,
    HttpKgAdapter,
    HttpWebAdapter,
    KgAdapter,
    KgSnapshot,
    SnapshotKgAdapter,
    WebAdapter,
    query_kg,
    query_web,
)
from .verify import JudgeConfig, decide, make_judge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LlmConfig:
    kind: str = "mock"  # "mock" | "http"
    fixtures_path: str | None = None
    url: str | None = None
    model: str = "default"
    token_env: str = ENV_TOKEN
    timeout_s: float = 30.0
    max_retries: int = 3
    max_tokens: int = 512
    response_path: str = "text"


@dataclass(frozen=True)
class KgConfig:
    kind: str = "snapshot"  # "snapshot" | "http"
    snapshot_path: str | None = None
    aliases_path: str | None = None
    url: str | None = None
    timeout_s: float = 10.0
    answers_path: str = "answers"


@dataclass(frozen=True)
class WebConfig:
    kind: str = "fixture"  # "fixture" | "http"
    fixtures_path: str | None = None
    url: str | None = None
    timeout_s: float = 10.0
    results_path: str = "results"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a verification run depends on; its digest stamps reports."""

    llm: LlmConfig = field(default_factory=LlmConfig)
    kg: KgConfig = field(default_factory=KgConfig)
    web: WebConfig = field(default_factory=WebConfig)
    top_k: int = 5
    judge_mode: str = "deterministic_first"
    strict_step1: bool = False
    cqgen_type_scaffold: bool = True
    qgen_shots: int = 2
    parallelism: int = 4
    budget_s: float = 120.0
    cors_origins: tuple[str, ...] = ()

    def __post_init__(self):
        if self.top_k < 1:
            raise ValidationError("top_k must be >= 1")
        if self.parallelism < 1:
            raise ValidationError("parallelism must be >= 1")
        if self.judge_mode not in ("deterministic_first", "llm_only"):
            raise ValidationError(f"unknown judge_mode {self.judge_mode!r}")
        if self.llm.kind not in ("mock", "http"):
            raise ValidationError(f"unknown llm kind {self.llm.kind!r}")
        if self.kg.kind not in ("snapshot", "http"):
            raise ValidationError(f"unknown kg kind {self.kg.kind!r}")
        if self.web.kind not in ("fixture", "http"):
            raise ValidationError(f"unknown web kind {self.web.kind!r}")

    def to_dict(self) -> dict:
        return {
            "llm": vars(self.llm) | {},
            "kg": vars(self.kg) | {},
            "web": vars(self.web) | {},
            "top_k": self.top_k,
            "judge_mode": self.judge_mode,
            "strict_step1": self.strict_step1,
            "cqgen_type_scaffold": self.cqgen_type_scaffold,
            "qgen_shots": self.qgen_shots,
            "parallelism": self.parallelism,
            "budget_s": self.budget_s,
            "cors_origins": list(self.cors_origins),
        }

    def digest(self) -> str:
        """Content hash of the configuration (never includes credentials)."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: str = ".") -> "PipelineConfig":
        def resolve(section: Mapping, key: str) -> Mapping:
            section = dict(section)
            path = section.get(key)
            if path and not os.path.isabs(path):
                section[key] = os.path.join(base_dir, path)
            return section

        llm = dict(resolve(d.get("llm", {}), "fixtures_path"))
        if os.environ.get(ENV_URL):
            llm["url"] = os.environ[ENV_URL]
            llm["kind"] = "http"
        if os.environ.get(ENV_MODEL):
            llm["model"] = os.environ[ENV_MODEL]
        kg = resolve(resolve(d.get("kg", {}), "snapshot_path"), "aliases_path")
        web = resolve(d.get("web", {}), "fixtures_path")
        known = {f.name for f in PipelineConfig.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        rest = {k: v for k, v in d.items() if k in known - {"llm", "kg", "web"}}
        if "cors_origins" in rest:
            rest["cors_origins"] = tuple(rest["cors_origins"])
        try:
            return cls(llm=LlmConfig(**llm), kg=KgConfig(**kg), web=WebConfig(**web), **rest)
        except TypeError as exc:
            raise ValidationError(f"bad config: {exc}") from None

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        return cls.from_dict(d, base_dir=os.path.dirname(os.path.abspath(path)))

    def apply_overrides(self, overrides: Mapping) -> "PipelineConfig":
        """A safe subset of fields a service client may change per request."""
        allowed = {"top_k", "judge_mode", "strict_step1", "cqgen_type_scaffold",
                   "parallelism", "budget_s"}
        unknown = set(overrides) - allowed
        if unknown:
            raise ValidationError(f"overrides not permitted: {sorted(unknown)}")
        return replace(self, **dict(overrides))


@dataclass
class PipelineComponents:
    backend: LlmBackend
    kg: KgAdapter
    web: WebAdapter
    tasks: dict[PromptTask, TaskSpec]


def build_components(config: PipelineConfig) -> PipelineComponents:
    if config.llm.kind == "mock":
        if not config.llm.fixtures_path:
            raise ValidationError("mock llm requires fixtures_path")
        backend: LlmBackend = MockBackend.from_file(config.llm.fixtures_path)
    else:
        if not config.llm.url:
            raise ValidationError("http llm requires url")
        backend = HttpBackend(
            url=config.llm.url, model=config.llm.model, token_env=config.llm.token_env,
            timeout_s=config.llm.timeout_s, max_retries=config.llm.max_retries,
            max_tokens=config.llm.max_tokens, response_path=config.llm.response_path,
        )
    if config.kg.kind == "snapshot":
        if not config.kg.snapshot_path:
            raise ValidationError("snapshot kg requires snapshot_path")
        kg: KgAdapter = SnapshotKgAdapter(
            KgSnapshot.load(config.kg.snapshot_path, config.kg.aliases_path)
        )
    else:
        if not config.kg.url:
            raise ValidationError("http kg requires url")
        kg = HttpKgAdapter(url=config.kg.url, timeout_s=config.kg.timeout_s,
                           answers_path=config.kg.answers_path)
    if config.web.kind == "fixture":
        web: WebAdapter = (FixtureWebAdapter.from_file(config.web.fixtures_path)
                           if config.web.fixtures_path else FixtureWebAdapter({}))
    else:
        if not config.web.url:
            raise ValidationError("http web requires url")
        web = HttpWebAdapter(url=config.web.url, timeout_s=config.web.timeout_s,
                             results_path=config.web.results_path)
    return PipelineComponents(backend, kg, web, default_tasks(config.qgen_shots))


def _collision_free_span(sentence: str, triple: Triple, span: CharSpan,
                         taken: list[CharSpan]) -> CharSpan | None:
    """Shift to a later occurrence of the aligned surface when spans collide."""
    if not any(span.overlap(t) for t in taken):
        return span
    surface = sentence[span.start:span.end]
    for candidate in find_occurrences(sentence, surface):
        if not any(candidate.overlap(t) for t in taken):
            return candidate
    return None


def _verify_sentence(index: int, sentence: Sentence, config: PipelineConfig,
                     components: PipelineComponents) -> tuple[SentenceResult, DiagnosticsTally]:
    tally = DiagnosticsTally()
    judge = make_judge(components.backend,
                       JudgeConfig(config.judge_mode, config.strict_step1),
                       components.tasks)
    try:
        facts = extract_facts(sentence.text, components.backend, components.tasks,
                              index, tally)
    except UnparseableOutput:
        # A sentence no extractor line fits stays unhighlighted.
        tally.dropped_malformed += 1
        return SentenceResult(sentence.text, ()), tally

    units: list[tuple[Triple, tuple[Triple, ...]]] = [(t, ()) for t in facts.flat]
    by_pid: dict[str, list[Triple]] = {}
    for t in facts.extended:
        by_pid.setdefault(t.predicate_id, []).append(t)
    for members in by_pid.values():
        try:
            group = group_extended(members)[0]
        except InconsistentGroup:
            tally.inconsistent_groups += 1
            continue
        units.extend((m, group.context_for(m)) for m in group.members)

    verdicts: list[Verdict] = []
    taken: list[CharSpan] = []
    for triple, context in units:
        try:
            question = generate_question(triple, context, components.backend,
                                         components.tasks,
                                         config.cqgen_type_scaffold)
        except (MalformedQGenOutput, AnswerLeak):
            tally.qgen_failures += 1
            continue
        try:
            span = align_span(sentence.text, triple)
        except NoAlignment:
            tally.dropped_hallucinated += 1
            continue
        span = _collision_free_span(sentence.text, triple, span, taken)
        if span is None:
            tally.dropped_overlapping += 1
            continue
        kg_answers = query_kg(question, components.kg)
        web_hits = query_web(question, config.top_k, components.web)
        verdict = decide(triple, kg_answers, web_hits, judge, span,
                         question.question, config.strict_step1, tally)
        verdicts.append(verdict)
        taken.append(span)
    verdicts.sort(key=lambda v: v.span.start)
    return SentenceResult(sentence.text, tuple(verdicts)), tally


def verify_passage(text: str, config: PipelineConfig,
                   components: PipelineComponents | None = None,
                   deadline: float | None = None) -> VerificationReport:
    """Run the full verification pipeline over one passage.

    Sentences are verified independently (fan-out bounded by the
    configured parallelism) and merged in order, so identical inputs,
    config, and fixtures yield byte-identical reports. With a deadline,
    sentences finished in time form a report marked incomplete;
    BudgetExceeded is raised when not even the first sentence finished.
    """
    passage = split_sentences(text)
    if components is None:
        components = build_components(config)
    tally = DiagnosticsTally()
    results: list[SentenceResult] = []
    incomplete = False
    pool = ThreadPoolExecutor(max_workers=config.parallelism)
    try:
        futures = [pool.submit(_verify_sentence, i, s, config, components)
                   for i, s in enumerate(passage.sentences)]
        for future in futures:
            remaining = None if deadline is None else deadline - time.monotonic()
            if remaining is not None and remaining <= 0:
                incomplete = True
                break
            try:
                result, sentence_tally = future.result(timeout=remaining)
            except (TimeoutError, FutureTimeoutError):
                incomplete = True
                break
            results.append(result)
            tally.merge(sentence_tally)
    finally:
        pool.shutdown(wait=not incomplete, cancel_futures=True)
    if incomplete and not results:
        raise BudgetExceeded("wall-clock budget ran out before any sentence finished")
    report = VerificationReport(
        passage=text,
        sentences=tuple(results),
        provenance=config.digest(),
        diagnostics=tally,
        incomplete=incomplete,
    )
    validate_report(report)
    return report
