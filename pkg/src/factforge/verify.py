"""Evidence classification and the two-step verdict decision."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import BackendUnavailable, EmptyAnswer, MalformedJudgeOutput
from .llm import LlmBackend, complete
from .model import (
    CharSpan,
    Classification,
    ClassifiedEvidence,
    DiagnosticsTally,
    EvidenceOrigin,
    EvidenceTriple,
    JudgeKind,
    KgAnswerSet,
    Triple,
    Verdict,
    VerdictLabel,
    WebHit,
)
from .normalize import normalize_value
from .prompts import PromptTask, TaskSpec

logger = logging.getLogger(__name__)

Judge = Callable[[Triple, EvidenceTriple], ClassifiedEvidence]


@dataclass(frozen=True)
class JudgeConfig:
    """mode: "deterministic_first" (default) or "llm_only";
    strict_step1 keeps a contradicted singleton KG answer Questionable."""

    mode: str = "deterministic_first"
    strict_step1: bool = False


def build_evidence_triple(claim: Triple, answer: str, origin: EvidenceOrigin,
                          hit: WebHit | None = None) -> EvidenceTriple:
    """The claim triple with its object replaced by a retrieved answer."""
    if not answer.strip():
        raise EmptyAnswer("retrieved answer is empty")
    return EvidenceTriple(
        claim.subject, claim.predicate, answer.strip(),
        claim.predicate_id, claim.predicate_attr,
        origin=origin,
        web_hit=hit if origin is EvidenceOrigin.WEB else None,
    )


def deterministic_classification(claim_object: str, evidence_object: str) -> Classification | None:
    """Value-aware equality judge; None when it cannot decide.

    Equal normalized values support; same-kind numbers or dates that
    differ refute. Mixed kinds (a number against a date, or either
    against text) fall through to the LLM judge.
    """
    a = normalize_value(claim_object)
    b = normalize_value(evidence_object)
    if a == b:
        return Classification.SUPPORTING
    if a.kind == b.kind and a.kind in ("number", "date"):
        return Classification.NOT_SUPPORTING
    return None


def entail(claim: Triple, evidence: EvidenceTriple, backend: LlmBackend,
           config: JudgeConfig = JudgeConfig(),
           tasks: dict[PromptTask, TaskSpec] | None = None) -> ClassifiedEvidence:
    """Classify one evidence triple as supporting or not supporting.

    Deterministic value comparison first (unless configured llm_only);
    anything undecided goes to the single-token LLM judge.
    """
    if config.mode != "llm_only":
        verdict = deterministic_classification(claim.object, evidence.object)
        if verdict is not None:
            return ClassifiedEvidence(evidence, verdict, JudgeKind.DETERMINISTIC)
    payload = f"CLAIM: {claim.surface()}\nEVIDENCE: {evidence.surface()}"
    raw = complete(PromptTask.TRIPLE_ENTAILMENT, payload, backend, tasks)
    token = raw.strip().lower().rstrip(".")
    if token == "supporting":
        cls = Classification.SUPPORTING
    elif token == "not supporting":
        cls = Classification.NOT_SUPPORTING
    else:
        raise MalformedJudgeOutput(f"judge emitted neither token: {raw!r}")
    return ClassifiedEvidence(evidence, cls, JudgeKind.LLM)


def make_judge(backend: LlmBackend, config: JudgeConfig = JudgeConfig(),
               tasks: dict[PromptTask, TaskSpec] | None = None) -> Judge:
    def judge(claim: Triple, evidence: EvidenceTriple) -> ClassifiedEvidence:
        return entail(claim, evidence, backend, config, tasks)
    return judge


def _supporting(items: Sequence[ClassifiedEvidence]) -> bool:
    return any(e.classification is Classification.SUPPORTING for e in items)


def decide(claim: Triple, kg: KgAnswerSet, web: Sequence[WebHit], judge: Judge,
           span: CharSpan, question: str, strict_step1: bool = False,
           tally: DiagnosticsTally | None = None) -> Verdict:
    """Fold retrieved evidence into a single verdict for one triple.

    A singleton KG answer that supports yields StronglySupported on its
    own. Otherwise every KG answer and web short answer is classified,
    and one supporting item yields LikelySupported, else Questionable.
    A contradicted singleton KG answer is still pooled with web evidence
    (capped at LikelySupported) unless strict_step1 is set, in which case
    it is Questionable immediately. Judge failures are recorded in the
    tally and never count as support.
    """
    failures = 0

    def classify(evidence: EvidenceTriple) -> ClassifiedEvidence | None:
        nonlocal failures
        try:
            return judge(claim, evidence)
        except (BackendUnavailable, MalformedJudgeOutput) as exc:
            failures += 1
            logger.warning("judge failed for %s: %s", evidence.surface(), exc)
            return None

    def finish(label: VerdictLabel, evidence: list[ClassifiedEvidence]) -> Verdict:
        if tally is not None:
            tally.judge_failures += failures
        return Verdict(claim, label, span, tuple(evidence), question)

    kg_evidence = [build_evidence_triple(claim, a, EvidenceOrigin.KG)
                   for a in kg.answers if a.strip()]
    web_evidence = [build_evidence_triple(claim, h.short_answer, EvidenceOrigin.WEB, h)
                    for h in web if h.short_answer.strip()]

    if len(kg_evidence) == 1:
        first = classify(kg_evidence[0])
        if first is not None and first.classification is Classification.SUPPORTING:
            return finish(VerdictLabel.STRONGLY_SUPPORTED, [first])
        contradicted = [first] if first is not None else []
        if strict_step1:
            return finish(VerdictLabel.QUESTIONABLE, contradicted)
        pooled = contradicted + [c for e in web_evidence if (c := classify(e))]
        label = (VerdictLabel.LIKELY_SUPPORTED if _supporting(pooled)
                 else VerdictLabel.QUESTIONABLE)
        return finish(label, pooled)

    pooled = [c for e in kg_evidence + web_evidence if (c := classify(e))]
    label = (VerdictLabel.LIKELY_SUPPORTED if _supporting(pooled)
             else VerdictLabel.QUESTIONABLE)
    return finish(label, pooled)
