"""Evidence-grounded sentence revision with deterministic validation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import BackendUnavailable, NoAlignment, NoCandidateCorrection
from .extract import align_span
from .llm import LlmBackend, complete
from .model import EvidenceTriple, Triple, Verdict, VerdictLabel
from .normalize import contains_normalized, normalize_value
from .prompts import PromptTask, TaskSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RevisionCheckResult:
    """The three gates a rewrite must pass before it is surfaced."""

    drops_src: bool
    adds_dest: bool
    preserves_others: bool

    @property
    def passed(self) -> bool:
        return self.drops_src and self.adds_dest and self.preserves_others

    def to_dict(self) -> dict:
        return {
            "drops_src": self.drops_src,
            "adds_dest": self.adds_dest,
            "preserves_others": self.preserves_others,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RevisionCheckResult":
        return cls(d["drops_src"], d["adds_dest"], d["preserves_others"])


@dataclass(frozen=True)
class RevisionProposal:
    original: str
    revised: str
    src: Triple
    dest: EvidenceTriple
    checks: RevisionCheckResult

    def to_dict(self) -> dict:
        return {
            "original": self.original,
            "revised": self.revised,
            "src": self.src.to_dict(),
            "dest": self.dest.to_dict(),
            "checks": self.checks.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RevisionProposal":
        return cls(
            d["original"], d["revised"],
            Triple.from_dict(d["src"]),
            EvidenceTriple.from_dict(d["dest"]),
            RevisionCheckResult.from_dict(d["checks"]),
        )


@dataclass
class RevisionResult:
    """Validated proposals for one sentence, plus what could not be revised."""

    sentence: str
    proposals: list[RevisionProposal] = field(default_factory=list)
    no_candidate: list[Triple] = field(default_factory=list)
    failed: list[tuple[Triple, str]] = field(default_factory=list)
    rejected: int = 0


def _aligned_surface(sentence: str, t: Triple) -> str:
    try:
        span = align_span(sentence, t)
        return sentence[span.start:span.end]
    except NoAlignment:
        return t.object


def _replaced_at_span(s: str, s_prime: str, src: Triple, dest_object: str) -> bool:
    try:
        span = align_span(s, src)
    except NoAlignment:
        return False
    prefix, suffix = s[:span.start], s[span.end:]
    if not (s_prime.startswith(prefix) and s_prime.endswith(suffix)):
        return False
    middle = s_prime[len(prefix):len(s_prime) - len(suffix)]
    return bool(middle) and contains_normalized(middle, dest_object)


def check_revision(s: str, s_prime: str, src: Triple, dest: EvidenceTriple,
                   others: list[Triple] | tuple[Triple, ...]) -> RevisionCheckResult:
    """Deterministic surface checks over a proposed rewrite.

    drops_src: the source object no longer occurs (or the destination
    object replaced it exactly at the source's aligned span).
    adds_dest: the destination object occurs.
    preserves_others: every other triple's aligned object text survives.
    """
    drops_src = (not contains_normalized(s_prime, src.object)
                 or _replaced_at_span(s, s_prime, src, dest.object))
    adds_dest = contains_normalized(s_prime, dest.object)
    preserves_others = all(
        contains_normalized(s_prime, _aligned_surface(s, t)) for t in others
    )
    return RevisionCheckResult(drops_src, adds_dest, preserves_others)


def _candidates(verdict: Verdict) -> list[EvidenceTriple]:
    """Distinct corrected-object candidates from the verdict's evidence,
    KG-derived first (evidence is already stored KG before web)."""
    seen = {normalize_value(verdict.triple.object)}
    out = []
    for item in verdict.evidence:
        key = normalize_value(item.evidence.object)
        if key in seen:
            continue
        seen.add(key)
        out.append(item.evidence)
    return out


def propose_revisions(s: str, verdicts: list[Verdict] | tuple[Verdict, ...],
                      backend: LlmBackend,
                      tasks: dict[PromptTask, TaskSpec] | None = None) -> RevisionResult:
    """Propose validated rewrites for each questionable triple in a sentence.

    One gateway call per (questionable triple, distinct candidate value);
    only rewrites passing all three checks are surfaced. Gateway failures
    are recorded per proposal without aborting siblings. Raises
    NoCandidateCorrection when questionable triples exist but none has
    any retrieved value to revise towards.
    """
    result = RevisionResult(s)
    questionable = [v for v in verdicts if v.label is VerdictLabel.QUESTIONABLE]
    all_triples = [v.triple for v in verdicts]
    with_values = 0
    for verdict in questionable:
        if not verdict.evidence:
            result.no_candidate.append(verdict.triple)
            continue
        with_values += 1
        # identity values dedup away: nothing to fix is zero proposals
        candidates = _candidates(verdict)
        others = [t for t in all_triples if t != verdict.triple]
        for dest in candidates:
            payload = (f"SENTENCE: {s}\n"
                       f"REPLACE: {verdict.triple.surface()}\n"
                       f"WITH: {dest.surface()}")
            try:
                raw = complete(PromptTask.REVISION, payload, backend, tasks)
            except BackendUnavailable as exc:
                result.failed.append((verdict.triple, str(exc)))
                continue
            lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
            if not lines:
                result.failed.append((verdict.triple, "empty revision output"))
                continue
            revised = lines[0]
            checks = check_revision(s, revised, verdict.triple, dest, others)
            if checks.passed and revised != s:
                result.proposals.append(
                    RevisionProposal(s, revised, verdict.triple, dest, checks)
                )
            else:
                result.rejected += 1
                logger.info("rejected revision %r (checks: %s)", revised, checks)
    if questionable and not with_values:
        raise NoCandidateCorrection(
            "no questionable triple in this sentence has a retrieved correction value"
        )
    return result


def revision_result_to_dict(result: RevisionResult) -> dict:
    return {
        "text": result.sentence,
        "revisions": [p.to_dict() for p in result.proposals],
        "no_candidate": [t.to_dict() for t in result.no_candidate],
        "failed": [{"triple": t.to_dict(), "error": e} for t, e in result.failed],
        "rejected": result.rejected,
    }
