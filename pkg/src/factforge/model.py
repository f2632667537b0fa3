"""Shared domain types, canonical forms, and JSON serialization.

Every type here is an immutable value safe to share between pipeline
workers. The JSON emitted by ``to_dict``/``canonical_json`` is both the
service wire format and the report file format.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field, fields

from .errors import ValidationError

_WS_RE = re.compile(r"\s+")


def _canon_field(s: str) -> str:
    return _WS_RE.sub(" ", s).strip().lower()


@dataclass(frozen=True)
class Triple:
    """A flat (S; P; O) or extended (S; P; Pid; attr; O) fact unit."""

    subject: str
    predicate: str
    object: str
    predicate_id: str | None = None
    predicate_attr: str | None = None

    def __post_init__(self):
        for name in ("subject", "predicate", "object"):
            value = getattr(self, name)
            trimmed = value.strip()
            if not trimmed:
                raise ValidationError(f"triple field '{name}' is empty")
            object.__setattr__(self, name, trimmed)
        if (self.predicate_id is None) != (self.predicate_attr is None):
            raise ValidationError(
                "predicate_id and predicate_attr must be both present or both absent"
            )
        for name in ("predicate_id", "predicate_attr"):
            value = getattr(self, name)
            if value is not None:
                trimmed = value.strip()
                if not trimmed:
                    raise ValidationError(f"triple field '{name}' is empty")
                object.__setattr__(self, name, trimmed)

    @classmethod
    def extended(cls, subject: str, predicate: str, predicate_id: str,
                 predicate_attr: str, obj: str) -> "Triple":
        return cls(subject, predicate, obj, predicate_id, predicate_attr)

    @property
    def is_extended(self) -> bool:
        return self.predicate_id is not None

    def parts(self) -> tuple[str, ...]:
        """Fields in wire order: (S, P, O) or (S, P, Pid, attr, O)."""
        if self.is_extended:
            return (self.subject, self.predicate, self.predicate_id,
                    self.predicate_attr, self.object)
        return (self.subject, self.predicate, self.object)

    def surface(self) -> str:
        """Original-case parenthesised rendering, e.g. for prompts."""
        return "(" + "; ".join(self.parts()) + ")"

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "predicate": self.predicate,
            "predicate_id": self.predicate_id,
            "predicate_attr": self.predicate_attr,
            "object": self.object,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Triple":
        return cls(d["subject"], d["predicate"], d["object"],
                   d.get("predicate_id"), d.get("predicate_attr"))


def canonicalize(t: Triple) -> str:
    """Deterministic lowercase, single-space, semicolon-joined rendering.

    Triples equal up to case and whitespace produce equal text.
    """
    return "; ".join(_canon_field(p) for p in t.parts())


def parse_triple(line: str) -> Triple:
    """Parse one "(S; P; O)" or "(S; P; Pid; attr; O)" line.

    Surrounding parentheses are optional. Raises ValidationError for any
    other arity or an empty field.
    """
    s = line.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts = [p.strip() for p in s.split(";")]
    if len(parts) == 3:
        return Triple(parts[0], parts[1], parts[2])
    if len(parts) == 5:
        return Triple(parts[0], parts[1], parts[4], parts[2], parts[3])
    raise ValidationError(
        f"expected 3 or 5 semicolon-separated fields, got {len(parts)}: {line!r}"
    )


@dataclass(frozen=True)
class FactSet:
    """All triples extracted from one sentence, flat and extended."""

    sentence_index: int
    flat: tuple[Triple, ...]
    extended: tuple[Triple, ...]

    def __post_init__(self):
        for t in self.flat:
            if t.is_extended:
                raise ValidationError("flat list contains an extended triple")
        for t in self.extended:
            if not t.is_extended:
                raise ValidationError("extended list contains a flat triple")
        seen = set()
        for t in self.flat + self.extended:
            c = canonicalize(t)
            if c in seen:
                raise ValidationError(f"duplicate triple under canonical form: {c!r}")
            seen.add(c)

    def all_triples(self) -> tuple[Triple, ...]:
        return self.flat + self.extended

    def to_dict(self) -> dict:
        return {
            "sentence_index": self.sentence_index,
            "flat": [t.to_dict() for t in self.flat],
            "extended": [t.to_dict() for t in self.extended],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FactSet":
        return cls(
            d["sentence_index"],
            tuple(Triple.from_dict(t) for t in d["flat"]),
            tuple(Triple.from_dict(t) for t in d["extended"]),
        )


class VerdictLabel(enum.Enum):
    STRONGLY_SUPPORTED = "StronglySupported"
    LIKELY_SUPPORTED = "LikelySupported"
    QUESTIONABLE = "Questionable"

    @property
    def rank(self) -> int:
        """Total order for UI color mapping: SS > LS > Q."""
        return {"StronglySupported": 2, "LikelySupported": 1, "Questionable": 0}[self.value]


@dataclass(frozen=True)
class CharSpan:
    """Half-open character range in Unicode scalar values."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValidationError(f"invalid span [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlap(self, other: "CharSpan") -> int:
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end}

    @classmethod
    def from_dict(cls, d: dict) -> "CharSpan":
        return cls(d["start"], d["end"])


@dataclass(frozen=True)
class WebHit:
    """One web-search result: a passage with its highlighted short answer."""

    passage: str
    short_answer: str
    source_link: str

    def __post_init__(self):
        if not self.source_link:
            raise ValidationError("web hit has an empty source_link")
        if self.short_answer.lower() not in self.passage.lower():
            raise ValidationError(
                f"short answer {self.short_answer!r} is not a substring of its passage"
            )

    def to_dict(self) -> dict:
        return {
            "passage": self.passage,
            "short_answer": self.short_answer,
            "source_link": self.source_link,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WebHit":
        return cls(d["passage"], d["short_answer"], d["source_link"])


@dataclass(frozen=True)
class KgAnswerSet:
    """Short answers for one question from the knowledge-graph adapter."""

    answers: tuple[str, ...]
    source: str

    def to_dict(self) -> dict:
        return {"answers": list(self.answers), "source": self.source}


class EvidenceOrigin(enum.Enum):
    KG = "KG"
    WEB = "Web"


@dataclass(frozen=True)
class EvidenceTriple(Triple):
    """The claim triple with its object replaced by a retrieved answer."""

    origin: EvidenceOrigin = field(kw_only=True)
    web_hit: WebHit | None = field(kw_only=True, default=None)

    def __post_init__(self):
        super().__post_init__()
        if (self.origin is EvidenceOrigin.WEB) != (self.web_hit is not None):
            raise ValidationError("web_hit must be present exactly for Web-origin evidence")

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["origin"] = self.origin.value
        d["web_hit"] = self.web_hit.to_dict() if self.web_hit else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvidenceTriple":
        return cls(
            d["subject"], d["predicate"], d["object"],
            d.get("predicate_id"), d.get("predicate_attr"),
            origin=EvidenceOrigin(d["origin"]),
            web_hit=WebHit.from_dict(d["web_hit"]) if d.get("web_hit") else None,
        )


class Classification(enum.Enum):
    SUPPORTING = "Supporting"
    NOT_SUPPORTING = "NotSupporting"


class JudgeKind(enum.Enum):
    DETERMINISTIC = "Deterministic"
    LLM = "Llm"


@dataclass(frozen=True)
class ClassifiedEvidence:
    """An evidence triple with its supporting/not-supporting call."""

    evidence: EvidenceTriple
    classification: Classification
    judge: JudgeKind

    def to_dict(self) -> dict:
        return {
            "evidence": self.evidence.to_dict(),
            "classification": self.classification.value,
            "judge": self.judge.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifiedEvidence":
        return cls(
            EvidenceTriple.from_dict(d["evidence"]),
            Classification(d["classification"]),
            JudgeKind(d["judge"]),
        )


@dataclass(frozen=True)
class Verdict:
    """A label for one triple, anchored to a sentence span with its evidence."""

    triple: Triple
    label: VerdictLabel
    span: CharSpan
    evidence: tuple[ClassifiedEvidence, ...]
    question: str

    def to_dict(self) -> dict:
        return {
            "triple": self.triple.to_dict(),
            "label": self.label.value,
            "span": self.span.to_dict(),
            "evidence": [e.to_dict() for e in self.evidence],
            "question": self.question,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(
            Triple.from_dict(d["triple"]),
            VerdictLabel(d["label"]),
            CharSpan.from_dict(d["span"]),
            tuple(ClassifiedEvidence.from_dict(e) for e in d["evidence"]),
            d["question"],
        )


@dataclass(frozen=True)
class SentenceResult:
    text: str
    verdicts: tuple[Verdict, ...]

    def to_dict(self) -> dict:
        return {"text": self.text, "verdicts": [v.to_dict() for v in self.verdicts]}

    @classmethod
    def from_dict(cls, d: dict) -> "SentenceResult":
        return cls(d["text"], tuple(Verdict.from_dict(v) for v in d["verdicts"]))


@dataclass
class DiagnosticsTally:
    """Mutable per-run counters; serialized into the report."""

    dropped_malformed: int = 0
    dropped_hallucinated: int = 0
    inconsistent_groups: int = 0
    dropped_overlapping: int = 0
    qgen_failures: int = 0
    judge_failures: int = 0

    def merge(self, other: "DiagnosticsTally") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def extraction_dict(self) -> dict:
        return {
            "dropped_malformed": self.dropped_malformed,
            "dropped_hallucinated": self.dropped_hallucinated,
            "inconsistent_groups": self.inconsistent_groups,
            "dropped_overlapping": self.dropped_overlapping,
            "qgen_failures": self.qgen_failures,
        }

    def verification_dict(self) -> dict:
        return {"judge_failures": self.judge_failures}

    @classmethod
    def from_report_dicts(cls, extraction: dict, verification: dict) -> "DiagnosticsTally":
        return cls(
            dropped_malformed=extraction.get("dropped_malformed", 0),
            dropped_hallucinated=extraction.get("dropped_hallucinated", 0),
            inconsistent_groups=extraction.get("inconsistent_groups", 0),
            dropped_overlapping=extraction.get("dropped_overlapping", 0),
            qgen_failures=extraction.get("qgen_failures", 0),
            judge_failures=verification.get("judge_failures", 0),
        )


@dataclass(frozen=True)
class VerificationReport:
    """Per-sentence verdicts for one passage; the payload the UI renders."""

    passage: str
    sentences: tuple[SentenceResult, ...]
    provenance: str
    diagnostics: DiagnosticsTally = field(default_factory=DiagnosticsTally)
    incomplete: bool = False

    def verdicts(self) -> list[Verdict]:
        return [v for s in self.sentences for v in s.verdicts]

    def to_dict(self) -> dict:
        return {
            "passage": self.passage,
            "sentences": [s.to_dict() for s in self.sentences],
            "provenance": self.provenance,
            "extraction_diagnostics": self.diagnostics.extraction_dict(),
            "verification_diagnostics": self.diagnostics.verification_dict(),
            "incomplete": self.incomplete,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            d["passage"],
            tuple(SentenceResult.from_dict(s) for s in d["sentences"]),
            d["provenance"],
            DiagnosticsTally.from_report_dicts(
                d.get("extraction_diagnostics", {}),
                d.get("verification_diagnostics", {}),
            ),
            d.get("incomplete", False),
        )


def canonical_json(d: dict) -> str:
    """The one JSON rendering used for files, wire bodies, and digests."""
    return json.dumps(d, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def canonical_json_line(d: dict) -> str:
    """Single-line canonical rendering, for JSON-Lines files."""
    return json.dumps(d, ensure_ascii=False, sort_keys=True)


def validate_report(report: VerificationReport) -> None:
    """Assert the label/evidence and span invariants of a finished report."""
    for sentence in report.sentences:
        n = len(sentence.text)
        previous: CharSpan | None = None
        for v in sorted(sentence.verdicts, key=lambda v: v.span.start):
            if v.span.end > n:
                raise ValidationError(
                    f"span [{v.span.start}, {v.span.end}) exceeds sentence length {n}"
                )
            if previous is not None and v.span.start < previous.end:
                raise ValidationError("verdict spans overlap within one sentence")
            previous = v.span
            _validate_verdict(v)


def _validate_verdict(v: Verdict) -> None:
    supporting = [e for e in v.evidence
                  if e.classification is Classification.SUPPORTING]
    if v.label is VerdictLabel.STRONGLY_SUPPORTED:
        if (len(v.evidence) != 1 or len(supporting) != 1
                or supporting[0].evidence.origin is not EvidenceOrigin.KG):
            raise ValidationError(
                "StronglySupported requires exactly one supporting KG evidence item"
            )
    elif v.label is VerdictLabel.LIKELY_SUPPORTED:
        if not supporting:
            raise ValidationError("LikelySupported requires >=1 supporting item")
    else:
        if supporting:
            raise ValidationError("Questionable requires zero supporting items")
