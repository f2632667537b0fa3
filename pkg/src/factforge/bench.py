"""Benchmark tooling: same-type entity perturbation, the annotated gold
format, and the span/label/attribution scorer."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from .errors import InstanceMismatch, NoEligibleLink, ValidationError
from .model import (
    CharSpan,
    VerdictLabel,
    VerificationReport,
    canonical_json_line,
)
from .normalize import normalize_text, normalize_value
from .retrieve import KgSnapshot


@dataclass(frozen=True)
class Link:
    """An entity mention: a span of the sentence plus the true entity."""

    span: CharSpan
    entity: str

    def to_dict(self) -> dict:
        return {"start": self.span.start, "end": self.span.end, "entity": self.entity}

    @classmethod
    def from_dict(cls, d: dict) -> "Link":
        return cls(CharSpan(d["start"], d["end"]), d["entity"])


@dataclass(frozen=True)
class PerturbationRecord:
    original: str
    replacement: str
    entity_type: str

    def to_dict(self) -> dict:
        return {
            "original": self.original,
            "replacement": self.replacement,
            "entity_type": self.entity_type,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbationRecord":
        return cls(d["original"], d["replacement"], d["entity_type"])


@dataclass(frozen=True)
class GoldFact:
    span: CharSpan
    label: VerdictLabel
    evidence_keys: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "span": self.span.to_dict(),
            "label": self.label.value,
            "evidence_keys": list(self.evidence_keys),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GoldFact":
        return cls(CharSpan.from_dict(d["span"]), VerdictLabel(d["label"]),
                   tuple(d.get("evidence_keys", ())))


@dataclass(frozen=True)
class AnnotatedInstance:
    """Gold text with labeled fact spans, optionally born of a perturbation."""

    text: str
    gold_facts: tuple[GoldFact, ...]
    source_id: str = ""
    perturbation: PerturbationRecord | None = None

    def __post_init__(self):
        last_end = -1
        for f in sorted(self.gold_facts, key=lambda f: f.span.start):
            if f.span.start < last_end:
                raise ValidationError("gold fact spans overlap")
            if f.span.end > len(self.text):
                raise ValidationError("gold fact span exceeds the text")
            last_end = f.span.end

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "gold_facts": [f.to_dict() for f in self.gold_facts],
            "provenance": {
                "source_id": self.source_id,
                "perturbation": self.perturbation.to_dict() if self.perturbation else None,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotatedInstance":
        prov = d.get("provenance", {})
        pert = prov.get("perturbation")
        return cls(
            d["text"],
            tuple(GoldFact.from_dict(f) for f in d["gold_facts"]),
            prov.get("source_id", ""),
            PerturbationRecord.from_dict(pert) if pert else None,
        )


def load_links_file(path: str) -> list[tuple[str, list[Link]]]:
    """Read a JSON-Lines file of {text, links: [{start, end, entity}]}."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                text = d["text"]
                links = [Link.from_dict(ld) for ld in d["links"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad links record: {exc}") from None
            for link in links:
                if link.span.end > len(text):
                    raise ValidationError(f"{path}:{lineno}: link span exceeds text")
            out.append((text, links))
    return out


def write_gold_file(instances: Sequence[AnnotatedInstance], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(canonical_json_line(inst.to_dict()) + "\n")


def load_gold_file(path: str) -> list[AnnotatedInstance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(AnnotatedInstance.from_dict(json.loads(line)))
    return out


def _perturbation_choices(links: Sequence[Link], snapshot: KgSnapshot):
    eligible = []
    for link in links:
        types = snapshot.types_of(link.entity)
        if not types:
            continue
        entity_type = types[0]
        candidates = [e for e in snapshot.entities_of_type(entity_type)
                      if normalize_text(e) != normalize_text(link.entity)]
        if candidates:
            eligible.append((link, entity_type, candidates))
    return eligible


def perturb(sentence: str, links: Sequence[Link], snapshot: KgSnapshot,
            seed: int | str, source_id: str = "") -> AnnotatedInstance:
    """Corrupt one linked entity with a random same-type entity.

    Procedure (reproducible per seed): rng = random.Random(seed); pick
    eligible-link index with rng.randrange, then candidate index with
    rng.randrange. Eligible links keep input order; candidates are the
    snapshot-order entities sharing the link entity's first instance-of
    type, excluding the entity itself. The perturbed span becomes a
    Questionable gold fact keyed to the original entity; every other
    link is labeled by whether its surface still agrees with its entity.
    """
    eligible = _perturbation_choices(links, snapshot)
    if not eligible:
        raise NoEligibleLink("no link has same-type replacement candidates")
    rng = random.Random(seed)
    chosen, entity_type, candidates = eligible[rng.randrange(len(eligible))]
    replacement = candidates[rng.randrange(len(candidates))]
    start, end = chosen.span.start, chosen.span.end
    text = sentence[:start] + replacement + sentence[end:]
    delta = len(replacement) - (end - start)
    facts = []
    for link in links:
        if link is chosen:
            facts.append(GoldFact(
                CharSpan(start, start + len(replacement)),
                VerdictLabel.QUESTIONABLE,
                (link.entity,),
            ))
            continue
        span = (link.span if link.span.end <= start
                else CharSpan(link.span.start + delta, link.span.end + delta))
        surface = sentence[link.span.start:link.span.end]
        if normalize_value(surface) == normalize_value(link.entity):
            facts.append(GoldFact(span, VerdictLabel.STRONGLY_SUPPORTED))
        else:
            facts.append(GoldFact(span, VerdictLabel.QUESTIONABLE, (link.entity,)))
    return AnnotatedInstance(
        text, tuple(facts), source_id,
        PerturbationRecord(chosen.entity, replacement, entity_type),
    )


@dataclass(frozen=True)
class MatchConfig:
    """span_mode "exact" requires identical offsets; "jaccard" accepts
    overlap/union >= the threshold."""

    span_mode: str = "exact"
    jaccard_threshold: float = 0.5

    def spans_match(self, a: CharSpan, b: CharSpan) -> bool:
        if self.span_mode == "exact":
            return a == b
        if self.span_mode == "jaccard":
            inter = a.overlap(b)
            union = a.length + b.length - inter
            return union > 0 and inter / union >= self.jaccard_threshold
        raise ValidationError(f"unknown span_mode {self.span_mode!r}")


@dataclass(frozen=True)
class _SystemFact:
    span: CharSpan
    label: VerdictLabel
    evidence_values: frozenset


def _sentence_offsets(report: VerificationReport) -> list[int]:
    """Recover each sentence's start offset within the passage."""
    offsets = []
    cursor = 0
    for s in report.sentences:
        idx = report.passage.find(s.text, cursor)
        if idx < 0:
            raise ValidationError("report sentence text not found in its passage")
        offsets.append(idx)
        cursor = idx + len(s.text)
    return offsets


def system_facts(report: VerificationReport) -> list[_SystemFact]:
    """Flatten a report's verdicts to passage-coordinate facts."""
    facts = []
    for offset, sentence in zip(_sentence_offsets(report), report.sentences):
        for v in sentence.verdicts:
            facts.append(_SystemFact(
                CharSpan(v.span.start + offset, v.span.end + offset),
                v.label,
                frozenset(normalize_value(e.evidence.object) for e in v.evidence),
            ))
    return facts


@dataclass(frozen=True)
class LabelScore:
    ov: int
    system_count: int
    gold_count: int
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {
            "ov": self.ov,
            "system_count": self.system_count,
            "gold_count": self.gold_count,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass(frozen=True)
class InstanceMatches:
    index: int
    matches: tuple[tuple[int, int], ...]  # (system index, gold index)
    system_count: int
    gold_count: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "matches": [list(m) for m in self.matches],
            "system_count": self.system_count,
            "gold_count": self.gold_count,
        }


@dataclass(frozen=True)
class EvalReport:
    total: LabelScore
    per_label: dict[str, LabelScore]
    per_instance: tuple[InstanceMatches, ...] = ()

    def to_dict(self) -> dict:
        return {
            "total": self.total.to_dict(),
            "per_label": {k: v.to_dict() for k, v in self.per_label.items()},
            "per_instance": [m.to_dict() for m in self.per_instance],
        }

    def format_table(self) -> str:
        """Aligned per-label precision/recall/F1 table (percentages)."""
        rows = [("Label", "P", "R", "F1")]
        for label in VerdictLabel:
            s = self.per_label[label.value]
            rows.append((label.value,) + tuple(f"{100 * x:.2f}"
                                               for x in (s.precision, s.recall, s.f1)))
        t = self.total
        rows.append(("Total",) + tuple(f"{100 * x:.2f}"
                                       for x in (t.precision, t.recall, t.f1)))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = []
        for r in rows:
            lines.append("  ".join(
                r[0].ljust(widths[0]) if i == 0 else r[i].rjust(widths[i])
                for i in range(4)
            ))
        return "\n".join(lines)


def _prf(ov: int, n_system: int, n_gold: int) -> tuple[float, float, float]:
    p = ov / n_system if n_system else 0.0
    r = ov / n_gold if n_gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def _satisfies(system: _SystemFact, gold: GoldFact, config: MatchConfig) -> bool:
    if not config.spans_match(system.span, gold.span):
        return False
    if system.label is not gold.label:
        return False
    if gold.label in (VerdictLabel.QUESTIONABLE, VerdictLabel.LIKELY_SUPPORTED) \
            and gold.evidence_keys:
        keys = {normalize_value(k) for k in gold.evidence_keys}
        if not (system.evidence_values & keys):
            return False
    return True


def match_instance(system: list[_SystemFact], gold: Sequence[GoldFact],
                   config: MatchConfig) -> list[tuple[int, int]]:
    """1-to-1 greedy matching by descending span overlap.

    A system fact matches a gold fact when the spans match under the
    config, the labels are equal, and (for questionable or likely
    gold facts carrying evidence keys) at least one system evidence
    value equals a gold key.
    """
    edges = []
    for si, s in enumerate(system):
        for gi, g in enumerate(gold):
            if _satisfies(s, g, config):
                edges.append((-s.span.overlap(g.span), gi, si))
    edges.sort()
    used_s: set[int] = set()
    used_g: set[int] = set()
    matches = []
    for _, gi, si in edges:
        if si in used_s or gi in used_g:
            continue
        used_s.add(si)
        used_g.add(gi)
        matches.append((si, gi))
    return sorted(matches)


def score(system: Sequence[VerificationReport] | VerificationReport,
          gold: Sequence[AnnotatedInstance],
          config: MatchConfig = MatchConfig()) -> EvalReport:
    """Score system reports against gold instances.

    Reports pair with gold instances positionally; the passage must
    equal the instance text. ov counts 1-to-1 matches; precision is
    ov/|S|, recall ov/|G|, F1 their harmonic mean, overall and per label.
    """
    reports = [system] if isinstance(system, VerificationReport) else list(system)
    if len(reports) != len(gold):
        raise InstanceMismatch(
            f"{len(reports)} system reports vs {len(gold)} gold instances"
        )
    ov = 0
    n_system = n_gold = 0
    label_ov = {label: 0 for label in VerdictLabel}
    label_s = {label: 0 for label in VerdictLabel}
    label_g = {label: 0 for label in VerdictLabel}
    per_instance = []
    for idx, (report, inst) in enumerate(zip(reports, gold)):
        if report.passage != inst.text:
            raise InstanceMismatch(f"instance {idx}: report passage differs from gold text")
        sys_facts = system_facts(report)
        matches = match_instance(sys_facts, inst.gold_facts, config)
        ov += len(matches)
        n_system += len(sys_facts)
        n_gold += len(inst.gold_facts)
        for f in sys_facts:
            label_s[f.label] += 1
        for f in inst.gold_facts:
            label_g[f.label] += 1
        for si, gi in matches:
            label_ov[sys_facts[si].label] += 1
        per_instance.append(InstanceMatches(idx, tuple(matches),
                                            len(sys_facts), len(inst.gold_facts)))
    per_label = {}
    for label in VerdictLabel:
        p, r, f1 = _prf(label_ov[label], label_s[label], label_g[label])
        per_label[label.value] = LabelScore(label_ov[label], label_s[label],
                                            label_g[label], p, r, f1)
    p, r, f1 = _prf(ov, n_system, n_gold)
    return EvalReport(LabelScore(ov, n_system, n_gold, p, r, f1),
                      per_label, tuple(per_instance))
