"""Sentence splitting, triple extraction, and object-span alignment."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    EmptyInput,
    InconsistentGroup,
    NoAlignment,
    UnparseableOutput,
    ValidationError,
)
from .llm import LlmBackend, complete
from .model import CharSpan, DiagnosticsTally, FactSet, Triple, canonicalize, parse_triple
from .normalize import normalize_text
from .prompts import PromptTask, TaskSpec

_TERMINATORS = ".?!"
_CLOSERS = "\"')]"
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)

# Tokens whose trailing period does not end a sentence.
_ABBREVIATIONS = frozenset({
    "dr.", "mr.", "mrs.", "ms.", "prof.", "sr.", "jr.", "st.", "mt.",
    "capt.", "gen.", "sen.", "rep.", "gov.", "hon.", "rev.",
    "vs.", "etc.", "e.g.", "i.e.", "cf.", "al.", "no.", "fig.", "ca.",
    "approx.", "inc.", "ltd.", "co.", "corp.", "dept.",
    "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.",
    "sept.", "oct.", "nov.", "dec.",
    "a.m.", "p.m.", "u.s.", "u.k.", "u.n.", "d.c.", "b.c.", "a.d.",
})


@dataclass(frozen=True)
class Sentence:
    text: str
    span: CharSpan


@dataclass(frozen=True)
class Passage:
    """Input text split into ordered, non-overlapping sentence spans."""

    text: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        cursor = 0
        for s in self.sentences:
            if s.span.start < cursor:
                raise ValidationError("sentence spans overlap or are unordered")
            if self.text[cursor:s.span.start].strip():
                raise ValidationError("non-whitespace text between sentence spans")
            if self.text[s.span.start:s.span.end] != s.text:
                raise ValidationError("sentence text does not match its span")
            cursor = s.span.end
        if self.text[cursor:].strip():
            raise ValidationError("non-whitespace text after the last sentence")


def _is_abbreviation(text: str, period_index: int) -> bool:
    start = period_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start:period_index + 1].lower().lstrip("\"'([{")
    return token in _ABBREVIATIONS


def split_sentences(p: str) -> Passage:
    """Rule-based splitting on terminal punctuation.

    A run of ``.?!`` followed by whitespace (or end of text) closes a
    sentence, unless the run is a single period ending a known
    abbreviation. Sentence spans are trimmed to non-whitespace, so
    re-joining sentence texts with the whitespace between spans
    reproduces the input exactly.
    """
    if not p.strip():
        raise EmptyInput("passage is empty")
    boundaries: list[int] = []
    i = 0
    n = len(p)
    while i < n:
        if p[i] in _TERMINATORS:
            j = i
            while j + 1 < n and p[j + 1] in _TERMINATORS:
                j += 1
            single_period = i == j and p[i] == "."
            k = j
            while k + 1 < n and p[k + 1] in _CLOSERS:
                k += 1
            at_break = k + 1 >= n or p[k + 1].isspace()
            if at_break and not (single_period and _is_abbreviation(p, i)):
                boundaries.append(k + 1)
            i = k + 1
        else:
            i += 1
    ends = list(boundaries)
    if p[boundaries[-1] if boundaries else 0:].strip():
        ends.append(n)
    sentences: list[Sentence] = []
    start = 0
    for end in ends:
        chunk = p[start:end]
        offset = len(chunk) - len(chunk.lstrip())
        trimmed = chunk.strip()
        if trimmed:
            a = start + offset
            sentences.append(Sentence(trimmed, CharSpan(a, a + len(trimmed))))
        start = end
    return Passage(p, tuple(sentences))


def extract_facts(sentence: str, backend: LlmBackend,
                  tasks: dict[PromptTask, TaskSpec] | None = None,
                  sentence_index: int = 0,
                  tally: DiagnosticsTally | None = None) -> FactSet:
    """Extract flat and extended triples from one sentence via the gateway.

    Lines failing the triple grammar are dropped and counted; duplicate
    lines collapse under canonical form. Raises UnparseableOutput when
    no line parses at all (a bare "NONE" yields an empty fact set).
    """
    if not sentence.strip():
        raise EmptyInput("sentence is empty")
    raw = complete(PromptTask.FACT_EXTRACTION, sentence, backend, tasks)
    lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
    if [ln.upper() for ln in lines] == ["NONE"]:
        return FactSet(sentence_index, (), ())
    flat: list[Triple] = []
    extended: list[Triple] = []
    seen: set[str] = set()
    dropped = 0
    for line in lines:
        try:
            t = parse_triple(line)
        except ValidationError:
            dropped += 1
            continue
        c = canonicalize(t)
        if c in seen:
            continue
        seen.add(c)
        (extended if t.is_extended else flat).append(t)
    if tally is not None:
        tally.dropped_malformed += dropped
    if not flat and not extended:
        raise UnparseableOutput(
            f"no line of the extractor output parsed ({dropped} malformed)"
        )
    return FactSet(sentence_index, tuple(flat), tuple(extended))


def _safe_casefold(s: str) -> str:
    lowered = s.lower()
    return lowered if len(lowered) == len(s) else s


def find_occurrences(sentence: str, surface: str) -> list[CharSpan]:
    """All case-insensitive verbatim occurrences of ``surface``, left to right."""
    hay = _safe_casefold(sentence)
    needle = _safe_casefold(surface)
    spans = []
    idx = hay.find(needle)
    while idx >= 0:
        spans.append(CharSpan(idx, idx + len(surface)))
        idx = hay.find(needle, idx + 1)
    return spans


def _tokens_with_spans(text: str) -> list[tuple[str, CharSpan]]:
    return [(m.group(0).lower(), CharSpan(m.start(), m.end()))
            for m in _TOKEN_RE.finditer(text)]


def align_span(sentence: str, t: Triple) -> CharSpan:
    """Character span of the triple's object within its sentence.

    Leftmost verbatim case-insensitive occurrence when present; otherwise
    the span of the longest common contiguous token run between the
    object and the sentence (leftmost in the sentence, then earliest in
    the object, on ties). Raises NoAlignment when they share no token.
    """
    occurrences = find_occurrences(sentence, t.object)
    if occurrences:
        return occurrences[0]
    sent_tokens = _tokens_with_spans(sentence)
    obj_tokens = [tok for tok, _ in _tokens_with_spans(t.object)]
    best: tuple[int, int, int] | None = None  # (-length, sent_start, obj_start)
    for si in range(len(sent_tokens)):
        for oi in range(len(obj_tokens)):
            length = 0
            while (si + length < len(sent_tokens) and oi + length < len(obj_tokens)
                   and sent_tokens[si + length][0] == obj_tokens[oi + length]):
                length += 1
            if length and (best is None or (-length, si, oi) < best):
                best = (-length, si, oi)
    if best is None:
        raise NoAlignment(
            f"no token of object {t.object!r} occurs in the sentence"
        )
    length, si = -best[0], best[1]
    return CharSpan(sent_tokens[si][1].start, sent_tokens[si + length - 1][1].end)


@dataclass(frozen=True)
class TripleGroup:
    """Extended triples sharing one predicate id: one event's attributes."""

    predicate_id: str
    members: tuple[Triple, ...]

    def context_for(self, member: Triple) -> tuple[Triple, ...]:
        return tuple(m for m in self.members if m is not member)


def group_extended(triples: list[Triple] | tuple[Triple, ...]) -> list[TripleGroup]:
    """Partition extended triples by predicate id, validating coherence."""
    groups: dict[str, list[Triple]] = {}
    for t in triples:
        if not t.is_extended:
            raise ValidationError(f"flat triple passed to group_extended: {t.surface()}")
        groups.setdefault(t.predicate_id, []).append(t)
    out = []
    for pid, members in groups.items():
        head = members[0]
        for m in members[1:]:
            if (normalize_text(m.subject) != normalize_text(head.subject)
                    or normalize_text(m.predicate) != normalize_text(head.predicate)):
                raise InconsistentGroup(
                    f"triples of predicate_id {pid!r} disagree on subject or predicate"
                )
        out.append(TripleGroup(pid, tuple(members)))
    return out
