"""Evidence retrieval: a KG question-answering adapter and a web-search
adapter, each available snapshot/fixture-backed or over HTTP."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import requests

from .errors import BackendUnavailable, SnapshotLoadError, ValidationError
from .model import KgAnswerSet, WebHit
from .normalize import normalize_text, normalize_value
from .questions import GeneratedQuestion

logger = logging.getLogger(__name__)

INSTANCE_OF = "instance_of"


def normalize_question(q: str) -> str:
    """Fixture key for a question: normalized text without the trailing '?'."""
    return normalize_text(q).rstrip("?").strip()


def _read_tsv(path: str, columns: int) -> list[tuple[str, ...]]:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                stripped = line.rstrip("\n")
                if not stripped.strip() or stripped.lstrip().startswith("#"):
                    continue
                parts = [p.strip() for p in stripped.split("\t")]
                if len(parts) != columns or not all(parts):
                    raise SnapshotLoadError(
                        f"{path}:{lineno}: expected {columns} non-empty tab-separated "
                        f"fields, got {stripped!r}"
                    )
                rows.append(tuple(parts))
    except OSError as exc:
        raise SnapshotLoadError(f"cannot read {path}: {exc}") from None
    return rows


@dataclass(frozen=True)
class KgSnapshot:
    """Local triple store: fact rows, instance-of typing rows, and a
    predicate alias map. Row order is the deterministic answer order."""

    facts: tuple[tuple[str, str, str], ...]
    aliases: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for alias, target in self.aliases.items():
            if self.aliases.get(target, target) != target:
                raise SnapshotLoadError(
                    f"alias target {target!r} is itself an alias; map must be closed"
                )
        index: dict[tuple[str, str], list[str]] = {}
        types: dict[str, list[str]] = {}
        by_type: dict[str, list[str]] = {}
        for s, p, o in self.facts:
            key = (normalize_text(s), self.canonical_predicate(p))
            index.setdefault(key, []).append(o)
            if normalize_text(p) == INSTANCE_OF:
                types.setdefault(normalize_text(s), []).append(o)
                bucket = by_type.setdefault(normalize_text(o), [])
                if s not in bucket:
                    bucket.append(s)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_types", types)
        object.__setattr__(self, "_by_type", by_type)

    @classmethod
    def load(cls, snapshot_path: str, aliases_path: str | None = None) -> "KgSnapshot":
        facts = tuple(_read_tsv(snapshot_path, 3))
        aliases = {}
        if aliases_path:
            for a, c in _read_tsv(aliases_path, 2):
                aliases[normalize_text(a)] = normalize_text(c)
        return cls(facts, aliases)

    def canonical_predicate(self, predicate: str) -> str:
        p = normalize_text(predicate)
        return self.aliases.get(p, p)

    def lookup(self, subject: str, predicate: str) -> list[str]:
        """All objects for (subject, predicate), deduplicated under
        normalize_value, in snapshot row order."""
        key = (normalize_text(subject), self.canonical_predicate(predicate))
        seen = set()
        out = []
        for o in self._index.get(key, []):
            nv = normalize_value(o)
            if nv not in seen:
                seen.add(nv)
                out.append(o)
        return out

    def types_of(self, entity: str) -> list[str]:
        return list(self._types.get(normalize_text(entity), []))

    def entities_of_type(self, entity_type: str) -> list[str]:
        return list(self._by_type.get(normalize_text(entity_type), []))


def _question_predicate(q: GeneratedQuestion) -> str:
    t = q.triple
    return f"{t.predicate} {t.predicate_attr}" if t.is_extended else t.predicate


class KgAdapter(Protocol):
    def query(self, question: GeneratedQuestion) -> KgAnswerSet: ...


@dataclass(frozen=True)
class SnapshotKgAdapter:
    """KGQA stand-in that answers from a local snapshot.

    Ignores the question text: the lookup key is the claim triple's
    normalized subject and alias-resolved predicate (with the attribute
    folded in for extended triples), which keeps tests deterministic.
    """

    snapshot: KgSnapshot
    source: str = "kg_snapshot"

    def query(self, question: GeneratedQuestion) -> KgAnswerSet:
        answers = self.snapshot.lookup(question.triple.subject,
                                       _question_predicate(question))
        return KgAnswerSet(tuple(answers), self.source)


@dataclass
class HttpKgAdapter:
    """POSTs the question text to a KGQA endpoint and reads a short-answer
    list at ``answers_path``."""

    url: str
    timeout_s: float = 10.0
    answers_path: str = "answers"
    _session: requests.Session = field(default_factory=requests.Session, repr=False)

    def query(self, question: GeneratedQuestion) -> KgAnswerSet:
        try:
            resp = self._session.post(self.url, json={"question": question.question},
                                      timeout=self.timeout_s)
            resp.raise_for_status()
            node = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise BackendUnavailable(f"kg endpoint failed: {type(exc).__name__}") from None
        for part in self.answers_path.split("."):
            try:
                node = node[int(part)] if part.lstrip("-").isdigit() else node[part]
            except (KeyError, IndexError, TypeError):
                raise BackendUnavailable(
                    f"kg response field {self.answers_path!r} missing", retriable=False
                ) from None
        if not isinstance(node, list) or not all(isinstance(a, str) for a in node):
            raise BackendUnavailable("kg response answers are not a list of strings",
                                     retriable=False)
        seen, answers = set(), []
        for a in node:
            nv = normalize_value(a)
            if nv not in seen:
                seen.add(nv)
                answers.append(a)
        return KgAnswerSet(tuple(answers), self.url)


def _build_hits(entries: Sequence[dict], k: int, origin: str) -> list[WebHit]:
    hits: list[WebHit] = []
    for entry in entries:
        try:
            hit = WebHit(entry["passage"], entry["short_answer"], entry["source_link"])
        except (KeyError, TypeError, ValidationError) as exc:
            logger.warning("dropping invalid web hit from %s: %s", origin, exc)
            continue
        hits.append(hit)
        if len(hits) == k:
            break
    return hits


class WebAdapter(Protocol):
    def query(self, question: GeneratedQuestion, k: int) -> list[WebHit]: ...


@dataclass(frozen=True)
class FixtureWebAdapter:
    """Web search backed by a JSON map from normalized question to a
    ranked hit list. A missing question is an empty result, with a
    warning: web coverage is inherently partial."""

    table: Mapping[str, tuple[dict, ...]]

    @classmethod
    def from_file(cls, path: str) -> "FixtureWebAdapter":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValidationError(f"web fixture file {path} must hold a JSON object")
        return cls({normalize_question(q): tuple(entries) for q, entries in raw.items()})

    def query(self, question: GeneratedQuestion, k: int) -> list[WebHit]:
        if k < 1:
            raise ValidationError(f"k must be >= 1, got {k}")
        key = normalize_question(question.question)
        entries = self.table.get(key)
        if entries is None:
            logger.warning("web fixture has no entry for question %r", key)
            return []
        return _build_hits(entries, k, "fixture")


@dataclass
class HttpWebAdapter:
    """POSTs {query, top_k} to a search endpoint and extracts
    (passage, short answer, source link) per hit via field paths."""

    url: str
    timeout_s: float = 10.0
    results_path: str = "results"
    passage_field: str = "passage"
    answer_field: str = "short_answer"
    link_field: str = "source_link"
    _session: requests.Session = field(default_factory=requests.Session, repr=False)

    def query(self, question: GeneratedQuestion, k: int) -> list[WebHit]:
        if k < 1:
            raise ValidationError(f"k must be >= 1, got {k}")
        try:
            resp = self._session.post(self.url,
                                      json={"query": question.question, "top_k": k},
                                      timeout=self.timeout_s)
            resp.raise_for_status()
            node = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise BackendUnavailable(f"web endpoint failed: {type(exc).__name__}") from None
        for part in self.results_path.split("."):
            try:
                node = node[int(part)] if part.lstrip("-").isdigit() else node[part]
            except (KeyError, IndexError, TypeError):
                raise BackendUnavailable(
                    f"web response field {self.results_path!r} missing", retriable=False
                ) from None
        if not isinstance(node, list):
            raise BackendUnavailable("web response results are not a list", retriable=False)
        entries = [{
            "passage": item.get(self.passage_field),
            "short_answer": item.get(self.answer_field),
            "source_link": item.get(self.link_field),
        } for item in node if isinstance(item, dict)]
        return _build_hits(entries, k, self.url)


def query_kg(question: GeneratedQuestion, adapter: KgAdapter) -> KgAnswerSet:
    """Answer one question against the knowledge graph; empty is valid."""
    return adapter.query(question)


def query_web(question: GeneratedQuestion, k: int, adapter: WebAdapter) -> list[WebHit]:
    """Top-k web hits for one question, in rank order."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    hits = adapter.query(question, k)
    return hits[:k]
