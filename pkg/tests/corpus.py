"""Deterministic 30-sentence benchmark corpus with ground-truth-wired mocks.

Builds raw sentences with entity links, a KG snapshot holding the true
values, perturbs each sentence, and authors the mock LLM / web fixture
tables so the pipeline reproduces the gold annotations exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from factforge.bench import AnnotatedInstance, Link, perturb
from factforge.llm import fixture_key, render_prompt
from factforge.model import CharSpan, Triple, canonical_json_line
from factforge.normalize import normalize_value
from factforge.pipeline import PipelineConfig
from factforge.prompts import PromptTask
from factforge.retrieve import KgSnapshot, normalize_question

_NAMES = [
    "Alba Quist", "Boris Madsen", "Carla Ricci", "Dmitri Volkov", "Elena Brandt",
    "Farid Osei", "Greta Lindholm", "Hugo Mercier", "Ines Caldas", "Janek Novak",
    "Kaisa Virtanen", "Liam Donnelly", "Maja Kovac", "Nils Bergman", "Odile Fontaine",
    "Pavel Horak", "Quinn Avery", "Rosa Delgado", "Stefan Weber", "Tuva Eriksen",
    "Umar Farooq", "Vera Antonov", "Wim Peeters", "Xenia Laros", "Yusuf Demir",
    "Zofia Mazur", "Arne Solberg", "Bianca Moretti", "Cedric Lambert", "Dagny Holm",
]
_CITIES = ["Lyon", "Porto", "Graz", "Turku", "Galway",
           "Leiden", "Bergen", "Zagreb", "Ghent", "Tartu"]
_JOBS = ["architect", "biologist", "carpenter", "dentist",
         "engineer", "florist", "geologist", "historian"]


@dataclass
class CorpusSentence:
    text: str
    links: list[Link]
    triples: list[Triple]  # pre-perturbation, objects equal link surfaces


def _mk_sentence(i: int) -> CorpusSentence:
    name = _NAMES[i]
    city = _CITIES[i % len(_CITIES)]
    job = _JOBS[i % len(_JOBS)]
    age = str(23 + i)
    template = i % 3
    if template == 0:
        text = f"{name} was born in {city} and works as a {job}."
        triples = [Triple(name, "born in", city), Triple(name, "works as", job)]
    elif template == 1:
        text = f"{name} is {age} years old and lives in {city}."
        triples = [Triple(name, "age", age), Triple(name, "lives in", city)]
    else:
        text = f"{name} moved to {city} at the age of {age}."
        triples = [
            Triple.extended(name, "moved", "move_1", "place", city),
            Triple.extended(name, "moved", "move_1", "age", age),
        ]
    links = []
    for t in triples:
        start = text.index(t.object)
        links.append(Link(CharSpan(start, start + len(t.object)), t.object))
    return CorpusSentence(text, links, triples)


def _entity_type(entity: str) -> str:
    if entity in _CITIES:
        return "city"
    if entity in _JOBS:
        return "occupation"
    return "age value"


def _snapshot_rows(sentences: list[CorpusSentence]) -> list[tuple[str, str, str]]:
    rows = []
    for s in sentences:
        for t in s.triples:
            predicate = (f"{t.predicate} {t.predicate_attr}" if t.is_extended
                         else t.predicate)
            rows.append((t.subject, predicate, t.object))
    seen = set()
    for s in sentences:
        for link in s.links:
            key = (link.entity, _entity_type(link.entity))
            if key not in seen:
                seen.add(key)
                rows.append((link.entity, "instance_of", key[1]))
    return rows


def _question_for(t: Triple) -> str:
    if t.is_extended:
        if t.predicate_attr == "place":
            return f"To which city did {t.subject} move at a certain age?"
        return f"At what age did {t.subject} move away?"
    if t.predicate == "born in":
        return f"In which city was {t.subject} born?"
    if t.predicate == "works as":
        return f"What does {t.subject} work as?"
    if t.predicate == "age":
        return f"How old is {t.subject}?"
    return f"In which city does {t.subject} live?"


def _qgen_type(t: Triple) -> str:
    return {"city": "city", "occupation": "occupation",
            "age value": "age"}[_entity_type(t.object) if not t.object.isdigit()
                                else "age value"]


def _perturbed_triples(sentence: CorpusSentence,
                       instance: AnnotatedInstance) -> list[Triple]:
    """The sentence's triples with post-perturbation surface objects."""
    out = []
    for t, fact in zip(sentence.triples, instance.gold_facts):
        surface = instance.text[fact.span.start:fact.span.end]
        out.append(Triple(t.subject, t.predicate, surface,
                          t.predicate_id, t.predicate_attr))
    return out


@dataclass
class Corpus:
    sentences: list[CorpusSentence]
    instances: list[AnnotatedInstance]
    snapshot: KgSnapshot
    llm_table: dict[str, str]
    web_table: dict[str, list]
    config: PipelineConfig
    links_path: Path
    gold_lines: list[str]


def build_corpus(tmp_dir: Path, seed: int = 7, n: int = 30) -> Corpus:
    tmp_dir.mkdir(parents=True, exist_ok=True)
    sentences = [_mk_sentence(i) for i in range(n)]
    rows = _snapshot_rows(sentences)
    snapshot = KgSnapshot(tuple(rows))

    instances = [
        perturb(s.text, s.links, snapshot, f"{seed}:{i}", source_id=f"instance-{i}")
        for i, s in enumerate(sentences)
    ]

    llm_table: dict[str, str] = {}
    web_table: dict[str, list] = {}
    for s, inst in zip(sentences, instances):
        triples = _perturbed_triples(s, inst)
        extraction = "\n".join(t.surface() for t in triples)
        llm_table[fixture_key(render_prompt(PromptTask.FACT_EXTRACTION, inst.text))] = extraction
        for idx, t in enumerate(triples):
            question = _question_for(t)
            answer = f"TYPE: {_qgen_type(t)}\nQUESTION: {question}"
            if t.is_extended:
                context = [c for c in triples if c is not t]
                payload = "\n".join([f"FOCUS: {t.surface()}"]
                                    + [f"CONTEXT: {c.surface()}" for c in context])
                llm_table[fixture_key(render_prompt(PromptTask.CONTEXT_QGEN, payload))] = answer
            else:
                llm_table[fixture_key(render_prompt(PromptTask.TYPE_AWARE_QGEN,
                                                    t.surface()))] = answer
            web_table[normalize_question(question)] = []
            # only the perturbed fact needs an LLM entailment call, and only
            # when both values stay text under normalization
            original = s.links[idx].entity
            if (normalize_value(t.object) != normalize_value(original)
                    and normalize_value(t.object).kind == "text"
                    and normalize_value(original).kind == "text"):
                evidence = Triple(t.subject, t.predicate, original,
                                  t.predicate_id, t.predicate_attr)
                payload = f"CLAIM: {t.surface()}\nEVIDENCE: {evidence.surface()}"
                llm_table[fixture_key(render_prompt(PromptTask.TRIPLE_ENTAILMENT,
                                                    payload))] = "not supporting"

    (tmp_dir / "snap.tsv").write_text(
        "".join(f"{a}\t{b}\t{c}\n" for a, b, c in rows), encoding="utf-8")
    (tmp_dir / "llm_fixtures.json").write_text(
        json.dumps(llm_table, sort_keys=True), encoding="utf-8")
    (tmp_dir / "web_fixtures.json").write_text(
        json.dumps(web_table, sort_keys=True), encoding="utf-8")
    links_path = tmp_dir / "links.jsonl"
    links_path.write_text(
        "".join(json.dumps({"text": s.text,
                            "links": [l.to_dict() for l in s.links]}) + "\n"
                for s in sentences), encoding="utf-8")
    config = PipelineConfig.from_dict({
        "llm": {"kind": "mock", "fixtures_path": "llm_fixtures.json"},
        "kg": {"kind": "snapshot", "snapshot_path": "snap.tsv"},
        "web": {"kind": "fixture", "fixtures_path": "web_fixtures.json"},
        "parallelism": 2,
    }, base_dir=str(tmp_dir))
    gold_lines = [canonical_json_line(inst.to_dict()) for inst in instances]
    return Corpus(sentences, instances, snapshot, llm_table, web_table,
                  config, links_path, gold_lines)
