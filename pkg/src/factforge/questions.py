"""Retrieval-question generation: type-aware for flat triples,
context-driven for extended ones."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import AnswerLeak, MalformedQGenOutput, ValidationError
from .llm import LlmBackend, complete
from .model import Triple
from .normalize import contains_normalized
from .prompts import PromptTask, TaskSpec


class QuestionMode(enum.Enum):
    TYPE_AWARE = "TypeAware"
    CONTEXT_DRIVEN = "ContextDriven"


@dataclass(frozen=True)
class GeneratedQuestion:
    """One retrieval question whose answer is the triple's object."""

    triple: Triple
    object_type: str | None
    question: str
    mode: QuestionMode

    def __post_init__(self):
        if not self.question.strip() or not self.question.rstrip().endswith("?"):
            raise ValidationError("question must be non-empty and end with '?'")
        extended = self.triple.is_extended
        if extended != (self.mode is QuestionMode.CONTEXT_DRIVEN):
            raise ValidationError("mode must be ContextDriven exactly for extended triples")

    def to_dict(self) -> dict:
        return {
            "triple": self.triple.to_dict(),
            "object_type": self.object_type,
            "question": self.question,
            "mode": self.mode.value,
        }


def _merged_flat_view(t: Triple) -> str:
    """Extended triple rendered flat, folding the attribute into the predicate."""
    return f"({t.subject}; {t.predicate} {t.predicate_attr}; {t.object})"


def _parse_type_question(raw: str) -> tuple[str, str]:
    obj_type = question = None
    for line in raw.splitlines():
        line = line.strip()
        if line.upper().startswith("TYPE:") and obj_type is None:
            obj_type = line[5:].strip()
        elif line.upper().startswith("QUESTION:") and question is None:
            question = line[9:].strip()
    if not obj_type:
        raise MalformedQGenOutput("missing TYPE line")
    if not question:
        raise MalformedQGenOutput("missing QUESTION line")
    return obj_type, question


def _parse_bare_question(raw: str) -> str:
    lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
    if not lines:
        raise MalformedQGenOutput("empty question output")
    line = lines[0]
    if line.upper().startswith("QUESTION:"):
        line = line[9:].strip()
    return line


def generate_question(t: Triple, context: list[Triple] | tuple[Triple, ...],
                      backend: LlmBackend,
                      tasks: dict[PromptTask, TaskSpec] | None = None,
                      type_scaffold_for_context: bool = True) -> GeneratedQuestion:
    """Generate the retrieval question for one triple.

    Flat triples go through the type-aware two-step prompt; extended
    triples carry their sibling context triples (an extended triple with
    no context degrades to the type-aware prompt over a flattened view).
    The object must not appear in the question: a question that states
    its own answer poisons retrieval.
    """
    if t.is_extended:
        mode = QuestionMode.CONTEXT_DRIVEN
        if context:
            payload = "\n".join([f"FOCUS: {t.surface()}"]
                                + [f"CONTEXT: {c.surface()}" for c in context])
            raw = complete(PromptTask.CONTEXT_QGEN, payload, backend, tasks)
            if type_scaffold_for_context:
                obj_type, question = _parse_type_question(raw)
            else:
                obj_type, question = None, _parse_bare_question(raw)
        else:
            raw = complete(PromptTask.TYPE_AWARE_QGEN, _merged_flat_view(t), backend, tasks)
            obj_type, question = _parse_type_question(raw)
    else:
        if context:
            raise ValidationError("flat triples take no context")
        mode = QuestionMode.TYPE_AWARE
        raw = complete(PromptTask.TYPE_AWARE_QGEN, t.surface(), backend, tasks)
        obj_type, question = _parse_type_question(raw)
    if not question.endswith("?"):
        raise MalformedQGenOutput(f"question does not end with '?': {question!r}")
    if contains_normalized(question, t.object):
        raise AnswerLeak(f"question contains its own answer: {question!r}")
    return GeneratedQuestion(t, obj_type, question, mode)
