"""Instructions and demonstration banks for the five prompted tasks.

Output grammars (what downstream parsers rely on):

* fact extraction   — one triple per line, "(S; P; O)" or
                      "(S; P; Pid; attr; O)"; exactly "NONE" when the
                      sentence states no verifiable fact.
* type-aware qgen   — two lines, "TYPE: <t>" then "QUESTION: <q>?".
* context qgen      — same two lines; the payload carries FOCUS and
                      CONTEXT triple lines. With the type scaffold
                      disabled the output is the bare question line.
* triple entailment — a single token line, "supporting" or
                      "not supporting".
* revision          — the rewritten sentence on a single line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ValidationError


class PromptTask(enum.Enum):
    FACT_EXTRACTION = "fact_extraction"
    TYPE_AWARE_QGEN = "type_aware_qgen"
    CONTEXT_QGEN = "context_qgen"
    TRIPLE_ENTAILMENT = "triple_entailment"
    REVISION = "revision"


@dataclass(frozen=True)
class TaskSpec:
    """Instruction plus ordered few-shot demonstrations for one task."""

    instruction: str
    demonstrations: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for demo_in, demo_out in self.demonstrations:
            if not demo_in.strip() or not demo_out.strip():
                raise ValidationError("demonstration input/output must be non-empty")


_EXTRACTION_INSTRUCTION = """\
Break the input sentence into verifiable fact triples, one per line.
Use (Subject; Predicate; Object) for a predicate with a single object.
Use (Subject; Predicate; Predicate_ID; Attribute; Object) for each attribute
of an event or n-ary predicate; triples of one event share the Predicate_ID.
If the sentence states no verifiable fact, output exactly: NONE"""

_EXTRACTION_DEMOS = (
    (
        "Canberra is the capital of Australia.",
        "(Canberra; capital of; Australia)",
    ),
    (
        "Mount Everest is 8849 metres tall and lies in the Himalayas.",
        "(Mount Everest; height; 8849 metres)\n"
        "(Mount Everest; located in; Himalayas)",
    ),
    (
        "Ada Lovelace was born in London in 1815.",
        "(Ada Lovelace; born; birth_1; place; London)\n"
        "(Ada Lovelace; born; birth_1; year; 1815)",
    ),
    (
        "Marie Curie won the Nobel Prize in Physics in 1903.",
        "(Marie Curie; won; win_1; award; Nobel Prize in Physics)\n"
        "(Marie Curie; won; win_1; year; 1903)",
    ),
    (
        "Einstein published the theory of general relativity in 1915 and "
        "worked at Princeton.",
        "(Einstein; published; pub_1; work; theory of general relativity)\n"
        "(Einstein; published; pub_1; year; 1915)\n"
        "(Einstein; worked at; Princeton)",
    ),
)

_TQGEN_INSTRUCTION = """\
Given a fact triple, first name the type of its Object, then write one
question whose answer is exactly the Object. Think type first so the
question targets that type. Never mention the Object itself.
Answer with two lines:
TYPE: <object type>
QUESTION: <question ending with ?>"""

_TQGEN_DEMOS = (
    (
        "(Canberra; capital of; Australia)",
        "TYPE: country\nQUESTION: Of which country is Canberra the capital?",
    ),
    (
        "(Mount Everest; height; 8849 metres)",
        "TYPE: height measurement\nQUESTION: How tall is Mount Everest?",
    ),
    (
        "(Ada Lovelace; birthdate; 10 December 1815)",
        "TYPE: date\nQUESTION: On what date was Ada Lovelace born?",
    ),
)

_CQGEN_INSTRUCTION = """\
Given the FOCUS triple of an event and its CONTEXT triples, first name the
type of the FOCUS Object, then write one question whose answer is exactly
the FOCUS Object. Work the context into the question so it pins down the
exact situation. Never mention the FOCUS Object itself.
Answer with two lines:
TYPE: <object type>
QUESTION: <question ending with ?>"""

_CQGEN_DEMOS = (
    (
        "FOCUS: (Ada Lovelace; born; birth_1; place; London)\n"
        "CONTEXT: (Ada Lovelace; born; birth_1; year; 1815)",
        "TYPE: city\nQUESTION: In which city was Ada Lovelace born in 1815?",
    ),
    (
        "FOCUS: (Marie Curie; won; win_1; year; 1903)\n"
        "CONTEXT: (Marie Curie; won; win_1; award; Nobel Prize in Physics)",
        "TYPE: year\nQUESTION: In which year did Marie Curie win the Nobel "
        "Prize in Physics?",
    ),
    (
        "FOCUS: (Einstein; published; pub_1; work; theory of general relativity)\n"
        "CONTEXT: (Einstein; published; pub_1; year; 1915)",
        "TYPE: scientific work\nQUESTION: Which work did Einstein publish in 1915?",
    ),
)

_ENTAILMENT_INSTRUCTION = """\
Decide whether the EVIDENCE triple entails the CLAIM triple, i.e. whether
the evidence object confirms the claim object for the same subject and
predicate. Answer with exactly one line: supporting or not supporting"""

_ENTAILMENT_DEMOS = (
    (
        "CLAIM: (Mount Everest; height; 8849 metres)\n"
        "EVIDENCE: (Mount Everest; height; 8,849 m)",
        "supporting",
    ),
    (
        "CLAIM: (Canberra; capital of; Australia)\n"
        "EVIDENCE: (Canberra; capital of; New Zealand)",
        "not supporting",
    ),
)

_REVISION_INSTRUCTION = """\
Rewrite the SENTENCE so it no longer states the REPLACE triple and instead
states the WITH triple, changing nothing else the sentence says.
Answer with the rewritten sentence on a single line."""

_REVISION_DEMOS = (
    (
        "SENTENCE: Mount Everest is 8000 metres tall.\n"
        "REPLACE: (Mount Everest; height; 8000 metres)\n"
        "WITH: (Mount Everest; height; 8849 metres)",
        "Mount Everest is 8849 metres tall.",
    ),
)


def default_tasks(qgen_shots: int = 2) -> dict[PromptTask, TaskSpec]:
    """Default task bank: 5 extraction shots, 2 per QGen task, 2 entailment,
    1 revision. The QGen count is configurable up to the bank size."""
    if not 1 <= qgen_shots <= len(_TQGEN_DEMOS):
        raise ValidationError(
            f"qgen_shots must be in [1, {len(_TQGEN_DEMOS)}], got {qgen_shots}"
        )
    return {
        PromptTask.FACT_EXTRACTION: TaskSpec(_EXTRACTION_INSTRUCTION, _EXTRACTION_DEMOS),
        PromptTask.TYPE_AWARE_QGEN: TaskSpec(_TQGEN_INSTRUCTION, _TQGEN_DEMOS[:qgen_shots]),
        PromptTask.CONTEXT_QGEN: TaskSpec(_CQGEN_INSTRUCTION, _CQGEN_DEMOS[:qgen_shots]),
        PromptTask.TRIPLE_ENTAILMENT: TaskSpec(_ENTAILMENT_INSTRUCTION, _ENTAILMENT_DEMOS),
        PromptTask.REVISION: TaskSpec(_REVISION_INSTRUCTION, _REVISION_DEMOS),
    }
