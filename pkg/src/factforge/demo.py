"""Bundled fixture-backed demo: two passages, one revision, one ask query.

The mock fixture file shipped in data/demo is generated from
``fixture_table`` (tools/gen_demo_fixtures.py); regenerate it whenever
the prompt templates or demo wiring change.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from .llm import ask, fixture_key, render_prompt
from .model import VerificationReport, canonical_json
from .pipeline import PipelineComponents, PipelineConfig, build_components, verify_passage
from .prompts import PromptTask
from .revise import RevisionResult, propose_revisions, revision_result_to_dict

DEMO_STATES_TEXT = "United States is in North America and has 51 states"
DEMO_AGE_TEXT = "Taylor Swift is 30 years old."
DEMO_ASK_QUERY = "How old is Taylor Swift?"
DEMO_ASK_ANSWER = "Taylor Swift is 30 years old."

_TASK_RESPONSES: tuple[tuple[PromptTask, str, str], ...] = (
    (
        PromptTask.FACT_EXTRACTION,
        DEMO_STATES_TEXT,
        "(United States; located in; North America)\n"
        "(United States; number of states; 51)",
    ),
    (
        PromptTask.FACT_EXTRACTION,
        DEMO_AGE_TEXT,
        "(Taylor Swift; age; 30)",
    ),
    (
        PromptTask.TYPE_AWARE_QGEN,
        "(United States; located in; North America)",
        "TYPE: continent\nQUESTION: On which continent is the United States located?",
    ),
    (
        PromptTask.TYPE_AWARE_QGEN,
        "(United States; number of states; 51)",
        "TYPE: count\nQUESTION: How many states does the United States have?",
    ),
    (
        PromptTask.TYPE_AWARE_QGEN,
        "(Taylor Swift; age; 30)",
        "TYPE: age\nQUESTION: How old is Taylor Swift?",
    ),
    (
        PromptTask.REVISION,
        f"SENTENCE: {DEMO_AGE_TEXT}\n"
        "REPLACE: (Taylor Swift; age; 30)\n"
        "WITH: (Taylor Swift; age; 33)",
        "Taylor Swift is 33 years old.",
    ),
)


def demo_dir() -> str:
    return str(resources.files("factforge").joinpath("data", "demo"))


def demo_config() -> PipelineConfig:
    return PipelineConfig.from_file(os.path.join(demo_dir(), "config.json"))


def fixture_table() -> dict[str, str]:
    """The mock LLM table for the demo, keyed by rendered-prompt hash."""
    table = {fixture_key(render_prompt(task, payload)): response
             for task, payload, response in _TASK_RESPONSES}
    table[fixture_key(DEMO_ASK_QUERY)] = DEMO_ASK_ANSWER
    return table


@dataclass
class DemoResult:
    states_report: VerificationReport
    age_report: VerificationReport
    age_revisions: RevisionResult
    ask_answer: str


def run_demo(out_dir: str | None = None) -> DemoResult:
    """Verify both demo passages, revise the age sentence, run the ask query."""
    config = demo_config()
    components: PipelineComponents = build_components(config)
    states_report = verify_passage(DEMO_STATES_TEXT, config, components)
    age_report = verify_passage(DEMO_AGE_TEXT, config, components)
    sentence = age_report.sentences[0]
    age_revisions = propose_revisions(sentence.text, sentence.verdicts,
                                      components.backend, components.tasks)
    answer = ask(DEMO_ASK_QUERY, components.backend)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for name, payload in (
            ("report_states.json", states_report.to_dict()),
            ("report_age.json", age_report.to_dict()),
            ("revisions_age.json", revision_result_to_dict(age_revisions)),
        ):
            with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
                fh.write(canonical_json(payload))
    return DemoResult(states_report, age_report, age_revisions, answer)
