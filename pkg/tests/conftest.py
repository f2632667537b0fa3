"""Shared test helpers: mock fixture tables and the acceptance summary."""

from __future__ import annotations

from factforge.llm import MockBackend, fixture_key, render_prompt
from factforge.prompts import PromptTask, TaskSpec


def table_for(entries, tasks: dict[PromptTask, TaskSpec] | None = None) -> dict[str, str]:
    """Build a prompt-hash fixture table from (task, payload, response) rows.

    Rows with task None are raw ask-style prompts keyed on the payload
    itself.
    """
    table = {}
    for task, payload, response in entries:
        prompt = payload if task is None else render_prompt(task, payload, tasks)
        table[fixture_key(prompt)] = response
    return table


def backend_for(entries, tasks: dict[PromptTask, TaskSpec] | None = None) -> MockBackend:
    return MockBackend(table_for(entries, tasks))


_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_results:
        flag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  [{flag}] {name}")
