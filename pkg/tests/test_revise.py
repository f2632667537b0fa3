"""Revision proposals and the three-gate validation checks."""

import pytest

from conftest import backend_for
from factforge.errors import NoCandidateCorrection
from factforge.llm import MockBackend
from factforge.model import (
    CharSpan,
    Classification,
    ClassifiedEvidence,
    EvidenceOrigin,
    JudgeKind,
    Triple,
    Verdict,
    VerdictLabel,
    WebHit,
)
from factforge.prompts import PromptTask
from factforge.revise import check_revision, propose_revisions
from factforge.verify import build_evidence_triple

_AGE_SENTENCE = "Taylor Swift is 30 years old."
_AGE_SRC = Triple("Taylor Swift", "age", "30")
_AGE_DEST = build_evidence_triple(_AGE_SRC, "33", EvidenceOrigin.KG)


def _questionable(src, evidence_objects, sentence, origins=None, hits=None):
    evidence = []
    for i, obj in enumerate(evidence_objects):
        origin = (origins or [EvidenceOrigin.KG] * len(evidence_objects))[i]
        hit = (hits or [None] * len(evidence_objects))[i]
        ev = build_evidence_triple(src, obj, origin, hit)
        evidence.append(ClassifiedEvidence(ev, Classification.NOT_SUPPORTING,
                                           JudgeKind.LLM))
    start = sentence.lower().find(src.object.lower())
    span = CharSpan(start, start + len(src.object)) if start >= 0 else CharSpan(0, 1)
    return Verdict(src, VerdictLabel.QUESTIONABLE, span, tuple(evidence), "q?")


def _revision_backend(entries):
    return backend_for([(PromptTask.REVISION, payload, response)
                        for payload, response in entries])


def _age_payload(dest_obj="33"):
    return (f"SENTENCE: {_AGE_SENTENCE}\n"
            f"REPLACE: {_AGE_SRC.surface()}\n"
            f"WITH: (Taylor Swift; age; {dest_obj})")


class TestCheckRevision:
    def test_age_rewrite_passes_all_gates(self):
        checks = check_revision(_AGE_SENTENCE, "Taylor Swift is 33 years old.",
                                _AGE_SRC, _AGE_DEST, [])
        assert (checks.drops_src, checks.adds_dest, checks.preserves_others) == (True, True, True)
        assert checks.passed

    def test_unchanged_sentence_fails_drops_src(self):
        checks = check_revision(_AGE_SENTENCE, _AGE_SENTENCE, _AGE_SRC, _AGE_DEST, [])
        assert not checks.drops_src
        assert not checks.passed

    def test_dropping_unrelated_object_fails_preserves_others(self):
        s = "Alice Reyes was born in Paris and works as a nurse."
        src = Triple("Alice Reyes", "born in", "Paris")
        dest = build_evidence_triple(src, "Lyon", EvidenceOrigin.KG)
        others = [Triple("Alice Reyes", "works as", "nurse")]
        good = check_revision(s, "Alice Reyes was born in Lyon and works as a nurse.",
                              src, dest, others)
        assert good.passed
        bad = check_revision(s, "Alice Reyes was born in Lyon.", src, dest, others)
        assert bad.adds_dest and not bad.preserves_others

    def test_missing_dest_fails_adds_dest(self):
        checks = check_revision(_AGE_SENTENCE, "Taylor Swift is quite old.",
                                _AGE_SRC, _AGE_DEST, [])
        assert not checks.adds_dest

    def test_substring_replacement_counts_via_span(self):
        s = "She lives in New York now."
        src = Triple("She", "lives in", "New York")
        dest = build_evidence_triple(src, "New York City", EvidenceOrigin.KG)
        checks = check_revision(s, "She lives in New York City now.", src, dest, [])
        # "new york" still occurs inside the replacement, but the dest
        # object replaced it exactly at the aligned span
        assert checks.drops_src and checks.adds_dest

    def test_pure_function(self):
        a = check_revision(_AGE_SENTENCE, "Taylor Swift is 33 years old.",
                           _AGE_SRC, _AGE_DEST, [])
        b = check_revision(_AGE_SENTENCE, "Taylor Swift is 33 years old.",
                           _AGE_SRC, _AGE_DEST, [])
        assert a == b


class TestProposeRevisions:
    def test_age_example_single_proposal(self):
        verdict = _questionable(_AGE_SRC, ["33"], _AGE_SENTENCE)
        backend = _revision_backend([(_age_payload(), "Taylor Swift is 33 years old.")])
        result = propose_revisions(_AGE_SENTENCE, [verdict], backend)
        assert len(result.proposals) == 1
        proposal = result.proposals[0]
        assert proposal.revised == "Taylor Swift is 33 years old."
        assert proposal.checks.passed
        assert proposal.dest.object == "33"

    def test_identity_candidate_yields_zero_proposals(self):
        verdict = _questionable(_AGE_SRC, ["30"], _AGE_SENTENCE)
        result = propose_revisions(_AGE_SENTENCE, [verdict], MockBackend({}))
        assert result.proposals == []

    def test_two_distinct_values_two_proposals(self):
        hits = [WebHit("she is 33", "33", "https://a"), WebHit("she is 34", "34", "https://b")]
        verdict = _questionable(_AGE_SRC, ["33", "34"], _AGE_SENTENCE,
                                origins=[EvidenceOrigin.WEB] * 2, hits=hits)
        backend = _revision_backend([
            (_age_payload("33"), "Taylor Swift is 33 years old."),
            (_age_payload("34"), "Taylor Swift is 34 years old."),
        ])
        result = propose_revisions(_AGE_SENTENCE, [verdict], backend)
        assert [p.dest.object for p in result.proposals] == ["33", "34"]

    def test_candidates_deduplicate_under_normalization(self):
        hits = [WebHit("thirty-three: 33", "33", "https://a")]
        verdict = _questionable(_AGE_SRC, ["33", "33."], _AGE_SENTENCE,
                                origins=[EvidenceOrigin.KG, EvidenceOrigin.WEB],
                                hits=[None] + hits)
        backend = _revision_backend([(_age_payload(), "Taylor Swift is 33 years old.")])
        result = propose_revisions(_AGE_SENTENCE, [verdict], backend)
        assert len(result.proposals) == 1

    def test_kg_candidates_come_first(self):
        hits = [WebHit("34 they say", "34", "https://w")]
        verdict = _questionable(_AGE_SRC, ["34", "33"], _AGE_SENTENCE,
                                origins=[EvidenceOrigin.WEB, EvidenceOrigin.KG],
                                hits=hits + [None])
        # evidence order in a pipeline verdict is KG first; emulate that
        verdict = Verdict(verdict.triple, verdict.label, verdict.span,
                          tuple(sorted(verdict.evidence,
                                       key=lambda e: e.evidence.origin is not EvidenceOrigin.KG)),
                          verdict.question)
        backend = _revision_backend([
            (_age_payload("33"), "Taylor Swift is 33 years old."),
            (_age_payload("34"), "Taylor Swift is 34 years old."),
        ])
        result = propose_revisions(_AGE_SENTENCE, [verdict], backend)
        assert [p.dest.object for p in result.proposals] == ["33", "34"]

    def test_empty_evidence_raises_no_candidate(self):
        verdict = _questionable(_AGE_SRC, [], _AGE_SENTENCE)
        with pytest.raises(NoCandidateCorrection):
            propose_revisions(_AGE_SENTENCE, [verdict], MockBackend({}))

    def test_mixed_empty_and_usable_evidence(self):
        s = "Taylor Swift is 30 years old and lives in Nashville."
        city = Triple("Taylor Swift", "lives in", "Nashville")
        empty = _questionable(city, [], s)
        usable = _questionable(_AGE_SRC, ["33"], s)
        payload = (f"SENTENCE: {s}\nREPLACE: {_AGE_SRC.surface()}\n"
                   f"WITH: (Taylor Swift; age; 33)")
        backend = _revision_backend([
            (payload, "Taylor Swift is 33 years old and lives in Nashville."),
        ])
        result = propose_revisions(s, [empty, usable], backend)
        assert len(result.proposals) == 1
        assert result.no_candidate == [city]

    def test_gateway_failure_does_not_abort_siblings(self):
        from factforge.errors import BackendUnavailable
        from factforge.llm import render_prompt

        good = _revision_backend([(_age_payload("34"), "Taylor Swift is 34 years old.")])
        failing_prompt = render_prompt(PromptTask.REVISION, _age_payload("33"))

        class FlakyBackend:
            def complete(self, prompt):
                if prompt == failing_prompt:
                    raise BackendUnavailable("endpoint down")
                return good.complete(prompt)

        verdict = _questionable(_AGE_SRC, ["33", "34"], _AGE_SENTENCE)
        result = propose_revisions(_AGE_SENTENCE, [verdict], FlakyBackend())
        assert [p.dest.object for p in result.proposals] == ["34"]
        assert len(result.failed) == 1 and result.failed[0][0] == _AGE_SRC

    def test_failing_checks_rejected_and_counted(self):
        verdict = _questionable(_AGE_SRC, ["33"], _AGE_SENTENCE)
        backend = _revision_backend([(_age_payload(), "Taylor Swift is 30 years old.")])
        result = propose_revisions(_AGE_SENTENCE, [verdict], backend)
        assert result.proposals == [] and result.rejected == 1

    def test_no_questionable_verdicts_is_empty_result(self):
        supported = Verdict(_AGE_SRC, VerdictLabel.STRONGLY_SUPPORTED, CharSpan(16, 18),
                            (ClassifiedEvidence(
                                build_evidence_triple(_AGE_SRC, "30", EvidenceOrigin.KG),
                                Classification.SUPPORTING, JudgeKind.DETERMINISTIC),),
                            "q?")
        result = propose_revisions(_AGE_SENTENCE, [supported], MockBackend({}))
        assert result.proposals == [] and result.no_candidate == []
