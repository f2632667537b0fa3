"""Perturbation generator and the span/label/attribution scorer."""

import random

import pytest

from factforge.bench import (
    AnnotatedInstance,
    GoldFact,
    Link,
    MatchConfig,
    load_gold_file,
    perturb,
    score,
    system_facts,
    write_gold_file,
)
from factforge.errors import InstanceMismatch, NoEligibleLink
from factforge.model import (
    CharSpan,
    Classification,
    ClassifiedEvidence,
    EvidenceOrigin,
    EvidenceTriple,
    JudgeKind,
    SentenceResult,
    Triple,
    Verdict,
    VerdictLabel,
    VerificationReport,
)
from factforge.retrieve import KgSnapshot

# Snapshot row order puts Austin before Memphis: with seed 0 the documented
# procedure picks eligible-link index 0, then candidate index 1 -> Memphis.
_CITY_SNAPSHOT = KgSnapshot((
    ("Nashville", "instance_of", "city"),
    ("Austin", "instance_of", "city"),
    ("Memphis", "instance_of", "city"),
))

_SENTENCE = "Taylor Swift moved to Nashville at the age of 14."
_NASHVILLE = Link(CharSpan(22, 31), "Nashville")


class TestPerturb:
    def test_seeded_pick_is_the_precomputed_one(self):
        inst = perturb(_SENTENCE, [_NASHVILLE], _CITY_SNAPSHOT, seed=0)
        assert inst.text == "Taylor Swift moved to Memphis at the age of 14."
        perturbed = inst.gold_facts[0]
        assert perturbed.label is VerdictLabel.QUESTIONABLE
        assert inst.text[perturbed.span.start:perturbed.span.end] == "Memphis"
        assert perturbed.evidence_keys == ("Nashville",)
        assert inst.perturbation.original == "Nashville"
        assert inst.perturbation.replacement == "Memphis"
        assert inst.perturbation.entity_type == "city"

    def test_zero_links_is_no_eligible_link(self):
        with pytest.raises(NoEligibleLink):
            perturb(_SENTENCE, [], _CITY_SNAPSHOT, seed=0)

    def test_untyped_entity_is_ineligible(self):
        snapshot = KgSnapshot((("Nashville", "population", "700000"),))
        with pytest.raises(NoEligibleLink):
            perturb(_SENTENCE, [_NASHVILLE], snapshot, seed=0)

    def test_single_candidate_is_forced(self):
        snapshot = KgSnapshot((
            ("Nashville", "instance_of", "city"),
            ("Austin", "instance_of", "city"),
        ))
        for seed in range(5):
            inst = perturb(_SENTENCE, [_NASHVILLE], snapshot, seed=seed)
            assert inst.perturbation.replacement == "Austin"

    def test_reproducible_per_seed(self):
        a = perturb(_SENTENCE, [_NASHVILLE], _CITY_SNAPSHOT, seed=7)
        b = perturb(_SENTENCE, [_NASHVILLE], _CITY_SNAPSHOT, seed=7)
        assert a == b

    def test_later_spans_shift_with_replacement_length(self):
        s = "She visited Nashville and then Austin."
        links = [Link(CharSpan(12, 21), "Nashville"), Link(CharSpan(31, 37), "Austin")]
        snapshot = KgSnapshot((
            ("Nashville", "instance_of", "city"),
            ("Memphis", "instance_of", "city"),
            ("Austin", "instance_of", "city"),
        ))
        # find a seed that perturbs the first link
        for seed in range(20):
            inst = perturb(s, links, snapshot, seed=seed)
            if inst.perturbation.original == "Nashville":
                other = inst.gold_facts[1]
                assert inst.text[other.span.start:other.span.end] == "Austin"
                assert other.label is VerdictLabel.STRONGLY_SUPPORTED
                break
        else:
            pytest.fail("no seed perturbed the first link")

    def test_disagreeing_surface_marks_questionable(self):
        s = "She visited Music City and then Austin."
        links = [Link(CharSpan(12, 22), "Nashville"), Link(CharSpan(33, 39), "Austin")]
        inst = perturb(s, links, _CITY_SNAPSHOT, seed=0)  # seed 0 perturbs Austin
        assert inst.perturbation.original == "Austin"
        aliased = inst.gold_facts[0]
        assert aliased.label is VerdictLabel.QUESTIONABLE
        assert aliased.evidence_keys == ("Nashville",)

    def test_gold_file_round_trip(self, tmp_path):
        inst = perturb(_SENTENCE, [_NASHVILLE], _CITY_SNAPSHOT, seed=0, source_id="i0")
        path = tmp_path / "gold.jsonl"
        write_gold_file([inst], str(path))
        assert load_gold_file(str(path)) == [inst]


def _verdict(span, label, evidence_objects=()):
    evidence = tuple(
        ClassifiedEvidence(
            EvidenceTriple("s", "p", obj, origin=EvidenceOrigin.KG),
            Classification.NOT_SUPPORTING if label is VerdictLabel.QUESTIONABLE
            else Classification.SUPPORTING,
            JudgeKind.DETERMINISTIC)
        for obj in evidence_objects
    )
    return Verdict(Triple("s", "p", "o"), label, span, evidence, "q?")


def _report(text, verdicts):
    return VerificationReport(text, (SentenceResult(text, tuple(verdicts)),), "digest")


def _gold_of(report):
    """Gold instance that mirrors a report exactly."""
    facts = []
    for fact in system_facts(report):
        keys = ()
        if fact.label is not VerdictLabel.STRONGLY_SUPPORTED and fact.evidence_values:
            keys = (sorted(v.as_text for v in fact.evidence_values)[0],)
        facts.append(GoldFact(fact.span, fact.label, keys))
    return AnnotatedInstance(report.passage, tuple(facts))


def _brute_force_ov(system, gold, config):
    """Independent optimal 1-to-1 matcher by exhaustive recursion."""
    from factforge.bench import _satisfies

    edges = [[gi for gi, g in enumerate(gold) if _satisfies(s, g, config)]
             for s in system]

    def best(si, used):
        if si == len(system):
            return 0
        top = best(si + 1, used)
        for gi in edges[si]:
            if gi not in used:
                top = max(top, 1 + best(si + 1, used | {gi}))
        return top

    return best(0, frozenset())


class TestScore:
    def test_perfect_agreement(self):
        text = "alpha beta gamma delta"
        report = _report(text, [
            _verdict(CharSpan(0, 5), VerdictLabel.STRONGLY_SUPPORTED, ["alpha"]),
            _verdict(CharSpan(6, 10), VerdictLabel.QUESTIONABLE, ["beta-true"]),
        ])
        result = score([report], [_gold_of(report)])
        assert result.total.precision == result.total.recall == result.total.f1 == 1.0
        for label_score in result.per_label.values():
            if label_score.gold_count:
                assert label_score.f1 == 1.0

    def test_fixed_counts_example(self):
        # |S| = 4, |G| = 5, ov = 3 -> P=0.75, R=0.6, F1~0.6667
        text = "w0 w1 w2 w3 w4 tail"
        spans = [CharSpan(3 * i, 3 * i + 2) for i in range(5)]
        report = _report(text, [
            _verdict(spans[0], VerdictLabel.STRONGLY_SUPPORTED, ["v"]),
            _verdict(spans[1], VerdictLabel.STRONGLY_SUPPORTED, ["v"]),
            _verdict(spans[2], VerdictLabel.QUESTIONABLE, ["true0"]),
            _verdict(spans[3], VerdictLabel.QUESTIONABLE, ["wrong"]),  # bad key
        ])
        gold = AnnotatedInstance(text, (
            GoldFact(spans[0], VerdictLabel.STRONGLY_SUPPORTED),
            GoldFact(spans[1], VerdictLabel.STRONGLY_SUPPORTED),
            GoldFact(spans[2], VerdictLabel.QUESTIONABLE, ("true0",)),
            GoldFact(spans[3], VerdictLabel.QUESTIONABLE, ("true1",)),
            GoldFact(spans[4], VerdictLabel.LIKELY_SUPPORTED),
        ))
        result = score([report], [gold])
        assert result.total.ov == 3
        assert result.total.precision == pytest.approx(0.75)
        assert result.total.recall == pytest.approx(0.6)
        assert result.total.f1 == pytest.approx(2 * 0.75 * 0.6 / 1.35)
        assert result.total.ov == _brute_force_ov(
            system_facts(report), gold.gold_facts, MatchConfig())

    def test_empty_system_all_zero(self):
        text = "some text"
        gold = AnnotatedInstance(text, (GoldFact(CharSpan(0, 4), VerdictLabel.QUESTIONABLE),))
        result = score([_report(text, [])], [gold])
        assert (result.total.precision, result.total.recall, result.total.f1) == (0, 0, 0)

    def test_label_mismatch_blocks_match(self):
        text = "some text"
        report = _report(text, [_verdict(CharSpan(0, 4), VerdictLabel.LIKELY_SUPPORTED, ["x"])])
        gold = AnnotatedInstance(text, (GoldFact(CharSpan(0, 4), VerdictLabel.STRONGLY_SUPPORTED),))
        assert score([report], [gold]).total.ov == 0

    def test_attribution_requires_key_equality(self):
        text = "some text"
        gold = AnnotatedInstance(text, (GoldFact(CharSpan(0, 4), VerdictLabel.QUESTIONABLE,
                                                 ("33",)),))
        good = _report(text, [_verdict(CharSpan(0, 4), VerdictLabel.QUESTIONABLE, ["33."])])
        bad = _report(text, [_verdict(CharSpan(0, 4), VerdictLabel.QUESTIONABLE, ["34"])])
        assert score([good], [gold]).total.ov == 1  # normalized equality
        assert score([bad], [gold]).total.ov == 0

    def test_jaccard_mode(self):
        text = "abcdefghij"
        report = _report(text, [_verdict(CharSpan(0, 8), VerdictLabel.STRONGLY_SUPPORTED, ["v"])])
        gold = AnnotatedInstance(text, (GoldFact(CharSpan(0, 10), VerdictLabel.STRONGLY_SUPPORTED),))
        assert score([report], [gold]).total.ov == 0
        assert score([report], [gold], MatchConfig("jaccard")).total.ov == 1

    def test_instance_mismatch(self):
        report = _report("text a", [])
        gold = AnnotatedInstance("text b", ())
        with pytest.raises(InstanceMismatch):
            score([report], [gold])
        with pytest.raises(InstanceMismatch):
            score([report], [])

    def test_sentence_offsets_with_repeated_text(self):
        text = "He won. He won."
        report = VerificationReport(text, (
            SentenceResult("He won.", (_verdict(CharSpan(3, 6), VerdictLabel.QUESTIONABLE, ["x"]),)),
            SentenceResult("He won.", (_verdict(CharSpan(3, 6), VerdictLabel.QUESTIONABLE, ["x"]),)),
        ), "digest")
        facts = system_facts(report)
        assert [f.span.start for f in facts] == [3, 11]

    def test_ov_bounded_by_counts(self):
        rng = random.Random(5)
        for _ in range(50):
            report, gold = _random_pair(rng)
            result = score([report], [gold])
            assert result.total.ov <= min(result.total.system_count, result.total.gold_count)

    def test_round_trip_property(self):
        # the empty report scores 0/0 by the stated convention, so the
        # round-trip property quantifies over reports with >=1 fact
        rng = random.Random(6)
        checked = 0
        while checked < 50:
            report, _ = _random_pair(rng)
            if not report.verdicts():
                continue
            mirrored = _gold_of(report)
            result = score([report], [mirrored])
            assert result.total.precision == 1.0 and result.total.recall == 1.0
            checked += 1

    def test_greedy_equals_brute_force_on_random_instances(self):
        rng = random.Random(9)
        for mode in ("exact", "jaccard"):
            config = MatchConfig(mode)
            for _ in range(100):
                report, gold = _random_pair(rng)
                result = score([report], [gold], config)
                expected = _brute_force_ov(system_facts(report), gold.gold_facts, config)
                assert result.total.ov == expected

    def test_table_mirrors_per_label_rows(self):
        report = _report("ab cd", [_verdict(CharSpan(0, 2), VerdictLabel.STRONGLY_SUPPORTED, ["v"])])
        result = score([report], [_gold_of(report)])
        table = result.format_table()
        for row in ("StronglySupported", "LikelySupported", "Questionable", "Total"):
            assert row in table
        assert "100.00" in table


def _random_spans(rng, n, length):
    cuts = sorted(rng.sample(range(length), min(2 * n, length - 1)))
    spans = []
    for i in range(0, len(cuts) - 1, 2):
        if cuts[i] < cuts[i + 1]:
            spans.append(CharSpan(cuts[i], cuts[i + 1]))
    return spans[:n]


def _random_pair(rng):
    """A random well-formed (report, gold) pair over one passage."""
    text = "".join(rng.choice("abcdef ") for _ in range(40)).strip() or "abc def"
    labels = list(VerdictLabel)
    sys_verdicts = [
        _verdict(span, rng.choice(labels), [rng.choice(["v1", "v2", "v3"])])
        for span in _random_spans(rng, rng.randrange(0, 7), len(text))
    ]
    gold_facts = tuple(
        GoldFact(span, rng.choice(labels),
                 (rng.choice(["v1", "v2", "v3"]),) if rng.random() < 0.7 else ())
        for span in _random_spans(rng, rng.randrange(0, 7), len(text))
    )
    return _report(text, sys_verdicts), AnnotatedInstance(text, gold_facts)
