import pytest

from techne.annotate import (
    AnnotationError,
    MissingPosError,
    UnlabelableError,
    annotate_corpus,
    classify_pair,
)
from techne.corpus import Technique
from techne.evaluate import evaluate
from conftest import build_record, golden_cases


def test_golden_suite_full_agreement(golden_suite, golden_resources):
    misses = []
    for record, expected in golden_suite:
        label, trace = classify_pair(record, golden_resources)
        if label is not expected:
            misses.append((record.id, expected.value, label.value, trace.fired_rule))
    assert misses == []


def test_golden_suite_covers_every_technique(golden_suite):
    counts = {}
    for _, expected in golden_suite:
        counts[expected] = counts.get(expected, 0) + 1
    assert len(golden_suite) >= 30
    assert set(counts) == set(Technique)
    assert all(n >= 3 for n in counts.values())


def test_determinism(golden_suite, golden_resources):
    record, _ = golden_suite[0]
    first = classify_pair(record, golden_resources)
    second = classify_pair(record, golden_resources)
    assert first == second


def test_traces_name_the_fired_rule(golden_resources):
    by_id = {rec.id: (rec, exp) for rec, exp in golden_cases()}
    rec, _ = by_id["lex-plural-add"]
    label, trace = classify_pair(rec, golden_resources)
    assert label is Technique.LEX and trace.fired_rule == "lex_morph_shift"
    rec, _ = by_id["mod-band"]
    label, trace = classify_pair(rec, golden_resources)
    assert label is Technique.MOD and "low-confidence" in trace.evidence


def test_exp_red_biconditional_on_labeled_output(golden_suite, golden_resources):
    for record, _ in golden_suite:
        label, _ = classify_pair(record, golden_resources)
        assert (label is Technique.EXP) == (record.unit.source_span is None)
        assert (label is Technique.RED) == (record.unit.target_span is None)


def test_exp_red_f1_is_one_on_golden_corpus(golden_suite, golden_resources):
    golds = [expected.value for _, expected in golden_suite]
    preds = [classify_pair(rec, golden_resources)[0].value for rec, _ in golden_suite]
    labels = [t.value for t in Technique]
    report = evaluate(golds, preds, labels)
    assert report.per_class["EXP"].f1 == 1.0
    assert report.per_class["RED"].f1 == 1.0


def test_unlabelable_raises_with_near_misses(golden_resources):
    record = build_record(
        "mystery",
        [("zzz", "VERB")],
        [("qqq", "VERB")],
        (0, 1), (0, 1),
    )
    with pytest.raises(UnlabelableError) as exc_info:
        classify_pair(record, golden_resources)
    misses = exc_info.value.near_misses
    assert any(m.startswith("lit_word_for_word") for m in misses)
    assert any(m.startswith("mod_point_of_view") for m in misses)


def test_red_with_undroppable_head_is_unlabelable(golden_resources):
    record = build_record(
        "verb-gone",
        [("the", "DET"), ("dog", "NOUN"), ("runs", "VERB")],
        [("狗", "NOUN")],
        (2, 3), None,
    )
    with pytest.raises(UnlabelableError):
        classify_pair(record, golden_resources)


def _record_without_pos():
    from techne.corpus import AlignedUnit, PairRecord, Sentence, Token

    src = Sentence((Token("dog", "", 0),), "en")
    tgt = Sentence((Token("狗", "NOUN", 0),), "zh")
    unit = AlignedUnit.from_spans(src, tgt, (0, 1), (0, 1))
    return PairRecord("nopos", src, tgt, unit)


def test_missing_pos_reported(golden_resources):
    with pytest.raises(MissingPosError):
        classify_pair(_record_without_pos(), golden_resources)
    intact = build_record("pos-ok", [("dog", "NOUN")], [("狗", "NOUN")], (0, 1), (0, 1))
    assert classify_pair(intact, golden_resources)[0] is Technique.LIT


def test_both_spans_empty_rejected(golden_resources):
    record = build_record("empty", [("dog", "NOUN")], [("狗", "NOUN")], None, None)
    with pytest.raises(AnnotationError):
        classify_pair(record, golden_resources)


# ---------------------------------------------------------------------------
# corpus-level annotation


def spec_example_records():
    """The five worked classification examples, one per expected label."""
    by_id = {rec.id: rec for rec, _ in golden_cases()}
    return [
        by_id["exp-connective"],
        by_id["red-det"],
        by_id["lex-plural-drop"],
        by_id["tra-verb-noun"],
        by_id["mod-negation"],
    ]


def test_annotate_corpus_empty(golden_resources):
    labeled, report = annotate_corpus([], golden_resources)
    assert labeled == [] and report.total == 0 and report.errors == []


def test_annotate_corpus_histogram(golden_resources):
    labeled, report = annotate_corpus(spec_example_records(), golden_resources)
    assert report.label_counts == {"EXP": 1, "RED": 1, "LEX": 1, "TRA": 1, "MOD": 1}
    assert len(labeled) == 5


def test_annotate_corpus_collects_errors(golden_resources):
    records = spec_example_records()
    labeled, report = annotate_corpus(records + [_record_without_pos()], golden_resources)
    assert len(labeled) == 5
    assert [rid for rid, _ in report.errors] == ["nopos"]


def test_annotate_corpus_sorted_by_id(golden_resources):
    records = list(reversed(spec_example_records()))
    labeled, _ = annotate_corpus(records, golden_resources)
    assert [r.id for r in labeled] == sorted(r.id for r in labeled)


def test_annotate_corpus_does_not_mutate_input(golden_resources):
    records = spec_example_records()
    assert all(r.technique is None for r in records)
    annotate_corpus(records, golden_resources)
    assert all(r.technique is None for r in records)
