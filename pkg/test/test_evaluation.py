import numpy as np
import pytest

from conftest import ALARM_PARSE
from helpers import naive_chunks, random_bio, unique_word_sentence
from taf_system.corpus import BioSequence, Example, bio_to_tree
from taf_system.errors import JoinError, LengthMismatchError
from taf_system.evaluation import (
    Grounder,
    LanguageScores,
    MetricsReport,
    aggregate,
    evaluate_corpus,
    exact_match,
    format_mean_std,
    ground_tree_to_bio,
    intent_accuracy,
    slot_f1,
)
from taf_system.representation import Utterance, parse


def _bio(tags):
    return BioSequence(tuple(f"w{i}" for i in range(len(tags))), tuple(tags))


def test_exact_match_normalizes_tokens():
    gold = parse("[IN:A [SL:X Café ] ]")
    assert exact_match(parse("[IN:A [SL:X Cafe\N{COMBINING ACUTE ACCENT} ] ]"), gold) == 1
    assert exact_match(parse("[IN:A [SL:X café ] ]"), gold) == 0
    assert exact_match(parse("[IN:A [SL:X café ] ]"), gold, lowercase=True) == 1


def test_exact_match_respects_slot_order():
    gold = parse("[IN:A [SL:X a ] [SL:Y b ] ]")
    assert exact_match(parse("[IN:A [SL:Y b ] [SL:X a ] ]"), gold) == 0
    assert intent_accuracy(parse("[IN:A [SL:Y b ] [SL:X a ] ]"), gold) == 1
    assert intent_accuracy(parse("[IN:B ]"), gold) == 0


def test_slot_f1_counts_exact_chunks():
    golds = [_bio(["B-X", "I-X", "O", "B-Y"]), _bio(["O", "B-Z"])]
    preds = [_bio(["B-X", "I-X", "O", "B-Z"]), _bio(["O", "B-Z"])]
    scores = slot_f1(golds, preds)
    assert (scores.correct, scores.predicted, scores.gold) == (2, 3, 3)
    assert scores.as_tuple() == pytest.approx((2 / 3, 2 / 3, 2 / 3))


def test_slot_f1_partial_overlap_is_wrong():
    scores = slot_f1([_bio(["B-X", "I-X"])], [_bio(["B-X", "O"])])
    assert scores.f1 == 0.0


def test_slot_f1_degenerate():
    scores = slot_f1([_bio(["O", "O"])], [_bio(["O", "O"])])
    assert scores.no_chunks
    assert scores.f1 == 0.0


def test_slot_f1_length_mismatches():
    with pytest.raises(LengthMismatchError):
        slot_f1([_bio(["O"])], [_bio(["O"]), _bio(["O"])])
    lenient = slot_f1([_bio(["B-X"]), _bio(["B-X"])], [_bio(["B-X", "O"]), _bio(["B-X"])])
    assert lenient.skipped == 1
    assert lenient.f1 == 1.0
    with pytest.raises(LengthMismatchError):
        slot_f1([_bio(["B-X"])], [_bio(["B-X", "O"])], strict=True)


def test_slot_f1_matches_set_counting():
    rng = np.random.default_rng(0)
    golds, preds = [], []
    correct = predicted = gold_total = 0
    for _ in range(500):
        length = int(rng.integers(0, 10))
        gold_tags, pred_tags = random_bio(rng, length), random_bio(rng, length)
        golds.append(_bio(gold_tags))
        preds.append(_bio(pred_tags))
        g, p = naive_chunks(gold_tags), naive_chunks(pred_tags)
        correct += len(g & p)
        predicted += len(p)
        gold_total += len(g)
    scores = slot_f1(golds, preds)
    assert (scores.correct, scores.predicted, scores.gold) == (correct, predicted, gold_total)


def test_grounding_unique_token_match():
    bio = ground_tree_to_bio(parse(ALARM_PARSE), ["set", "an", "8", "am", "alarm"])
    assert bio.tags == ("O", "O", "B-DATE_TIME", "I-DATE_TIME", "O")
    assert bio.intent == "CREATE_ALARM"


def test_grounding_substring_match_covers_tokens():
    bio = ground_tree_to_bio(parse("[IN:A [SL:TIME 8 ] ]"), ["wake", "me", "at", "8am"])
    assert bio.tags == ("O", "O", "O", "B-TIME")


def test_grounding_character_alignment_takes_closure():
    tokens = ["en", "2005", "se", "convirtió", "en", "jugador", "profesional"]
    bio = ground_tree_to_bio(parse("[IN:A [SL:X se convirtió en profesional ] ]"), tokens)
    assert bio.tags == ("O", "O", "B-X", "I-X", "I-X", "I-X", "I-X")


def test_grounding_reports_ungrounded_slots():
    result = Grounder().ground(parse("[IN:A [SL:X zzz ] [SL:Y alarm ] ]"), ["set", "an", "alarm"])
    assert result.ungrounded == ["X"]
    assert result.bio.tags == ("O", "O", "B-Y")


def test_grounding_skips_claimed_tokens():
    tree = parse("[IN:A [SL:X 8 am ] [SL:Y 8 am ] ]")
    result = Grounder().ground(tree, ["8", "am", "or", "8", "am"])
    assert result.ungrounded == []
    # neither value is unique, so both go through character alignment; X takes the later copy
    assert result.bio.chunks() == [(0, 2, "Y"), (3, 5, "X")]


def _chunked_tags(rng, length, labels=("X", "Y", "Z")):
    tags = []
    while len(tags) < length:
        if rng.random() < 0.4:
            tags.append("O")
            continue
        label = labels[int(rng.integers(len(labels)))]
        size = min(int(rng.integers(1, 4)), length - len(tags))
        tags.extend([f"B-{label}"] + [f"I-{label}"] * (size - 1))
    return tags


def test_grounding_round_trips_flat_examples():
    rng = np.random.default_rng(11)
    for _ in range(500):
        tokens = unique_word_sentence(rng, int(rng.integers(1, 12)))
        seq = BioSequence(tokens, _chunked_tags(rng, len(tokens)), "PLAY")
        assert ground_tree_to_bio(bio_to_tree(seq), tokens) == seq


def _utterance(text, language):
    return Utterance(text, tuple(text.split()), language)


def test_evaluate_corpus():
    golds = [
        Example("1", _utterance("stelle Wecker 8 am", "de"), parse(ALARM_PARSE)),
        Example("2", _utterance("stelle Wecker 8 am", "de"), parse(ALARM_PARSE)),
        Example("3", _utterance("réveil 8 am", "fr"), parse(ALARM_PARSE)),
    ]
    preds = [
        Example("1", _utterance("stelle Wecker 8 am", "de"), parse(ALARM_PARSE)),
        Example("2", _utterance("stelle Wecker 8 am", "de"), parse("[IN:CREATE_TIMER [SL:DATE_TIME 8 ] ]")),
        Example("extra", _utterance("x", "de"), parse("[IN:A ]")),
    ]
    report = evaluate_corpus(golds, preds)
    de, fr = report.per_language["de"], report.per_language["fr"]
    assert (de.exact_match, de.intent_accuracy) == (0.5, 0.5)
    assert (de.slot_precision, de.slot_recall, de.slot_f1) == pytest.approx((0.5, 0.5, 0.5))
    assert de.support == 2
    assert (fr.exact_match, fr.slot_recall, fr.missing) == (0.0, 0.0, 1)
    assert report.average_languages == ["de", "fr"]
    assert report.averages["exact_match"] == pytest.approx(0.25)
    frame = report.to_frame()
    assert list(frame["language"]) == ["de", "fr", "Avg(2)"]
    assert frame.iloc[0]["slot_f1"] == 50.0
    with pytest.raises(JoinError):
        evaluate_corpus(golds, preds, strict=True)


def test_evaluate_corpus_average_subset():
    golds = [
        Example("1", _utterance("set an 8 am alarm", "en"), parse(ALARM_PARSE)),
        Example("2", _utterance("réveil 8 am", "fr"), parse(ALARM_PARSE)),
    ]
    report = evaluate_corpus(golds, golds)
    assert report.average_languages == ["fr"]
    report = evaluate_corpus(golds, golds, average_languages=["en", "fr"])
    assert report.averages["slot_f1"] == 1.0


def _run(f1):
    scores = LanguageScores(exact_match=f1, intent_accuracy=1.0, slot_precision=f1, slot_recall=f1, slot_f1=f1,
                            support=10)
    return MetricsReport({"de": scores}, {}, ["de"])


def test_aggregate_mean_and_sample_std():
    report = aggregate([_run(0.6), _run(0.8)])
    assert report.per_language["de"].slot_f1 == pytest.approx(0.7)
    assert report.std["de"]["slot_f1"] == pytest.approx(0.1414213562)
    assert report.std["de"]["intent_accuracy"] == 0.0
    assert report.averages["slot_f1"] == pytest.approx(0.7)
    assert "70.0 ± 14.1" in report.render()
    assert report.to_record()["runs"] == 2


def test_aggregate_single_run_and_mismatched_languages():
    assert aggregate([_run(0.6)]).std["de"]["slot_f1"] == 0.0
    other = MetricsReport({"fr": LanguageScores()}, {}, ["fr"])
    with pytest.raises(ValueError):
        aggregate([_run(0.6), other])


def test_format_mean_std():
    assert format_mean_std(0.68, 0.001) == "68.0 ± 0.1"
