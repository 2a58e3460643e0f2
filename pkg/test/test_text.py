import pytest

from taf_system.representation import (
    PunctuationTokenizer,
    Utterance,
    WhitespaceTokenizer,
    collapse_whitespace,
    get_tokenizer,
    normalize_text,
)


def test_normalize_text_composes_by_default():
    decomposed = "cafe\u0301"
    assert normalize_text(decomposed) == "caf\u00e9"
    assert len(normalize_text(decomposed)) == 4


def test_normalize_text_other_forms():
    assert normalize_text("caf\u00e9", "NFD") == "cafe\u0301"
    assert normalize_text("ﬁ", "NFKC") == "fi"


def test_normalize_text_lowercase_is_idempotent():
    text = "İSTANBUL Café"
    once = normalize_text(text, lowercase=True)
    assert normalize_text(once, lowercase=True) == once


def test_collapse_whitespace():
    assert collapse_whitespace("  set \t an\n8 am ") == "set an 8 am"


def test_utterance_text_collapses_whitespace():
    assert Utterance("set  an 8 am ").text == "set an 8 am"


def test_utterance_flags_retokenized_tokens():
    assert not Utterance("set an alarm", ("set", "an", "alarm")).retokenized
    assert Utterance("y aura-t-il", ("y", "aura", "-", "t", "-", "il")).retokenized


def test_utterance_with_tokens():
    utterance = Utterance("Jouez Elvis", language="fr").with_tokens(["Jouez", "Elvis"])
    assert utterance.tokens == ("Jouez", "Elvis")
    assert utterance.is_tokenized
    assert utterance.language == "fr"


def test_whitespace_tokenizer():
    assert WhitespaceTokenizer().tokenize(" wake me  up ") == ["wake", "me", "up"]


def test_punctuation_tokenizer_splits_hyphens_and_keeps_apostrophes():
    assert PunctuationTokenizer().tokenize("y aura-t-il du brouillard") == [
        "y", "aura", "-", "t", "-", "il", "du", "brouillard"]
    assert PunctuationTokenizer().tokenize("what's up?") == ["what's", "up", "?"]


def test_get_tokenizer():
    assert isinstance(get_tokenizer("whitespace"), WhitespaceTokenizer)
    assert isinstance(get_tokenizer("punctuation"), PunctuationTokenizer)
    with pytest.raises(ValueError):
        get_tokenizer("sentencepiece")
