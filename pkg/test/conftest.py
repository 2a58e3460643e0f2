from pathlib import Path

import numpy as np
import pytest

from taf_system.alignment.model import NULL_TOKEN, AlignmentModel
from taf_system.config import PipelineConfig
from taf_system.corpus.dataset import Example
from taf_system.projection.pos_tagger import LexiconPosTagger
from taf_system.representation.parse_tree import parse
from taf_system.representation.text import Utterance

REPO_ROOT = Path(__file__).resolve().parent.parent

ALARM_PARSE = "[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]"
DENTIST_PARSE = "[IN:CANCEL_REMINDER [SL:TODO [IN:CREATE_CALL [SL:CONTACT dentist ] ] ] ]"
ELVIS_PARSE = "[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME Elvis ] ]"


@pytest.fixture
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture
def alarm_example() -> Example:
    return Example(
        "alarm-1",
        Utterance("set an 8 am alarm", ("set", "an", "8", "am", "alarm"), "en"),
        parse(ALARM_PARSE),
    )


@pytest.fixture
def dentist_example() -> Example:
    return Example(
        "dentist-1",
        Utterance("cancel reminder to call dentist", ("cancel", "reminder", "to", "call", "dentist"), "en"),
        parse(DENTIST_PARSE),
    )


@pytest.fixture
def elvis_example() -> Example:
    return Example(
        "elvis-1",
        Utterance("Play some Elvis for me", ("Play", "some", "Elvis", "for", "me"), "en"),
        parse(ELVIS_PARSE),
    )


@pytest.fixture
def elvis_translation() -> Utterance:
    return Utterance("Jouez à Elvis pour moi", ("Jouez", "à", "Elvis", "pour", "moi"), "fr")


@pytest.fixture
def elvis_model() -> AlignmentModel:
    """Lexicon under which both 'à' and 'Elvis' are best explained by source 'Elvis'."""
    source = (NULL_TOKEN, "Play", "some", "Elvis", "for", "me")
    target = ("Jouez", "à", "Elvis", "pour", "moi")
    lexical = np.full((len(source), len(target)), 0.01)
    for s, t in [("Play", "Jouez"), ("Elvis", "à"), ("Elvis", "Elvis"), ("for", "pour"), ("me", "moi")]:
        lexical[source.index(s), target.index(t)] = 0.9
    lexical[0] = 0.001
    lexical = lexical / lexical.sum(axis=1, keepdims=True)
    return AlignmentModel(source, target, lexical)


@pytest.fixture
def tagger(repo_root) -> LexiconPosTagger:
    return LexiconPosTagger.from_yaml(repo_root / "config" / "pos_lexicon.yaml")


@pytest.fixture
def config() -> PipelineConfig:
    config = PipelineConfig()
    config.logging.progress = False
    return config
