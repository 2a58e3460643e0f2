"""Coarse part-of-speech tagging for boundary trimming."""

import logging
import unicodedata
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import yaml

from taf_system.errors import ConfigError, LengthMismatchError

logger = logging.getLogger(__name__)

DEFAULT_LEXICON_PATH = Path(__file__).resolve().parents[2] / "config" / "pos_lexicon.yaml"


class PosTag(str, Enum):
    ADP = "ADP"
    DET = "DET"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


@dataclass(frozen=True)
class PosTaggedUtterance:
    tokens: Tuple[str, ...]
    tags: Tuple[PosTag, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(PosTag(t) for t in self.tags))
        if len(self.tokens) != len(self.tags):
            raise LengthMismatchError(f"{len(self.tokens)} tokens but {len(self.tags)} POS tags")


class PosTagger(ABC):
    @abstractmethod
    def tag(self, tokens: Sequence[str], language: str) -> PosTaggedUtterance:
        ...


def _is_punctuation(token: str) -> bool:
    return bool(token) and all(unicodedata.category(ch).startswith("P") for ch in token)


class LexiconPosTagger(PosTagger):
    """Closed-class word lists per language; everything else is OTHER.

    Lexicon layout: ``{language: {"ADP": [...], "DET": [...]}}``. A word in
    both lists is tagged ADP.
    """

    def __init__(self, lexicon: Mapping[str, Mapping[str, Iterable[str]]]):
        self.lexicon: Dict[str, Dict[PosTag, frozenset]] = {}
        for language, classes in lexicon.items():
            entry = {}
            for tag_name, words in (classes or {}).items():
                try:
                    tag = PosTag(tag_name.upper())
                except ValueError:
                    raise ConfigError(f"POS lexicon for {language!r} has unknown class {tag_name!r}") from None
                words = list(words or [])
                bad = [w for w in words if not isinstance(w, str)]
                if bad:
                    raise ConfigError(
                        f"POS lexicon for {language!r} {tag_name} has non-string entries {bad!r} "
                        "(quote YAML words such as 'on' or 'no')")
                entry[tag] = frozenset(w.lower() for w in words)
            self.lexicon[language] = entry

    @classmethod
    def from_yaml(cls, path: Union[str, Path] = DEFAULT_LEXICON_PATH) -> "LexiconPosTagger":
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: POS lexicon must be a mapping of languages")
        logger.info(f"Loaded POS lexicon for {len(data)} languages from {path}")
        return cls(data)

    def _classes(self, language: str) -> Dict[PosTag, frozenset]:
        if language in self.lexicon:
            return self.lexicon[language]
        # fall back from a regional tag such as fr-CA to fr
        return self.lexicon.get(language.split("-")[0].split("_")[0], {})

    def tag(self, tokens: Sequence[str], language: str) -> PosTaggedUtterance:
        classes = self._classes(language)
        adpositions = classes.get(PosTag.ADP, frozenset())
        determiners = classes.get(PosTag.DET, frozenset())
        tags = []
        for token in tokens:
            lowered = token.lower()
            if _is_punctuation(token):
                tags.append(PosTag.PUNCT)
            elif lowered in adpositions:
                tags.append(PosTag.ADP)
            elif lowered in determiners:
                tags.append(PosTag.DET)
            else:
                tags.append(PosTag.OTHER)
        return PosTaggedUtterance(tuple(tokens), tuple(tags))
