"""Utterances, Unicode normalization and pluggable tokenizers."""

import re
import unicodedata
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple, Type

DEFAULT_NORMAL_FORM = "NFC"
NORMAL_FORMS = ("NFC", "NFD", "NFKC", "NFKD")


def normalize_text(text: str, form: str = DEFAULT_NORMAL_FORM, lowercase: bool = False) -> str:
    """Apply a Unicode normal form and optional lowercasing (idempotent)."""
    normalized = unicodedata.normalize(form, text)
    if lowercase:
        # lowercasing can decompose characters (e.g. dotted capital I)
        normalized = unicodedata.normalize(form, normalized.lower())
    return normalized


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class Utterance:
    raw: str
    tokens: Optional[Tuple[str, ...]] = None
    language: str = "en"
    retokenized: bool = False

    def __post_init__(self):
        if self.tokens is not None:
            object.__setattr__(self, "tokens", tuple(self.tokens))
            if " ".join(self.tokens) != collapse_whitespace(self.raw):
                object.__setattr__(self, "retokenized", True)

    @property
    def text(self) -> str:
        return collapse_whitespace(self.raw)

    @property
    def is_tokenized(self) -> bool:
        return self.tokens is not None

    def with_tokens(self, tokens: Sequence[str]) -> "Utterance":
        return replace(self, tokens=tuple(tokens), retokenized=False)


class Tokenizer(ABC):
    """Segment raw text into tokens."""

    name = "abstract"

    @abstractmethod
    def tokenize(self, text: str) -> List[str]:
        ...


class WhitespaceTokenizer(Tokenizer):
    name = "whitespace"

    def tokenize(self, text: str) -> List[str]:
        return text.split()


class PunctuationTokenizer(Tokenizer):
    """Whitespace split that also detaches punctuation marks.

    "y aura-t-il du brouillard" -> y aura - t - il du brouillard
    """

    name = "punctuation"
    _TOKEN_RE = re.compile(r"\w+(?:['’]\w+)*|[^\w\s]", re.UNICODE)

    def tokenize(self, text: str) -> List[str]:
        return self._TOKEN_RE.findall(text)


TOKENIZERS: Dict[str, Type[Tokenizer]] = {
    WhitespaceTokenizer.name: WhitespaceTokenizer,
    PunctuationTokenizer.name: PunctuationTokenizer,
}


def get_tokenizer(name: str) -> Tokenizer:
    try:
        return TOKENIZERS[name]()
    except KeyError:
        raise ValueError(f"Unknown tokenizer {name!r}, expected one of {sorted(TOKENIZERS)}") from None
