"""Target-side filters and normalisation for projected silver data."""

from typing import AbstractSet, List, Optional, Sequence, Tuple, Union

from taf_system.projection.pos_tagger import PosTag, PosTaggedUtterance
from taf_system.projection.projector import Span, anchor_slots
from taf_system.representation.parse_tree import ParseTree, leaf_slots, replace_leaf_values
from taf_system.representation.text import DEFAULT_NORMAL_FORM, normalize_text

DEFAULT_EXEMPT_LABELS = frozenset({"DATE_TIME"})
TRIMMABLE_TAGS = frozenset({PosTag.ADP, PosTag.DET})

TURKISH_ASCII = str.maketrans("ğĞıİöÖüÜşŞçÇ", "gGiIoOuUsScC")
_TURKIC_LOWER = str.maketrans({"I": "ı", "İ": "i"})
_TURKIC_LANGUAGES = ("tr", "az")


def whitespace_tokenization_filter(raw_target: str, target_tokens: Sequence[str]) -> bool:
    """Keep iff a plain whitespace split of the raw target reproduces the tokens."""
    split = raw_target.split()
    return bool(split) and split == list(target_tokens)


def trim_spans(
    spans: Sequence[Optional[Span]],
    labels: Sequence[str],
    tags: Sequence[PosTag],
    exempt_labels: AbstractSet[str] = DEFAULT_EXEMPT_LABELS,
) -> List[Optional[Span]]:
    trimmed: List[Optional[Span]] = []
    for span, label in zip(spans, labels):
        if span is None or label in exempt_labels:
            trimmed.append(span)
            continue
        start, end = span
        while start < end and tags[start] in TRIMMABLE_TAGS:
            start += 1
        while end > start and tags[end - 1] in TRIMMABLE_TAGS:
            end -= 1
        trimmed.append((start, end) if start < end else None)
    return trimmed


def pos_trim(
    tree: ParseTree,
    target_pos: PosTaggedUtterance,
    exempt_labels: AbstractSet[str] = DEFAULT_EXEMPT_LABELS,
    spans: Optional[Sequence[Optional[Span]]] = None,
) -> ParseTree:
    """Strip prepositions and determiners from the edges of non-exempt slot values.

    ``spans`` are the target ranges of the leaf slots; when omitted the leaf
    values are located in ``target_pos.tokens``. A fully trimmed slot is left
    empty.
    """
    if spans is None:
        spans = anchor_slots(tree, target_pos.tokens)
    labels = [slot.label for slot in leaf_slots(tree)]
    trimmed = trim_spans(spans, labels, target_pos.tags, exempt_labels)
    values = [tuple(target_pos.tokens[s[0]:s[1]]) if s is not None else () for s in trimmed]
    return replace_leaf_values(tree, values)


def _postprocess_text(text: str, language: str, lowercase: bool, turkish_ascii: bool, form: str) -> str:
    text = normalize_text(text, form)
    if lowercase:
        if language.lower().replace("_", "-").split("-")[0] in _TURKIC_LANGUAGES:
            text = text.translate(_TURKIC_LOWER)
        text = normalize_text(text, form, lowercase=True)
    if turkish_ascii:
        text = text.translate(TURKISH_ASCII)
    return text


def target_postprocess(
    value: Union[str, Sequence[str]],
    language: str,
    lowercase: bool = False,
    turkish_ascii: bool = False,
    form: str = DEFAULT_NORMAL_FORM,
) -> Union[str, Tuple[str, ...]]:
    """Normalise a translation (text or token list) for training; idempotent.

    Lowercasing follows Turkic dotted/dotless i rules for tr and az.
    """
    if isinstance(value, str):
        return _postprocess_text(value, language, lowercase, turkish_ascii, form)
    return tuple(_postprocess_text(token, language, lowercase, turkish_ascii, form) for token in value)
