"""BIO-tagged sequences and their conversion to flat intent/slot trees."""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from taf_system.errors import FormatError
from taf_system.representation.parse_tree import IntentNode, ParseTree, SlotNode

OUTSIDE = "O"
_TAG_RE = re.compile(r"(?:[BI]-\S+|O)")
_LABEL_SANITIZE_RE = re.compile(r"[^A-Z0-9_.]")

# (start, end, label); end is exclusive
Chunk = Tuple[int, int, str]


def canonical_label(label: str) -> str:
    """Upper-case a dataset label and replace characters the tree grammar forbids."""
    return _LABEL_SANITIZE_RE.sub("_", label.upper()) or "_"


@dataclass(frozen=True)
class BioSequence:
    tokens: Tuple[str, ...]
    tags: Tuple[str, ...]
    intent: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.tokens) != len(self.tags):
            raise FormatError(f"{len(self.tokens)} tokens but {len(self.tags)} tags")
        for tag in self.tags:
            if not _TAG_RE.fullmatch(tag):
                raise FormatError(f"invalid BIO tag {tag!r}")

    def chunks(self) -> List[Chunk]:
        return bio_chunks(self.tags)


def bio_chunks(tags: Sequence[str]) -> List[Chunk]:
    """Maximal chunks under the lenient rule.

    An ``I-X`` that does not continue an open ``X`` chunk starts a new one.
    """
    chunks: List[Chunk] = []
    start: Optional[int] = None
    label: Optional[str] = None
    for i, tag in enumerate(tags):
        if tag == OUTSIDE:
            if start is not None:
                chunks.append((start, i, label))
            start, label = None, None
            continue
        prefix, tag_label = tag[0], tag[2:]
        if prefix == "B" or start is None or tag_label != label:
            if start is not None:
                chunks.append((start, i, label))
            start, label = i, tag_label
    if start is not None:
        chunks.append((start, len(tags), label))
    return chunks


def chunks_to_tags(length: int, chunks: Sequence[Chunk]) -> Tuple[str, ...]:
    tags = [OUTSIDE] * length
    for start, end, label in chunks:
        tags[start] = f"B-{label}"
        for i in range(start + 1, end):
            tags[i] = f"I-{label}"
    return tuple(tags)


def bio_to_tree(seq: BioSequence, original_labels: Optional[Dict[str, str]] = None) -> ParseTree:
    """Flat tree with one slot per maximal chunk, in token order.

    Labels are upper-cased; when ``original_labels`` is given it records the
    original spelling of every label that changed.
    """
    slots = []
    for start, end, label in seq.chunks():
        name = canonical_label(label)
        if original_labels is not None and name != label:
            original_labels.setdefault(name, label)
        slots.append(SlotNode(name, seq.tokens[start:end]))
    intent = canonical_label(seq.intent)
    if original_labels is not None and intent != seq.intent:
        original_labels.setdefault(intent, seq.intent)
    return ParseTree(IntentNode(intent, tuple(slots)))
