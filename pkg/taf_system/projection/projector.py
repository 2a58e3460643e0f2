"""Project slot annotations from a source parse onto a translation through word alignments."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from taf_system.alignment.parallel_corpus import AlignmentLinks
from taf_system.errors import UnanchoredSlotError
from taf_system.representation.parse_tree import (
    ParseTree,
    is_valid_token,
    leaf_slots,
    replace_leaf_values,
    slot_label_counter,
)
from taf_system.representation.text import normalize_text

logger = logging.getLogger(__name__)

# [start, end) token range
Span = Tuple[int, int]


class RejectionReason(str, Enum):
    MISSING_TRANSLATION = "missing-translation"
    SOURCE_TOKENIZATION = "source-tokenization-mismatch"
    NON_WHITESPACE = "non-whitespace-target-tokenization"
    POS_TOKENIZATION = "pos-tokenization-mismatch"
    UNANCHORED_SOURCE_SLOT = "unanchored-source-slot"
    SPAN_SPLIT = "span-split"
    SLOT_SET = "slot-set-mismatch"
    MALFORMED_PROJECTION = "malformed-projection"


@dataclass(frozen=True)
class ProjectionOutcome:
    tree: Optional[ParseTree] = None
    rejection_reason: Optional[RejectionReason] = None
    spans: Tuple[Optional[Span], ...] = ()

    def __post_init__(self):
        if (self.tree is None) == (self.rejection_reason is None):
            raise ValueError("exactly one of tree / rejection_reason must be set")

    @property
    def accepted(self) -> bool:
        return self.tree is not None


def _occurrences(needle: Sequence[str], haystack: Sequence[str]) -> List[int]:
    n = len(needle)
    return [i for i in range(len(haystack) - n + 1) if tuple(haystack[i:i + n]) == tuple(needle)]


def anchor_slots(tree: ParseTree, source_tokens: Sequence[str]) -> List[Span]:
    """Locate every leaf slot value in the source tokens, in leaf order.

    Each value takes its first occurrence at or after the end of the previous
    anchor; failing that, the first occurrence not overlapping an earlier one.
    """
    tokens = [normalize_text(t) for t in source_tokens]
    claimed = set()
    anchors: List[Span] = []
    cursor = 0
    for slot in leaf_slots(tree):
        value = [normalize_text(t) for t in slot.tokens]
        if not value:
            raise UnanchoredSlotError(slot.label, "")
        starts = _occurrences(value, tokens)
        free = [s for s in starts if not claimed.intersection(range(s, s + len(value)))]
        after = [s for s in free if s >= cursor]
        if not free:
            raise UnanchoredSlotError(slot.label, slot.value)
        start = after[0] if after else free[0]
        span = (start, start + len(value))
        claimed.update(range(*span))
        anchors.append(span)
        cursor = span[1]
    return anchors


def project_spans(anchors: Sequence[Span], links: AlignmentLinks) -> List[Optional[Span]]:
    """Contiguous closure of the target positions aligned into each source span."""
    projected: List[Optional[Span]] = []
    for start, end in anchors:
        targets = links.targets_of(range(start, end))
        projected.append((targets[0], targets[-1] + 1) if targets else None)
    return projected


def split_spans(anchors: Sequence[Span], projected: Sequence[Optional[Span]], links: AlignmentLinks) -> List[int]:
    """Indices of slots whose projected span has an interior word aligned outside the slot."""
    split = []
    for n, (source_span, target_span) in enumerate(zip(anchors, projected)):
        if target_span is None:
            continue
        for t in range(target_span[0] + 1, target_span[1] - 1):
            if any(not source_span[0] <= s < source_span[1] for s in links.sources_of(t)):
                split.append(n)
                break
    return split


def spans_overlap(spans: Sequence[Optional[Span]]) -> bool:
    ordered = sorted(s for s in spans if s is not None)
    return any(b[0] < a[1] for a, b in zip(ordered, ordered[1:]))


def project_parse(
    source_parse: ParseTree,
    source_tokens: Sequence[str],
    target_tokens: Sequence[str],
    links: AlignmentLinks,
    anchors: Optional[Sequence[Span]] = None,
) -> ProjectionOutcome:
    """Copy the source tree shape onto the target, filling leaves with projected spans.

    Raises UnanchoredSlotError when a source slot value is not in ``source_tokens``.
    """
    if anchors is None:
        anchors = anchor_slots(source_parse, source_tokens)
    projected = project_spans(anchors, links)
    if split_spans(anchors, projected, links):
        return ProjectionOutcome(rejection_reason=RejectionReason.SPAN_SPLIT, spans=tuple(projected))
    if spans_overlap(projected):
        return ProjectionOutcome(rejection_reason=RejectionReason.SLOT_SET, spans=tuple(projected))
    values = [tuple(target_tokens[s[0]:s[1]]) if s is not None else () for s in projected]
    if not all(is_valid_token(token) for value in values for token in value):
        return ProjectionOutcome(rejection_reason=RejectionReason.MALFORMED_PROJECTION, spans=tuple(projected))
    tree = replace_leaf_values(source_parse, values)
    if slot_label_counter(tree) != slot_label_counter(source_parse):
        return ProjectionOutcome(rejection_reason=RejectionReason.SLOT_SET, spans=tuple(projected))
    return ProjectionOutcome(tree=tree, spans=tuple(projected))
