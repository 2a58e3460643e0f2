"""Map a predicted or gold tree back onto utterance tokens as BIO tags.

Slots whose value occurs exactly once in the utterance (as a token sequence,
or as a substring crossing token boundaries) are tagged first. The rest are
aligned character by character against the still untagged tokens; a token
joins the slot when more than half of its characters match slot characters.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

from taf_system.alignment.needleman_wunsch import NWScoring, needleman_wunsch
from taf_system.corpus.bio import BioSequence, Chunk, chunks_to_tags
from taf_system.representation.parse_tree import ParseTree, SlotNode, leaf_slots
from taf_system.representation.text import DEFAULT_NORMAL_FORM, normalize_text

logger = logging.getLogger(__name__)


@dataclass
class GroundingResult:
    bio: BioSequence
    ungrounded: List[str] = field(default_factory=list)


def _token_offsets(tokens: Sequence[str]) -> List[Tuple[int, int]]:
    offsets, position = [], 0
    for token in tokens:
        offsets.append((position, position + len(token)))
        position += len(token) + 1
    return offsets


def _find_all(haystack: str, needle: str) -> List[int]:
    found, start = [], haystack.find(needle)
    while start != -1:
        found.append(start)
        start = haystack.find(needle, start + 1)
    return found


def _runs(positions: Sequence[int]) -> List[Tuple[int, int]]:
    runs: List[Tuple[int, int]] = []
    for p in positions:
        if runs and runs[-1][1] == p:
            runs[-1] = (runs[-1][0], p + 1)
        else:
            runs.append((p, p + 1))
    return runs


class Grounder:
    def __init__(
        self,
        form: str = DEFAULT_NORMAL_FORM,
        lowercase: bool = False,
        scoring: NWScoring = NWScoring(),
        vote_threshold: float = 0.5,
    ):
        self.form = form
        self.lowercase = lowercase
        self.scoring = scoring
        self.vote_threshold = vote_threshold

    def _norm(self, text: str) -> str:
        return normalize_text(text, self.form, self.lowercase)

    def _unique_match(self, value: List[str], tokens: List[str], claimed: Set[int]) -> Optional[Tuple[int, int]]:
        n = len(value)
        full = [i for i in range(len(tokens) - n + 1) if tokens[i:i + n] == value]
        if len(full) == 1:
            span = (full[0], full[0] + n)
        elif full:
            return None
        else:
            partial = _find_all(" ".join(tokens), " ".join(value))
            if len(partial) != 1:
                return None
            start, end = partial[0], partial[0] + len(" ".join(value))
            covering = [i for i, (a, b) in enumerate(_token_offsets(tokens)) if a < end and b > start]
            span = (covering[0], covering[-1] + 1)
        if claimed.intersection(range(*span)):
            return None
        return span

    def _align(self, value: List[str], tokens: List[str], claimed: Set[int]) -> List[int]:
        free = [i for i in range(len(tokens)) if i not in claimed]
        if not free:
            return []
        stretch = " ".join(tokens[i] for i in free)
        owner: List[Optional[int]] = []
        for n, i in enumerate(free):
            if n:
                owner.append(None)
            owner.extend([i] * len(tokens[i]))
        slot_text = " ".join(value)
        pairs, _ = needleman_wunsch(slot_text, stretch, self.scoring)
        votes = {i: 0 for i in free}
        for a, b in pairs:
            if a is not None and b is not None and owner[b] is not None and slot_text[a] == stretch[b]:
                votes[owner[b]] += 1
        chosen = [i for i in free if tokens[i] and votes[i] > self.vote_threshold * len(tokens[i])]
        if not chosen:
            return []
        return [i for i in range(chosen[0], chosen[-1] + 1) if i not in claimed]

    def ground(self, tree: ParseTree, tokens: Sequence[str]) -> GroundingResult:
        normalized = [self._norm(t) for t in tokens]
        claimed: Set[int] = set()
        chunks: List[Chunk] = []
        pending: List[SlotNode] = []
        ungrounded: List[str] = []
        slots = [slot for slot in leaf_slots(tree) if slot.tokens]
        for slot in slots:
            span = self._unique_match([self._norm(t) for t in slot.tokens], normalized, claimed)
            if span is None:
                pending.append(slot)
                continue
            claimed.update(range(*span))
            chunks.append((span[0], span[1], slot.label))
        for slot in pending:
            positions = self._align([self._norm(t) for t in slot.tokens], normalized, claimed)
            if not positions:
                ungrounded.append(slot.label)
                continue
            claimed.update(positions)
            chunks.extend((start, end, slot.label) for start, end in _runs(positions))
        if ungrounded:
            logger.debug(f"{len(ungrounded)} slots could not be grounded: {ungrounded}")
        tags = chunks_to_tags(len(tokens), sorted(chunks))
        return GroundingResult(BioSequence(tuple(tokens), tags, tree.intent), ungrounded)


def ground_tree_to_bio(tree: ParseTree, tokens: Sequence[str], grounder: Optional[Grounder] = None) -> BioSequence:
    return (grounder or Grounder()).ground(tree, tokens).bio
