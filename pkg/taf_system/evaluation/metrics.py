"""Exact match, intent accuracy and micro slot F1."""

import logging
from dataclasses import dataclass
from itertools import zip_longest
from typing import Iterable, Sequence, Tuple

from taf_system.corpus.bio import BioSequence, bio_chunks
from taf_system.errors import LengthMismatchError
from taf_system.representation.parse_tree import ParseTree, map_tokens, serialize
from taf_system.representation.text import DEFAULT_NORMAL_FORM, normalize_text

logger = logging.getLogger(__name__)


def exact_match(pred: ParseTree, gold: ParseTree, form: str = DEFAULT_NORMAL_FORM, lowercase: bool = False) -> int:
    def canonical(tree: ParseTree) -> str:
        return serialize(map_tokens(tree, lambda t: normalize_text(t, form, lowercase)))

    return int(canonical(pred) == canonical(gold))


def intent_accuracy(pred: ParseTree, gold: ParseTree) -> int:
    return int(pred.intent == gold.intent)


@dataclass
class SlotScores:
    """Pooled chunk counts; precision, recall and F1 are derived from them."""

    correct: int = 0
    predicted: int = 0
    gold: int = 0
    skipped: int = 0

    @property
    def no_chunks(self) -> bool:
        return self.predicted == 0 and self.gold == 0

    @property
    def precision(self) -> float:
        return self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.gold if self.gold else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "SlotScores") -> "SlotScores":
        return SlotScores(self.correct + other.correct, self.predicted + other.predicted,
                          self.gold + other.gold, self.skipped + other.skipped)

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.precision, self.recall, self.f1


def chunk_counts(gold_tags: Sequence[str], pred_tags: Sequence[str]) -> SlotScores:
    if len(gold_tags) != len(pred_tags):
        raise LengthMismatchError(f"gold has {len(gold_tags)} tags, prediction {len(pred_tags)}")
    gold = set(bio_chunks(gold_tags))
    pred = set(bio_chunks(pred_tags))
    return SlotScores(len(gold & pred), len(pred), len(gold))


def slot_f1(golds: Iterable[BioSequence], preds: Iterable[BioSequence], strict: bool = False) -> SlotScores:
    """Micro-averaged chunk P/R/F1 over paired sequences.

    A chunk is correct when label, start and end all match. Pairs with
    different token counts raise in strict mode and are skipped otherwise.
    """
    scores = SlotScores()
    sentinel = object()
    for gold, pred in zip_longest(golds, preds, fillvalue=sentinel):
        if gold is sentinel or pred is sentinel:
            raise LengthMismatchError("gold and predicted streams have different lengths")
        try:
            scores = scores + chunk_counts(gold.tags, pred.tags)
        except LengthMismatchError as e:
            if strict:
                raise
            logger.warning(f"Skipping pair: {e}")
            scores.skipped += 1
    if scores.no_chunks:
        logger.warning("No gold or predicted chunks: slot F1 reported as 0")
    return scores
