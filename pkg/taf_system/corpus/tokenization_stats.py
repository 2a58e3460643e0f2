"""How often two tokenizations of the same examples agree, per language."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List

import pandas as pd

from taf_system.corpus.dataset import Example
from taf_system.errors import JoinError

logger = logging.getLogger(__name__)


@dataclass
class TokenizationStats:
    matched: Counter = field(default_factory=Counter)
    total: Counter = field(default_factory=Counter)
    unjoined_ids: List[str] = field(default_factory=list)

    def percentages(self) -> Dict[str, float]:
        return {lang: 100.0 * self.matched[lang] / self.total[lang] for lang in sorted(self.total)}

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"language": lang, "matched": self.matched[lang], "total": self.total[lang], "match_pct": pct}
            for lang, pct in self.percentages().items()
        ]
        return pd.DataFrame(rows, columns=["language", "matched", "total", "match_pct"])

    def to_record(self) -> Dict:
        return {
            "match_pct": {lang: round(pct, 2) for lang, pct in self.percentages().items()},
            "matched": dict(sorted(self.matched.items())),
            "total": dict(sorted(self.total.items())),
            "unjoined": len(self.unjoined_ids),
        }


def tokenization_match_stats(
    dataset_a: Iterable[Example],
    dataset_b: Iterable[Example],
    strict: bool = False,
) -> TokenizationStats:
    """Percentage of id-joined examples whose token lists are exactly equal.

    The second dataset is indexed by id; the first one is streamed.
    """
    index: Dict[str, Example] = {}
    for example in dataset_b:
        index[example.id] = example
    stats = TokenizationStats()
    seen = set()
    for example in dataset_a:
        other = index.get(example.id)
        if other is None:
            if strict:
                raise JoinError(f"id {example.id!r} only present in the first dataset")
            stats.unjoined_ids.append(example.id)
            continue
        seen.add(example.id)
        if example.utterance.tokens is None or other.utterance.tokens is None:
            raise JoinError(f"id {example.id!r} is not tokenized in both datasets")
        lang = example.language
        stats.total[lang] += 1
        if example.utterance.tokens == other.utterance.tokens:
            stats.matched[lang] += 1
    for example_id in index:
        if example_id not in seen:
            if strict:
                raise JoinError(f"id {example_id!r} only present in the second dataset")
            stats.unjoined_ids.append(example_id)
    if stats.unjoined_ids:
        logger.warning(f"{len(stats.unjoined_ids)} ids could not be joined")
    return stats
