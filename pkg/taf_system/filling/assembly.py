"""Turn validated filler outputs into silver training examples."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Union

import pandas as pd

from taf_system.corpus.dataset import Example, Provenance
from taf_system.filling.validation import FillerVerdict, VerdictClass
from taf_system.representation.parse_tree import ParseTree, leaf_slots, parse
from taf_system.representation.text import Utterance

logger = logging.getLogger(__name__)


class AssemblyPolicy(str, Enum):
    """``strict`` keeps only outputs with an ok verdict."""

    KEEP_ALL_PARSEABLE = "keep-all-parseable"
    STRICT = "strict"


class DropReason(str, Enum):
    MALFORMED = "malformed"
    STRICT_POLICY = "strict-policy"
    EMPTY_SLOT = "empty-slot"


@dataclass
class AssemblyReport:
    """Emitted count and per-reason drop counts of one assembly run."""

    emitted: int = 0
    dropped: Counter = field(default_factory=Counter)

    def add(self, reason: Optional[DropReason]) -> None:
        if reason is None:
            self.emitted += 1
        else:
            self.dropped[DropReason(reason)] += 1

    @property
    def total(self) -> int:
        return self.emitted + sum(self.dropped.values())

    def to_record(self) -> Dict:
        return {
            "total": self.total,
            "emitted": self.emitted,
            "dropped": {reason.value: self.dropped[reason] for reason in DropReason},
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [{"outcome": "emitted", "count": self.emitted}]
        rows.extend({"outcome": f"dropped:{reason.value}", "count": self.dropped[reason]} for reason in DropReason)
        return pd.DataFrame(rows, columns=["outcome", "count"])


def drop_reason(
    verdict: FillerVerdict,
    policy: AssemblyPolicy,
    drop_empty_slots: bool = True,
    tree: Optional[ParseTree] = None,
) -> Optional[DropReason]:
    """First reason, in the order malformed, strict policy, empty slot, to drop an output; ``None`` keeps it."""
    if verdict.cls is VerdictClass.MALFORMED:
        return DropReason.MALFORMED
    if policy is AssemblyPolicy.STRICT and not verdict.ok:
        return DropReason.STRICT_POLICY
    if drop_empty_slots and tree is not None and any(slot.is_empty for slot in leaf_slots(tree)):
        return DropReason.EMPTY_SLOT
    return None


def assemble_silver(
    translation: Utterance,
    output: str,
    verdict: FillerVerdict,
    policy: Union[str, AssemblyPolicy],
    source_example: Example,
    report: Optional[AssemblyReport] = None,
    drop_empty_slots: bool = True,
) -> Optional[Example]:
    """Silver example for a kept output, ``None`` when the output is dropped.

    Malformed outputs are always dropped; ``strict`` also drops any output
    with a defect. Outputs with unfilled slots are dropped when
    ``drop_empty_slots`` is set. The filler's slot order is kept.
    """
    policy = AssemblyPolicy(policy)
    tree = verdict.tree
    if tree is None and verdict.cls is not VerdictClass.MALFORMED:
        tree = parse(output)
    reason = drop_reason(verdict, policy, drop_empty_slots, tree)
    if report is not None:
        report.add(reason)
    if reason is not None:
        logger.debug(f"{source_example.id}@{translation.language}: dropped ({reason.value})")
        return None
    tokens = translation.tokens if translation.tokens is not None else tuple(translation.text.split())
    return Example(
        id=f"{source_example.id}@{translation.language}",
        utterance=Utterance(translation.raw, tokens, translation.language),
        parse=tree,
        split=source_example.split,
        provenance=Provenance.SILVER_TAF,
        original_labels=dict(source_example.original_labels),
    )
