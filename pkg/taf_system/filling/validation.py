"""Classify filler outputs as ok, malformed, signature mismatch or hallucination."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from taf_system.errors import MalformedParseError
from taf_system.filling.instances import FillerInstance
from taf_system.representation.parse_tree import IntentNode, ParseTree, leaf_slots, parse, signatures_equal
from taf_system.representation.text import DEFAULT_NORMAL_FORM, normalize_text

logger = logging.getLogger(__name__)


class VerdictClass(str, Enum):
    """Outcome of :func:`validate_filler_output`; every class except ``ok`` is a filler error."""

    OK = "ok"
    MALFORMED = "malformed"
    SIGNATURE_MISMATCH = "signature_mismatch"
    HALLUCINATION = "hallucination"


@dataclass(frozen=True)
class FillerVerdict:
    """Verdict class, short details such as ``-LABEL`` or ``LABEL=value``, and the parsed output if any."""

    cls: VerdictClass
    details: Tuple[str, ...] = ()
    tree: Optional[ParseTree] = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.cls is VerdictClass.OK


def _slot_labels(intent: IntentNode) -> Counter:
    labels = Counter()
    for slot in intent.slots:
        labels[slot.label] += 1
        if slot.intent is not None:
            labels[f"IN:{slot.intent.label}"] += 1
            labels += _slot_labels(slot.intent)
    return labels


def _signature_details(expected: ParseTree, got: ParseTree) -> Tuple[str, ...]:
    if expected.intent != got.intent:
        return (f"IN:{expected.intent}->IN:{got.intent}",)
    want, have = _slot_labels(expected.root), _slot_labels(got.root)
    missing = [f"-{label}" for label in sorted((want - have).elements())]
    extra = [f"+{label}" for label in sorted((have - want).elements())]
    return tuple(missing + extra) or ("nesting",)


def _squash(text: str) -> str:
    return "".join(text.split())


def find_hallucinations(
    tree: ParseTree,
    utterance: str,
    case_sensitive: bool = True,
    form: str = DEFAULT_NORMAL_FORM,
    squash_whitespace: bool = False,
) -> Tuple[str, ...]:
    """Slot values that are not a contiguous substring of the utterance.

    Comparison is on normalised characters. With ``squash_whitespace`` a value
    also counts as found when it matches after removing all whitespace from
    both sides.
    """
    haystack = normalize_text(utterance, form, lowercase=not case_sensitive)
    squashed = _squash(haystack) if squash_whitespace else None
    offending = []
    for slot in leaf_slots(tree):
        if not slot.tokens:
            continue
        value = normalize_text(slot.value, form, lowercase=not case_sensitive)
        if value in haystack or (squashed is not None and _squash(value) in squashed):
            continue
        offending.append(f"{slot.label}={slot.value}")
    return tuple(offending)


def validate_filler_output(
    output: str,
    instance: FillerInstance,
    case_sensitive: bool = True,
    form: str = DEFAULT_NORMAL_FORM,
    squash_whitespace: bool = False,
) -> FillerVerdict:
    """Checks run in the order malformed, signature mismatch (slot order ignored), hallucination."""
    try:
        tree = parse(output)
    except MalformedParseError as e:
        return FillerVerdict(VerdictClass.MALFORMED, (e.reason,))
    expected = instance.signature
    if not signatures_equal(tree, expected, ignore_order=True):
        return FillerVerdict(VerdictClass.SIGNATURE_MISMATCH, _signature_details(expected, tree), tree)
    offending = find_hallucinations(tree, instance.utterance, case_sensitive, form, squash_whitespace)
    if offending:
        return FillerVerdict(VerdictClass.HALLUCINATION, offending, tree)
    return FillerVerdict(VerdictClass.OK, (), tree)
