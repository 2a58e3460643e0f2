"""Random generators shared by the property tests."""

from typing import List, Sequence, Tuple

import numpy as np

from taf_system.representation.parse_tree import IntentNode, ParseTree, SlotNode

LABELS = ["A", "B", "C", "DATE_TIME", "FROMLOC.CITY_NAME", "Z9"]
WORDS = ["play", "some", "elvis", "8", "am", "café", "rap", "tomorrow", "ça"]


def _intent(rng: np.random.Generator, depth: int, max_depth: int, fanout: int) -> IntentNode:
    slots = []
    for _ in range(int(rng.integers(0, fanout + 1))):
        label = LABELS[int(rng.integers(len(LABELS)))]
        roll = rng.random()
        if depth < max_depth and roll < 0.25:
            slots.append(SlotNode(label, (), _intent(rng, depth + 1, max_depth, fanout)))
        elif roll < 0.35:
            slots.append(SlotNode(label))
        else:
            size = int(rng.integers(1, 4))
            slots.append(SlotNode(label, tuple(WORDS[int(i)] for i in rng.integers(len(WORDS), size=size))))
    return IntentNode(LABELS[int(rng.integers(len(LABELS)))], tuple(slots))


def random_tree(rng: np.random.Generator, max_depth: int = 4, fanout: int = 5) -> ParseTree:
    return ParseTree(_intent(rng, 1, max_depth, fanout))


def _shuffle_intent(rng: np.random.Generator, intent: IntentNode) -> IntentNode:
    slots = [
        SlotNode(s.label, s.tokens, _shuffle_intent(rng, s.intent) if s.intent is not None else None)
        for s in intent.slots
    ]
    order = rng.permutation(len(slots))
    return IntentNode(intent.label, tuple(slots[int(i)] for i in order))


def shuffle_slots(rng: np.random.Generator, tree: ParseTree) -> ParseTree:
    """Same tree with sibling slots permuted at every level."""
    return ParseTree(_shuffle_intent(rng, tree.root))


def mutate_brackets(rng: np.random.Generator, text: str) -> str:
    """Delete one bracket or insert one extra bracket, unbalancing the string."""
    brackets = [i for i, ch in enumerate(text) if ch in "[]"]
    if rng.random() < 0.5:
        i = brackets[int(rng.integers(len(brackets)))]
        return text[:i] + text[i + 1:]
    i = int(rng.integers(len(text) + 1))
    return text[:i] + ("[" if rng.random() < 0.5 else "]") + text[i:]


def random_bio(rng: np.random.Generator, length: int, labels: Sequence[str] = ("X", "Y", "Z")) -> List[str]:
    """Arbitrary tag strings, including I- tags with no opening B-."""
    tags = []
    for _ in range(length):
        roll = rng.random()
        label = labels[int(rng.integers(len(labels)))]
        tags.append("O" if roll < 0.4 else (f"B-{label}" if roll < 0.7 else f"I-{label}"))
    return tags


def naive_chunks(tags: Sequence[str]) -> set:
    """Chunk set by a direct scan, written independently of the library rule."""
    chunks = set()
    i = 0
    while i < len(tags):
        if tags[i] == "O":
            i += 1
            continue
        label = tags[i][2:]
        j = i + 1
        while j < len(tags) and tags[j] == f"I-{label}":
            j += 1
        chunks.add((i, j, label))
        i = j
    return chunks


def unique_word_sentence(rng: np.random.Generator, length: int) -> Tuple[str, ...]:
    """Sentence of distinct made-up words."""
    letters = list("abcdefghijklmnopqrstuvwxyz")
    words = set()
    while len(words) < length:
        size = int(rng.integers(2, 7))
        words.add("".join(letters[int(i)] for i in rng.integers(len(letters), size=size)))
    order = sorted(words)
    return tuple(order[int(i)] for i in rng.permutation(length))
