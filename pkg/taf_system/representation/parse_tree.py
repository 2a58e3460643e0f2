"""Decoupled intent/slot parse trees.

The surface form is the bracketed notation used by MTOP-style datasets::

    [IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]

Intent nodes hold an ordered list of slots. A slot holds either a token span,
a nested intent, or nothing at all (the signature form, where every slot
value has been removed).
"""

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from taf_system.errors import MalformedParseError

INTENT_PREFIX = "IN:"
SLOT_PREFIX = "SL:"

_LABEL_RE = re.compile(r"[A-Z0-9_.]+")
_FORBIDDEN_TOKEN_CHARS = re.compile(r"[\s\[\]]")
# nested intents per parse; deeper input is rejected as malformed
MAX_DEPTH = 100


def is_valid_token(token: str) -> bool:
    """A slot token must be non-empty and free of whitespace and brackets."""
    return bool(token) and not _FORBIDDEN_TOKEN_CHARS.search(token)


def _check_label(label: str) -> None:
    if not label or not _LABEL_RE.fullmatch(label):
        raise MalformedParseError(f"invalid label {label!r}")


@dataclass(frozen=True)
class SlotNode:
    label: str
    tokens: Tuple[str, ...] = ()
    intent: Optional["IntentNode"] = None

    def __post_init__(self):
        _check_label(self.label)
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.tokens and self.intent is not None:
            raise MalformedParseError(f"slot SL:{self.label} holds both tokens and a nested intent")
        for token in self.tokens:
            if not is_valid_token(token):
                raise MalformedParseError(f"invalid token {token!r} in slot SL:{self.label}")

    @property
    def is_leaf(self) -> bool:
        return self.intent is None

    @property
    def is_empty(self) -> bool:
        return not self.tokens and self.intent is None

    @property
    def value(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class IntentNode:
    label: str
    slots: Tuple[SlotNode, ...] = ()

    def __post_init__(self):
        _check_label(self.label)
        object.__setattr__(self, "slots", tuple(self.slots))


@dataclass(frozen=True)
class ParseTree:
    root: IntentNode

    @property
    def intent(self) -> str:
        return self.root.label

    def __str__(self) -> str:
        return serialize(self)


# A signature is a ParseTree whose leaf slots are all empty.
Signature = ParseTree


class _Parser:
    """Recursive-descent parser over a flat list of lexemes."""

    def __init__(self, text: str):
        self.text = text
        self.lexemes = list(self._lex(text))
        self.pos = 0
        self.depth = 0

    @staticmethod
    def _lex(text: str) -> Iterator[Tuple[str, str, int]]:
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch == "]":
                yield "close", ch, i
                i += 1
                continue
            start = i + 1 if ch == "[" else i
            j = start
            while j < n and not text[j].isspace() and text[j] not in "[]":
                j += 1
            yield ("open" if ch == "[" else "word"), text[start:j], i
            i = j

    def error(self, message: str, char_offset: int) -> MalformedParseError:
        offset = len(self.text[:char_offset].encode("utf-8"))
        return MalformedParseError(message, offset)

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.lexemes[self.pos] if self.pos < len(self.lexemes) else None

    def expect_more(self) -> Tuple[str, str, int]:
        lexeme = self.peek()
        if lexeme is None:
            raise self.error("unbalanced brackets: missing ']'", len(self.text))
        return lexeme

    def label(self, raw: str, prefix: str, offset: int) -> str:
        if not raw.startswith(prefix):
            raise self.error(f"expected a {prefix} label, got {raw!r}", offset)
        name = raw[len(prefix):]
        if not name:
            raise self.error(f"empty label {raw!r}", offset)
        if not _LABEL_RE.fullmatch(name):
            raise self.error(f"invalid label {raw!r}", offset)
        return name

    def parse(self) -> ParseTree:
        if not self.lexemes:
            raise self.error("empty parse string", 0)
        kind, value, offset = self.lexemes[0]
        if kind != "open":
            raise self.error("parse must start with '['", offset)
        if not value.startswith(INTENT_PREFIX):
            raise self.error(f"root must be an intent, got {value!r}", offset)
        root = self.parse_intent()
        trailing = self.peek()
        if trailing is not None:
            raise self.error("trailing content after the root intent", trailing[2])
        return ParseTree(root)

    def parse_intent(self) -> IntentNode:
        _, value, offset = self.lexemes[self.pos]
        self.pos += 1
        label = self.label(value, INTENT_PREFIX, offset)
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error(f"intents nested deeper than {MAX_DEPTH}", offset)
        slots: List[SlotNode] = []
        while True:
            kind, value, offset = self.expect_more()
            if kind == "close":
                self.pos += 1
                self.depth -= 1
                return IntentNode(label, tuple(slots))
            if kind == "word":
                raise self.error(f"token {value!r} outside a slot in IN:{label}", offset)
            if not value.startswith(SLOT_PREFIX):
                raise self.error(f"intent IN:{label} may only contain slots, got {value!r}", offset)
            slots.append(self.parse_slot())

    def parse_slot(self) -> SlotNode:
        _, value, offset = self.lexemes[self.pos]
        self.pos += 1
        label = self.label(value, SLOT_PREFIX, offset)
        tokens: List[str] = []
        intent: Optional[IntentNode] = None
        while True:
            kind, value, offset = self.expect_more()
            if kind == "close":
                self.pos += 1
                return SlotNode(label, tuple(tokens), intent)
            if kind == "word":
                if intent is not None:
                    raise self.error(f"SL:{label} holds both a nested intent and tokens", offset)
                tokens.append(value)
                self.pos += 1
                continue
            if not value.startswith(INTENT_PREFIX):
                raise self.error(f"slot SL:{label} may only contain tokens or one intent, got {value!r}", offset)
            if tokens or intent is not None:
                raise self.error(f"SL:{label} holds both tokens and a nested intent", offset)
            intent = self.parse_intent()


def parse(text: str) -> ParseTree:
    """Parse a bracketed decoupled representation into a ParseTree."""
    return _Parser(text).parse()


def _intent_parts(intent: IntentNode) -> Iterator[str]:
    yield f"[{INTENT_PREFIX}{intent.label}"
    for slot in intent.slots:
        yield f"[{SLOT_PREFIX}{slot.label}"
        if slot.intent is not None:
            yield from _intent_parts(slot.intent)
        else:
            yield from slot.tokens
        yield "]"
    yield "]"


def serialize(tree: ParseTree) -> str:
    return " ".join(_intent_parts(tree.root))


def _empty_intent(intent: IntentNode) -> IntentNode:
    slots = tuple(
        SlotNode(slot.label, (), _empty_intent(slot.intent) if slot.intent is not None else None)
        for slot in intent.slots
    )
    return IntentNode(intent.label, slots)


def extract_signature(tree: ParseTree) -> Signature:
    """Remove every slot value, keeping intents, slot labels and nesting."""
    return ParseTree(_empty_intent(tree.root))


def _canonical(intent: IntentNode) -> str:
    children = sorted(
        f"[{SLOT_PREFIX}{slot.label} {_canonical(slot.intent) if slot.intent is not None else ''}]"
        for slot in intent.slots
    )
    return f"[{INTENT_PREFIX}{intent.label} {' '.join(children)} ]"


def signatures_equal(a: Signature, b: Signature, ignore_order: bool = True) -> bool:
    """Compare two signatures, optionally treating sibling slots as a multiset."""
    sig_a, sig_b = extract_signature(a), extract_signature(b)
    if not ignore_order:
        return sig_a == sig_b
    return _canonical(sig_a.root) == _canonical(sig_b.root)


def _walk_leaves(intent: IntentNode) -> Iterator[SlotNode]:
    for slot in intent.slots:
        if slot.intent is not None:
            yield from _walk_leaves(slot.intent)
        else:
            yield slot


def leaf_slots(tree: ParseTree) -> List[SlotNode]:
    """Leaf slots in document order, nested intents flattened."""
    return list(_walk_leaves(tree.root))


def leaf_values(tree: ParseTree) -> List[Tuple[str, ...]]:
    return [slot.tokens for slot in _walk_leaves(tree.root)]


def slot_label_counter(tree: ParseTree, non_empty_only: bool = True) -> Counter:
    return Counter(
        slot.label for slot in _walk_leaves(tree.root)
        if not non_empty_only or slot.tokens
    )


def replace_leaf_values(tree: ParseTree, values: Sequence[Sequence[str]]) -> ParseTree:
    """Rebuild the tree with new leaf token spans, in leaf order."""
    remaining = iter(values)

    def rebuild(intent: IntentNode) -> IntentNode:
        slots = []
        for slot in intent.slots:
            if slot.intent is not None:
                slots.append(SlotNode(slot.label, (), rebuild(slot.intent)))
            else:
                try:
                    tokens = tuple(next(remaining))
                except StopIteration:
                    raise ValueError("fewer values than leaf slots") from None
                slots.append(SlotNode(slot.label, tokens))
        return IntentNode(intent.label, tuple(slots))

    rebuilt = ParseTree(rebuild(tree.root))
    if next(remaining, None) is not None:
        raise ValueError("more values than leaf slots")
    return rebuilt


def map_tokens(tree: ParseTree, fn: Callable[[str], str]) -> ParseTree:
    return replace_leaf_values(tree, [tuple(fn(t) for t in value) for value in leaf_values(tree)])
