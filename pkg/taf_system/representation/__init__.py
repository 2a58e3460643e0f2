from taf_system.representation.parse_tree import (
    IntentNode,
    ParseTree,
    Signature,
    SlotNode,
    extract_signature,
    leaf_slots,
    leaf_values,
    map_tokens,
    parse,
    replace_leaf_values,
    serialize,
    signatures_equal,
    slot_label_counter,
)
from taf_system.representation.text import (
    PunctuationTokenizer,
    Tokenizer,
    Utterance,
    WhitespaceTokenizer,
    collapse_whitespace,
    get_tokenizer,
    normalize_text,
)

__all__ = [
    "IntentNode",
    "ParseTree",
    "PunctuationTokenizer",
    "Signature",
    "SlotNode",
    "Tokenizer",
    "Utterance",
    "WhitespaceTokenizer",
    "collapse_whitespace",
    "extract_signature",
    "get_tokenizer",
    "leaf_slots",
    "leaf_values",
    "map_tokens",
    "normalize_text",
    "parse",
    "replace_leaf_values",
    "serialize",
    "signatures_equal",
    "slot_label_counter",
]
