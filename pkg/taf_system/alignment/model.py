"""Trained alignment parameters and their on-disk format.

File layout (UTF-8 text, tab separated)::

    #taf-alignment-model v1
    window  5
    p_null  0.2
    source  <word>            one line per source word, vocabulary order
    target  <word>
    lex     <source> <target> <probability>
    jump    <distance> <probability>
    loglik  <value>

The NULL source word is written as ``<NULL>``. Floats use ``repr`` so that a
save/load cycle is bit-exact.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

NULL_TOKEN = "<NULL>"
FORMAT_HEADER = "#taf-alignment-model v1"
DEFAULT_WINDOW = 5
DEFAULT_P_NULL = 0.2
DECODE_SMOOTHING = 1e-12


@dataclass(frozen=True, eq=False)
class AlignmentModel:
    """Lexical table t(target | source) with NULL at row 0, plus optional HMM jump table.

    ``jump[d + window]`` is the (unnormalised within a sentence) weight of a
    jump of ``d`` positions; jumps beyond the window share the extreme buckets.
    """

    source_vocab: Tuple[str, ...]
    target_vocab: Tuple[str, ...]
    lexical: np.ndarray
    jump: Optional[np.ndarray] = None
    p_null: float = DEFAULT_P_NULL
    window: int = DEFAULT_WINDOW
    log_likelihoods: Tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "source_vocab", tuple(self.source_vocab))
        object.__setattr__(self, "target_vocab", tuple(self.target_vocab))
        object.__setattr__(self, "log_likelihoods", tuple(self.log_likelihoods))
        if not self.source_vocab or self.source_vocab[0] != NULL_TOKEN:
            raise ValueError(f"source vocabulary must start with {NULL_TOKEN}")
        lexical = np.array(self.lexical, dtype=np.float64)
        if lexical.shape != (len(self.source_vocab), len(self.target_vocab)):
            raise ValueError(f"lexical table shape {lexical.shape} does not match the vocabularies")
        lexical.setflags(write=False)
        object.__setattr__(self, "lexical", lexical)
        if self.jump is not None:
            jump = np.array(self.jump, dtype=np.float64)
            if jump.shape != (2 * self.window + 1,):
                raise ValueError(f"jump table must have {2 * self.window + 1} buckets")
            jump.setflags(write=False)
            object.__setattr__(self, "jump", jump)
        if not 0.0 <= self.p_null < 1.0:
            raise ValueError(f"p_null must be in [0, 1), got {self.p_null}")
        object.__setattr__(self, "_source_index", {w: i for i, w in enumerate(self.source_vocab)})
        object.__setattr__(self, "_target_index", {w: i for i, w in enumerate(self.target_vocab)})

    @property
    def has_hmm(self) -> bool:
        return self.jump is not None

    def source_index(self) -> Dict[str, int]:
        return self._source_index

    def target_index(self) -> Dict[str, int]:
        return self._target_index

    def translation_prob(self, target: str, source: Optional[str] = None) -> float:
        """t(target | source); ``source=None`` means the NULL word."""
        row = 0 if source is None else self._source_index.get(source)
        col = self._target_index.get(target)
        if row is None or col is None:
            return 0.0
        return float(self.lexical[row, col])

    def lexical_block(self, source: Sequence[str], target: Sequence[str], smoothing: float = 0.0) -> np.ndarray:
        """Sub-table of shape (len(source) + 1, len(target)); row 0 is NULL.

        Unknown words get probability 0 before smoothing is added.
        """
        rows = np.array([0] + [self._source_index.get(w, -1) for w in source], dtype=np.int64)
        cols = np.array([self._target_index.get(w, -1) for w in target], dtype=np.int64)
        block = np.zeros((len(rows), len(cols)))
        row_mask, col_mask = rows >= 0, cols >= 0
        block[np.ix_(row_mask, col_mask)] = self.lexical[np.ix_(rows[row_mask], cols[col_mask])]
        if smoothing:
            block += smoothing
        return block

    def save(self, path: Union[str, Path]) -> None:
        """Tab-separated text; only non-zero lexical entries are written."""
        lines: List[str] = [FORMAT_HEADER, f"window\t{self.window}", f"p_null\t{self.p_null!r}"]
        lines.extend(f"source\t{w}" for w in self.source_vocab[1:])
        lines.extend(f"target\t{w}" for w in self.target_vocab)
        for i, j in zip(*np.nonzero(self.lexical)):
            lines.append(f"lex\t{self.source_vocab[i]}\t{self.target_vocab[j]}\t{float(self.lexical[i, j])!r}")
        if self.jump is not None:
            for bucket, prob in enumerate(self.jump):
                lines.append(f"jump\t{bucket - self.window}\t{float(prob)!r}")
        lines.extend(f"loglik\t{value!r}" for value in self.log_likelihoods)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Saved alignment model ({len(self.source_vocab)}x{len(self.target_vocab)}) to {path}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "AlignmentModel":
        """Inverse of :meth:`save`. Raises ValueError on a file without the format header."""
        text = Path(path).read_text(encoding="utf-8").splitlines()
        if not text or text[0] != FORMAT_HEADER:
            raise ValueError(f"{path}: not an alignment model file (missing {FORMAT_HEADER!r})")
        window, p_null = DEFAULT_WINDOW, DEFAULT_P_NULL
        source_vocab, target_vocab = [NULL_TOKEN], []
        lex_entries, jump_entries, logliks = [], [], []
        for line in text[1:]:
            if not line:
                continue
            kind, *fields = line.split("\t")
            if kind == "window":
                window = int(fields[0])
            elif kind == "p_null":
                p_null = float(fields[0])
            elif kind == "source":
                source_vocab.append(fields[0])
            elif kind == "target":
                target_vocab.append(fields[0])
            elif kind == "lex":
                lex_entries.append((fields[0], fields[1], float(fields[2])))
            elif kind == "jump":
                jump_entries.append((int(fields[0]), float(fields[1])))
            elif kind == "loglik":
                logliks.append(float(fields[0]))
            else:
                raise ValueError(f"{path}: unknown record type {kind!r}")
        source_index = {w: i for i, w in enumerate(source_vocab)}
        target_index = {w: i for i, w in enumerate(target_vocab)}
        lexical = np.zeros((len(source_vocab), len(target_vocab)))
        for source, target, prob in lex_entries:
            lexical[source_index[source], target_index[target]] = prob
        jump = None
        if jump_entries:
            jump = np.zeros(2 * window + 1)
            for distance, prob in jump_entries:
                jump[distance + window] = prob
        return cls(tuple(source_vocab), tuple(target_vocab), lexical, jump, p_null, window, tuple(logliks))
