import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

SentencePair = Tuple[Tuple[str, ...], Tuple[str, ...]]


def _first_seen(sentences: Iterable[Sequence[str]]) -> List[str]:
    seen: Dict[str, None] = {}
    for sentence in sentences:
        for word in sentence:
            seen.setdefault(word, None)
    return list(seen)


@dataclass(frozen=True)
class ParallelCorpus:
    """Sentence pairs (source tokens, target tokens); source is the side being projected from."""

    pairs: Tuple[SentencePair, ...]

    def __post_init__(self):
        pairs = tuple((tuple(src), tuple(tgt)) for src, tgt in self.pairs)
        for n, (src, tgt) in enumerate(pairs):
            if not src or not tgt:
                raise ValueError(f"sentence pair {n} has an empty side")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self.pairs)

    def source_vocabulary(self) -> List[str]:
        return _first_seen(src for src, _ in self.pairs)

    def target_vocabulary(self) -> List[str]:
        return _first_seen(tgt for _, tgt in self.pairs)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ParallelCorpus":
        """Read ``source tokens<TAB>target tokens`` lines."""
        pairs = []
        with Path(path).open("r", encoding="utf-8") as f:
            for line_number, line in enumerate(f, 1):
                line = line.rstrip("\r\n")
                if not line.strip():
                    continue
                source, sep, target = line.partition("\t")
                if not sep or not source.split() or not target.split():
                    raise ValueError(f"{path}:{line_number}: expected 'source<TAB>target'")
                pairs.append((tuple(source.split()), tuple(target.split())))
        logger.info(f"Read {len(pairs)} sentence pairs from {path}")
        return cls(tuple(pairs))

    def to_file(self, path: Union[str, Path]) -> None:
        """Write in the layout :meth:`from_file` reads."""
        with Path(path).open("w", encoding="utf-8") as f:
            for src, tgt in self.pairs:
                f.write(f"{' '.join(src)}\t{' '.join(tgt)}\n")


@dataclass(frozen=True)
class AlignmentLinks:
    """Hard (source index, target index) links; unlinked target words are NULL-aligned."""

    links: FrozenSet[Tuple[int, int]]
    source_length: int
    target_length: int

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(self.links))
        for s, t in self.links:
            if not (0 <= s < self.source_length and 0 <= t < self.target_length):
                raise ValueError(f"link {s}-{t} outside a {self.source_length}x{self.target_length} pair")

    @classmethod
    def identity(cls, length: int) -> "AlignmentLinks":
        return cls(frozenset((i, i) for i in range(length)), length, length)

    def sources_of(self, target_index: int) -> List[int]:
        return sorted(s for s, t in self.links if t == target_index)

    def targets_of(self, source_indices: Iterable[int]) -> List[int]:
        """Sorted target positions linked to any of ``source_indices``."""
        wanted = set(source_indices)
        return sorted({t for s, t in self.links if s in wanted})

    def to_pharaoh(self) -> str:
        """Space-separated ``s-t`` pairs, zero-based, sorted."""
        return " ".join(f"{s}-{t}" for s, t in sorted(self.links))

    @classmethod
    def from_pharaoh(cls, text: str, source_length: int, target_length: int) -> "AlignmentLinks":
        links = set()
        for item in text.split():
            s, _, t = item.partition("-")
            links.add((int(s), int(t)))
        return cls(frozenset(links), source_length, target_length)
