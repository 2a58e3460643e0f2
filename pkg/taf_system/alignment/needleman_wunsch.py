"""Global sequence alignment with a linear gap penalty."""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

AlignedPair = Tuple[Optional[int], Optional[int]]

_DIAGONAL, _UP, _LEFT = 0, 1, 2


@dataclass(frozen=True)
class NWScoring:
    """Additive scores for a character match, a mismatch and a gap."""

    match: float = 1.0
    mismatch: float = -1.0
    gap: float = -1.0


def needleman_wunsch(
    seq_a: Sequence,
    seq_b: Sequence,
    scoring: NWScoring = NWScoring(),
    equal: Callable[[object, object], bool] = lambda x, y: x == y,
) -> Tuple[List[AlignedPair], float]:
    """Optimal global alignment of two sequences.

    Returns (index pairs, score). A pair holds an index into each sequence;
    ``None`` marks a gap. Traceback prefers diagonal, then up (gap in
    ``seq_b``), then left.
    """
    n, m = len(seq_a), len(seq_b)
    scores = np.zeros((n + 1, m + 1))
    moves = np.zeros((n + 1, m + 1), dtype=np.int8)
    scores[:, 0] = np.arange(n + 1) * scoring.gap
    scores[0, :] = np.arange(m + 1) * scoring.gap
    moves[1:, 0] = _UP
    moves[0, 1:] = _LEFT
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            step = scoring.match if equal(seq_a[i - 1], seq_b[j - 1]) else scoring.mismatch
            candidates = (scores[i - 1, j - 1] + step, scores[i - 1, j] + scoring.gap, scores[i, j - 1] + scoring.gap)
            # argmax keeps the first of tied moves: diagonal, up, left
            moves[i, j] = int(np.argmax(candidates))
            scores[i, j] = candidates[moves[i, j]]

    pairs: List[AlignedPair] = []
    i, j = n, m
    while i > 0 or j > 0:
        move = moves[i, j]
        if move == _DIAGONAL:
            pairs.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif move == _UP:
            pairs.append((i - 1, None))
            i -= 1
        else:
            pairs.append((None, j - 1))
            j -= 1
    pairs.reverse()
    return pairs, float(scores[n, m])
