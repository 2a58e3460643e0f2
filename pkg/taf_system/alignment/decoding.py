"""Hard alignment links from a trained model."""

import logging
from enum import Enum
from typing import Sequence, Union

import numpy as np

from taf_system.alignment.hmm import hmm_viterbi
from taf_system.alignment.model import DECODE_SMOOTHING, AlignmentModel
from taf_system.alignment.parallel_corpus import AlignmentLinks

logger = logging.getLogger(__name__)


class DecodeMode(str, Enum):
    """Which model answers the Viterbi query."""

    MODEL1 = "model1"
    HMM = "hmm"


def viterbi_align(
    model: AlignmentModel,
    source: Sequence[str],
    target: Sequence[str],
    mode: Union[str, DecodeMode] = DecodeMode.HMM,
    smoothing: float = DECODE_SMOOTHING,
) -> AlignmentLinks:
    """Most probable alignment; ties go to the lowest source index, and a real word beats NULL."""
    mode = DecodeMode(mode)
    if not source or not target:
        return AlignmentLinks(frozenset(), len(source), len(target))
    if mode is DecodeMode.MODEL1:
        block = model.lexical_block(source, target, smoothing)
        best = np.argmax(block[1:, :], axis=0)
        best_prob = block[1:, :][best, np.arange(len(target))]
        links = {(int(s), j) for j, s in enumerate(best) if best_prob[j] >= block[0, j]}
        return AlignmentLinks(frozenset(links), len(source), len(target))
    if not model.has_hmm:
        raise ValueError("HMM decoding requested but the model has no jump table")
    path, _ = hmm_viterbi(model, source, target, smoothing)
    links = {(state, j) for j, state in enumerate(path) if state < len(source)}
    return AlignmentLinks(frozenset(links), len(source), len(target))
