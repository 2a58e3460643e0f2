"""IBM Model 1 lexical translation table trained with EM."""

import logging
from typing import List, Tuple

import numpy as np
from tqdm import tqdm

from taf_system.alignment.model import NULL_TOKEN, AlignmentModel
from taf_system.alignment.parallel_corpus import ParallelCorpus
from taf_system.errors import EmptyCorpusError

logger = logging.getLogger(__name__)

EncodedPair = Tuple[np.ndarray, np.ndarray]


def encode_corpus(corpus: ParallelCorpus, model: AlignmentModel) -> List[EncodedPair]:
    """Map each pair to (source ids with NULL id 0 prepended, target ids)."""
    source_index, target_index = model.source_index(), model.target_index()
    return [
        (
            np.array([0] + [source_index[w] for w in src], dtype=np.int64),
            np.array([target_index[w] for w in tgt], dtype=np.int64),
        )
        for src, tgt in corpus
    ]


def _expectation(lexical: np.ndarray, encoded: List[EncodedPair]) -> Tuple[np.ndarray, float]:
    counts = np.zeros_like(lexical)
    log_likelihood = 0.0
    for src_ids, tgt_ids in encoded:
        block = lexical[np.ix_(src_ids, tgt_ids)]
        denom = block.sum(axis=0)
        # uniform alignment prior over the l + 1 source positions
        log_likelihood += float(np.log(denom).sum() - len(tgt_ids) * np.log(len(src_ids)))
        np.add.at(counts, (src_ids[:, None], tgt_ids[None, :]), block / denom)
    return counts, log_likelihood


def normalize_rows(counts: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Row-normalise expected counts; rows without counts keep their previous values."""
    totals = counts.sum(axis=1, keepdims=True)
    normalized = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    empty = totals[:, 0] == 0
    normalized[empty] = fallback[empty]
    return normalized


def ibm1_log_likelihood(model: AlignmentModel, corpus: ParallelCorpus) -> float:
    """Sum over pairs of log P(target | source) under Model 1, NULL included."""
    return _expectation(np.asarray(model.lexical), encode_corpus(corpus, model))[1]


def train_ibm1(corpus: ParallelCorpus, iterations: int = 5, progress: bool = False) -> AlignmentModel:
    """Train t(target | source) from a uniform start.

    The returned model's ``log_likelihoods`` holds the corpus log-likelihood
    of the initial table followed by the value after every iteration.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot train IBM Model 1 on an empty corpus")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    source_vocab = (NULL_TOKEN,) + tuple(corpus.source_vocabulary())
    target_vocab = tuple(corpus.target_vocabulary())
    lexical = np.full((len(source_vocab), len(target_vocab)), 1.0 / len(target_vocab))
    encoded = encode_corpus(corpus, AlignmentModel(source_vocab, target_vocab, lexical))
    logger.info(f"Training IBM Model 1 on {len(corpus)} pairs "
                f"({len(source_vocab) - 1} source / {len(target_vocab)} target words)")

    history: List[float] = []
    for iteration in tqdm(range(iterations), desc="IBM1 EM", disable=not progress):
        counts, log_likelihood = _expectation(lexical, encoded)
        history.append(log_likelihood)
        lexical = normalize_rows(counts, lexical)
        logger.debug(f"IBM1 iteration {iteration + 1}: log-likelihood {log_likelihood:.6f}")
    history.append(_expectation(lexical, encoded)[1])
    logger.info(f"IBM Model 1 done, final log-likelihood {history[-1]:.4f}")
    return AlignmentModel(source_vocab, target_vocab, lexical, log_likelihoods=tuple(history))
