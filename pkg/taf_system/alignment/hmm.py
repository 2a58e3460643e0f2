"""HMM word alignment with NULL shadow states.

States for a source sentence of length l are the l source positions followed
by l NULL shadows. Shadow i emits from the NULL word and remembers position i,
so the next jump is measured from i. Transitions::

    real/shadow i' -> real i     (1 - p_null) * c(clip(i - i')) / sum_k c(clip(k - i'))
    real/shadow i' -> shadow i'  p_null

The first target word starts uniformly: (1 - p_null) / l on every real state
and p_null / l on every shadow.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from taf_system.alignment.ibm1 import normalize_rows
from taf_system.alignment.model import DEFAULT_P_NULL, DEFAULT_WINDOW, AlignmentModel
from taf_system.alignment.parallel_corpus import ParallelCorpus
from taf_system.errors import DegenerateInitError, EmptyCorpusError

logger = logging.getLogger(__name__)

INIT_FLOOR = 1e-12
JUMP_FLOOR = 1e-12
_BACKTRACK_STEPS = 12


def jump_buckets(length: int, window: int) -> np.ndarray:
    """Bucket index of every (previous position, next position) jump."""
    positions = np.arange(length)
    return np.clip(positions[None, :] - positions[:, None], -window, window) + window


def transition_matrix(jump: np.ndarray, length: int, window: int, p_null: float) -> np.ndarray:
    """(2l, 2l) state transitions.

    States 0..l-1 are source words, l..2l-1 their NULL shadows. Leaving either
    copy of position i uses the same jump row; the NULL shadow of i is entered
    with probability ``p_null``.
    """
    weights = jump[jump_buckets(length, window)]
    real = weights / weights.sum(axis=1, keepdims=True)
    matrix = np.zeros((2 * length, 2 * length))
    matrix[:length, :length] = (1.0 - p_null) * real
    matrix[length:, :length] = (1.0 - p_null) * real
    diagonal = np.arange(length)
    matrix[diagonal, length + diagonal] = p_null
    matrix[length + diagonal, length + diagonal] = p_null
    return matrix


def initial_distribution(length: int, p_null: float) -> np.ndarray:
    """Uniform start over real words, ``p_null`` of the mass on the shadows."""
    return np.concatenate([np.full(length, (1.0 - p_null) / length), np.full(length, p_null / length)])


def emission_matrix(block: np.ndarray) -> np.ndarray:
    """(target positions, 2l states) emissions from a lexical block whose row 0 is NULL."""
    length = block.shape[0] - 1
    real = block[1:, :].T
    null = np.repeat(block[:1, :].T, length, axis=1)
    return np.hstack([real, null])


def forward_backward(initial: np.ndarray, transitions: np.ndarray, emissions: np.ndarray):
    """Scaled forward-backward.

    Returns state posteriors (m, N), summed expected transitions (N, N) and
    the sentence log-likelihood.
    """
    m, n_states = emissions.shape
    alpha = np.zeros((m, n_states))
    scale = np.zeros(m)
    current = initial * emissions[0]
    scale[0] = current.sum()
    alpha[0] = current / scale[0]
    for j in range(1, m):
        current = (alpha[j - 1] @ transitions) * emissions[j]
        scale[j] = current.sum()
        alpha[j] = current / scale[j]
    beta = np.ones((m, n_states))
    for j in range(m - 2, -1, -1):
        beta[j] = transitions @ (emissions[j + 1] * beta[j + 1]) / scale[j + 1]
    posteriors = alpha * beta
    expected = np.zeros((n_states, n_states))
    for j in range(1, m):
        expected += np.outer(alpha[j - 1], emissions[j] * beta[j]) * transitions / scale[j]
    return posteriors, expected, float(np.log(scale).sum())


def _jump_objective(jump: np.ndarray, stats: Dict[int, np.ndarray], window: int) -> float:
    """Expected complete-data log-likelihood of the jump parameters."""
    total = 0.0
    for length in sorted(stats):
        counts = stats[length]
        weights = jump[jump_buckets(length, window)]
        log_probs = np.log(weights) - np.log(weights.sum(axis=1, keepdims=True))
        total += float(np.where(counts > 0, counts * log_probs, 0.0).sum())
    return total


def _update_jump(jump: np.ndarray, stats: Dict[int, np.ndarray], window: int) -> np.ndarray:
    """Generalised M-step for the jump table.

    The count-normalised proposal is not the exact maximiser once jumps are
    renormalised per sentence, so it is only accepted (possibly shrunk
    toward the current table) when the objective does not decrease.
    """
    bucket_counts = np.zeros_like(jump)
    for length in sorted(stats):
        np.add.at(bucket_counts, jump_buckets(length, window).ravel(), stats[length].ravel())
    proposal = (bucket_counts + JUMP_FLOOR) / (bucket_counts + JUMP_FLOOR).sum()
    baseline = _jump_objective(jump, stats, window)
    step = 1.0
    for _ in range(_BACKTRACK_STEPS):
        candidate = (1.0 - step) * jump + step * proposal
        if _jump_objective(candidate, stats, window) >= baseline:
            return candidate
        step /= 2.0
    return jump


def _extend_init(init: AlignmentModel, corpus: ParallelCorpus) -> Tuple[Tuple[str, ...], Tuple[str, ...], np.ndarray]:
    """Grow the init vocabularies with corpus words the init model has never seen."""
    source_vocab = list(init.source_vocab)
    target_vocab = list(init.target_vocab)
    known_source, known_target = set(source_vocab), set(target_vocab)
    for word in corpus.source_vocabulary():
        if word not in known_source:
            source_vocab.append(word)
            known_source.add(word)
    for word in corpus.target_vocabulary():
        if word not in known_target:
            target_vocab.append(word)
            known_target.add(word)
    lexical = np.zeros((len(source_vocab), len(target_vocab)))
    lexical[: len(init.source_vocab), : len(init.target_vocab)] = init.lexical
    return tuple(source_vocab), tuple(target_vocab), lexical


def _sentence_statistics(
    lexical: np.ndarray,
    jump: np.ndarray,
    src_ids: np.ndarray,
    tgt_ids: np.ndarray,
    window: int,
    p_null: float,
):
    length = len(src_ids) - 1
    block = lexical[np.ix_(src_ids, tgt_ids)]
    block = np.where(block > 0, block, INIT_FLOOR)
    return forward_backward(
        initial_distribution(length, p_null),
        transition_matrix(jump, length, window, p_null),
        emission_matrix(block),
    )


def hmm_log_likelihood(model: AlignmentModel, corpus: ParallelCorpus) -> float:
    """Corpus log-likelihood under the HMM; every word must be in the model vocabulary."""
    source_index, target_index = model.source_index(), model.target_index()
    total = 0.0
    for src, tgt in corpus:
        src_ids = np.array([0] + [source_index[w] for w in src], dtype=np.int64)
        tgt_ids = np.array([target_index[w] for w in tgt], dtype=np.int64)
        total += _sentence_statistics(model.lexical, model.jump, src_ids, tgt_ids, model.window, model.p_null)[2]
    return total


def train_hmm(
    corpus: ParallelCorpus,
    iterations: int = 5,
    init: Optional[AlignmentModel] = None,
    window: int = DEFAULT_WINDOW,
    p_null: float = DEFAULT_P_NULL,
    smooth_init: bool = True,
    progress: bool = False,
) -> AlignmentModel:
    """Train lexical and jump parameters with forward-backward EM.

    ``init`` supplies the starting lexical table (normally IBM Model 1
    output). Word pairs the init table gives zero probability are floored to
    a tiny constant, or rejected with DegenerateInitError when
    ``smooth_init`` is off. ``log_likelihoods`` on the result lists the corpus
    log-likelihood before training and after every iteration.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("cannot train an HMM aligner on an empty corpus")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if init is None:
        raise DegenerateInitError("HMM training needs an initial lexical table")
    source_vocab, target_vocab, lexical = _extend_init(init, corpus)
    source_index = {w: i for i, w in enumerate(source_vocab)}
    target_index = {w: i for i, w in enumerate(target_vocab)}
    encoded = [
        (np.array([0] + [source_index[w] for w in src], dtype=np.int64),
         np.array([target_index[w] for w in tgt], dtype=np.int64))
        for src, tgt in corpus
    ]
    zero_pairs = sum(int((lexical[np.ix_(s, t)] == 0).sum()) for s, t in encoded)
    if zero_pairs:
        if not smooth_init:
            raise DegenerateInitError(f"{zero_pairs} observed word pairs have zero initial probability")
        logger.warning(f"Flooring {zero_pairs} zero-probability observed word pairs to {INIT_FLOOR}")
    if init.jump is not None and init.window == window:
        jump = np.array(init.jump)
    else:
        jump = np.full(2 * window + 1, 1.0 / (2 * window + 1))
    logger.info(f"Training HMM aligner on {len(corpus)} pairs (window={window}, p_null={p_null})")

    history: List[float] = []
    for iteration in tqdm(range(iterations), desc="HMM EM", disable=not progress):
        counts = np.zeros_like(lexical)
        stats: Dict[int, np.ndarray] = {}
        log_likelihood = 0.0
        for src_ids, tgt_ids in encoded:
            length = len(src_ids) - 1
            posteriors, expected, sentence_ll = _sentence_statistics(
                lexical, jump, src_ids, tgt_ids, window, p_null)
            log_likelihood += sentence_ll
            np.add.at(counts, (src_ids[1:, None], tgt_ids[None, :]), posteriors[:, :length].T)
            np.add.at(counts, (np.zeros_like(tgt_ids), tgt_ids), posteriors[:, length:].sum(axis=1))
            into_real = expected[:length, :length] + expected[length:, :length]
            stats[length] = stats[length] + into_real if length in stats else into_real
        history.append(log_likelihood)
        lexical = normalize_rows(counts, lexical)
        jump = _update_jump(jump, stats, window)
        logger.debug(f"HMM iteration {iteration + 1}: log-likelihood {log_likelihood:.6f}")

    model = AlignmentModel(source_vocab, target_vocab, lexical, jump, p_null, window)
    history.append(hmm_log_likelihood(model, corpus))
    logger.info(f"HMM aligner done, final log-likelihood {history[-1]:.4f}")
    return AlignmentModel(source_vocab, target_vocab, lexical, jump, p_null, window, tuple(history))


def hmm_posteriors(model: AlignmentModel, source: Sequence[str], target: Sequence[str], smoothing: float) -> np.ndarray:
    """Alignment posteriors of shape (l + 1, m); row 0 collects the NULL shadows."""
    length = len(source)
    block = model.lexical_block(source, target, smoothing)
    posteriors, _, _ = forward_backward(
        initial_distribution(length, model.p_null),
        transition_matrix(model.jump, length, model.window, model.p_null),
        emission_matrix(block),
    )
    return np.vstack([posteriors[:, length:].sum(axis=1)[None, :], posteriors[:, :length].T])


def hmm_viterbi(model: AlignmentModel, source: Sequence[str], target: Sequence[str], smoothing: float):
    """Best state path and its log score. States >= len(source) are NULL shadows."""
    length, m = len(source), len(target)
    block = model.lexical_block(source, target, smoothing)
    with np.errstate(divide="ignore"):
        log_init = np.log(initial_distribution(length, model.p_null))
        log_trans = np.log(transition_matrix(model.jump, length, model.window, model.p_null))
        log_emit = np.log(emission_matrix(block))
    delta = log_init + log_emit[0]
    back = np.zeros((m, 2 * length), dtype=np.int64)
    for j in range(1, m):
        scores = delta[:, None] + log_trans
        # argmax keeps the lowest previous state on ties
        back[j] = np.argmax(scores, axis=0)
        delta = scores[back[j], np.arange(2 * length)] + log_emit[j]
    state = int(np.argmax(delta))
    best = float(delta[state])
    path = [state]
    for j in range(m - 1, 0, -1):
        state = int(back[j, state])
        path.append(state)
    return path[::-1], best
