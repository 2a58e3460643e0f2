import numpy as np
import pytest

from taf_system.alignment import NWScoring, needleman_wunsch


def _alignments(n, m):
    """Every global alignment of lengths n and m as a list of (i, j) pairs."""
    if n == 0 and m == 0:
        yield []
        return
    if n > 0 and m > 0:
        for rest in _alignments(n - 1, m - 1):
            yield rest + [(n - 1, m - 1)]
    if n > 0:
        for rest in _alignments(n - 1, m):
            yield rest + [(n - 1, None)]
    if m > 0:
        for rest in _alignments(n, m - 1):
            yield rest + [(None, m - 1)]


def _score(pairs, a, b, scoring):
    total = 0.0
    for i, j in pairs:
        if i is None or j is None:
            total += scoring.gap
        else:
            total += scoring.match if a[i] == b[j] else scoring.mismatch
    return total


def _check_alignment(pairs, n, m):
    assert [i for i, _ in pairs if i is not None] == list(range(n))
    assert [j for _, j in pairs if j is not None] == list(range(m))


def test_small_examples():
    pairs, score = needleman_wunsch("ab", "b")
    assert score == 0.0
    assert pairs == [(0, None), (1, 0)]
    assert needleman_wunsch("", "")[1] == 0.0
    assert needleman_wunsch("abc", "") == ([(0, None), (1, None), (2, None)], -3.0)


def test_traceback_prefers_up_over_left():
    pairs, score = needleman_wunsch("ab", "ba")
    assert score == -1.0
    # at the last cell the up and left moves tie
    assert pairs == [(None, 0), (0, 1), (1, None)]


def _exhaustive_best(a, b, scoring):
    """Best score over every path through the alignment lattice, without memoisation."""
    def best(n, m):
        if n == 0 and m == 0:
            return 0.0
        options = []
        if n > 0 and m > 0:
            options.append(best(n - 1, m - 1) + (scoring.match if a[n - 1] == b[m - 1] else scoring.mismatch))
        if n > 0:
            options.append(best(n - 1, m) + scoring.gap)
        if m > 0:
            options.append(best(n, m - 1) + scoring.gap)
        return max(options)
    return best(len(a), len(b))


def _random_pair(rng, max_length, alphabet="abc"):
    a = "".join(rng.choice(list(alphabet), size=int(rng.integers(0, max_length + 1))))
    b = "".join(rng.choice(list(alphabet), size=int(rng.integers(0, max_length + 1))))
    return a, b


def test_paths_are_optimal_among_enumerated_alignments():
    rng = np.random.default_rng(0)
    scoring = NWScoring()
    for _ in range(60):
        a, b = _random_pair(rng, 5)
        pairs, score = needleman_wunsch(a, b, scoring)
        _check_alignment(pairs, len(a), len(b))
        assert _score(pairs, a, b, scoring) == score
        assert score == max(_score(p, a, b, scoring) for p in _alignments(len(a), len(b)))


@pytest.mark.slow
def test_score_matches_exhaustive_oracle():
    rng = np.random.default_rng(7)
    scoring = NWScoring()
    for _ in range(200):
        a, b = _random_pair(rng, 8)
        pairs, score = needleman_wunsch(a, b, scoring)
        _check_alignment(pairs, len(a), len(b))
        assert score == _exhaustive_best(a, b, scoring)


def test_score_is_symmetric():
    rng = np.random.default_rng(3)
    for scoring in (NWScoring(), NWScoring(match=2.0, mismatch=-3.0, gap=-1.0)):
        for _ in range(200):
            a, b = _random_pair(rng, 8)
            assert needleman_wunsch(a, b, scoring)[1] == needleman_wunsch(b, a, scoring)[1]


def test_fractional_gap_penalty():
    scoring = NWScoring(1.0, -1.0, gap=-0.1)
    pairs, score = needleman_wunsch("abcdefg", "", scoring)
    assert pairs == [(i, None) for i in range(7)]
    assert score == pytest.approx(-0.7)
    assert needleman_wunsch("", "xyz", scoring)[0] == [(None, 0), (None, 1), (None, 2)]
    rng = np.random.default_rng(11)
    for _ in range(100):
        a, b = _random_pair(rng, 6)
        pairs, score = needleman_wunsch(a, b, scoring)
        _check_alignment(pairs, len(a), len(b))
        assert _score(pairs, a, b, scoring) == pytest.approx(score)
        assert score == pytest.approx(_exhaustive_best(a, b, scoring))


def test_custom_scoring_and_equality():
    scoring = NWScoring(match=2.0, mismatch=-3.0, gap=-1.0)
    pairs, score = needleman_wunsch(["Elvis", "Presley"], ["elvis"], scoring, equal=lambda x, y: x.lower() == y.lower())
    assert pairs == [(0, 0), (1, None)]
    assert score == pytest.approx(1.0)


def test_token_sequences():
    pairs, _ = needleman_wunsch(list("se convirtió"), list("convirtió"))
    matched = [(i, j) for i, j in pairs if i is not None and j is not None]
    assert matched == [(i + 3, i) for i in range(9)]
