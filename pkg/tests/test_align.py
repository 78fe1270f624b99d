"""Needleman-Wunsch against an exhaustive alignment-enumeration oracle."""

import functools
import itertools

import pytest

from readkit import align


@functools.lru_cache(maxsize=None)
def brute_nw(a: str, b: str, match=2.0, mismatch=-1.0, gap=-0.5) -> float:
    """Optimal global alignment score by exhaustive recursion."""
    if not a:
        return len(b) * gap
    if not b:
        return len(a) * gap
    return max(
        brute_nw(a[1:], b[1:], match, mismatch, gap)
        + (match if a[0] == b[0] else mismatch),
        brute_nw(a[1:], b, match, mismatch, gap) + gap,
        brute_nw(a, b[1:], match, mismatch, gap) + gap,
    )


def test_nw_matches_bruteforce_exhaustive():
    alphabet = "xyz"
    seqs = [""] + ["".join(p) for n in range(1, 5)
                   for p in itertools.product(alphabet, repeat=n)]
    for a in seqs:
        for b in seqs:
            assert align.nw_score(a, b) == brute_nw(a, b)


def test_nw_identity_and_empty():
    assert align.nw_score("abcde", "abcde") == 10.0
    assert align.nw_score("", "abc") == -1.5
    assert align.nw_score("", "") == 0.0


def test_nw_counts_consistent_with_score():
    cases = [("abc", "abc"), ("abc", "axc"), ("abcd", "bd"),
             ("ab", "ba"), ("aaa", ""), ("abc", "xyz")]
    for a, b in cases:
        c = align.nw_counts(a, b)
        score = (2.0 * c.matches - 1.0 * c.mismatches
                 - 0.5 * (c.gaps_a + c.gaps_b))
        assert score == align.nw_score(a, b)
        assert c.matches + c.mismatches + c.gaps_a == len(a)
        assert c.matches + c.mismatches + c.gaps_b == len(b)


def test_concept_alignment_score_defaults():
    # all found: n matches, no misses
    assert align.concept_alignment_score("abc", "abc") == 6.0
    # one reference concept missed: one gap penalty
    assert align.concept_alignment_score("abc", "ac") == 2.0 * 2 - 0.5


def test_concept_alignment_ref_override():
    # reference sequence has 3 symbols but only 2 count as new concepts
    assert align.concept_alignment_score("abc", "abc", ref_concepts=2) == 6.0
    assert align.concept_alignment_score("abc", "ac", ref_concepts=2) == 4.0


def test_concept_alignment_mismatch_counts():
    # unmatched summary token aligned against a reference concept
    score = align.concept_alignment_score("ab", "xb")
    counts = align.nw_counts("ab", "xb")
    assert counts.matches == 1 and counts.mismatches == 1
    assert score == pytest.approx(2.0 - 1.0 - 0.5)  # one concept still missed
