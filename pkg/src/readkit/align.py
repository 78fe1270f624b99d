"""Global (Needleman-Wunsch) sequence alignment for concept sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

MATCH_VALUE = 2.0
MISMATCH_VALUE = -1.0
GAP_PENALTY = -0.5


def nw_score(a: Sequence, b: Sequence, match: float = MATCH_VALUE,
             mismatch: float = MISMATCH_VALUE, gap: float = GAP_PENALTY) -> float:
    """Optimal global alignment score."""
    n, m = len(a), len(b)
    prev = [j * gap for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [i * gap] + [0.0] * m
        ai = a[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (match if ai == b[j - 1] else mismatch)
            cur[j] = max(diag, prev[j] + gap, cur[j - 1] + gap)
        prev = cur
    return prev[m]


@dataclass(frozen=True)
class AlignmentCounts:
    matches: int
    mismatches: int
    gaps_a: int  # symbols of `a` aligned to a gap
    gaps_b: int


def nw_counts(a: Sequence, b: Sequence, match: float = MATCH_VALUE,
              mismatch: float = MISMATCH_VALUE, gap: float = GAP_PENALTY
              ) -> AlignmentCounts:
    """Match/mismatch/gap counts of one optimal alignment.

    Traceback ties prefer the diagonal, then a gap in ``b``, then a gap
    in ``a``, which keeps the counts deterministic.
    """
    n, m = len(a), len(b)
    F = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        F[i][0] = i * gap
    for j in range(1, m + 1):
        F[0][j] = j * gap
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            diag = F[i - 1][j - 1] + (match if a[i - 1] == b[j - 1] else mismatch)
            F[i][j] = max(diag, F[i - 1][j] + gap, F[i][j - 1] + gap)
    matches = mismatches = gaps_a = gaps_b = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            diag = F[i - 1][j - 1] + (match if a[i - 1] == b[j - 1] else mismatch)
            if F[i][j] == diag:
                if a[i - 1] == b[j - 1]:
                    matches += 1
                else:
                    mismatches += 1
                i -= 1
                j -= 1
                continue
        if i > 0 and F[i][j] == F[i - 1][j] + gap:
            gaps_a += 1
            i -= 1
            continue
        gaps_b += 1
        j -= 1
    return AlignmentCounts(matches, mismatches, gaps_a, gaps_b)


def concept_alignment_score(reference: Sequence, summary: Sequence,
                            ref_concepts: int | None = None,
                            match: float = MATCH_VALUE,
                            mismatch: float = MISMATCH_VALUE,
                            gap: float = GAP_PENALTY) -> float:
    """Alignment score of a summary concept block against its reference.

    Match and mismatch counts come from the optimal global alignment;
    gaps are counted as reference concepts left unmatched (missed
    events). ``ref_concepts`` overrides the reference concept count when
    the block sequence contains concepts already credited elsewhere.
    """
    counts = nw_counts(reference, summary, match, mismatch, gap)
    total = len(reference) if ref_concepts is None else ref_concepts
    missed = max(0, total - counts.matches)
    return (match * counts.matches + mismatch * counts.mismatches + gap * missed)
