"""Statistical primitives: normalization, Welch's t-test, correlations,
agreement, string distance, and the per-rating gaze-feature aggregations.

The t-distribution p-value is computed via the regularized incomplete
beta function, so no statistics library is required at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConstantInput, DegenerateVariance
from .gaze_clean import AlignedFixation
from .gaze_features import fixation_features
from .types import AoiLayout, FeatureMatrix, GazeTrace, RatingLexicon

RATING_FEATURES = ("tFD", "FFD", "SFD", "LFD", "tFC")


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _pop_sd(xs: Sequence[float]) -> float:
    mu = _mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / len(xs))


def _sample_var(xs: Sequence[float]) -> float:
    mu = _mean(xs)
    return sum((x - mu) ** 2 for x in xs) / (len(xs) - 1)


# --- incomplete beta / t distribution ---

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz)."""
    max_iter = 300
    eps = 3e-16
    fpmin = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_sf(t: float, df: float) -> float:
    """One-sided survival function P(T > t) of Student's t."""
    p_two = betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return p_two / 2.0 if t >= 0 else 1.0 - p_two / 2.0


def t_p_two_sided(t: float, df: float) -> float:
    return betainc_reg(df / 2.0, 0.5, df / (df + t * t))


# --- normalization ---

def zscore_fit_apply(matrix: FeatureMatrix) -> FeatureMatrix:
    """Column-wise z-score with population SD; constant columns map to 0."""
    if matrix.n_rows < 2:
        raise ValueError("z-score needs at least two rows")
    out = FeatureMatrix(feature_names=list(matrix.feature_names))
    n_cols = len(matrix.feature_names)
    stats = []
    for j in range(n_cols):
        col = [v for v in matrix.column(j) if v is not None]
        if col:
            mu = _mean(col)
            sd = _pop_sd(col)
        else:
            mu, sd = 0.0, 0.0
        stats.append((mu, sd))
    for sid, label, row in zip(matrix.sample_ids, matrix.labels, matrix.rows):
        new_row = []
        for j, v in enumerate(row):
            if v is None:
                new_row.append(None)
                continue
            mu, sd = stats[j]
            new_row.append((v - mu) / sd if sd > 0 else 0.0)
        out.add_row(sid, new_row, label)
    return out


# --- Welch's t-test and feature selection ---

@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float


def welch_t(a: Sequence[float], b: Sequence[float]) -> WelchResult:
    if len(a) < 2 or len(b) < 2:
        raise ValueError("both samples need at least two values")
    va, vb = _sample_var(a), _sample_var(b)
    if va == 0.0 and vb == 0.0:
        raise DegenerateVariance("both samples have zero variance")
    na, nb = len(a), len(b)
    se2 = va / na + vb / nb
    t = (_mean(a) - _mean(b)) / math.sqrt(se2)
    df = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return WelchResult(t=t, df=df, p=t_p_two_sided(t, df))


def select_features(matrix: FeatureMatrix, alpha: float) -> list[int]:
    """Indices of columns whose Welch p between the two label groups < alpha.

    Degenerate columns (zero variance in both groups) are never selected.
    """
    labels = sorted({lb for lb in matrix.labels if lb is not None})
    if len(labels) != 2:
        raise ValueError("binary labels required")
    group_a = [i for i, lb in enumerate(matrix.labels) if lb == labels[0]]
    group_b = [i for i, lb in enumerate(matrix.labels) if lb == labels[1]]
    selected = []
    for j in range(len(matrix.feature_names)):
        a = [matrix.rows[i][j] for i in group_a if matrix.rows[i][j] is not None]
        b = [matrix.rows[i][j] for i in group_b if matrix.rows[i][j] is not None]
        if len(a) < 2 or len(b) < 2:
            continue
        try:
            result = welch_t(a, b)
        except DegenerateVariance:
            continue
        if result.p < alpha:
            selected.append(j)
    return selected


# --- correlations ---

def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two equally long samples")
    mx, my = _mean(x), _mean(y)
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInput("correlation undefined for constant input")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


def _average_ranks(x: Sequence[float]) -> list[float]:
    order = sorted(range(len(x)), key=lambda i: x[i])
    ranks = [0.0] * len(x)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and x[order[j + 1]] == x[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    return pearson(_average_ranks(x), _average_ranks(y))


def correlation_p(r: float, n: int) -> float:
    """Two-sided p for a correlation coefficient from n paired samples."""
    if n < 3 or abs(r) >= 1.0:
        return 0.0 if abs(r) >= 1.0 else 1.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return t_p_two_sided(t, n - 2)


# --- agreement ---

def qwk(a: Sequence[int], b: Sequence[int], categories: int) -> float:
    """Quadratic weighted kappa over ratings 1..categories."""
    if len(a) != len(b) or not a:
        raise ValueError("need two equally long non-empty rating lists")
    k = categories
    for r in list(a) + list(b):
        if not 1 <= r <= k:
            raise ValueError(f"rating {r} outside 1..{k}")
    observed = [[0.0] * k for _ in range(k)]
    for ra, rb in zip(a, b):
        observed[ra - 1][rb - 1] += 1.0
    n = float(len(a))
    row = [sum(observed[i]) for i in range(k)]
    col = [sum(observed[i][j] for i in range(k)) for j in range(k)]
    denom_scale = (k - 1) ** 2 if k > 1 else 1
    num = 0.0
    den = 0.0
    for i in range(k):
        for j in range(k):
            w = (i - j) ** 2 / denom_scale
            num += w * observed[i][j]
            den += w * row[i] * col[j] / n
    if den == 0.0:
        return 1.0  # no expected disagreement and none observed
    return 1.0 - num / den


# --- string distance ---

def levenshtein(w1: str, w2: str) -> int:
    if len(w1) < len(w2):
        w1, w2 = w2, w1
    previous = list(range(len(w2) + 1))
    for i, c1 in enumerate(w1, start=1):
        current = [i]
        for j, c2 in enumerate(w2, start=1):
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + (c1 != c2)))
        previous = current
    return previous[-1]


def levenshtein_sim(w1: str, w2: str) -> float:
    if not w1 or not w2:
        raise ValueError("both strings must be non-empty")
    sim = 1.0 - levenshtein(w1, w2) / max(len(w1), len(w2))
    return max(0.0, min(1.0, sim))


# --- per-rating gaze-feature aggregation ---

@dataclass(frozen=True)
class RatingProfile:
    factor: str
    # rating -> feature -> (mean across participants, population SD)
    per_rating: dict[int, dict[str, tuple[float, float]]]


def _word_feature_values(aligned: Sequence[AlignedFixation], layout: AoiLayout,
                         lexicon: RatingLexicon) -> dict[int, dict[int, list[float]]]:
    """rating -> feature values (indexed like RATING_FEATURES) per word."""
    fixated_words = sorted({f.word_index for f in aligned})
    buckets: dict[int, dict[int, list[float]]] = {}
    for w in fixated_words:
        lemma = layout.words[w].text.lower()
        rating = lexicon.entries.get(lemma)
        if rating is None:  # out-of-rating word
            continue
        feats = fixation_features(aligned, lambda f, w=w: f.word_index == w)
        bucket = buckets.setdefault(rating, {i: [] for i in range(len(RATING_FEATURES))})
        for i, name in enumerate(RATING_FEATURES):
            bucket[i].append(feats[name])
    return buckets


def rating_feature_means(participants: Sequence[Sequence[AlignedFixation]],
                         lexicon: RatingLexicon, layout: AoiLayout) -> RatingProfile:
    """Per rating bucket: per-participant feature means, then mean and SD
    across participants. Buckets with no matched words are absent.
    """
    per_rating_participant: dict[int, dict[int, list[float]]] = {}
    for aligned in participants:
        buckets = _word_feature_values(aligned, layout, lexicon)
        for rating, by_feat in buckets.items():
            dest = per_rating_participant.setdefault(
                rating, {i: [] for i in range(len(RATING_FEATURES))})
            for i, values in by_feat.items():
                if values:
                    dest[i].append(_mean(values))
    profile: dict[int, dict[str, tuple[float, float]]] = {}
    for rating, by_feat in sorted(per_rating_participant.items()):
        entry = {}
        for i, name in enumerate(RATING_FEATURES):
            means = by_feat[i]
            if means:
                entry[name] = (_mean(means), _pop_sd(means))
        if entry:
            profile[rating] = entry
    return RatingProfile(factor=lexicon.factor.value, per_rating=profile)


def rating_correlation(participants: Sequence[Sequence[AlignedFixation]],
                       lexicon: RatingLexicon, layout: AoiLayout,
                       feature: str = "tFD",
                       sort_means: bool = False) -> tuple[float, float]:
    """Correlate cross-participant per-rating feature totals with 1..scale.

    With ``sort_means`` the mean list is ascending-sorted before
    correlating, which reproduces the published aggregation verbatim but
    biases r toward +1; the default correlates the unsorted means.
    """
    feat_idx = RATING_FEATURES.index(feature)
    scale = list(range(1, lexicon.scale_points + 1))
    totals_per_participant = []
    for aligned in participants:
        totals = dict.fromkeys(scale, 0.0)
        buckets = _word_feature_values(aligned, layout, lexicon)
        for rating, by_feat in buckets.items():
            totals[rating] = sum(by_feat[feat_idx])
        totals_per_participant.append([totals[r] for r in scale])
    means = [_mean([row[i] for row in totals_per_participant])
             for i in range(len(scale))]
    if sort_means:
        means = sorted(means)
    r = pearson(means, [float(s) for s in scale])
    return r, correlation_p(r, len(scale))
