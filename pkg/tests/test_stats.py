"""Statistics against scipy oracles plus worked fixtures."""

import math
import random

import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from readkit import stats
from readkit.errors import ConstantInput, DegenerateVariance
from readkit.types import FeatureMatrix


# --- z-score ---

def test_zscore_population_sd():
    matrix = FeatureMatrix(feature_names=["f"])
    for i, v in enumerate([1.0, 2.0, 3.0]):
        matrix.add_row(f"s{i}", [v])
    out = stats.zscore_fit_apply(matrix)
    values = [row[0] for row in out.rows]
    expected = 1.0 / math.sqrt(2.0 / 3.0)  # population SD of [1,2,3]
    assert values == pytest.approx([-expected, 0.0, expected])


def test_zscore_constant_column_zero():
    matrix = FeatureMatrix(feature_names=["f"])
    for i in range(3):
        matrix.add_row(f"s{i}", [7.0])
    out = stats.zscore_fit_apply(matrix)
    assert [row[0] for row in out.rows] == [0.0, 0.0, 0.0]


# --- Welch ---

def test_welch_fixture():
    result = stats.welch_t([9.0, 10.0, 11.0], [0.0, 1.0, 2.0])
    oracle = scipy.stats.ttest_ind([9, 10, 11], [0, 1, 2], equal_var=False)
    assert result.t == pytest.approx(oracle.statistic, abs=1e-9)
    assert result.p == pytest.approx(oracle.pvalue, abs=1e-9)
    assert result.df == pytest.approx(4.0)


def test_welch_degenerate():
    with pytest.raises(DegenerateVariance):
        stats.welch_t([1.0, 1.0], [2.0, 2.0])


def test_welch_random_against_scipy():
    rng = random.Random(7)
    for _ in range(50):
        a = [rng.gauss(0, 1) for _ in range(rng.randint(3, 12))]
        b = [rng.gauss(0.5, 2) for _ in range(rng.randint(3, 12))]
        result = stats.welch_t(a, b)
        oracle = scipy.stats.ttest_ind(a, b, equal_var=False)
        assert result.t == pytest.approx(oracle.statistic, abs=1e-6)
        assert result.p == pytest.approx(oracle.pvalue, abs=1e-6)


def test_t_p_matches_scipy():
    rng = random.Random(11)
    for _ in range(50):
        t = rng.uniform(-6, 6)
        df = rng.uniform(1.0, 40.0)
        assert stats.t_p_two_sided(t, df) == pytest.approx(
            2.0 * scipy.stats.t.sf(abs(t), df), abs=1e-9)
        assert stats.t_sf(t, df) == pytest.approx(
            scipy.stats.t.sf(t, df), abs=1e-9)


# --- selection ---

def test_select_features_alpha():
    rng = random.Random(3)
    matrix = FeatureMatrix(feature_names=["signal", "noise", "flat"])
    for i in range(20):
        label = "high" if i < 10 else "low"
        signal = (5.0 if label == "high" else 0.0) + rng.gauss(0, 0.3)
        matrix.add_row(f"s{i}", [signal, rng.gauss(0, 1), 1.0], label)
    selected = stats.select_features(matrix, alpha=0.01)
    assert 0 in selected          # strong group difference
    assert 2 not in selected      # degenerate column never selected


# --- correlations ---

def test_pearson_fixture():
    assert stats.pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5)


def test_pearson_constant_raises():
    with pytest.raises(ConstantInput):
        stats.pearson([1, 1, 1], [1, 2, 3])


def test_spearman_fixture():
    x = [1, 2, 3, 4, 5]
    y = [2, 1, 4, 3, 5]
    oracle = scipy.stats.spearmanr(x, y).statistic
    assert stats.spearman(x, y) == pytest.approx(oracle)
    assert oracle == pytest.approx(0.8)  # 1 - 6*4/(5*24)


def test_correlations_random_against_scipy():
    rng = random.Random(13)
    for _ in range(50):
        n = rng.randint(4, 15)
        x = [rng.gauss(0, 1) for _ in range(n)]
        y = [0.5 * v + rng.gauss(0, 1) for v in x]
        assert stats.pearson(x, y) == pytest.approx(
            scipy.stats.pearsonr(x, y).statistic, abs=1e-6)
        assert stats.spearman(x, y) == pytest.approx(
            scipy.stats.spearmanr(x, y).statistic, abs=1e-6)
        r = stats.pearson(x, y)
        assert stats.correlation_p(r, n) == pytest.approx(
            scipy.stats.pearsonr(x, y).pvalue, abs=1e-6)


# --- QWK ---

def test_qwk_perfect_and_reversal():
    a = [1, 2, 3, 4, 5]
    assert stats.qwk(a, a, 5) == 1.0
    assert stats.qwk(a, a[::-1], 5) == pytest.approx(-1.0)


def test_qwk_degenerate_marginals():
    assert stats.qwk([2, 2], [2, 2], 5) == 1.0


def test_qwk_random_against_sklearn():
    from sklearn.metrics import cohen_kappa_score

    rng = random.Random(17)
    for _ in range(50):
        n = rng.randint(5, 30)
        a = [rng.randint(1, 4) for _ in range(n)]
        b = [rng.randint(1, 4) for _ in range(n)]
        oracle = cohen_kappa_score(a, b, weights="quadratic",
                                   labels=[1, 2, 3, 4])
        if math.isnan(oracle):
            continue
        assert stats.qwk(a, b, 4) == pytest.approx(oracle, abs=1e-9)


# --- Levenshtein ---

def brute_levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        brute_levenshtein(a[1:], b[1:]) + (a[0] != b[0]),
        brute_levenshtein(a[1:], b) + 1,
        brute_levenshtein(a, b[1:]) + 1,
    )


@given(st.text(alphabet="abc", max_size=6), st.text(alphabet="abc", max_size=6))
@settings(max_examples=100, deadline=None)
def test_levenshtein_matches_bruteforce(a, b):
    assert stats.levenshtein(a, b) == brute_levenshtein(a, b)


def test_levenshtein_sim_fixtures():
    assert stats.levenshtein_sim("saddle", "horse") == pytest.approx(1 - 5 / 6)
    assert stats.levenshtein_sim("monday", "say") == pytest.approx(1 - 4 / 6)
    assert stats.levenshtein_sim("horse", "horse") == 1.0


# --- Ch.3 rating aggregation ---

def _aligned_fix(word, dur, t):
    from readkit.gaze_clean import AlignedFixation
    from readkit.types import EventKind, Eye, GazeEvent

    event = GazeEvent(EventKind.FIXATION, Eye.RIGHT, t, t + dur, 0.0, 0.0)
    return AlignedFixation(event, word, 0, 0)


def _lexicon7(entries):
    from readkit.types import RatingFactor, RatingLexicon

    return RatingLexicon(RatingFactor.WORD_FREQUENCY, 7, entries)


def test_rating_feature_means_single_participant():
    from conftest import build_layout

    layout = build_layout()
    lexicon = _lexicon7({"w1": 4, "w2": 4})
    aligned = [_aligned_fix(1, 200, 0), _aligned_fix(2, 400, 300)]
    profile = stats.rating_feature_means([aligned], lexicon, layout)
    mean, sd = profile.per_rating[4]["tFD"]
    assert mean == pytest.approx(300.0)
    assert sd == 0.0
    assert 5 not in profile.per_rating  # empty buckets absent


def test_rating_feature_means_across_participants():
    from conftest import build_layout

    layout = build_layout()
    lexicon = _lexicon7({"w1": 2})
    p1 = [_aligned_fix(1, 300, 0)]
    p2 = [_aligned_fix(1, 500, 0)]
    profile = stats.rating_feature_means([p1, p2], lexicon, layout)
    mean, sd = profile.per_rating[2]["tFD"]
    assert mean == pytest.approx(400.0)
    assert sd == pytest.approx(100.0)  # population SD of [300, 500]


def test_rating_correlation_sort_flag():
    from conftest import build_layout

    layout = build_layout(n_words=8)
    lexicon = _lexicon7({f"w{r - 1}": r for r in range(1, 8)})
    aligned = [_aligned_fix(r - 1, (8 - r) * 100, (r - 1) * 1000)
               for r in range(1, 8)]
    r_unsorted, _ = stats.rating_correlation([aligned], lexicon, layout,
                                             feature="tFD", sort_means=False)
    r_sorted, _ = stats.rating_correlation([aligned], lexicon, layout,
                                           feature="tFD", sort_means=True)
    assert r_unsorted == pytest.approx(-1.0)
    assert r_sorted == pytest.approx(1.0)
