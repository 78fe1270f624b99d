"""AoI feature extraction: visit fixtures, saccade rules, matrix geometry."""

import math
import random

import pytest

from readkit import gaze_features as gf
from readkit.errors import LayoutMismatch
from readkit.gaze_clean import AlignedFixation, clean_trace
from readkit.types import EventKind, Eye, GazeEvent, GazeTrace

from conftest import build_layout, random_trace


def fix_event(start, dur):
    return GazeEvent(EventKind.FIXATION, Eye.RIGHT, start, start + dur, 0.0, 0.0)


def aligned_run(word_durations):
    """AlignedFixation stream from (word, duration) pairs."""
    out = []
    t = 0
    for word, dur in word_durations:
        out.append(AlignedFixation(fix_event(t, dur), word, 0, 0))
        t += dur + 10
    # recompute visit ordinals like the cleaning pipeline does
    ordinals = {}
    prev = None
    fixed = []
    for f in out:
        if f.word_index != prev:
            ordinals[f.word_index] = ordinals.get(f.word_index, 0) + 1
        fixed.append(AlignedFixation(f.event, f.word_index, f.line, f.slide,
                                     ordinals[f.word_index]))
        prev = f.word_index
    return fixed


def sacc(launch, landing, dur=30, avg=100.0, peak=200.0, amp=(0.0, 0.0, 3.0, 4.0)):
    event = GazeEvent(EventKind.SACCADE, Eye.RIGHT, 0, dur, amp[0], amp[1],
                      avg_velocity=avg, peak_velocity=peak,
                      end_x=amp[2], end_y=amp[3])
    return gf.SaccadeClassified(event, launch, landing)


# --- fixation features ---

def test_fixation_features_single_visit():
    aligned = aligned_run([(3, 300)])
    feats = gf.fixation_features(aligned, lambda f: f.word_index == 3)
    assert feats == {"tFD": 300.0, "FFD": 300.0, "SFD": 0.0, "LFD": 0.0,
                     "aFD": 300.0, "tFC": 1.0, "aFC": 1.0}


def test_fixation_features_three_visits():
    # visits on word 1: [200,100], [150], [80,70]
    aligned = aligned_run([(1, 200), (1, 100), (9, 50), (1, 150),
                           (9, 60), (1, 80), (1, 70)])
    feats = gf.fixation_features(aligned, lambda f: f.word_index == 1)
    assert feats["tFD"] == 600.0
    assert feats["FFD"] == 200.0
    assert feats["SFD"] == 150.0
    assert feats["LFD"] == 150.0
    assert feats["tFC"] == 5.0
    assert feats["aFC"] == pytest.approx(5.0 / 3.0)
    assert feats["aFD"] == pytest.approx(600.0 / 5.0)


def test_fixation_features_unfixated_zero():
    aligned = aligned_run([(1, 200)])
    feats = gf.fixation_features(aligned, lambda f: f.word_index == 7)
    assert all(v == 0.0 for v in feats.values())


# --- saccade / regression classification and features ---

def test_classify_saccades_directions():
    layout = build_layout()
    events = []
    t = 0
    coords = [4, 7, 3, 3]
    aligned = []
    for i, w in enumerate(coords):
        e = fix_event(t, 100)
        aligned.append(AlignedFixation(e, w, 0, 0))
        events.append(e)
        t += 110
        if i < len(coords) - 1:
            events.append(GazeEvent(EventKind.SACCADE, Eye.RIGHT, t, t + 30,
                                    0.0, 0.0, avg_velocity=1.0, peak_velocity=2.0,
                                    end_x=1.0, end_y=1.0))
            t += 40
    trace = GazeTrace("p", events=tuple(events))
    classified = gf.classify_saccades(trace, aligned)
    assert [(s.launch_word, s.landing_word) for s in classified] == \
        [(4, 7), (7, 3), (3, 3)]
    assert [s.direction for s in classified] == \
        [gf.Direction.FORWARD, gf.Direction.REGRESSION, gf.Direction.FORWARD]


def test_classify_discards_orphan_saccades():
    e1 = fix_event(0, 100)
    s = GazeEvent(EventKind.SACCADE, Eye.RIGHT, 110, 140, 0.0, 0.0,
                  avg_velocity=1.0, peak_velocity=2.0, end_x=1.0, end_y=1.0)
    trace = GazeTrace("p", events=(e1, s))
    assert gf.classify_saccades(trace, [AlignedFixation(e1, 0, 0, 0)]) == []


def test_saccade_features_read_skip():
    sel = [sacc(4, 5), sacc(5, 9)]
    feats = gf.saccade_features(sel, lambda w: True)
    assert feats["rS"] == 2.0
    assert feats["sS"] == 3.0
    assert feats["SC"] == 2.0
    assert feats["SD"] == 60.0
    assert feats["SV"] == pytest.approx(100.0)
    assert feats["SpV"] == pytest.approx(200.0)
    assert feats["SA"] == pytest.approx(5.0)


def test_same_word_saccade_clamped():
    feats = gf.saccade_features([sacc(5, 5)], lambda w: True)
    assert feats["SC"] == 1.0
    assert feats["rS"] == 0.0 and feats["sS"] == 0.0


def test_regression_features_and_ratio():
    sel = [sacc(9, 3), sacc(6, 5)]
    feats = gf.regression_features(sel, lambda w: True, saccade_count=10.0)
    assert feats["rR"] == 2.0
    assert feats["sR"] == 5.0
    assert feats["RC"] == 2.0
    assert feats["rSR"] == pytest.approx(5.0)


def test_rsr_missing_when_no_regressions():
    feats = gf.regression_features([], lambda w: True, saccade_count=4.0)
    assert feats["RC"] == 0.0
    assert feats["rSR"] is None


def test_rs_ss_sum_equals_span_property(rng):
    for _ in range(50):
        sel = [sacc(rng.randrange(10), rng.randrange(10)) for _ in range(8)]
        forward = [s for s in sel if s.landing_word >= s.launch_word]
        feats = gf.saccade_features(sel, lambda w: True)
        assert feats["rS"] + feats["sS"] == \
            sum(s.landing_word - s.launch_word for s in forward)


# --- geometry / matrix ---

def test_column_count_formula():
    layout = build_layout(n_words=12, sub_sentences=6, sentences=3, paragraphs=2)
    n_slides = len(layout.spans["slide"])
    expected = 12 * 7 + (6 + 3 + 2 + n_slides + 1) * 22
    assert gf.column_count(layout) == expected
    names = gf.feature_names(layout)
    assert len(names) == expected
    assert len(set(names)) == expected


def test_minimal_layout_117_columns():
    layout = build_layout(n_words=1, words_per_line=1, lines_per_slide=1,
                          sub_sentences=1, sentences=1, paragraphs=1)
    assert gf.column_count(layout) == 7 + 5 * 22


def test_trace_row_rejects_foreign_words(layout):
    bad = [AlignedFixation(fix_event(0, 100), layout.n_words + 3, 0, 0)]
    trace = GazeTrace("p", events=(bad[0].event,))
    with pytest.raises(LayoutMismatch):
        gf.trace_row(trace, bad, layout)


def test_build_matrix_row_independence(layout, rng):
    traces = [random_trace(random.Random(s), layout, participant_id=f"p{s}")
              for s in range(3)]
    pairs = [clean_trace(t, layout) for t in traces]
    aligned_pairs = [(c, a) for c, a in pairs]
    full = gf.build_matrix(aligned_pairs, layout, impute_missing=False)
    for i, pair in enumerate(aligned_pairs):
        solo = gf.build_matrix([pair], layout, impute_missing=False)
        assert solo.rows[0] == full.rows[i]


def test_impute_fills_missing_with_column_mean(layout):
    matrix = gf.FeatureMatrix(feature_names=["a"])
    matrix.add_row("s1", [2.0])
    matrix.add_row("s2", [None])
    matrix.add_row("s3", [4.0])
    gf.impute_column_means(matrix)
    assert matrix.rows[1][0] == pytest.approx(3.0)


def test_row_invariants_on_random_traces(layout):
    names = gf.feature_names(layout)
    idx = {n: j for j, n in enumerate(names)}
    for seed in range(10):
        trace = random_trace(random.Random(100 + seed), layout)
        cleaned, aligned = clean_trace(trace, layout)
        row = gf.trace_row(cleaned, aligned, layout)
        for w in range(layout.n_words):
            tFD = row[idx[f"word:{w}:tFD"]]
            aFD = row[idx[f"word:{w}:aFD"]]
            tFC = row[idx[f"word:{w}:tFC"]]
            assert math.isclose(aFD * tFC, tFD, rel_tol=1e-9, abs_tol=1e-9)
        # whole-text totals are consistent with word-level sums
        whole_tFD = row[idx["whole_text:0:tFD"]]
        assert math.isclose(whole_tFD,
                            sum(f.event.duration_ms for f in aligned),
                            rel_tol=1e-9)
