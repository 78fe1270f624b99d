"""Temporal speech-fluency features."""

import random

import pytest

from readkit import fluency
from readkit.errors import NoSpeech
from readkit.fluency import FLUENCY_FEATURES, fluency_features
from readkit.types import Interval, IntervalKind, TranscriptTimeline


def timeline(*spec):
    """Build a timeline from (kind, duration_s[, syllables]) tuples."""
    intervals = []
    t = 0.0
    for item in spec:
        kind, dur = item[0], item[1]
        syl = item[2] if len(item) > 2 else 0
        intervals.append(Interval(t, t + dur, kind, syl))
        t += dur
    return TranscriptTimeline(tuple(intervals))


S = IntervalKind.SPEECH
SP = IntervalKind.SILENT_PAUSE
FP = IntervalKind.FILLED_PAUSE
B = IntervalKind.BOUNDARY


def test_fixture_totals_and_rates():
    tl = timeline((S, 30.0, 150), (SP, 15.0), (S, 30.0, 150),
                  (SP, 15.0), (FP, 10.0))
    f = fluency_features(tl)
    assert f.TRT == pytest.approx(100.0)
    assert f.ST == pytest.approx(60.0)
    assert f.SPT == pytest.approx(30.0)
    assert f.FPT == pytest.approx(10.0)
    assert f.STR == pytest.approx(0.6)
    assert f.SPR == pytest.approx(0.3)
    assert f.FPR == pytest.approx(0.1)
    assert f.NumSyl == 300
    assert f.SR == pytest.approx(300 / 100 * 60)          # 180 syl/min
    assert f.AR == pytest.approx(300 / 70 * 60)           # ~257.14 syl/min
    assert f.NumSP == 2 and f.NumFP == 1
    assert f.MSP == pytest.approx(15.0)
    assert f.MFP == pytest.approx(10.0)
    # two speech runs (trailing pause does not open a third)
    assert f.MSR == pytest.approx(150.0)


def test_identities_hold_on_random_timelines():
    rng = random.Random(5)
    for _ in range(50):
        spec = [(S, rng.uniform(0.5, 5.0), rng.randint(1, 12))]
        for _ in range(rng.randint(0, 12)):
            kind = rng.choice([S, SP, FP])
            if kind is S:
                spec.append((S, rng.uniform(0.2, 5.0), rng.randint(1, 12)))
            else:
                spec.append((kind, rng.uniform(0.05, 2.0)))
        f = fluency_features(timeline(*spec))
        assert f.TRT == pytest.approx(f.ST + f.SPT + f.FPT)
        assert f.STR + f.SPR + f.FPR == pytest.approx(1.0)
        assert f.SR <= f.AR + 1e-9
        # MSR * runs reproduces the syllable total
        runs = round(f.NumSyl / f.MSR)
        assert f.MSR * runs == pytest.approx(f.NumSyl)


def test_pause_threshold_boundary():
    below = fluency_features(timeline((S, 10.0, 50), (SP, 0.249), (S, 10.0, 50)))
    at = fluency_features(timeline((S, 10.0, 50), (SP, 0.25), (S, 10.0, 50)))
    assert below.NumSP == 0
    assert below.ST == pytest.approx(20.249)  # short silence folds into ST
    assert at.NumSP == 1
    assert at.SPT == pytest.approx(0.25)
    assert at.MSR == pytest.approx(50.0)
    assert below.MSR == pytest.approx(100.0)


def test_filled_pause_does_not_break_run():
    f = fluency_features(timeline((S, 5.0, 20), (FP, 1.0), (S, 5.0, 20)))
    assert f.MSR == pytest.approx(40.0)  # single run
    assert f.NumFP == 1


def test_boundary_intervals_trimmed():
    f = fluency_features(timeline((B, 2.0), (S, 10.0, 40), (B, 3.0)))
    assert f.TRT == pytest.approx(10.0)
    assert f.MSP is None and f.MFP is None


def test_no_speech_raises():
    with pytest.raises(NoSpeech):
        fluency_features(timeline((SP, 1.0), (FP, 0.5)))


def test_as_row_order():
    f = fluency_features(timeline((S, 10.0, 40)))
    row = f.as_row()
    assert len(row) == len(FLUENCY_FEATURES) == 15
    assert row[FLUENCY_FEATURES.index("NumSyl")] == 40.0
    assert row[FLUENCY_FEATURES.index("MSP")] is None
