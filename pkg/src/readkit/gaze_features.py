"""Fixation, saccade, and regression features per area of interest.

Feature families: 7 fixation features (word level and up), 7 saccade and
8 regression features (sub-sentence level and up). A visit is a maximal
run of consecutive fixations inside the unit of interest.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from .errors import LayoutMismatch
from .gaze_clean import AlignedFixation, saccade_amplitude
from .types import AoiLayout, EventKind, FeatureMatrix, GazeEvent, GazeTrace

FIXATION_FEATURES = ("tFD", "FFD", "SFD", "LFD", "aFD", "tFC", "aFC")
SACCADE_FEATURES = ("SD", "SC", "SV", "SpV", "rS", "sS", "SA")
REGRESSION_FEATURES = ("RD", "RC", "RV", "RpV", "rR", "sR", "RA", "rSR")

HIGHER_LEVELS = ("sub_sentence", "sentence", "paragraph", "slide", "whole_text")


class Direction(Enum):
    FORWARD = "forward"
    REGRESSION = "regression"


@dataclass(frozen=True)
class SaccadeClassified:
    event: GazeEvent
    launch_word: int
    landing_word: int

    @property
    def direction(self) -> Direction:
        return Direction.REGRESSION if self.landing_word < self.launch_word else Direction.FORWARD


def classify_saccades(trace: GazeTrace, aligned: Sequence[AlignedFixation]
                      ) -> list[SaccadeClassified]:
    """Attach launch/landing words from the temporally adjacent fixations.

    Saccades lacking an adjacent aligned fixation on either side are
    discarded.
    """
    fix_by_id = {id(f.event): f for f in aligned}
    out = []
    last_fix: Optional[AlignedFixation] = None
    pending: list[GazeEvent] = []
    for e in trace.events:
        if e.kind is EventKind.FIXATION:
            f = fix_by_id.get(id(e))
            if f is None:
                continue
            if last_fix is not None:
                for sacc in pending:
                    out.append(SaccadeClassified(sacc, last_fix.word_index, f.word_index))
            pending = []
            last_fix = f
        elif e.kind is EventKind.SACCADE:
            pending.append(e)
    return out


def _visits(aligned: Sequence[AlignedFixation],
            member: Callable[[AlignedFixation], bool]) -> list[list[AlignedFixation]]:
    visits: list[list[AlignedFixation]] = []
    current: list[AlignedFixation] = []
    for f in aligned:
        if member(f):
            current.append(f)
        elif current:
            visits.append(current)
            current = []
    if current:
        visits.append(current)
    return visits


def fixation_features(aligned: Sequence[AlignedFixation],
                      member: Callable[[AlignedFixation], bool]) -> dict[str, float]:
    """tFD/FFD/SFD/LFD/aFD/tFC/aFC for one unit; all zeros if never fixated."""
    visits = _visits(aligned, member)
    fixations = [f for v in visits for f in v]
    tFC = len(fixations)
    tFD = float(sum(f.event.duration_ms for f in fixations))
    FFD = float(visits[0][0].event.duration_ms) if visits else 0.0
    SFD = float(visits[1][0].event.duration_ms) if len(visits) >= 2 else 0.0
    LFD = float(sum(f.event.duration_ms for v in visits[2:] for f in v))
    aFD = tFD / tFC if tFC else 0.0
    aFC = tFC / len(visits) if visits else 0.0
    return {"tFD": tFD, "FFD": FFD, "SFD": SFD, "LFD": LFD,
            "aFD": aFD, "tFC": float(tFC), "aFC": aFC}


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def saccade_features(saccades: Sequence[SaccadeClassified],
                     in_aoi: Callable[[int], bool]) -> dict[str, float]:
    """Forward-saccade features over saccades landing in the AoI."""
    sel = [s for s in saccades
           if s.direction is Direction.FORWARD and in_aoi(s.landing_word)]
    SD = float(sum(s.event.duration_ms for s in sel))
    SC = float(len(sel))
    SV = _mean([s.event.avg_velocity for s in sel if s.event.avg_velocity is not None])
    SpV = _mean([s.event.peak_velocity for s in sel if s.event.peak_velocity is not None])
    # same-word moves contribute neither read nor skipped words
    rS = float(sum(1 for s in sel if s.landing_word > s.launch_word))
    sS = float(sum(max(s.landing_word - s.launch_word - 1, 0) for s in sel))
    SA = _mean([saccade_amplitude(s.event) for s in sel])
    return {"SD": SD, "SC": SC, "SV": SV, "SpV": SpV, "rS": rS, "sS": sS, "SA": SA}


def regression_features(saccades: Sequence[SaccadeClassified],
                        in_aoi: Callable[[int], bool],
                        saccade_count: float) -> dict[str, Optional[float]]:
    """Regression features mirroring the saccade set; rSR missing when RC=0."""
    sel = [s for s in saccades
           if s.direction is Direction.REGRESSION and in_aoi(s.landing_word)]
    RD = float(sum(s.event.duration_ms for s in sel))
    RC = float(len(sel))
    RV = _mean([s.event.avg_velocity for s in sel if s.event.avg_velocity is not None])
    RpV = _mean([s.event.peak_velocity for s in sel if s.event.peak_velocity is not None])
    rR = float(len(sel))
    sR = float(sum(max(s.launch_word - s.landing_word - 1, 0) for s in sel))
    RA = _mean([saccade_amplitude(s.event) for s in sel])
    rSR = saccade_count / RC if RC > 0 else None
    return {"RD": RD, "RC": RC, "RV": RV, "RpV": RpV,
            "rR": rR, "sR": sR, "RA": RA, "rSR": rSR}


def feature_names(layout: AoiLayout) -> list[str]:
    names = []
    for w in range(layout.n_words):
        names.extend(f"word:{w}:{feat}" for feat in FIXATION_FEATURES)
    for level in HIGHER_LEVELS:
        for k in range(len(layout.spans[level])):
            prefix = f"{level}:{k}"
            names.extend(f"{prefix}:{feat}" for feat in FIXATION_FEATURES)
            names.extend(f"{prefix}:{feat}" for feat in SACCADE_FEATURES)
            names.extend(f"{prefix}:{feat}" for feat in REGRESSION_FEATURES)
    return names


def column_count(layout: AoiLayout) -> int:
    higher = sum(len(layout.spans[level]) for level in HIGHER_LEVELS)
    return layout.n_words * 7 + higher * 22


def trace_row(trace: GazeTrace, aligned: Sequence[AlignedFixation],
              layout: AoiLayout) -> list[Optional[float]]:
    """One feature row; rSR cells may be None (imputed at matrix level)."""
    for f in aligned:
        if not 0 <= f.word_index < layout.n_words:
            raise LayoutMismatch(f"word {f.word_index} outside layout")
    saccades = classify_saccades(trace, aligned)
    row: list[Optional[float]] = []

    by_word: dict[int, list[AlignedFixation]] = {}
    for f in aligned:
        by_word.setdefault(f.word_index, []).append(f)
    for w in range(layout.n_words):
        if w in by_word:
            feats = fixation_features(aligned, lambda f, w=w: f.word_index == w)
        else:
            feats = dict.fromkeys(FIXATION_FEATURES, 0.0)
        row.extend(feats[name] for name in FIXATION_FEATURES)

    for level in HIGHER_LEVELS:
        for first, last in layout.spans[level]:
            member = lambda f, a=first, b=last: a <= f.word_index <= b
            in_aoi = lambda w, a=first, b=last: a <= w <= b
            fix = fixation_features(aligned, member)
            sac = saccade_features(saccades, in_aoi)
            reg = regression_features(saccades, in_aoi, sac["SC"])
            row.extend(fix[name] for name in FIXATION_FEATURES)
            row.extend(sac[name] for name in SACCADE_FEATURES)
            row.extend(reg[name] for name in REGRESSION_FEATURES)
    return row


def build_matrix(traces_aligned: Sequence[tuple[GazeTrace, Sequence[AlignedFixation]]],
                 layout: AoiLayout, impute_missing: bool = True) -> FeatureMatrix:
    """Assemble rows for all traces; missing rSR cells take the column mean."""
    matrix = FeatureMatrix(feature_names=feature_names(layout))
    for trace, aligned in traces_aligned:
        row = trace_row(trace, aligned, layout)
        matrix.add_row(trace.participant_id, row,
                       trace.label.value if trace.label else None)
    if impute_missing:
        impute_column_means(matrix)
    return matrix


def impute_column_means(matrix: FeatureMatrix) -> None:
    for j, name in enumerate(matrix.feature_names):
        missing = [i for i, row in enumerate(matrix.rows) if row[j] is None]
        if not missing:
            continue
        present = [row[j] for row in matrix.rows if row[j] is not None]
        fill = sum(present) / len(present) if present else 0.0
        for i in missing:
            matrix.rows[i][j] = fill


def column_aggregates(matrix: FeatureMatrix) -> list[tuple[str, float, float]]:
    """Per-column mean and population SD over present values."""
    out = []
    for j, name in enumerate(matrix.feature_names):
        values = [row[j] for row in matrix.rows if row[j] is not None]
        if not values:
            out.append((name, 0.0, 0.0))
            continue
        mu = sum(values) / len(values)
        var = sum((v - mu) ** 2 for v in values) / len(values)
        out.append((name, mu, var ** 0.5))
    return out
