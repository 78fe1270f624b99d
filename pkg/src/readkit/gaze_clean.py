"""Noise removal and text alignment for gaze traces.

The cleaning runs in phases: blink removal, duration filtering, snapping
fixations to the nearest text line/word, isolated-fixation removal, and
lone line-outlier smoothing. Manual corrections are supported through an
override table applied last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import NoLayout
from .types import AoiLayout, EventKind, GazeEvent, GazeTrace, Word


@dataclass(frozen=True)
class CleanParams:
    min_fix_ms: int = 50
    max_fix_ms: int = 1000
    isolation_gap_words: int = 2
    smoothing_enabled: bool = True

    def __post_init__(self):
        if not 0 < self.min_fix_ms < self.max_fix_ms:
            raise ValueError("need 0 < min_fix_ms < max_fix_ms")


@dataclass(frozen=True)
class AlignedFixation:
    event: GazeEvent
    word_index: int
    line: int
    slide: int
    visit_ordinal: int = 1


def drop_blinks(trace: GazeTrace) -> GazeTrace:
    events = tuple(e for e in trace.events if e.kind is not EventKind.BLINK)
    return replace(trace, events=events)


def filter_durations(trace: GazeTrace, params: CleanParams) -> GazeTrace:
    """Remove fixations with extreme durations; saccades pass through."""
    events = tuple(
        e for e in trace.events
        if e.kind is not EventKind.FIXATION
        or params.min_fix_ms <= e.duration_ms <= params.max_fix_ms
    )
    return replace(trace, events=events)


def _nearest_line(layout: AoiLayout, y: float, slide: Optional[int]) -> tuple[int, int]:
    """Return (slide, line) of the line whose y-center is closest to y.

    Ties break toward the smaller slide then line index.
    """
    slides = [slide] if slide is not None else sorted(layout.lines)
    best = None
    for s in slides:
        ys = layout.lines.get(s)
        if not ys:
            if slide is not None:
                raise NoLayout(s)
            continue
        for li, ly in enumerate(ys):
            d = abs(y - ly)
            if best is None or d < best[0] - 1e-12:
                best = (d, s, li)
    if best is None:
        raise NoLayout(slide if slide is not None else -1)
    return best[1], best[2]


def _nearest_word_on_line(layout: AoiLayout, slide: int, line: int, x: float) -> Word:
    """The word whose box contains x, else nearest by horizontal distance.

    Ties break toward the smaller word index.
    """
    candidates = layout.words_on_line(slide, line)
    if not candidates:
        raise NoLayout(slide)
    best = None
    for w in candidates:
        if w.x_min <= x <= w.x_max:
            d = 0.0
        else:
            d = min(abs(x - w.x_min), abs(x - w.x_max))
        if best is None or d < best[0] - 1e-12:
            best = (d, w)
    return best[1]


def _with_visit_ordinals(aligned: list[AlignedFixation]) -> list[AlignedFixation]:
    """Recompute visit ordinals: 1 + earlier maximal runs on the same word."""
    runs_seen: dict[int, int] = {}
    out: list[AlignedFixation] = []
    prev_word = None
    for fix in aligned:
        if fix.word_index != prev_word:
            runs_seen[fix.word_index] = runs_seen.get(fix.word_index, 0) + 1
        out.append(replace(fix, visit_ordinal=runs_seen[fix.word_index]))
        prev_word = fix.word_index
    return out


def snap_to_lines(trace: GazeTrace, layout: AoiLayout,
                  slide_times: Optional[Sequence[tuple[int, int, int]]] = None
                  ) -> list[AlignedFixation]:
    """Assign each fixation the nearest line and the word under it.

    ``slide_times`` optionally maps time windows (slide, start_ms, end_ms)
    to slides; without it the nearest line across all slides is used.
    """
    aligned: list[AlignedFixation] = []
    for e in trace.events:
        if e.kind is not EventKind.FIXATION:
            continue
        slide_hint = None
        if slide_times is not None:
            for s, t0, t1 in slide_times:
                if t0 <= e.start_ms < t1:
                    slide_hint = s
                    break
        slide, line = _nearest_line(layout, e.y, slide_hint)
        word = _nearest_word_on_line(layout, slide, line, e.x)
        aligned.append(AlignedFixation(e, word.word_index, line, slide))
    return _with_visit_ordinals(aligned)


def smooth_line_outliers(aligned: list[AlignedFixation], layout: AoiLayout
                         ) -> list[AlignedFixation]:
    """Reassign lone line outliers to their neighbors' line (single pass).

    A fixation is a lone outlier when both temporal neighbors sit on the
    same line and it does not. Decisions are made against the input
    snapshot, so the pass is order-independent.
    """
    if len(aligned) < 3:
        return list(aligned)
    snapshot = [(f.slide, f.line) for f in aligned]
    out = list(aligned)
    for i in range(1, len(aligned) - 1):
        prev_pos, cur_pos, next_pos = snapshot[i - 1], snapshot[i], snapshot[i + 1]
        if prev_pos == next_pos and cur_pos != prev_pos:
            slide, line = prev_pos
            word = _nearest_word_on_line(layout, slide, line, aligned[i].event.x)
            out[i] = replace(aligned[i], slide=slide, line=line, word_index=word.word_index)
    return _with_visit_ordinals(out)


def remove_isolated(aligned: list[AlignedFixation], params: CleanParams
                    ) -> list[AlignedFixation]:
    """Drop single-fixation visits far from both temporal neighbors' words."""
    gap = params.isolation_gap_words
    keep = []
    n = len(aligned)
    for i, fix in enumerate(aligned):
        single_visit = ((i == 0 or aligned[i - 1].word_index != fix.word_index)
                        and (i == n - 1 or aligned[i + 1].word_index != fix.word_index))
        if not single_visit:
            keep.append(fix)
            continue
        neighbor_words = []
        if i > 0:
            neighbor_words.append(aligned[i - 1].word_index)
        if i < n - 1:
            neighbor_words.append(aligned[i + 1].word_index)
        if neighbor_words and all(abs(fix.word_index - w) >= gap for w in neighbor_words):
            continue
        keep.append(fix)
    return _with_visit_ordinals(keep)


def refine_alignment(aligned: list[AlignedFixation], layout: AoiLayout,
                     params: CleanParams) -> list[AlignedFixation]:
    """Iterate isolation removal and outlier smoothing to a fixed point.

    Each smoothing call is a single pass; iterating makes the whole
    cleaning pipeline idempotent.
    """
    current = list(aligned)
    for _ in range(len(aligned) + 1):
        step = remove_isolated(current, params)
        if params.smoothing_enabled:
            step = smooth_line_outliers(step, layout)
        if [(f.event, f.word_index) for f in step] == [(f.event, f.word_index) for f in current]:
            return step
        current = step
    return current


def apply_overrides(aligned: list[AlignedFixation], layout: AoiLayout,
                    overrides: dict[int, int]) -> list[AlignedFixation]:
    """Apply manual corrections: 1-based fixation ordinal -> word index."""
    out = list(aligned)
    for ordinal, word_index in overrides.items():
        i = ordinal - 1
        if not 0 <= i < len(out):
            continue
        word = layout.words[word_index]
        out[i] = replace(out[i], word_index=word.word_index, line=word.line, slide=word.slide)
    return _with_visit_ordinals(out)


def parse_override_tsv(path) -> dict[int, int]:
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            ordinal, word_index = line.split("\t")[:2]
            overrides[int(ordinal)] = int(word_index)
    return overrides


def clean_trace(trace: GazeTrace, layout: AoiLayout,
                params: CleanParams = CleanParams(),
                overrides: Optional[dict[int, int]] = None,
                slide_times: Optional[Sequence[tuple[int, int, int]]] = None
                ) -> tuple[GazeTrace, list[AlignedFixation]]:
    """Full cleaning pipeline; returns the filtered trace and the alignment."""
    cleaned = filter_durations(drop_blinks(trace), params)
    aligned = snap_to_lines(cleaned, layout, slide_times)
    aligned = refine_alignment(aligned, layout, params)
    if overrides:
        aligned = apply_overrides(aligned, layout, overrides)
    # Re-assign each kept fixation's y to its line center so re-running the
    # pipeline reproduces the same alignment (idempotence).
    by_id = {id(f.event): f for f in aligned}
    events = []
    new_aligned = []
    for e in cleaned.events:
        if e.kind is not EventKind.FIXATION:
            events.append(e)
            continue
        f = by_id.get(id(e))
        if f is None:
            continue
        snapped = replace(e, y=layout.lines[f.slide][f.line])
        events.append(snapped)
        new_aligned.append(replace(f, event=snapped))
    return replace(cleaned, events=tuple(events)), new_aligned


def saccade_amplitude(event: GazeEvent) -> float:
    """Euclidean launch-to-landing distance in pixels."""
    if event.end_x is None or event.end_y is None:
        return 0.0
    return math.hypot(event.end_x - event.x, event.end_y - event.y)
