"""Shared builders: synthetic AoI layouts and random gaze traces."""

from __future__ import annotations

import random

import pytest

from readkit.types import (
    AoiLayout,
    EventKind,
    Eye,
    GazeEvent,
    GazeTrace,
    Word,
)

WORD_WIDTH = 50.0
WORD_GAP = 10.0
LINE_HEIGHT = 60.0
X0 = 100.0
Y0 = 120.0


def even_partition(n: int, parts: int) -> tuple[tuple[int, int], ...]:
    """Split 0..n-1 into `parts` contiguous, non-empty index ranges."""
    assert 0 < parts <= n
    bounds = [round(i * n / parts) for i in range(parts + 1)]
    return tuple((bounds[i], bounds[i + 1] - 1) for i in range(parts))


def build_layout(n_words: int = 12, words_per_line: int = 4,
                 lines_per_slide: int = 2, sub_sentences: int = None,
                 sentences: int = None, paragraphs: int = None) -> AoiLayout:
    """A synthetic on-screen text: fixed-width words on evenly spaced lines."""
    words = []
    lines: dict[int, list[float]] = {}
    for i in range(n_words):
        line_global = i // words_per_line
        slide = line_global // lines_per_slide
        line = line_global % lines_per_slide
        col = i % words_per_line
        x_min = X0 + col * (WORD_WIDTH + WORD_GAP)
        words.append(Word(i, f"w{i}", slide, line, x_min, x_min + WORD_WIDTH))
        lines.setdefault(slide, [])
        while len(lines[slide]) <= line:
            # distinct absolute y per global line so snapping is unambiguous
            global_line = slide * lines_per_slide + len(lines[slide])
            lines[slide].append(Y0 + global_line * LINE_HEIGHT)
    n_lines = (n_words + words_per_line - 1) // words_per_line
    n_slides = (n_lines + lines_per_slide - 1) // lines_per_slide
    spans = {
        "word": tuple((i, i) for i in range(n_words)),
        "sub_sentence": even_partition(n_words, sub_sentences or max(1, n_words // 2)),
        "sentence": even_partition(n_words, sentences or max(1, n_words // 4)),
        "paragraph": even_partition(n_words, paragraphs or max(1, n_slides)),
        "slide": tuple(
            (min(w.word_index for w in words if w.slide == s),
             max(w.word_index for w in words if w.slide == s))
            for s in range(n_slides)),
        "whole_text": ((0, n_words - 1),),
    }
    return AoiLayout(words=tuple(words),
                     lines={s: tuple(ys) for s, ys in lines.items()},
                     spans=spans)


def word_center(layout: AoiLayout, word_index: int) -> tuple[float, float]:
    w = layout.words[word_index]
    return ((w.x_min + w.x_max) / 2.0, layout.lines[w.slide][w.line])


def random_trace(rng: random.Random, layout: AoiLayout,
                 n_fixations: int = 30, participant_id: str = "p0",
                 jitter: float = 8.0, blink_rate: float = 0.1) -> GazeTrace:
    """Fixation/saccade/blink stream wandering over the layout words."""
    events = []
    t = 0
    prev_xy = None
    word = rng.randrange(layout.n_words)
    for _ in range(n_fixations):
        word = min(max(word + rng.choice([-2, -1, 0, 1, 1, 2, 3]), 0),
                   layout.n_words - 1)
        cx, cy = word_center(layout, word)
        x = cx + rng.uniform(-jitter, jitter)
        y = cy + rng.uniform(-jitter, jitter)
        if prev_xy is not None:
            dur = rng.randint(20, 80)
            events.append(GazeEvent(EventKind.SACCADE, Eye.RIGHT, t, t + dur,
                                    prev_xy[0], prev_xy[1],
                                    avg_velocity=rng.uniform(50.0, 300.0),
                                    peak_velocity=rng.uniform(300.0, 600.0),
                                    end_x=x, end_y=y))
            t += dur + 1
        dur = rng.randint(30, 1200)
        events.append(GazeEvent(EventKind.FIXATION, Eye.RIGHT, t, t + dur,
                                x, y, pupil=rng.uniform(2.0, 5.0)))
        t += dur + 1
        prev_xy = (x, y)
        if rng.random() < blink_rate:
            dur = rng.randint(50, 200)
            events.append(GazeEvent(EventKind.BLINK, Eye.RIGHT, t, t + dur,
                                    x, y))
            t += dur + 1
    return GazeTrace(participant_id, events=tuple(events))


@pytest.fixture
def layout() -> AoiLayout:
    return build_layout()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240823)
