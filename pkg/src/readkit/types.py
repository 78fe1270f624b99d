"""Shared domain types produced by the corpus parsers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import CoverageGap, OverlapError


class EventKind(Enum):
    FIXATION = "fixation"
    SACCADE = "saccade"
    BLINK = "blink"


class Eye(Enum):
    LEFT = "left"
    RIGHT = "right"


class Label(Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class GazeEvent:
    kind: EventKind
    eye: Eye
    start_ms: int
    end_ms: int
    x: float
    y: float
    pupil: Optional[float] = None        # fixations only
    avg_velocity: Optional[float] = None  # saccades only
    peak_velocity: Optional[float] = None
    end_x: Optional[float] = None
    end_y: Optional[float] = None

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class GazeTrace:
    participant_id: str
    session: int = 1
    day: int = 1
    label: Optional[Label] = None
    events: tuple[GazeEvent, ...] = ()

    def without_label(self) -> "GazeTrace":
        return GazeTrace(self.participant_id, self.session, self.day, None, self.events)


@dataclass(frozen=True)
class Word:
    word_index: int
    text: str
    slide: int
    line: int
    x_min: float
    x_max: float


AOI_LEVELS = ("word", "sub_sentence", "sentence", "paragraph", "slide", "whole_text")


@dataclass(frozen=True)
class AoiLayout:
    """Screen geometry of the stimulus text plus span tables per AoI level.

    ``lines[slide]`` is the ordered list of line y-centers on that slide.
    ``spans[level]`` maps each AoI level to contiguous (first, last) word
    index ranges, inclusive.
    """

    words: tuple[Word, ...]
    lines: dict[int, tuple[float, ...]]
    spans: dict[str, tuple[tuple[int, int], ...]]

    def __post_init__(self):
        n = len(self.words)
        for i, w in enumerate(self.words):
            if w.word_index != i:
                raise CoverageGap("word", i)
        for level in AOI_LEVELS:
            ranges = self.spans.get(level)
            if ranges is None:
                raise CoverageGap(level)
            owner = [None] * n
            for first, last in ranges:
                for idx in range(first, last + 1):
                    if idx < 0 or idx >= n:
                        raise CoverageGap(level, idx)
                    if owner[idx] is not None:
                        raise OverlapError(level, idx)
                    owner[idx] = (first, last)
            for idx, o in enumerate(owner):
                if o is None:
                    raise CoverageGap(level, idx)

    @property
    def n_words(self) -> int:
        return len(self.words)

    def words_on_line(self, slide: int, line: int) -> list[Word]:
        return [w for w in self.words if w.slide == slide and w.line == line]

    def span_of(self, level: str, word_index: int) -> tuple[int, int]:
        for first, last in self.spans[level]:
            if first <= word_index <= last:
                return (first, last)
        raise CoverageGap(level, word_index)


class RatingFactor(Enum):
    WORD_FREQUENCY = "word_frequency"
    AGE_OF_ACQUISITION = "age_of_acquisition"
    FAMILIARITY = "familiarity"
    IMAGERY = "imagery"
    CONCRETENESS = "concreteness"
    EMOTION = "emotion"


@dataclass(frozen=True)
class RatingLexicon:
    factor: RatingFactor
    scale_points: int
    entries: dict[str, int]

    def __post_init__(self):
        for lemma, r in self.entries.items():
            if not 1 <= r <= self.scale_points:
                raise ValueError(f"rating {r} for {lemma!r} outside 1..{self.scale_points}")


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    vectors: dict[str, tuple[float, ...]]

    def __contains__(self, token: str) -> bool:
        return token in self.vectors


@dataclass(frozen=True)
class TokenQuartet:
    lemma: str
    pos: str
    dep_rel: str
    dep_dist: int


@dataclass(frozen=True)
class ParsedSentence:
    tokens: tuple[TokenQuartet, ...]


class IntervalKind(Enum):
    SPEECH = "speech"
    SILENT_PAUSE = "silent_pause"
    FILLED_PAUSE = "filled_pause"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class Interval:
    start_s: float
    end_s: float
    kind: IntervalKind
    syllables: int = 0

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class TranscriptTimeline:
    intervals: tuple[Interval, ...]

    def trimmed(self) -> tuple[Interval, ...]:
        """Intervals without the boundary trims at either end."""
        return tuple(iv for iv in self.intervals if iv.kind is not IntervalKind.BOUNDARY)


@dataclass
class FeatureMatrix:
    """Labeled numeric matrix; ``None`` cells are missing values."""

    feature_names: list[str]
    sample_ids: list[str] = field(default_factory=list)
    labels: list[Optional[str]] = field(default_factory=list)
    rows: list[list[Optional[float]]] = field(default_factory=list)

    def add_row(self, sample_id: str, values: list[Optional[float]], label: Optional[str] = None):
        if len(values) != len(self.feature_names):
            raise ValueError("row width does not match feature names")
        self.sample_ids.append(sample_id)
        self.labels.append(label)
        self.rows.append(values)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> list[Optional[float]]:
        return [row[j] for row in self.rows]
