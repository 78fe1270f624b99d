"""Parsers and writers for every external data format the toolkit consumes.

All parsers are pure functions of file content; the values they return are
immutable and safe to share across threads.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path
from typing import Optional

from .errors import (
    BadHead,
    DimensionMismatch,
    MalformedRow,
    OutOfRange,
    OverlapError,
    UnsortedEvents,
)
from .types import (
    AOI_LEVELS,
    AoiLayout,
    EmbeddingTable,
    EventKind,
    Eye,
    GazeEvent,
    GazeTrace,
    Interval,
    IntervalKind,
    Label,
    ParsedSentence,
    RatingFactor,
    RatingLexicon,
    TokenQuartet,
    TranscriptTimeline,
    Word,
)

GAZE_COLUMNS = ("kind", "eye", "start_ms", "end_ms", "x", "y",
                "pupil", "avg_vel", "peak_vel", "end_x", "end_y")

_KINDS = {"fixation": EventKind.FIXATION, "saccade": EventKind.SACCADE, "blink": EventKind.BLINK}
_EYES = {"left": Eye.LEFT, "right": Eye.RIGHT}

_TIMELINE_KINDS = {
    "speech": IntervalKind.SPEECH,
    "bp": IntervalKind.SILENT_PAUSE,
    "lp": IntervalKind.SILENT_PAUSE,
    "fp": IntervalKind.FILLED_PAUSE,
    "$": IntervalKind.BOUNDARY,
}


def _opt_float(cell: str, line_no: int) -> Optional[float]:
    cell = cell.strip()
    if cell == "":
        return None
    try:
        return float(cell)
    except ValueError:
        raise MalformedRow(line_no, f"bad numeric field {cell!r}") from None


def parse_gaze_log(path, participant_id: Optional[str] = None, session: int = 1,
                   day: int = 1, label: Optional[Label] = None) -> GazeTrace:
    """Read a gaze event CSV into a GazeTrace.

    Participant metadata is not part of the CSV schema; it defaults from the
    file name and the keyword arguments.
    """
    path = Path(path)
    if participant_id is None:
        participant_id = path.stem
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(GAZE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise MalformedRow(1, f"header missing columns {sorted(missing)}")
        prev_start = None
        for line_no, row in enumerate(reader, start=2):
            kind = _KINDS.get((row["kind"] or "").strip().lower())
            eye = _EYES.get((row["eye"] or "").strip().lower())
            if kind is None or eye is None:
                raise MalformedRow(line_no, "unknown kind or eye")
            try:
                start_ms = int(row["start_ms"])
                end_ms = int(row["end_ms"])
            except (TypeError, ValueError):
                raise MalformedRow(line_no, "bad timestamp") from None
            if end_ms <= start_ms:
                raise MalformedRow(line_no, "end_ms must exceed start_ms")
            x = _opt_float(row["x"], line_no)
            y = _opt_float(row["y"], line_no)
            if x is None or y is None:
                raise MalformedRow(line_no, "missing coordinates")
            pupil = _opt_float(row["pupil"], line_no)
            avg_vel = _opt_float(row["avg_vel"], line_no)
            peak_vel = _opt_float(row["peak_vel"], line_no)
            end_x = _opt_float(row["end_x"], line_no)
            end_y = _opt_float(row["end_y"], line_no)
            if kind is not EventKind.SACCADE and (avg_vel is not None or peak_vel is not None
                                                  or end_x is not None or end_y is not None):
                raise MalformedRow(line_no, "saccade-only fields on a non-saccade event")
            if kind is not EventKind.FIXATION and pupil is not None:
                raise MalformedRow(line_no, "pupil given for a non-fixation event")
            if prev_start is not None and start_ms <= prev_start:
                raise UnsortedEvents(f"line {line_no}: start time does not increase")
            prev_start = start_ms
            events.append(GazeEvent(kind, eye, start_ms, end_ms, x, y,
                                    pupil, avg_vel, peak_vel, end_x, end_y))
    return GazeTrace(participant_id, session, day, label, tuple(events))


def write_gaze_csv(trace: GazeTrace, path) -> None:
    def fmt(v):
        return "" if v is None else repr(v)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GAZE_COLUMNS)
        for e in trace.events:
            writer.writerow([e.kind.value, e.eye.value, e.start_ms, e.end_ms,
                             fmt(e.x), fmt(e.y), fmt(e.pupil), fmt(e.avg_velocity),
                             fmt(e.peak_velocity), fmt(e.end_x), fmt(e.end_y)])


def parse_aoi_layout(path) -> AoiLayout:
    """Read the AoI layout JSON.

    The file declares lines, words, and spans for the four mid levels; the
    word level (one span per word) and the whole-text level (one span over
    all words) are implied.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    words = tuple(
        Word(int(w["word_index"]), w["text"], int(w["slide"]), int(w["line"]),
             float(w["x_min"]), float(w["x_max"]))
        for w in sorted(doc["words"], key=lambda w: int(w["word_index"]))
    )
    lines = {int(k): tuple(float(y) for y in v) for k, v in doc["lines"].items()}
    spans = {lvl: tuple((int(a), int(b)) for a, b in doc["spans"][lvl])
             for lvl in ("sub_sentence", "sentence", "paragraph", "slide")}
    spans["word"] = tuple((i, i) for i in range(len(words)))
    spans["whole_text"] = ((0, len(words) - 1),) if words else ()
    return AoiLayout(words=words, lines=lines, spans=spans)


def write_aoi_json(layout: AoiLayout, path) -> None:
    doc = {
        "lines": {str(s): list(ys) for s, ys in layout.lines.items()},
        "words": [
            {"word_index": w.word_index, "text": w.text, "slide": w.slide,
             "line": w.line, "x_min": w.x_min, "x_max": w.x_max}
            for w in layout.words
        ],
        "spans": {lvl: [list(r) for r in layout.spans[lvl]]
                  for lvl in ("sub_sentence", "sentence", "paragraph", "slide")},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)


def parse_conllu(path) -> list[ParsedSentence]:
    """Read a CoNLL-U file; dependency distance is |token index - head index|."""
    sentences = []
    current: list[tuple[int, str, str, str, int]] = []

    def finish(sentence_no):
        if not current:
            return
        n = len(current)
        tokens = []
        for tok_idx, lemma, pos, rel, head in current:
            if head < 0 or head > n:
                raise BadHead(sentence_no, tok_idx)
            dist = 0 if head == 0 else abs(tok_idx - head)
            tokens.append(TokenQuartet(lemma, pos, rel, dist))
        sentences.append(ParsedSentence(tuple(tokens)))
        current.clear()

    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                finish(len(sentences) + 1)
                continue
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise MalformedRow(line_no, f"expected 10 columns, got {len(cols)}")
            if "-" in cols[0] or "." in cols[0]:  # multiword / empty nodes carry no head
                continue
            try:
                tok_idx = int(cols[0])
                head = int(cols[6])
            except ValueError:
                raise MalformedRow(line_no, "bad token id or head") from None
            current.append((tok_idx, cols[2], cols[3], cols[7], head))
    finish(len(sentences) + 1)
    return sentences


def parse_embeddings(path) -> EmbeddingTable:
    """Read whitespace-separated text vectors; an optional leading
    "count dimension" header is honored, otherwise the dimension is
    inferred from the first record. Duplicate tokens: last record wins.
    """
    vectors: dict[str, tuple[float, ...]] = {}
    dimension = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if line_no == 1 and len(parts) == 2:
                try:
                    dimension = int(parts[1])
                    int(parts[0])
                    continue
                except ValueError:
                    pass
            token = parts[0]
            try:
                vec = tuple(float(v) for v in parts[1:])
            except ValueError:
                raise MalformedRow(line_no, "bad vector component") from None
            if dimension is None:
                if not vec:
                    raise DimensionMismatch(line_no)
                dimension = len(vec)
            if len(vec) != dimension:
                raise DimensionMismatch(line_no)
            if token in vectors:
                warnings.warn(f"duplicate token {token!r} at line {line_no}; keeping last")
            vectors[token] = vec
    return EmbeddingTable(dimension=dimension or 0, vectors=vectors)


def parse_timeline(path) -> TranscriptTimeline:
    """Read the interval TSV; leading/trailing non-speech becomes Boundary."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if cols[0] == "start_s":  # header
                continue
            if len(cols) < 3:
                raise MalformedRow(line_no, "expected start_s, end_s, kind")
            try:
                start_s = float(cols[0])
                end_s = float(cols[1])
            except ValueError:
                raise MalformedRow(line_no, "bad interval bounds") from None
            kind = _TIMELINE_KINDS.get(cols[2].strip().lower())
            if kind is None:
                raise MalformedRow(line_no, f"unknown interval kind {cols[2]!r}")
            syllables = 0
            if len(cols) > 3 and cols[3].strip():
                try:
                    syllables = int(cols[3])
                except ValueError:
                    raise MalformedRow(line_no, "bad syllable count") from None
            if end_s <= start_s:
                raise MalformedRow(line_no, "end_s must exceed start_s")
            rows.append((line_no, start_s, end_s, kind, syllables))

    prev_end = None
    for line_no, start_s, end_s, _, _ in rows:
        if prev_end is not None and start_s < prev_end - 1e-12:
            raise OverlapError("timeline", line_no)
        prev_end = end_s

    first_speech = next((i for i, r in enumerate(rows) if r[3] is IntervalKind.SPEECH), len(rows))
    last_speech = next((i for i in range(len(rows) - 1, -1, -1)
                        if rows[i][3] is IntervalKind.SPEECH), -1)
    intervals = []
    for i, (_, start_s, end_s, kind, syl) in enumerate(rows):
        if i < first_speech or i > last_speech:
            kind = IntervalKind.BOUNDARY
        intervals.append(Interval(start_s, end_s, kind,
                                  syl if kind is IntervalKind.SPEECH else 0))
    return TranscriptTimeline(tuple(intervals))


_TIMELINE_OUT = {
    IntervalKind.SPEECH: "speech",
    IntervalKind.SILENT_PAUSE: "lp",
    IntervalKind.FILLED_PAUSE: "fp",
    IntervalKind.BOUNDARY: "$",
}


def write_timeline_tsv(timeline: TranscriptTimeline, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("start_s\tend_s\tkind\tsyllables\n")
        for iv in timeline.intervals:
            fh.write(f"{iv.start_s!r}\t{iv.end_s!r}\t{_TIMELINE_OUT[iv.kind]}\t{iv.syllables}\n")


def write_matrix_csv(matrix, path) -> None:
    """FeatureMatrix -> CSV with sample_id, label, then one column per feature."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "label"] + list(matrix.feature_names))
        for sid, label, row in zip(matrix.sample_ids, matrix.labels, matrix.rows):
            writer.writerow([sid, label or ""] +
                            ["" if v is None else repr(v) for v in row])


def read_matrix_csv(path):
    from .types import FeatureMatrix

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["sample_id", "label"]:
            raise MalformedRow(1, "expected sample_id and label columns")
        matrix = FeatureMatrix(feature_names=header[2:])
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise MalformedRow(line_no, "row width mismatch")
            try:
                values = [None if cell == "" else float(cell) for cell in row[2:]]
            except ValueError:
                raise MalformedRow(line_no, "bad numeric cell") from None
            matrix.add_row(row[0], values, row[1] or None)
    return matrix


def rescale_rating(value: float, raw_min: float, raw_max: float, scale_points: int) -> int:
    """Map a raw rating onto 1..scale_points, rounding half away from zero."""
    scaled = 1.0 + (scale_points - 1) * (value - raw_min) / (raw_max - raw_min)
    return int(math.floor(scaled + 0.5))


def parse_rating_lexicon(path, factor: RatingFactor, scale_points: int,
                         raw_min: float, raw_max: float) -> RatingLexicon:
    """Read a lemma->rating TSV on a declared raw scale and rescale it."""
    entries: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise MalformedRow(line_no, "expected lemma and rating")
            lemma = cols[0].strip()
            try:
                value = float(cols[1])
            except ValueError:
                raise MalformedRow(line_no, "bad rating value") from None
            if value < raw_min or value > raw_max:
                raise OutOfRange(lemma)
            if lemma in entries:
                warnings.warn(f"duplicate lemma {lemma!r} at line {line_no}; keeping last")
            entries[lemma] = rescale_rating(value, raw_min, raw_max, scale_points)
    return RatingLexicon(factor=factor, scale_points=scale_points, entries=entries)
