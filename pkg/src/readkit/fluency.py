"""Temporal speech-fluency features from an annotated transcript timeline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import NoSpeech
from .types import IntervalKind, TranscriptTimeline

MIN_SILENT_PAUSE_S = 0.25

FLUENCY_FEATURES = ("TRT", "ST", "SPT", "FPT", "MSP", "MFP",
                    "STR", "SPR", "FPR", "NumSyl", "NumSP", "NumFP",
                    "SR", "AR", "MSR")


@dataclass(frozen=True)
class FluencyFeatures:
    TRT: float
    ST: float
    SPT: float
    FPT: float
    MSP: Optional[float]
    MFP: Optional[float]
    STR: float
    SPR: float
    FPR: float
    NumSyl: int
    NumSP: int
    NumFP: int
    SR: float
    AR: float
    MSR: float

    def as_row(self) -> list[Optional[float]]:
        return [getattr(self, name) if getattr(self, name) is None
                else float(getattr(self, name)) for name in FLUENCY_FEATURES]


def fluency_features(timeline: TranscriptTimeline,
                     min_silent_pause_s: float = MIN_SILENT_PAUSE_S
                     ) -> FluencyFeatures:
    """Compute the fifteen temporal features.

    Silent intervals shorter than the pause threshold are folded into
    speaking time so the three-way total-time identity holds. Runs are
    delimited by counted silent pauses only; filled pauses do not break
    a run.
    """
    intervals = timeline.trimmed()
    st = spt = fpt = 0.0
    num_syl = num_sp = num_fp = 0
    runs = 1
    seen_speech = False
    syl_since_pause = False
    for iv in intervals:
        if iv.kind is IntervalKind.SPEECH:
            st += iv.duration_s
            num_syl += iv.syllables
            seen_speech = True
            syl_since_pause = True
        elif iv.kind is IntervalKind.SILENT_PAUSE:
            if iv.duration_s >= min_silent_pause_s:
                spt += iv.duration_s
                num_sp += 1
                if syl_since_pause:
                    runs += 1
                    syl_since_pause = False
            else:
                st += iv.duration_s
        elif iv.kind is IntervalKind.FILLED_PAUSE:
            fpt += iv.duration_s
            num_fp += 1
    if not seen_speech or st <= 0.0:
        raise NoSpeech("timeline has no speech")
    if not syl_since_pause and runs > 1:
        runs -= 1  # trailing pause does not open a new run
    trt = st + spt + fpt
    return FluencyFeatures(
        TRT=trt, ST=st, SPT=spt, FPT=fpt,
        MSP=(spt / num_sp) if num_sp else None,
        MFP=(fpt / num_fp) if num_fp else None,
        STR=st / trt, SPR=spt / trt, FPR=fpt / trt,
        NumSyl=num_syl, NumSP=num_sp, NumFP=num_fp,
        SR=num_syl / trt * 60.0,
        AR=num_syl / (st + fpt) * 60.0,
        MSR=num_syl / runs,
    )
