"""Linguistic features of written summaries: readability indices,
type-token lexical variation, and psycholinguistic rating-bin profiles.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyInput, MissingResource
from .types import RatingLexicon

_VOWELS = set("aeiouy")

_WORD_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?")
_SENT_RE = re.compile(r"[.!?]+")


def count_syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups, minus a silent final 'e',
    never below one."""
    w = word.lower()
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if (groups > 1 and w.endswith("e") and len(w) >= 2
            and w[-2] not in _VOWELS and not w.endswith("le")):
        groups -= 1
    return max(1, groups)


@dataclass(frozen=True)
class TextProfile:
    words: int
    sentences: int
    syllables: int
    complex_words: int
    characters: int

    def __post_init__(self):
        if min(self.words, self.sentences, self.syllables,
               self.complex_words, self.characters) < 0:
            raise ValueError("negative count")
        if self.complex_words > self.words:
            raise ValueError("complex_words exceeds words")


def tokenize_words(text: str) -> list[str]:
    return [m.group().lower() for m in _WORD_RE.finditer(text)]


def count_sentences(text: str) -> int:
    n = len([m for m in _SENT_RE.finditer(text)])
    if n == 0 and text.strip():
        n = 1
    return n


def text_profile(text: str) -> TextProfile:
    words = tokenize_words(text)
    syllable_counts = [count_syllables(w) for w in words]
    return TextProfile(
        words=len(words),
        sentences=count_sentences(text),
        syllables=sum(syllable_counts),
        complex_words=sum(1 for c in syllable_counts if c >= 3),
        characters=sum(len(w.replace("'", "")) for w in words),
    )


def readability(profile: TextProfile,
                easy_words: Optional[frozenset[str]] = None,
                tokens: Optional[Sequence[str]] = None,
                want_dale_chall: bool = False) -> dict[str, float]:
    """The six readability indices; Dale-Chall only with an easy-word list."""
    if profile.sentences < 1 or profile.words < 1:
        raise EmptyInput("readability needs at least one word and sentence")
    w, s = float(profile.words), float(profile.sentences)
    syl, cx, ch = float(profile.syllables), float(profile.complex_words), float(profile.characters)
    per100 = 100.0 / w
    out = {
        "FRE": 206.835 - 1.015 * (w / s) - 84.6 * (syl / w),
        "Fog": 0.4 * (w / s + 100.0 * cx / w),
        "SMOG": 1.0430 * math.sqrt(cx * 30.0 / s) + 3.1291,
        "ARI": 4.71 * (ch / w) + 0.5 * (w / s) - 21.43,
        "ColemanLiau": 0.0588 * (ch * per100) - 0.296 * (s * per100) - 15.8,
    }
    if easy_words is not None:
        if tokens is None:
            raise MissingResource("dale_chall needs the token list")
        difficult = sum(1 for t in tokens if t.lower() not in easy_words)
        pct_difficult = 100.0 * difficult / w
        score = 0.1579 * pct_difficult + 0.0496 * (w / s)
        if pct_difficult > 5.0:
            score += 3.6365
        out["DaleChall"] = score
    elif want_dale_chall:
        raise MissingResource("dale_chall requested without an easy-word list")
    return out


def ttr_family(tokens: Sequence[str]) -> dict[str, Optional[float]]:
    """TTR and friends; fields without a defined value are None."""
    if not tokens:
        raise EmptyInput("ttr_family needs at least one token")
    n = len(tokens)
    t = len(set(tokens))
    log_n = math.log(n)
    log_t = math.log(t)
    msttr = None
    if n >= 50:
        segments = [tokens[i:i + 50] for i in range(0, n - n % 50, 50)]
        msttr = sum(len(set(seg)) / 50.0 for seg in segments) / len(segments)
    return {
        "TTR": t / n,
        "RTTR": t / math.sqrt(n),
        "CTTR": t / math.sqrt(2.0 * n),
        "LogTTR": (log_t / log_n) if n > 1 else None,
        "MSTTR50": msttr,
        "NDW": float(t),
        "Uber": (log_n ** 2 / (log_n - log_t)) if t < n else None,
    }


def rating_bin_profile(tokens: Sequence[str],
                       lexicons: dict[str, RatingLexicon]
                       ) -> dict[str, Optional[dict[str, float]]]:
    """Per factor, the percentage of in-lexicon tokens whose 9-point rating
    falls in the low (1-3), mid (4-6), and high (7-9) bands."""
    out: dict[str, Optional[dict[str, float]]] = {}
    for factor, lexicon in lexicons.items():
        if lexicon.scale_points != 9:
            raise ValueError(f"{factor}: rating_bin_profile expects 9-point scales")
        ratings = [lexicon.entries[t.lower()] for t in tokens
                   if t.lower() in lexicon.entries]
        if not ratings:
            out[factor] = None
            continue
        n = len(ratings)
        low = sum(1 for r in ratings if r <= 3)
        mid = sum(1 for r in ratings if 4 <= r <= 6)
        high = sum(1 for r in ratings if r >= 7)
        out[factor] = {
            "low_pct": 100.0 * low / n,
            "mid_pct": 100.0 * mid / n,
            "high_pct": 100.0 * high / n,
        }
    return out
