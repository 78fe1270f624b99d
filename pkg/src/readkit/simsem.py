"""Summary-against-reference similarity: preprocessing, lexical matching
over pluggable knowledge sources, syntactic comparison, and concept
sequence alignment. The overall score is the sum of the three components.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .align import concept_alignment_score
from .errors import EmptyReference
from .stats import levenshtein_sim
from .types import EmbeddingTable, ParsedSentence

DEFAULT_THRESHOLD = 0.7

Scorer = Callable[[str, str], float]


# --- preprocessing ---

_ABBREVIATIONS = {"mr", "mrs", "ms", "dr", "prof", "st", "etc", "vs",
                  "e.g", "i.e", "no", "fig", "al"}

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z]+)?")


@dataclass(frozen=True)
class PreprocessResources:
    stopwords: frozenset[str] = frozenset()
    lemma_map: dict[str, str] = field(default_factory=dict)
    phrase_lexicon: frozenset[tuple[str, ...]] = frozenset()
    substitution_map: dict[tuple[str, ...], str] = field(default_factory=dict)

    def __post_init__(self):
        for phrase in self.phrase_lexicon:
            if len(phrase) < 2:
                raise ValueError("phrase entries need at least two tokens")


def split_sentences(text: str) -> list[str]:
    """Period/!/? sentence splitting with a small abbreviation guard."""
    sentences = []
    start = 0
    for m in re.finditer(r"[.!?]+", text):
        before = text[start:m.start()]
        last_word = re.findall(r"[A-Za-z.]+$", before.strip())
        if m.group().startswith(".") and last_word:
            w = last_word[0].rstrip(".").lower()
            if w in _ABBREVIATIONS or len(w) == 1:
                continue
        chunk = text[start:m.end()].strip()
        if chunk:
            sentences.append(chunk)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _merge_sequences(tokens: list[str],
                     table: dict[tuple[str, ...], str]) -> list[str]:
    """Replace token runs found in the table, longest first, left to right."""
    if not table:
        return tokens
    max_len = max(len(k) for k in table)
    out = []
    i = 0
    while i < len(tokens):
        replaced = False
        for length in range(min(max_len, len(tokens) - i), 0, -1):
            key = tuple(tokens[i:i + length])
            if key in table:
                out.append(table[key])
                i += length
                replaced = True
                break
        if not replaced:
            out.append(tokens[i])
            i += 1
    return out


def preprocess(text: str, resources: PreprocessResources) -> list[list[str]]:
    """Sentence split, tokenize, drop noise/stopwords, resolve entities,
    merge phrases, and map tokens to their basic form."""
    result = []
    for sentence in split_sentences(text):
        tokens = _TOKEN_RE.findall(sentence.lower())
        tokens = [t for t in tokens if t not in resources.stopwords]
        tokens = _merge_sequences(tokens, resources.substitution_map)
        phrase_table = {p: "_".join(p) for p in resources.phrase_lexicon}
        tokens = _merge_sequences(tokens, phrase_table)
        tokens = [resources.lemma_map.get(t, t) for t in tokens]
        if tokens:
            result.append(tokens)
    return result


def load_resources(stopwords_path=None, lemmas_path=None, phrases_path=None,
                   substitutions_path=None) -> PreprocessResources:
    """Assemble PreprocessResources from plain text/TSV files.

    stopwords: one token per line; lemmas: ``form<TAB>lemma``; phrases:
    space-separated tokens per line; substitutions: ``surface tokens<TAB>
    replacement token``.
    """
    stopwords = frozenset()
    if stopwords_path:
        with open(stopwords_path, encoding="utf-8") as fh:
            stopwords = frozenset(w.strip().lower() for w in fh if w.strip())
    lemma_map = {}
    if lemmas_path:
        with open(lemmas_path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split("\t")
                if len(parts) >= 2 and parts[0].strip():
                    lemma_map[parts[0].strip().lower()] = parts[1].strip().lower()
    phrases = set()
    if phrases_path:
        with open(phrases_path, encoding="utf-8") as fh:
            for line in fh:
                toks = tuple(line.strip().lower().split())
                if len(toks) >= 2:
                    phrases.add(toks)
    substitutions = {}
    if substitutions_path:
        with open(substitutions_path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split("\t")
                if len(parts) >= 2 and parts[0].strip():
                    key = tuple(parts[0].strip().lower().split())
                    substitutions[key] = parts[1].strip().lower()
    return PreprocessResources(stopwords=stopwords, lemma_map=lemma_map,
                               phrase_lexicon=frozenset(phrases),
                               substitution_map=substitutions)


# --- similarity sources ---

class EmbeddingSource:
    """Cosine similarity over a dense vector table, clamped to [0, 1]."""

    def __init__(self, table: EmbeddingTable):
        self.table = table

    def contains(self, token: str) -> bool:
        return token in self.table.vectors

    def similarity(self, w1: str, w2: str) -> float:
        v1, v2 = self.table.vectors[w1], self.table.vectors[w2]
        dot = sum(a * b for a, b in zip(v1, v2))
        n1 = math.sqrt(sum(a * a for a in v1))
        n2 = math.sqrt(sum(b * b for b in v2))
        if n1 == 0.0 or n2 == 0.0:
            return 0.0
        return max(0.0, min(1.0, dot / (n1 * n2)))


class TaxonomySource:
    """Path similarity 1/(1+edges) over an undirected is-a taxonomy."""

    def __init__(self, edges: Sequence[tuple[str, str]],
                 lemma_synsets: dict[str, Sequence[str]]):
        self.adjacency: dict[str, set[str]] = {}
        for child, parent in edges:
            self.adjacency.setdefault(child, set()).add(parent)
            self.adjacency.setdefault(parent, set()).add(child)
        self.lemma_synsets = {k: tuple(v) for k, v in lemma_synsets.items()}

    def contains(self, token: str) -> bool:
        return bool(self.lemma_synsets.get(token))

    def _shortest_path(self, starts: Sequence[str], goals: set[str]) -> Optional[int]:
        seen = set(starts)
        queue = deque((s, 0) for s in starts)
        while queue:
            node, dist = queue.popleft()
            if node in goals:
                return dist
            for nxt in self.adjacency.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, dist + 1))
        return None

    def similarity(self, w1: str, w2: str) -> float:
        if w1 == w2:
            return 1.0
        s1 = self.lemma_synsets[w1]
        s2 = set(self.lemma_synsets[w2])
        dist = self._shortest_path(s1, s2)
        if dist is None:
            return 0.0
        return 1.0 / (1.0 + dist)


def parse_taxonomy(path) -> TaxonomySource:
    """Read a taxonomy TSV: ``e<TAB>child<TAB>parent`` edge rows and
    ``l<TAB>lemma<TAB>synset[,synset...]`` lemma rows."""
    edges: list[tuple[str, str]] = []
    lemma_synsets: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if parts[0] == "e" and len(parts) >= 3:
                edges.append((parts[1], parts[2]))
            elif parts[0] == "l" and len(parts) >= 3:
                lemma_synsets.setdefault(parts[1].lower(), []).extend(
                    s for s in parts[2].split(",") if s)
            else:
                raise ValueError(f"bad taxonomy row: {line!r}")
    return TaxonomySource(edges, lemma_synsets)


def word_similarity(w1: str, w2: str, sources: Sequence) -> float:
    """First source knowing both tokens answers; numbers compare by digits;
    tokens unknown everywhere fall back to edit-distance similarity."""
    if w1.isdigit() and w2.isdigit():
        return 1.0 if w1 == w2 else 0.0
    for source in sources:
        if source.contains(w1) and source.contains(w2):
            return source.similarity(w1, w2)
    return levenshtein_sim(w1, w2)


def make_scorer(sources: Sequence) -> Scorer:
    return lambda w1, w2: word_similarity(w1, w2, sources)


# --- pair matching and components ---

@dataclass(frozen=True)
class SentencePair:
    tokens1: tuple[str, ...]
    tokens2: tuple[str, ...]
    matched: tuple[tuple[int, int, float], ...]
    all_pairs_considered: int


def match_pairs(tokens1: Sequence[str], tokens2: Sequence[str], scorer: Scorer,
                threshold: float = DEFAULT_THRESHOLD) -> SentencePair:
    """Greedy maximum-score one-to-one matching above the threshold.

    Ties break toward the smaller first then second token index.
    """
    scored = []
    for i, t1 in enumerate(tokens1):
        for j, t2 in enumerate(tokens2):
            s = scorer(t1, t2)
            if s >= threshold:
                scored.append((-s, i, j))
    scored.sort()
    used1: set[int] = set()
    used2: set[int] = set()
    matched = []
    for neg_s, i, j in scored:
        if i in used1 or j in used2:
            continue
        used1.add(i)
        used2.add(j)
        matched.append((i, j, -neg_s))
    matched.sort(key=lambda m: (m[0], m[1]))
    return SentencePair(tuple(tokens1), tuple(tokens2), tuple(matched),
                        len(tokens1) * len(tokens2))


def tls(pair: SentencePair) -> float:
    """Sum of matched scores over (1 + number of matched pairs)."""
    if not pair.matched:
        return 0.0
    return sum(s for _, _, s in pair.matched) / (1.0 + len(pair.matched))


def tss(s1: ParsedSentence, s2: ParsedSentence, pair: SentencePair) -> float:
    """Syntactic similarity from mean dependency distance and shared
    dependency relations of the matched tokens; 0 without matches."""
    if not pair.matched:
        return 0.0
    d1 = [s1.tokens[i].dep_dist for i, _, _ in pair.matched]
    d2 = [s2.tokens[j].dep_dist for _, j, _ in pair.matched]
    mdd1 = sum(d1) / len(d1)
    mdd2 = sum(d2) / len(d2)
    shared = sum(1 for i, j, _ in pair.matched
                 if s1.tokens[i].dep_rel == s2.tokens[j].dep_rel)
    mdrs = shared / len(pair.matched)
    return 1.0 / (1.0 + abs(mdd1 - mdd2)) + mdrs


def mean_dep_distance(sentence: ParsedSentence, indices: Sequence[int]) -> float:
    dists = [sentence.tokens[i].dep_dist for i in indices]
    return sum(dists) / len(dists)


def concept_symbols(summary_tokens: Sequence[str],
                    found_map: dict[str, str]) -> list[str]:
    """Summary concepts as alignable symbols: the matched reference lemma
    for found tokens, a private placeholder otherwise."""
    return [found_map.get(t, f"\x00unmatched:{t}") for t in summary_tokens]


@dataclass(frozen=True)
class ConceptScore:
    concept_score: float
    alignment_score: float
    normalized_alignment: float

    @property
    def tcs(self) -> float:
        return self.concept_score + self.normalized_alignment


def tcs_from_blocks(blocks: Sequence[tuple[Sequence[str], Sequence[str]]],
                    found_map: dict[str, str]) -> ConceptScore:
    """Concept similarity over (reference sentence, summary sentence) blocks.

    Reference concepts are counted once per lemma across the whole text
    (a sentence contributes only its new lemmas); summary concepts are
    counted per occurrence. Alignment runs per block over the full token
    sequences, with gaps charged against the new-concept count.
    """
    seen: set[str] = set()
    new_counts = []
    for ref, _ in blocks:
        fresh = [t for t in ref if t not in seen]
        seen.update(fresh)
        new_counts.append(len(set(fresh)))
    total_ref = sum(new_counts)
    if total_ref == 0:
        raise EmptyReference("reference carries no concepts")
    found = sum(1 for _, summ in blocks for t in summ if t in found_map)
    alignment = sum(
        concept_alignment_score(list(ref), concept_symbols(summ, found_map),
                                ref_concepts=n_new)
        for (ref, summ), n_new in zip(blocks, new_counts))
    return ConceptScore(concept_score=found / total_ref,
                        alignment_score=alignment,
                        normalized_alignment=alignment / total_ref)


# --- whole-summary scoring ---

@dataclass
class SimilarityReport:
    tls: float
    tss: float
    tcs: float
    overall: float
    concept_score: float
    alignment_score: float
    normalized_alignment: float
    sentence_pairs: list[dict] = field(default_factory=list)
    per_element: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {
            "tls": self.tls, "tss": self.tss, "tcs": self.tcs,
            "overall": self.overall,
            "concept_score": self.concept_score,
            "alignment_score": self.alignment_score,
            "normalized_alignment": self.normalized_alignment,
            "sentence_pairs": self.sentence_pairs,
        }
        if self.per_element:
            doc["per_element"] = self.per_element
        return doc


def _dedup(tokens: Sequence[str]) -> list[str]:
    seen = set()
    out = []
    for t in tokens:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def trivial_parse(tokens: Sequence[str]) -> ParsedSentence:
    """Placeholder parse (zero dependency distances, uniform relation)."""
    from .types import TokenQuartet

    return ParsedSentence(tuple(TokenQuartet(t, "X", "dep", 0) for t in tokens))


def _pool_parse(sentences_tokens: Sequence[Sequence[str]],
                parses: Sequence[ParsedSentence],
                pooled: Sequence[str]) -> ParsedSentence:
    """Quartets for pooled unique tokens, taken from the first occurrence."""
    from .types import TokenQuartet

    first: dict[str, TokenQuartet] = {}
    for tokens, parse in zip(sentences_tokens, parses):
        for pos, t in enumerate(tokens):
            if t not in first and pos < len(parse.tokens):
                first[t] = parse.tokens[pos]
    quartets = tuple(first.get(t, TokenQuartet(t, "X", "dep", 0)) for t in pooled)
    return ParsedSentence(quartets)


def score_summary(ref_tokens: Sequence[Sequence[str]],
                  ref_parses: Sequence[ParsedSentence],
                  summary_tokens: Sequence[Sequence[str]],
                  summary_parses: Sequence[ParsedSentence],
                  scorer: Scorer,
                  threshold: float = DEFAULT_THRESHOLD,
                  pair_mode: str = "per_sentence",
                  ref_elements: Optional[Sequence[str]] = None) -> SimilarityReport:
    """Score one summary against the reference text.

    ``pair_mode='per_sentence'`` pairs each summary sentence with the
    reference sentence maximizing its lexical similarity and sums the
    components. ``pair_mode='pooled'`` matches over the pooled unique
    tokens of each text (the single-unit variant).
    """
    if not any(ref_tokens):
        raise EmptyReference("empty reference text")

    found_map: dict[str, str] = {}
    sentence_pairs: list[dict] = []
    per_element: dict[str, dict[str, float]] = {}

    if pair_mode == "pooled":
        pooled_ref = _dedup([t for s in ref_tokens for t in s])
        pooled_sum = _dedup([t for s in summary_tokens for t in s])
        pair = match_pairs(pooled_ref, pooled_sum, scorer, threshold)
        p_ref = _pool_parse(ref_tokens, ref_parses, pooled_ref)
        p_sum = _pool_parse(summary_tokens, summary_parses, pooled_sum)
        tls_total = tls(pair)
        tss_total = tss(p_ref, p_sum, pair)
        for i, j, s in pair.matched:
            found_map[pooled_sum[j]] = pooled_ref[i]
        sentence_pairs.append({"summary_sentence": None, "reference_sentence": None,
                               "tls": tls_total, "tss": tss_total,
                               "matched_pairs": len(pair.matched)})
        blocks = []
        for k in range(max(len(ref_tokens), len(summary_tokens))):
            ref_s = ref_tokens[k] if k < len(ref_tokens) else []
            sum_s = summary_tokens[k] if k < len(summary_tokens) else []
            blocks.append((ref_s, sum_s))
    else:
        tls_total = 0.0
        tss_total = 0.0
        block_for_ref: dict[int, list[str]] = {}
        for sj, (tokens, parse) in enumerate(zip(summary_tokens, summary_parses)):
            best = None
            for ri, (rtokens, rparse) in enumerate(zip(ref_tokens, ref_parses)):
                pair = match_pairs(rtokens, tokens, scorer, threshold)
                value = tls(pair)
                if best is None or value > best[0] + 1e-15:
                    best = (value, ri, pair, rparse)
            value, ri, pair, rparse = best
            pair_tss = tss(rparse, parse, pair)
            tls_total += value
            tss_total += pair_tss
            for i, j, s in pair.matched:
                found_map[tokens[j]] = ref_tokens[ri][i]
            block_for_ref.setdefault(ri, []).extend(tokens)
            sentence_pairs.append({"summary_sentence": sj, "reference_sentence": ri,
                                   "tls": value, "tss": pair_tss,
                                   "matched_pairs": len(pair.matched)})
            if ref_elements is not None and ri < len(ref_elements):
                bucket = per_element.setdefault(ref_elements[ri], {"tls": 0.0, "tss": 0.0})
                bucket["tls"] += value
                bucket["tss"] += pair_tss
        blocks = [(rtokens, block_for_ref.get(ri, []))
                  for ri, rtokens in enumerate(ref_tokens)]

    concept = tcs_from_blocks(blocks, found_map)
    overall = tls_total + tss_total + concept.tcs
    return SimilarityReport(
        tls=tls_total, tss=tss_total, tcs=concept.tcs, overall=overall,
        concept_score=concept.concept_score,
        alignment_score=concept.alignment_score,
        normalized_alignment=concept.normalized_alignment,
        sentence_pairs=sentence_pairs, per_element=per_element,
    )
