"""readkit: batch toolkit for multimodal comprehension-assessment features.

Pipelines: gaze cleaning and AoI feature extraction, statistics and
feature selection, reference linear models, summary-similarity scoring,
readability/lexical-variation features, and temporal speech fluency.
"""

from .align import concept_alignment_score, nw_counts, nw_score
from .errors import ReadkitError
from .fluency import FluencyFeatures, fluency_features
from .gaze_clean import AlignedFixation, CleanParams, clean_trace
from .gaze_features import build_matrix, column_count, feature_names, trace_row
from .learn import (
    LogisticClassifier,
    RidgeRegressor,
    SplitSpec,
    ZScoreScaler,
    classification_metrics,
    kfold,
    regression_metrics,
    split,
)
from .lingfeat import (
    count_syllables,
    rating_bin_profile,
    readability,
    text_profile,
    ttr_family,
)
from .simsem import (
    EmbeddingSource,
    PreprocessResources,
    SimilarityReport,
    TaxonomySource,
    match_pairs,
    preprocess,
    score_summary,
    tls,
    tss,
    word_similarity,
)
from .stats import (
    levenshtein,
    levenshtein_sim,
    pearson,
    qwk,
    select_features,
    spearman,
    welch_t,
    zscore_fit_apply,
)
from .types import (
    AoiLayout,
    FeatureMatrix,
    GazeEvent,
    GazeTrace,
    ParsedSentence,
    TranscriptTimeline,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
