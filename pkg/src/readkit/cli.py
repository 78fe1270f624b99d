"""Command-line front end orchestrating the pipelines.

Exit codes: 0 = all inputs processed, 1 = some inputs failed,
2 = usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import gaze_clean, gaze_features, learn, lingfeat, simsem, stats
from .errors import ReadkitError
from .fluency import FLUENCY_FEATURES, fluency_features
from .io import (
    parse_aoi_layout,
    parse_conllu,
    parse_embeddings,
    parse_gaze_log,
    parse_rating_lexicon,
    parse_timeline,
    read_matrix_csv,
    rescale_rating,
    write_matrix_csv,
)
from .types import FeatureMatrix, Label, RatingFactor

OK, PARTIAL, USAGE = 0, 1, 2


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE


def _read_config(path: Path) -> dict[str, str]:
    config = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {line_no}: expected key=value")
            key, value = line.split("=", 1)
            config[key.strip()] = value.strip()
    return config


def _config_argv(argv: list[str]) -> list[str]:
    """Turn `--config file` into leading flags so explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config needs a path")
    extra: list[str] = []
    for key, value in _read_config(Path(argv[i + 1])).items():
        if value.lower() == "true":
            extra.append(f"--{key}")
        elif value.lower() == "false":
            continue
        else:
            extra.extend([f"--{key}", value])
    return argv[:1] + extra + argv[1:]


def _inputs(paths: Sequence[str], suffixes: tuple[str, ...]) -> list[Path]:
    """Expand files and directories into a name-sorted file list."""
    out: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            out.extend(f for f in path.iterdir()
                       if f.is_file() and f.suffix in suffixes)
        else:
            out.append(path)
    return sorted(set(out), key=lambda f: (f.name, str(f)))


def _write_json(doc, path: Optional[str]) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_labels_tsv(path) -> dict[str, str]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            key, value = line.split("\t")[:2]
            labels[key.strip()] = value.strip()
    return labels


# --- gaze ---

def _clean_params(pairs: Sequence[str]) -> gaze_clean.CleanParams:
    kwargs = {}
    casts = {"min-fix-ms": ("min_fix_ms", int),
             "max-fix-ms": ("max_fix_ms", int),
             "isolation-gap-words": ("isolation_gap_words", int),
             "smoothing": ("smoothing_enabled", lambda v: v.lower() != "off")}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"bad --params entry {pair!r}, expected key=value")
        key, value = pair.split("=", 1)
        if key not in casts:
            raise ValueError(f"unknown cleaning parameter {key!r}")
        dest, cast = casts[key]
        kwargs[dest] = cast(value)
    return gaze_clean.CleanParams(**kwargs)


def cmd_gaze(args) -> int:
    layout_path = Path(args.layout)
    if not layout_path.is_file():
        return _fail("layout not found")
    try:
        layout = parse_aoi_layout(layout_path)
        params = _clean_params(args.params or [])
        labels = _read_labels_tsv(args.labels) if args.labels else {}
    except (ReadkitError, ValueError, OSError) as err:
        return _fail(str(err))

    pairs = []
    failed = False
    for path in _inputs(args.inputs, (".csv",)):
        try:
            label = labels.get(path.stem)
            trace = parse_gaze_log(path, session=args.session, day=args.day,
                                   label=Label(label) if label else None)
            cleaned, aligned = gaze_clean.clean_trace(trace, layout, params)
            pairs.append((cleaned, aligned))
        except (ReadkitError, ValueError, OSError) as err:
            print(f"{path.name}: {err}", file=sys.stderr)
            failed = True
    if not pairs:
        return _fail("no usable gaze traces")
    matrix = gaze_features.build_matrix(pairs, layout)
    write_matrix_csv(matrix, args.out)
    if args.aggregate_by_element:
        agg_path = args.aggregate_out or f"{args.out}.elements.csv"
        with open(agg_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "mean", "sd"])
            for name, mean, sd in gaze_features.column_aggregates(matrix):
                writer.writerow([name, repr(mean), repr(sd)])
    return PARTIAL if failed else OK


# --- select / train / eval ---

def _restrict(matrix: FeatureMatrix, names: Sequence[str]) -> FeatureMatrix:
    index = {name: j for j, name in enumerate(matrix.feature_names)}
    missing = [n for n in names if n not in index]
    if missing:
        raise ValueError(f"features absent from matrix: {missing[:5]}")
    cols = [index[n] for n in names]
    out = FeatureMatrix(feature_names=list(names))
    for sid, label, row in zip(matrix.sample_ids, matrix.labels, matrix.rows):
        out.add_row(sid, [row[j] for j in cols], label)
    return out


def cmd_select(args) -> int:
    try:
        matrix = read_matrix_csv(args.matrix)
        selected = stats.select_features(matrix, args.alpha)
    except (ReadkitError, ValueError, OSError) as err:
        return _fail(str(err))
    names = [matrix.feature_names[j] for j in selected]
    Path(args.out).write_text("".join(n + "\n" for n in names), encoding="utf-8")
    print(f"selected {len(names)} of {len(matrix.feature_names)} features")
    return OK


def _load_feature_list(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def _prepare_matrix(args) -> FeatureMatrix:
    matrix = read_matrix_csv(args.matrix)
    if args.features:
        matrix = _restrict(matrix, _load_feature_list(args.features))
    return stats.zscore_fit_apply(matrix)


def _qwk_against(pred: Sequence[float], truth: Sequence[float],
                 scale_points: int) -> float:
    rounded = [min(max(r, 1), scale_points) for r in learn.round_scores(pred)]
    truth_int = [min(max(r, 1), scale_points) for r in learn.round_scores(truth)]
    return stats.qwk(rounded, truth_int, scale_points)


def cmd_train(args) -> int:
    try:
        matrix = _prepare_matrix(args)
        if any(lb is None for lb in matrix.labels):
            return _fail("matrix has unlabeled rows")
        spec = learn.SplitSpec(train_fraction=args.train_fraction,
                               folds=args.folds, seed=args.seed)
        if args.score:
            for lb in matrix.labels:
                float(lb)
            trainer = lambda m: learn.train_regressor(m, penalty=args.penalty)
            train_part, test_part = learn.split(matrix, spec)
            model = trainer(train_part)
            X, truth = learn.matrix_to_arrays(test_part)
            truth_f = [float(t) for t in truth]
            pred = list(model.predict(X))
            metrics = {
                "mode": "score",
                "rmse": learn.regression_metrics(pred, truth_f)["rmse"],
                "cv_rmse": learn.kfold(matrix, spec, trainer),
                "qwk": _qwk_against(pred, truth_f, args.scale_points),
            }
        else:
            trainer = lambda m: learn.train_classifier(m, c=args.c)
            train_part, test_part = learn.split(matrix, spec)
            model = trainer(train_part)
            X, truth = learn.matrix_to_arrays(test_part)
            pred = model.predict(X)
            metrics = {"mode": "classify",
                       "cv_accuracy": learn.kfold(matrix, spec, trainer)}
            metrics.update(learn.classification_metrics(pred, truth))
    except (ReadkitError, ValueError, OSError) as err:
        return _fail(str(err))
    if args.model_out:
        model.save(args.model_out, matrix.feature_names)
    _write_json(metrics, args.out)
    return OK


def cmd_eval(args) -> int:
    try:
        model, names = learn.load_model(args.model)
        matrix = read_matrix_csv(args.matrix)
        matrix = stats.zscore_fit_apply(_restrict(matrix, names))
        if any(lb is None for lb in matrix.labels):
            return _fail("matrix has unlabeled rows")
        X, truth = learn.matrix_to_arrays(matrix)
        pred = model.predict(X)
        if model.kind == "classifier":
            metrics = {"mode": "classify"}
            metrics.update(learn.classification_metrics(list(pred), truth))
        else:
            truth_f = [float(t) for t in truth]
            pred = list(pred)
            metrics = {
                "mode": "score",
                "rmse": learn.regression_metrics(pred, truth_f)["rmse"],
                "qwk": _qwk_against(pred, truth_f, args.scale_points),
            }
    except (ReadkitError, ValueError, OSError) as err:
        return _fail(str(err))
    _write_json(metrics, args.out)
    return OK


# --- simscore ---

def _build_sources(specs: Sequence[str]):
    sources = []
    for spec in specs:
        kind, _, path = spec.partition(":")
        if kind == "embedding":
            if not path:
                raise ValueError("embedding source needs embedding:PATH")
            sources.append(simsem.EmbeddingSource(parse_embeddings(path)))
        elif kind in ("taxonomy", "wordnet-path"):
            if not path:
                raise ValueError(f"{kind} source needs {kind}:PATH")
            sources.append(simsem.parse_taxonomy(path))
        elif kind == "levenshtein":
            pass  # always the implicit fallback
        else:
            raise ValueError(f"unknown source {spec!r}")
    return sources


def cmd_simscore(args) -> int:
    try:
        resources = simsem.load_resources(args.stopwords, args.lemmas,
                                          args.phrases, args.substitutions)
        scorer = simsem.make_scorer(_build_sources(args.source or []))
        ref_text = Path(args.reference).read_text(encoding="utf-8")
        ref_tokens = simsem.preprocess(ref_text, resources)
        ref_parses = parse_conllu(args.reference_parse)
        if len(ref_parses) != len(ref_tokens):
            return _fail("reference parse sentence count differs from text")
        elements = None
        if args.elements:
            elements = _load_feature_list(args.elements)
    except (ReadkitError, ValueError, OSError) as err:
        return _fail(str(err))

    parses_dir = Path(args.parses_dir) if args.parses_dir else None
    rows = []
    missing_parse = []
    failed = False
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for path in _inputs(args.summaries, (".txt",)):
        parse_path = (parses_dir / f"{path.stem}.conllu") if parses_dir else None
        if parse_path is not None and not parse_path.is_file():
            missing_parse.append(path.name)
            continue
        try:
            tokens = simsem.preprocess(path.read_text(encoding="utf-8"), resources)
            parses = (parse_conllu(parse_path) if parse_path is not None
                      else [simsem.trivial_parse(s) for s in tokens])
            if parse_path is not None and len(parses) != len(tokens):
                raise ValueError("parse sentence count differs from text")
            report = simsem.score_summary(ref_tokens, ref_parses, tokens, parses,
                                          scorer, threshold=args.threshold,
                                          pair_mode=args.pair_mode,
                                          ref_elements=elements)
        except (ReadkitError, ValueError, OSError) as err:
            print(f"{path.name}: {err}", file=sys.stderr)
            failed = True
            continue
        rows.append((path.stem, report))
        if out_dir:
            _write_json(report.to_dict(), out_dir / f"{path.stem}.json")
    if missing_parse:
        print("summaries lacking parses: " + ", ".join(missing_parse),
              file=sys.stderr)
    if not rows:
        return _fail("no summaries scored")
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["summary_id", "tls", "tss", "tcs", "overall"])
        for sid, report in rows:
            writer.writerow([sid, repr(report.tls), repr(report.tss),
                             repr(report.tcs), repr(report.overall)])
    if args.against_ratings:
        try:
            ratings = _read_labels_tsv(args.against_ratings)
            joined = [(report.overall, float(ratings[sid]))
                      for sid, report in rows if sid in ratings]
            if len(joined) < 3:
                return _fail("need at least three rated summaries")
            system = [s for s, _ in joined]
            human = [h for _, h in joined]
            lo, hi = min(system), max(system)
            scale = args.scale_points
            system_scaled = ([rescale_rating(s, lo, hi, scale) for s in system]
                             if hi > lo else [1] * len(system))
            human_int = [min(max(learn.round_scores([h])[0], 1), scale)
                         for h in human]
            agreement = {
                "pearson": stats.pearson(system, human),
                "spearman": stats.spearman(system, human),
                "qwk": stats.qwk(system_scaled, human_int, scale),
                "n": len(joined),
            }
        except (ReadkitError, ValueError, OSError) as err:
            return _fail(str(err))
        _write_json(agreement, None)
    return PARTIAL if (failed or missing_parse) else OK


# --- lingfeat ---

_TTR_FIELDS = ("TTR", "RTTR", "CTTR", "LogTTR", "MSTTR50", "NDW", "Uber")


def cmd_lingfeat(args) -> int:
    easy_words = None
    lexicons = {}
    try:
        if args.easy_words:
            easy_words = frozenset(_load_feature_list(args.easy_words))
        for spec in args.lexicon or []:
            parts = spec.split(":")
            if len(parts) != 4:
                raise ValueError("--lexicon expects factor:path:raw_min:raw_max")
            factor = RatingFactor(parts[0])
            lexicons[factor.value] = parse_rating_lexicon(
                parts[1], factor, 9, float(parts[2]), float(parts[3]))
    except (ReadkitError, ValueError, OSError) as err:
        return _fail(str(err))

    read_names = ["FRE", "Fog", "SMOG", "ARI", "ColemanLiau"]
    if easy_words is not None:
        read_names.append("DaleChall")
    names = read_names + list(_TTR_FIELDS)
    for factor in sorted(lexicons):
        names.extend(f"{factor}_{band}" for band in ("low_pct", "mid_pct", "high_pct"))
    matrix = FeatureMatrix(feature_names=names)
    failed = False
    for path in _inputs(args.inputs, (".txt",)):
        try:
            text = path.read_text(encoding="utf-8")
            profile = lingfeat.text_profile(text)
            tokens = lingfeat.tokenize_words(text)
            indices = lingfeat.readability(profile, easy_words, tokens)
            ttr = lingfeat.ttr_family(tokens)
            row = [indices[n] for n in read_names]
            row += [ttr[n] for n in _TTR_FIELDS]
            if lexicons:
                bins = lingfeat.rating_bin_profile(tokens, lexicons)
                for factor in sorted(lexicons):
                    entry = bins[factor]
                    if entry is None:
                        row += [None, None, None]
                    else:
                        row += [entry["low_pct"], entry["mid_pct"], entry["high_pct"]]
            matrix.add_row(path.stem, row)
        except (ReadkitError, ValueError, OSError) as err:
            print(f"{path.name}: {err}", file=sys.stderr)
            failed = True
    if not matrix.rows:
        return _fail("no usable text files")
    write_matrix_csv(matrix, args.out)
    return PARTIAL if failed else OK


# --- fluency ---

def cmd_fluency(args) -> int:
    matrix = FeatureMatrix(feature_names=list(FLUENCY_FEATURES))
    failed = False
    for path in _inputs(args.inputs, (".tsv",)):
        try:
            timeline = parse_timeline(path)
            features = fluency_features(timeline, args.min_pause)
            matrix.add_row(path.stem, features.as_row())
        except (ReadkitError, ValueError, OSError) as err:
            print(f"{path.name}: {err}", file=sys.stderr)
            failed = True
    if not matrix.rows:
        return _fail("no usable timelines")
    write_matrix_csv(matrix, args.out)
    return PARTIAL if failed else OK


# --- parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="readkit",
        description="Batch pipelines for gaze, summary-similarity, "
                    "linguistic, and speech-fluency features.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value config file; "
                                        "explicit flags override it")

    p = sub.add_parser("gaze", help="clean gaze logs and extract AoI features")
    add_common(p)
    p.add_argument("inputs", nargs="+", help="gaze CSV files or directories")
    p.add_argument("--layout", required=True, help="AoI layout JSON")
    p.add_argument("--out", required=True, help="output feature matrix CSV")
    p.add_argument("--labels", help="participant_id<TAB>label TSV")
    p.add_argument("--params", nargs="*", default=[],
                   help="cleaning parameters, e.g. min-fix-ms=50 max-fix-ms=1000")
    p.add_argument("--session", type=int, default=1)
    p.add_argument("--day", type=int, default=1)
    p.add_argument("--aggregate-by-element", action="store_true",
                   help="also write per-AoI mean/SD aggregates")
    p.add_argument("--aggregate-out", help="path for the aggregate CSV")
    p.set_defaults(func=cmd_gaze)

    p = sub.add_parser("select", help="Welch-test feature selection")
    add_common(p)
    p.add_argument("matrix", help="labeled feature matrix CSV")
    p.add_argument("--alpha", type=float, default=0.01,
                   help="significance threshold (default 0.01)")
    p.add_argument("--out", required=True, help="selected feature-name list file")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", help="train and cross-validate a model")
    add_common(p)
    p.add_argument("matrix", help="labeled feature matrix CSV")
    p.add_argument("--features", help="feature-name list file from `select`")
    p.add_argument("--score", action="store_true",
                   help="regression on numeric scores instead of classification")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the stratified shuffles (default 0)")
    p.add_argument("--c", type=float, default=1.0,
                   help="inverse regularization strength of the classifier")
    p.add_argument("--penalty", type=float, default=1e-8,
                   help="ridge penalty of the score model")
    p.add_argument("--scale-points", type=int, default=5,
                   help="rating scale size for QWK in --score mode")
    p.add_argument("--model-out", help="save the fitted model here")
    p.add_argument("--out", help="metrics JSON path (default stdout)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on a matrix")
    add_common(p)
    p.add_argument("matrix", help="labeled feature matrix CSV")
    p.add_argument("--model", required=True, help="model file from `train`")
    p.add_argument("--scale-points", type=int, default=5)
    p.add_argument("--out", help="metrics JSON path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simscore", help="score summaries against a reference")
    add_common(p)
    p.add_argument("summaries", nargs="+", help="summary .txt files or directories")
    p.add_argument("--reference", required=True, help="reference text file")
    p.add_argument("--reference-parse", required=True,
                   help="CoNLL-U parse of the reference")
    p.add_argument("--parses-dir",
                   help="directory of per-summary CoNLL-U files (stem.conllu)")
    p.add_argument("--source", action="append",
                   help="knowledge source, in precedence order: "
                        "embedding:PATH, taxonomy:PATH, or levenshtein")
    p.add_argument("--stopwords", help="stopword list file")
    p.add_argument("--lemmas", help="form<TAB>lemma TSV")
    p.add_argument("--phrases", help="multiword phrase list file")
    p.add_argument("--substitutions", help="surface<TAB>replacement TSV")
    p.add_argument("--threshold", type=float, default=simsem.DEFAULT_THRESHOLD)
    p.add_argument("--pair-mode", choices=("pooled", "per_sentence"),
                   default="per_sentence")
    p.add_argument("--elements",
                   help="text-element name per reference sentence, one per line")
    p.add_argument("--against-ratings", help="summary_id<TAB>rating TSV")
    p.add_argument("--scale-points", type=int, default=5)
    p.add_argument("--out", required=True, help="batch scores CSV")
    p.add_argument("--out-dir", help="directory for per-summary report JSON")
    p.set_defaults(func=cmd_simscore)

    p = sub.add_parser("lingfeat", help="readability / lexical variation features")
    add_common(p)
    p.add_argument("inputs", nargs="+", help="text files or directories")
    p.add_argument("--easy-words", help="easy-word list enabling Dale-Chall")
    p.add_argument("--lexicon", action="append",
                   help="rating lexicon as factor:path:raw_min:raw_max")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.set_defaults(func=cmd_lingfeat)

    p = sub.add_parser("fluency", help="temporal fluency features from timelines")
    add_common(p)
    p.add_argument("inputs", nargs="+", help="timeline TSV files or directories")
    p.add_argument("--min-pause", type=float, default=0.25,
                   help="silent-pause threshold in seconds (default 0.25)")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.set_defaults(func=cmd_fluency)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _config_argv(argv)
    except (ValueError, OSError) as err:
        return _fail(str(err))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
