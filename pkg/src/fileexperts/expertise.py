"""Linear expertise techniques: scoring, normalization, threshold
classification and threshold calibration.

Three techniques score a developer's expertise on a file: the authorship
model (a linear formula over first authorship, own commits and others'
commits), surviving blame lines, and commit counts. Raw scores are
normalized per file by the maximum among that file's developers, and a
developer is classified as an expert when the normalized score reaches a
threshold k (strictly above zero when k = 0).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import (
    EmptyOracle,
    InvalidThreshold,
    NegativeInput,
    TooFewSamples,
    UnscoredOraclePair,
)
from .features import FeatureTable
from .validation import binary_prf, stratified_folds

DOA = "doa"
BLAME = "blame"
NUM_COMMITS = "num_commits"
TECHNIQUES = (DOA, BLAME, NUM_COMMITS)

THRESHOLD_GRID = tuple(i / 10 for i in range(11))

Pair = tuple[str, str]  # (developer canonical key, file path)


@dataclass(frozen=True)
class ExpertiseScore:
    developer: str
    file: str
    technique: str
    raw: float
    normalized: float


@dataclass(frozen=True)
class OracleSets:
    """Labeled ground truth: declared experts and declared non-experts."""

    declared_experts: frozenset[Pair]
    declared_non_experts: frozenset[Pair]

    def __post_init__(self):
        overlap = self.declared_experts & self.declared_non_experts
        if overlap:
            raise ValueError(f"oracle sets overlap on {sorted(overlap)[:3]}")

    @property
    def labeled(self) -> frozenset[Pair]:
        return self.declared_experts | self.declared_non_experts


@dataclass(frozen=True)
class ThresholdPoint:
    k: float
    precision: float
    recall: float
    f_measure: float


@dataclass(frozen=True)
class ThresholdCurve:
    technique: str
    points: tuple[ThresholdPoint, ...]
    best_k: float


def doa(fa: int, dl: int, ac: int) -> float:
    """Degree-of-authorship score.

    ``fa`` is 1 when the developer created the file, ``dl`` counts the
    developer's own commits on it and ``ac`` the commits by everyone else.
    The weights are fixed constants of the model; they are not re-fit.
    """
    if dl < 0 or ac < 0:
        raise NegativeInput(f"dl={dl}, ac={ac} must be non-negative")
    return 3.293 + 1.098 * fa + 0.164 * dl - 0.321 * math.log(1 + ac)


def technique_scores(table: FeatureTable, technique: str) -> list[ExpertiseScore]:
    """Raw and per-file-normalized scores for every pair in the table.

    Normalization divides by the file's maximum raw score; when no
    developer has a positive raw score, every normalized score is 0 (and
    nobody can be classified as an expert).
    """
    if technique not in TECHNIQUES:
        raise ValueError(f"unknown technique {technique!r}; expected one of {TECHNIQUES}")

    by_file: dict[str, list[tuple[str, float]]] = {}
    commits_per_file: dict[str, int] = {}
    for row in table.rows:
        commits_per_file[row.file] = (
            commits_per_file.get(row.file, 0) + row.features.num_commits
        )
    for row in table.rows:
        if technique == DOA:
            dl = row.features.num_commits
            raw = doa(row.features.fa, dl, commits_per_file[row.file] - dl)
        elif technique == BLAME:
            raw = float(row.features.blame)
        else:
            raw = float(row.features.num_commits)
        by_file.setdefault(row.file, []).append((row.developer.canonical_key, raw))

    scores: list[ExpertiseScore] = []
    for file in sorted(by_file):
        entries = sorted(by_file[file])
        max_raw = max(raw for _dev, raw in entries)
        for dev, raw in entries:
            normalized = max(raw, 0.0) / max_raw if max_raw > 0 else 0.0
            scores.append(
                ExpertiseScore(
                    developer=dev, file=file, technique=technique, raw=raw, normalized=normalized
                )
            )
    return scores


def classify(scores: list[ExpertiseScore], k: float) -> set[Pair]:
    """Pairs classified as experts at threshold k.

    At k = 0 a strictly positive normalized score is required; for any
    other k the comparison is >=.
    """
    if not 0.0 <= k <= 1.0:
        raise InvalidThreshold(f"k={k} outside [0, 1]")
    if k == 0.0:
        return {(s.developer, s.file) for s in scores if s.normalized > 0.0}
    return {(s.developer, s.file) for s in scores if s.normalized >= k}


def evaluate(
    predicted: set[Pair],
    oracle: OracleSets,
    k: float | None = None,
    scored: set[Pair] | None = None,
) -> tuple[float, float, float]:
    """Precision, recall and F-measure of a predicted expert set.

    Precision is computed over the predicted pairs that carry a label;
    unlabeled predictions cannot be judged. When the set of scored pairs is
    supplied, labeled pairs without a score raise UnscoredOraclePair.
    """
    if not oracle.declared_experts:
        raise EmptyOracle("no declared experts; recall is undefined")
    if scored is not None:
        missing = oracle.labeled - scored
        if missing:
            raise UnscoredOraclePair(
                f"{len(missing)} labeled pairs have no score, e.g. {sorted(missing)[:3]}"
            )
    labeled_predicted = predicted & oracle.labeled
    tp = len(labeled_predicted & oracle.declared_experts)
    fp = len(labeled_predicted) - tp
    fn = len(oracle.declared_experts) - tp
    return binary_prf(tp, fp, fn)


def calibrate(
    scores: list[ExpertiseScore],
    oracle: OracleSets,
    folds: int = 10,
    seed: int = 0,
) -> ThresholdCurve:
    """Sweep the 11-step threshold grid with stratified cross-validation.

    Labeled pairs are split into seeded folds stratified by the expert
    label; each threshold's precision, recall and F-measure are averaged
    over the held-out folds. best_k maximizes mean F-measure, with ties
    broken toward the smallest k.
    """
    if not oracle.declared_experts:
        raise EmptyOracle("no declared experts; calibration is undefined")
    score_map = {(s.developer, s.file): s.normalized for s in scores}
    missing = oracle.labeled - set(score_map)
    if missing:
        raise UnscoredOraclePair(
            f"{len(missing)} labeled pairs have no score, e.g. {sorted(missing)[:3]}"
        )
    labeled = sorted(oracle.labeled)
    if len(labeled) < folds:
        raise TooFewSamples(f"{len(labeled)} labeled pairs < {folds} folds")
    fold_indices = stratified_folds(
        [pair in oracle.declared_experts for pair in labeled], folds, seed
    )
    technique = scores[0].technique if scores else ""

    points = []
    for k in THRESHOLD_GRID:
        predicted = classify(scores, k)
        fold_metrics = []
        for idx in fold_indices:
            fold_pairs = {labeled[i] for i in idx}
            experts = fold_pairs & oracle.declared_experts
            predicted_fold = predicted & fold_pairs
            tp = len(predicted_fold & experts)
            fold_metrics.append(
                binary_prf(tp, len(predicted_fold) - tp, len(experts) - tp)
            )
        points.append(
            ThresholdPoint(
                k=k,
                precision=sum(m[0] for m in fold_metrics) / folds,
                recall=sum(m[1] for m in fold_metrics) / folds,
                f_measure=sum(m[2] for m in fold_metrics) / folds,
            )
        )
    best = max(points, key=lambda p: (p.f_measure, -p.k))
    return ThresholdCurve(technique=technique, points=tuple(points), best_k=best.k)


def threshold_curve_to_csv(curve: ThresholdCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "precision", "recall", "f_measure"])
    for point in curve.points:
        writer.writerow([point.k, point.precision, point.recall, point.f_measure])
    return buf.getvalue()
