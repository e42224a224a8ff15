"""Binary expert classification on development features.

Classifiers are implemented directly on numpy: k-nearest neighbors,
L2-regularized logistic regression fitted by gradient descent, and a random
forest of Gini-split trees with bootstrap sampling and per-split feature
subsampling. Evaluation runs seeded, stratified 10-fold cross-validation
with the expert class as positive; standardization is fit on each training
split only.

The feature layout follows the study design: [adds, fa, size, num_days],
where fa is binary and left unscaled.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import SingleClassData, TooFewSamples, ZeroVarianceWarning
from .validation import binary_prf, stratified_folds

KNN = "knn"
LOGISTIC_REGRESSION = "logistic_regression"
RANDOM_FOREST = "random_forest"
KINDS = (KNN, LOGISTIC_REGRESSION, RANDOM_FOREST)

ML_FEATURE_NAMES = ("adds", "fa", "size", "num_days")
_BINARY_COLUMNS = (1,)  # fa

DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    KNN: {"k": 5, "metric": "euclidean"},
    LOGISTIC_REGRESSION: {"l2": 0.1, "tol": 1e-6, "max_iter": 10000},
    RANDOM_FOREST: {"trees": 100, "max_depth": None, "max_features": 2},
}

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    KNN: {"k": [1, 3, 5, 7, 9, 11], "metric": ["euclidean", "manhattan"]},
    RANDOM_FOREST: {
        "trees": [50, 100, 200],
        "max_depth": [4, 8, 16, None],
        "max_features": [2, 4],
    },
    LOGISTIC_REGRESSION: {"l2": [0.001, 0.01, 0.1, 1.0, 10.0]},
}


@dataclass(frozen=True, eq=False)
class MLDataset:
    """Feature matrix plus expert labels, with optional pair provenance."""

    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) bool, True = expert
    developers: tuple[str, ...] = ()
    files: tuple[str, ...] = ()
    feature_names: tuple[str, ...] = ML_FEATURE_NAMES

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=bool))
        if self.features.ndim != 2 or len(self.features) != len(self.labels):
            raise ValueError("features must be (n, d) aligned with n labels")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, indices: np.ndarray) -> "MLDataset":
        return MLDataset(
            features=self.features[indices],
            labels=self.labels[indices],
            developers=tuple(self.developers[i] for i in indices) if self.developers else (),
            files=tuple(self.files[i] for i in indices) if self.files else (),
            feature_names=self.feature_names,
        )


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparameters: Mapping = field(default_factory=dict)

    def merged(self) -> dict:
        params = dict(DEFAULT_HYPERPARAMETERS.get(self.kind, {}))
        params.update(self.hyperparameters)
        return params


@dataclass(frozen=True)
class CVReport:
    spec: ClassifierSpec
    per_fold: tuple[tuple[float, float, float], ...]  # (precision, recall, f)
    mean_precision: float
    mean_recall: float
    mean_f: float

    def to_dict(self) -> dict:
        return {
            "classifier": self.spec.kind,
            "hyperparameters": {
                k: v for k, v in sorted(self.spec.merged().items())
            },
            "folds": [
                {"precision": p, "recall": r, "f_measure": f} for p, r, f in self.per_fold
            ],
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "mean_f": self.mean_f,
        }


@dataclass(frozen=True)
class Scaler:
    """Column-wise standardization parameters fitted on a training split."""

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale


def fit_scaler(dataset: MLDataset, binary_columns: Sequence[int] = _BINARY_COLUMNS) -> Scaler:
    """Zero-mean unit-variance parameters for the continuous columns.

    Binary columns pass through untouched. A constant continuous column is
    passed through unscaled with a ZeroVarianceWarning.
    """
    if len(dataset) == 0:
        raise TooFewSamples("cannot standardize an empty dataset")
    X = dataset.features
    mean = X.mean(axis=0)
    scale = X.std(axis=0)  # population std
    for col in range(X.shape[1]):
        if col in binary_columns:
            mean[col], scale[col] = 0.0, 1.0
        elif scale[col] == 0.0:
            name = (
                dataset.feature_names[col]
                if col < len(dataset.feature_names)
                else f"column {col}"
            )
            warnings.warn(f"feature {name!r} is constant; left unscaled", ZeroVarianceWarning)
            mean[col], scale[col] = 0.0, 1.0
    return Scaler(mean=mean, scale=scale)


def standardize(
    dataset: MLDataset, binary_columns: Sequence[int] = _BINARY_COLUMNS
) -> tuple[MLDataset, Scaler]:
    """Standardized copy of the dataset plus the fitted parameters."""
    scaler = fit_scaler(dataset, binary_columns)
    return (
        MLDataset(
            features=scaler.transform(dataset.features),
            labels=dataset.labels,
            developers=dataset.developers,
            files=dataset.files,
            feature_names=dataset.feature_names,
        ),
        scaler,
    )


# -- k-nearest neighbors -------------------------------------------------------

class KNNModel:
    def __init__(self, X: np.ndarray, y: np.ndarray, k: int, metric: str):
        if metric not in ("euclidean", "manhattan"):
            raise ValueError(f"unknown metric {metric!r}")
        self.X = X
        self.y = y
        self.k = min(k, len(X))
        self.metric = metric

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        diff = X[:, None, :] - self.X[None, :, :]
        if self.metric == "euclidean":
            dists = np.sqrt((diff**2).sum(axis=2))
        else:
            dists = np.abs(diff).sum(axis=2)
        scores = np.empty(len(X))
        for i, row in enumerate(dists):
            # stable order: ties in distance resolved by training index
            nearest = np.lexsort((np.arange(len(row)), row))[: self.k]
            scores[i] = self.y[nearest].mean()
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_score(X) >= 0.5


# -- logistic regression -------------------------------------------------------

def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean log-loss plus L2 penalty on the weights (bias excluded).

    ``params`` stacks the weight vector and the bias as its last entry;
    ``y`` holds booleans with True as the positive class.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    sign = np.where(y, 1.0, -1.0)
    return float(np.logaddexp(0.0, -sign * z).mean() + 0.5 * l2 * (w @ w))


def logistic_gradient(params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> np.ndarray:
    w, b = params[:-1], params[-1]
    z = X @ w + b
    residual = _sigmoid(z) - y.astype(float)
    grad_w = X.T @ residual / len(y) + l2 * w
    grad_b = residual.mean()
    return np.concatenate([grad_w, [grad_b]])


class LogisticModel:
    def __init__(self, X: np.ndarray, y: np.ndarray, l2: float, tol: float, max_iter: int):
        params = np.zeros(X.shape[1] + 1)
        loss = logistic_loss(params, X, y, l2)
        step = 1.0
        for _ in range(max_iter):
            grad = logistic_gradient(params, X, y, l2)
            if np.abs(grad).max() <= tol:
                break
            # backtracking line search on the descent direction
            g2 = float(grad @ grad)
            while True:
                candidate = params - step * grad
                new_loss = logistic_loss(candidate, X, y, l2)
                if new_loss <= loss - 0.5 * step * g2 or step < 1e-12:
                    break
                step *= 0.5
            params, loss = candidate, new_loss
            step = min(step * 2.0, 1e6)
        self.weights = params[:-1]
        self.bias = float(params[-1])

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return _sigmoid(X @ self.weights + self.bias)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_score(X) >= 0.5


# -- random forest --------------------------------------------------------------

class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "probability")

    def __init__(self, probability: float):
        self.feature: int | None = None
        self.threshold = 0.0
        self.left: "_TreeNode | None" = None
        self.right: "_TreeNode | None" = None
        self.probability = probability


def _best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray) -> tuple[int, float] | None:
    """Best (feature, threshold) by weighted Gini impurity, or None."""
    n = len(y)
    best_gini = np.inf
    best: tuple[int, float] | None = None
    for feature in features:
        values = X[:, feature]
        order = np.argsort(values, kind="stable")
        sorted_vals = values[order]
        sorted_y = y[order].astype(float)
        pos_left = np.cumsum(sorted_y)[:-1]
        counts_left = np.arange(1, n)
        boundaries = sorted_vals[1:] != sorted_vals[:-1]
        if not boundaries.any():
            continue
        pos_right = sorted_y.sum() - pos_left
        counts_right = n - counts_left
        p_left = pos_left / counts_left
        p_right = pos_right / counts_right
        gini = (
            counts_left * 2.0 * p_left * (1.0 - p_left)
            + counts_right * 2.0 * p_right * (1.0 - p_right)
        ) / n
        gini = np.where(boundaries, gini, np.inf)
        idx = int(np.argmin(gini))
        if gini[idx] < best_gini:
            best_gini = float(gini[idx])
            best = (int(feature), float((sorted_vals[idx] + sorted_vals[idx + 1]) / 2.0))
    return best


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int | None,
    max_features: int,
    rng: np.random.Generator,
) -> _TreeNode:
    root = _TreeNode(probability=float(y.mean()))
    stack: list[tuple[_TreeNode, np.ndarray, np.ndarray, int]] = [(root, X, y, 0)]
    while stack:
        node, Xn, yn, depth = stack.pop()
        if (
            len(yn) < 2
            or yn.all()
            or not yn.any()
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        candidates = rng.choice(
            Xn.shape[1], size=min(max_features, Xn.shape[1]), replace=False
        )
        split = _best_split(Xn, yn, candidates)
        if split is None:
            continue
        feature, threshold = split
        mask = Xn[:, feature] <= threshold
        node.feature = feature
        node.threshold = threshold
        node.left = _TreeNode(probability=float(yn[mask].mean()))
        node.right = _TreeNode(probability=float(yn[~mask].mean()))
        stack.append((node.left, Xn[mask], yn[mask], depth + 1))
        stack.append((node.right, Xn[~mask], yn[~mask], depth + 1))
    return root


def _tree_scores(node: _TreeNode, X: np.ndarray) -> np.ndarray:
    scores = np.empty(len(X))
    for i, row in enumerate(X):
        current = node
        while current.feature is not None:
            current = current.left if row[current.feature] <= current.threshold else current.right
        scores[i] = current.probability
    return scores


class RandomForestModel:
    def __init__(
        self,
        X: np.ndarray,
        y: np.ndarray,
        trees: int,
        max_depth: int | None,
        max_features: int,
        seed,
    ):
        rng = np.random.default_rng(seed)
        self.trees: list[_TreeNode] = []
        n = len(y)
        for _ in range(trees):
            sample = rng.integers(0, n, size=n)
            self.trees.append(
                _grow_tree(X[sample], y[sample], max_depth, max_features, rng)
            )

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.mean([_tree_scores(tree, X) for tree in self.trees], axis=0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_score(X) >= 0.5


# -- training and evaluation -----------------------------------------------------

def train(spec: ClassifierSpec, data: MLDataset, seed=0):
    """Fit a model for the spec. Logistic regression and the forest require
    both classes; nearest neighbors tolerates one."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown classifier kind {spec.kind!r}")
    params = spec.merged()
    X, y = data.features, data.labels
    if spec.kind != KNN and (y.all() or not y.any()):
        raise SingleClassData(f"{spec.kind} needs both classes in the training data")
    if spec.kind == KNN:
        return KNNModel(X, y, k=int(params["k"]), metric=params["metric"])
    if spec.kind == LOGISTIC_REGRESSION:
        return LogisticModel(
            X,
            y,
            l2=float(params["l2"]),
            tol=float(params["tol"]),
            max_iter=int(params["max_iter"]),
        )
    return RandomForestModel(
        X,
        y,
        trees=int(params["trees"]),
        max_depth=params["max_depth"],
        max_features=int(params["max_features"]),
        seed=seed,
    )


def cross_validate(
    spec: ClassifierSpec, dataset: MLDataset, folds: int = 10, seed: int = 0
) -> CVReport:
    """Stratified seeded k-fold evaluation with expert as the positive class.

    Standardization is fitted on each training split and applied to the
    held-out split, so no information leaks across the boundary.
    """
    if len(dataset) < folds:
        raise TooFewSamples(f"{len(dataset)} rows < {folds} folds")
    if dataset.labels.all() or not dataset.labels.any():
        raise SingleClassData("cross-validation needs both classes")
    fold_indices = stratified_folds(dataset.labels, folds, seed)
    all_indices = np.arange(len(dataset))
    per_fold = []
    for fold_number, test_idx in enumerate(fold_indices):
        train_mask = ~np.isin(all_indices, test_idx)
        train_set = dataset.subset(all_indices[train_mask])
        scaled_train, scaler = standardize(train_set)
        model = train(spec, scaled_train, seed=[seed, fold_number])
        predictions = model.predict(scaler.transform(dataset.features[test_idx]))
        actual = dataset.labels[test_idx]
        tp = int((predictions & actual).sum())
        fp = int((predictions & ~actual).sum())
        fn = int((~predictions & actual).sum())
        per_fold.append(binary_prf(tp, fp, fn))
    return CVReport(
        spec=spec,
        per_fold=tuple(per_fold),
        mean_precision=sum(m[0] for m in per_fold) / folds,
        mean_recall=sum(m[1] for m in per_fold) / folds,
        mean_f=sum(m[2] for m in per_fold) / folds,
    )


def grid_search(
    kind: str,
    dataset: MLDataset,
    grids: dict[str, list] | None = None,
    folds: int = 10,
    seed: int = 0,
) -> tuple[ClassifierSpec, CVReport]:
    """Exhaustive hyperparameter search maximizing mean F-measure.

    Combinations are evaluated in deterministic grid order and ties keep
    the first maximum.
    """
    grid = DEFAULT_GRIDS[kind] if grids is None else grids
    if not grid or not all(grid.values()):
        raise ValueError("hyperparameter grid is empty")
    names = list(grid)
    best: tuple[ClassifierSpec, CVReport] | None = None
    for combo in itertools.product(*(grid[name] for name in names)):
        spec = ClassifierSpec(kind=kind, hyperparameters=dict(zip(names, combo)))
        report = cross_validate(spec, dataset, folds=folds, seed=seed)
        if best is None or report.mean_f > best[1].mean_f:
            best = (spec, report)
    return best
