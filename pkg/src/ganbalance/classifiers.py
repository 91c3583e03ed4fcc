"""The four downstream classifiers: logistic regression, linear SVM, CART
decision tree, and a small MLP.

All four expose the same scoring interface: predict_score returns a class-1
score in [0,1] per row (sigmoid of the margin for the linear models, leaf
class-1 fraction for the tree, softmax probability for the MLP), and
predict_label thresholds it with a strict ``score > threshold`` rule.
Iterative trainers shuffle minibatches with a seeded generator each epoch,
so equal seeds give bit-identical models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ganbalance import kernels, nn
from ganbalance.data import Dataset
from ganbalance.errors import DegenerateDataError, ShapeError

LOGREG_LR = 1e-2
LOGREG_EPOCHS = 200
SVM_LR = 1e-2
SVM_EPOCHS = 200
SVM_LAMBDA = 1e-4
MLP_LR = 1e-5
MLP_EPOCHS = 500
MLP_HIDDEN = 30


@dataclass
class TrainConfig:
    """Shared trainer knobs; None means use the model's default."""

    epochs: int | None = None
    learning_rate: float | None = None
    batch_size: int = 64
    max_depth: int = 8
    min_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.epochs is not None and self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("batch_size, max_depth, min_leaf must be >= 1")


@dataclass
class LogisticModel:
    weights: np.ndarray  # (d,)
    bias: float


@dataclass
class LinearSvmModel:
    weights: np.ndarray  # (d,)
    bias: float
    regularization: float


@dataclass
class TreeNode:
    prob: float  # class-1 fraction of the training rows that reached here
    count: int
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class DecisionTreeModel:
    root: TreeNode
    n_features: int


@dataclass
class MlpModel:
    state: nn.NetworkState
    n_features: int


def mlp_spec(input_dim: int, hidden: int = MLP_HIDDEN):
    """Two hidden layers (relu, then sigmoid) into a 2-way softmax."""
    return [
        nn.dense(input_dim, hidden),
        nn.relu(hidden),
        nn.dense(hidden, hidden),
        nn.sigmoid(hidden),
        nn.dense(hidden, 2),
        nn.softmax(2),
    ]


def _require_two_classes(labels: np.ndarray, what: str) -> None:
    if len(np.unique(labels)) < 2:
        raise DegenerateDataError(f"{what} needs both classes in the training data")


def _epoch_batches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def train_logreg(data: Dataset, config: TrainConfig) -> LogisticModel:
    """Adam on mean binary cross-entropy of sigmoid(w.x + b)."""
    _require_two_classes(data.labels, "logistic regression")
    x = np.ascontiguousarray(data.features, dtype=np.float64)
    y = data.labels.astype(np.float64).reshape(-1, 1)
    d = x.shape[1]
    rng = np.random.default_rng(config.seed)
    spec = [nn.dense(d, 1), nn.sigmoid(1)]
    state = nn.init_state(spec, rng)
    opt = nn.init_adam(state, config.learning_rate or LOGREG_LR)
    for _ in range(config.epochs or LOGREG_EPOCHS):
        for idx in _epoch_batches(len(y), config.batch_size, rng):
            _, cache = nn.forward(spec, state, x[idx], mode="train")
            grads = nn.backward(spec, state, cache, "bce", y[idx])
            nn.adam_step(state, grads, opt)
    params = state.layers[0]
    return LogisticModel(params.weights[:, 0].copy(), float(params.bias[0]))


def train_svm(
    data: Dataset, config: TrainConfig, regularization: float = SVM_LAMBDA
) -> LinearSvmModel:
    """Primal soft-margin SVM: subgradient descent on lambda*|w|^2 + hinge."""
    _require_two_classes(data.labels, "SVM")
    if regularization <= 0:
        raise ValueError("regularization must be positive")
    x = np.ascontiguousarray(data.features, dtype=np.float64)
    y = np.where(data.labels == 1, 1.0, -1.0)
    d = x.shape[1]
    rng = np.random.default_rng(config.seed)
    w = np.zeros(d)
    b = 0.0
    lr = config.learning_rate or SVM_LR
    for _ in range(config.epochs or SVM_EPOCHS):
        for idx in _epoch_batches(len(y), config.batch_size, rng):
            xb = x[idx]
            yb = y[idx]
            violating = yb * (xb @ w + b) < 1.0
            grad_w = 2.0 * regularization * w
            if violating.any():
                grad_w = grad_w - (yb[violating] @ xb[violating]) / len(idx)
                grad_b = -float(np.sum(yb[violating])) / len(idx)
            else:
                grad_b = 0.0
            w -= lr * grad_w
            b -= lr * grad_b
    return LinearSvmModel(w, b, regularization)


def _grow_tree(
    x: np.ndarray, y: np.ndarray, depth: int, config: TrainConfig
) -> TreeNode:
    n = len(y)
    n_pos = int(np.sum(y))
    prob = n_pos / n
    if (
        n_pos in (0, n)
        or depth >= config.max_depth
        or n < 2 * config.min_leaf
    ):
        return TreeNode(prob=prob, count=n)

    # best split over features in ascending index order; strict > keeps the
    # lowest feature index, and the scan itself keeps the lowest threshold
    best_score = -1.0
    best_feature = -1
    best_threshold = 0.0
    for j in range(x.shape[1]):
        order = np.argsort(x[:, j], kind="stable")
        vals = np.ascontiguousarray(x[order, j])
        labs = np.ascontiguousarray(y[order])
        score, threshold, found = kernels.split_scan(vals, labs, config.min_leaf)
        if found and score > best_score:
            best_score = score
            best_feature = j
            best_threshold = float(threshold)
    if best_feature < 0:
        return TreeNode(prob=prob, count=n)

    go_left = x[:, best_feature] <= best_threshold
    return TreeNode(
        prob=prob,
        count=n,
        feature=best_feature,
        threshold=best_threshold,
        left=_grow_tree(x[go_left], y[go_left], depth + 1, config),
        right=_grow_tree(x[~go_left], y[~go_left], depth + 1, config),
    )


def train_tree(data: Dataset, config: TrainConfig) -> DecisionTreeModel:
    """Greedy CART with Gini impurity and midpoint thresholds.

    Candidate splits sit halfway between consecutive distinct sorted values;
    a node splits on the candidate with the largest impurity decrease (even a
    zero decrease, so patterns like XOR still separate), stopping at purity,
    max_depth, or min_leaf.
    """
    x = np.ascontiguousarray(data.features, dtype=np.float64)
    y = data.labels.astype(np.int64)
    if len(y) < 1:
        raise ValueError("decision tree needs at least one row")
    root = _grow_tree(x, y, 0, config)
    return DecisionTreeModel(root, x.shape[1])


def train_mlp(data: Dataset, config: TrainConfig) -> MlpModel:
    """Adam on categorical cross-entropy of the 2-way softmax output."""
    _require_two_classes(data.labels, "MLP")
    x = np.ascontiguousarray(data.features, dtype=np.float64)
    n = x.shape[0]
    onehot = np.zeros((n, 2))
    onehot[np.arange(n), data.labels] = 1.0
    rng = np.random.default_rng(config.seed)
    spec = mlp_spec(x.shape[1])
    state = nn.init_state(spec, rng)
    opt = nn.init_adam(state, config.learning_rate or MLP_LR)
    for _ in range(config.epochs or MLP_EPOCHS):
        for idx in _epoch_batches(n, config.batch_size, rng):
            _, cache = nn.forward(spec, state, x[idx], mode="train")
            grads = nn.backward(spec, state, cache, "categorical_ce", onehot[idx])
            nn.adam_step(state, grads, opt)
    return MlpModel(state, x.shape[1])


def _tree_scores(node: TreeNode, x: np.ndarray, idx: np.ndarray, out: np.ndarray):
    if node.is_leaf:
        out[idx] = node.prob
        return
    go_left = x[idx, node.feature] <= node.threshold
    _tree_scores(node.left, x, idx[go_left], out)
    _tree_scores(node.right, x, idx[~go_left], out)


def _check_width(x: np.ndarray, expected: int) -> None:
    if x.shape[1] != expected:
        raise ShapeError(f"model expects {expected} features, input has {x.shape[1]}")


def predict_score(model, X) -> np.ndarray:
    """Class-1 score in [0,1] per row, suitable for ROC/AUC."""
    x = np.ascontiguousarray(X, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"input must be 2-D, got shape {x.shape}")
    if isinstance(model, (LogisticModel, LinearSvmModel)):
        _check_width(x, len(model.weights))
        margin = x @ model.weights + model.bias
        return 1.0 / (1.0 + np.exp(-margin))
    if isinstance(model, DecisionTreeModel):
        _check_width(x, model.n_features)
        out = np.empty(x.shape[0])
        _tree_scores(model.root, x, np.arange(x.shape[0]), out)
        return out
    if isinstance(model, MlpModel):
        _check_width(x, model.n_features)
        probs, _ = nn.forward(mlp_spec(model.n_features), model.state, x, mode="infer")
        return probs[:, 1]
    raise TypeError(f"unknown model type {type(model).__name__}")


def predict_label(model, X, threshold: float = 0.5) -> np.ndarray:
    """1 iff score strictly exceeds the threshold (exact ties go to 0)."""
    return (predict_score(model, X) > threshold).astype(np.int64)


def _tree_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"prob": node.prob, "count": node.count}
    return {
        "prob": node.prob,
        "count": node.count,
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _tree_to_dict(node.left),
        "right": _tree_to_dict(node.right),
    }


def serialize_model(model) -> dict:
    """Versioned, self-describing dict (JSON-ready) for --save-models."""
    if isinstance(model, LogisticModel):
        body = {"kind": "logreg", "weights": model.weights.tolist(), "bias": model.bias}
    elif isinstance(model, LinearSvmModel):
        body = {
            "kind": "svm",
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "regularization": model.regularization,
        }
    elif isinstance(model, DecisionTreeModel):
        body = {
            "kind": "dt",
            "n_features": model.n_features,
            "root": _tree_to_dict(model.root),
        }
    elif isinstance(model, MlpModel):
        layers = []
        for entry in model.state.layers:
            if isinstance(entry, nn.DenseParams):
                layers.append(
                    {
                        "dense": {
                            "weights": entry.weights.tolist(),
                            "bias": entry.bias.tolist(),
                        }
                    }
                )
            else:
                layers.append(None)
        body = {"kind": "mlp", "n_features": model.n_features, "layers": layers}
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    return {"format": "ganbalance.model.v1", **body}
