"""Classifiers trained on encoded pairs: a CART decision tree whose nodes keep
class counts (the hierarchy induction walks them), a Pegasos-style linear SVM,
and an SMO-trained RBF-kernel SVM. Labels are 0/1 with attested = 1."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class TrainingError(ValueError):
    pass


# --- decision tree -------------------------------------------------------------


@dataclass
class TreeParams:
    max_depth: int = 12
    min_samples_leaf: int = 5
    min_impurity_decrease: float = 0.0


@dataclass
class TreeNode:
    feature: int  # -1 for leaves
    threshold: float
    no: int  # child for x[feature] <= threshold
    yes: int  # child for x[feature] > threshold
    counts: tuple[int, int]  # (attested, unattested) training examples here

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class DecisionTree:
    nodes: list[TreeNode]
    params: TreeParams
    n_features: int

    def predict_one(self, x: np.ndarray) -> int:
        if len(x) != self.n_features:
            raise TrainingError(f"{len(x)} features, tree expects {self.n_features}")
        node = self.nodes[0]
        while not node.is_leaf:
            node = self.nodes[node.yes if x[node.feature] > node.threshold else node.no]
        att, una = node.counts
        return 1 if att >= una else 0  # exact tie predicts attested

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.array([self.predict_one(x) for x in X], dtype=np.int64)

    @property
    def depth(self) -> int:
        def walk(i: int) -> int:
            n = self.nodes[i]
            return 0 if n.is_leaf else 1 + max(walk(n.no), walk(n.yes))
        return walk(0)

    def to_json(self, path: str | Path) -> None:
        doc = {
            "params": {"max_depth": self.params.max_depth,
                       "min_samples_leaf": self.params.min_samples_leaf,
                       "min_impurity_decrease": self.params.min_impurity_decrease},
            "n_features": self.n_features,
            "nodes": [{"feature": n.feature, "threshold": n.threshold,
                       "no": n.no, "yes": n.yes, "counts": list(n.counts)}
                      for n in self.nodes],
        }
        Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")

    @classmethod
    def from_json(cls, path: str | Path) -> "DecisionTree":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        nodes = [TreeNode(n["feature"], n["threshold"], n["no"], n["yes"],
                          (n["counts"][0], n["counts"][1])) for n in doc["nodes"]]
        p = doc.get("params", {})
        return cls(nodes, TreeParams(p.get("max_depth", 12), p.get("min_samples_leaf", 5),
                                     p.get("min_impurity_decrease", 0.0)),
                   doc["n_features"])


def _gini(n1: float, n0: float) -> float:
    n = n1 + n0
    if n == 0:
        return 0.0
    p1 = n1 / n
    return 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1)


def _best_binary_split(X: np.ndarray, y: np.ndarray, binary_cols: np.ndarray,
                       min_leaf: int) -> tuple[float, int, float]:
    """Best (gain, feature, threshold) among 0/1 columns, all at threshold 0.5."""
    n = len(y)
    n1 = float(y.sum())
    parent = _gini(n1, n - n1)
    B = X[:, binary_cols]
    n_yes = B.sum(axis=0)
    n1_yes = y @ B
    n0_yes = n_yes - n1_yes
    n_no = n - n_yes
    n1_no = n1 - n1_yes
    n0_no = n_no - n1_no
    with np.errstate(divide="ignore", invalid="ignore"):
        g_yes = 1.0 - np.where(n_yes > 0, (n1_yes / np.maximum(n_yes, 1)) ** 2
                               + (n0_yes / np.maximum(n_yes, 1)) ** 2, 1.0)
        g_no = 1.0 - np.where(n_no > 0, (n1_no / np.maximum(n_no, 1)) ** 2
                              + (n0_no / np.maximum(n_no, 1)) ** 2, 1.0)
    gains = parent - (n_yes / n) * g_yes - (n_no / n) * g_no
    gains = np.where((n_yes >= min_leaf) & (n_no >= min_leaf), gains, -np.inf)
    if not len(gains) or np.all(np.isinf(gains)):
        return -np.inf, -1, 0.5
    best = int(np.argmax(gains))  # argmax takes the first max: lowest feature wins ties
    return float(gains[best]), int(binary_cols[best]), 0.5


def _best_continuous_split(col: np.ndarray, y: np.ndarray, parent: float,
                           min_leaf: int) -> tuple[float, float]:
    """Best (gain, threshold) for one real-valued column via a sorted sweep."""
    n = len(y)
    order = np.argsort(col, kind="stable")
    sv = col[order]
    sy = y[order]
    cuts = np.nonzero(sv[:-1] != sv[1:])[0]  # split between positions i and i+1
    if len(cuts) == 0:
        return -np.inf, 0.0
    cum1 = np.cumsum(sy)
    n_left = cuts + 1
    n1_left = cum1[cuts]
    n0_left = n_left - n1_left
    n_right = n - n_left
    n1_right = y.sum() - n1_left
    n0_right = n_right - n1_right
    g_left = 1.0 - (n1_left / n_left) ** 2 - (n0_left / n_left) ** 2
    g_right = 1.0 - (n1_right / n_right) ** 2 - (n0_right / n_right) ** 2
    gains = parent - (n_left / n) * g_left - (n_right / n) * g_right
    gains = np.where((n_left >= min_leaf) & (n_right >= min_leaf), gains, -np.inf)
    best = int(np.argmax(gains))
    if np.isinf(gains[best]):
        return -np.inf, 0.0
    thr = (sv[cuts[best]] + sv[cuts[best] + 1]) / 2.0
    return float(gains[best]), float(thr)


def train_tree(X: np.ndarray, y: np.ndarray, params: TreeParams | None = None,
               seed: int = 0) -> DecisionTree:
    """Greedy CART on Gini impurity. Fully deterministic: equal-gain ties go to
    the lowest feature index, so the seed is accepted only for interface
    symmetry with the other trainers."""
    del seed
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y) or len(y) == 0:
        raise TrainingError("need a nonempty 2-D X matrix aligned with y")
    if not np.isin(y, (0, 1)).all():
        raise TrainingError("labels must be 0/1")
    params = params or TreeParams()
    d = X.shape[1]
    is_binary = np.array([np.isin(X[:, j], (0.0, 1.0)).all() for j in range(d)])
    binary_cols = np.nonzero(is_binary)[0]
    cont_cols = np.nonzero(~is_binary)[0]

    nodes: list[TreeNode] = []

    def build(rows: np.ndarray, depth: int) -> int:
        ys = y[rows]
        n1 = int(ys.sum())
        counts = (n1, len(ys) - n1)
        idx = len(nodes)
        nodes.append(TreeNode(-1, 0.0, -1, -1, counts))
        if depth >= params.max_depth or counts[0] == 0 or counts[1] == 0 \
                or len(rows) < 2 * params.min_samples_leaf:
            return idx
        Xs = X[rows]
        parent = _gini(counts[0], counts[1])
        best_gain, best_f, best_thr = -np.inf, -1, 0.0
        if len(binary_cols):
            best_gain, best_f, best_thr = _best_binary_split(
                Xs, ys, binary_cols, params.min_samples_leaf)
        for j in cont_cols:
            gain, thr = _best_continuous_split(Xs[:, j], ys, parent,
                                               params.min_samples_leaf)
            if gain > best_gain + 1e-15 or (gain == best_gain and j < best_f):
                best_gain, best_f, best_thr = gain, int(j), thr
        # a zero-gain split is still taken (XOR needs one at the root); only
        # numerically negative gains or an explicit decrease floor stop growth
        if best_f < 0 or best_gain < params.min_impurity_decrease - 1e-12:
            return idx
        mask = X[rows, best_f] > best_thr
        no_child = build(rows[~mask], depth + 1)
        yes_child = build(rows[mask], depth + 1)
        nodes[idx] = TreeNode(best_f, best_thr, no_child, yes_child, counts)
        return idx

    build(np.arange(len(y)), 0)
    return DecisionTree(nodes, params, d)


# --- linear SVM (Pegasos) ---------------------------------------------------------


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    lam: float

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return np.atleast_2d(X) @ self.weights + self.bias

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)

    def objective(self, X: np.ndarray, y01: np.ndarray) -> float:
        yy = np.where(np.asarray(y01) == 1, 1.0, -1.0)
        margins = yy * self.decision_function(X)
        hinge = np.maximum(0.0, 1.0 - margins).mean()
        reg = 0.5 * self.lam * (self.weights @ self.weights + self.bias ** 2)
        return float(hinge + reg)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps({"weights": self.weights.tolist(),
                                          "bias": self.bias, "lam": self.lam}),
                              encoding="utf-8")

    @classmethod
    def from_json(cls, path: str | Path) -> "LinearModel":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(np.array(doc["weights"]), float(doc["bias"]), float(doc["lam"]))


def train_linear_svm(X: np.ndarray, y: np.ndarray, lam: float = 1e-4,
                     epochs: int = 50, seed: int = 0) -> LinearModel:
    """Primal subgradient descent on hinge loss + (lam/2)||w||^2 with step
    1/(lam*t), examples shuffled every epoch, returning the average of all
    iterates. The bias is learned as a constant-one input, so it shares the
    (negligible for small lam) regularization.
    """
    if lam <= 0:
        raise TrainingError("lam must be positive")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if len(X) != len(y) or len(y) == 0:
        raise TrainingError("need nonempty aligned X, y")
    yy = np.where(y == 1, 1.0, -1.0)
    n, d = X.shape
    rng = np.random.default_rng(seed)
    w = np.zeros(d + 1)  # last slot is the bias
    Xa = np.hstack([X, np.ones((n, 1))])
    w_sum = np.zeros(d + 1)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margin = yy[i] * (w @ Xa[i])
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * yy[i] * Xa[i]
            w_sum += w
    w_avg = w_sum / t
    return LinearModel(w_avg[:-1], float(w_avg[-1]), lam)


# --- RBF-kernel SVM (SMO) ----------------------------------------------------------


@dataclass
class KernelModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for the support set
    gamma: float
    bias: float
    C: float
    converged: bool = True
    alphas: np.ndarray = field(default_factory=lambda: np.zeros(0))  # full, for audits
    train_y: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        K = rbf_kernel(np.atleast_2d(X), self.support_vectors, self.gamma)
        return K @ self.dual_coef + self.bias

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :]
          - 2.0 * (A @ B.T))
    return np.exp(-gamma * np.maximum(sq, 0.0))


def train_rbf_svm(X: np.ndarray, y: np.ndarray, C: float = 1.0,
                  gamma: float | None = None, tol: float = 1e-3,
                  max_passes: int = 200) -> KernelModel:
    """Sequential minimal optimization on the dual, Platt-style: alternate full
    sweeps with sweeps over non-bound multipliers until no pair improves. The
    pair partner is the one maximizing |E1 - E2|, falling back to a scan from
    index 0, so training is deterministic. Non-convergence within the pass cap
    is reported on the model, not raised."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    n_rows = len(y)
    if len(X) != n_rows or n_rows == 0:
        raise TrainingError("need nonempty aligned X, y")
    if C <= 0:
        raise TrainingError("C must be positive")
    if gamma is None:
        gamma = 1.0 / X.shape[1]
    yy_rows = np.where(y == 1, 1.0, -1.0)

    # One-hot encodings repeat rows heavily; identical (x, y) rows are exact
    # dual degenerates, so fold them into one pattern with box C * multiplicity
    # and spread the multiplier back afterwards. Same optimum, far fewer
    # variables for SMO to cycle through.
    groups: dict[bytes, int] = {}
    group_of = np.empty(n_rows, dtype=np.int64)
    rep_rows: list[int] = []
    weight: list[int] = []
    for i in range(n_rows):
        key = X[i].tobytes() + (b"+" if yy_rows[i] > 0 else b"-")
        g = groups.get(key)
        if g is None:
            g = len(rep_rows)
            groups[key] = g
            rep_rows.append(i)
            weight.append(0)
        group_of[i] = g
        weight[g] += 1
    Xp = X[rep_rows]
    yy = yy_rows[rep_rows]
    box = C * np.array(weight, dtype=np.float64)
    n = len(rep_rows)

    K = rbf_kernel(Xp, Xp, gamma)
    alpha = np.zeros(n)
    b = 0.0
    # E[i] = f(x_i) - y_i, kept incrementally up to date
    E = -yy.copy()

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, E
        if i1 == i2:
            return False
        a1, a2 = alpha[i1], alpha[i2]
        y1, y2 = yy[i1], yy[i2]
        E1, E2 = E[i1], E[i2]
        C1, C2 = box[i1], box[i2]
        s = y1 * y2
        if s > 0:
            L, H = max(0.0, a1 + a2 - C1), min(C2, a1 + a2)
        else:
            L, H = max(0.0, a2 - a1), min(C2, C1 + a2 - a1)
        if H - L < 1e-12:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta <= 1e-12:
            # flat direction (duplicate points); some other partner will move i2
            return False
        a2_new = min(H, max(L, a2 + y2 * (E1 - E2) / eta))
        if abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        # pick the bias that zeroes the KKT residual at a freshly non-bound point
        b1 = b - (E1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12)
        b2 = b - (E2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22)
        if 0.0 < a1_new < C1:
            b_new = b1
        elif 0.0 < a2_new < C2:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0
        E += (y1 * (a1_new - a1) * K[i1] + y2 * (a2_new - a2) * K[i2]
              + (b_new - b))
        alpha[i1], alpha[i2] = a1_new, a2_new
        b = b_new
        return True

    def examine(i2: int) -> bool:
        r2 = E[i2] * yy[i2]
        if (r2 < -tol and alpha[i2] < box[i2]) or (r2 > tol and alpha[i2] > 0):
            non_bound = np.nonzero((alpha > 0) & (alpha < box))[0]
            if len(non_bound) > 1:
                i1 = int(non_bound[np.argmax(np.abs(E[i2] - E[non_bound]))])
                if take_step(i1, i2):
                    return True
            for i1 in non_bound:
                if take_step(int(i1), i2):
                    return True
            for i1 in range(n):
                if take_step(i1, i2):
                    return True
        return False

    examine_all = True
    passes = 0
    converged = False
    while passes < max_passes:
        passes += 1
        changed = 0
        targets = range(n) if examine_all else \
            [int(i) for i in np.nonzero((alpha > 0) & (alpha < box))[0]]
        for i in targets:
            changed += examine(i)
        if examine_all:
            if changed == 0:
                converged = True
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    if not converged:
        log.warning("SMO stopped after %d passes without full KKT convergence", passes)

    # spread each pattern's mass evenly over its duplicate rows: every row
    # multiplier lands back inside [0, C]
    alpha_rows = alpha[group_of] / np.array(weight, dtype=np.float64)[group_of]
    support = np.nonzero(alpha_rows > 1e-12)[0]
    return KernelModel(
        support_vectors=X[support],
        dual_coef=alpha_rows[support] * yy_rows[support],
        gamma=gamma, bias=b, C=C, converged=converged,
        alphas=alpha_rows, train_y=yy_rows,
    )
