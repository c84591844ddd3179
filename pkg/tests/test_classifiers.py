from __future__ import annotations

import numpy as np
import pytest

from eeorder.classifiers import (
    DecisionTree,
    LinearModel,
    TrainingError,
    TreeParams,
    rbf_kernel,
    train_linear_svm,
    train_rbf_svm,
    train_tree,
)


def xor_data(n_per=40, spread=0.15, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    X, y = [], []
    for c in centers:
        X.append(c + spread * rng.normal(size=(n_per, 2)))
        y.extend([int(c[0] * c[1] > 0)] * n_per)
    return np.vstack(X), np.array(y)


def separable_data(n=500, d=20, margin=0.5, seed=0):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=d)
    w /= np.linalg.norm(w)
    X = []
    while len(X) < n:
        batch = rng.normal(size=(n, d))
        keep = np.abs(batch @ w) >= margin
        X.extend(batch[keep])
    X = np.array(X[:n])
    return X, (X @ w >= 0).astype(int)


# --- decision tree -----------------------------------------------------------------


def test_tree_pure_data_single_leaf():
    X = np.ones((10, 3))
    y = np.ones(10, dtype=int)
    tree = train_tree(X, y)
    assert len(tree.nodes) == 1 and tree.nodes[0].is_leaf
    assert tree.nodes[0].counts == (10, 0)
    assert tree.predict(X).tolist() == [1] * 10


def test_tree_xor_exact():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 25, dtype=float)
    y = np.array([0, 1, 1, 0] * 25)
    tree = train_tree(X, y, TreeParams(max_depth=2, min_samples_leaf=1))
    assert (tree.predict(X) == y).all()
    assert tree.depth == 2


def test_tree_node_counts_sum():
    X, y = xor_data()
    tree = train_tree(X, y, TreeParams(max_depth=4, min_samples_leaf=5))
    for node in tree.nodes:
        if not node.is_leaf:
            no, yes = tree.nodes[node.no], tree.nodes[node.yes]
            assert (node.counts[0] == no.counts[0] + yes.counts[0]
                    and node.counts[1] == no.counts[1] + yes.counts[1])
    root = tree.nodes[0].counts
    assert root == (int(y.sum()), int((1 - y).sum()))


def test_tree_determinism_and_serialization(tmp_path):
    X, y = xor_data(seed=3)
    t1 = train_tree(X, y, TreeParams(max_depth=5), seed=0)
    t2 = train_tree(X, y, TreeParams(max_depth=5), seed=99)  # seed is inert
    assert [(n.feature, n.threshold, n.no, n.yes, n.counts) for n in t1.nodes] == \
           [(n.feature, n.threshold, n.no, n.yes, n.counts) for n in t2.nodes]
    t1.to_json(tmp_path / "t.json")
    t3 = DecisionTree.from_json(tmp_path / "t.json")
    assert (t3.predict(X) == t1.predict(X)).all()


def test_tree_accuracy_monotone_in_depth():
    rng = np.random.default_rng(5)
    X = (rng.random((400, 10)) > 0.5).astype(float)
    y = ((X[:, 0] + X[:, 1] * X[:, 2]) >= 1).astype(int)
    prev = 0.0
    for depth in (1, 2, 4, 8):
        tree = train_tree(X, y, TreeParams(max_depth=depth, min_samples_leaf=1))
        acc = float((tree.predict(X) == y).mean())
        assert acc >= prev - 1e-12
        prev = acc


def test_tree_leaf_tie_predicts_attested():
    X = np.array([[0.0], [0.0]])
    y = np.array([1, 0])
    tree = train_tree(X, y, TreeParams(max_depth=3, min_samples_leaf=1))
    assert tree.nodes[0].is_leaf  # constant feature, no split possible
    assert tree.predict(X).tolist() == [1, 1]


def test_tree_rejects_bad_input():
    with pytest.raises(TrainingError):
        train_tree(np.zeros((0, 2)), np.zeros(0, dtype=int))
    with pytest.raises(TrainingError):
        train_tree(np.zeros((3, 2)), np.array([0, 1, 2]))


# --- linear SVM ---------------------------------------------------------------------


def test_linear_svm_two_points():
    X = np.array([[1.0, 0.0], [-1.0, 0.0]])
    y = np.array([1, 0])
    model = train_linear_svm(X, y, lam=0.01, epochs=100, seed=0)
    assert (model.predict(X) == y).all()


def test_linear_svm_separable_perfect():
    X, y = separable_data()
    model = train_linear_svm(X, y, lam=1e-4, epochs=100, seed=1)
    assert (model.predict(X) == y).mean() == 1.0


def test_linear_svm_objective_descends():
    X, y = separable_data(n=200, d=5, seed=2)
    model = train_linear_svm(X, y, lam=1e-3, epochs=20, seed=0)
    init = LinearModel(np.zeros(X.shape[1]), 0.0, model.lam)
    assert model.objective(X, y) <= init.objective(X, y)


def test_linear_svm_duplication_invariance():
    X, y = separable_data(n=150, d=6, margin=0.4, seed=4)
    m1 = train_linear_svm(X, y, lam=1e-3, epochs=60, seed=0)
    Xd = np.vstack([X, X])
    yd = np.concatenate([y, y])
    m2 = train_linear_svm(Xd, yd, lam=1e-3, epochs=30, seed=0)
    cos = (m1.weights @ m2.weights) / (np.linalg.norm(m1.weights)
                                       * np.linalg.norm(m2.weights))
    assert cos > 0.98
    assert (m1.predict(X) == m2.predict(X)).mean() >= 0.99


def test_linear_svm_zero_feature_invariance():
    X, y = separable_data(n=100, d=4, seed=6)
    m1 = train_linear_svm(X, y, lam=1e-3, epochs=40, seed=3)
    m2 = train_linear_svm(np.hstack([X, np.zeros((len(X), 1))]), y,
                          lam=1e-3, epochs=40, seed=3)
    assert (m2.predict(np.hstack([X, np.zeros((len(X), 1))])) == m1.predict(X)).all()


def test_linear_svm_validates_lambda():
    with pytest.raises(TrainingError):
        train_linear_svm(np.zeros((2, 2)), np.array([0, 1]), lam=0.0)


# --- RBF SVM ----------------------------------------------------------------------


def test_rbf_beats_linear_on_xor():
    X, y = xor_data(seed=1)
    rbf = train_rbf_svm(X, y, C=10.0, gamma=1.0)
    assert (rbf.predict(X) == y).mean() >= 0.95
    lin = train_linear_svm(X, y, lam=1e-3, epochs=60, seed=0)
    assert (lin.predict(X) == y).mean() <= 0.75


def test_rbf_dual_feasibility():
    X, y = xor_data(n_per=30, seed=2)
    model = train_rbf_svm(X, y, C=2.0, gamma=0.8)
    assert model.converged
    assert (model.alphas >= -1e-9).all()
    assert (model.alphas <= 2.0 + 1e-9).all()
    assert abs(model.alphas @ model.train_y) < 1e-6


def test_rbf_kkt_residuals_small():
    X, y = xor_data(n_per=25, seed=7)
    C, tol = 5.0, 1e-3
    model = train_rbf_svm(X, y, C=C, gamma=1.0, tol=tol)
    yy = model.train_y
    f = model.decision_function(X)
    r = yy * (f - yy)
    for i in range(len(X)):
        if model.alphas[i] < 1e-9:
            assert r[i] >= -tol - 1e-6
        elif model.alphas[i] > C - 1e-9:
            assert r[i] <= tol + 1e-6
        else:
            assert abs(r[i]) <= tol + 1e-6


def test_rbf_duplicate_support_vector_invariance():
    X, y = xor_data(n_per=25, seed=4)
    m1 = train_rbf_svm(X, y, C=10.0, gamma=1.0)
    sv = m1.support_vectors[0]
    row = np.where((X == sv).all(axis=1))[0][0]
    Xd = np.vstack([X, X[row:row + 1]])
    yd = np.concatenate([y, y[row:row + 1]])
    m2 = train_rbf_svm(Xd, yd, C=10.0, gamma=1.0)
    grid = np.random.default_rng(0).normal(size=(50, 2))
    assert np.max(np.abs(m1.decision_function(grid) - m2.decision_function(grid))) < 1e-3


def test_rbf_tiny_gamma_fallback_floor():
    X, y = xor_data(n_per=20, seed=9)
    model = train_rbf_svm(X, y, C=1.0, gamma=1e-8)
    majority = max(y.mean(), 1 - y.mean())
    assert (model.predict(X) == y).mean() >= majority - 1e-9


def test_rbf_kernel_values():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    K = rbf_kernel(A, A, gamma=0.5)
    assert K[0, 0] == pytest.approx(1.0)
    assert K[0, 1] == pytest.approx(np.exp(-0.5))


def test_rbf_duplicated_onehot_rows_converge():
    # one-hot style data with heavy duplication must not stall SMO
    rng = np.random.default_rng(11)
    patterns = np.eye(6)
    rows = rng.integers(0, 6, size=300)
    X = patterns[rows]
    y = (rows < 3).astype(int)
    model = train_rbf_svm(X, y, C=1.0, gamma=0.5)
    assert model.converged
    assert (model.predict(X) == y).all()
