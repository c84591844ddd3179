from __future__ import annotations

import random

import numpy as np
import pytest

from eeorder.classifiers import TreeParams, train_tree
from eeorder.datasets import Label, OrderedPairExample
from eeorder.embeddings import EmbeddingTable
from eeorder.features import (
    ALL_CLASSES,
    EmbeddingFeature,
    FeatureError,
    FeatureMask,
    build_feature_space,
    chi2_scores,
    choose_k,
    encode,
    encode_matrix,
    importance_proportions,
    linear_importance,
    load_space,
    natural_proportions,
    save_space,
    select_top_k,
)
from eeorder.fixtures import make_pair_dataset
from eeorder.phonology import ZERO, PhonemeClass, Syllable, load_profile


def ex(onset1="p", rhyme1="a", tone1="j", onset2="t", rhyme2="i", tone2="b",
       label=Label.ATTESTED, b1="w1", b2="w2"):
    return OrderedPairExample("x", b1, b2, Syllable(onset1, rhyme1, tone1),
                              Syllable(onset2, rhyme2, tone2), label, "s")


def chi2_expected_counts(a, b, c, d):
    """Independent oracle: the generic sum over (observed-expected)^2/expected."""
    obs = np.array([[a, b], [c, d]], dtype=float)
    n = obs.sum()
    rows = obs.sum(axis=1, keepdims=True)
    cols = obs.sum(axis=0, keepdims=True)
    if n == 0 or (rows == 0).any() or (cols == 0).any():
        return 0.0
    exp = rows @ cols / n
    return float(((obs - exp) ** 2 / exp).sum())


@pytest.fixture(scope="module")
def hmong_profile():
    return load_profile("hmong")


def test_space_sizes(hmong_profile):
    inv = hmong_profile.inventory
    focal = build_feature_space(inv, (PhonemeClass.TONE,))
    assert focal.size == 2 * 8
    full = build_feature_space(inv, ALL_CLASSES)
    assert full.size == 2 * (58 + 14 + 8)
    mixed = build_feature_space(inv, ALL_CLASSES, embedding_dim=100)
    assert mixed.size == 2 * (58 + 14 + 8 + 100) == 360
    emb_only = build_feature_space(inv, (), embedding_dim=100)
    assert emb_only.size == 200


def test_encode_one_active_per_block(hmong_profile, toy):
    inv = toy.inventory
    focal = build_feature_space(inv, (PhonemeClass.TONE,))
    v = encode(ex(), focal)
    assert len(v.indices) == 2
    full = build_feature_space(inv, ALL_CLASSES)
    v = encode(ex(), full)
    assert len(v.indices) == 6
    assert all(val == 1.0 for val in v.values)


def test_encode_with_embeddings(toy):
    inv = toy.inventory
    emb = EmbeddingTable({"w1": 0, "w2": 1},
                         np.array([[0.5, -1.0, 0.0], [2.0, 0.0, 3.0]]))
    space = build_feature_space(inv, ALL_CLASSES, embedding_dim=3)
    v = encode(ex(), space, emb)
    dense = v.to_dense()
    base = space.index_of(EmbeddingFeature("B1", 0))
    assert dense[base:base + 3].tolist() == [0.5, -1.0, 0.0]
    assert dense[base + 3:base + 6].tolist() == [2.0, 0.0, 3.0]
    # OOV token leaves a zero block
    v2 = encode(ex(b2="missing"), space, emb)
    assert v2.to_dense()[base + 3:base + 6].tolist() == [0.0, 0.0, 0.0]


def test_encode_unknown_symbol_raises(toy):
    space = build_feature_space(toy.inventory, ALL_CLASSES)
    with pytest.raises(FeatureError):
        encode(ex(onset1="zz"), space)


def test_encode_zero_onset_leaves_block_empty(toy):
    space = build_feature_space(toy.inventory, ALL_CLASSES)
    v = encode(ex(onset1=ZERO), space)
    assert len(v.indices) == 5


def test_encode_injective_on_all_constituents(toy):
    space = build_feature_space(toy.inventory, ALL_CLASSES)
    rng = random.Random(0)
    inv = toy.inventory
    seen = {}
    for _ in range(300):
        e = ex(rng.choice(inv.onsets), rng.choice(inv.rhymes), rng.choice(inv.tones),
               rng.choice(inv.onsets), rng.choice(inv.rhymes), rng.choice(inv.tones))
        key = tuple(encode(e, space).indices.tolist())
        syllables = (e.b1_syll, e.b2_syll)
        if key in seen:
            assert seen[key] == syllables
        seen[key] = syllables


def test_chi2_closed_form_examples():
    # perfect association, a=d=5: N(ad)^2/(5*5*5*5) = 10
    X = np.array([[1.0]] * 5 + [[0.0]] * 5)
    y = np.array([1] * 5 + [0] * 5)
    assert chi2_scores(X, y)[0] == pytest.approx(10.0, abs=1e-12)
    # a=4,b=1,c=1,d=4 -> 3.6
    X = np.array([[1.0]] * 5 + [[0.0]] * 5)
    y = np.array([1, 1, 1, 1, 0, 0, 1, 0, 0, 0])
    assert chi2_scores(X, y)[0] == pytest.approx(3.6, abs=1e-12)


def test_chi2_independent_feature_scores_zero():
    X = np.array([[1.0], [1.0], [0.0], [0.0]])
    y = np.array([1, 0, 1, 0])
    assert chi2_scores(X, y)[0] == 0.0


def test_chi2_random_configs_match_oracle():
    rng = random.Random(7)
    for _ in range(100):
        a, b, c, d = (rng.randint(0, 12) for _ in range(4))
        if a + b + c + d == 0:
            a = 1
        col = [1.0] * (a + b) + [0.0] * (c + d)
        y = [1] * a + [0] * b + [1] * c + [0] * d
        got = chi2_scores(np.array(col)[:, None], np.array(y))[0]
        assert got == pytest.approx(chi2_expected_counts(a, b, c, d), abs=1e-9)


def test_chi2_rejects_continuous():
    with pytest.raises(FeatureError):
        chi2_scores(np.array([[0.5], [1.0]]), np.array([1, 0]))


def test_chi2_permutation_equivariance():
    rng = np.random.default_rng(0)
    X = (rng.random((40, 6)) > 0.5).astype(float)
    y = (rng.random(40) > 0.5).astype(int)
    base = chi2_scores(X, y)
    perm = [3, 1, 5, 0, 2, 4]
    assert np.allclose(chi2_scores(X[:, perm], y), base[perm])


def test_select_top_k():
    mask = select_top_k(np.array([3.0, 1.0, 2.0]), 2)
    assert mask.selected == (0, 2)
    assert select_top_k(np.array([1.0, 1.0, 1.0]), 1).selected == (0,)
    with pytest.raises(FeatureError):
        select_top_k(np.array([1.0]), 2)


def test_select_top_k_idempotent():
    scores = np.array([5.0, 1.0, 4.0, 2.0])
    mask = select_top_k(scores, 2)
    sub_scores = scores[list(mask.selected)]
    again = select_top_k(sub_scores, 2)
    assert again.selected == (0, 1)


def test_choose_k_planted_signal():
    # exactly 4 informative features: label = at least 2 of the first 4 are on
    rng = np.random.default_rng(3)
    X = (rng.random((600, 16)) > 0.5).astype(float)
    y = (X[:, :4].sum(axis=1) >= 2).astype(int)
    train = (X[:400], y[:400])
    dev = (X[400:], y[400:])
    trainer = lambda Xs, ys: train_tree(Xs, ys, TreeParams(max_depth=6,
                                                           min_samples_leaf=2))
    k = choose_k([2, 4, 8, 16], train, dev, trainer)
    assert k == 4


def test_linear_importance_and_proportions(toy):
    space = build_feature_space(toy.inventory, (PhonemeClass.TONE,))
    w = np.zeros(space.size)
    w[0], w[1], w[2] = 0.5, -2.0, 1.0
    ranked = linear_importance(w, space)
    assert [space.entries.index(f) for f, _ in ranked[:3]] == [1, 2, 0]
    props = importance_proportions(ranked, space.size)
    assert props == natural_proportions(space)
    assert props["tone"] == 1.0
    with pytest.raises(FeatureError):
        linear_importance(np.zeros(3), space)


def test_importance_tone_heavy_on_planted_data(toy):
    data = make_pair_dataset(toy, 800, seed=4)
    emb = EmbeddingTable({e.b1: 0 for e in data} | {e.b2: 0 for e in data},
                         np.zeros((1, 8)))
    # zero embeddings: all signal must sit in the tone block
    space = build_feature_space(toy.inventory, ALL_CLASSES, embedding_dim=8)
    X, y = encode_matrix(data, space, emb)
    from eeorder.classifiers import train_linear_svm
    model = train_linear_svm(X, y, lam=1e-3, epochs=15, seed=0)
    ranked = linear_importance(model.weights, space)
    props = importance_proportions(ranked, 12)
    assert props["tone"] == max(props.values())


def test_space_serialization_round_trip(toy, tmp_path):
    space = build_feature_space(toy.inventory, ALL_CLASSES, embedding_dim=4)
    mask = FeatureMask((0, 3, 9), 3)
    save_space(space, tmp_path / "space.json", mask)
    again, mask2 = load_space(tmp_path / "space.json")
    assert again.entries == space.entries
    assert mask2 == mask
