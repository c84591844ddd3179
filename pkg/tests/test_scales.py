from __future__ import annotations

import itertools

import pytest

from eeorder.classifiers import DecisionTree, TreeNode, TreeParams
from eeorder.datasets import Label, OrderedPairExample
from eeorder.features import FeatureSpace, OneHotFeature
from eeorder.fixtures import make_pair_dataset, toy_language
from eeorder.phonology import ZERO, PhonemeClass, Syllable
from eeorder.scales import (
    ExpectedHalf,
    RandomCoin,
    Scale,
    ScaleError,
    compare_on_scale,
    induce_scale_from_tree,
    load_scale,
    rule_accuracy,
    rule_predict,
    save_scale,
    search_best_scale,
)


def pair(t1: str, t2: str, label: Label) -> OrderedPairExample:
    s1, s2 = Syllable("p", "a", t1), Syllable("t", "i", t2)
    return OrderedPairExample(f"{t1}>{t2}", "w1", "w2", s1, s2, label, "src")


def rhyme_pair(r1: str, r2: str, label: Label) -> OrderedPairExample:
    s1, s2 = Syllable("ph", r1, "^"), Syllable("d", r2, ZERO)
    return OrderedPairExample(f"{r1}>{r2}", "w1", "w2", s1, s2, label, "src")


@pytest.fixture(scope="module")
def hmong_scale() -> Scale:
    from eeorder.phonology import data_dir
    return load_scale(data_dir() / "hmong_table2.scale")


def test_shipped_hmong_scale_examples(hmong_scale):
    assert str(hmong_scale) == "j < b < m < s < v < g < ∅"
    assert hmong_scale.unranked == frozenset({"d"})
    assert rule_predict(hmong_scale, pair("j", ZERO, Label.ATTESTED)) == Label.ATTESTED
    assert rule_predict(hmong_scale, pair(ZERO, "j", Label.UNATTESTED)) == Label.UNATTESTED


def test_shipped_lahu_scale_example():
    from eeorder.phonology import data_dir
    scale = load_scale(data_dir() / "lahu_table2.scale")
    assert scale.focal_class == PhonemeClass.RHYME
    # B1 rhyme o before B2 rhyme i
    assert rule_predict(scale, rhyme_pair("o", "i", Label.ATTESTED)) == Label.ATTESTED


def test_shipped_mc_scale():
    from eeorder.phonology import data_dir
    scale = load_scale(data_dir() / "middle_chinese_table2.scale")
    assert str(scale) == "ping < shang < qu < ru"


def test_compare_and_unknown_symbol(hmong_scale):
    assert compare_on_scale(hmong_scale, "j", "b") == -1
    assert compare_on_scale(hmong_scale, "b", "j") == 1
    assert compare_on_scale(hmong_scale, "j", "j") == 0
    assert compare_on_scale(hmong_scale, "d", "j") == 0  # unranked ties
    with pytest.raises(ScaleError):
        compare_on_scale(hmong_scale, "zz", "j")


def test_tie_needs_coin(hmong_scale):
    tied = pair("j", "j", Label.ATTESTED)
    with pytest.raises(ScaleError):
        rule_predict(hmong_scale, tied, ExpectedHalf())
    coin = RandomCoin(4)
    outcomes = [rule_predict(hmong_scale, tied, coin) for _ in range(20)]
    assert set(outcomes) == {Label.ATTESTED, Label.UNATTESTED}
    again = RandomCoin(4)
    assert [rule_predict(hmong_scale, tied, again) for _ in range(20)] == outcomes


def test_antisymmetry(hmong_scale):
    for t1, t2 in itertools.permutations(["j", "b", "m", "s", "v", "g", ZERO], 2):
        fwd = rule_predict(hmong_scale, pair(t1, t2, Label.ATTESTED))
        bwd = rule_predict(hmong_scale, pair(t2, t1, Label.ATTESTED))
        assert (fwd == Label.ATTESTED) == (bwd == Label.UNATTESTED)


def test_rule_accuracy_on_generator_data(toy):
    data = make_pair_dataset(toy, 500, seed=1)
    assert rule_accuracy(toy.scale, data) == 1.0
    reversed_acc = rule_accuracy(toy.scale.reversed(), data)
    assert reversed_acc == 0.0  # tie-free duality: 1 - accuracy


def test_rule_accuracy_all_ties(hmong_scale):
    tied = [pair("j", "j", Label.ATTESTED) for _ in range(10)]
    assert rule_accuracy(hmong_scale, tied, ExpectedHalf()) == 0.5


def test_rule_accuracy_coin_reproducible(hmong_scale):
    tied = [pair("m", "m", Label.ATTESTED) for _ in range(50)]
    a1 = rule_accuracy(hmong_scale, tied, RandomCoin(3))
    a2 = rule_accuracy(hmong_scale, tied, RandomCoin(3))
    assert a1 == a2


# --- exhaustive search --------------------------------------------------------------


def test_search_recovers_planted_order(toy):
    data = make_pair_dataset(toy, 1500, seed=2)
    scale, acc = search_best_scale(data, list(toy.inventory.tones), PhonemeClass.TONE)
    assert [next(iter(g)) for g in scale.groups] == toy.order
    assert acc == 1.0


def test_search_single_symbol():
    data = [pair("j", "j", Label.ATTESTED)] * 4
    scale, acc = search_best_scale(data, ["j"], PhonemeClass.TONE)
    assert len(scale.groups) == 1
    assert acc == 0.5  # ties only


def test_search_matches_brute_force_oracle():
    # noisy 4-symbol data; oracle re-scores every permutation via rule_accuracy
    toy4 = toy_language(seed=8)
    symbols = toy4.order[:4]
    data = []
    base = make_pair_dataset(toy4, 400, seed=3, noise=0.25)
    data = [e for e in base
            if e.b1_syll.tone in symbols and e.b2_syll.tone in symbols]
    best_scale, best_acc = search_best_scale(data, symbols, PhonemeClass.TONE)
    oracle_best = max(
        (rule_accuracy(Scale.from_order(perm, PhonemeClass.TONE), data), perm)
        for perm in itertools.permutations(symbols))
    assert best_acc == pytest.approx(oracle_best[0], abs=1e-12)
    assert rule_accuracy(best_scale, data) == pytest.approx(oracle_best[0], abs=1e-12)


def test_search_guards_inventory_size():
    data = [pair("j", "b", Label.ATTESTED)]
    with pytest.raises(ScaleError):
        search_best_scale(data, [str(i) for i in range(11)], PhonemeClass.TONE)


# --- induction from trees -----------------------------------------------------------


def tone_space(symbols) -> FeatureSpace:
    return FeatureSpace([OneHotFeature(pos, PhonemeClass.TONE, s)
                         for pos in ("B1", "B2") for s in symbols])


def spine_tree(space: FeatureSpace, steps) -> DecisionTree:
    """A tree that is a pure no-branch spine; each step is
    (position, symbol, yes_child_majority_attested)."""
    nodes: list[TreeNode] = []

    def build(rest) -> int:
        idx = len(nodes)
        if not rest:
            nodes.append(TreeNode(-1, 0.0, -1, -1, (7, 7)))
            return idx
        pos, sym, attested = rest[0]
        nodes.append(TreeNode(-1, 0.0, -1, -1, (0, 0)))  # placeholder
        yes = len(nodes)
        nodes.append(TreeNode(-1, 0.0, -1, -1, (100, 10) if attested else (10, 100)))
        no = build(rest[1:])
        f = space.index_of(OneHotFeature(pos, PhonemeClass.TONE, sym))
        nodes[idx] = TreeNode(f, 0.5, no, yes, (110, 110))
        return idx

    build(list(steps))
    return DecisionTree(nodes, TreeParams(), space.size)


HMONG_TONES = ("j", "b", "m", "s", "v", "g", ZERO)


def test_induce_hmong_tree_shape():
    space = tone_space(HMONG_TONES)
    steps = [("B1", "j", True), ("B1", "b", True), ("B2", ZERO, True),
             ("B2", "g", True), ("B2", "s", True), ("B1", "j", True),
             ("B1", "b", True), ("B1", "m", True), ("B1", "v", True)]
    scale = induce_scale_from_tree(spine_tree(space, steps), space, PhonemeClass.TONE)
    assert str(scale) == "j < b < m < v < s < g < ∅"
    assert scale.unranked == frozenset()


def test_induce_mc_tree_shape():
    space = tone_space(("ping", "shang", "qu", "ru"))
    steps = [("B1", "ping", True), ("B2", "ru", True), ("B2", "qu", True),
             ("B1", "shang", True)]
    scale = induce_scale_from_tree(spine_tree(space, steps), space, PhonemeClass.TONE)
    assert str(scale) == "ping < shang < qu < ru"


def test_induce_unattested_majorities_flip_direction():
    space = tone_space(("a", "b", "c"))
    # (B2, unattested-majority) pushes front; (B1, unattested) pushes back
    steps = [("B2", "a", False), ("B1", "b", False)]
    scale = induce_scale_from_tree(spine_tree(space, steps), space, PhonemeClass.TONE)
    assert str(scale) == "a < b"
    assert scale.unranked == frozenset({"c"})


def test_induce_single_leaf_all_unranked():
    space = tone_space(HMONG_TONES)
    tree = DecisionTree([TreeNode(-1, 0.0, -1, -1, (5, 5))], TreeParams(), space.size)
    scale = induce_scale_from_tree(tree, space, PhonemeClass.TONE)
    assert scale.groups == ()
    assert scale.unranked == frozenset(HMONG_TONES)


def test_induce_skips_balanced_yes_child():
    space = tone_space(("a", "b"))
    nodes = [TreeNode(space.index_of(OneHotFeature("B1", PhonemeClass.TONE, "a")),
                      0.5, 1, 2, (20, 20)),
             TreeNode(-1, 0.0, -1, -1, (10, 10)),
             TreeNode(-1, 0.0, -1, -1, (10, 10))]
    scale = induce_scale_from_tree(DecisionTree(nodes, TreeParams(), space.size),
                                   space, PhonemeClass.TONE)
    assert scale.groups == ()


def test_induce_mismatched_space():
    space = tone_space(("a", "b"))
    nodes = [TreeNode(99, 0.5, 1, 2, (1, 1)),
             TreeNode(-1, 0.0, -1, -1, (1, 0)),
             TreeNode(-1, 0.0, -1, -1, (0, 1))]
    with pytest.raises(ScaleError):
        induce_scale_from_tree(DecisionTree(nodes, TreeParams(), 100), space,
                               PhonemeClass.TONE)


# --- files ------------------------------------------------------------------------


def test_scale_file_round_trip(tmp_path):
    scale = Scale((frozenset({"j"}), frozenset({"b", "m"}), frozenset({ZERO})),
                  frozenset({"d"}), PhonemeClass.TONE)
    save_scale(scale, tmp_path / "s.scale")
    again = load_scale(tmp_path / "s.scale")
    assert again == scale


def test_scale_rejects_double_ranked():
    with pytest.raises(ScaleError):
        Scale((frozenset({"j"}), frozenset({"j"})), frozenset(), PhonemeClass.TONE)
    with pytest.raises(ScaleError):
        Scale((frozenset({"j"}),), frozenset({"j"}), PhonemeClass.TONE)
