from __future__ import annotations

import numpy as np
import pytest

from eeorder.datasets import TaggedSentence, extract_ee_spans, generate_swap_corpus
from eeorder.embeddings import EmbeddingParams, train_skipgram
from eeorder.fixtures import make_overlap_corpus, make_tagging_corpus
from eeorder.tagging import (
    TaggerParams,
    WindowTagger,
    baseline_tag,
    evaluate_tags,
    extract_word_embeddings,
    find_candidates,
    in_context_accuracy,
    repair_tags,
    tag_with_model,
    token_features,
    train_window_tagger,
)


def test_find_candidates_basics():
    assert [c.start for c in find_candidates("a b a c d".split())] == [0]
    assert find_candidates("a b c d".split()) == []
    assert find_candidates("a b a b".split()) == []
    assert [c.start for c in find_candidates("a b a b".split(),
                                             exclude_equal_b=False)] == [0]


def test_find_candidates_overlapping_all_returned():
    toks = "a x a y a z a".split()
    starts = [c.start for c in find_candidates(toks)]
    assert starts == [0, 2]  # overlapping candidates are both reported


def test_candidate_fields():
    c = find_candidates("q a x a y".split())[0]
    assert (c.a, c.b1, c.b2, c.start) == ("a", "x", "y", 1)


# --- baseline cascade ---------------------------------------------------------------


def test_baseline_none_stage_full_recall(toy):
    gold = [TaggedSentence("f1 pa tab pa kib f2".split(),
                           ["O", "B", "I", "I", "I", "O"]),
            TaggedSentence("pa tab pa kib".split(), ["B", "I", "I", "I"])]
    pred = baseline_tag([s.tokens for s in gold], stages=())
    m = evaluate_tags(pred, gold)
    assert m.span_recall == 1.0


def test_baseline_overlap_first_come():
    # two overlapping candidates; the left one wins, the right is skipped
    pred = baseline_tag([["a", "x", "a", "y", "a", "z"]], stages=())
    assert pred[0].tags == ["B", "I", "I", "I", "O", "O"]


def test_baseline_stage_validation(toy):
    with pytest.raises(ValueError):
        baseline_tag([["a"]], stages=("similarity",))
    with pytest.raises(ValueError):
        baseline_tag([["a"]], stages=("bogus",))
    with pytest.raises(ValueError):
        baseline_tag([["a"]], stages=("parsable",))  # no profile


def test_baseline_parsable_stage(toy):
    sents = [["pab", "tam", "pab", "kij"], ["zq9", "tam", "zq9", "kij"]]
    pred = baseline_tag(sents, toy.profile, stages=("parsable",))
    assert pred[0].tags == ["B", "I", "I", "I"]
    assert pred[1].tags == ["O", "O", "O", "O"]


def test_baseline_scale_stage(toy):
    lo, hi = toy.order[0], toy.order[-1]
    tok = lambda t: "pa" + ("" if t == "∅" else t)
    good = ["ka", tok(lo), "ka", tok(hi)]
    bad = ["ka", tok(hi), "ka", tok(lo)]
    pred = baseline_tag([good, bad], toy.profile, scale=toy.scale,
                        stages=("parsable", "scale"))
    assert pred[0].tags == ["B", "I", "I", "I"]
    assert pred[1].tags == ["O", "O", "O", "O"]


def test_baseline_filter_monotonicity(toy):
    fx = make_tagging_corpus(n_sentences=1200, n_ees=60, n_distractors=120, seed=3)
    raw = [s.tokens for s in fx.corpus]
    emb = train_skipgram(raw, EmbeddingParams(dim=16, window=2, negatives=5,
                                              epochs=2, min_count=2, lr=0.05, seed=1))
    chains = [(), ("parsable",), ("parsable", "similarity"),
              ("parsable", "similarity", "scale")]
    prev_spans, prev_recall = None, None
    for stages in chains:
        pred = baseline_tag(raw, fx.toy.profile, emb, fx.toy.scale, 0.4, stages)
        n_spans = sum(t == "B" for s in pred for t in s.tags)
        m = evaluate_tags(pred, fx.corpus)
        if prev_spans is not None:
            assert n_spans <= prev_spans
            assert m.span_recall <= prev_recall
        prev_spans, prev_recall = n_spans, m.span_recall


# --- repair and evaluation ----------------------------------------------------------


def test_repair_rules():
    fixed, n = repair_tags(["B", "I", "I", "O"])
    assert fixed == ["O", "O", "O", "O"] and n == 1
    fixed, n = repair_tags(["B", "I", "I", "I"])
    assert fixed == ["B", "I", "I", "I"] and n == 0
    fixed, n = repair_tags(["B", "I", "I", "I", "I"])
    assert fixed == ["B", "I", "I", "I", "O"] and n == 1
    fixed, n = repair_tags(["O", "I", "I", "O"])
    assert fixed == ["O", "O", "O", "O"] and n == 1
    fixed, n = repair_tags(["B-fake", "I-fake", "I-fake", "I-fake", "B", "I", "I", "I"])
    assert n == 0 and fixed[0] == "B-fake" and fixed[4] == "B"
    # mismatched I type breaks the run
    fixed, n = repair_tags(["B", "I-fake", "I", "I"])
    assert fixed == ["O", "O", "O", "O"]


def test_tag_with_model_all_o():
    model = WindowTagger(("O", "B", "I"), {"bias": 0}, np.zeros((3, 1)))
    out = tag_with_model(model, [["a", "b", "a", "c"]])
    assert out[0].tags == ["O", "O", "O", "O"]


def test_evaluate_identity():
    gold = [TaggedSentence("a x a y z".split(), ["B", "I", "I", "I", "O"])]
    m = evaluate_tags(gold, gold)
    assert (m.token_f1, m.span_f1) == (1.0, 1.0)
    assert m.confusion.sum() == 5


def test_evaluate_half_precision_full_recall():
    gold = [TaggedSentence(list("abcdqrst"),
                           ["B", "I", "I", "I", "O", "O", "O", "O"])]
    pred = [TaggedSentence(list("abcdqrst"),
                           ["B", "I", "I", "I", "B", "I", "I", "I"])]
    m = evaluate_tags(pred, gold)
    assert m.span_precision == 0.5
    assert m.span_recall == 1.0
    assert m.span_f1 == pytest.approx(2 / 3)


def test_evaluate_alignment_check():
    gold = [TaggedSentence(["a"], ["O"])]
    pred = [TaggedSentence(["a", "b"], ["O", "O"])]
    with pytest.raises(Exception):
        evaluate_tags(pred, gold)


def test_in_context_accuracy_worked_example():
    tags = ("O", "B", "I", "B-fake", "I-fake")
    cm = np.zeros((5, 5), dtype=int)
    cm[1, 1] = 439   # B right
    cm[3, 3] = 447   # B-fake right
    cm[1, 3] = 4     # B confused as B-fake
    cm[3, 1] = 0
    acc = in_context_accuracy(cm, tags)
    assert acc == pytest.approx(0.9955, abs=1e-4)
    perfect = np.eye(5, dtype=int) * 10
    assert in_context_accuracy(perfect, tags) == 1.0
    sym = np.zeros((5, 5), dtype=int)
    sym[1, 1] = sym[1, 3] = sym[3, 1] = sym[3, 3] = 1
    assert in_context_accuracy(sym, tags) == 0.5
    with pytest.raises(ZeroDivisionError):
        in_context_accuracy(np.zeros((5, 5), dtype=int), tags)


# --- window tagger -----------------------------------------------------------------


def test_token_features_match_indicators():
    toks = "a x a y".split()
    feats = token_features(toks, 0, None, False)
    assert "match[+2]" in feats and "match[-2]" not in feats
    feats = token_features(toks, 2, None, False)
    assert "match[-2]" in feats
    assert "w[0]=a" in feats and "w[-2]=a" in feats


def test_tagger_early_stopping_patience():
    sent = TaggedSentence("q a x a y r".split(), ["O", "B", "I", "I", "I", "O"])
    train = [sent.copy() for _ in range(12)]
    dev = [sent.copy()]
    model = train_window_tagger(train, dev, TaggerParams(lr=0.5, max_epochs=40,
                                                         patience=10, seed=0))
    h = model.history
    assert h["epochs_run"] == h["best_epoch"] + 10
    assert h["epochs_run"] <= 13
    assert h["best_dev_span_f1"] == 1.0


def test_tagger_determinism():
    ov = make_overlap_corpus(n_pairs=8, n_negatives=100, seed=5)
    p = TaggerParams(lr=0.2, max_epochs=5, patience=3, seed=2)
    m1 = train_window_tagger(ov.train, ov.dev, p)
    m2 = train_window_tagger(ov.train, ov.dev, p)
    assert np.array_equal(m1.weights, m2.weights)


def test_tagger_five_tag_swap_variant():
    fx = make_tagging_corpus(n_sentences=400, n_ees=30, n_distractors=30,
                             ee_occurrences=4, seed=2)
    swapped = generate_swap_corpus(fx.corpus, swap_frac=0.5, seed=1)
    model = train_window_tagger(swapped, swapped[:80],
                                TaggerParams(lr=0.3, max_epochs=8, patience=5, seed=0))
    assert set(model.tags) == {"O", "B", "I", "B-fake", "I-fake"}
    pred = tag_with_model(model, [s.tokens for s in swapped])
    kinds = {s.fake for s in extract_ee_spans(pred)}
    assert kinds == {True, False}


def test_tagger_beats_none_stage_baseline_on_overlap_corpus():
    ov = make_overlap_corpus(n_pairs=15, n_negatives=300, seed=6)
    model = train_window_tagger(ov.train, ov.dev,
                                TaggerParams(lr=0.2, max_epochs=15, patience=5, seed=1))
    test_tokens = [s.tokens for s in ov.test]
    m_tagger = evaluate_tags(tag_with_model(model, test_tokens), ov.test)
    m_base = evaluate_tags(baseline_tag(test_tokens, stages=()), ov.test)
    assert m_tagger.span_f1 > m_base.span_f1


def test_extract_word_embeddings(toy):
    ov = make_overlap_corpus(n_pairs=6, n_negatives=50, seed=8)
    model = train_window_tagger(ov.train, ov.dev,
                                TaggerParams(lr=0.2, max_epochs=4, patience=2, seed=0))
    emb = extract_word_embeddings(model)
    assert emb.metadata["source"] == "wv-tagger-standin"
    assert emb.dim == len(model.tags) * 5
    b1 = ov.train_records[0].b1
    assert b1 in emb
    assert np.any(emb.vector(b1) != 0)
