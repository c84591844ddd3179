"""EE detection in running text.

Two detectors share one evaluation path: the cascaded rule baseline (tag every
A-X-A-Y candidate, then filter by parsability, word-vector similarity, and the
ordering scale) and a trainable windowed log-linear tagger that stands in for
heavier sequence models at desk scale.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .datasets import SPAN_LEN, TAGS, DataError, TaggedCorpus, TaggedSentence, validate_tags
from .embeddings import EmbeddingTable, OOVError, cosine
from .phonology import LanguageProfile, try_parse_syllable
from .scales import Scale, compare_on_scale, focal_symbol

log = logging.getLogger(__name__)

BASELINE_STAGES = ("parsable", "similarity", "scale")


@dataclass
class CandidateSpan:
    sent: int
    start: int
    tokens: tuple[str, str, str, str]  # w1 w2 w3 w4 with w1 == w3
    diagnostics: dict = field(default_factory=dict)

    @property
    def a(self) -> str:
        return self.tokens[0]

    @property
    def b1(self) -> str:
        return self.tokens[1]

    @property
    def b2(self) -> str:
        return self.tokens[3]


def find_candidates(sentence: Sequence[str], sent_index: int = 0,
                    exclude_equal_b: bool = True) -> list[CandidateSpan]:
    """All 4-grams whose first and third tokens match. Overlaps are all kept;
    w2 = w4 candidates are dropped unless exclude_equal_b is off."""
    out = []
    for i in range(len(sentence) - SPAN_LEN + 1):
        if sentence[i] != sentence[i + 2]:
            continue
        if exclude_equal_b and sentence[i + 1] == sentence[i + 3]:
            continue
        out.append(CandidateSpan(sent_index, i, tuple(sentence[i:i + SPAN_LEN])))
    return out


def baseline_tag(corpus: Sequence[Sequence[str]], profile: LanguageProfile | None = None,
                 emb: EmbeddingTable | None = None, scale: Scale | None = None,
                 alpha: float = 0.4, stages: Sequence[str] = ()) -> TaggedCorpus:
    """Tag every candidate that survives the enabled filters as B I I I.

    Filters, in cascade order: (1) parsable: A, B1, B2 all decompose into
    syllables; (2) similarity: cosine(B1, B2) > alpha, OOV rejects;
    (3) scale: the pair must not strictly violate the ordering scale (ties
    pass, so the cascade stays deterministic). Overlapping candidates are
    resolved first-come, left to right.
    """
    stages = tuple(stages)
    unknown = [s for s in stages if s not in BASELINE_STAGES]
    if unknown:
        raise ValueError(f"unknown stages {unknown}; choose from {BASELINE_STAGES}")
    if "parsable" in stages or "scale" in stages:
        if profile is None:
            raise ValueError("parsable/scale stages need a language profile")
    if "similarity" in stages and emb is None:
        raise ValueError("similarity stage needs an embedding table")
    if "scale" in stages and scale is None:
        raise ValueError("scale stage needs a scale")

    out: TaggedCorpus = []
    for si, sent in enumerate(corpus):
        tags = ["O"] * len(sent)
        occupied = [False] * len(sent)
        for cand in find_candidates(sent, si):
            if any(occupied[cand.start:cand.start + SPAN_LEN]):
                continue
            if not _passes_filters(cand, profile, emb, scale, alpha, stages):
                continue
            tags[cand.start] = "B"
            for j in range(cand.start + 1, cand.start + SPAN_LEN):
                tags[j] = "I"
            for j in range(cand.start, cand.start + SPAN_LEN):
                occupied[j] = True
        out.append(TaggedSentence(list(sent), tags))
    return out


def _passes_filters(cand: CandidateSpan, profile: LanguageProfile | None,
                    emb: EmbeddingTable | None, scale: Scale | None,
                    alpha: float, stages: tuple[str, ...]) -> bool:
    if "parsable" in stages or "scale" in stages:
        assert profile is not None
        sylls = {w: try_parse_syllable(profile.inventory, w)
                 for w in (cand.a, cand.b1, cand.b2)}
        cand.diagnostics["parsable"] = all(s is not None for s in sylls.values())
        if "parsable" in stages and not cand.diagnostics["parsable"]:
            return False
    if "similarity" in stages:
        assert emb is not None
        try:
            sim = cosine(emb, cand.b1, cand.b2)
        except OOVError:
            cand.diagnostics["cos_sim"] = None
            return False
        cand.diagnostics["cos_sim"] = sim
        if not sim > alpha:
            return False
    if "scale" in stages:
        assert scale is not None and profile is not None
        s1 = try_parse_syllable(profile.inventory, cand.b1)
        s2 = try_parse_syllable(profile.inventory, cand.b2)
        if s1 is None or s2 is None:
            cand.diagnostics["scale_ok"] = False
            return False
        ok = compare_on_scale(scale, focal_symbol(scale, s1), focal_symbol(scale, s2)) <= 0
        cand.diagnostics["scale_ok"] = ok
        if not ok:
            return False
    return True


# --- windowed log-linear tagger -----------------------------------------------------

PAD_LEFT = "<s>"
PAD_RIGHT = "</s>"
OFFSETS = (-2, -1, 0, 1, 2)


@dataclass
class TaggerParams:
    lr: float = 0.2
    max_epochs: int = 40
    patience: int = 10
    seed: int = 0
    use_phonemes: bool = False
    neg_fraction: float = 0.9  # share of training sentences that carry no EE


def token_features(tokens: Sequence[str], i: int, profile: LanguageProfile | None,
                   use_phonemes: bool) -> list[str]:
    feats = ["bias"]
    n = len(tokens)
    for off in OFFSETS:
        j = i + off
        tok = PAD_LEFT if j < 0 else (PAD_RIGHT if j >= n else tokens[j])
        feats.append(f"w[{off}]={tok}")
        if use_phonemes and 0 <= j < n:
            assert profile is not None
            s = try_parse_syllable(profile.inventory, tok)
            if s is None:
                feats.append(f"noparse[{off}]")
            else:
                feats.append(f"on[{off}]={s.onset}")
                feats.append(f"rh[{off}]={s.rhyme}")
                feats.append(f"tn[{off}]={s.tone}")
    if i - 2 >= 0 and tokens[i - 2] == tokens[i]:
        feats.append("match[-2]")
    if i + 2 < n and tokens[i + 2] == tokens[i]:
        feats.append("match[+2]")
    return feats


@dataclass
class WindowTagger:
    tags: tuple[str, ...]
    feat_index: dict[str, int]
    weights: np.ndarray  # n_tags x n_feats
    use_phonemes: bool = False
    profile: LanguageProfile | None = None
    history: dict = field(default_factory=dict)

    def _scores(self, feats: Sequence[str]) -> np.ndarray:
        cols = [self.feat_index[f] for f in feats if f in self.feat_index]
        if not cols:
            return np.zeros(len(self.tags))
        return self.weights[:, cols].sum(axis=1)

    def tag_tokens(self, tokens: Sequence[str]) -> list[str]:
        """Raw per-token argmax tags, before any well-formedness repair."""
        out = []
        for i in range(len(tokens)):
            feats = token_features(tokens, i, self.profile, self.use_phonemes)
            out.append(self.tags[int(np.argmax(self._scores(feats)))])
        return out

    def save(self, path: str | Path) -> None:
        doc = {"tags": list(self.tags), "features": list(self.feat_index),
               "weights": self.weights.tolist(), "use_phonemes": self.use_phonemes,
               "language": self.profile.language if self.profile else None,
               "history": self.history}
        Path(path).write_text(json.dumps(doc), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, profile: LanguageProfile | None = None
             ) -> "WindowTagger":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(tuple(doc["tags"]), {f: i for i, f in enumerate(doc["features"])},
                   np.array(doc["weights"]), doc["use_phonemes"], profile,
                   doc.get("history", {}))


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    return shifted - np.log(np.exp(shifted).sum())


def train_window_tagger(train: TaggedCorpus, dev: TaggedCorpus,
                        params: TaggerParams | None = None,
                        profile: LanguageProfile | None = None) -> WindowTagger:
    """Multiclass logistic regression over window features, SGD with per-epoch
    shuffling. Sentences without any EE are down-sampled each epoch so they
    make up at most neg_fraction of the epoch; early stopping watches dev
    span-F1 with the configured patience and restores the best weights.
    """
    params = params or TaggerParams()
    if params.use_phonemes and profile is None:
        raise ValueError("phoneme features need a language profile")
    if not train:
        raise DataError("empty training corpus")
    tag_set: dict[str, bool] = {}
    for corpus in (train, dev):
        for sent in corpus:
            validate_tags(sent)
            for t in sent.tags:
                tag_set[t] = True
    tags = tuple(t for t in TAGS if t in tag_set)
    has_fakes_train = any(t in ("B-fake", "I-fake") for s in train for t in s.tags)
    has_fakes_dev = any(t in ("B-fake", "I-fake") for s in dev for t in s.tags)
    if dev and has_fakes_train != has_fakes_dev and (has_fakes_train or has_fakes_dev):
        log.warning("train/dev corpora disagree on fake tags; the union tag set is used")
    tag_idx = {t: i for i, t in enumerate(tags)}

    feat_index: dict[str, int] = {}
    featurized: list[list[list[int]]] = []
    for sent in train:
        rows = []
        for i in range(len(sent.tokens)):
            cols = []
            for f in token_features(sent.tokens, i, profile, params.use_phonemes):
                if f not in feat_index:
                    feat_index[f] = len(feat_index)
                cols.append(feat_index[f])
            rows.append(cols)
        featurized.append(rows)

    positives = [i for i, s in enumerate(train) if any(t != "O" for t in s.tags)]
    negatives = [i for i, s in enumerate(train) if all(t == "O" for t in s.tags)]
    if params.neg_fraction < 1.0 and positives:
        neg_per_epoch = round(len(positives) * params.neg_fraction
                              / (1.0 - params.neg_fraction))
    else:
        neg_per_epoch = len(negatives)

    W = np.zeros((len(tags), len(feat_index)))
    rng = random.Random(params.seed)
    best_w = W.copy()
    best_f1 = -1.0
    best_epoch = 0
    since_best = 0
    history: list[float] = []
    model = WindowTagger(tags, feat_index, W, params.use_phonemes, profile)

    for epoch in range(1, params.max_epochs + 1):
        sampled_neg = negatives if neg_per_epoch >= len(negatives) else \
            rng.sample(negatives, neg_per_epoch)
        order = positives + list(sampled_neg)
        rng.shuffle(order)
        for si in order:
            sent = train[si]
            for i, cols in enumerate(featurized[si]):
                scores = W[:, cols].sum(axis=1)
                p = np.exp(_log_softmax(scores))
                p[tag_idx[sent.tags[i]]] -= 1.0
                W[:, cols] -= params.lr * p[:, None]
        if dev:
            pred = tag_with_model(model, [s.tokens for s in dev])
            f1 = evaluate_tags(pred, dev).span_f1
        else:
            f1 = 0.0
        history.append(f1)
        if f1 > best_f1 + 1e-12:
            best_f1, best_epoch, since_best = f1, epoch, 0
            best_w = W.copy()
        else:
            since_best += 1
            if since_best >= params.patience:
                break

    model.weights = best_w if dev else W
    model.history = {"epochs_run": len(history), "best_epoch": best_epoch,
                     "best_dev_span_f1": best_f1, "dev_span_f1": history}
    return model


def repair_tags(tags: Sequence[str]) -> tuple[list[str], int]:
    """Make a raw tag sequence well-formed: keep exactly-4-token spans anchored
    at a B, trim longer runs, drop shorter ones and orphan I tags. Returns the
    repaired tags and the number of repaired runs."""
    out = ["O"] * len(tags)
    repairs = 0
    i = 0
    while i < len(tags):
        tag = tags[i]
        if tag in ("B", "B-fake"):
            itag = "I" if tag == "B" else "I-fake"
            j = i + 1
            while j < len(tags) and tags[j] == itag:
                j += 1
            run = j - i
            if run >= SPAN_LEN:
                out[i] = tag
                for k in range(i + 1, i + SPAN_LEN):
                    out[k] = itag
                if run > SPAN_LEN:
                    repairs += 1  # trimmed
            else:
                repairs += 1  # dropped: too short to be a span
            i = j
        elif tag in ("I", "I-fake"):
            j = i + 1
            while j < len(tags) and tags[j] == tag:
                j += 1
            repairs += 1  # orphan run
            i = j
        else:
            i += 1
    return out, repairs


def tag_with_model(model: WindowTagger, corpus: Sequence[Sequence[str]]
                   ) -> TaggedCorpus:
    """Per-token argmax followed by the repair pass; repair counts are logged."""
    out: TaggedCorpus = []
    total_repairs = 0
    for sent in corpus:
        raw = model.tag_tokens(sent)
        fixed, n = repair_tags(raw)
        total_repairs += n
        out.append(TaggedSentence(list(sent), fixed))
    if total_repairs:
        log.info("repaired %d ill-formed tag runs", total_repairs)
    return out


# --- evaluation -------------------------------------------------------------------


@dataclass
class TagMetrics:
    token_precision: float
    token_recall: float
    token_f1: float
    span_precision: float
    span_recall: float
    span_f1: float
    confusion: np.ndarray  # rows gold, columns predicted, in TAGS order
    tag_order: tuple[str, ...] = TAGS


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _spans(corpus: TaggedCorpus) -> set[tuple[int, int, str]]:
    spans = set()
    for si, sent in enumerate(corpus):
        validate_tags(sent, where=f"sentence {si}")
        for i, tag in enumerate(sent.tags):
            if tag in ("B", "B-fake"):
                spans.add((si, i, tag))
    return spans


def evaluate_tags(pred: TaggedCorpus, gold: TaggedCorpus) -> TagMetrics:
    """Token-level micro P/R/F1 over non-O tags, span-level exact-match P/R/F1,
    and the full confusion matrix."""
    if len(pred) != len(gold) or any(len(p.tokens) != len(g.tokens)
                                     for p, g in zip(pred, gold)):
        raise DataError("pred/gold corpora are not aligned token-for-token")
    idx = {t: i for i, t in enumerate(TAGS)}
    cm = np.zeros((len(TAGS), len(TAGS)), dtype=np.int64)
    for p, g in zip(pred, gold):
        for pt, gt in zip(p.tags, g.tags):
            cm[idx[gt], idx[pt]] += 1
    non_o = [i for t, i in idx.items() if t != "O"]
    tp = sum(cm[i, i] for i in non_o)
    fp = sum(cm[:, i].sum() - cm[i, i] for i in non_o)
    fn = sum(cm[i, :].sum() - cm[i, i] for i in non_o)
    tok_p = tp / (tp + fp) if tp + fp else 0.0
    tok_r = tp / (tp + fn) if tp + fn else 0.0

    gold_spans = _spans(gold)
    pred_spans = _spans(pred)
    hit = len(gold_spans & pred_spans)
    span_p = hit / len(pred_spans) if pred_spans else 0.0
    span_r = hit / len(gold_spans) if gold_spans else 0.0

    return TagMetrics(tok_p, tok_r, _f1(tok_p, tok_r),
                      span_p, span_r, _f1(span_p, span_r), cm)


def in_context_accuracy(cm: np.ndarray, tag_order: Sequence[str] = TAGS) -> float:
    """Among tokens detected as a span start, the share whose real-vs-swapped
    status is right: confusions with O and I are excluded by construction."""
    idx = {t: i for i, t in enumerate(tag_order)}
    if "B" not in idx or "B-fake" not in idx:
        raise ValueError("confusion matrix lacks B / B-fake rows")
    b, bf = idx["B"], idx["B-fake"]
    correct = cm[b, b] + cm[bf, bf]
    wrong = cm[b, bf] + cm[bf, b]
    if correct + wrong == 0:
        raise ZeroDivisionError("no detected span starts to score")
    return float(correct / (correct + wrong))


def extract_word_embeddings(model: WindowTagger) -> EmbeddingTable:
    """Per-word vectors read off the tagger's word-identity weights: for each
    word, the learned weight of "w[off]=word" for every tag and window offset.
    A stand-in for embeddings from heavier taggers; labeled as such."""
    words: dict[str, int] = {}
    for f in model.feat_index:
        if f.startswith("w[0]="):
            tok = f[len("w[0]="):]
            if tok not in (PAD_LEFT, PAD_RIGHT):
                words.setdefault(tok, len(words))
    dim = len(model.tags) * len(OFFSETS)
    vecs = np.zeros((len(words), dim))
    for tok, row in words.items():
        col = 0
        for off in OFFSETS:
            f = f"w[{off}]={tok}"
            if f in model.feat_index:
                vecs[row, col:col + len(model.tags)] = model.weights[:, model.feat_index[f]]
            col += len(model.tags)
    return EmbeddingTable(words, vecs, metadata={"source": "wv-tagger-standin",
                                                 "dim": dim}, trained=True)
