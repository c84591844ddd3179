"""Classification experiment matrix: language x feature set x classifier, with
seeded splits, chi-square/weight-based top-K selection tuned on a dev split,
and unique-pair subset averaging."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .classifiers import (
    TreeParams,
    train_linear_svm,
    train_rbf_svm,
    train_tree,
)
from .datasets import Record, SplitSpec, sample_unique_pairs, split_then_augment
from .embeddings import EmbeddingTable
from .features import (
    ALL_CLASSES,
    FeatureSpace,
    build_feature_space,
    chi2_scores,
    choose_k,
    encode_matrix,
    importance_proportions,
    linear_importance,
    natural_proportions,
    select_top_k,
)
from .phonology import LanguageProfile
from .scales import Scale, rule_accuracy

FEATURE_SETS = ("focal", "all", "all+embeddings", "embeddings-only")
CLASSIFIERS = ("rules", "tree", "linear-svm", "rbf-svm")
K_ALL = 10 ** 9  # clamps to the space size in choose_k
DEFAULT_K_GRID = (6, 12, 25, 50, 100, K_ALL)


@dataclass
class ExperimentConfig:
    language: str
    classifiers: tuple[str, ...] = ("rules", "tree", "rbf-svm")
    feature_sets: tuple[str, ...] = ("focal", "all")
    seed: int = 13
    unique_pairs: bool = False
    repetitions: int = 10
    k_grid: tuple[int, ...] = DEFAULT_K_GRID
    split: tuple[float, float, float] = (0.56, 0.14, 0.30)
    embeddings_source: str | None = None  # "skipgram" | "tagger-standin"
    tree: TreeParams = field(default_factory=TreeParams)
    svm_c: float = 1.0
    svm_gamma: float | None = None
    svm_lambda: float = 1e-4
    svm_epochs: int = 30

    def __post_init__(self) -> None:
        bad = [c for c in self.classifiers if c not in CLASSIFIERS]
        if bad:
            raise ValueError(f"unknown classifiers {bad}; choose from {CLASSIFIERS}")
        bad = [f for f in self.feature_sets if f not in FEATURE_SETS]
        if bad:
            raise ValueError(f"unknown feature sets {bad}; choose from {FEATURE_SETS}")

    def split_spec(self, seed: int, repetitions: int = 1) -> SplitSpec:
        return SplitSpec(*self.split, seed=seed, repetitions=repetitions)


@dataclass
class RowResult:
    language: str
    data_mode: str  # "all" or "unique"
    classifier: str
    feature_set: str
    accuracy: float
    n_examples: int
    runs: int
    k_selected: int | None = None

    def as_dict(self) -> dict:
        return {"language": self.language, "data": self.data_mode,
                "classifier": self.classifier, "features": self.feature_set,
                "accuracy": round(self.accuracy, 4), "n": self.n_examples,
                "runs": self.runs,
                "k": "" if self.k_selected is None else self.k_selected}


@dataclass
class ExperimentReport:
    config: dict
    rows: list[RowResult]
    fingerprint: dict

    def as_rows(self) -> list[dict]:
        return [r.as_dict() for r in self.rows]


def _space_for(feature_set: str, profile: LanguageProfile,
               emb: EmbeddingTable | None) -> FeatureSpace:
    if feature_set in ("all+embeddings", "embeddings-only") and emb is None:
        raise ValueError(f"feature set {feature_set!r} needs an embedding table")
    if feature_set == "focal":
        return build_feature_space(profile.inventory, (profile.focal,))
    if feature_set == "all":
        return build_feature_space(profile.inventory, ALL_CLASSES)
    if feature_set == "all+embeddings":
        return build_feature_space(profile.inventory, ALL_CLASSES, emb.dim)
    if feature_set == "embeddings-only":
        return build_feature_space(profile.inventory, (), emb.dim)
    raise ValueError(f"unknown feature set {feature_set!r}")


def _trainer(classifier: str, cfg: ExperimentConfig, seed: int):
    if classifier == "tree":
        return lambda X, y: train_tree(X, y, cfg.tree, seed)
    if classifier == "linear-svm":
        return lambda X, y: train_linear_svm(X, y, cfg.svm_lambda, cfg.svm_epochs, seed)
    if classifier == "rbf-svm":
        return lambda X, y: train_rbf_svm(X, y, cfg.svm_c, cfg.svm_gamma)
    raise ValueError(f"no trainer for {classifier!r}")


def _run_once(records: Sequence[Record], profile: LanguageProfile, classifier: str,
              feature_set: str, cfg: ExperimentConfig, seed: int,
              emb: EmbeddingTable | None, scale: Scale | None
              ) -> tuple[float, int, int | None]:
    """One split -> select -> train -> test pass; returns (accuracy, N, k)."""
    split = split_then_augment(records, cfg.split_spec(seed))
    n_total = len(split.train) + len(split.dev) + len(split.test)
    if classifier == "rules":
        if scale is None:
            raise ValueError("rules classifier needs a scale")
        return rule_accuracy(scale, split.test), n_total, None

    space = _space_for(feature_set, profile, emb)
    X_tr, y_tr = encode_matrix(split.train, space, emb)
    X_dv, y_dv = encode_matrix(split.dev, space, emb)
    X_te, y_te = encode_matrix(split.test, space, emb)
    trainer = _trainer(classifier, cfg, seed)

    # chi-square ranks pure one-hot spaces; mixed spaces rank by |weight| of a
    # linear model, which is defined for continuous features as well
    def scores_on(X: np.ndarray, y: np.ndarray) -> np.ndarray:
        if space.has_embeddings:
            lin = train_linear_svm(X, y, cfg.svm_lambda, cfg.svm_epochs, seed)
            return np.abs(lin.weights)
        return chi2_scores(X, y)

    if len(X_dv) and cfg.k_grid:
        k = choose_k(cfg.k_grid, (X_tr, y_tr), (X_dv, y_dv), trainer,
                     scores=scores_on(X_tr, y_tr))
    else:
        k = space.size
    X_fit = np.vstack([X_tr, X_dv]) if len(X_dv) else X_tr
    y_fit = np.concatenate([y_tr, y_dv]) if len(X_dv) else y_tr
    mask = select_top_k(scores_on(X_fit, y_fit), k)
    model = trainer(mask.apply(X_fit), y_fit)
    acc = float(np.mean(model.predict(mask.apply(X_te)) == y_te))
    return acc, n_total, k


def run_classification_experiment(cfg: ExperimentConfig, records: Sequence[Record],
                                  profile: LanguageProfile,
                                  emb: EmbeddingTable | None = None,
                                  scale: Scale | None = None) -> ExperimentReport:
    """Run every (classifier, feature set) cell. In unique-pair mode each cell
    averages over `repetitions` unique-(B1,B2) subsets; otherwise a single
    seeded split is used. Feature selection touches only train and dev."""
    if not records:
        raise ValueError("no records to classify")
    rows: list[RowResult] = []
    master = random.Random(cfg.seed)
    row_seed = master.randrange(2 ** 32)
    for classifier in cfg.classifiers:
        for feature_set in cfg.feature_sets:
            if classifier == "rules" and feature_set != "focal":
                continue  # the scale reads only the focal constituent
            if cfg.unique_pairs:
                subsets = sample_unique_pairs(records, cfg.seed, cfg.repetitions)
                accs, ns, ks = [], [], []
                for i, subset in enumerate(subsets):
                    acc, n, k = _run_once(subset, profile, classifier, feature_set,
                                          cfg, row_seed + i, emb, scale)
                    accs.append(acc)
                    ns.append(n)
                    ks.append(k)
                rows.append(RowResult(cfg.language, "unique", classifier, feature_set,
                                      float(np.mean(accs)), round(float(np.mean(ns))),
                                      len(subsets),
                                      ks[0] if ks and ks[0] is not None else None))
            else:
                acc, n, k = _run_once(records, profile, classifier, feature_set,
                                      cfg, row_seed, emb, scale)
                rows.append(RowResult(cfg.language, "all", classifier, feature_set,
                                      acc, n, 1, k))
    label = cfg.embeddings_source or ""
    for row in rows:
        if "embeddings" in row.feature_set and label:
            row.feature_set = row.feature_set.replace("embeddings",
                                                      f"wv-{label}")
    return ExperimentReport(
        config={"language": cfg.language, "classifiers": list(cfg.classifiers),
                "feature_sets": list(cfg.feature_sets), "seed": cfg.seed,
                "unique_pairs": cfg.unique_pairs, "repetitions": cfg.repetitions,
                "k_grid": ["all" if k >= K_ALL else k for k in cfg.k_grid],
                "split": list(cfg.split), "embeddings_source": cfg.embeddings_source},
        rows=rows,
        fingerprint={"toolkit": __version__, "seed": cfg.seed, "workers": 1},
    )


@dataclass
class ImportancePoint:
    k: int
    test_accuracy: float
    proportions: dict[str, float]


def importance_curve(records: Sequence[Record], profile: LanguageProfile,
                     emb: EmbeddingTable, cfg: ExperimentConfig,
                     k_values: Sequence[int] = (6, 12, 25, 50, 100, 200, 360)
                     ) -> tuple[list[ImportancePoint], dict[str, float]]:
    """Linear-SVM weight importance over the mixed phoneme+embedding space:
    for each k, the feature-type shares among the top k and the test accuracy
    of a linear SVM retrained on just those features. Also returns the natural
    block proportions as the reference line."""
    space = _space_for("all+embeddings", profile, emb)
    split = split_then_augment(records, cfg.split_spec(cfg.seed))
    X_tr, y_tr = encode_matrix(split.train + split.dev, space, emb)
    X_te, y_te = encode_matrix(split.test, space, emb)
    base = train_linear_svm(X_tr, y_tr, cfg.svm_lambda, cfg.svm_epochs, cfg.seed)
    ranked = linear_importance(base.weights, space)
    points = []
    for k in sorted({min(int(k), space.size) for k in k_values}):
        props = importance_proportions(ranked, k)
        mask = select_top_k(np.abs(base.weights), k)
        model = train_linear_svm(mask.apply(X_tr), y_tr, cfg.svm_lambda,
                                 cfg.svm_epochs, cfg.seed)
        acc = float(np.mean(model.predict(mask.apply(X_te)) == y_te))
        points.append(ImportancePoint(k, acc, props))
    return points, natural_proportions(space)
