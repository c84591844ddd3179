"""Feature encoding for ordered pairs: sparse one-hot phonological blocks for
both words, optionally followed by dense word-embedding blocks, plus chi-square
scoring, top-K masks, and linear-model feature importance."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .datasets import Label, OrderedPairExample
from .phonology import ZERO, PhonemeClass, PhonemeInventory

if TYPE_CHECKING:  # pragma: no cover
    from .embeddings import EmbeddingTable

POSITIONS = ("B1", "B2")
ALL_CLASSES = (PhonemeClass.ONSET, PhonemeClass.RHYME, PhonemeClass.TONE)


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class OneHotFeature:
    position: str
    cls: PhonemeClass
    symbol: str


@dataclass(frozen=True)
class EmbeddingFeature:
    position: str
    index: int


FeatureId = OneHotFeature | EmbeddingFeature


def feature_type(f: FeatureId) -> str:
    """"onset" / "rhyme" / "tone" / "embedding", for importance breakdowns."""
    return f.cls.value if isinstance(f, OneHotFeature) else "embedding"


@dataclass
class FeatureSpace:
    entries: list[FeatureId]

    def __post_init__(self) -> None:
        if len(set(self.entries)) != len(self.entries):
            raise FeatureError("duplicate feature ids")
        self._index: dict[FeatureId, int] = {f: i for i, f in enumerate(self.entries)}
        self._blocks = {(f.position, f.cls) for f in self.entries
                        if isinstance(f, OneHotFeature)}
        self.embedding_dim = sum(1 for f in self.entries
                                 if isinstance(f, EmbeddingFeature) and f.position == "B1")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def has_embeddings(self) -> bool:
        return self.embedding_dim > 0

    def index_of(self, f: FeatureId) -> int:
        try:
            return self._index[f]
        except KeyError:
            raise FeatureError(f"feature {f} absent from space") from None


def build_feature_space(inventory: PhonemeInventory,
                        classes: Sequence[PhonemeClass] = ALL_CLASSES,
                        embedding_dim: int = 0) -> FeatureSpace:
    """Blocks in order: per position, one one-hot block per phoneme class, then
    per position one dense embedding block. An empty class list with a nonzero
    embedding_dim gives an embeddings-only space."""
    entries: list[FeatureId] = []
    for pos in POSITIONS:
        for cls in classes:
            entries.extend(OneHotFeature(pos, cls, sym) for sym in inventory.symbols(cls))
    for pos in POSITIONS:
        entries.extend(EmbeddingFeature(pos, i) for i in range(embedding_dim))
    if not entries:
        raise FeatureError("empty feature space")
    return FeatureSpace(entries)


@dataclass
class SparseVec:
    indices: np.ndarray
    values: np.ndarray
    size: int

    def __post_init__(self) -> None:
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.indices) != len(self.values):
            raise FeatureError("index/value length mismatch")
        if len(self.indices) and (np.any(np.diff(self.indices) <= 0)
                                  or self.indices[0] < 0
                                  or self.indices[-1] >= self.size):
            raise FeatureError("indices must be strictly increasing and within the space")

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.size)
        out[self.indices] = self.values
        return out


def encode(pair: OrderedPairExample, space: FeatureSpace,
           emb: "EmbeddingTable | None" = None) -> SparseVec:
    """One active index per (position, class) one-hot block, then the word
    vectors of B1 and B2 copied into the embedding blocks.

    Out-of-vocabulary words leave their embedding block zero; an onsetless
    syllable leaves the onset block zero (the zero onset is not an inventory
    member). Any other symbol missing from the space is an error.
    """
    if space.has_embeddings and emb is None:
        raise FeatureError("space has embedding blocks but no table was given")
    items: list[tuple[int, float]] = []
    for pos, syll in (("B1", pair.b1_syll), ("B2", pair.b2_syll)):
        for cls, symbol in ((PhonemeClass.ONSET, syll.onset),
                            (PhonemeClass.RHYME, syll.rhyme),
                            (PhonemeClass.TONE, syll.tone)):
            fid = OneHotFeature(pos, cls, symbol)
            if fid in space._index:
                items.append((space._index[fid], 1.0))
            elif (pos, cls) not in space._blocks:
                continue  # class not part of this space
            elif cls == PhonemeClass.ONSET and symbol == ZERO:
                continue  # onsetless syllable: all-zero onset block
            else:
                raise FeatureError(f"symbol {symbol!r} ({cls.value}, {pos}) absent from space")
    if space.has_embeddings and emb is not None:
        for pos, token in (("B1", pair.b1), ("B2", pair.b2)):
            vec = emb.get(token)
            if vec is None:
                continue  # OOV: zero block
            base = space.index_of(EmbeddingFeature(pos, 0))
            items.extend((base + i, float(v)) for i, v in enumerate(vec) if v != 0.0)
    items.sort()
    idx = np.array([i for i, _ in items], dtype=np.int64)
    val = np.array([v for _, v in items], dtype=np.float64)
    return SparseVec(idx, val, space.size)


def encode_matrix(examples: Sequence[OrderedPairExample], space: FeatureSpace,
                  emb: "EmbeddingTable | None" = None) -> tuple[np.ndarray, np.ndarray]:
    """Dense design matrix plus 0/1 label vector (attested = 1)."""
    X = np.zeros((len(examples), space.size))
    y = np.zeros(len(examples), dtype=np.int64)
    for i, ex in enumerate(examples):
        v = encode(ex, space, emb)
        X[i, v.indices] = v.values
        y[i] = 1 if ex.label == Label.ATTESTED else 0
    return X, y


# --- chi-square scoring -------------------------------------------------------------


def chi2_scores(X: np.ndarray | Sequence[SparseVec], y: np.ndarray) -> np.ndarray:
    """Per-feature 2x2 chi-square statistic N(ad-bc)^2 / ((a+b)(c+d)(a+c)(b+d))
    over binary features and binary labels; degenerate margins score 0."""
    if not isinstance(X, np.ndarray):
        if len(X) == 0:
            raise FeatureError("no examples")
        dense = np.zeros((len(X), X[0].size))
        for i, v in enumerate(X):
            dense[i, v.indices] = v.values
        X = dense
    y = np.asarray(y)
    if not np.isin(y, (0, 1)).all():
        raise FeatureError("labels must be 0/1")
    if not np.isin(X, (0.0, 1.0)).all():
        raise FeatureError("chi-square needs 0/1 features; rank continuous features "
                           "by linear-model weight instead")
    n = float(len(y))
    pos = X[y == 1]
    neg = X[y == 0]
    a = pos.sum(axis=0)  # feature=1, label=1
    b = neg.sum(axis=0)  # feature=1, label=0
    c = len(pos) - a
    d = len(neg) - b
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    num = n * (a * d - b * c) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(denom > 0, num / np.where(denom > 0, denom, 1.0), 0.0)
    return scores


@dataclass(frozen=True)
class FeatureMask:
    selected: tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        if len(self.selected) != self.k:
            raise FeatureError(f"mask holds {len(self.selected)} indices, k={self.k}")

    def apply(self, X: np.ndarray) -> np.ndarray:
        return X[:, list(self.selected)]


def select_top_k(scores: np.ndarray, k: int) -> FeatureMask:
    """Mask of the k highest scores; equal scores break toward the lower index."""
    scores = np.asarray(scores, dtype=np.float64)
    if not 1 <= k <= len(scores):
        raise FeatureError(f"k={k} out of range for {len(scores)} features")
    order = np.lexsort((np.arange(len(scores)), -scores))
    return FeatureMask(tuple(sorted(int(i) for i in order[:k])), k)


def choose_k(grid: Sequence[int], train: tuple[np.ndarray, np.ndarray],
             dev: tuple[np.ndarray, np.ndarray],
             trainer: Callable[[np.ndarray, np.ndarray], object],
             scores: np.ndarray | None = None) -> int:
    """Pick the grid value maximizing dev accuracy (ties go to the smaller k).

    Grid values above the feature count are clamped to it; scores default to
    chi-square on the training split. The trainer must return an object with a
    predict(X) method.
    """
    X_tr, y_tr = train
    X_dv, y_dv = dev
    if scores is None:
        scores = chi2_scores(X_tr, y_tr)
    ks = sorted({min(int(k), X_tr.shape[1]) for k in grid})
    if not ks:
        raise FeatureError("empty k grid")
    best_k, best_acc = ks[0], -1.0
    for k in ks:
        mask = select_top_k(scores, k)
        model = trainer(mask.apply(X_tr), y_tr)
        pred = model.predict(mask.apply(X_dv))  # type: ignore[attr-defined]
        acc = float(np.mean(pred == y_dv))
        if acc > best_acc + 1e-12:
            best_k, best_acc = k, acc
    return best_k


# --- importance -------------------------------------------------------------------


def linear_importance(weights: np.ndarray, space: FeatureSpace
                      ) -> list[tuple[FeatureId, float]]:
    """Features ranked by |weight|, descending; equal weights keep index order."""
    weights = np.asarray(weights, dtype=np.float64)
    if len(weights) != space.size:
        raise FeatureError(f"{len(weights)} weights for a {space.size}-feature space")
    mags = np.abs(weights)
    order = np.lexsort((np.arange(len(mags)), -mags))
    return [(space.entries[i], float(mags[i])) for i in order]


def importance_proportions(ranked: Sequence[tuple[FeatureId, float]], k: int
                           ) -> dict[str, float]:
    """Share of each feature type among the top-k ranked features."""
    if not 1 <= k <= len(ranked):
        raise FeatureError(f"k={k} out of range for {len(ranked)} ranked features")
    out = {"tone": 0.0, "rhyme": 0.0, "onset": 0.0, "embedding": 0.0}
    for fid, _ in ranked[:k]:
        out[feature_type(fid)] += 1.0
    return {t: c / k for t, c in out.items()}


def natural_proportions(space: FeatureSpace) -> dict[str, float]:
    out = {"tone": 0.0, "rhyme": 0.0, "onset": 0.0, "embedding": 0.0}
    for f in space.entries:
        out[feature_type(f)] += 1.0
    return {t: c / space.size for t, c in out.items()}


# --- serialization ------------------------------------------------------------------


def _fid_to_obj(f: FeatureId) -> dict:
    if isinstance(f, OneHotFeature):
        return {"kind": "onehot", "position": f.position, "class": f.cls.value,
                "symbol": f.symbol}
    return {"kind": "embedding", "position": f.position, "index": f.index}


def _fid_from_obj(o: dict) -> FeatureId:
    if o["kind"] == "onehot":
        return OneHotFeature(o["position"], PhonemeClass(o["class"]), o["symbol"])
    if o["kind"] == "embedding":
        return EmbeddingFeature(o["position"], int(o["index"]))
    raise FeatureError(f"unknown feature kind {o.get('kind')!r}")


def save_space(space: FeatureSpace, path: str | Path,
               mask: FeatureMask | None = None) -> None:
    doc: dict = {"entries": [_fid_to_obj(f) for f in space.entries]}
    if mask is not None:
        doc["selected"] = list(mask.selected)
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=1), encoding="utf-8")


def load_space(path: str | Path) -> tuple[FeatureSpace, FeatureMask | None]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    space = FeatureSpace([_fid_from_obj(o) for o in doc["entries"]])
    mask = None
    if "selected" in doc:
        sel = tuple(int(i) for i in doc["selected"])
        mask = FeatureMask(sel, len(sel))
    return space, mask
