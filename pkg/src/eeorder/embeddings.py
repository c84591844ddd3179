"""SkipGram word embeddings with negative sampling, plain single-worker SGD.

Deterministic for a fixed corpus, parameter set, and seed. Negatives are drawn
from the unigram distribution raised to 0.75.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

MAGIC = b"EEMB"


class OOVError(KeyError):
    """Word not in the embedding vocabulary; similarity filters must reject it."""


@dataclass
class EmbeddingParams:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    min_count: int = 5
    lr: float = 0.025
    seed: int = 0

    def as_dict(self) -> dict:
        return {"dim": self.dim, "window": self.window, "negatives": self.negatives,
                "epochs": self.epochs, "min_count": self.min_count, "lr": self.lr,
                "seed": self.seed}


@dataclass
class EmbeddingTable:
    vocab: dict[str, int]
    vectors: np.ndarray  # |V| x dim center vectors
    metadata: dict = field(default_factory=dict)
    trained: bool = True
    out_vectors: np.ndarray | None = None  # training artifact, not persisted

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def get(self, token: str) -> np.ndarray | None:
        i = self.vocab.get(token)
        return None if i is None else self.vectors[i]

    def vector(self, token: str) -> np.ndarray:
        v = self.get(token)
        if v is None:
            raise OOVError(token)
        return v

    def tokens(self) -> list[str]:
        return list(self.vocab)


def build_noise_sampler(counts: np.ndarray, rng: np.random.Generator):
    """Sampler over vocabulary ids with probability proportional to count^0.75."""
    weights = counts.astype(np.float64) ** 0.75
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]

    def sample(k: int) -> np.ndarray:
        return np.searchsorted(cdf, rng.random(k), side="right")

    return sample


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def train_skipgram(corpus: Sequence[Sequence[str]],
                   params: EmbeddingParams | None = None) -> EmbeddingTable:
    """Optimize the SGNS objective: for each (center, context) pair inside the
    window, push sigma(u.v) toward 1 and sigma(u.v_neg) toward 0 for sampled
    negatives. epochs = 0 returns the random initialization, flagged untrained.
    """
    params = params or EmbeddingParams()
    counts: dict[str, int] = {}
    for sent in corpus:
        for tok in sent:
            counts[tok] = counts.get(tok, 0) + 1
    vocab = {tok: i for i, tok in enumerate(t for t, c in counts.items()
                                            if c >= params.min_count)}
    if not vocab:
        raise ValueError(f"vocabulary empty after min_count={params.min_count}")
    freq = np.array([counts[t] for t in vocab], dtype=np.int64)

    rng = np.random.default_rng(params.seed)
    w_in = (rng.random((len(vocab), params.dim)) - 0.5) / params.dim
    w_out = np.zeros((len(vocab), params.dim))
    sample_negatives = build_noise_sampler(freq, rng)

    sent_ids = [np.array([vocab[t] for t in sent if t in vocab], dtype=np.int64)
                for sent in corpus]
    sent_ids = [s for s in sent_ids if len(s) > 1]

    for _ in range(params.epochs):
        for ids in sent_ids:
            for i, center in enumerate(ids):
                lo = max(0, i - params.window)
                hi = min(len(ids), i + params.window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    targets = np.empty(1 + params.negatives, dtype=np.int64)
                    targets[0] = ids[j]
                    targets[1:] = sample_negatives(params.negatives)
                    labels = np.zeros(1 + params.negatives)
                    labels[0] = 1.0
                    u = w_in[center]
                    vt = w_out[targets]
                    g = _sigmoid(vt @ u) - labels
                    grad_u = g @ vt
                    w_out[targets] -= params.lr * np.outer(g, u)
                    w_in[center] = u - params.lr * grad_u

    return EmbeddingTable(vocab, w_in, metadata={"source": "skipgram",
                                                 **params.as_dict()},
                          trained=params.epochs > 0, out_vectors=w_out)


def sgns_loss(table: EmbeddingTable, pairs: Sequence[tuple[str, str]],
              negatives: Sequence[str]) -> float:
    """Average SGNS loss of fixed (center, context) pairs against fixed
    negatives, scored against the output matrix (all-zeros before training;
    the center matrix doubles as the output side for reloaded tables)."""
    W = table.out_vectors if table.out_vectors is not None else table.vectors
    total = 0.0
    for center, context in pairs:
        u = table.vector(center)
        v = W[table.vocab[context]]
        total -= float(np.log(_sigmoid(np.array([u @ v]))[0]))
        for neg in negatives:
            vn = W[table.vocab[neg]]
            total -= float(np.log(_sigmoid(np.array([-(u @ vn)]))[0]))
    return total / max(1, len(pairs))


def cosine(emb: EmbeddingTable, w1: str, w2: str) -> float:
    """Cosine similarity in [-1, 1]; OOV raises, zero vectors compare as 0."""
    v1, v2 = emb.vector(w1), emb.vector(w2)
    n1, n2 = float(np.linalg.norm(v1)), float(np.linalg.norm(v2))
    if n1 == 0.0 or n2 == 0.0:
        log.warning("zero vector in cosine(%r, %r); returning 0", w1, w2)
        return 0.0
    return float(v1 @ v2 / (n1 * n2))


def neighbors(emb: EmbeddingTable, w: str, k: int) -> list[tuple[str, float]]:
    """Top-k tokens by cosine, excluding the query itself."""
    u = emb.vector(w)
    if k <= 0:
        return []
    norms = np.linalg.norm(emb.vectors, axis=1)
    un = float(np.linalg.norm(u))
    denom = np.maximum(norms * un, 1e-300)
    sims = np.where((norms > 0) & (un > 0), (emb.vectors @ u) / denom, 0.0)
    order = np.lexsort((np.arange(len(sims)), -sims))
    toks = emb.tokens()
    out = []
    for i in order:
        if toks[i] == w:
            continue
        out.append((toks[i], float(sims[i])))
        if len(out) == k:
            break
    return out


# --- persistence ------------------------------------------------------------------


def save_embeddings(emb: EmbeddingTable, path: str | Path) -> None:
    """Binary layout: magic, |V|, dim, metadata JSON, vocab block, float32 rows."""
    meta = json.dumps({**emb.metadata, "trained": emb.trained}).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", len(emb.vocab), emb.dim, len(meta)))
        f.write(meta)
        for tok in emb.vocab:
            raw = tok.encode("utf-8")
            f.write(struct.pack("<H", len(raw)))
            f.write(raw)
        f.write(emb.vectors.astype("<f4").tobytes(order="C"))


def load_embeddings(path: str | Path) -> EmbeddingTable:
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise ValueError(f"{path}: not an embedding file")
        n, dim, meta_len = struct.unpack("<III", f.read(12))
        meta = json.loads(f.read(meta_len).decode("utf-8"))
        vocab: dict[str, int] = {}
        for i in range(n):
            (tok_len,) = struct.unpack("<H", f.read(2))
            vocab[f.read(tok_len).decode("utf-8")] = i
        data = np.frombuffer(f.read(4 * n * dim), dtype="<f4")
    trained = bool(meta.pop("trained", True))
    return EmbeddingTable(vocab, data.reshape(n, dim).astype(np.float64),
                          metadata=meta, trained=trained)


def export_csv(emb: EmbeddingTable, path: str | Path) -> None:
    """token,v0,...,v{d-1} rows; consumed by external plotting tools."""
    with open(path, "w", encoding="utf-8") as f:
        for tok in emb.vocab:
            vec = emb.vectors[emb.vocab[tok]]
            f.write(tok + "," + ",".join(repr(float(v)) for v in vec) + "\n")


def import_csv(path: str | Path) -> EmbeddingTable:
    vocab: dict[str, int] = {}
    rows: list[list[float]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        parts = line.split(",")
        vocab[parts[0]] = len(rows)
        rows.append([float(v) for v in parts[1:]])
    return EmbeddingTable(vocab, np.array(rows), metadata={"source": "csv"})
