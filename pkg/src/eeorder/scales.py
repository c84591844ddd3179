"""Linear ordering scales over focal phonemes.

A scale ranks tone (or rhyme) symbols; a pair ordering is predicted attested
when B1's focal symbol outranks B2's. Scales come from three places: hand
specification (shipped data files), exhaustive search over all total orders,
and induction from a trained decision tree by walking its no-branch spine.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .datasets import Label, OrderedPairExample
from .phonology import PhonemeClass, Syllable

if TYPE_CHECKING:  # pragma: no cover
    from .classifiers import DecisionTree
    from .features import FeatureSpace


class ScaleError(ValueError):
    pass


@dataclass(frozen=True)
class Scale:
    """Ordered groups of symbols (a group = tied rank) plus unranked leftovers."""

    groups: tuple[frozenset[str], ...]
    unranked: frozenset[str]
    focal_class: PhonemeClass

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for g in self.groups:
            if not g:
                raise ScaleError("empty rank group")
            if seen & g:
                raise ScaleError(f"symbols ranked twice: {sorted(seen & g)}")
            seen |= g
        if seen & self.unranked:
            raise ScaleError(f"symbols both ranked and unranked: {sorted(seen & self.unranked)}")

    @classmethod
    def from_order(cls, symbols: Sequence[str], focal_class: PhonemeClass,
                   unranked: Sequence[str] = ()) -> "Scale":
        return cls(tuple(frozenset({s}) for s in symbols), frozenset(unranked), focal_class)

    def rank(self, symbol: str) -> int | None:
        """Rank index, or None for unranked symbols. Unknown symbols raise."""
        for i, g in enumerate(self.groups):
            if symbol in g:
                return i
        if symbol in self.unranked:
            return None
        raise ScaleError(f"symbol {symbol!r} is neither ranked nor unranked")

    def reversed(self) -> "Scale":
        return Scale(tuple(reversed(self.groups)), self.unranked, self.focal_class)

    def symbols(self) -> set[str]:
        out = set(self.unranked)
        for g in self.groups:
            out |= g
        return out

    def __str__(self) -> str:
        return " < ".join(",".join(sorted(g)) for g in self.groups)


def focal_symbol(scale: Scale, s: Syllable) -> str:
    return s.tone if scale.focal_class == PhonemeClass.TONE else s.rhyme


def compare_on_scale(scale: Scale, sym1: str, sym2: str) -> int:
    """-1 when sym1 outranks sym2 (attested order), +1 for the reverse, 0 for a tie.

    Unranked symbols tie against everything.
    """
    r1, r2 = scale.rank(sym1), scale.rank(sym2)
    if r1 is None or r2 is None or r1 == r2:
        return 0
    return -1 if r1 < r2 else 1


# --- tie policies -----------------------------------------------------------------


@dataclass
class RandomCoin:
    """Seeded fair coin; each instance yields one reproducible flip sequence."""

    seed: int

    def __post_init__(self) -> None:
        self._rng = random.Random(self.seed)

    def flip(self) -> Label:
        return Label.ATTESTED if self._rng.random() < 0.5 else Label.UNATTESTED


@dataclass(frozen=True)
class ExpectedHalf:
    """Score ties as 0.5 instead of flipping; only meaningful for accuracy."""


TiePolicy = RandomCoin | ExpectedHalf


def rule_predict(scale: Scale, pair: OrderedPairExample,
                 policy: TiePolicy | None = None) -> Label:
    c = compare_on_scale(scale, focal_symbol(scale, pair.b1_syll),
                         focal_symbol(scale, pair.b2_syll))
    if c < 0:
        return Label.ATTESTED
    if c > 0:
        return Label.UNATTESTED
    if isinstance(policy, RandomCoin):
        return policy.flip()
    raise ScaleError(f"tied pair {pair.b1}/{pair.b2} has no single label without a coin policy")


def rule_accuracy(scale: Scale, dataset: Sequence[OrderedPairExample],
                  policy: TiePolicy = ExpectedHalf()) -> float:
    """Mean correctness; ties earn 0.5 under ExpectedHalf or a seeded coin outcome."""
    if not dataset:
        raise ValueError("empty dataset")
    total = 0.0
    for ex in dataset:
        c = compare_on_scale(scale, focal_symbol(scale, ex.b1_syll),
                             focal_symbol(scale, ex.b2_syll))
        if c == 0:
            if isinstance(policy, ExpectedHalf):
                total += 0.5
            else:
                total += 1.0 if policy.flip() == ex.label else 0.0
        else:
            pred = Label.ATTESTED if c < 0 else Label.UNATTESTED
            total += 1.0 if pred == ex.label else 0.0
    return total / len(dataset)


# --- exhaustive search ------------------------------------------------------------

MAX_SEARCH_SYMBOLS = 10


def search_best_scale(train: Sequence[OrderedPairExample], symbols: Sequence[str],
                      focal_class: PhonemeClass = PhonemeClass.TONE
                      ) -> tuple[Scale, float]:
    """Try every total order of the symbols, scoring ties as 0.5, and return the
    best one. Tie-break: the lexicographically first permutation (in the order
    the symbols were given) wins. Factorial in len(symbols); capped at 10.
    """
    s = len(symbols)
    if s == 0:
        raise ScaleError("no symbols to order")
    if s > MAX_SEARCH_SYMBOLS:
        raise ScaleError(f"{s} symbols need {s}! evaluations; cap is {MAX_SEARCH_SYMBOLS}!")
    if not train:
        raise ValueError("empty dataset")
    idx = {sym: i for i, sym in enumerate(symbols)}
    if len(idx) != s:
        raise ScaleError("duplicate symbols")

    # Count matrices: att[i, j] / una[i, j] = examples with focal pair (i, j).
    # A permutation's score then needs only the s*s grid, not the data.
    att = np.zeros((s, s))
    una = np.zeros((s, s))
    extra: dict[str, bool] = {}
    out_of_set = 0.0
    for ex in train:
        f1 = focal_symbol_for(focal_class, ex.b1_syll)
        f2 = focal_symbol_for(focal_class, ex.b2_syll)
        if f1 in idx and f2 in idx:
            m = att if ex.label == Label.ATTESTED else una
            m[idx[f1], idx[f2]] += 1.0
        else:
            for f in (f1, f2):
                if f not in idx:
                    extra[f] = True
            out_of_set += 0.5  # permanently tied, any order
    diff = att - una
    const = (una.sum() - np.trace(una)) + 0.5 * (np.trace(att) + np.trace(una)) + out_of_set

    best_score = -1.0
    best_perm: tuple[int, ...] | None = None
    for perm in itertools.permutations(range(s)):
        grid = diff[np.ix_(perm, perm)]
        score = const + np.triu(grid, 1).sum()
        if score > best_score + 1e-12:
            best_score = score
            best_perm = perm
    assert best_perm is not None
    scale = Scale.from_order([symbols[i] for i in best_perm], focal_class,
                             unranked=sorted(extra))
    return scale, best_score / len(train)


def focal_symbol_for(focal_class: PhonemeClass, s: Syllable) -> str:
    return s.tone if focal_class == PhonemeClass.TONE else s.rhyme


# --- induction from a decision tree -------------------------------------------------


def induce_scale_from_tree(tree: "DecisionTree", space: "FeatureSpace",
                           focal_class: PhonemeClass) -> Scale:
    """Derive a linear order from a tree by walking its no-branch spine.

    At each spine node splitting on a focal one-hot, the yes child's majority
    label decides the push direction: a symbol that makes pairs attested in
    the B1 slot (or unattested in the B2 slot) goes on the front, the converse
    on the back, both outside-in. Already-placed symbols and non-focal splits
    are skipped; everything never met stays unranked.
    """
    from .features import OneHotFeature  # avoid a module cycle

    front: list[str] = []
    back: list[str] = []
    placed: set[str] = set()
    i = 0
    while True:
        node = tree.nodes[i]
        if node.is_leaf:
            break
        if node.feature >= len(space.entries):
            raise ScaleError(f"tree splits on feature {node.feature}, space has "
                             f"{len(space.entries)}")
        f = space.entries[node.feature]
        if isinstance(f, OneHotFeature) and f.cls == focal_class and f.symbol not in placed:
            att, una = tree.nodes[node.yes].counts
            if att != una:  # an exact 50/50 yes-child decides nothing
                majority_attested = att > una
                if (f.position == "B1") == majority_attested:
                    front.append(f.symbol)
                else:
                    back.append(f.symbol)
                placed.add(f.symbol)
        i = node.no

    focal_syms: dict[str, bool] = {}
    for f in space.entries:
        if isinstance(f, OneHotFeature) and f.cls == focal_class:
            focal_syms[f.symbol] = True
    order = front + list(reversed(back))
    return Scale.from_order(order, focal_class,
                            unranked=[s for s in focal_syms if s not in placed])


# --- scale files ------------------------------------------------------------------


def load_scale(path: str | Path, focal_class: PhonemeClass | None = None) -> Scale:
    """Read a scale file: one line per rank (tied symbols comma-separated), an
    optional "focal: tone|rhyme" header, and an optional "unranked:" line."""
    groups: list[frozenset[str]] = []
    unranked: list[str] = []
    focal = focal_class or PhonemeClass.TONE
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("focal:"):
            value = line.split(":", 1)[1].strip().lower()
            try:
                focal = PhonemeClass(value)
            except ValueError:
                raise ScaleError(f"{path}: focal must be tone or rhyme, got {value!r}")
            continue
        if line.lower().startswith("unranked:"):
            rest = line.split(":", 1)[1]
            unranked.extend(s for chunk in rest.split(",") for s in chunk.split() if s)
            continue
        groups.append(frozenset(s.strip() for s in line.split(",") if s.strip()))
    if not groups and not unranked:
        raise ScaleError(f"{path}: no ranks found")
    return Scale(tuple(groups), frozenset(unranked), focal)


def save_scale(scale: Scale, path: str | Path) -> None:
    lines = [f"focal: {scale.focal_class.value}"]
    lines.extend(",".join(sorted(g)) for g in scale.groups)
    if scale.unranked:
        lines.append("unranked: " + ",".join(sorted(scale.unranked)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
