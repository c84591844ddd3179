"""Datasets: EE/CC lists, swap-augmented ordered pairs, corpora and their splits.

An EE list holds attested four-word expressions AB1AB2 (or B1AB2A); a CC list
holds attested two-word compounds B1B2. Classification data is built by
mirroring each attested (B1, B2) ordering into an unattested one, except for
pairs attested in both orders, which contribute no mirrors. Tagging data is a
corpus of sentences with {O, B, I} tags (plus B-fake/I-fake after swapping),
where every B starts an exactly-four-token span.
"""

from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .phonology import (
    ZERO,
    LanguageProfile,
    MCReading,
    NoParse,
    Syllable,
    mc_tone_category,
    parse_syllable,
)

log = logging.getLogger(__name__)

EE_FORMS = ("AB1AB2", "B1AB2A")
TAGS = ("O", "B", "I", "B-fake", "I-fake")
SPAN_LEN = 4


class Label(str, Enum):
    ATTESTED = "attested"
    UNATTESTED = "unattested"


class DataError(ValueError):
    """Malformed data file or ill-formed tag sequence."""


@dataclass(frozen=True)
class EERecord:
    language: str
    form: str
    a: str
    b1: str
    b2: str
    b1_syll: Syllable
    b2_syll: Syllable
    a_syll: Syllable | None = None

    @property
    def rid(self) -> str:
        return f"{self.a}|{self.b1}|{self.b2}"


@dataclass(frozen=True)
class CCRecord:
    language: str
    b1: str
    b2: str
    b1_syll: Syllable
    b2_syll: Syllable

    @property
    def rid(self) -> str:
        return f"{self.b1}|{self.b2}"


@dataclass(frozen=True)
class OrderedPairExample:
    id: str
    b1: str
    b2: str
    b1_syll: Syllable
    b2_syll: Syllable
    label: Label
    source_id: str

    def mirrored(self) -> "OrderedPairExample":
        flipped = Label.UNATTESTED if self.label == Label.ATTESTED else Label.ATTESTED
        return OrderedPairExample(self.id + "~", self.b2, self.b1, self.b2_syll,
                                  self.b1_syll, flipped, self.source_id)


# --- list loading ---------------------------------------------------------------


def _syllable_from_columns(row: dict[str, str], prefix: str) -> Syllable | None:
    on = row.get(prefix + "_on", "").strip()
    rh = row.get(prefix + "_rh", "").strip()
    tn = row.get(prefix + "_tn", "").strip()
    if not rh:
        return None
    return Syllable(on if on and on != "0" else ZERO, rh,
                    tn if tn and tn != "0" else ZERO)


def _resolve_syllable(row: dict[str, str], prefix: str, token: str,
                      profile: LanguageProfile,
                      readings: dict[str, MCReading] | None) -> Syllable | None:
    """Pre-segmented columns win; then MC readings; then the parser."""
    pre = _syllable_from_columns(row, prefix)
    if pre is not None:
        return pre if profile.inventory.valid_syllable(pre) else None
    if profile.mc_mode:
        if readings is None or token not in readings:
            return None
        r = readings[token]
        return Syllable(r.onset if r.onset else ZERO, r.rhyme, mc_tone_category(r))
    try:
        return parse_syllable(profile.inventory, token)
    except NoParse:
        return None


def _read_tsv(path: str | Path, required: Sequence[str]) -> list[dict[str, str]]:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f, delimiter="\t")
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        return [row for row in reader]


def load_ee_list(path: str | Path, profile: LanguageProfile,
                 readings: dict[str, MCReading] | None = None) -> list[EERecord]:
    """Load an EE list TSV (columns language, form, a, b1, b2, optional *_on/_rh/_tn).

    Rows whose B words cannot be segmented are dropped with a counted warning,
    as are rows with b1 = b2 and exact duplicates of an earlier (a, b1, b2).
    """
    rows = _read_tsv(path, ("language", "form", "a", "b1", "b2"))
    records: list[EERecord] = []
    seen: dict[tuple[str, str, str], bool] = {}
    n_unparsable = n_equal = n_dup = 0
    for i, row in enumerate(rows, 2):
        form = row["form"].strip()
        if form not in EE_FORMS:
            raise DataError(f"{path}:{i}: unknown form code {form!r}")
        a, b1, b2 = row["a"].strip(), row["b1"].strip(), row["b2"].strip()
        if not (a and b1 and b2):
            raise DataError(f"{path}:{i}: empty token field")
        if b1 == b2:
            n_equal += 1
            continue
        if (a, b1, b2) in seen:
            n_dup += 1
            continue
        b1s = _resolve_syllable(row, "b1", b1, profile, readings)
        b2s = _resolve_syllable(row, "b2", b2, profile, readings)
        if b1s is None or b2s is None:
            n_unparsable += 1
            continue
        a_syll = _resolve_syllable(row, "a", a, profile, readings)
        seen[(a, b1, b2)] = True
        records.append(EERecord(row["language"].strip() or profile.language,
                                form, a, b1, b2, b1s, b2s, a_syll))
    if n_unparsable or n_equal or n_dup:
        log.warning("%s: dropped %d unparsable, %d b1=b2, %d duplicate rows",
                    path, n_unparsable, n_equal, n_dup)
    return records


def load_cc_list(path: str | Path, profile: LanguageProfile,
                 readings: dict[str, MCReading] | None = None) -> list[CCRecord]:
    """Load a CC list TSV (columns language, b1, b2, optional segmentation columns)."""
    rows = _read_tsv(path, ("language", "b1", "b2"))
    records: list[CCRecord] = []
    seen: dict[tuple[str, str], bool] = {}
    n_unparsable = n_equal = n_dup = 0
    for i, row in enumerate(rows, 2):
        b1, b2 = row["b1"].strip(), row["b2"].strip()
        if not (b1 and b2):
            raise DataError(f"{path}:{i}: empty token field")
        if b1 == b2:
            n_equal += 1
            continue
        if (b1, b2) in seen:
            n_dup += 1
            continue
        b1s = _resolve_syllable(row, "b1", b1, profile, readings)
        b2s = _resolve_syllable(row, "b2", b2, profile, readings)
        if b1s is None or b2s is None:
            n_unparsable += 1
            continue
        seen[(b1, b2)] = True
        records.append(CCRecord(row["language"].strip() or profile.language,
                                b1, b2, b1s, b2s))
    if n_unparsable or n_equal or n_dup:
        log.warning("%s: dropped %d unsegmentable, %d b1=b2, %d duplicate rows",
                    path, n_unparsable, n_equal, n_dup)
    return records


# --- swap augmentation -----------------------------------------------------------

Record = EERecord | CCRecord


def augment_with_swaps(attested: Sequence[Record], seed: int | None = None
                       ) -> list[OrderedPairExample]:
    """One attested example per record plus one mirrored unattested example,
    except that pairs attested in both orders contribute no mirrors at all.

    With a seed the output order is shuffled; otherwise attested examples come
    first, in input order.
    """
    ordered: dict[tuple[str, str], bool] = {}
    for r in attested:
        ordered[(r.b1, r.b2)] = True
    examples: list[OrderedPairExample] = []
    mirrors: list[OrderedPairExample] = []
    for r in attested:
        att = OrderedPairExample(r.rid + "#att", r.b1, r.b2, r.b1_syll, r.b2_syll,
                                 Label.ATTESTED, r.rid)
        examples.append(att)
        if (r.b2, r.b1) not in ordered:
            mirrors.append(OrderedPairExample(r.rid + "#swp", r.b2, r.b1, r.b2_syll,
                                              r.b1_syll, Label.UNATTESTED, r.rid))
    examples.extend(mirrors)
    if seed is not None:
        random.Random(seed).shuffle(examples)
    return examples


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float
    dev_frac: float
    test_frac: float
    seed: int
    repetitions: int = 1

    def __post_init__(self) -> None:
        total = self.train_frac + self.dev_frac + self.test_frac
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions sum to {total}, expected 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @classmethod
    def standard(cls, seed: int, repetitions: int = 1) -> "SplitSpec":
        # 70/30 train/test with a fifth of the train side carved out as dev
        return cls(0.56, 0.14, 0.30, seed, repetitions)


@dataclass
class Split:
    train_records: list[Record]
    dev_records: list[Record]
    test_records: list[Record]
    train: list[OrderedPairExample]
    dev: list[OrderedPairExample]
    test: list[OrderedPairExample]
    straddling_pairs: int = 0


def split_then_augment(attested: Sequence[Record], spec: SplitSpec) -> Split:
    """Shuffle attested records, partition by the spec's fractions, then augment
    each partition independently. Unordered B-pairs appearing in more than one
    partition are counted as straddlers (they are allowed, but reported)."""
    n = len(attested)
    if n == 0:
        raise DataError("cannot split an empty record list")
    rng = random.Random(spec.seed)
    order = list(range(n))
    rng.shuffle(order)
    n_test = round(spec.test_frac * n)
    n_dev = round(spec.dev_frac * n)
    n_train = n - n_test - n_dev
    for name, size, frac in (("train", n_train, spec.train_frac),
                             ("dev", n_dev, spec.dev_frac),
                             ("test", n_test, spec.test_frac)):
        if frac > 0 and size == 0:
            raise DataError(f"{name} partition is empty ({n} records, frac {frac})")
    parts = (order[:n_train], order[n_train:n_train + n_dev], order[n_train + n_dev:])
    train_r, dev_r, test_r = ([attested[i] for i in idx] for idx in parts)

    pair_parts: dict[tuple[str, str], set[int]] = {}
    for pi, recs in enumerate((train_r, dev_r, test_r)):
        for r in recs:
            pair_parts.setdefault(tuple(sorted((r.b1, r.b2))), set()).add(pi)
    straddling = sum(1 for ps in pair_parts.values() if len(ps) > 1)

    seeds = [rng.randrange(2 ** 32) for _ in range(3)]
    return Split(
        train_records=train_r, dev_records=dev_r, test_records=test_r,
        train=augment_with_swaps(train_r, seeds[0]),
        dev=augment_with_swaps(dev_r, seeds[1]),
        test=augment_with_swaps(test_r, seeds[2]),
        straddling_pairs=straddling,
    )


def sample_unique_pairs(records: Sequence[Record], seed: int,
                        repetitions: int = 10) -> list[list[Record]]:
    """Subsets keeping one uniformly chosen record per distinct unordered B-pair."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    groups: dict[tuple[str, str], list[int]] = {}
    for i, r in enumerate(records):
        groups.setdefault(tuple(sorted((r.b1, r.b2))), []).append(i)
    master = random.Random(seed)
    subsets: list[list[Record]] = []
    for _ in range(repetitions):
        rng = random.Random(master.randrange(2 ** 32))
        chosen = sorted(rng.choice(idxs) for idxs in groups.values())
        subsets.append([records[i] for i in chosen])
    return subsets


# --- component overlap ------------------------------------------------------------


@dataclass
class OverlapCounts:
    same_order_ee: int = 0
    reversed_ee: int = 0
    same_order_cc: int = 0
    reversed_cc: int = 0
    # one row per test record: (rid, same_ee, rev_ee, same_cc, rev_cc)
    per_test: list[tuple[str, int, int, int, int]] = field(default_factory=list)


def component_overlap_analysis(train: Sequence[EERecord], test: Sequence[EERecord],
                               cc_records: Sequence[CCRecord] | None = None,
                               corpus: Sequence[Sequence[str]] | None = None
                               ) -> OverlapCounts:
    """How often each test pair (B1, B2) shows up in training material, in the
    same vs reversed order: as another EE X B1 X B2 with X != A, and as an
    adjacent compound bigram when a CC list or raw corpus is supplied."""
    by_pair: dict[tuple[str, str], list[str]] = {}
    for r in train:
        by_pair.setdefault((r.b1, r.b2), []).append(r.a)

    cc_counts: dict[tuple[str, str], int] = {}
    if cc_records is not None:
        for c in cc_records:
            cc_counts[(c.b1, c.b2)] = cc_counts.get((c.b1, c.b2), 0) + 1
    if corpus is not None:
        for sent in corpus:
            for w1, w2 in zip(sent, sent[1:]):
                cc_counts[(w1, w2)] = cc_counts.get((w1, w2), 0) + 1

    out = OverlapCounts()
    for r in test:
        same_ee = sum(1 for a in by_pair.get((r.b1, r.b2), []) if a != r.a)
        rev_ee = sum(1 for a in by_pair.get((r.b2, r.b1), []) if a != r.a)
        same_cc = cc_counts.get((r.b1, r.b2), 0)
        rev_cc = cc_counts.get((r.b2, r.b1), 0)
        out.same_order_ee += same_ee
        out.reversed_ee += rev_ee
        out.same_order_cc += same_cc
        out.reversed_cc += rev_cc
        out.per_test.append((r.rid, same_ee, rev_ee, same_cc, rev_cc))
    return out


# --- corpora ---------------------------------------------------------------------


@dataclass
class TaggedSentence:
    tokens: list[str]
    tags: list[str]

    def copy(self) -> "TaggedSentence":
        return TaggedSentence(list(self.tokens), list(self.tags))


TaggedCorpus = list[TaggedSentence]


@dataclass(frozen=True)
class EESpan:
    sent: int
    start: int
    a: str
    b1: str
    b2: str
    fake: bool

    @property
    def triple(self) -> tuple[str, str, str]:
        """The underlying EE identity; for swapped spans the surface order is undone."""
        return (self.a, self.b2, self.b1) if self.fake else (self.a, self.b1, self.b2)


def read_corpus(path: str | Path) -> list[list[str]]:
    """One sentence per line, space-separated tokens."""
    sents = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        tokens = line.split()
        if tokens:
            sents.append(tokens)
    return sents


def write_corpus(sentences: Iterable[Sequence[str]], path: str | Path) -> None:
    Path(path).write_text("".join(" ".join(s) + "\n" for s in sentences), encoding="utf-8")


def read_tagged_corpus(path: str | Path) -> TaggedCorpus:
    """Two-column token<TAB>tag lines, blank line between sentences."""
    corpus: TaggedCorpus = []
    tokens: list[str] = []
    tags: list[str] = []
    path = Path(path)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            if tokens:
                corpus.append(TaggedSentence(tokens, tags))
                tokens, tags = [], []
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected token<TAB>tag, got {line!r}")
        if parts[1] not in TAGS:
            raise DataError(f"{path}:{lineno}: unknown tag {parts[1]!r}")
        tokens.append(parts[0])
        tags.append(parts[1])
    if tokens:
        corpus.append(TaggedSentence(tokens, tags))
    return corpus


def write_tagged_corpus(corpus: TaggedCorpus, path: str | Path) -> None:
    lines = []
    for sent in corpus:
        lines.extend(f"{tok}\t{tag}" for tok, tag in zip(sent.tokens, sent.tags))
        lines.append("")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def validate_tags(sent: TaggedSentence, where: str = "") -> None:
    """Raise DataError unless every B(-fake) starts an exact 4-token span and
    no I(-fake) occurs outside one."""
    if len(sent.tokens) != len(sent.tags):
        raise DataError(f"{where}: {len(sent.tokens)} tokens vs {len(sent.tags)} tags")
    i, n = 0, len(sent.tags)
    while i < n:
        tag = sent.tags[i]
        if tag == "O":
            i += 1
        elif tag in ("B", "B-fake"):
            itag = "I" if tag == "B" else "I-fake"
            if i + SPAN_LEN > n or any(sent.tags[j] != itag for j in range(i + 1, i + SPAN_LEN)):
                raise DataError(f"{where}: span at {i} is not {tag} + 3x {itag}")
            if i + SPAN_LEN < n and sent.tags[i + SPAN_LEN] == itag:
                raise DataError(f"{where}: span at {i} runs longer than 4 tokens")
            i += SPAN_LEN
        else:
            raise DataError(f"{where}: stray {tag} at position {i}")


def extract_ee_spans(corpus: TaggedCorpus) -> list[EESpan]:
    spans: list[EESpan] = []
    for si, sent in enumerate(corpus):
        validate_tags(sent, where=f"sentence {si}")
        for i, tag in enumerate(sent.tags):
            if tag in ("B", "B-fake"):
                spans.append(EESpan(si, i, sent.tokens[i], sent.tokens[i + 1],
                                    sent.tokens[i + 3], fake=(tag == "B-fake")))
    return spans


def generate_swap_corpus(tagged: TaggedCorpus,
                         ee_catalog: Sequence[tuple[str, str, str]] | None = None,
                         swap_frac: float = 0.5, seed: int = 0) -> TaggedCorpus:
    """Swap B1/B2 for a seeded fraction of the distinct EEs and retag those
    spans B-fake/I-fake. All occurrences of one EE share a status, so the
    catalog partition is a function of (catalog, seed) only and stays
    consistent across corpus splits when the same catalog is passed.
    """
    if not 0.0 <= swap_frac <= 1.0:
        raise ValueError(f"swap_frac must be in [0, 1], got {swap_frac}")
    spans = extract_ee_spans(tagged)
    if any(s.fake for s in spans):
        raise DataError("input corpus already contains fake tags")
    if ee_catalog is None:
        seen: dict[tuple[str, str, str], bool] = {}
        for s in spans:
            seen[s.triple] = True
        catalog = list(seen)
    else:
        catalog = list(ee_catalog)
        known = set(catalog)
        unknown = {s.triple for s in spans if s.triple not in known}
        if unknown:
            log.warning("swap corpus: %d EE triples missing from catalog stay unswapped",
                        len(unknown))
    rng = random.Random(seed)
    shuffled = list(catalog)
    rng.shuffle(shuffled)
    swapped = set(shuffled[:round(swap_frac * len(shuffled))])

    out = [sent.copy() for sent in tagged]
    for s in spans:
        if s.triple in swapped:
            sent = out[s.sent]
            sent.tokens[s.start + 1], sent.tokens[s.start + 3] = \
                sent.tokens[s.start + 3], sent.tokens[s.start + 1]
            sent.tags[s.start] = "B-fake"
            for j in range(s.start + 1, s.start + SPAN_LEN):
                sent.tags[j] = "I-fake"
    return out


@dataclass
class CorpusSplit:
    train: TaggedCorpus
    dev: TaggedCorpus
    test: TaggedCorpus
    ee_partition: dict[tuple[str, str, str], str]
    deannotated: int = 0


def split_corpus_by_ee(tagged: TaggedCorpus,
                       ratios: tuple[float, float, float] = (0.91, 0.045, 0.045),
                       n_splits: int = 3, seed: int = 0) -> list[CorpusSplit]:
    """Partition distinct EEs into disjoint train/dev/test sets; sentences follow
    their EEs (test wins over dev wins over train when a sentence mixes
    partitions, and the losing spans are de-annotated with a warning count).
    Sentences without any EE are split by the same ratios.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios sum to {sum(ratios)}, expected 1")
    spans = extract_ee_spans(tagged)
    seen: dict[tuple[str, str, str], bool] = {}
    for s in spans:
        seen[s.triple] = True
    triples = list(seen)
    spans_by_sent: dict[int, list[EESpan]] = {}
    for s in spans:
        spans_by_sent.setdefault(s.sent, []).append(s)
    negatives = [i for i in range(len(tagged)) if i not in spans_by_sent]

    master = random.Random(seed)
    splits: list[CorpusSplit] = []
    for _ in range(n_splits):
        rng = random.Random(master.randrange(2 ** 32))
        shuffled = list(triples)
        rng.shuffle(shuffled)
        n = len(shuffled)
        n_dev = round(ratios[1] * n)
        n_test = round(ratios[2] * n)
        n_train = n - n_dev - n_test
        partition: dict[tuple[str, str, str], str] = {}
        for i, t in enumerate(shuffled):
            partition[t] = "train" if i < n_train else ("dev" if i < n_train + n_dev else "test")

        neg_shuffled = list(negatives)
        rng.shuffle(neg_shuffled)
        m = len(neg_shuffled)
        m_dev = round(ratios[1] * m)
        m_test = round(ratios[2] * m)
        neg_part = {}
        for i, si in enumerate(neg_shuffled):
            neg_part[si] = "train" if i < m - m_dev - m_test else \
                ("dev" if i < m - m_test else "test")

        buckets: dict[str, TaggedCorpus] = {"train": [], "dev": [], "test": []}
        deannotated = 0
        for si, sent in enumerate(tagged):
            if si in spans_by_sent:
                parts = [partition[s.triple] for s in spans_by_sent[si]]
                dest = "test" if "test" in parts else ("dev" if "dev" in parts else "train")
                out = sent.copy()
                for s in spans_by_sent[si]:
                    if partition[s.triple] != dest:
                        for j in range(s.start, s.start + SPAN_LEN):
                            out.tags[j] = "O"
                        deannotated += 1
            else:
                dest = neg_part[si]
                out = sent.copy()
            buckets[dest].append(out)
        if deannotated:
            log.warning("corpus split: de-annotated %d spans from mixed sentences", deannotated)
        splits.append(CorpusSplit(buckets["train"], buckets["dev"], buckets["test"],
                                  partition, deannotated))
    return splits
