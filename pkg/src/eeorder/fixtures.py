"""Synthetic data generators.

Every generator doubles as the oracle for the tests that consume it: pair
labels are derived from a planted scale, corpus spans are planted with known
gold tags, and distractor classes are built to fail exactly one baseline
filter. All generators are deterministic in their seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .datasets import EERecord, Label, OrderedPairExample, TaggedCorpus, TaggedSentence
from .phonology import ZERO, LanguageProfile, PhonemeClass, PhonemeInventory, Syllable
from .scales import Scale

TOY_TONES = ("j", "b", "m", "s", "v", "g", ZERO)


@dataclass
class ToyLanguage:
    profile: LanguageProfile
    scale: Scale  # the planted focal order

    @property
    def inventory(self) -> PhonemeInventory:
        return self.profile.inventory

    @property
    def order(self) -> list[str]:
        return [next(iter(g)) for g in self.scale.groups]


def toy_language(seed: int = 0, rich: bool = False) -> ToyLanguage:
    """A small parsable language with a seed-shuffled planted tone order.

    rich=True widens the onset/rhyme pools so corpus fixtures can mint many
    distinct syllables.
    """
    if rich:
        onsets = ("p", "t", "k", "q", "c", "f", "h", "l", "n", "r", "w", "y",
                  "pl", "tl", "kl", "pr", "tr", "kr", "fl", "fr", "ph", "th",
                  "kh", "ch")
        rhymes = ("a", "e", "i", "o", "u", "aa", "ai", "au", "ee", "oo", "ui", "ia")
    else:
        onsets = ("p", "t", "k", "l", "n", "h")
        rhymes = ("a", "i", "u", "o")
    inv = PhonemeInventory("toy", onsets=onsets, rhymes=tuple(
        sorted(rhymes, key=lambda r: (-len(r), r))), tones=TOY_TONES,
        allow_empty_onset=False)
    profile = LanguageProfile("toy", inv, PhonemeClass.TONE)
    order = list(TOY_TONES)
    random.Random(seed).shuffle(order)
    return ToyLanguage(profile, Scale.from_order(order, PhonemeClass.TONE))


def _token(syll: Syllable) -> str:
    return (syll.onset if syll.onset != ZERO else "") + syll.rhyme + \
        (syll.tone if syll.tone != ZERO else "")


def _syllable(rng: random.Random, inv: PhonemeInventory, tone: str) -> Syllable:
    return Syllable(rng.choice(inv.onsets), rng.choice(inv.rhymes), tone)


def make_pair_dataset(toy: ToyLanguage, n: int, seed: int,
                      noise: float = 0.0) -> list[OrderedPairExample]:
    """Uniform random pairs of distinct tones, labeled by the planted scale;
    a noise fraction of labels is flipped."""
    rng = random.Random(seed)
    rank = {s: i for i, s in enumerate(toy.order)}
    out = []
    for i in range(n):
        t1, t2 = rng.sample(toy.order, 2)
        s1 = _syllable(rng, toy.inventory, t1)
        s2 = _syllable(rng, toy.inventory, t2)
        label = Label.ATTESTED if rank[t1] < rank[t2] else Label.UNATTESTED
        if noise > 0.0 and rng.random() < noise:
            label = Label.UNATTESTED if label == Label.ATTESTED else Label.ATTESTED
        out.append(OrderedPairExample(f"plant{i}", _token(s1), _token(s2),
                                      s1, s2, label, f"plant{i}"))
    return out


def make_ee_records(toy: ToyLanguage, n: int, seed: int) -> list[EERecord]:
    """Attested-only EE records whose B ordering obeys the planted scale."""
    rng = random.Random(seed)
    rank = {s: i for i, s in enumerate(toy.order)}
    records = []
    seen: set[tuple[str, str, str]] = set()
    while len(records) < n:
        t1, t2 = rng.sample(toy.order, 2)
        if rank[t1] > rank[t2]:
            t1, t2 = t2, t1
        b1 = _syllable(rng, toy.inventory, t1)
        b2 = _syllable(rng, toy.inventory, t2)
        a = _syllable(rng, toy.inventory, rng.choice(toy.order))
        key = (_token(a), _token(b1), _token(b2))
        if key in seen or key[1] == key[2]:
            continue
        seen.add(key)
        records.append(EERecord("toy", "AB1AB2", key[0], key[1], key[2], b1, b2, a))
    return records


def write_ee_tsv(records: list[EERecord], path: str | Path) -> None:
    cols = ["language", "form", "a", "b1", "b2",
            "a_on", "a_rh", "a_tn", "b1_on", "b1_rh", "b1_tn",
            "b2_on", "b2_rh", "b2_tn"]

    def seg(s: Syllable | None) -> list[str]:
        if s is None:
            return ["", "", ""]
        return [s.onset, s.rhyme, "0" if s.tone == ZERO else s.tone]

    lines = ["\t".join(cols)]
    for r in records:
        lines.append("\t".join([r.language, r.form, r.a, r.b1, r.b2,
                                *seg(r.a_syll), *seg(r.b1_syll), *seg(r.b2_syll)]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- planted tagging corpus ---------------------------------------------------------


@dataclass
class TaggingFixture:
    corpus: TaggedCorpus  # gold tags
    toy: ToyLanguage
    n_real_spans: int
    n_distractor_spans: int
    distractor_kinds: dict[str, int] = field(default_factory=dict)


def _pick_pair(rng: random.Random, order: list[str], combos: list[tuple[str, str]]
               ) -> tuple[Syllable, Syllable]:
    """Two syllables with strictly scale-ordered tones from a combo pool."""
    i, j = sorted(rng.sample(range(len(order)), 2))
    c1, c2 = rng.sample(combos, 2)
    return Syllable(c1[0], c1[1], order[i]), Syllable(c2[0], c2[1], order[j])


def make_tagging_corpus(n_sentences: int = 10_000, n_ees: int = 500,
                        n_distractors: int = 2_000, ee_occurrences: int = 3,
                        seed: int = 0) -> TaggingFixture:
    """Gold-tagged corpus with planted EEs plus three distractor classes, each
    built to fall to one baseline filter:

      junk      - B1 is unparsable (digits), cut by the parsability filter
      rare      - parsable but single-occurrence words, OOV to any embedding
                  trained with min_count >= 2, cut by the similarity filter
      reversed  - distributionally similar pairs written against the planted
                  scale, cut only by the scale filter

    Real EEs and reversed distractors get compound-bigram and shared-context
    support sentences so trained embeddings rate their pairs similar. Filler
    tokens are unique within a sentence and disjoint from construct vocabulary,
    so every sentence contains exactly the candidates that were planted.
    """
    toy = toy_language(seed=seed, rich=True)
    rng = random.Random(seed + 1)
    inv = toy.inventory
    order = toy.order

    combos = [(o, r) for o in inv.onsets for r in inv.rhymes]
    rng.shuffle(combos)
    n_c = len(combos)
    real_pool = combos[: n_c * 40 // 100]
    rev_pool = combos[n_c * 40 // 100: n_c * 55 // 100]
    rare_pool = combos[n_c * 55 // 100: n_c * 90 // 100]
    a_pool = combos[n_c * 90 // 100:]

    n_junk = round(n_distractors * 0.4)
    n_rev_types = round(n_distractors * 0.2125)  # two occurrences each
    n_rare = n_distractors - n_junk - 2 * n_rev_types
    rare_tokens = [Syllable(o, r, t) for o, r in rare_pool for t in order]
    if 2 * n_rare > len(rare_tokens):
        raise ValueError(f"rare pool supports {len(rare_tokens) // 2} distractors, "
                         f"asked for {n_rare}")
    rng.shuffle(rare_tokens)

    def a_word() -> str:
        o, r = rng.choice(a_pool)
        return _token(Syllable(o, r, rng.choice(order)))

    # (tokens, tags) payloads to embed into sentences
    ee_payloads: list[tuple[list[str], list[str]]] = []
    support: list[list[str]] = []
    real_spans = 0
    for _ in range(n_ees):
        b1, b2 = _pick_pair(rng, order, real_pool)
        t1, t2, a = _token(b1), _token(b2), a_word()
        for _ in range(ee_occurrences):
            ee_payloads.append(([a, t1, a, t2], ["B", "I", "I", "I"]))
            real_spans += 1
        support.append([t1, t2])  # compound bigram
        ctx1, ctx2 = a_word(), a_word()
        support.append([ctx1, t1, ctx2])
        support.append([ctx1, t2, ctx2])

    distractors: list[list[str]] = []
    kinds = {"junk": 0, "rare": 0, "reversed": 0}
    for i in range(n_junk):
        y = _token(_syllable(rng, inv, rng.choice(order)))
        x = f"zq{i}x"  # digit makes it unparsable
        a = a_word()
        distractors.append([a, x, a, y])
        kinds["junk"] += 1
    for i in range(n_rare):
        x, y = rare_tokens[2 * i], rare_tokens[2 * i + 1]
        a = a_word()
        distractors.append([a, _token(x), a, _token(y)])
        kinds["rare"] += 1
    for _ in range(n_rev_types):
        lo, hi = _pick_pair(rng, order, rev_pool)
        t_lo, t_hi, a = _token(lo), _token(hi), a_word()
        for _ in range(2):  # two occurrences, like real EEs
            distractors.append([a, t_hi, a, t_lo])
            kinds["reversed"] += 1
        support.append([t_lo, t_hi])
        ctx1, ctx2 = a_word(), a_word()
        support.append([ctx1, t_lo, ctx2])
        support.append([ctx1, t_hi, ctx2])

    filler_vocab = [f"f{i}" for i in range(3000)]

    def fillers(k: int) -> list[str]:
        return rng.sample(filler_vocab, k)

    sentences: list[TaggedSentence] = []

    def add(payload_tokens: list[str], payload_tags: list[str] | None) -> None:
        left, right = fillers(rng.randint(1, 3)), fillers(rng.randint(1, 3))
        tokens = left + payload_tokens + right
        tags = ["O"] * len(left) + (payload_tags or ["O"] * len(payload_tokens)) \
            + ["O"] * len(right)
        sentences.append(TaggedSentence(tokens, tags))

    for tokens, tags in ee_payloads:
        add(tokens, tags)
    for tokens in distractors:
        add(tokens, None)
    for tokens in support:
        add(tokens, None)
    n_fill = n_sentences - len(sentences)
    if n_fill < 0:
        raise ValueError(f"{len(sentences)} structured sentences exceed {n_sentences}")
    for _ in range(n_fill):
        toks = fillers(rng.randint(3, 7))
        sentences.append(TaggedSentence(toks, ["O"] * len(toks)))
    rng.shuffle(sentences)
    return TaggingFixture(sentences, toy, real_spans, len(distractors), kinds)


# --- component-overlap corpus -------------------------------------------------------


@dataclass
class OverlapFixture:
    train: TaggedCorpus
    dev: TaggedCorpus
    test: TaggedCorpus
    train_records: list[EERecord]
    test_records: list[EERecord]
    toy: ToyLanguage


def make_overlap_corpus(n_pairs: int = 50, same_order: int = 9, reversed_order: int = 1,
                        test_occurrences: int = 4, n_negatives: int = 1500,
                        seed: int = 0) -> OverlapFixture:
    """Corpus triple where test EEs are unseen as wholes but their component
    pairs occur in training EEs with a same:reversed ratio of
    same_order:reversed_order (the distributional route to ordering).

    Training also plants "fake-A" 4-grams: real component pairs wrapped by
    words that are never A words. A rule cascade cannot reject them, but a
    tagger can learn the A-word lexicon.
    """
    toy = toy_language(seed=seed, rich=True)
    rng = random.Random(seed + 7)
    inv = toy.inventory
    order = toy.order
    combos = [(o, r) for o in inv.onsets for r in inv.rhymes]
    rng.shuffle(combos)
    comp_pool = combos[: len(combos) // 2]
    a_pool = combos[len(combos) // 2: len(combos) * 3 // 4]
    fake_a_pool = combos[len(combos) * 3 // 4:]

    pairs = [_pick_pair(rng, order, comp_pool) for _ in range(n_pairs)]
    # small closed vocabularies: real A words recur with B tags, fake A words
    # recur tagged O, so a-slot lexical knowledge is learnable from training
    a_words = rng.sample([_token(Syllable(o, r, t)) for o, r in a_pool
                          for t in order], 30)
    fake_words = rng.sample([_token(Syllable(o, r, t)) for o, r in fake_a_pool
                             for t in order], 15)

    train_records: list[EERecord] = []
    test_records: list[EERecord] = []
    train_payloads: list[tuple[list[str], list[str]]] = []
    dev_payloads: list[tuple[list[str], list[str]]] = []
    test_payloads: list[tuple[list[str], list[str]]] = []
    fake_payloads: list[list[str]] = []

    for pi, (b1s, b2s) in enumerate(pairs):
        t1, t2 = _token(b1s), _token(b2s)
        # distinct A words within a pair keep the EE triples disjoint
        a_draw = rng.sample(a_words, same_order + reversed_order + 1)
        for a in a_draw[:same_order]:
            train_records.append(EERecord("toy", "AB1AB2", a, t1, t2, b1s, b2s))
            train_payloads.append(([a, t1, a, t2], ["B", "I", "I", "I"]))
        for a in a_draw[same_order:same_order + reversed_order]:
            train_records.append(EERecord("toy", "AB1AB2", a, t2, t1, b2s, b1s))
            train_payloads.append(([a, t2, a, t1], ["B", "I", "I", "I"]))
        # the held-out EE type for this pair goes to dev or test, never both
        a = a_draw[-1]
        held = dev_payloads if pi % 4 == 0 else test_payloads
        if held is test_payloads:
            test_records.append(EERecord("toy", "AB1AB2", a, t1, t2, b1s, b2s))
        for _ in range(test_occurrences):
            held.append(([a, t1, a, t2], ["B", "I", "I", "I"]))
        # fake-A distractors pass every cascade filter; only lexical knowledge
        # of what can be an A word rejects them
        for _ in range(2):
            fa = rng.choice(fake_words)
            fake_payloads.append([fa, t1, fa, t2])

    filler_vocab = [f"n{i}" for i in range(2000)]

    def wrap(payload: list[str], tags: list[str] | None) -> TaggedSentence:
        left = rng.sample(filler_vocab, rng.randint(1, 2))
        right = rng.sample(filler_vocab, rng.randint(1, 2))
        full_tags = ["O"] * len(left) + (tags or ["O"] * len(payload)) + ["O"] * len(right)
        return TaggedSentence(left + payload + right, full_tags)

    def negatives(k: int) -> list[TaggedSentence]:
        out = []
        for _ in range(k):
            toks = rng.sample(filler_vocab, rng.randint(3, 6))
            out.append(TaggedSentence(toks, ["O"] * len(toks)))
        return out

    rng.shuffle(fake_payloads)
    n_fake_test = max(1, len(fake_payloads) // 5)
    train = [wrap(p, t) for p, t in train_payloads]
    train += [wrap(p, None) for p in fake_payloads[: -2 * n_fake_test]]
    train += negatives(n_negatives)
    dev = [wrap(p, t) for p, t in dev_payloads]
    dev += [wrap(p, None) for p in fake_payloads[-2 * n_fake_test: -n_fake_test]]
    dev += negatives(n_negatives // 10)
    test = [wrap(p, t) for p, t in test_payloads]
    test += [wrap(p, None) for p in fake_payloads[-n_fake_test:]]
    test += negatives(n_negatives // 5)
    for part in (train, dev, test):
        rng.shuffle(part)
    return OverlapFixture(train, dev, test, train_records, test_records, toy)


# --- toy embedding corpus -----------------------------------------------------------


def make_embedding_corpus(n_pairs: int = 10, reps: int = 30, seed: int = 0
                          ) -> tuple[list[list[str]], list[tuple[str, str]],
                                     list[tuple[str, str]]]:
    """Corpus with n_pairs always-co-occurring word pairs and n_pairs pairs
    that never share a sentence (each side living in its own context set)."""
    rng = random.Random(seed)
    planted = [(f"p{i}", f"q{i}") for i in range(n_pairs)]
    never = [(f"r{i}", f"s{i}") for i in range(n_pairs)]
    corpus: list[list[str]] = []
    for i, (a, b) in enumerate(planted):
        ctx = [f"c{i}_{j}" for j in range(6)]  # per-pair contexts
        for _ in range(reps):
            c1, c2 = rng.sample(ctx, 2)
            corpus.append([c1, a, b, c2])
    for i, (a, b) in enumerate(never):
        ctx_a = [f"xa{i}_{j}" for j in range(4)]
        ctx_b = [f"xb{i}_{j}" for j in range(4)]
        for _ in range(reps):
            corpus.append([rng.choice(ctx_a), a, rng.choice(ctx_a)])
            corpus.append([rng.choice(ctx_b), b, rng.choice(ctx_b)])
    rng.shuffle(corpus)
    return corpus, planted, never
