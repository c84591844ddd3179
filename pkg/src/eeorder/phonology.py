"""Language profiles and syllable parsing.

A language is described by a phoneme inventory (onsets, rhymes, tones) loaded
from a plain-text file. Tokens are decomposed into onset + rhyme + tone by
greedy longest-match with backtracking over onset choices. The tone slot is
optional in the orthography; a missing tone letter maps to the zero-tone
sentinel, which renders as the empty string.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

# Sentinel symbol for the unmarked (mid) tone and for onsetless syllables.
# It is stored as a real symbol so (symbol, class) pairs stay unique, but it
# renders as "".
ZERO = "∅"


class PhonemeClass(str, Enum):
    ONSET = "onset"
    RHYME = "rhyme"
    TONE = "tone"


class InventoryError(ValueError):
    """Malformed or inconsistent inventory file."""


class NoParse(ValueError):
    """Token is not a well-formed syllable of the language.

    Callers must treat this as "unparsable input", never as a crash: records
    are dropped with a warning, tagger candidates fail their filter, etc.
    """


@dataclass(frozen=True)
class Phoneme:
    symbol: str
    cls: PhonemeClass


@dataclass(frozen=True)
class Syllable:
    """One orthographic syllable. Fields hold symbols; the slot fixes the class."""

    onset: str  # ZERO when the syllable has no onset
    rhyme: str
    tone: str  # ZERO when no tone letter is written

    def __str__(self) -> str:
        return f"({self.onset} {self.rhyme} {self.tone})"


def _by_length(symbols: list[str]) -> tuple[str, ...]:
    # longest-match order; file order breaks length ties so parses stay stable
    return tuple(s for s, _ in sorted(((s, i) for i, s in enumerate(symbols)),
                                      key=lambda t: (-len(t[0]), t[1])))


@dataclass(frozen=True)
class PhonemeInventory:
    language: str
    onsets: tuple[str, ...]  # sorted by descending length
    rhymes: tuple[str, ...]  # sorted by descending length
    tones: tuple[str, ...]  # file order, includes ZERO
    allow_empty_onset: bool = True

    def symbols(self, cls: PhonemeClass) -> tuple[str, ...]:
        return {PhonemeClass.ONSET: self.onsets,
                PhonemeClass.RHYME: self.rhymes,
                PhonemeClass.TONE: self.tones}[cls]

    def valid_syllable(self, s: Syllable) -> bool:
        onset_ok = s.onset in self.onsets or (s.onset == ZERO and self.allow_empty_onset)
        return onset_ok and s.rhyme in self.rhymes and s.tone in self.tones


@dataclass(frozen=True)
class LanguageProfile:
    language: str
    inventory: PhonemeInventory
    focal: PhonemeClass  # TONE for Hmong/Chinese, RHYME for Lahu
    mc_mode: bool = False  # Middle Chinese tone-category semantics


_SECTIONS = {"[onsets]": "onsets", "[rhymes]": "rhymes", "[tones]": "tones"}


def load_inventory(path: str | Path, language: str | None = None) -> PhonemeInventory:
    """Load an inventory file.

    Format: UTF-8 text with sections ``[onsets]``, ``[rhymes]``, ``[tones]``,
    one symbol per line, ``#`` comments. The literal line ``0`` in the tones
    section denotes the zero-tone sentinel. An optional directive line
    ``allow-empty-onset: false`` before the first section disables onsetless
    parses (default: enabled).
    """
    path = Path(path)
    sections: dict[str, list[str]] = {"onsets": [], "rhymes": [], "tones": []}
    allow_empty = True
    current: str | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower() in _SECTIONS:
            current = _SECTIONS[line.lower()]
            continue
        if line.startswith("[") and line.endswith("]"):
            raise InventoryError(f"{path}:{lineno}: unknown section {line!r}")
        if current is None:
            key, _, value = line.partition(":")
            if key.strip().lower() == "allow-empty-onset":
                allow_empty = value.strip().lower() not in ("false", "no", "0")
                continue
            raise InventoryError(f"{path}:{lineno}: symbol outside any section: {line!r}")
        symbol = ZERO if (current == "tones" and line == "0") else line
        if symbol in sections[current]:
            raise InventoryError(f"{path}:{lineno}: duplicate {current[:-1]} {symbol!r}")
        sections[current].append(symbol)

    for name in ("onsets", "rhymes", "tones"):
        if not sections[name]:
            raise InventoryError(f"{path}: missing or empty [{name}] section")

    # Onset/tone overlap is legal (Hmong RPA tone letters reuse consonant
    # letters; position disambiguates). Overlap involving rhymes is not: it
    # would make longest-match parses ambiguous.
    for a, b in (("onsets", "rhymes"), ("rhymes", "tones")):
        shared = set(sections[a]) & set(sections[b])
        if shared:
            raise InventoryError(
                f"{path}: symbols {sorted(shared)} appear in both [{a}] and [{b}]")

    return PhonemeInventory(
        language=language or path.stem,
        onsets=_by_length(sections["onsets"]),
        rhymes=_by_length(sections["rhymes"]),
        tones=tuple(sections["tones"]),
        allow_empty_onset=allow_empty,
    )


def parse_syllable(inv: PhonemeInventory, token: str) -> Syllable:
    """Decompose a token into onset + rhyme + tone.

    Greedy longest-match: the longest onset prefix is tried first, then the
    longest rhyme; the remaining tail must be empty (zero tone) or exactly one
    tone symbol. If the longest onset leaves no valid rhyme+tone parse, the
    next-longest onset is tried, the empty onset last. Raises NoParse when no
    decomposition exists.
    """
    if not token or any(c.isspace() for c in token):
        raise NoParse(f"not a single token: {token!r}")
    onsets: tuple[str, ...] = inv.onsets
    if inv.allow_empty_onset:
        onsets = onsets + ("",)
    for onset in onsets:
        if not token.startswith(onset):
            continue
        rest = token[len(onset):]
        for rhyme in inv.rhymes:
            if not rest.startswith(rhyme):
                continue
            tail = rest[len(rhyme):]
            if tail == "":
                return Syllable(onset or ZERO, rhyme, ZERO)
            if tail in inv.tones:
                return Syllable(onset or ZERO, rhyme, tail)
    raise NoParse(f"no syllable parse for {token!r} in {inv.language}")


def try_parse_syllable(inv: PhonemeInventory, token: str) -> Syllable | None:
    try:
        return parse_syllable(inv, token)
    except NoParse:
        return None


def render_syllable(inv: PhonemeInventory, s: Syllable) -> str:
    """Inverse of parse_syllable on parsable tokens. Sentinels render empty."""
    if not inv.valid_syllable(s):
        raise InventoryError(f"syllable {s} not valid for inventory {inv.language}")
    onset = "" if s.onset == ZERO else s.onset
    tone = "" if s.tone == ZERO else s.tone
    return onset + s.rhyme + tone


def focal_phoneme(profile: LanguageProfile, s: Syllable) -> Phoneme:
    """The constituent claimed to govern ordering: tone or rhyme, never onset."""
    if profile.focal == PhonemeClass.TONE:
        return Phoneme(s.tone, PhonemeClass.TONE)
    if profile.focal == PhonemeClass.RHYME:
        return Phoneme(s.rhyme, PhonemeClass.RHYME)
    raise ValueError(f"focal constituent must be tone or rhyme, got {profile.focal}")


def write_inventory(inv: PhonemeInventory, path: str | Path) -> None:
    lines = []
    if not inv.allow_empty_onset:
        lines.append("allow-empty-onset: false")
    for section, symbols in (("onsets", inv.onsets), ("rhymes", inv.rhymes),
                             ("tones", inv.tones)):
        lines.append(f"[{section}]")
        lines.extend("0" if s == ZERO else s for s in symbols)
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


# --- Middle Chinese -----------------------------------------------------------

MC_CATEGORIES = ("ping", "shang", "qu", "ru")

_MC_MARKS = {
    "": "ping", ZERO: "ping", "0": "ping", "ping": "ping", "level": "ping",
    "x": "shang", "shang": "shang",
    "h": "qu", "qu": "qu",
}


@dataclass(frozen=True)
class MCReading:
    """One Middle Chinese reading from the readings TSV."""

    character: str
    onset: str
    rhyme: str
    coda: str
    tone_mark: str


def mc_tone_category(reading: MCReading) -> str:
    """Map a reading to ping/shang/qu/ru.

    Stop codas -p/-t/-k are the entering tone regardless of the mark;
    otherwise the mark decides: unmarked = ping, X = shang, H = qu.
    """
    if reading.coda in ("p", "t", "k"):
        return "ru"
    mark = reading.tone_mark.strip().lower()
    if mark in _MC_MARKS:
        return _MC_MARKS[mark]
    raise ValueError(f"unknown tone mark {reading.tone_mark!r} with coda {reading.coda!r}")


def load_mc_readings(path: str | Path) -> dict[str, MCReading]:
    """Read the TSV of per-character readings: character, onset, rhyme, coda, tone_mark."""
    readings: dict[str, MCReading] = {}
    path = Path(path)
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if parts[0] == "character":  # header
                continue
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 TSV columns, got {len(parts)}")
            char, onset, rhyme, coda, mark = parts
            readings[char] = MCReading(char, onset, rhyme, coda, mark)
    return readings


# --- Shipped profiles ---------------------------------------------------------

_PROFILES = {
    "hmong": ("hmong.inv", PhonemeClass.TONE, False),
    "lahu": ("lahu.inv", PhonemeClass.RHYME, False),
    "mandarin": ("mandarin.inv", PhonemeClass.TONE, False),
    "middle-chinese": ("middle_chinese.inv", PhonemeClass.TONE, True),
}
_ALIASES = {"mc": "middle-chinese", "middle_chinese": "middle-chinese", "cmn": "mandarin",
            "hmn": "hmong", "lhu": "lahu"}


def data_dir() -> Path:
    """Directory holding inventories and scales; EEORDER_DATA overrides the packaged one."""
    env = os.environ.get("EEORDER_DATA")
    if env:
        return Path(env)
    return Path(str(resources.files("eeorder").joinpath("data")))


def available_languages() -> tuple[str, ...]:
    return tuple(_PROFILES)


def load_profile(language: str, directory: str | Path | None = None) -> LanguageProfile:
    """Load a shipped language profile by name ("hmong", "lahu", "mandarin", "middle-chinese")."""
    lang = _ALIASES.get(language.lower(), language.lower())
    if lang not in _PROFILES:
        raise KeyError(f"unknown language {language!r}; known: {', '.join(_PROFILES)}")
    filename, focal, mc_mode = _PROFILES[lang]
    base = Path(directory) if directory is not None else data_dir()
    inv = load_inventory(base / filename, language=lang)
    return LanguageProfile(language=lang, inventory=inv, focal=focal, mc_mode=mc_mode)
