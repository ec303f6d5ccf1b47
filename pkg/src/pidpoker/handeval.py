"""Ordinal scoring of Hold'em hands and the 169-class preflop ranking.

Cards are ``Card(rank, suit)`` with ranks 2..14 (ace high) and suits from
``"cdhs"``.  Internally a card is the integer ``(rank - 2) * 4 + suit``.

A showdown score packs the hand category and up to five tie-break ranks
into one integer, so ``score_hand(a).ordinal > score_hand(b).ordinal``
exactly when hand ``a`` wins against ``b`` on the same board.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

RANK_CHARS = "23456789TJQKA"
SUIT_CHARS = "cdhs"
SUIT_SYMBOLS = {"♣": "c", "♦": "d", "♥": "h", "♠": "s"}

PREFLOP_TABLE = "preflop_ranking.txt"
N_PREFLOP_CLASSES = 169


class HandEvalError(ValueError):
    pass


class DuplicateCard(HandEvalError):
    pass


class InvalidCommunitySize(HandEvalError):
    pass


class Category(enum.IntEnum):
    HIGH_CARD = 0
    PAIR = 1
    TWO_PAIR = 2
    TRIPS = 3
    STRAIGHT = 4
    FLUSH = 5
    FULL_HOUSE = 6
    QUADS = 7
    STRAIGHT_FLUSH = 8

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", " ")


class Card(NamedTuple):
    rank: int
    suit: str

    @classmethod
    def parse(cls, text: str) -> "Card":
        text = text.strip()
        if len(text) != 2:
            raise HandEvalError(f"bad card {text!r}")
        r, s = text[0].upper(), SUIT_SYMBOLS.get(text[1], text[1].lower())
        if r not in RANK_CHARS or s not in SUIT_CHARS:
            raise HandEvalError(f"bad card {text!r}")
        return cls(RANK_CHARS.index(r) + 2, s)

    @classmethod
    def from_code(cls, code: int) -> "Card":
        return cls((code >> 2) + 2, SUIT_CHARS[code & 3])

    @property
    def code(self) -> int:
        return (self.rank - 2) * 4 + SUIT_CHARS.index(self.suit)

    def __str__(self) -> str:
        return RANK_CHARS[self.rank - 2] + self.suit


def parse_cards(text: str | Iterable[str]) -> tuple[Card, ...]:
    """Parse ``"As Kd"`` or ``["As", "Kd"]`` into cards."""
    items = text.split() if isinstance(text, str) else text
    return tuple(c if isinstance(c, Card) else Card.parse(c) for c in items)


# -- lookup tables over 13-bit rank masks (bit i = rank i + 2) -------------


def _build_mask_tables():
    straight = [0] * 8192
    top5 = [0] * 8192
    windows = [(0b11111 << lo, lo + 6) for lo in range(9)]  # 2-6 .. T-A
    wheel = (1 << 12) | 0b1111
    for mask in range(8192):
        best = 0
        for bits, high in windows:
            if mask & bits == bits:
                best = high
        if not best and mask & wheel == wheel:
            best = 5
        straight[mask] = best
        packed, n = 0, 0
        for i in range(12, -1, -1):
            if mask >> i & 1:
                packed = packed << 4 | (i + 2)
                n += 1
                if n == 5:
                    break
        top5[mask] = packed << 4 * (5 - n)
    return straight, top5


_STRAIGHT_HIGH, _TOP5 = _build_mask_tables()
_POPCOUNT = [bin(m).count("1") for m in range(8192)]


def _pack(category: int, ranks: Sequence[int]) -> int:
    v = 0
    for r in ranks:
        v = v << 4 | r
    return category << 20 | v << 4 * (5 - len(ranks))


def evaluate_codes(codes: Sequence[int]) -> int:
    """Packed showdown ordinal of the best 5-card hand among 5 to 7 cards.

    No validation; ``score_hand`` is the checked entry point.
    """
    counts = [0] * 13
    suits = [0, 0, 0, 0]
    for c in codes:
        r = c >> 2
        counts[r] += 1
        suits[c & 3] |= 1 << r

    for m in suits:
        if _POPCOUNT[m] >= 5:
            sf = _STRAIGHT_HIGH[m]
            if sf:
                return 8 << 20 | sf << 16
            flush = 5 << 20 | _TOP5[m]
            break
    else:
        flush = 0

    quad = trip = trip2 = 0
    pairs = []
    singles = []
    for r in range(12, -1, -1):
        n = counts[r]
        if not n:
            continue
        if n == 1:
            singles.append(r + 2)
        elif n == 2:
            pairs.append(r + 2)
        elif n == 3:
            if trip:
                trip2 = trip2 or r + 2
            else:
                trip = r + 2
        else:
            quad = r + 2

    if quad:
        kick = max([x for x in (trip, *pairs[:1], *singles[:1]) if x] or [0])
        return 7 << 20 | quad << 16 | kick << 12
    if trip and (trip2 or pairs):
        second = max(trip2, pairs[0] if pairs else 0)
        return 6 << 20 | trip << 16 | second << 12
    if flush:
        return flush
    st = _STRAIGHT_HIGH[suits[0] | suits[1] | suits[2] | suits[3]]
    if st:
        return 4 << 20 | st << 16
    if trip:
        return 3 << 20 | trip << 16 | singles[0] << 12 | singles[1] << 8
    if len(pairs) >= 2:
        kick = singles[0] if singles else 0
        if len(pairs) > 2 and pairs[2] > kick:
            kick = pairs[2]
        return 2 << 20 | pairs[0] << 16 | pairs[1] << 12 | kick << 8
    if pairs:
        s = singles
        return 1 << 20 | pairs[0] << 16 | s[0] << 12 | s[1] << 8 | s[2] << 4
    s = singles
    return s[0] << 16 | s[1] << 12 | s[2] << 8 | s[3] << 4 | s[4]


def category_of(ordinal: int) -> Category:
    return Category(ordinal >> 20)


@dataclass(frozen=True, order=True)
class HandScore:
    """Ordinal hand strength.

    ``scale`` is ``"showdown"`` for made hands (3+ community cards) and
    ``"preflop"`` for the 169-class hole-card ranking; ordinals are only
    comparable within one scale.
    """

    scale: str
    ordinal: int
    category: Category

    def describe(self) -> str:
        if self.scale == "preflop":
            return f"preflop class rank {N_PREFLOP_CLASSES + 1 - self.ordinal}"
        ranks = [(self.ordinal >> s) & 15 for s in (16, 12, 8, 4, 0)]
        return f"{self.category.label} {' '.join(RANK_CHARS[r - 2] for r in ranks if r)}"


def showdown_ceiling(category: Category, rank: int) -> int:
    """Largest showdown ordinal of ``category`` whose leading rank is ``rank``.

    ``showdown_ceiling(Category.PAIR, 4)`` is the best possible pair of 4s,
    i.e. the cutoff written as "pair 4s".
    """
    return (int(category) << 20) | (rank << 16) | 0xFFFF


def _check_distinct(cards: Sequence[Card]) -> list[int]:
    codes = [c.code for c in cards]
    if len(set(codes)) != len(codes):
        dupes = sorted({str(c) for c in cards if codes.count(c.code) > 1})
        raise DuplicateCard(f"duplicate card(s): {' '.join(dupes)}")
    return codes


def score_hand(hole: Sequence[Card], community: Sequence[Card] = ()) -> HandScore:
    """Score hole cards against 0, 3, 4 or 5 community cards.

    With no community cards the score is the preflop class strength
    (``170 - rank``, so pocket aces score 169).
    """
    hole = parse_cards(hole) if isinstance(hole, str) else tuple(hole)
    community = parse_cards(community) if isinstance(community, str) else tuple(community)
    if len(hole) != 2:
        raise HandEvalError(f"expected 2 hole cards, got {len(hole)}")
    if len(community) not in (0, 3, 4, 5):
        raise InvalidCommunitySize(f"{len(community)} community cards")
    codes = _check_distinct(hole + community)
    if not community:
        pc = preflop_class(hole)
        cat = Category.PAIR if pc.label[0] == pc.label[1] else Category.HIGH_CARD
        return HandScore("preflop", N_PREFLOP_CLASSES + 1 - pc.rank, cat)
    ordinal = evaluate_codes(codes)
    return HandScore("showdown", ordinal, category_of(ordinal))


def compare(a: HandScore, b: HandScore) -> int:
    """-1, 0 or 1 as ``a`` loses to, ties or beats ``b``."""
    if a.scale != b.scale:
        raise HandEvalError(f"cannot compare {a.scale} and {b.scale} scores")
    return (a.ordinal > b.ordinal) - (a.ordinal < b.ordinal)


# -- preflop classes -------------------------------------------------------


@dataclass(frozen=True)
class PreflopClass:
    label: str  # "AA", "AKs", "72o"
    class_id: int  # 1..169 in canonical enumeration order
    rank: int  # 1 = strongest
    equity: float  # heads-up all-in equity against a random hand

    @property
    def combos(self) -> int:
        if len(self.label) == 2:
            return 6
        return 4 if self.label[2] == "s" else 12


def class_label(hole: Sequence[Card]) -> str:
    a, b = sorted(hole, key=lambda c: c.rank, reverse=True)
    hi, lo = RANK_CHARS[a.rank - 2], RANK_CHARS[b.rank - 2]
    if a.rank == b.rank:
        return hi + lo
    return hi + lo + ("s" if a.suit == b.suit else "o")


def canonical_labels() -> list[str]:
    """All 169 labels: pairs high to low, then suited, then offsuit."""
    ranks = RANK_CHARS[::-1]
    pairs = [r + r for r in ranks]
    unpaired = [(ranks[i], ranks[j]) for i in range(13) for j in range(i + 1, 13)]
    return pairs + [h + l + "s" for h, l in unpaired] + [h + l + "o" for h, l in unpaired]


@lru_cache(maxsize=None)
def preflop_table() -> dict[str, PreflopClass]:
    ids = {lab: i for i, lab in enumerate(canonical_labels(), start=1)}
    text = resources.files("pidpoker").joinpath("data", PREFLOP_TABLE).read_text(encoding="utf-8")
    table = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        label, rank, equity = line.split()
        table[label] = PreflopClass(label, ids[label], int(rank), float(equity))
    if len(table) != N_PREFLOP_CLASSES:
        raise RuntimeError(f"preflop table has {len(table)} classes, expected {N_PREFLOP_CLASSES}")
    return table


def preflop_class(hole: Sequence[Card]) -> PreflopClass:
    hole = parse_cards(hole) if isinstance(hole, str) else tuple(hole)
    if len(hole) != 2:
        raise HandEvalError(f"expected 2 hole cards, got {len(hole)}")
    _check_distinct(hole)
    return preflop_table()[class_label(hole)]


def best_five(hole: Sequence[Card], community: Sequence[Card]) -> tuple[Card, ...]:
    """The 5-card subset realizing the showdown score (first found on ties)."""
    cards = tuple(hole) + tuple(community)
    target = score_hand(hole, community).ordinal
    for combo in combinations(cards, 5):
        if evaluate_codes([c.code for c in combo]) == target:
            return combo
    raise AssertionError("unreachable")
