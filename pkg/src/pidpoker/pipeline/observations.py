"""Per-street (W1, P1, W2) observations and their joint distributions."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from ..handeval import Card, HandScore, score_hand
from ..handparse import ActionKind, HandRecord, voluntary_wagers
from ..infodecomp import JointDistribution3
from .binning import BinningSpec, StrengthState, WagerState, bin_strength, bin_wager
from .ledger import SkillClass


class Variant(str, enum.Enum):
    MAIN = "main"
    PREFLOP_ONLY = "preflop"
    SHOWDOWN_ONLY = "showdown"
    BOTH_POSITIONS = "both-positions"


class NonHeadsUpHand(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class RawRound:
    """One street of one two-player hand, before binning."""

    hand_id: str
    level: int
    street: str
    board: tuple[str, ...]
    order: tuple[str, str]  # (first, second) to act voluntarily preflop
    wagers: Mapping[str, int]


@dataclass(frozen=True)
class RoundObservation:
    w1: WagerState
    w2: WagerState
    p1: StrengthState
    level: int
    street: str
    hero_position: str  # "first" | "second"
    hero_skill: SkillClass
    hand_id: str
    hero: str = ""

    @property
    def cell(self) -> tuple[int, int, int]:
        """Index into the (W1, P1, W2) table."""
        return int(self.w1), int(self.p1), int(self.w2)


def action_order(hand: HandRecord) -> tuple[str, str]:
    """(first, second) player to act voluntarily in the preflop round.

    A player who never acts voluntarily preflop (the big blind after a
    walk) is second.
    """
    if len(hand.seats) != 2:
        raise NonHeadsUpHand(f"hand {hand.hand_id} has {len(hand.seats)} players")
    seen: list[str] = []
    pre = hand.street("preflop")
    for a in pre.actions if pre else ():
        if a.kind is not ActionKind.POST_BLIND and a.player not in seen:
            seen.append(a.player)
    for p in hand.players[::-1]:
        if p not in seen:
            seen.append(p)
    return seen[0], seen[1]


def raw_rounds(hand: HandRecord) -> Iterator[RawRound]:
    """Streets with voluntary action (preflop always) of a two-player hand."""
    order = action_order(hand)
    for st in hand.streets:
        if st.name != "preflop" and not any(a.kind is not ActionKind.POST_BLIND for a in st.actions):
            continue
        vol = voluntary_wagers(st)
        yield RawRound(hand.hand_id, hand.blind_cents, st.name, st.board, order, {p: vol.get(p, 0) for p in order})


def revealed_score(hand: HandRecord, player: str, board: Sequence[str]) -> HandScore | None:
    cards = hand.revealed(player)
    if cards is None:
        return None
    return score_hand([Card.parse(c) for c in cards], [Card.parse(c) for c in board])


def extract_observations(
    hands: Iterable[HandRecord],
    classes: Mapping[int, Mapping[str, SkillClass]],
    variant: Variant | str,
    bins: BinningSpec,
    wager_cutoffs: str = "blind",
) -> list[RoundObservation]:
    """Observations for two-player hands under ``variant``.

    ``classes[level][player]`` gives skill classes (missing players are
    Other).  Wagers are binned at the blind unless ``wager_cutoffs`` is
    ``"fitted"``, in which case the fitted max small wager is used.
    """
    variant = Variant(variant)
    out: list[RoundObservation] = []
    for hand in hands:
        if len(hand.seats) != 2:
            raise NonHeadsUpHand(f"hand {hand.hand_id} has {len(hand.seats)} players")
        level = hand.blind_cents
        level_classes = classes.get(level, {})
        cut = bins[level].max_small_wager if wager_cutoffs == "fitted" else None
        positions = (1, 0) if variant is Variant.BOTH_POSITIONS else (1,)
        for rnd in raw_rounds(hand):
            if variant is Variant.PREFLOP_ONLY and rnd.street != "preflop":
                continue
            for pos in positions:
                hero, villain = rnd.order[pos], rnd.order[1 - pos]
                p1 = bin_strength(revealed_score(hand, hero, rnd.board), bins, level)
                if variant is Variant.SHOWDOWN_ONLY and p1 is StrengthState.NOT_OBSERVED:
                    continue
                out.append(RoundObservation(
                    w1=bin_wager(rnd.wagers[hero], level, cut),
                    w2=bin_wager(rnd.wagers[villain], level, cut),
                    p1=p1,
                    level=level,
                    street=rnd.street,
                    hero_position="second" if pos == 1 else "first",
                    hero_skill=level_classes.get(hero, SkillClass.OTHER),
                    hand_id=hand.hand_id,
                    hero=hero,
                ))
    return out


def count_table(observations: Iterable[RoundObservation]) -> np.ndarray:
    counts = np.zeros((3, 3, 3), dtype=np.int64)
    for o in observations:
        counts[o.cell] += 1
    return counts


def build_joint(observations: Sequence[RoundObservation]) -> JointDistribution3:
    """Plug-in p(W1, P1, W2) from observation counts, no smoothing."""
    counts = count_table(observations)
    if counts.sum() == 0:
        raise EmptyInput("no observations")
    return JointDistribution3.from_counts(counts)
