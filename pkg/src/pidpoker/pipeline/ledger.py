"""Per-level profit ledger and shark / fish classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..handparse import HandRecord, net_results


class SkillClass(str, enum.Enum):
    SHARK = "Shark"
    FISH = "Fish"
    OTHER = "Other"


@dataclass(frozen=True)
class LedgerEntry:
    hands: int
    net_cents: int

    @property
    def mean(self) -> Fraction:
        return Fraction(self.net_cents, self.hands)


class PlayerLedger(dict):
    """Mapping ``(player, blind_cents) -> LedgerEntry``."""

    def levels(self) -> list[int]:
        return sorted({lvl for _, lvl in self})

    def at_level(self, level: int) -> dict[str, LedgerEntry]:
        return {p: e for (p, lvl), e in self.items() if lvl == level}


def ledger_build(hands: Iterable[HandRecord]) -> PlayerLedger:
    hands_n: dict[tuple[str, int], int] = {}
    net: dict[tuple[str, int], int] = {}
    for h in hands:
        for player, delta in net_results(h).items():
            key = (player, h.blind_cents)
            hands_n[key] = hands_n.get(key, 0) + 1
            net[key] = net.get(key, 0) + delta
    return PlayerLedger({k: LedgerEntry(hands_n[k], net[k]) for k in sorted(hands_n)})


def classify(ledger: PlayerLedger, level: int) -> dict[str, SkillClass]:
    """Shark if mean profit > 0; Fish if in the worst half of the rest.

    The worst half holds ``ceil(n / 2)`` of the ``n`` unprofitable players.
    A group of players tied on mean profit that straddles that boundary is
    labelled Other as a whole.
    """
    entries = ledger.at_level(level)
    out = {p: SkillClass.SHARK for p, e in entries.items() if e.mean > 0}
    losers = sorted((e.mean, p) for p, e in entries.items() if e.mean <= 0)
    quota = (len(losers) + 1) // 2
    for i, (mean, p) in enumerate(losers):
        if i < quota:
            straddles = quota < len(losers) and losers[quota][0] == mean
            out[p] = SkillClass.OTHER if straddles else SkillClass.FISH
        else:
            out[p] = SkillClass.OTHER
    return dict(sorted(out.items()))


def fish_max_mean(ledger: PlayerLedger, level: int) -> Fraction | None:
    """Largest mean profit among Fish at ``level`` (the fish cutoff)."""
    classes = classify(ledger, level)
    entries = ledger.at_level(level)
    means = [entries[p].mean for p, c in classes.items() if c is SkillClass.FISH]
    return max(means) if means else None
