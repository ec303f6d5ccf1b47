"""Discretization of wagers and hand strength into three-state alphabets."""
from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..handeval import Category, HandScore, showdown_ceiling

DEFAULT_LEVELS = (25, 50, 100, 200, 400, 600, 1000)

# Median preflop class strength (170 - rank) over all 1,326 starting hands
# under the bundled ranking; used when no data-driven cutoff is available.
DEFAULT_PREFLOP_CUTOFF = 79


class BinningError(ValueError):
    pass


class NegativeAmount(BinningError):
    pass


class MissingCutoff(BinningError):
    pass


class InsufficientData(BinningError):
    pass


class WagerState(enum.IntEnum):
    NO_WAGER = 0
    SMALL = 1
    LARGE = 2

    @property
    def label(self) -> str:
        return ("NoWager", "Small", "Large")[self]


class StrengthState(enum.IntEnum):
    NOT_OBSERVED = 0
    WEAK = 1
    STRONG = 2

    @property
    def label(self) -> str:
        return ("NotObserved", "Weak", "Strong")[self]


@dataclass(frozen=True)
class LevelCutoffs:
    max_small_wager: int
    max_weak_showdown: int | None = None
    max_weak_preflop: int | None = None


@dataclass(frozen=True)
class BinningSpec:
    levels: Mapping[int, LevelCutoffs] = field(default_factory=dict)

    def __getitem__(self, level: int) -> LevelCutoffs:
        try:
            return self.levels[level]
        except KeyError:
            raise MissingCutoff(f"no cutoffs fitted for level {level}") from None

    def __contains__(self, level: int) -> bool:
        return level in self.levels

    @classmethod
    def table_s1(cls) -> "BinningSpec":
        """Reference cutoffs reported for the 2009 dataset."""
        return cls({
            lvl: LevelCutoffs(
                row.max_small_wager_cents,
                showdown_ceiling(Category.PAIR, row.max_weak_pair_rank),
                DEFAULT_PREFLOP_CUTOFF,
            )
            for lvl, row in TABLE_S1.items()
        })


def bin_wager(amount: int | None, level: int, cutoff: int | None = None) -> WagerState:
    """Bin one street's voluntary wager.

    ``None`` (fold) and ``0`` (check) are NoWager; amounts up to and
    including the cutoff (the blind unless given) are Small.
    """
    if amount is None or amount == 0:
        return WagerState.NO_WAGER
    if amount < 0:
        raise NegativeAmount(f"negative wager {amount}")
    limit = level if cutoff is None else cutoff
    return WagerState.SMALL if amount <= limit else WagerState.LARGE


def bin_strength(score: HandScore | None, cutoffs: BinningSpec, level: int) -> StrengthState:
    if score is None:
        return StrengthState.NOT_OBSERVED
    lc = cutoffs[level]
    limit = lc.max_weak_preflop if score.scale == "preflop" else lc.max_weak_showdown
    if limit is None:
        raise MissingCutoff(f"no {score.scale} strength cutoff at level {level}")
    return StrengthState.WEAK if score.ordinal <= limit else StrengthState.STRONG


def equal_frequency_cutoff(values: Iterable[int]) -> int:
    """Value ``c`` splitting ``values`` into ``<= c`` and ``> c`` halves.

    Picks the observed value whose split is most balanced; ties go to the
    smaller value.
    """
    xs = sorted(values)
    if not xs:
        raise InsufficientData("no values to split")
    n = len(xs)
    best, best_gap = xs[0], None
    prev = None
    for v in xs:
        if v == prev:
            continue
        prev = v
        left = bisect_right(xs, v)
        gap = abs(2 * left - n)
        if best_gap is None or gap < best_gap:
            best, best_gap = v, gap
    return best


def fit_bins(
    wagers: Mapping[int, Sequence[int]],
    scores: Mapping[int, Sequence[HandScore]] | None = None,
) -> BinningSpec:
    """Equal-frequency cutoffs per level.

    ``wagers[level]`` are voluntary street wagers (zeros are ignored);
    ``scores[level]`` are revealed hand scores over all betting rounds, split
    separately on the showdown and preflop scales.
    """
    scores = scores or {}
    out = {}
    for level in sorted(set(wagers) | set(scores)):
        nonzero = [w for w in wagers.get(level, ()) if w > 0]
        if not nonzero:
            raise InsufficientData(f"no nonzero wagers at level {level}")
        lvl_scores = scores.get(level, ())
        show = [s.ordinal for s in lvl_scores if s.scale == "showdown"]
        pre = [s.ordinal for s in lvl_scores if s.scale == "preflop"]
        out[level] = LevelCutoffs(
            equal_frequency_cutoff(nonzero),
            equal_frequency_cutoff(show) if show else None,
            equal_frequency_cutoff(pre) if pre else None,
        )
    return BinningSpec(out)


@dataclass(frozen=True)
class TableS1Row:
    hands: int
    hands_two_player: int
    max_small_wager_cents: int
    max_weak_pair_rank: int
    fish_max_mean_cents: float
    pct_sharks: float
    fish_w1: tuple[float, float, float]
    fish_w2: tuple[float, float, float]
    fish_p1: tuple[float, float, float]
    shark_w1: tuple[float, float, float]
    shark_w2: tuple[float, float, float]
    shark_p1: tuple[float, float, float]


# Descriptive statistics of the 2009 dataset by blind level (cents).
# Marginals are ordered (NoWager, Small, Large) and (NotObserved, Weak, Strong).
TABLE_S1: dict[int, TableS1Row] = {
    25: TableS1Row(4045738, 62149, 25, 4, -40.0, 14.9,
                   (0.080, 0.483, 0.437), (0.108, 0.514, 0.378), (0.799, 0.111, 0.090),
                   (0.092, 0.557, 0.351), (0.097, 0.557, 0.346), (0.803, 0.102, 0.094)),
    50: TableS1Row(1216576, 611386, 50, 3, -64.0, 13.3,
                   (0.123, 0.506, 0.371), (0.094, 0.465, 0.441), (0.806, 0.090, 0.104),
                   (0.128, 0.536, 0.336), (0.072, 0.496, 0.432), (0.774, 0.102, 0.124)),
    100: TableS1Row(1323528, 454246, 100, 4, -124.0, 12.9,
                    (0.144, 0.510, 0.346), (0.098, 0.477, 0.425), (0.839, 0.072, 0.089),
                    (0.144, 0.512, 0.344), (0.077, 0.501, 0.422), (0.807, 0.084, 0.110)),
    200: TableS1Row(1189242, 337432, 200, 5, -243.0, 11.9,
                    (0.146, 0.509, 0.344), (0.103, 0.470, 0.427), (0.846, 0.068, 0.086),
                    (0.159, 0.486, 0.355), (0.081, 0.497, 0.422), (0.825, 0.074, 0.101)),
    400: TableS1Row(845455, 140858, 400, 6, -480.0, 11.0,
                    (0.152, 0.493, 0.355), (0.109, 0.471, 0.419), (0.858, 0.060, 0.082),
                    (0.155, 0.490, 0.355), (0.097, 0.498, 0.405), (0.843, 0.062, 0.094)),
    600: TableS1Row(332841, 57057, 600, 6, -733.0, 12.2,
                    (0.153, 0.494, 0.353), (0.124, 0.465, 0.411), (0.876, 0.051, 0.073),
                    (0.157, 0.491, 0.352), (0.093, 0.506, 0.402), (0.836, 0.069, 0.095)),
    1000: TableS1Row(320686, 87105, 1000, 6, -1260.0, 10.0,
                     (0.162, 0.492, 0.345), (0.121, 0.468, 0.411), (0.881, 0.050, 0.069),
                     (0.156, 0.502, 0.343), (0.105, 0.503, 0.392), (0.849, 0.062, 0.090)),
}
