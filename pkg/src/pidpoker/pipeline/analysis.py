"""Per (level x skill class) decompositions with bootstrap intervals."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..handeval import Category, showdown_ceiling
from ..handparse import HandRecord
from ..infodecomp import (
    SPECIFIC_FIELDS,
    JointDistribution3,
    decompose,
    entropy,
    specific_decompose,
)
from .binning import (
    DEFAULT_LEVELS,
    DEFAULT_PREFLOP_CUTOFF,
    TABLE_S1,
    BinningSpec,
    LevelCutoffs,
    MissingCutoff,
    WagerState,
    equal_frequency_cutoff,
)
from .bootstrap import bootstrap_ci
from .ledger import PlayerLedger, SkillClass, classify, fish_max_mean, ledger_build
from .observations import RoundObservation, Variant, count_table, extract_observations, raw_rounds, revealed_score

SCALAR_MEASURES = (
    "entropy_w1",
    "total",
    "normalized_total",
    "redundancy",
    "unique_p1",
    "unique_w2",
    "synergy",
    "mi_p1",
    "mi_w2",
    "interaction_info",
)
SPECIFIC_MEASURES = (
    "specific_total",
    "specific_redundancy",
    "specific_unique_p1",
    "specific_unique_w2",
    "specific_synergy",
    "state_weight",
)
CSV_COLUMNS = ("level", "skill_class", "measure", "state", "estimate", "ci_low", "ci_high", "n")


def _tool_version() -> str:
    from .. import __version__

    return __version__


@dataclass(frozen=True)
class AnalysisConfig:
    """Resolved analysis settings.

    ``levels=None`` analyzes every level present in the input.
    ``wager_cutoffs`` is ``"blind"`` (Small iff amount <= blind) or
    ``"fitted"`` (equal-frequency cutoff per level).  ``strength_cutoffs`` is
    ``"fitted"`` or ``"reference"`` (bundled 2009 cutoffs).
    """

    variant: Variant = Variant.MAIN
    resamples: int = 500
    seed: int = 0
    levels: tuple[int, ...] | None = DEFAULT_LEVELS
    classes: tuple[SkillClass, ...] = (SkillClass.SHARK, SkillClass.FISH)
    bootstrap_unit: str = "hand"
    wager_cutoffs: str = "blind"
    strength_cutoffs: str = "fitted"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "classes", tuple(SkillClass(c) for c in self.classes))
        if self.levels is not None:
            object.__setattr__(self, "levels", tuple(sorted({int(v) for v in self.levels})))
        if self.resamples != 0 and self.resamples < 2:
            raise ValueError("resamples must be 0 (no intervals) or at least 2")
        if self.bootstrap_unit not in ("hand", "round"):
            raise ValueError(f"bootstrap_unit must be 'hand' or 'round', not {self.bootstrap_unit!r}")
        if self.wager_cutoffs not in ("blind", "fitted"):
            raise ValueError(f"wager_cutoffs must be 'blind' or 'fitted', not {self.wager_cutoffs!r}")
        if self.strength_cutoffs not in ("fitted", "reference"):
            raise ValueError(f"strength_cutoffs must be 'fitted' or 'reference', not {self.strength_cutoffs!r}")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "resamples": self.resamples,
            "seed": self.seed,
            "levels": None if self.levels is None else list(self.levels),
            "classes": [c.value for c in self.classes],
            "bootstrap_unit": self.bootstrap_unit,
            "wager_cutoffs": self.wager_cutoffs,
            "strength_cutoffs": self.strength_cutoffs,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "AnalysisConfig":
        d = dict(d)
        if d.get("levels") is not None:
            d["levels"] = tuple(d["levels"])
        if "classes" in d:
            d["classes"] = tuple(d["classes"])
        return cls(**d)


# -- statistic over a count table --------------------------------------------


def measures(counts: np.ndarray) -> dict[tuple[str, str], float]:
    """Every reported quantity of a 3x3x3 (W1, P1, W2) count table.

    Keys are ``(measure, state)`` with ``state == ""`` for scalars and a W1
    label for specific values; W1 states with no mass are omitted.
    """
    dist = JointDistribution3.from_counts(counts)
    pd = decompose(dist)
    hx = entropy(dist.marginal_x())
    out = {
        ("entropy_w1", ""): hx,
        ("total", ""): pd.total,
        ("normalized_total", ""): pd.total / hx if hx > 0 else math.nan,
        ("redundancy", ""): pd.redundancy,
        ("unique_p1", ""): pd.unique_y1,
        ("unique_w2", ""): pd.unique_y2,
        ("synergy", ""): pd.synergy,
        ("mi_p1", ""): pd.mi_y1,
        ("mi_w2", ""): pd.mi_y2,
        ("interaction_info", ""): pd.interaction_info,
    }
    sd = specific_decompose(dist)
    for i, x in enumerate(sd.states):
        label = WagerState(x).label
        for src, dst in zip(SPECIFIC_FIELDS, SPECIFIC_MEASURES):
            out[(dst, label)] = float(getattr(sd, src)[i])
        out[("state_weight", label)] = float(sd.weights[i])
    return out


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    measure: str
    state: str
    estimate: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class CellReport:
    level: int
    skill_class: SkillClass
    n_observations: int
    n_hands: int
    counts: tuple[int, ...]  # flattened (W1, P1, W2) table
    estimates: tuple[Estimate, ...]

    def get(self, measure: str, state: str = "") -> Estimate:
        for e in self.estimates:
            if e.measure == measure and e.state == state:
                return e
        raise KeyError((measure, state))

    def value(self, measure: str, state: str = "") -> float:
        return self.get(measure, state).estimate


@dataclass(frozen=True)
class LevelSummary:
    """Descriptive statistics of one blind level."""

    level: int
    hands: int
    hands_two_player: int
    players: int
    max_small_wager_cents: int
    max_weak_showdown: int | None
    max_weak_preflop: int | None
    fish_max_mean_cents: float | None
    pct_sharks: float
    marginals: dict[str, dict[str, list[float]]]  # class -> variable -> distribution


@dataclass(frozen=True)
class AnalysisReport:
    config: AnalysisConfig
    cells: tuple[CellReport, ...]
    absent: tuple[tuple[int, SkillClass], ...]
    levels: tuple[LevelSummary, ...]
    labels: Mapping[str, str] | None = None
    version: str = field(default_factory=_tool_version)

    def cell(self, level: int, skill_class: SkillClass | str) -> CellReport:
        skill_class = SkillClass(skill_class)
        for c in self.cells:
            if c.level == level and c.skill_class is skill_class:
                return c
        raise KeyError((level, skill_class.value))

    def to_dict(self) -> dict:
        return _clean({
            "tool": "pidpoker",
            "version": self.version,
            "config": self.config.to_dict(),
            "labels": None if self.labels is None else dict(sorted(self.labels.items())),
            "levels": [asdict(s) for s in self.levels],
            "cells": [
                {
                    "level": c.level,
                    "skill_class": c.skill_class.value,
                    "n_observations": c.n_observations,
                    "n_hands": c.n_hands,
                    "counts": list(c.counts),
                    "estimates": [asdict(e) for e in c.estimates],
                }
                for c in self.cells
            ],
            "absent": [{"level": lvl, "skill_class": sc.value} for lvl, sc in self.absent],
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def rows(self) -> list[tuple]:
        return [
            (c.level, c.skill_class.value, e.measure, e.state, e.estimate, e.ci_low, e.ci_high, c.n_observations)
            for c in self.cells
            for e in c.estimates
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# pidpoker {self.version}\n")
        buf.write("# config " + json.dumps(self.config.to_dict(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows():
            w.writerow(["" if isinstance(v, float) and not math.isfinite(v) else (repr(v) if isinstance(v, float) else v) for v in row])
        return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, SkillClass):
        return obj.value
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# -- driver ------------------------------------------------------------------


def _fit_level(level: int, hands: Sequence[HandRecord], config: AnalysisConfig) -> LevelCutoffs:
    wagers: list[int] = []
    show: list[int] = []
    pre: list[int] = []
    for h in hands:
        for rnd in raw_rounds(h):
            wagers.extend(w for w in rnd.wagers.values() if w > 0)
            for p in rnd.order:
                score = revealed_score(h, p, rnd.board)
                if score is not None:
                    (pre if score.scale == "preflop" else show).append(score.ordinal)
    if config.wager_cutoffs == "fitted":
        small = equal_frequency_cutoff(wagers)  # raises InsufficientData on no wagers
    else:
        small = level
    if config.strength_cutoffs == "reference":
        if level not in TABLE_S1:
            raise MissingCutoff(f"no reference strength cutoff for level {level}")
        return LevelCutoffs(small, showdown_ceiling(Category.PAIR, TABLE_S1[level].max_weak_pair_rank), DEFAULT_PREFLOP_CUTOFF)
    return LevelCutoffs(
        small,
        equal_frequency_cutoff(show) if show else None,
        equal_frequency_cutoff(pre) if pre else None,
    )


def _marginals(obs: Sequence[RoundObservation]) -> dict[str, list[float]]:
    if not obs:
        return {}
    c = count_table(obs).astype(float)
    c /= c.sum()
    return {
        "w1": [round(float(v), 6) for v in c.sum(axis=(1, 2))],
        "w2": [round(float(v), 6) for v in c.sum(axis=(0, 1))],
        "p1": [round(float(v), 6) for v in c.sum(axis=(0, 2))],
    }


def run_analysis(
    hands: Iterable[HandRecord],
    config: AnalysisConfig | None = None,
    labels: Mapping[str, SkillClass | str] | None = None,
) -> AnalysisReport:
    """Decompose I(W1; P1, W2) for each (level, skill class).

    Players are classified from all hands at a level (mean profit per
    hand); observations come from the two-player hands only.  ``labels``
    replaces the profit-based classes for the players it names (any level).
    Cells without observations are listed in ``absent`` rather than reported
    as zero.
    """
    config = config or AnalysisConfig()
    hands = list(hands)
    if config.levels is not None:
        wanted = set(config.levels)
        hands = [h for h in hands if h.blind_cents in wanted]
    by_level: dict[int, list[HandRecord]] = {}
    for h in hands:
        by_level.setdefault(h.blind_cents, []).append(h)

    ledger: PlayerLedger = ledger_build(hands)
    cells: list[CellReport] = []
    absent: list[tuple[int, SkillClass]] = []
    summaries: list[LevelSummary] = []
    for level in sorted(by_level):
        classes = classify(ledger, level)
        if labels:
            classes.update({p: SkillClass(c) for p, c in labels.items() if p in classes})
        duo = [h for h in by_level[level] if len(h.seats) == 2]
        cut = _fit_level(level, duo, config)
        bins = BinningSpec({level: cut})
        obs = extract_observations(duo, {level: classes}, config.variant, bins, config.wager_cutoffs)

        groups = {sc: [o for o in obs if o.hero_skill is sc] for sc in SkillClass}
        for sc in config.classes:
            group = groups[sc]
            if not group:
                absent.append((level, sc))
                continue
            cells.append(_cell(level, sc, group, config))

        fmax = fish_max_mean(ledger, level) if not labels else None
        n_players = len(classes)
        summaries.append(LevelSummary(
            level=level,
            hands=len(by_level[level]),
            hands_two_player=len(duo),
            players=n_players,
            max_small_wager_cents=cut.max_small_wager,
            max_weak_showdown=cut.max_weak_showdown,
            max_weak_preflop=cut.max_weak_preflop,
            fish_max_mean_cents=None if fmax is None else float(fmax),
            pct_sharks=round(100.0 * sum(c is SkillClass.SHARK for c in classes.values()) / n_players, 6) if n_players else 0.0,
            marginals={sc.value: _marginals(groups[sc]) for sc in (SkillClass.FISH, SkillClass.SHARK) if groups[sc]},
        ))
    label_doc = {p: SkillClass(c).value for p, c in labels.items()} if labels else None
    return AnalysisReport(config, tuple(cells), tuple(absent), tuple(summaries), label_doc)


def _cell(level: int, sc: SkillClass, group: Sequence[RoundObservation], config: AnalysisConfig) -> CellReport:
    counts = count_table(group)
    point = measures(counts)
    if config.resamples:
        cis = bootstrap_ci(group, measures, config.resamples, config.seed, config.bootstrap_unit)
    else:
        cis = None
    ests = []
    for key, est in point.items():
        lo, hi = (cis[key].low, cis[key].high) if cis else (est, est)
        ests.append(Estimate(key[0], key[1], float(est), float(lo), float(hi)))
    return CellReport(
        level=level,
        skill_class=sc,
        n_observations=len(group),
        n_hands=len({o.hand_id for o in group}),
        counts=tuple(int(v) for v in counts.ravel()),
        estimates=tuple(ests),
    )


def report_from_json(text: str) -> dict:
    """Parse a report document written by :meth:`AnalysisReport.to_json`."""
    doc = json.loads(text)
    if doc.get("tool") != "pidpoker" or "cells" not in doc:
        raise ValueError("not a pidpoker analysis report")
    return doc
