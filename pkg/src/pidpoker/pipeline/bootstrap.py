"""Percentile bootstrap over hands (or rounds) for count-table statistics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, Mapping, Sequence

import numpy as np

from .binning import InsufficientData
from .observations import RoundObservation

Statistic = Callable[[np.ndarray], Mapping[Hashable, float]]


@dataclass(frozen=True)
class Interval:
    estimate: float
    low: float
    high: float

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def cluster_tables(observations: Sequence[RoundObservation], unit: str = "hand") -> np.ndarray:
    """Stack of flattened 3x3x3 count tables, one per resampling unit."""
    if unit not in ("hand", "round"):
        raise ValueError(f"unknown bootstrap unit {unit!r}")
    flat = np.array([np.ravel_multi_index(o.cell, (3, 3, 3)) for o in observations], dtype=np.int64)
    if unit == "round":
        keys = np.arange(len(flat))
    else:
        index: dict[str, int] = {}
        keys = np.array([index.setdefault(o.hand_id, len(index)) for o in observations], dtype=np.int64)
    tables = np.zeros((int(keys.max()) + 1 if len(keys) else 0, 27), dtype=np.int64)
    np.add.at(tables, (keys, flat), 1)
    return tables


def resample_counts(tables: np.ndarray, resamples: int, seed: int) -> Iterator[np.ndarray]:
    """Summed count table of each resample; one child seed per resample.

    Child seeds come from ``SeedSequence(seed).spawn``, so resample ``b`` is
    the same however the work is split.
    """
    n_units = len(tables)
    for child in np.random.SeedSequence(seed).spawn(resamples):
        idx = np.random.default_rng(child).integers(0, n_units, size=n_units)
        yield np.bincount(idx, minlength=n_units) @ tables


def bootstrap_ci(
    observations: Sequence[RoundObservation],
    statistic: Statistic,
    resamples: int = 500,
    seed: int = 0,
    unit: str = "hand",
    level: float = 0.95,
) -> dict[Hashable, Interval]:
    """Percentile intervals for every named value returned by ``statistic``.

    ``statistic`` maps a 3x3x3 count array to named floats.  Units (hands by
    default, so rounds of one hand move together) are resampled with
    replacement.  NaN replicates, e.g. a specific value for a state absent
    from the resample, are dropped.  An interval is widened if needed so it
    always contains the point estimate.
    """
    if resamples < 2:
        raise InsufficientData(f"need at least 2 resamples, got {resamples}")
    if not observations:
        raise InsufficientData("no observations to resample")
    tables = cluster_tables(observations, unit)
    point = statistic(tables.sum(axis=0).reshape(3, 3, 3))
    reps: dict[Hashable, list[float]] = {k: [] for k in point}
    for row in resample_counts(tables, resamples, seed):
        values = statistic(row.reshape(3, 3, 3))
        for k in point:
            reps[k].append(values.get(k, np.nan))
    alpha = (1.0 - level) / 2.0
    out = {}
    for k, est in point.items():
        r = np.asarray(reps[k], dtype=float)
        r = r[np.isfinite(r)]
        if r.size == 0 or not np.isfinite(est):
            out[k] = Interval(est, np.nan, np.nan)
            continue
        lo, hi = np.quantile(r, [alpha, 1.0 - alpha])
        out[k] = Interval(float(est), float(min(lo, est)), float(max(hi, est)))
    return out
