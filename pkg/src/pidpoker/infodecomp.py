"""
Plug-in information measures and the two-predictor partial information
decomposition (redundancy measured by I_min).

All quantities are in bits. Distributions are dense arrays indexed as
``pmf[x, y1, y2]`` where ``x`` is the output (target) variable and ``y1``,
``y2`` are the two predictors.

Example
-------
>>> import numpy as np
>>> xor = np.zeros((2, 2, 2))
>>> for a in (0, 1):
...     for b in (0, 1):
...         xor[a ^ b, a, b] = 0.25
>>> d = decompose(JointDistribution3.from_array(xor))
>>> round(d.synergy, 6)
1.0
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "InfoDecompError",
    "NonNormalized",
    "NegativeProbability",
    "ZeroProbabilityState",
    "ZeroEntropyOutput",
    "InconsistentDistribution",
    "JointDistribution3",
    "PartialDecomposition",
    "SpecificDecomposition",
    "entropy",
    "mutual_information",
    "specific_information",
    "total_information",
    "redundancy",
    "decompose",
    "specific_decompose",
    "normalized_total",
]

NORMALIZATION_TOL = 1e-9


class InfoDecompError(ValueError):
    """Base class for invalid inputs to the information measures."""


class NonNormalized(InfoDecompError):
    pass


class NegativeProbability(InfoDecompError):
    pass


class ZeroProbabilityState(InfoDecompError):
    pass


class ZeroEntropyOutput(InfoDecompError):
    pass


class InconsistentDistribution(InfoDecompError):
    pass


def _validated(p, tol: float = NORMALIZATION_TOL) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.size == 0:
        raise NonNormalized("empty probability table")
    if not np.all(np.isfinite(arr)):
        raise NonNormalized("probability table contains non-finite entries")
    if np.any(arr < 0):
        raise NegativeProbability(f"negative probability {arr.min()!r}")
    total = arr.sum()
    if abs(total - 1.0) > tol:
        raise NonNormalized(f"probabilities sum to {total!r}, not 1")
    # tighten the sum to round-off so marginals are exact to ~1e-16
    return arr if total == 1.0 else arr / total


def _plogp_sum(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def _relative_entropy_rows(cond: np.ndarray, marginal: np.ndarray) -> np.ndarray:
    """Row-wise D(cond[i] || marginal) in bits, with 0 log 0 = 0."""
    mask = cond > 0
    if np.any(mask & (marginal[None, :] <= 0)):
        raise InconsistentDistribution("p(y|x) > 0 where p(y) = 0")
    ratio = np.ones_like(cond)
    np.divide(cond, np.broadcast_to(marginal, cond.shape), out=ratio, where=mask)
    return (cond * np.log2(ratio)).sum(axis=1)


def _specific_rows(pxy: np.ndarray) -> np.ndarray:
    """Specific information I(X=x; Y) for each x; NaN where p(x) = 0."""
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    out = np.full(px.shape, np.nan)
    live = px > 0
    if np.any(live):
        cond = pxy[live] / px[live, None]
        out[live] = _relative_entropy_rows(cond, py)
    return out


@dataclass(frozen=True)
class JointDistribution3:
    """Normalized probability mass over (X, Y1, Y2) with finite alphabets."""

    pmf: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pmf, dtype=float)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3-d table, got shape {arr.shape}")
        arr = _validated(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pmf", arr)

    @classmethod
    def from_array(cls, arr) -> "JointDistribution3":
        return cls(np.asarray(arr, dtype=float))

    @classmethod
    def from_counts(cls, counts) -> "JointDistribution3":
        c = np.asarray(counts, dtype=float)
        if np.any(c < 0):
            raise NegativeProbability("negative count")
        total = c.sum()
        if total <= 0:
            raise NonNormalized("count table is empty")
        return cls(c / total)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.pmf.shape  # type: ignore[return-value]

    @property
    def nx(self) -> int:
        return self.pmf.shape[0]

    @property
    def ny1(self) -> int:
        return self.pmf.shape[1]

    @property
    def ny2(self) -> int:
        return self.pmf.shape[2]

    def marginal_x(self) -> np.ndarray:
        return self.pmf.sum(axis=(1, 2))

    def joint_x_y1(self) -> np.ndarray:
        return self.pmf.sum(axis=2)

    def joint_x_y2(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    def joint_x_pair(self) -> np.ndarray:
        """p(x, (y1, y2)) with the predictor pair flattened to one axis."""
        return self.pmf.reshape(self.nx, self.ny1 * self.ny2)

    def __eq__(self, other):
        if not isinstance(other, JointDistribution3):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pmf, other.pmf))

    def __hash__(self):
        return hash((self.shape, self.pmf.tobytes()))

    # -- plain-text exchange format: "x y1 y2 probability" per nonzero cell

    def to_text(self) -> str:
        buf = io.StringIO()
        self.write_text(buf)
        return buf.getvalue()

    def write_text(self, fh: TextIO) -> None:
        fh.write(f"# shape {self.nx} {self.ny1} {self.ny2}\n")
        for (x, y1, y2), p in np.ndenumerate(self.pmf):
            if p > 0:
                fh.write(f"{x} {y1} {y2} {float(p)!r}\n")

    @classmethod
    def from_text(cls, text: str | Iterable[str]) -> "JointDistribution3":
        lines = text.splitlines() if isinstance(text, str) else text
        shape = None
        cells: list[tuple[int, int, int, float]] = []
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 4 and parts[0] == "shape":
                    shape = tuple(int(v) for v in parts[1:])
                continue
            parts = line.split()
            if len(parts) != 4:
                raise InfoDecompError(f"line {lineno}: expected 'x y1 y2 probability', got {raw!r}")
            try:
                x, y1, y2 = (int(v) for v in parts[:3])
                p = float(parts[3])
            except ValueError as exc:
                raise InfoDecompError(f"line {lineno}: {exc}") from None
            if min(x, y1, y2) < 0:
                raise InfoDecompError(f"line {lineno}: states must be 0-based non-negative integers")
            cells.append((x, y1, y2, p))
        if not cells:
            raise NonNormalized("distribution file has no cells")
        inferred = tuple(max(c[i] for c in cells) + 1 for i in range(3))
        if shape is None:
            shape = inferred
        elif any(s < i for s, i in zip(shape, inferred)):
            raise InfoDecompError(f"cell index exceeds declared shape {shape}")
        arr = np.zeros(shape)
        for x, y1, y2, p in cells:
            arr[x, y1, y2] += p
        return cls(arr)


@dataclass(frozen=True)
class PartialDecomposition:
    total: float
    redundancy: float
    unique_y1: float
    unique_y2: float
    synergy: float
    interaction_info: float
    mi_y1: float
    mi_y2: float

    def components(self) -> dict[str, float]:
        return {
            "redundancy": self.redundancy,
            "unique_y1": self.unique_y1,
            "unique_y2": self.unique_y2,
            "synergy": self.synergy,
        }


SPECIFIC_FIELDS = (
    "specific_total",
    "specific_redundancy",
    "specific_unique_y1",
    "specific_unique_y2",
    "specific_synergy",
)


@dataclass(frozen=True)
class SpecificDecomposition:
    """Per-output-state decomposition.

    Only states with ``p(x) > 0`` appear; ``states[i]`` is the output state
    described by ``weights[i]`` and the i-th entry of each component array.
    """

    states: tuple[int, ...]
    weights: np.ndarray
    specific_total: np.ndarray
    specific_redundancy: np.ndarray
    specific_unique_y1: np.ndarray
    specific_unique_y2: np.ndarray
    specific_synergy: np.ndarray = field(repr=False)

    def for_state(self, x: int) -> dict[str, float]:
        try:
            i = self.states.index(x)
        except ValueError:
            raise ZeroProbabilityState(f"output state {x} has zero probability") from None
        out = {name: float(getattr(self, name)[i]) for name in SPECIFIC_FIELDS}
        out["weight"] = float(self.weights[i])
        return out

    def average(self, name: str) -> float:
        return float(np.dot(self.weights, getattr(self, name)))


# -- public measures -------------------------------------------------------


def entropy(pmf) -> float:
    """Shannon entropy in bits of a probability vector (or table)."""
    return _plogp_sum(_validated(pmf))


def mutual_information(joint) -> float:
    """I(X;Y) for a 2-d joint table indexed ``[x, y]``."""
    pxy = _validated(joint)
    if pxy.ndim != 2:
        raise ValueError("mutual_information expects a 2-d joint table")
    return _mi(pxy)


def _mi(pxy: np.ndarray) -> float:
    px = pxy.sum(axis=1)
    spec = _specific_rows(pxy)
    live = px > 0
    return float(np.dot(px[live], spec[live]))


def specific_information(joint, x: int) -> float:
    """I(X=x; Y) = sum_y p(y|x) log2(p(y|x) / p(y)).

    Raises ZeroProbabilityState when p(x) = 0.
    """
    pxy = _validated(joint)
    if pxy.ndim != 2:
        raise ValueError("specific_information expects a 2-d joint table")
    if not 0 <= x < pxy.shape[0]:
        raise IndexError(f"state {x} outside alphabet of size {pxy.shape[0]}")
    if pxy[x].sum() <= 0:
        raise ZeroProbabilityState(f"p(x={x}) = 0")
    return float(_specific_rows(pxy)[x])


def total_information(dist: JointDistribution3) -> float:
    """I(X; Y1, Y2), the information the predictor pair carries about X."""
    return _mi(dist.joint_x_pair())


def _per_state(dist: JointDistribution3):
    px = dist.marginal_x()
    live = px > 0
    s1 = _specific_rows(dist.joint_x_y1())
    s2 = _specific_rows(dist.joint_x_y2())
    s12 = _specific_rows(dist.joint_x_pair())
    return px, live, s1, s2, s12


def redundancy(dist: JointDistribution3) -> float:
    """I_min: expected minimum specific information over the two predictors."""
    px, live, s1, s2, _ = _per_state(dist)
    return float(np.dot(px[live], np.minimum(s1[live], s2[live])))


def decompose(dist: JointDistribution3) -> PartialDecomposition:
    px, live, s1, s2, s12 = _per_state(dist)
    w = px[live]
    mi1 = float(np.dot(w, s1[live]))
    mi2 = float(np.dot(w, s2[live]))
    tot = float(np.dot(w, s12[live]))
    rdn = float(np.dot(w, np.minimum(s1[live], s2[live])))
    u1 = mi1 - rdn
    u2 = mi2 - rdn
    syn = tot - u1 - u2 - rdn
    return PartialDecomposition(
        total=tot,
        redundancy=rdn,
        unique_y1=u1,
        unique_y2=u2,
        synergy=syn,
        interaction_info=tot - mi1 - mi2,
        mi_y1=mi1,
        mi_y2=mi2,
    )


def specific_decompose(dist: JointDistribution3) -> SpecificDecomposition:
    px, live, s1, s2, s12 = _per_state(dist)
    s1, s2, s12 = s1[live], s2[live], s12[live]
    rdn = np.minimum(s1, s2)
    u1 = s1 - rdn
    u2 = s2 - rdn
    syn = s12 - u1 - u2 - rdn
    return SpecificDecomposition(
        states=tuple(int(i) for i in np.flatnonzero(live)),
        weights=px[live],
        specific_total=s12,
        specific_redundancy=rdn,
        specific_unique_y1=u1,
        specific_unique_y2=u2,
        specific_synergy=syn,
    )


def normalized_total(dist: JointDistribution3) -> float:
    """Total information as a fraction of H(X)."""
    hx = _plogp_sum(dist.marginal_x())
    if hx <= 0:
        raise ZeroEntropyOutput("output variable is constant; H(X) = 0")
    return total_information(dist) / hx
