"""Regenerate the bundled 169-class preflop ranking.

Exhaustive heads-up all-in equity of every hole-card class against a
uniformly random opponent hand, over every 5-card board::

    python -m pidpoker.preflop_table [--out PATH]

Every board is visited once; on each board all 1,081 two-card holdings are
scored, sorted, and each holding is credited with wins and ties against the
disjoint holdings below or level with it.  Needs numba (the ``maintenance``
extra); a full run takes a few minutes on one core.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .handeval import (
    PREFLOP_TABLE,
    Card,
    _POPCOUNT,
    _STRAIGHT_HIGH,
    _TOP5,
    canonical_labels,
    class_label,
)

TABLE_VERSION = 1


def _kernel():
    import numba as nb

    straight = np.asarray(_STRAIGHT_HIGH, dtype=np.int64)
    top5 = np.asarray(_TOP5, dtype=np.int64)
    popcount = np.asarray(_POPCOUNT, dtype=np.int64)

    @nb.njit(cache=False)
    def eval_counts(counts, suits):
        for s in range(4):
            m = suits[s]
            if popcount[m] >= 5:
                sf = straight[m]
                if sf:
                    return (8 << 20) | (sf << 16)
        flush = 0
        for s in range(4):
            m = suits[s]
            if popcount[m] >= 5:
                flush = (5 << 20) | top5[m]
        quad = 0
        trip = 0
        trip2 = 0
        p0 = 0
        p1 = 0
        p2 = 0
        np_ = 0
        s0 = 0
        s1 = 0
        s2 = 0
        s3 = 0
        s4 = 0
        ns = 0
        for r in range(12, -1, -1):
            n = counts[r]
            if n == 0:
                continue
            v = r + 2
            if n == 1:
                if ns == 0:
                    s0 = v
                elif ns == 1:
                    s1 = v
                elif ns == 2:
                    s2 = v
                elif ns == 3:
                    s3 = v
                elif ns == 4:
                    s4 = v
                ns += 1
            elif n == 2:
                if np_ == 0:
                    p0 = v
                elif np_ == 1:
                    p1 = v
                elif np_ == 2:
                    p2 = v
                np_ += 1
            elif n == 3:
                if trip:
                    if trip2 == 0:
                        trip2 = v
                else:
                    trip = v
            else:
                quad = v
        if quad:
            k = max(trip, p0, s0)
            return (7 << 20) | (quad << 16) | (k << 12)
        if trip and (trip2 or np_):
            return (6 << 20) | (trip << 16) | (max(trip2, p0) << 12)
        if flush:
            return flush
        st = straight[suits[0] | suits[1] | suits[2] | suits[3]]
        if st:
            return (4 << 20) | (st << 16)
        if trip:
            return (3 << 20) | (trip << 16) | (s0 << 12) | (s1 << 8)
        if np_ >= 2:
            return (2 << 20) | (p0 << 16) | (p1 << 12) | (max(s0, p2) << 8)
        if np_ == 1:
            return (1 << 20) | (p0 << 16) | (s0 << 12) | (s1 << 8) | (s2 << 4)
        return (s0 << 16) | (s1 << 12) | (s2 << 8) | (s3 << 4) | s4

    @nb.njit(cache=False)
    def eval7(codes):
        counts = np.zeros(13, np.int64)
        suits = np.zeros(4, np.int64)
        for c in codes:
            counts[c >> 2] += 1
            suits[c & 3] |= 1 << (c >> 2)
        return eval_counts(counts, suits)

    @nb.njit(cache=False)
    def enumerate_first(b0, hold_index, wins, ties):
        counts = np.zeros(13, np.int64)
        suits = np.zeros(4, np.int64)
        rest = np.empty(47, np.int64)
        scores = np.empty(1081, np.int64)
        ha = np.empty(1081, np.int64)
        hb = np.empty(1081, np.int64)
        lower_card = np.zeros(52, np.int64)
        group_card = np.zeros(52, np.int64)
        for b1 in range(b0 + 1, 52):
            for b2 in range(b1 + 1, 52):
                for b3 in range(b2 + 1, 52):
                    for b4 in range(b3 + 1, 52):
                        counts[:] = 0
                        suits[:] = 0
                        for c in (b0, b1, b2, b3, b4):
                            counts[c >> 2] += 1
                            suits[c & 3] |= 1 << (c >> 2)
                        k = 0
                        for c in range(52):
                            if c != b0 and c != b1 and c != b2 and c != b3 and c != b4:
                                rest[k] = c
                                k += 1
                        k = 0
                        for i in range(47):
                            a = rest[i]
                            counts[a >> 2] += 1
                            sa = suits[a & 3]
                            suits[a & 3] = sa | (1 << (a >> 2))
                            for j in range(i + 1, 47):
                                b = rest[j]
                                counts[b >> 2] += 1
                                sb = suits[b & 3]
                                suits[b & 3] = sb | (1 << (b >> 2))
                                scores[k] = eval_counts(counts, suits)
                                ha[k] = a
                                hb[k] = b
                                k += 1
                                suits[b & 3] = sb
                                counts[b >> 2] -= 1
                            suits[a & 3] = sa
                            counts[a >> 2] -= 1
                        order = np.argsort(scores)
                        lower_card[:] = 0
                        lower_total = 0
                        g = 0
                        while g < 1081:
                            h = g
                            sc = scores[order[g]]
                            while h < 1081 and scores[order[h]] == sc:
                                h += 1
                            gsize = h - g
                            for t in range(g, h):
                                o = order[t]
                                group_card[ha[o]] += 1
                                group_card[hb[o]] += 1
                            for t in range(g, h):
                                o = order[t]
                                a = ha[o]
                                b = hb[o]
                                idx = hold_index[a, b]
                                wins[idx] += lower_total - lower_card[a] - lower_card[b]
                                ties[idx] += gsize - group_card[a] - group_card[b] + 1
                            for t in range(g, h):
                                o = order[t]
                                group_card[ha[o]] -= 1
                                group_card[hb[o]] -= 1
                                lower_card[ha[o]] += 1
                                lower_card[hb[o]] += 1
                            lower_total += gsize
                            g = h

    return eval7, enumerate_first


def compute_equities(progress=None) -> dict[str, float]:
    """Exact equity per class label (win + tie/2 over all matchups)."""
    eval7, enumerate_first = _kernel()
    hold_index = np.full((52, 52), -1, np.int64)
    pairs = []
    for a in range(52):
        for b in range(a + 1, 52):
            hold_index[a, b] = hold_index[b, a] = len(pairs)
            pairs.append((a, b))
    wins = np.zeros(len(pairs), np.int64)
    ties = np.zeros(len(pairs), np.int64)
    for b0 in range(48):
        enumerate_first(b0, hold_index, wins, ties)
        if progress:
            progress(b0 + 1, 48)
    # per holding: C(50,5) boards x C(45,2) opponents
    matchups = 2118760 * 990
    by_class: dict[str, list[float]] = {}
    for i, (a, b) in enumerate(pairs):
        eq = (wins[i] + ties[i] / 2) / matchups
        by_class.setdefault(class_label((Card.from_code(a), Card.from_code(b))), []).append(eq)
    return {lab: float(np.mean(v)) for lab, v in by_class.items()}


def render_table(equities: dict[str, float]) -> str:
    order = sorted(canonical_labels(), key=lambda lab: (-round(equities[lab], 12), canonical_labels().index(lab)))
    lines = [
        f"# preflop class ranking v{TABLE_VERSION}",
        "# heads-up all-in equity vs a uniformly random hand, exhaustive over all boards",
        "# regenerate: python -m pidpoker.preflop_table",
        "# label rank equity",
    ]
    for rank, lab in enumerate(order, start=1):
        lines.append(f"{lab} {rank} {equities[lab]:.6f}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default = Path(__file__).parent / "data" / PREFLOP_TABLE
    ap.add_argument("--out", type=Path, default=default)
    args = ap.parse_args(argv)
    t0 = time.time()

    def progress(done, total):
        print(f"\r{done}/{total} first-card blocks, {time.time() - t0:.0f}s", end="", file=sys.stderr)

    eq = compute_equities(progress)
    print(file=sys.stderr)
    tmp = args.out.with_suffix(".tmp")
    tmp.write_text(render_table(eq), encoding="utf-8")
    tmp.replace(args.out)
    print(f"wrote {args.out} in {time.time() - t0:.0f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
