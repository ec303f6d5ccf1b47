"""Synthetic heads-up hand histories from policies with known information structure.

Both agents post the big blind, the villain acts first on every street and
the hero second, so the hero is always the second player to act.  On each
street the villain picks a wager state, the hero responds with
``policy_wager(hero_policy, p1, w2)``, and the pair of states is rendered as
legal actions:

======================  =========================================  =========
(w1, w2)                actions                                    continues
======================  =========================================  =========
(0, 0)                  check, check                               yes
(0, x)                  villain bets x, hero folds                 no
(y, 0)                  villain checks, hero bets y, villain folds no
same nonzero bin        villain bets v, hero calls                 yes
(Large, Small)          villain bets s, hero raises to l, folds    no
(Small, Large)          hero bets s, villain raises to l, folds    no
======================  =========================================  =========

Amounts are drawn inside the chosen bin: Small from {blind/2, blind}, Large
from {2, 3, 4} x blind.  Preflop, "bets" are raises over the posted blind.
"""
from __future__ import annotations

import datetime as _dt
import enum
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .handeval import Card, HandScore, compare, score_hand
from .handparse import (
    ActionKind,
    ActionRecord,
    HandRecord,
    Payout,
    Reveal,
    Seat,
    Street,
    render_hand,
    voluntary_wagers,
)
from .pipeline.binning import DEFAULT_PREFLOP_CUTOFF, StrengthState, WagerState
from .pipeline.ledger import SkillClass

NO, SMALL, LARGE = WagerState.NO_WAGER, WagerState.SMALL, WagerState.LARGE
STREETS = ("preflop", "flop", "turn", "river")
BOARD_SIZES = (0, 3, 4, 5)

# Ace-king-eight-seven-deuce high: the fixed point of calibrate_cutoffs for
# the default session, so policy strength states match fitted ones.
DEFAULT_SHOWDOWN_CUTOFF = 0x0ED872


class PolicyKind(str, enum.Enum):
    UNIFORM = "uniform"
    PUBLIC_FOLLOWER = "public-follower"
    PRIVATE_FOLLOWER = "private-follower"
    ENCRYPTOR = "encryptor"


_DEFAULT_SUPPORT = {
    PolicyKind.UNIFORM: (0, 1, 2),
    PolicyKind.PUBLIC_FOLLOWER: (0, 1, 2),
    PolicyKind.PRIVATE_FOLLOWER: (0, 1),
    PolicyKind.ENCRYPTOR: (0, 1),
}


@dataclass(frozen=True)
class AgentPolicy:
    """A wager-state rule over binned inputs.

    ``kind`` selects the rule; with probability ``noise`` the output is
    replaced by a uniform draw from ``support``.  ``bet_state`` is the size
    used by the private follower and by the encryptor when it opens.
    """

    kind: PolicyKind = PolicyKind.UNIFORM
    noise: float = 0.0
    support: tuple[int, ...] | None = None
    bet_state: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"noise must be in [0, 1], got {self.noise}")
        sup = _DEFAULT_SUPPORT[self.kind] if self.support is None else self.support
        sup = tuple(sorted({int(WagerState(s)) for s in sup}))
        if not sup:
            raise ValueError("empty wager support")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "bet_state", int(WagerState(self.bet_state)))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "noise": self.noise, "support": list(self.support), "bet_state": self.bet_state}


def policy_wager(policy: AgentPolicy, p1: StrengthState | int, w2: WagerState | int, rng: np.random.Generator) -> WagerState:
    """Wager state chosen by ``policy`` given hand strength and opponent wager.

    ``p1`` is binarized as Strong versus not Strong and ``w2`` as wager
    versus none.  Exactly one uniform draw is consumed for the noise
    decision, plus one for a uniform choice when needed.
    """
    strong = StrengthState(p1) is StrengthState.STRONG
    bet = WagerState(w2) is not NO
    replace_ = rng.random() < policy.noise
    kind = policy.kind
    if replace_ or kind is PolicyKind.UNIFORM:
        return WagerState(policy.support[rng.integers(len(policy.support))])
    if kind is PolicyKind.PUBLIC_FOLLOWER:
        return WagerState(w2)
    if kind is PolicyKind.PRIVATE_FOLLOWER:
        return WagerState(policy.bet_state) if strong else NO
    # encryptor: act iff strength and opponent action disagree
    if strong != bet:
        return WagerState(w2) if bet else WagerState(policy.bet_state)
    return NO


@dataclass(frozen=True)
class SimConfig:
    """Declarative description of one synthetic session.

    ``show_prob`` is the chance the hero shows cards in a hand that ends
    before showdown; ``muck_prob`` the chance a showdown loser mucks.
    ``labels`` maps the roles ``hero``/``villain`` to skill classes written
    alongside the corpus.
    """

    hands: int = 1000
    blind_cents: int = 50
    seed: int = 0
    hero: AgentPolicy = field(default_factory=lambda: AgentPolicy(PolicyKind.ENCRYPTOR))
    villain: AgentPolicy = field(default_factory=lambda: AgentPolicy(PolicyKind.UNIFORM, support=(0, 1)))
    hero_name: str = "hero"
    villain_name: str = "villain"
    show_prob: float = 1.0
    muck_prob: float = 0.0
    rake_pct: float = 0.05
    rake_cap_cents: int = 300
    stack_blinds: int = 100
    showdown_cutoff: int = DEFAULT_SHOWDOWN_CUTOFF
    preflop_cutoff: int = DEFAULT_PREFLOP_CUTOFF
    labels: Mapping[str, str] = field(default_factory=lambda: {"hero": "Shark", "villain": "Fish"})
    first_hand_id: int = 1_000_000_000

    def __post_init__(self):
        if self.hands < 0:
            raise ValueError("hands must be >= 0")
        if self.blind_cents < 2:
            raise ValueError("blind must be at least 2 cents")
        if self.hero_name == self.villain_name or not self.hero_name or not self.villain_name:
            raise ValueError("hero and villain need distinct non-empty names")
        for p in (self.show_prob, self.muck_prob, self.rake_pct):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of range: {p}")
        for role, c in self.labels.items():
            if role not in ("hero", "villain"):
                raise ValueError(f"unknown role {role!r} in labels")
            SkillClass(c)
        if isinstance(self.hero, Mapping):
            object.__setattr__(self, "hero", AgentPolicy(**self.hero))
        if isinstance(self.villain, Mapping):
            object.__setattr__(self, "villain", AgentPolicy(**self.villain))
        object.__setattr__(self, "labels", dict(sorted(self.labels.items())))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hero"] = self.hero.to_dict()
        d["villain"] = self.villain.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping) -> "SimConfig":
        d = dict(d)
        for role in ("hero", "villain"):
            if role in d and isinstance(d[role], Mapping):
                pol = dict(d[role])
                if pol.get("support") is not None:
                    pol["support"] = tuple(pol["support"])
                d[role] = AgentPolicy(**pol)
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        return cls.from_dict(json.loads(text))

    def player_labels(self) -> dict[str, SkillClass]:
        names = {"hero": self.hero_name, "villain": self.villain_name}
        return {names[r]: SkillClass(c) for r, c in self.labels.items()}


# -- dealing and strength ----------------------------------------------------


def deal(rng: np.random.Generator) -> tuple[tuple[Card, Card], tuple[Card, Card], tuple[Card, ...]]:
    """(hero hole, villain hole, board) drawn without replacement."""
    codes = rng.permutation(52)[:9]
    cards = [Card.from_code(int(c)) for c in codes]
    return (cards[0], cards[1]), (cards[2], cards[3]), tuple(cards[4:9])


def strength_state(score: HandScore, config: SimConfig) -> StrengthState:
    limit = config.preflop_cutoff if score.scale == "preflop" else config.showdown_cutoff
    return StrengthState.WEAK if score.ordinal <= limit else StrengthState.STRONG


def _amount(state: WagerState, blind: int, rng: np.random.Generator) -> int:
    if state is SMALL:
        return (max(1, blind // 2), blind)[rng.integers(2)]
    if state is LARGE:
        return blind * int(rng.integers(2, 5))
    return 0


# -- one hand ----------------------------------------------------------------


def _street_actions(name, hero, villain, w1, w2, a1, a2, blind):
    """Actions for one street and whether the hand continues.

    Returns ``(actions, continues, folder, uncalled)`` where ``uncalled`` is
    ``(player, cents)`` of an unmatched bet or ``None``.
    """
    pre = name == "preflop"
    base = blind if pre else 0

    def open_(player, amt):
        if pre:
            return ActionRecord(player, ActionKind.RAISE, base + amt)
        return ActionRecord(player, ActionKind.BET, amt)

    def check(player):
        return ActionRecord(player, ActionKind.CHECK, 0)

    def fold(player):
        return ActionRecord(player, ActionKind.FOLD, 0)

    if w1 is NO and w2 is NO:
        return [check(villain), check(hero)], True, None, None
    if w1 is NO:
        return [open_(villain, a2), fold(hero)], False, hero, (villain, a2)
    if w2 is NO:
        return [check(villain), open_(hero, a1), fold(villain)], False, villain, (hero, a1)
    if w1 is w2:
        return [open_(villain, a2), ActionRecord(hero, ActionKind.CALL, a2)], True, None, None
    if w1 is LARGE:  # villain Small, hero raises
        acts = [open_(villain, a2), ActionRecord(hero, ActionKind.RAISE, base + a1), fold(villain)]
        return acts, False, villain, (hero, a1 - a2)
    acts = [check(villain), open_(hero, a1), ActionRecord(villain, ActionKind.RAISE, base + a2), fold(hero)]
    return acts, False, hero, (villain, a2 - a1)


def simulate_hand(config: SimConfig, index: int) -> HandRecord:
    """Hand ``index`` of the session; depends only on (seed, index)."""
    rng = np.random.default_rng([config.seed, index])
    hero, villain = config.hero_name, config.villain_name
    blind = config.blind_cents
    hero_hole, vill_hole, board = deal(rng)

    streets: list[Street] = []
    put_in = {hero: blind, villain: blind}
    folder = None
    uncalled = None
    for k, name in enumerate(STREETS):
        shown_board = board[: BOARD_SIZES[k]]
        p1 = strength_state(score_hand(hero_hole, shown_board), config)
        pv = strength_state(score_hand(vill_hole, shown_board), config)
        w2 = policy_wager(config.villain, pv, NO, rng)
        a2 = _amount(w2, blind, rng)
        w1 = policy_wager(config.hero, p1, w2, rng)
        a1 = _amount(w1, blind, rng)
        acts, cont, folder, uncalled = _street_actions(name, hero, villain, w1, w2, a1, a2, blind)
        if k == 0:
            acts = [ActionRecord(villain, ActionKind.POST_BLIND, blind), ActionRecord(hero, ActionKind.POST_BLIND, blind)] + acts
        street = Street(name, tuple(str(c) for c in shown_board), tuple(acts))
        streets.append(street)
        for p, v in voluntary_wagers(street).items():
            put_in[p] += v
        if not cont:
            break

    returned = ()
    if uncalled is not None:
        who, amt = uncalled
        put_in[who] -= amt
        returned = (Payout(who, amt),)
    pot = put_in[hero] + put_in[villain]
    rake = min(int(pot * config.rake_pct), config.rake_cap_cents) if len(streets) > 1 else 0
    share = pot - rake

    reveals: list[Reveal] = []
    if folder is None:  # showdown
        hs, vs = score_hand(hero_hole, board), score_hand(vill_hole, board)
        c = compare(hs, vs)
        if c == 0:
            first, second = share - share // 2, share // 2
            collected = (Payout(hero, first), Payout(villain, second))
            reveals = [Reveal(hero, _pair(hero_hole)), Reveal(villain, _pair(vill_hole))]
        else:
            winner, loser = (hero, villain) if c > 0 else (villain, hero)
            holes = {hero: hero_hole, villain: vill_hole}
            collected = (Payout(winner, share),)
            reveals = [Reveal(winner, _pair(holes[winner]))]
            if rng.random() >= config.muck_prob:
                reveals.append(Reveal(loser, _pair(holes[loser])))
    else:
        winner = villain if folder == hero else hero
        collected = (Payout(winner, share),)
        if rng.random() < config.show_prob:
            reveals = [Reveal(hero, _pair(hero_hole))]

    stack = config.stack_blinds * blind
    ts = _dt.datetime(2009, 1, 1) + _dt.timedelta(seconds=30 * index)
    return HandRecord(
        hand_id=str(config.first_hand_id + index),
        timestamp=ts.strftime("%Y/%m/%d %H:%M:%S ET"),
        blind_cents=blind,
        seats=(Seat(villain, 1, stack), Seat(hero, 2, stack)),
        streets=tuple(streets),
        showdown=tuple(reveals),
        pot_cents=pot,
        rake_cents=rake,
        collected=collected,
        returned=returned,
    )


def _pair(hole) -> tuple[str, str]:
    return str(hole[0]), str(hole[1])


def _simulate_range(args):
    config, start, stop = args
    return [simulate_hand(config, i) for i in range(start, stop)]


def simulate_session(config: SimConfig, workers: int | None = None, chunk: int = 2000) -> list[HandRecord]:
    """All hands of a session, in order.

    Every hand has its own seed, so the corpus is identical for any
    ``workers``.
    """
    if not workers or workers <= 1 or config.hands <= chunk:
        return [simulate_hand(config, i) for i in range(config.hands)]
    jobs = [(config, s, min(s + chunk, config.hands)) for s in range(0, config.hands, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for part in pool.map(_simulate_range, jobs) for r in part]


def render_session(records: Iterable[HandRecord]) -> str:
    """Raw text for a corpus, hands separated by blank lines."""
    return "\n\n".join(render_hand(r, table="Synth I") for r in records)


def write_labels(config: SimConfig, path: str | Path) -> None:
    labels = {p: c.value for p, c in sorted(config.player_labels().items())}
    Path(path).write_text(json.dumps(labels, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_labels(path: str | Path) -> dict[str, SkillClass]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("labels file must hold a JSON object")
    return {str(p): SkillClass(c) for p, c in raw.items()}


# -- policy-level sampling ---------------------------------------------------


def sample_policy_table(
    policy: AgentPolicy,
    n: int,
    seed: int = 0,
    p1_probs: Sequence[float] = (0.0, 0.5, 0.5),
    w2_support: Sequence[int] = (0, 1),
) -> np.ndarray:
    """Count table over (W1, P1, W2) from ``n`` independent policy calls.

    Inputs are drawn independently: P1 from ``p1_probs`` and W2 uniformly
    from ``w2_support``.
    """
    rng = np.random.default_rng(seed)
    p1s = rng.choice(3, size=n, p=np.asarray(p1_probs, dtype=float))
    w2s = rng.choice(np.asarray(w2_support), size=n)
    counts = np.zeros((3, 3, 3), dtype=np.int64)
    for p1, w2 in zip(p1s, w2s):
        w1 = policy_wager(policy, int(p1), int(w2), rng)
        counts[int(w1), int(p1), int(w2)] += 1
    return counts


def fitted_strength_cutoffs(records: Sequence[HandRecord]) -> tuple[int | None, int | None]:
    """(showdown, preflop) equal-frequency cutoffs over every revealed round."""
    from .pipeline.binning import equal_frequency_cutoff
    from .pipeline.observations import raw_rounds, revealed_score

    show: list[int] = []
    pre: list[int] = []
    for h in records:
        for rnd in raw_rounds(h):
            for p in rnd.order:
                s = revealed_score(h, p, rnd.board)
                if s is not None:
                    (pre if s.scale == "preflop" else show).append(s.ordinal)
    return (equal_frequency_cutoff(show) if show else None, equal_frequency_cutoff(pre) if pre else None)


def calibrate_cutoffs(config: SimConfig, pilot_hands: int = 5000, max_iter: int = 30) -> SimConfig:
    """Config whose policy strength cutoffs agree with the fitted ones.

    Which rounds get played depends on the cutoffs, so the equal-frequency
    cutoffs of a corpus move with them.  Pilot sessions are iterated until
    the cutoffs stop changing (or ``max_iter`` is reached).
    """
    cfg = config
    seen = set()
    for _ in range(max_iter):
        pilot = SimConfig.from_dict({**cfg.to_dict(), "hands": pilot_hands})
        show, pre = fitted_strength_cutoffs(simulate_session(pilot))
        show = cfg.showdown_cutoff if show is None else show
        pre = cfg.preflop_cutoff if pre is None else pre
        key = (show, pre)
        if key == (cfg.showdown_cutoff, cfg.preflop_cutoff) or key in seen:
            break
        seen.add(key)
        cfg = SimConfig.from_dict({**cfg.to_dict(), "showdown_cutoff": show, "preflop_cutoff": pre})
    return cfg


__all__ = [
    "AgentPolicy",
    "PolicyKind",
    "SimConfig",
    "calibrate_cutoffs",
    "deal",
    "fitted_strength_cutoffs",
    "policy_wager",
    "render_session",
    "read_labels",
    "sample_policy_table",
    "simulate_hand",
    "simulate_session",
    "strength_state",
    "write_labels",
]
