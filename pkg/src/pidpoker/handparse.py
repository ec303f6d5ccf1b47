"""Tolerant hand-history parsing and the normalized line-delimited format.

Raw input is PokerStars-style No-Limit Hold'em cash-game text.  Parsing is
liberal about lines it does not need (table banners, chat, seat summaries)
and strict about the ones it does: an unknown verb on a seated player's
action line, inconsistent chip totals, or a missing summary fails that hand
only.  ``parse_stream`` never aborts on a bad hand.

Money is integer cents everywhere.  Action amounts are the chips the action
puts in, except ``raise`` whose amount is the street total raised *to*, as
in the raw text.
"""
from __future__ import annotations

import enum
import io
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, TextIO

from .handeval import Card, HandEvalError

SCHEMA_NAME = "pidpoker.hands"
SCHEMA_VERSION = 1
STREET_NAMES = ("preflop", "flop", "turn", "river")
BOARD_SIZES = {"preflop": 0, "flop": 3, "turn": 4, "river": 5}


class ActionKind(str, enum.Enum):
    POST_BLIND = "post-blind"
    FOLD = "fold"
    CHECK = "check"
    CALL = "call"
    BET = "bet"
    RAISE = "raise"


# -- records ---------------------------------------------------------------


@dataclass(frozen=True)
class Seat:
    player: str
    seat: int
    stack_cents: int


@dataclass(frozen=True)
class ActionRecord:
    player: str
    kind: ActionKind
    amount_cents: int = 0


@dataclass(frozen=True)
class Street:
    name: str
    board: tuple[str, ...]  # cumulative community cards visible on this street
    actions: tuple[ActionRecord, ...]


@dataclass(frozen=True)
class Reveal:
    player: str
    cards: tuple[str, str]


@dataclass(frozen=True)
class Payout:
    player: str
    amount_cents: int


@dataclass(frozen=True)
class HandRecord:
    hand_id: str
    timestamp: str
    blind_cents: int
    seats: tuple[Seat, ...]
    streets: tuple[Street, ...]
    showdown: tuple[Reveal, ...]
    pot_cents: int
    rake_cents: int
    collected: tuple[Payout, ...] = ()
    returned: tuple[Payout, ...] = ()

    @property
    def players(self) -> tuple[str, ...]:
        return tuple(s.player for s in self.seats)

    def street(self, name: str) -> Street | None:
        for s in self.streets:
            if s.name == name:
                return s
        return None

    def revealed(self, player: str) -> tuple[str, str] | None:
        for r in self.showdown:
            if r.player == player:
                return r.cards
        return None


def street_commitments(street: Street) -> dict[str, int]:
    """Chips each player put in during one street (posts included)."""
    committed: dict[str, int] = {}
    for a in street.actions:
        prior = committed.get(a.player, 0)
        if a.kind is ActionKind.RAISE:
            committed[a.player] = a.amount_cents
        else:
            committed[a.player] = prior + a.amount_cents
    return committed


def voluntary_wagers(street: Street) -> dict[str, int]:
    """Chips each player chose to put in during one street (posts excluded)."""
    posted: dict[str, int] = {}
    for a in street.actions:
        if a.kind is ActionKind.POST_BLIND:
            posted[a.player] = posted.get(a.player, 0) + a.amount_cents
    return {p: total - posted.get(p, 0) for p, total in street_commitments(street).items()}


def contributions(hand: HandRecord) -> dict[str, int]:
    out = {s.player: 0 for s in hand.seats}
    for st in hand.streets:
        for p, v in street_commitments(st).items():
            out[p] = out.get(p, 0) + v
    return out


def net_results(hand: HandRecord) -> dict[str, int]:
    """Per-player profit in cents (collected + returned - contributed)."""
    net = {p: -v for p, v in contributions(hand).items()}
    for pay in hand.collected + hand.returned:
        net[pay.player] = net.get(pay.player, 0) + pay.amount_cents
    return net


def check_chip_conservation(hand: HandRecord) -> None:
    put_in = sum(contributions(hand).values())
    back = sum(p.amount_cents for p in hand.returned)
    won = sum(p.amount_cents for p in hand.collected)
    if put_in - back != hand.pot_cents:
        raise ChipImbalance(f"contributions {put_in} - returned {back} != pot {hand.pot_cents}")
    if won + hand.rake_cents != hand.pot_cents:
        raise ChipImbalance(f"collected {won} + rake {hand.rake_cents} != pot {hand.pot_cents}")


# -- errors ----------------------------------------------------------------


class ParseError(ValueError):
    reason = "ParseError"

    def __init__(self, message: str, line: int | None = None, text: str | None = None):
        self.message = message
        self.line = line
        self.text = text
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{self.reason}: {where}{message}")


class MalformedHeader(ParseError):
    reason = "MalformedHeader"


class UnknownActionVerb(ParseError):
    reason = "UnknownActionVerb"


class ChipImbalance(ParseError):
    reason = "ChipImbalance"


class TruncatedHand(ParseError):
    reason = "TruncatedHand"


class BadCard(ParseError):
    reason = "BadCard"


class SchemaError(ValueError):
    """A normalized record line does not match the fixed schema."""


# -- raw grammar -----------------------------------------------------------

_HEADER = re.compile(
    r"^PokerStars (?:Hand|Game) #(?P<id>\d+):\s+Hold'em No Limit "
    r"\((?P<sb>[$€£]?[\d.,]+)/(?P<bb>[$€£]?[\d.,]+)(?: [A-Z]{3})?\)\s+-\s+(?P<ts>.+?)\s*$"
)
_HEADER_START = re.compile(r"^PokerStars (?:Hand|Game) #")
_SEAT = re.compile(r"^Seat (?P<seat>\d+): (?P<name>.+?) \((?P<stack>[$€£]?[\d.,]+) in chips\)(?P<rest>.*)$")
_STREET = re.compile(r"^\*\*\* (?P<tag>HOLE CARDS|FLOP|TURN|RIVER|SHOW ?DOWN|SUMMARY) \*\*\*(?P<rest>.*)$")
_CARDS = re.compile(r"\[([^\]]*)\]")
_MONEY = r"[$€£]?[\d.,]+"
_VERBS = [
    (re.compile(rf"^posts (?:small blind|big blind|small & big blinds) (?P<a>{_MONEY})(?: and is all-in)?$"), ActionKind.POST_BLIND),
    (re.compile(r"^folds(?: \[[^\]]*\])?$"), ActionKind.FOLD),
    (re.compile(r"^checks$"), ActionKind.CHECK),
    (re.compile(rf"^calls (?P<a>{_MONEY})(?P<allin> and is all-in)?$"), ActionKind.CALL),
    (re.compile(rf"^bets (?P<a>{_MONEY})(?P<allin> and is all-in)?$"), ActionKind.BET),
    (re.compile(rf"^raises (?P<by>{_MONEY}) to (?P<a>{_MONEY})(?P<allin> and is all-in)?$"), ActionKind.RAISE),
]
_SHOWS = re.compile(r"^shows \[(?P<cards>[^\]]*)\]")
_BENIGN = re.compile(
    r"^(?:mucks hand|doesn't show hand|sits out|is sitting out|has timed out.*|"
    r"is disconnected|is connected|has returned|leaves the table|joins the table.*|"
    r"will be allowed to play.*|said, .*)$"
)
_UNCALLED = re.compile(rf"^Uncalled bet \((?P<a>{_MONEY})\) returned to (?P<name>.+)$")
_COLLECTED = re.compile(rf"^(?P<name>.+?) collected (?P<a>{_MONEY}) from (?:side |main )?pot")
_TOTAL = re.compile(rf"^Total pot (?P<pot>{_MONEY}).*?\| Rake (?P<rake>{_MONEY})")


def money_cents(text: str) -> int:
    t = text.lstrip("$€£").replace(",", "")
    try:
        value = Decimal(t) * 100
    except InvalidOperation:
        raise ValueError(f"bad amount {text!r}") from None
    if value != value.to_integral_value():
        raise ValueError(f"sub-cent amount {text!r}")
    return int(value)


def format_money(cents: int) -> str:
    whole, frac = divmod(cents, 100)
    return f"${whole}" if frac == 0 else f"${whole}.{frac:02d}"


def _canon_card(text: str, lineno: int) -> str:
    try:
        return str(Card.parse(text))
    except HandEvalError:
        raise BadCard(f"bad card {text!r}", lineno) from None


class _HandBuilder:
    def __init__(self, lines: list[str], first_line: int):
        self.lines = lines
        self.first_line = first_line

    def fail(self, cls, message, i):
        raise cls(message, self.first_line + i, self.lines[i] if 0 <= i < len(self.lines) else None)

    def amount(self, text, i):
        try:
            return money_cents(text)
        except ValueError as exc:
            self.fail(ChipImbalance, str(exc), i)

    def actor(self, line: str) -> tuple[str, str] | None:
        for name in self.names_longest_first:
            if line.startswith(name + ": "):
                return name, line[len(name) + 2 :]
        return None

    def build(self) -> HandRecord:
        lines = self.lines
        if not lines or not any(l.strip() for l in lines):
            raise TruncatedHand("empty hand block", self.first_line)
        m = _HEADER.match(lines[0])
        if not m:
            self.fail(MalformedHeader, "unrecognized hand header", 0)
        hand_id, ts = m["id"], m["ts"]
        blind = self.amount(m["bb"], 0)
        if blind <= 0:
            self.fail(MalformedHeader, "non-positive blind", 0)

        seats: list[Seat] = []
        i = 1
        while i < len(lines) and not lines[i].startswith("*** "):
            sm = _SEAT.match(lines[i])
            if sm:
                if "sitting out" not in sm["rest"]:
                    seats.append(Seat(sm["name"], int(sm["seat"]), self.amount(sm["stack"], i)))
            elif seats:
                break  # blind posts follow the seat list
            i += 1
        if not seats:
            self.fail(TruncatedHand, "no seated players", min(i, len(lines) - 1))
        self.names_longest_first = sorted((s.player for s in seats), key=len, reverse=True)
        seat_names = {s.player for s in seats}

        streets: list[tuple[str, list[str], list[ActionRecord]]] = []
        # preflop posts precede the HOLE CARDS marker
        streets.append(("preflop", [], []))
        reveals: dict[str, tuple[str, str]] = {}
        collected: list[Payout] = []
        returned: list[Payout] = []
        pot = rake = None
        in_summary = False
        seen_hole = False
        highest = 0
        committed: dict[str, int] = {}

        for i in range(i, len(lines)):
            line = lines[i].rstrip()
            if not line:
                continue
            sm = _STREET.match(line)
            if sm:
                tag = sm["tag"]
                if tag == "HOLE CARDS":
                    seen_hole = True
                elif tag in ("FLOP", "TURN", "RIVER"):
                    name = tag.lower()
                    groups = _CARDS.findall(sm["rest"])
                    board = [_canon_card(c, self.first_line + i) for g in groups for c in g.split()]
                    if len(board) != BOARD_SIZES[name] or streets[-1][0] != STREET_NAMES[STREET_NAMES.index(name) - 1]:
                        self.fail(TruncatedHand, f"inconsistent {name} board", i)
                    if board[: len(streets[-1][1])] != streets[-1][1]:
                        self.fail(TruncatedHand, f"{name} board does not extend the previous board", i)
                    streets.append((name, board, []))
                    highest = 0
                    committed = {}
                elif tag == "SUMMARY":
                    in_summary = True
                continue

            if in_summary:
                tm = _TOTAL.match(line)
                if tm:
                    pot = self.amount(tm["pot"], i)
                    rake = self.amount(tm["rake"], i)
                continue

            um = _UNCALLED.match(line)
            if um and um["name"] in seat_names:
                returned.append(Payout(um["name"], self.amount(um["a"], i)))
                continue
            cm = _COLLECTED.match(line)
            if cm and cm["name"] in seat_names:
                collected.append(Payout(cm["name"], self.amount(cm["a"], i)))
                continue

            who = self.actor(line)
            if who is None:
                continue  # dealer chatter, "Dealt to", table messages
            player, rest = who
            shm = _SHOWS.match(rest)
            if shm:
                cards = [_canon_card(c, self.first_line + i) for c in shm["cards"].split()]
                if len(cards) != 2:
                    self.fail(BadCard, "reveal must show two hole cards", i)
                reveals.setdefault(player, (cards[0], cards[1]))
                continue
            if _BENIGN.match(rest):
                continue
            for rx, kind in _VERBS:
                vm = rx.match(rest)
                if vm:
                    break
            else:
                self.fail(UnknownActionVerb, f"unknown action {rest!r}", i)
            if kind is not ActionKind.POST_BLIND and not seen_hole:
                self.fail(TruncatedHand, "action before hole cards", i)
            amt = self.amount(vm["a"], i) if "a" in vm.groupdict() else 0
            prior = committed.get(player, 0)
            allin = bool(vm.groupdict().get("allin"))
            if kind is ActionKind.RAISE:
                if amt <= highest:
                    self.fail(ChipImbalance, f"raise to {amt} does not exceed {highest}", i)
                committed[player] = amt
            elif kind is ActionKind.CALL:
                after = prior + amt
                if after > highest or (after < highest and not allin):
                    self.fail(ChipImbalance, f"call of {amt} does not match {highest}", i)
                committed[player] = after
            else:
                committed[player] = prior + amt
            highest = max(highest, committed[player])
            streets[-1][2].append(ActionRecord(player, kind, amt))

        if pot is None or not seen_hole:
            raise TruncatedHand("hand ends before its summary", self.first_line + len(lines) - 1)

        rec = HandRecord(
            hand_id=hand_id,
            timestamp=ts,
            blind_cents=blind,
            seats=tuple(seats),
            streets=tuple(Street(n, tuple(b), tuple(a)) for n, b, a in streets),
            showdown=tuple(Reveal(p, c) for p, c in reveals.items()),
            pot_cents=pot,
            rake_cents=rake,
            collected=tuple(collected),
            returned=tuple(returned),
        )
        try:
            check_chip_conservation(rec)
        except ChipImbalance as exc:
            raise ChipImbalance(exc.message, self.first_line + len(lines) - 1) from None
        for p, v in contributions(rec).items():
            stack = next(s.stack_cents for s in seats if s.player == p)
            if v > stack:
                raise ChipImbalance(f"{p} put in {v} with a stack of {stack}", self.first_line)
        return rec


def parse_hand(text: str | list[str], first_line: int = 1) -> HandRecord:
    """Parse one hand block; raises a ParseError subclass naming the line."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    while lines and not lines[0].strip():
        lines.pop(0)
        first_line += 1
    while lines and not lines[-1].strip():
        lines.pop()
    return _HandBuilder(lines, first_line).build()


# -- streams ---------------------------------------------------------------


@dataclass(frozen=True)
class ParseFailure:
    block: int
    line: int | None
    reason: str
    message: str


@dataclass
class ParseReport:
    attempted: int = 0
    parsed: int = 0
    failures: list[ParseFailure] = field(default_factory=list)

    @property
    def failed(self) -> int:
        return self.attempted - self.parsed

    @property
    def failure_fraction(self) -> float:
        return self.failed / self.attempted if self.attempted else 0.0

    def reason_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for f in self.failures:
            out[f.reason] = out.get(f.reason, 0) + 1
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "parsed": self.parsed,
            "failed": self.failed,
            "failure_fraction": self.failure_fraction,
            "reasons": self.reason_counts(),
            "failures": [f.__dict__ for f in self.failures],
        }


def iter_blocks(lines: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    """Split raw text into hand blocks at blank-line runs and at headers."""
    block: list[str] = []
    start = 1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if block:
                yield start, block
                block = []
            continue
        if _HEADER_START.match(line) and block:
            yield start, block
            block = []
        if not block:
            start = lineno
        block.append(line)
    if block:
        yield start, block


def _parse_block(item):
    index, (start, block) = item
    try:
        return index, parse_hand(block, start), None
    except ParseError as exc:
        return index, None, ParseFailure(index, exc.line, exc.reason, exc.message)


def parse_stream(source: str | TextIO | Iterable[str], workers: int | None = None, chunksize: int = 256):
    """Parse every hand in ``source``; returns ``(records, report)``.

    With ``workers > 1`` blocks are parsed in a process pool; results are
    merged in input order so the output is identical to a serial run.
    """
    lines = io.StringIO(source) if isinstance(source, str) else source
    blocks = enumerate(iter_blocks(lines))
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_parse_block, blocks, chunksize=chunksize))
    else:
        results = map(_parse_block, blocks)
    records: list[HandRecord] = []
    report = ParseReport()
    for _, rec, fail in results:
        report.attempted += 1
        if rec is not None:
            report.parsed += 1
            records.append(rec)
        else:
            report.failures.append(fail)
    return records, report


# -- normalized format -----------------------------------------------------

_RECORD_KEYS = (
    "hand_id", "timestamp", "blind_cents", "seats", "streets", "showdown",
    "pot_cents", "rake_cents", "collected", "returned",
)


def schema_header(meta: dict | None = None) -> str:
    """First line of a normalized file; ``meta`` records who wrote it."""
    head = {"schema": SCHEMA_NAME, "version": SCHEMA_VERSION}
    if meta is not None:
        head["meta"] = meta
    return json.dumps(head, ensure_ascii=False, separators=(",", ":"), sort_keys=False)


def record_to_dict(r: HandRecord) -> dict:
    return {
        "hand_id": r.hand_id,
        "timestamp": r.timestamp,
        "blind_cents": r.blind_cents,
        "seats": [{"player": s.player, "seat": s.seat, "stack_cents": s.stack_cents} for s in r.seats],
        "streets": [
            {
                "name": s.name,
                "board": list(s.board),
                "actions": [{"player": a.player, "kind": a.kind.value, "amount_cents": a.amount_cents} for a in s.actions],
            }
            for s in r.streets
        ],
        "showdown": [{"player": v.player, "cards": list(v.cards)} for v in r.showdown],
        "pot_cents": r.pot_cents,
        "rake_cents": r.rake_cents,
        "collected": [{"player": p.player, "amount_cents": p.amount_cents} for p in r.collected],
        "returned": [{"player": p.player, "amount_cents": p.amount_cents} for p in r.returned],
    }


def normalize(record: HandRecord) -> str:
    """One JSON line for ``record``; field names and order are fixed."""
    return json.dumps(record_to_dict(record), ensure_ascii=False, separators=(",", ":"))


def _expect(obj, keys, where):
    if not isinstance(obj, dict) or tuple(obj) != tuple(keys):
        got = tuple(obj) if isinstance(obj, dict) else type(obj).__name__
        raise SchemaError(f"{where}: expected fields {keys}, got {got}")
    return obj


def _int(v, where):
    if type(v) is not int or v < 0:
        raise SchemaError(f"{where}: expected a non-negative integer, got {v!r}")
    return v


def _str(v, where):
    if not isinstance(v, str):
        raise SchemaError(f"{where}: expected a string, got {v!r}")
    return v


def record_from_dict(d: dict) -> HandRecord:
    _expect(d, _RECORD_KEYS, "record")
    try:
        streets = []
        for s in d["streets"]:
            _expect(s, ("name", "board", "actions"), "street")
            if s["name"] not in STREET_NAMES:
                raise SchemaError(f"unknown street {s['name']!r}")
            actions = []
            for a in s["actions"]:
                _expect(a, ("player", "kind", "amount_cents"), "action")
                actions.append(ActionRecord(_str(a["player"], "player"), ActionKind(a["kind"]), _int(a["amount_cents"], "amount_cents")))
            streets.append(Street(s["name"], tuple(_str(c, "card") for c in s["board"]), tuple(actions)))
        seats = []
        for s in d["seats"]:
            _expect(s, ("player", "seat", "stack_cents"), "seat")
            seats.append(Seat(_str(s["player"], "player"), _int(s["seat"], "seat"), _int(s["stack_cents"], "stack_cents")))
        reveals = []
        for v in d["showdown"]:
            _expect(v, ("player", "cards"), "showdown")
            if len(v["cards"]) != 2:
                raise SchemaError("reveal must hold two cards")
            reveals.append(Reveal(_str(v["player"], "player"), (_str(v["cards"][0], "card"), _str(v["cards"][1], "card"))))

        def payouts(key):
            out = []
            for p in d[key]:
                _expect(p, ("player", "amount_cents"), key)
                out.append(Payout(_str(p["player"], "player"), _int(p["amount_cents"], "amount_cents")))
            return tuple(out)

        return HandRecord(
            hand_id=_str(d["hand_id"], "hand_id"),
            timestamp=_str(d["timestamp"], "timestamp"),
            blind_cents=_int(d["blind_cents"], "blind_cents"),
            seats=tuple(seats),
            streets=tuple(streets),
            showdown=tuple(reveals),
            pot_cents=_int(d["pot_cents"], "pot_cents"),
            rake_cents=_int(d["rake_cents"], "rake_cents"),
            collected=payouts("collected"),
            returned=payouts("returned"),
        )
    except (TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from None


def read_record(line: str) -> HandRecord:
    try:
        d = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not JSON: {exc}") from None
    return record_from_dict(d)


def write_records(records: Iterable[HandRecord], fh: TextIO, meta: dict | None = None) -> int:
    fh.write(schema_header(meta) + "\n")
    n = 0
    for r in records:
        fh.write(normalize(r) + "\n")
        n += 1
    return n


def read_records(fh: TextIO | Iterable[str]) -> Iterator[HandRecord]:
    it = iter(fh)
    try:
        first = next(it)
    except StopIteration:
        raise SchemaError("missing schema header line") from None
    try:
        header = json.loads(first)
    except json.JSONDecodeError:
        raise SchemaError("missing schema header line") from None
    if (
        not isinstance(header, dict)
        or header.get("schema") != SCHEMA_NAME
        or header.get("version") != SCHEMA_VERSION
        or not set(header) <= {"schema", "version", "meta"}
    ):
        raise SchemaError(f"unsupported schema header {header!r}")
    for lineno, line in enumerate(it, start=2):
        if not line.strip():
            continue
        try:
            yield read_record(line)
        except SchemaError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None


# -- raw rendering ---------------------------------------------------------


def render_hand(r: HandRecord, table: str = "Synthetic", max_seats: int = 2) -> str:
    """PokerStars-style text for ``r``; ``parse_hand(render_hand(r)) == r``."""
    sb = r.blind_cents // 2
    out = [
        f"PokerStars Game #{r.hand_id}:  Hold'em No Limit ({format_money(sb)}/{format_money(r.blind_cents)}) - {r.timestamp}",
        f"Table '{table}' {max_seats}-max Seat #{r.seats[0].seat} is the button",
    ]
    for s in r.seats:
        out.append(f"Seat {s.seat}: {s.player} ({format_money(s.stack_cents)} in chips)")
    shown = False
    for st in r.streets:
        if st.name == "preflop":
            posts = [a for a in st.actions if a.kind is ActionKind.POST_BLIND]
            rest = [a for a in st.actions if a.kind is not ActionKind.POST_BLIND]
            for i, a in enumerate(posts):
                which = "big blind" if a.amount_cents >= r.blind_cents else "small blind"
                out.append(f"{a.player}: posts {which} {format_money(a.amount_cents)}")
            out.append("*** HOLE CARDS ***")
            actions = rest
            committed = street_commitments(Street("preflop", (), tuple(posts)))
        else:
            prev = STREET_NAMES[STREET_NAMES.index(st.name) - 1]
            pb = r.street(prev).board if r.street(prev) else ()
            head = f"[{' '.join(pb)}] [{' '.join(st.board[len(pb):])}]" if pb else f"[{' '.join(st.board)}]"
            out.append(f"*** {st.name.upper()} *** {head}")
            actions = list(st.actions)
            committed = {}
        highest = max(committed.values(), default=0)
        for a in actions:
            prior = committed.get(a.player, 0)
            if a.kind is ActionKind.FOLD:
                out.append(f"{a.player}: folds")
            elif a.kind is ActionKind.CHECK:
                out.append(f"{a.player}: checks")
            elif a.kind is ActionKind.BET:
                out.append(f"{a.player}: bets {format_money(a.amount_cents)}")
            elif a.kind is ActionKind.CALL:
                tail = " and is all-in" if prior + a.amount_cents < highest else ""
                out.append(f"{a.player}: calls {format_money(a.amount_cents)}{tail}")
            elif a.kind is ActionKind.RAISE:
                out.append(f"{a.player}: raises {format_money(a.amount_cents - highest)} to {format_money(a.amount_cents)}")
            else:
                raise ValueError(f"cannot render {a.kind} after the hole cards")
            committed[a.player] = a.amount_cents if a.kind is ActionKind.RAISE else prior + a.amount_cents
            highest = max(highest, committed[a.player])
    for p in r.returned:
        out.append(f"Uncalled bet ({format_money(p.amount_cents)}) returned to {p.player}")
    if r.showdown:
        out.append("*** SHOW DOWN ***")
        shown = True
        for v in r.showdown:
            out.append(f"{v.player}: shows [{v.cards[0]} {v.cards[1]}]")
    for p in r.collected:
        out.append(f"{p.player} collected {format_money(p.amount_cents)} from pot")
    out.append("*** SUMMARY ***")
    out.append(f"Total pot {format_money(r.pot_cents)} | Rake {format_money(r.rake_cents)}")
    board = r.streets[-1].board if r.streets else ()
    if board:
        out.append(f"Board [{' '.join(board)}]")
    for s in r.seats:
        tag = " showed" if shown and r.revealed(s.player) else ""
        out.append(f"Seat {s.seat}: {s.player}{tag}")
    return "\n".join(out) + "\n"
