"""Writer and tolerant parser for the online game-log text format.

Layout of a log::

    <player_id1>~<player_id2>
    Supply: 10 Curse, 60 Copper, ..., 10 Workshop
    # ratings: 0.65 0.17, -0.07 0.21          (optional metadata line)
    0:P0 - GAME_META_INFO (<game_id>):
    1:P1 - STARTS_WITH: 7 Copper
    ...

Each event line is ``<idx>:P<n> - <KIND>`` followed by optional numeric
arguments in parentheses, a colon (omitted after SHUFFLES), and an
optional card list. The supply header counts include the dealt starting
cards (60 Copper, 14 Estate in a 2-player game). The parser tolerates a
stray double-quote before the event kind, as seen in the wild on GAIN
lines; unknown event kinds are a hard error, reported with the line
number, since skipping them would corrupt statistics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .cards import (
    CardId,
    CARD_NAMES,
    NAME_TO_CARD,
    initial_total,
    vp_value,
)
from .engine import (
    EVENT_KINDS,
    EV_BUY_AND_GAIN,
    EV_GAIN,
    EV_GAME_META_INFO,
    EV_NEW_TURN,
    EV_PLAY,
    EV_SHUFFLES,
    EV_STARTS_WITH,
    EV_TRASH,
    GameRecord,
)

# Basic piles first, in the conventional header order, then kingdom
# piles sorted by display name.
_HEADER_BASICS = (
    CardId.Curse, CardId.Copper, CardId.Silver, CardId.Gold,
    CardId.Estate, CardId.Duchy, CardId.Province,
)


class LogParseError(Exception):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Event:
    line_index: int
    player: int                                   # 0 = system, 1 or 2
    kind: str
    args: tuple[int, ...] = ()
    cards: tuple[tuple[int, CardId], ...] = ()


@dataclass(frozen=True)
class LogDocument:
    player_ids: tuple[str, str]
    supply: tuple[tuple[int, CardId], ...]
    events: tuple[Event, ...]
    ratings: tuple[tuple[float, float], tuple[float, float]] | None = None

    @property
    def game_id(self) -> int | None:
        for ev in self.events:
            if ev.kind == EV_GAME_META_INFO and ev.args:
                return ev.args[0]
        return None


# --- writing ------------------------------------------------------------


def document_from_record(record: GameRecord, ratings=None) -> LogDocument:
    """Convert an engine record into a log document (sequential indexes)."""
    if record.events is None:
        raise ValueError("record was produced with recording off")
    kingdom_sorted = sorted(record.kingdom, key=lambda c: CARD_NAMES[CardId(c)])
    supply = tuple(
        (initial_total(CardId(c)), CardId(c))
        for c in (*_HEADER_BASICS, *kingdom_sorted)
    )
    events = tuple(
        Event(
            line_index=i,
            player=pl,
            kind=kind,
            args=tuple(args),
            cards=tuple((n, CardId(c)) for n, c in cards),
        )
        for i, (pl, kind, args, cards) in enumerate(record.events)
    )
    if ratings is not None:
        ratings = tuple((float(mu), float(phi)) for mu, phi in ratings)
    return LogDocument(
        player_ids=tuple(record.player_ids),
        supply=supply,
        events=events,
        ratings=ratings,
    )


def _card_list_text(cards) -> str:
    return ", ".join(f"{n} {CARD_NAMES[c]}" for n, c in cards)


def render_event(ev: Event) -> str:
    out = f"{ev.line_index}:P{ev.player} - {ev.kind}"
    if ev.args:
        out += " (" + ", ".join(str(a) for a in ev.args) + ")"
    if ev.kind != EV_SHUFFLES:
        out += ":"
    if ev.cards:
        out += " " + _card_list_text(ev.cards)
    return out


def render_document(doc: LogDocument) -> str:
    lines = [
        f"{doc.player_ids[0]}~{doc.player_ids[1]}",
        "Supply: " + _card_list_text(doc.supply),
    ]
    if doc.ratings is not None:
        (mu0, phi0), (mu1, phi1) = doc.ratings
        lines.append(f"# ratings: {mu0!r} {phi0!r}, {mu1!r} {phi1!r}")
    lines.extend(render_event(ev) for ev in doc.events)
    return "\n".join(lines) + "\n"


def write_log(record: GameRecord, ratings=None) -> str:
    """Render an engine game record as log text."""
    return render_document(document_from_record(record, ratings))


# --- parsing ------------------------------------------------------------

_EVENT_RE = re.compile(
    r'^(\d+):P(\d) - "?([A-Z_]+)'   # index, player, kind (stray quote ok)
    r"(?: \(([^)]*)\))?"            # optional (args)
    r":?"                           # colon; absent after SHUFFLES
    r"(?: (.*))?$"                  # optional card list
)
_RATINGS_RE = re.compile(
    r"^#\s*ratings:\s*(\S+)\s+(\S+)\s*,\s*(\S+)\s+(\S+)\s*$"
)


def _parse_card_list(text: str, line_no: int):
    out = []
    for part in text.split(", "):
        m = re.fullmatch(r"(\d+) (.+)", part.strip())
        if not m:
            raise LogParseError(f"malformed card entry {part!r}", line_no)
        count = int(m.group(1))
        name = m.group(2)
        card = NAME_TO_CARD.get(name)
        if card is None:
            raise LogParseError(f"unknown card name {name!r}", line_no)
        if count <= 0:
            raise LogParseError(f"non-positive card count in {part!r}", line_no)
        out.append((count, card))
    return tuple(out)


def parse_log(text: str) -> LogDocument:
    """Parse log text; raises LogParseError with a 1-based line number."""
    lines = text.splitlines()
    body = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not body:
        raise LogParseError("missing header", 1)

    line_no, header = body[0]
    if "~" not in header:
        raise LogParseError("missing header (expected <id>~<id>)", line_no)
    parts = header.split("~")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise LogParseError("malformed player-id header", line_no)
    player_ids = (parts[0], parts[1])

    if len(body) < 2:
        raise LogParseError("missing supply header", line_no)
    line_no, supply_line = body[1]
    if not supply_line.startswith("Supply: "):
        raise LogParseError("missing supply header", line_no)
    supply = _parse_card_list(supply_line[len("Supply: "):], line_no)
    seen = [c for _n, c in supply]
    if len(set(seen)) != len(seen):
        raise LogParseError("duplicate pile in supply header", line_no)

    ratings = None
    events = []
    for line_no, ln in body[2:]:
        if ln.lstrip().startswith("#"):
            m = _RATINGS_RE.match(ln.strip())
            if m:
                try:
                    ratings = (
                        (float(m.group(1)), float(m.group(2))),
                        (float(m.group(3)), float(m.group(4))),
                    )
                except ValueError:
                    raise LogParseError("malformed ratings metadata", line_no) from None
            continue  # other comments are ignored
        m = _EVENT_RE.match(ln.rstrip())
        if not m:
            raise LogParseError(f"malformed event line {ln!r}", line_no)
        idx, player, kind, args_text, cards_text = (
            int(m.group(1)), int(m.group(2)), m.group(3), m.group(4), m.group(5),
        )
        if kind not in EVENT_KINDS:
            raise LogParseError(f"unknown event kind {kind!r}", line_no)
        if player not in (0, 1, 2):
            raise LogParseError(f"bad player P{player}", line_no)
        args = ()
        if args_text is not None:
            try:
                args = tuple(int(a.strip()) for a in args_text.split(","))
            except ValueError:
                raise LogParseError(
                    f"non-integer event argument in ({args_text})", line_no
                ) from None
        cards = ()
        if cards_text:
            cards = _parse_card_list(cards_text, line_no)
        events.append(Event(idx, player, kind, args, cards))

    return LogDocument(player_ids, supply, tuple(events), ratings)


# --- corpus statistics ----------------------------------------------------


@dataclass(frozen=True)
class CorpusStats:
    n_games: int
    avg_game_length: float
    avg_vp_per_player: float
    avg_margin_vp: float
    avg_gain_decisions_per_player: float
    avg_card_plays_per_player: float
    avg_mu: float | None
    avg_phi: float | None
    tie_rate: float

    def rows(self):
        fmt = lambda v: "n/a" if v is None else f"{v:.4g}"
        return (
            ("Avg game length", fmt(self.avg_game_length)),
            ("Avg VP totals/player", fmt(self.avg_vp_per_player)),
            ("Avg margin of victory [VPs]", fmt(self.avg_margin_vp)),
            ("Avg gain decisions/player", fmt(self.avg_gain_decisions_per_player)),
            ("Avg card plays/player", fmt(self.avg_card_plays_per_player)),
            ("Avg mu (skill)", fmt(self.avg_mu)),
            ("Avg phi (deviation)", fmt(self.avg_phi)),
            ("Ties", f"{self.tie_rate * 100:.2f}%"),
        )


def score_document(doc: LogDocument):
    """Final scores reconstructed from a parsed log.

    Ownership per player = STARTS_WITH + gains - trashes; the scoring
    and tiebreak rules are the engine's.
    """
    owned = ({}, {})
    turns = [0, 0]
    for ev in doc.events:
        if ev.player not in (1, 2):
            continue
        p = ev.player - 1
        if ev.kind in (EV_STARTS_WITH, EV_GAIN, EV_BUY_AND_GAIN):
            for n, c in ev.cards:
                owned[p][c] = owned[p].get(c, 0) + n
        elif ev.kind == EV_TRASH:
            for n, c in ev.cards:
                owned[p][c] = owned[p].get(c, 0) - n
        elif ev.kind == EV_NEW_TURN and ev.args:
            turns[p] = max(turns[p], ev.args[0])
    vps = []
    for p in (0, 1):
        total = sum(owned[p].values())
        vps.append(sum(n * vp_value(c, total) for c, n in owned[p].items()))
    if vps[0] != vps[1]:
        winner = 0 if vps[0] > vps[1] else 1
    elif turns[0] != turns[1]:
        winner = 0 if turns[0] < turns[1] else 1
    else:
        winner = None
    return tuple(vps), winner, tuple(turns)


def corpus_stats(documents) -> CorpusStats:
    """Aggregate Table-style statistics over parsed log documents."""
    docs = list(documents)
    if not docs:
        raise ValueError("empty corpus")
    n = len(docs)
    length = vp_total = margin = gains = plays = ties = 0
    mus, phis = [], []
    for doc in docs:
        turn_max = 0
        for ev in doc.events:
            if ev.kind == EV_NEW_TURN and ev.args:
                turn_max = max(turn_max, ev.args[0])
            elif ev.kind in (EV_GAIN, EV_BUY_AND_GAIN):
                gains += 1
            elif ev.kind == EV_PLAY:
                plays += 1
        length += turn_max
        vps, winner, _turns = score_document(doc)
        vp_total += vps[0] + vps[1]
        margin += abs(vps[0] - vps[1])
        if winner is None:
            ties += 1
        if doc.ratings is not None:
            for mu, phi in doc.ratings:
                mus.append(mu)
                phis.append(phi)
    return CorpusStats(
        n_games=n,
        avg_game_length=length / n,
        avg_vp_per_player=vp_total / (2 * n),
        avg_margin_vp=margin / n,
        avg_gain_decisions_per_player=gains / (2 * n),
        avg_card_plays_per_player=plays / (2 * n),
        avg_mu=sum(mus) / len(mus) if mus else None,
        avg_phi=sum(phis) / len(phis) if phis else None,
        tie_rate=ties / n,
    )
