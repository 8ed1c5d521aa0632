"""Deterministic 2-player game engine.

The engine owns the rules and nothing else: every choice, including
trivial ones, is routed out through a ``DecisionRequest``. Policies
answer requests via :func:`apply_decision`; :func:`step` advances
through automatic effects (draws, counters, forced attack resolution)
until the next choice or the end of the game. A request whose legal
option set has exactly one member is resolved internally and never
reaches a policy.

Card ids are plain ints in the hot path; zones are lists with the top
of the deck at the end. All randomness flows through one
:class:`~domsim.rng.GameRng`, so a ``(seed, kingdom, policies,
first_player)`` tuple fully determines the game record.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cards import (
    CardId,
    COST,
    COIN_VALUE,
    IS_ACTION,
    IS_TREASURE,
    IS_VICTORY,
    catalog,
    initial_supply,
    vp_value,
)
from .rng import GameRng, RNG_ALGORITHM

# --- decision kinds -------------------------------------------------------

CHOOSE_ACTION = "ChooseAction"
CHOOSE_BUY = "ChooseBuy"
DISCARD_TO_HAND_SIZE = "DiscardToHandSize"
DISCARD_ANY_NUMBER = "DiscardAnyNumber"
TRASH_UP_TO_N = "TrashUpToN"
GAIN_UP_TO_COST = "GainUpToCost"
TOPDECK_FROM_DISCARD = "TopdeckFromDiscard"
REVEAL_REACTION = "RevealReaction"
CHOOSE_THRONE_TARGET = "ChooseThroneTarget"
VASSAL_PLAY_OR_DISCARD = "VassalPlayOrDiscard"
SENTRY_DISPOSITION = "SentryDisposition"
LIBRARY_KEEP_OR_SET_ASIDE = "LibraryKeepOrSetAside"
MINE_TRASH_AND_GAIN = "MineTrashAndGain"
ARTISAN_GAIN_AND_TOPDECK = "ArtisanGainAndTopdeck"
BUREAUCRAT_TOPDECK_VICTORY = "BureaucratTopdeckVictory"
BANDIT_VICTIM_TRASH = "BanditVictimTrash"

# --- choice sentinels -----------------------------------------------------

DECLINE = "decline"
STOP = "stop"
REVEAL = "reveal"
PLAY_IT = "play"
KEEP = "keep"
SET_ASIDE = "set-aside"
TRASH_CHOICE = "trash"
DISCARD_CHOICE = "discard"

# --- event kinds (game-log vocabulary) --------------------------------------

EV_GAME_META_INFO = "GAME_META_INFO"
EV_STARTS_WITH = "STARTS_WITH"
EV_NEW_TURN = "NEW_TURN"
EV_PLAY = "PLAY"
EV_DRAW = "DRAW"
EV_GETS_ACTION = "GETS_ACTION"
EV_GETS_COIN = "GETS_COIN"
EV_GETS_BUY = "GETS_BUY"
EV_LOOK_AT = "LOOK_AT"
EV_TOPDECK = "TOPDECK"
EV_DISCARD = "DISCARD"
EV_TRASH = "TRASH"
EV_GAIN = "GAIN"
EV_REVEAL = "REVEAL"
EV_PLAY_TREASURES_FOR = "PLAY_TREASURES_FOR"
EV_BUY_AND_GAIN = "BUY_AND_GAIN"
EV_SHUFFLES = "SHUFFLES"

EVENT_KINDS = frozenset({
    EV_GAME_META_INFO, EV_STARTS_WITH, EV_NEW_TURN, EV_PLAY, EV_DRAW,
    EV_GETS_ACTION, EV_GETS_COIN, EV_GETS_BUY, EV_LOOK_AT, EV_TOPDECK,
    EV_DISCARD, EV_TRASH, EV_GAIN, EV_REVEAL, EV_PLAY_TREASURES_FOR,
    EV_BUY_AND_GAIN, EV_SHUFFLES,
})

PHASE_ACTION = "action"
PHASE_BUY = "buy"
PHASE_CLEANUP = "cleanup"

DEFAULT_TURN_CAP = 100  # per player; only degenerate policies ever reach it

GAME_OVER = object()
_APPLIED = object()

_EFFECTS = tuple(spec.effect for spec in catalog())

_GOLD = int(CardId.Gold)
_SILVER = int(CardId.Silver)
_COPPER = int(CardId.Copper)
_CURSE = int(CardId.Curse)
_MOAT = int(CardId.Moat)


class IllegalChoiceError(Exception):
    """A policy returned a choice outside the legal option set."""


class TerminalStateError(Exception):
    """step()/score() called at the wrong end of a game's life."""


class DecisionRequest:
    """A single choice owed by ``player``; pick one member of ``options``."""

    __slots__ = ("kind", "player", "options", "source", "data")

    def __init__(self, kind, player, options, source=None, data=None):
        self.kind = kind
        self.player = player
        self.options = options
        self.source = source
        self.data = data

    def __repr__(self):
        src = f" via {CardId(self.source).name}" if self.source is not None else ""
        return f"<{self.kind} p{self.player}{src} options={self.options!r}>"


class PlayerZones:
    __slots__ = ("deck", "hand", "discard", "in_play", "set_aside")

    def __init__(self):
        self.deck: list[int] = []       # end of list = top of deck
        self.hand: list[int] = []
        self.discard: list[int] = []
        self.in_play: list[int] = []
        self.set_aside: list[int] = []  # transient: Library / revealed cards

    def all_cards(self) -> list[int]:
        return self.deck + self.hand + self.discard + self.in_play + self.set_aside


class GameState:
    __slots__ = (
        "seed", "kingdom", "first_player", "game_id", "player_ids",
        "supply", "cards_in_game", "players", "trash",
        "active_player", "turn_number", "turn_counts",
        "actions_left", "buys_left", "coins", "phase",
        "merchant_pending", "rng", "turn_cap", "cap_hit", "over",
        "play_counts", "gain_counts",
        "_events", "_decisions", "_gen", "_request", "_over_reported",
    )

    def emit(self, player, kind, args=(), card_list=()):
        if self._events is not None:
            self._events.append((player, kind, args, _agg(card_list)))


@dataclass(frozen=True)
class GameRecord:
    """Replayable outcome of one game.

    ``events`` and ``decisions`` are ``None`` when the game was run with
    recording off (bulk tournaments keep only the tallies).
    """

    kingdom: tuple[int, ...]
    seed: int
    first_player: int
    player_ids: tuple[str, str]
    game_id: int
    rng_algorithm: str
    events: tuple | None
    decisions: tuple | None
    vp: tuple[int, int]
    winner: int | None          # 0, 1, or None for a tie
    turns: tuple[int, int]
    play_counts: tuple[int, int]
    gain_counts: tuple[int, int]
    cap_hit: bool


def _agg(card_list):
    """Aggregate a card-id sequence into ((count, card), ...), first-seen order."""
    if not card_list:
        return ()
    counts: dict[int, int] = {}
    for c in card_list:
        counts[c] = counts.get(c, 0) + 1
    return tuple((n, c) for c, n in counts.items())


# --- setup ------------------------------------------------------------------


def new_game(seed, kingdom, first_player=0, *, record=True,
             turn_cap=DEFAULT_TURN_CAP, game_id=None,
             player_ids=("P1", "P2")) -> GameState:
    """Deal a fresh game: shuffled 7 Copper + 3 Estate decks, 5-card hands."""
    if first_player not in (0, 1):
        raise ValueError("first_player must be 0 or 1")
    supply_map = initial_supply(kingdom)  # validates the kingdom

    g = GameState()
    g.seed = seed
    g.kingdom = tuple(sorted(kingdom))
    g.first_player = first_player
    g.game_id = seed if game_id is None else game_id
    g.player_ids = tuple(player_ids)
    g.supply = [-1] * len(COST)
    for c, n in supply_map.items():
        g.supply[c] = n
    g.cards_in_game = tuple(sorted(supply_map))
    g.players = (PlayerZones(), PlayerZones())
    g.trash = []
    g.active_player = first_player
    g.turn_number = 1
    g.turn_counts = [0, 0]
    g.actions_left = 1
    g.buys_left = 1
    g.coins = 0
    g.phase = PHASE_ACTION
    g.merchant_pending = 0
    g.rng = GameRng(seed)
    g.turn_cap = turn_cap
    g.cap_hit = False
    g.over = False
    g.play_counts = [0, 0]
    g.gain_counts = [0, 0]
    g._events = [] if record else None
    g._decisions = [] if record else None
    g._request = None
    g._over_reported = False

    g.emit(0, EV_GAME_META_INFO, (g.game_id,))
    for p in (0, 1):
        g.emit(p + 1, EV_STARTS_WITH, (), [_COPPER] * 7)
        g.emit(p + 1, EV_STARTS_WITH, (), [CardId.Estate] * 3)
    # Deal in turn order so a seat-swapped rematch replays the same game.
    for p in (first_player, 1 - first_player):
        z = g.players[p]
        z.deck = [_COPPER] * 7 + [int(CardId.Estate)] * 3
        g.rng.shuffle(z.deck)
        _draw_to_hand(g, p, 5, log=False)

    g._gen = _game_loop(g)
    return g


# --- protocol ---------------------------------------------------------------


def step(state: GameState):
    """Advance to the next decision. Returns a DecisionRequest or GAME_OVER."""
    if state._request is not None:
        return state._request
    if state.over:
        if state._over_reported:
            raise TerminalStateError("step() called on a finished game")
        state._over_reported = True
        return GAME_OVER
    gen = state._gen
    try:
        req = gen.send(None)
        while len(req.options) == 1:
            gen.send(req.options[0])   # yields the applied marker
            req = gen.send(None)
        state._request = req
        return req
    except StopIteration:
        state.over = True
        state._over_reported = True
        return GAME_OVER


def apply_decision(state: GameState, request: DecisionRequest, choice) -> GameState:
    """Apply a policy's choice for the pending request. Mutates ``state``.

    Raises IllegalChoiceError if the choice is not in the legal option
    set; the caller is expected to abort the game rather than retry.
    """
    if request is not state._request:
        raise IllegalChoiceError("request is not the pending one for this state")
    if choice not in request.options:
        raise IllegalChoiceError(
            f"illegal {request.kind} choice {choice!r} by player "
            f"{request.player}; legal options: {request.options!r}"
        )
    state._request = None
    marker = state._gen.send(choice)
    if marker is not _APPLIED:  # pragma: no cover - engine invariant
        raise AssertionError("decision site did not acknowledge application")
    if state._decisions is not None:
        state._decisions.append(choice)
    return state


def check_end(state: GameState) -> bool:
    """Game-end test: Province pile empty, or any three piles empty."""
    supply = state.supply
    if supply[CardId.Province] == 0:
        return True
    empty = 0
    for c in state.cards_in_game:
        if supply[c] == 0:
            empty += 1
            if empty >= 3:
                return True
    return False


def score(state: GameState):
    """Final scores: ((vp0, vp1), winner) with winner 0, 1 or None (tie)."""
    if not state.over:
        raise TerminalStateError("score() requires a finished game")
    vps = []
    for p in (0, 1):
        owned = state.players[p].all_cards()
        n = len(owned)
        vps.append(sum(vp_value(c, n) for c in owned))
    if vps[0] != vps[1]:
        winner = 0 if vps[0] > vps[1] else 1
    elif state.turn_counts[0] != state.turn_counts[1]:
        winner = 0 if state.turn_counts[0] < state.turn_counts[1] else 1
    else:
        winner = None
    return tuple(vps), winner


def card_totals(state: GameState) -> dict[int, int]:
    """Per-card totals over supply, trash and every zone (conservation check)."""
    totals: dict[int, int] = {}
    for c in state.cards_in_game:
        totals[c] = state.supply[c]
    for c in state.trash:
        totals[c] = totals.get(c, 0) + 1
    for z in state.players:
        for c in z.all_cards():
            totals[c] = totals.get(c, 0) + 1
    return totals


def play_game(policy_a, policy_b, kingdom, seed, first_player=0, *,
              record=True, turn_cap=DEFAULT_TURN_CAP, game_id=None) -> GameRecord:
    """Drive a full game between two policies and return its record."""
    g = new_game(
        seed, kingdom, first_player, record=record, turn_cap=turn_cap,
        game_id=game_id,
        player_ids=(getattr(policy_a, "name", "P1"), getattr(policy_b, "name", "P2")),
    )
    sessions = (policy_a.session(), policy_b.session())
    while True:
        req = step(g)
        if req is GAME_OVER:
            break
        choice = sessions[req.player].decide(req, g)
        apply_decision(g, req, choice)
    return _finish_record(g)


def _finish_record(g: GameState) -> GameRecord:
    vp, winner = score(g)
    return GameRecord(
        kingdom=g.kingdom,
        seed=g.seed,
        first_player=g.first_player,
        player_ids=g.player_ids,
        game_id=g.game_id,
        rng_algorithm=RNG_ALGORITHM,
        events=tuple(g._events) if g._events is not None else None,
        decisions=tuple(g._decisions) if g._decisions is not None else None,
        vp=vp,
        winner=winner,
        turns=tuple(g.turn_counts),
        play_counts=tuple(g.play_counts),
        gain_counts=tuple(g.gain_counts),
        cap_hit=g.cap_hit,
    )


def replay_record(record: GameRecord) -> GameRecord:
    """Re-run a recorded game from its stored decision sequence."""
    if record.decisions is None:
        raise ValueError("record was produced with recording off")
    g = new_game(
        record.seed, record.kingdom, record.first_player,
        record=True, game_id=record.game_id, player_ids=record.player_ids,
    )
    it = iter(record.decisions)
    while True:
        req = step(g)
        if req is GAME_OVER:
            break
        apply_decision(g, req, next(it))
    return _finish_record(g)


# --- internals --------------------------------------------------------------


def _draw_to_hand(g: GameState, p: int, n: int, log=True):
    """Draw up to n cards, reshuffling the discard when the deck empties."""
    z = g.players[p]
    deck, hand = z.deck, z.hand
    drawn: list[int] = []
    batch: list[int] = []
    for _ in range(n):
        if not deck:
            if not z.discard:
                break
            if batch and log:
                g.emit(p + 1, EV_DRAW, (), batch)
            batch = []
            g.rng.shuffle(z.discard)
            deck.extend(z.discard)
            z.discard.clear()
            if log:
                g.emit(p + 1, EV_SHUFFLES)
        c = deck.pop()
        hand.append(c)
        drawn.append(c)
        batch.append(c)
    if batch and log:
        g.emit(p + 1, EV_DRAW, (), batch)
    return drawn


def _take_top(g: GameState, p: int, n: int) -> list[int]:
    """Move up to n cards off the top of the deck into set_aside."""
    z = g.players[p]
    taken: list[int] = []
    for _ in range(n):
        if not z.deck:
            if not z.discard:
                break
            g.rng.shuffle(z.discard)
            z.deck.extend(z.discard)
            z.discard.clear()
            g.emit(p + 1, EV_SHUFFLES)
        taken.append(z.deck.pop())
    z.set_aside.extend(taken)
    return taken


def _gain(g: GameState, p: int, card: int, to="discard", event=EV_GAIN):
    g.supply[card] -= 1
    z = g.players[p]
    if to == "discard":
        z.discard.append(card)
    elif to == "hand":
        z.hand.append(card)
    else:
        z.deck.append(card)
    g.gain_counts[p] += 1
    g.emit(p + 1, event, (), [card])


def _distinct(cards) -> tuple[int, ...]:
    return tuple(sorted(set(cards)))


def _game_loop(g: GameState):
    """Turn-structure generator; yields DecisionRequests, then _APPLIED."""
    while True:
        p = g.active_player
        z = g.players[p]
        g.turn_counts[p] += 1
        g.turn_number = g.turn_counts[0] + g.turn_counts[1]
        g.actions_left = 1
        g.buys_left = 1
        g.coins = 0
        g.merchant_pending = 0
        g.phase = PHASE_ACTION
        g.emit(p + 1, EV_NEW_TURN, (g.turn_counts[p], 0))

        # Action phase.
        while g.actions_left > 0:
            actions = _distinct(c for c in z.hand if IS_ACTION[c])
            if not actions:
                break
            choice = yield DecisionRequest(CHOOSE_ACTION, p, actions + (DECLINE,))
            if choice != DECLINE:
                g.actions_left -= 1
                z.hand.remove(choice)
                z.in_play.append(choice)
                g.play_counts[p] += 1
                g.emit(p + 1, EV_PLAY, (), [choice])
            yield _APPLIED
            if choice == DECLINE:
                break
            yield from _resolve(g, p, choice)

        # Treasure step: all treasures in hand are played as one batch.
        g.phase = PHASE_BUY
        treasures = [c for c in z.hand if IS_TREASURE[c]]
        if treasures:
            for c in treasures:
                z.hand.remove(c)
                z.in_play.append(c)
            value = sum(COIN_VALUE[c] for c in treasures)
            g.emit(p + 1, EV_PLAY_TREASURES_FOR, (value,), treasures)
            g.coins += value
            if g.merchant_pending and _SILVER in treasures:
                g.emit(p + 1, EV_GETS_COIN, (g.merchant_pending,))
                g.coins += g.merchant_pending
        g.merchant_pending = 0

        # Buy phase.
        while g.buys_left > 0:
            coins = g.coins
            affordable = tuple(
                c for c in g.cards_in_game
                if g.supply[c] > 0 and COST[c] <= coins
            )
            if not affordable:
                break
            choice = yield DecisionRequest(CHOOSE_BUY, p, affordable + (DECLINE,))
            if choice != DECLINE:
                g.buys_left -= 1
                g.coins -= COST[choice]
                _gain(g, p, choice, event=EV_BUY_AND_GAIN)
            yield _APPLIED
            if choice == DECLINE:
                break

        # Cleanup.
        g.phase = PHASE_CLEANUP
        z.discard.extend(z.in_play)
        z.in_play.clear()
        z.discard.extend(z.hand)
        z.hand.clear()
        _draw_to_hand(g, p, 5)
        if check_end(g):
            return
        if g.turn_counts[0] >= g.turn_cap and g.turn_counts[1] >= g.turn_cap:
            g.cap_hit = True
            return
        g.active_player = 1 - p


def _resolve(g: GameState, p: int, card: int):
    """Resolve one played card's effect atoms, in printed order."""
    for op, arg in _EFFECTS[card]:
        if op == "+cards":
            _draw_to_hand(g, p, arg)
        elif op == "+actions":
            g.actions_left += arg
            g.emit(p + 1, EV_GETS_ACTION, (arg,))
        elif op == "+coins":
            g.coins += arg
            g.emit(p + 1, EV_GETS_COIN, (arg,))
        elif op == "+buys":
            g.buys_left += arg
            g.emit(p + 1, EV_GETS_BUY, (arg,))
        elif op == "attack":
            yield from _attack(g, p, arg)
        elif op == "decide":
            if arg == "merchant":
                g.merchant_pending += 1
            elif arg == "bandit-gold":
                if g.supply[_GOLD] > 0:
                    _gain(g, p, _GOLD)
            elif arg == "bureaucrat-silver":
                if g.supply[_SILVER] > 0:
                    _gain(g, p, _SILVER, to="deck")
                    g.emit(p + 1, EV_TOPDECK, (), [_SILVER])
            elif arg == "council-room":
                _draw_to_hand(g, 1 - p, 1)
            else:
                yield from _DECIDERS[arg](g, p)


def _attack(g: GameState, p: int, kind: str):
    """Resolve an attack against the opponent, honoring a held Moat."""
    o = 1 - p
    oz = g.players[o]
    if _MOAT in oz.hand:
        choice = yield DecisionRequest(
            REVEAL_REACTION, o, (REVEAL, DECLINE), source=_MOAT,
            data={"attack": kind},
        )
        yield _APPLIED
        if choice == REVEAL:
            g.emit(o + 1, EV_REVEAL, (), [_MOAT])
            return

    if kind == "witch":
        if g.supply[_CURSE] > 0:
            _gain(g, o, _CURSE)
    elif kind == "militia":
        discarded: list[int] = []
        while len(oz.hand) > 3:
            opts = _distinct(oz.hand)
            choice = yield DecisionRequest(
                DISCARD_TO_HAND_SIZE, o, opts, source=CardId.Militia,
                data={"hand_size": 3},
            )
            oz.hand.remove(choice)
            oz.discard.append(choice)
            discarded.append(choice)
            yield _APPLIED
        if discarded:
            g.emit(o + 1, EV_DISCARD, (), discarded)
    elif kind == "bureaucrat":
        victories = _distinct(c for c in oz.hand if IS_VICTORY[c])
        if not victories:
            g.emit(o + 1, EV_REVEAL, (), list(oz.hand))
        else:
            choice = yield DecisionRequest(
                BUREAUCRAT_TOPDECK_VICTORY, o, victories, source=CardId.Bureaucrat,
            )
            oz.hand.remove(choice)
            oz.deck.append(choice)
            yield _APPLIED
            g.emit(o + 1, EV_REVEAL, (), [choice])
            g.emit(o + 1, EV_TOPDECK, (), [choice])
    elif kind == "bandit":
        revealed = _take_top(g, o, 2)
        if revealed:
            g.emit(o + 1, EV_REVEAL, (), revealed)
            trashable = [c for c in revealed if IS_TREASURE[c] and c != _COPPER]
            to_trash = None
            if len(set(trashable)) > 1:
                choice = yield DecisionRequest(
                    BANDIT_VICTIM_TRASH, o, _distinct(trashable),
                    source=CardId.Bandit,
                )
                to_trash = choice
                yield _APPLIED
            elif trashable:
                to_trash = trashable[0]
            rest = list(revealed)
            if to_trash is not None:
                rest.remove(to_trash)
                oz.set_aside.remove(to_trash)
                g.trash.append(to_trash)
                g.emit(o + 1, EV_TRASH, (), [to_trash])
            for c in rest:
                oz.set_aside.remove(c)
                oz.discard.append(c)
            if rest:
                g.emit(o + 1, EV_DISCARD, (), rest)


# --- per-card decision handlers ---------------------------------------------


def _cellar(g: GameState, p: int):
    z = g.players[p]
    chosen: list[int] = []
    while z.hand:
        opts = _distinct(z.hand) + (STOP,)
        choice = yield DecisionRequest(
            DISCARD_ANY_NUMBER, p, opts, source=CardId.Cellar,
        )
        if choice != STOP:
            z.hand.remove(choice)
            z.discard.append(choice)
            chosen.append(choice)
        yield _APPLIED
        if choice == STOP:
            break
    if chosen:
        g.emit(p + 1, EV_DISCARD, (), chosen)
        _draw_to_hand(g, p, len(chosen))


def _chapel(g: GameState, p: int):
    z = g.players[p]
    trashed: list[int] = []
    while len(trashed) < 4 and z.hand:
        opts = _distinct(z.hand) + (STOP,)
        choice = yield DecisionRequest(
            TRASH_UP_TO_N, p, opts, source=CardId.Chapel,
            data={"limit": 4, "taken": len(trashed)},
        )
        if choice != STOP:
            z.hand.remove(choice)
            g.trash.append(choice)
            trashed.append(choice)
        yield _APPLIED
        if choice == STOP:
            break
    if trashed:
        g.emit(p + 1, EV_TRASH, (), trashed)


def _harbinger(g: GameState, p: int):
    z = g.players[p]
    if not z.discard:
        return
    g.emit(p + 1, EV_LOOK_AT, (), list(z.discard))
    opts = _distinct(z.discard) + (DECLINE,)
    choice = yield DecisionRequest(
        TOPDECK_FROM_DISCARD, p, opts, source=CardId.Harbinger,
    )
    if choice != DECLINE:
        z.discard.remove(choice)
        z.deck.append(choice)
        g.emit(p + 1, EV_TOPDECK, (), [choice])
    yield _APPLIED


def _vassal(g: GameState, p: int):
    z = g.players[p]
    top = _take_top(g, p, 1)
    if not top:
        return
    card = top[0]
    z.set_aside.remove(card)
    z.discard.append(card)
    g.emit(p + 1, EV_DISCARD, (), [card])
    if not IS_ACTION[card]:
        return
    choice = yield DecisionRequest(
        VASSAL_PLAY_OR_DISCARD, p, (PLAY_IT, DECLINE), source=CardId.Vassal,
        data={"card": card},
    )
    if choice == PLAY_IT:
        z.discard.remove(card)
        z.in_play.append(card)
        g.play_counts[p] += 1
        g.emit(p + 1, EV_PLAY, (), [card])
    yield _APPLIED
    if choice == PLAY_IT:
        yield from _resolve(g, p, card)


def _workshop(g: GameState, p: int):
    opts = tuple(
        c for c in g.cards_in_game if g.supply[c] > 0 and COST[c] <= 4
    )
    if not opts:
        return
    choice = yield DecisionRequest(
        GAIN_UP_TO_COST, p, opts, source=CardId.Workshop, data={"limit": 4},
    )
    _gain(g, p, choice)
    yield _APPLIED


def _moneylender(g: GameState, p: int):
    z = g.players[p]
    if _COPPER not in z.hand:
        return
    choice = yield DecisionRequest(
        TRASH_UP_TO_N, p, (_COPPER, DECLINE), source=CardId.Moneylender,
    )
    if choice != DECLINE:
        z.hand.remove(_COPPER)
        g.trash.append(_COPPER)
        g.emit(p + 1, EV_TRASH, (), [_COPPER])
        g.coins += 3
        g.emit(p + 1, EV_GETS_COIN, (3,))
    yield _APPLIED


def _poacher(g: GameState, p: int):
    z = g.players[p]
    empties = sum(1 for c in g.cards_in_game if g.supply[c] == 0)
    discarded: list[int] = []
    for _ in range(empties):
        if not z.hand:
            break
        opts = _distinct(z.hand)
        choice = yield DecisionRequest(
            DISCARD_TO_HAND_SIZE, p, opts, source=CardId.Poacher,
            data={"count": empties},
        )
        z.hand.remove(choice)
        z.discard.append(choice)
        discarded.append(choice)
        yield _APPLIED
    if discarded:
        g.emit(p + 1, EV_DISCARD, (), discarded)


def _remodel(g: GameState, p: int):
    z = g.players[p]
    if not z.hand:
        return
    choice = yield DecisionRequest(
        TRASH_UP_TO_N, p, _distinct(z.hand), source=CardId.Remodel,
        data={"mandatory": True},
    )
    z.hand.remove(choice)
    g.trash.append(choice)
    g.emit(p + 1, EV_TRASH, (), [choice])
    yield _APPLIED
    limit = COST[choice] + 2
    opts = tuple(
        c for c in g.cards_in_game if g.supply[c] > 0 and COST[c] <= limit
    )
    if not opts:
        return
    gained = yield DecisionRequest(
        GAIN_UP_TO_COST, p, opts, source=CardId.Remodel, data={"limit": limit},
    )
    _gain(g, p, gained)
    yield _APPLIED


def _throne_room(g: GameState, p: int):
    z = g.players[p]
    actions = _distinct(c for c in z.hand if IS_ACTION[c])
    if not actions:
        return
    choice = yield DecisionRequest(
        CHOOSE_THRONE_TARGET, p, actions + (DECLINE,), source=CardId.ThroneRoom,
    )
    if choice != DECLINE:
        z.hand.remove(choice)
        z.in_play.append(choice)
        g.play_counts[p] += 1
        g.emit(p + 1, EV_PLAY, (), [choice])
    yield _APPLIED
    if choice != DECLINE:
        yield from _resolve(g, p, choice)
        yield from _resolve(g, p, choice)


def _library(g: GameState, p: int):
    z = g.players[p]
    set_asides: list[int] = []
    while len(z.hand) < 7:
        top = _take_top(g, p, 1)
        if not top:
            break
        card = top[0]
        if IS_ACTION[card]:
            choice = yield DecisionRequest(
                LIBRARY_KEEP_OR_SET_ASIDE, p, (KEEP, SET_ASIDE),
                source=CardId.Library, data={"card": card},
            )
            if choice == SET_ASIDE:
                set_asides.append(card)
                g.emit(p + 1, EV_LOOK_AT, (), [card])
            else:
                z.set_aside.remove(card)
                z.hand.append(card)
                g.emit(p + 1, EV_DRAW, (), [card])
            yield _APPLIED
        else:
            z.set_aside.remove(card)
            z.hand.append(card)
            g.emit(p + 1, EV_DRAW, (), [card])
    for c in set_asides:
        z.set_aside.remove(c)
        z.discard.append(c)
    if set_asides:
        g.emit(p + 1, EV_DISCARD, (), set_asides)


def _mine(g: GameState, p: int):
    z = g.players[p]
    held = _distinct(c for c in z.hand if IS_TREASURE[c])
    options: list = []
    for t in held:
        gains = tuple(
            c for c in g.cards_in_game
            if IS_TREASURE[c] and g.supply[c] > 0 and COST[c] <= COST[t] + 3
        )
        if gains:
            options.extend((t, c) for c in gains)
        else:
            options.append((t, None))
    if not options:
        return
    choice = yield DecisionRequest(
        MINE_TRASH_AND_GAIN, p, tuple(options) + (DECLINE,), source=CardId.Mine,
    )
    if choice != DECLINE:
        t, c = choice
        z.hand.remove(t)
        g.trash.append(t)
        g.emit(p + 1, EV_TRASH, (), [t])
        if c is not None:
            _gain(g, p, c, to="hand")
    yield _APPLIED


def _sentry(g: GameState, p: int):
    z = g.players[p]
    looked = _take_top(g, p, 2)
    if not looked:
        return
    g.emit(p + 1, EV_LOOK_AT, (), looked)
    dispositions = (TRASH_CHOICE, DISCARD_CHOICE, KEEP)
    if len(looked) == 1:
        opts = tuple((d,) for d in dispositions)
    else:
        opts_list = []
        for d0 in dispositions:
            for d1 in dispositions:
                if d0 == KEEP and d1 == KEEP:
                    opts_list.append((d0, d1, 0))
                    opts_list.append((d0, d1, 1))
                else:
                    opts_list.append((d0, d1))
        opts = tuple(opts_list)
    choice = yield DecisionRequest(
        SENTRY_DISPOSITION, p, opts, source=CardId.Sentry,
        data={"cards": tuple(looked)},
    )
    kept: list[int] = []
    trashed: list[int] = []
    discarded: list[int] = []
    for card, d in zip(looked, choice):
        z.set_aside.remove(card)
        if d == TRASH_CHOICE:
            g.trash.append(card)
            trashed.append(card)
        elif d == DISCARD_CHOICE:
            z.discard.append(card)
            discarded.append(card)
        else:
            kept.append(card)
    if len(kept) == 2 and choice[2] == 1:
        kept.reverse()
    # kept[0] ends on top; deck top is the list end.
    for card in reversed(kept):
        z.deck.append(card)
    if trashed:
        g.emit(p + 1, EV_TRASH, (), trashed)
    if discarded:
        g.emit(p + 1, EV_DISCARD, (), discarded)
    if kept:
        g.emit(p + 1, EV_TOPDECK, (), kept)
    yield _APPLIED


def _artisan(g: GameState, p: int):
    z = g.players[p]
    opts = tuple(
        c for c in g.cards_in_game if g.supply[c] > 0 and COST[c] <= 5
    )
    gained = None
    if opts:
        choice = yield DecisionRequest(
            ARTISAN_GAIN_AND_TOPDECK, p, opts, source=CardId.Artisan,
            data={"stage": "gain"},
        )
        _gain(g, p, choice, to="hand")
        gained = choice
        yield _APPLIED
    if z.hand:
        choice = yield DecisionRequest(
            ARTISAN_GAIN_AND_TOPDECK, p, _distinct(z.hand), source=CardId.Artisan,
            data={"stage": "topdeck", "gained": gained},
        )
        z.hand.remove(choice)
        z.deck.append(choice)
        g.emit(p + 1, EV_TOPDECK, (), [choice])
        yield _APPLIED


_DECIDERS = {
    "cellar": _cellar,
    "chapel": _chapel,
    "harbinger": _harbinger,
    "vassal": _vassal,
    "workshop": _workshop,
    "moneylender": _moneylender,
    "poacher": _poacher,
    "remodel": _remodel,
    "throne-room": _throne_room,
    "library": _library,
    "mine": _mine,
    "sentry": _sentry,
    "artisan": _artisan,
}
