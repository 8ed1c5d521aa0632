"""Heuristic policies: buy menus, victory-card thresholds, play-phase rules.

A buy menu is an ordered list of (card, count) tuples; the bot buys the
leftmost affordable in-stock entry with a live count, skipping
zero-count entries. A victory rule is layered on top: Province whenever
affordable, Duchy/Estate once the Province pile is low. The play-phase
heuristics are one fixed rule table shared by every agent in the
package, including the learned buyer.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .cards import (
    CardId,
    CARD_NAMES,
    COST,
    IS_ACTION,
    IS_TREASURE,
    IS_VICTORY,
)
from .engine import DECLINE, STOP, KEEP, SET_ASIDE, PLAY_IT, REVEAL, DecisionRequest
from .rng import GameRng, derive_seed


@dataclass(frozen=True)
class VictoryRule:
    """Thresholds compare against Provinces remaining in the supply."""

    province_always: bool = True
    duchy_threshold: int = 4
    estate_threshold: int = 2


@dataclass(frozen=True)
class BuyMenu:
    entries: tuple[tuple[CardId, int], ...]

    def text(self) -> str:
        return ", ".join(f"({CARD_NAMES[c]}, {n})" for c, n in self.entries)


def buy_menu_choose(menu_state, coins, supply, victory, provinces_left):
    """Pick a buy: victory overlay first, then the leftmost live menu entry.

    ``menu_state`` is a mutable list of [card, count] pairs; the chosen
    entry's count is decremented in place. Returns a CardId or DECLINE.
    """
    if (victory.province_always and provinces_left > 0
            and coins >= COST[CardId.Province]):
        return CardId.Province
    if (provinces_left <= victory.duchy_threshold
            and supply[CardId.Duchy] > 0 and coins >= COST[CardId.Duchy]):
        return CardId.Duchy
    if (provinces_left <= victory.estate_threshold
            and supply[CardId.Estate] > 0 and coins >= COST[CardId.Estate]):
        return CardId.Estate
    for entry in menu_state:
        card, count = entry
        if count > 0 and supply[card] > 0 and COST[card] <= coins:
            entry[1] = count - 1
            return card
    return DECLINE


# Action play order: +action cards first so action points are never
# stranded, then terminal draw, then attacks, then the rest by cost.
_CANTRIPS = (
    CardId.Village, CardId.Market, CardId.Festival, CardId.Laboratory,
    CardId.Merchant, CardId.Poacher, CardId.Harbinger, CardId.Cellar,
)
_TERMINAL_DRAW = (CardId.CouncilRoom, CardId.Smithy)
_ATTACKS = (CardId.Witch, CardId.Militia, CardId.Bandit, CardId.Bureaucrat)
_REMAINING = tuple(sorted(
    (c for c in CardId
     if IS_ACTION[c] and c not in _CANTRIPS + _TERMINAL_DRAW + _ATTACKS),
    key=lambda c: (-COST[c], int(c)),
))
ACTION_PRIORITY: tuple[CardId, ...] = _CANTRIPS + _TERMINAL_DRAW + _ATTACKS + _REMAINING

_JUNK = (CardId.Curse, CardId.Estate, CardId.Copper)


def _owned_treasures(state, player) -> int:
    return sum(1 for c in state.players[player].all_cards() if IS_TREASURE[c])


def _cheapest(options):
    return min(options, key=lambda c: (COST[c], int(c)))


def _gain_choice(options, menu_cards, provinces_left):
    """Shared gain preference for Workshop / Remodel / Artisan."""
    opts = set(options)
    if CardId.Province in opts:
        return CardId.Province
    if menu_cards:
        for c in menu_cards:
            if c in opts:
                return c
    actions = [c for c in opts if IS_ACTION[c]]
    if actions:
        return max(actions, key=lambda c: (COST[c], -int(c)))
    plain = [c for c in opts if not IS_VICTORY[c] and c != CardId.Curse]
    if plain:
        return max(plain, key=lambda c: (COST[c], -int(c)))
    non_curse = [c for c in opts if c != CardId.Curse]
    if non_curse:
        return max(non_curse, key=lambda c: (COST[c], -int(c)))
    return _cheapest(opts)


def _discard_choice(options):
    junk = [c for c in options if IS_VICTORY[c] or c == CardId.Curse]
    if junk:
        return _cheapest(junk)
    return _cheapest(options)


def default_decision(request: DecisionRequest, state, menu_cards=None,
                     victory: VictoryRule = VictoryRule()):
    """The fixed play-phase rule table. Always returns a legal option."""
    kind = request.kind
    options = request.options

    if kind == engine.CHOOSE_ACTION:
        in_hand = set(options)
        for c in ACTION_PRIORITY:
            if c in in_hand:
                return c
        return DECLINE

    if kind == engine.CHOOSE_BUY:
        # Fallback buyer (menu policies override): treasure-greedy.
        supply = state.supply
        choice = buy_menu_choose(
            [[CardId.Gold, 99], [CardId.Silver, 99]],
            state.coins, supply, victory, supply[CardId.Province],
        )
        return choice

    if kind == engine.DISCARD_TO_HAND_SIZE:
        return _discard_choice(options)

    if kind == engine.DISCARD_ANY_NUMBER:  # Cellar
        junk = [c for c in options if c != STOP
                and (IS_VICTORY[c] or c == CardId.Curse)]
        return _cheapest(junk) if junk else STOP

    if kind == engine.TRASH_UP_TO_N:
        src = request.source
        if src == CardId.Moneylender:
            return CardId.Copper
        if src == CardId.Remodel:
            for c in (CardId.Estate, CardId.Curse, CardId.Copper):
                if c in options:
                    return c
            return _cheapest(options)
        # Chapel
        if CardId.Curse in options:
            return CardId.Curse
        if (CardId.Estate in options
                and state.supply[CardId.Province] > 4):
            return CardId.Estate
        if (CardId.Copper in options
                and _owned_treasures(state, request.player) > 3):
            return CardId.Copper
        return STOP

    if kind == engine.GAIN_UP_TO_COST:
        return _gain_choice(options, menu_cards, state.supply[CardId.Province])

    if kind == engine.TOPDECK_FROM_DISCARD:  # Harbinger
        useful = [c for c in options if c != DECLINE
                  and (IS_ACTION[c] or IS_TREASURE[c])]
        if useful:
            best = max(useful, key=lambda c: (COST[c], -int(c)))
            if COST[best] >= 4:
                return best
        return DECLINE

    if kind == engine.REVEAL_REACTION:
        return REVEAL

    if kind == engine.CHOOSE_THRONE_TARGET:
        actions = [c for c in options if c != DECLINE]
        return max(actions, key=lambda c: (COST[c], -int(c)))

    if kind == engine.VASSAL_PLAY_OR_DISCARD:
        return PLAY_IT

    if kind == engine.SENTRY_DISPOSITION:
        looked = request.data["cards"]
        parts = tuple(
            engine.TRASH_CHOICE if c in _JUNK else KEEP for c in looked
        )
        if len(parts) == 2 and parts == (KEEP, KEEP):
            return (KEEP, KEEP, 0)
        return parts

    if kind == engine.LIBRARY_KEEP_OR_SET_ASIDE:
        return SET_ASIDE if state.actions_left == 0 else KEEP

    if kind == engine.MINE_TRASH_AND_GAIN:
        if (CardId.Silver, CardId.Gold) in options:
            return (CardId.Silver, CardId.Gold)
        if (CardId.Copper, CardId.Silver) in options:
            return (CardId.Copper, CardId.Silver)
        return DECLINE

    if kind == engine.ARTISAN_GAIN_AND_TOPDECK:
        if request.data["stage"] == "gain":
            limited = [c for c in options if COST[c] <= 5]
            return _gain_choice(limited or options, menu_cards,
                                state.supply[CardId.Province])
        victories = [c for c in options if IS_VICTORY[c]]
        if victories:
            return _cheapest(victories)
        gained = request.data.get("gained")
        if gained is not None and gained in options:
            return gained
        return _cheapest(options)

    if kind == engine.BUREAUCRAT_TOPDECK_VICTORY:
        return _cheapest(options)

    if kind == engine.BANDIT_VICTIM_TRASH:
        if CardId.Silver in options:
            return CardId.Silver
        return options[0]

    raise ValueError(f"unhandled decision kind: {kind}")


class Policy:
    """Base policy. Stateless policies may share one session across games."""

    name = "policy"

    def session(self):
        return self

    def decide(self, request: DecisionRequest, state):
        raise NotImplementedError


class MenuPolicy(Policy):
    """Buy-menu agent: menu + victory overlay + the default rule table."""

    def __init__(self, name, menu, victory: VictoryRule | None = None):
        self.name = name
        self.menu = BuyMenu(tuple((CardId(c), int(n)) for c, n in menu))
        self.victory = victory if victory is not None else VictoryRule()
        self._menu_cards = tuple(c for c, _ in self.menu.entries)

    def session(self):
        return _MenuSession(self)

    def decide(self, request, state):  # pragma: no cover - sessions decide
        return _MenuSession(self).decide(request, state)

    def __repr__(self):
        return f"MenuPolicy({self.name!r}, {self.menu.text()})"


class _MenuSession:
    __slots__ = ("policy", "live")

    def __init__(self, policy: MenuPolicy):
        self.policy = policy
        self.live = [[c, n] for c, n in policy.menu.entries]

    def decide(self, request, state):
        if request.kind == engine.CHOOSE_BUY:
            return buy_menu_choose(
                self.live, state.coins, state.supply, self.policy.victory,
                state.supply[CardId.Province],
            )
        return default_decision(
            request, state,
            menu_cards=self.policy._menu_cards, victory=self.policy.victory,
        )


class RandomPolicy(Policy):
    """Uniform-legal policy for fuzzing; deterministic per (seed, game)."""

    def __init__(self, seed=0, name="random"):
        self.seed = seed
        self.name = name
        self._rng = GameRng(seed)

    def session(self):
        return RandomPolicy(derive_seed(self.seed, self._bump()), self.name)

    def _bump(self):
        return self._rng.next_u64()

    def decide(self, request, state):
        return self._rng.choice(request.options)


PRESET_MENUS: dict[str, tuple[tuple[CardId, int], ...]] = {
    "big-money": (
        (CardId.Gold, 99), (CardId.Silver, 99),
    ),
    "double-witch": (
        (CardId.Witch, 1), (CardId.Gold, 99), (CardId.Witch, 1),
        (CardId.Silver, 99),
    ),
    "big-smithy": (
        (CardId.Gold, 99), (CardId.Smithy, 1), (CardId.Silver, 99),
    ),
    "big-militia": (
        (CardId.Gold, 99), (CardId.Militia, 1), (CardId.Silver, 99),
    ),
    "village-smithy-engine": (
        (CardId.Gold, 99), (CardId.Smithy, 5), (CardId.Militia, 1),
        (CardId.Village, 5), (CardId.Silver, 99),
    ),
    "provincial-preset": (
        (CardId.Witch, 1), (CardId.Gold, 99), (CardId.Militia, 1),
        (CardId.Witch, 1), (CardId.Market, 3), (CardId.Silver, 99),
    ),
}

PRESET_NAMES = tuple(PRESET_MENUS)

# A kingdom that stocks every pile the preset menus reference, padded
# with staple piles; the standard benchmarking card set here.
BENCHMARK_KINGDOM: tuple[CardId, ...] = tuple(sorted((
    CardId.Witch, CardId.Smithy, CardId.Militia, CardId.Village,
    CardId.Market, CardId.Laboratory, CardId.Festival, CardId.CouncilRoom,
    CardId.Moat, CardId.Chapel,
)))


def preset(name: str) -> MenuPolicy:
    """One of the named baseline agents."""
    try:
        menu = PRESET_MENUS[name]
    except KeyError:
        known = ", ".join(sorted(PRESET_MENUS))
        raise ValueError(f"unknown preset {name!r}; known presets: {known}") from None
    return MenuPolicy(name, menu)
