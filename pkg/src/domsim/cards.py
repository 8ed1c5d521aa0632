"""Card catalog for the 2nd-edition base set: 7 basic cards + 26 kingdom cards.

Costs, types, point values, and effect programs follow the official 2E
card text. Effects are ordered atom sequences; the simple ``+X`` atoms
are interpreted generically, while ``attack``/``decide`` atoms name a
card-specific resolution routine in the engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .rng import GameRng

# Effect atom ops.
PLUS_CARDS = "+cards"
PLUS_ACTIONS = "+actions"
PLUS_BUYS = "+buys"
PLUS_COINS = "+coins"
ATTACK = "attack"
DECIDE = "decide"
VP_RULE = "vp-rule"

ACTION = "action"
TREASURE = "treasure"
VICTORY = "victory"
CURSE_TYPE = "curse"
ATTACK_TYPE = "attack"
REACTION = "reaction"


class CardId(IntEnum):
    Copper = 0
    Silver = 1
    Gold = 2
    Estate = 3
    Duchy = 4
    Province = 5
    Curse = 6
    Artisan = 7
    Bandit = 8
    Bureaucrat = 9
    Cellar = 10
    Chapel = 11
    CouncilRoom = 12
    Festival = 13
    Gardens = 14
    Harbinger = 15
    Laboratory = 16
    Library = 17
    Market = 18
    Merchant = 19
    Militia = 20
    Mine = 21
    Moat = 22
    Moneylender = 23
    Poacher = 24
    Remodel = 25
    Sentry = 26
    Smithy = 27
    ThroneRoom = 28
    Vassal = 29
    Village = 30
    Witch = 31
    Workshop = 32


# Display names (log spelling; two-word names are not valid enum members).
CARD_NAMES: dict[CardId, str] = {
    c: c.name for c in CardId
}
CARD_NAMES[CardId.CouncilRoom] = "Council Room"
CARD_NAMES[CardId.ThroneRoom] = "Throne Room"

NAME_TO_CARD: dict[str, CardId] = {name: c for c, name in CARD_NAMES.items()}

BASIC_CARDS: tuple[CardId, ...] = (
    CardId.Copper, CardId.Silver, CardId.Gold,
    CardId.Estate, CardId.Duchy, CardId.Province, CardId.Curse,
)
KINGDOM_CARDS: tuple[CardId, ...] = tuple(
    c for c in CardId if c not in BASIC_CARDS
)


@dataclass(frozen=True)
class CardSpec:
    id: CardId
    name: str
    cost: int
    types: frozenset[str]
    effect: tuple[tuple[str, int | str], ...] = ()
    vp: int = 0          # static victory points (Gardens handled by vp_value)
    coins: int = 0       # treasure value when played


def _spec(card, cost, types, effect=(), vp=0, coins=0):
    return CardSpec(card, CARD_NAMES[card], cost, frozenset(types), tuple(effect), vp, coins)


_SPECS: tuple[CardSpec, ...] = (
    _spec(CardId.Copper, 0, {TREASURE}, coins=1),
    _spec(CardId.Silver, 3, {TREASURE}, coins=2),
    _spec(CardId.Gold, 6, {TREASURE}, coins=3),
    _spec(CardId.Estate, 2, {VICTORY}, vp=1),
    _spec(CardId.Duchy, 5, {VICTORY}, vp=3),
    _spec(CardId.Province, 8, {VICTORY}, vp=6),
    _spec(CardId.Curse, 0, {CURSE_TYPE}, vp=-1),
    _spec(CardId.Artisan, 6, {ACTION}, [(DECIDE, "artisan")]),
    _spec(CardId.Bandit, 5, {ACTION, ATTACK_TYPE},
          [(DECIDE, "bandit-gold"), (ATTACK, "bandit")]),
    _spec(CardId.Bureaucrat, 4, {ACTION, ATTACK_TYPE},
          [(DECIDE, "bureaucrat-silver"), (ATTACK, "bureaucrat")]),
    _spec(CardId.Cellar, 2, {ACTION}, [(PLUS_ACTIONS, 1), (DECIDE, "cellar")]),
    _spec(CardId.Chapel, 2, {ACTION}, [(DECIDE, "chapel")]),
    _spec(CardId.CouncilRoom, 5, {ACTION},
          [(PLUS_CARDS, 4), (PLUS_BUYS, 1), (DECIDE, "council-room")]),
    _spec(CardId.Festival, 5, {ACTION},
          [(PLUS_ACTIONS, 2), (PLUS_BUYS, 1), (PLUS_COINS, 2)]),
    _spec(CardId.Gardens, 4, {VICTORY}, [(VP_RULE, "per-10-cards")]),
    _spec(CardId.Harbinger, 3, {ACTION},
          [(PLUS_CARDS, 1), (PLUS_ACTIONS, 1), (DECIDE, "harbinger")]),
    _spec(CardId.Laboratory, 5, {ACTION}, [(PLUS_CARDS, 2), (PLUS_ACTIONS, 1)]),
    _spec(CardId.Library, 5, {ACTION}, [(DECIDE, "library")]),
    _spec(CardId.Market, 5, {ACTION},
          [(PLUS_CARDS, 1), (PLUS_ACTIONS, 1), (PLUS_BUYS, 1), (PLUS_COINS, 1)]),
    _spec(CardId.Merchant, 3, {ACTION},
          [(PLUS_CARDS, 1), (PLUS_ACTIONS, 1), (DECIDE, "merchant")]),
    _spec(CardId.Militia, 4, {ACTION, ATTACK_TYPE},
          [(PLUS_COINS, 2), (ATTACK, "militia")]),
    _spec(CardId.Mine, 5, {ACTION}, [(DECIDE, "mine")]),
    _spec(CardId.Moat, 2, {ACTION, REACTION}, [(PLUS_CARDS, 2)]),
    _spec(CardId.Moneylender, 4, {ACTION}, [(DECIDE, "moneylender")]),
    _spec(CardId.Poacher, 4, {ACTION},
          [(PLUS_CARDS, 1), (PLUS_ACTIONS, 1), (PLUS_COINS, 1), (DECIDE, "poacher")]),
    _spec(CardId.Remodel, 4, {ACTION}, [(DECIDE, "remodel")]),
    _spec(CardId.Sentry, 5, {ACTION},
          [(PLUS_CARDS, 1), (PLUS_ACTIONS, 1), (DECIDE, "sentry")]),
    _spec(CardId.Smithy, 4, {ACTION}, [(PLUS_CARDS, 3)]),
    _spec(CardId.ThroneRoom, 4, {ACTION}, [(DECIDE, "throne-room")]),
    _spec(CardId.Vassal, 3, {ACTION}, [(PLUS_COINS, 2), (DECIDE, "vassal")]),
    _spec(CardId.Village, 3, {ACTION}, [(PLUS_CARDS, 1), (PLUS_ACTIONS, 2)]),
    _spec(CardId.Witch, 5, {ACTION, ATTACK_TYPE},
          [(PLUS_CARDS, 2), (ATTACK, "witch")]),
    _spec(CardId.Workshop, 3, {ACTION}, [(DECIDE, "workshop")]),
)

_BY_ID: dict[CardId, CardSpec] = {s.id: s for s in _SPECS}

# Flat lookup tables indexed by int(CardId); the engine hot path uses these
# instead of CardSpec attribute access.
COST: tuple[int, ...] = tuple(s.cost for s in sorted(_SPECS, key=lambda s: s.id))
COIN_VALUE: tuple[int, ...] = tuple(s.coins for s in sorted(_SPECS, key=lambda s: s.id))
STATIC_VP: tuple[int, ...] = tuple(s.vp for s in sorted(_SPECS, key=lambda s: s.id))
IS_ACTION: tuple[bool, ...] = tuple(ACTION in s.types for s in sorted(_SPECS, key=lambda s: s.id))
IS_TREASURE: tuple[bool, ...] = tuple(TREASURE in s.types for s in sorted(_SPECS, key=lambda s: s.id))
IS_VICTORY: tuple[bool, ...] = tuple(VICTORY in s.types for s in sorted(_SPECS, key=lambda s: s.id))
IS_ATTACK: tuple[bool, ...] = tuple(ATTACK_TYPE in s.types for s in sorted(_SPECS, key=lambda s: s.id))
IS_REACTION: tuple[bool, ...] = tuple(REACTION in s.types for s in sorted(_SPECS, key=lambda s: s.id))

N_CARDS = len(_SPECS)

# Starting deck per player: 7 Copper + 3 Estate.
STARTING_COPPERS = 7
STARTING_ESTATES = 3


def catalog() -> tuple[CardSpec, ...]:
    """All 33 card specs, ordered by CardId."""
    return tuple(sorted(_SPECS, key=lambda s: s.id))


def lookup(card: CardId) -> CardSpec:
    return _BY_ID[card]


def is_kingdom(card: CardId) -> bool:
    return card not in BASIC_CARDS


def pile_size(card: CardId, players: int = 2) -> int:
    """Initial supply pile for a card in play (excludes dealt starting cards)."""
    if card == CardId.Copper:
        return 60 - STARTING_COPPERS * players
    if card == CardId.Silver:
        return 40
    if card == CardId.Gold:
        return 30
    if card == CardId.Curse:
        return 10 * (players - 1)
    if card == CardId.Estate:
        return 8 if players == 2 else 12
    if IS_VICTORY[card]:
        # Duchy, Province and victory-type kingdom piles (Gardens).
        return 8 if players == 2 else 12
    return 10


def dealt_count(card: CardId, players: int = 2) -> int:
    """Copies dealt into starting decks, outside the supply."""
    if card == CardId.Copper:
        return STARTING_COPPERS * players
    if card == CardId.Estate:
        return STARTING_ESTATES * players
    return 0


def initial_total(card: CardId, players: int = 2) -> int:
    """Supply pile plus dealt copies; the game-log header convention."""
    return pile_size(card, players) + dealt_count(card, players)


def initial_supply(kingdom, players: int = 2) -> dict[CardId, int]:
    """Supply piles for a game: the 7 basic piles plus 10 kingdom piles.

    Raises ValueError on duplicate entries or non-kingdom cards.
    """
    kingdom = tuple(CardId(c) for c in kingdom)
    if len(kingdom) != 10 or len(set(kingdom)) != 10:
        raise ValueError(f"kingdom must be 10 distinct cards, got {kingdom!r}")
    bad = [c for c in kingdom if not is_kingdom(c)]
    if bad:
        names = ", ".join(CARD_NAMES[c] for c in bad)
        raise ValueError(f"not kingdom cards: {names}")
    supply = {c: pile_size(c, players) for c in BASIC_CARDS}
    for c in kingdom:
        supply[c] = pile_size(c, players)
    return supply


def vp_value(card: CardId, deck_size: int = 0) -> int:
    """Victory points a copy is worth inside a deck of ``deck_size`` cards."""
    if card == CardId.Gardens:
        return deck_size // 10
    return STATIC_VP[card]


def sample_kingdom(seed: int) -> tuple[CardId, ...]:
    """10 distinct kingdom cards drawn uniformly; canonical (sorted) order."""
    rng = GameRng(seed)
    return tuple(sorted(rng.sample(KINGDOM_CARDS, 10)))
