"""Learned buyer: masked DQN over gain decisions, trained by self-play.

The network only ever answers ChooseBuy requests; every other decision
goes through the same heuristic rule table the menu bots use. State is
a 140-feature vector: for each of the 33 cards, the supply count and
the player's own deck/hand/discard counts (normalized by that card's
initial total for the game), then eight scalars (coins, buys left,
Provinces remaining, turn number, and the opponent's owned victory-card
counts by type). Actions are the 33 card ids plus a decline action; an
action mask marks the gainable set and the mask is honored both when
acting and when bootstrapping targets.

Learning is double DQN with uniform replay and a periodically synced
target network. The network (140-256-256-34, rectifier hidden layers)
and its adaptive-moment optimizer are implemented directly on numpy
arrays so gradients can be validated against finite differences.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import arena, bots
from .cards import CardId, IS_VICTORY, N_CARDS, initial_total
from .engine import (
    CHOOSE_BUY,
    DECLINE,
    GAME_OVER,
    apply_decision,
    new_game,
    step,
)
from .rng import derive_seed

STATE_DIM = 140
N_ACTIONS = N_CARDS + 1          # one per card id + decline
DECLINE_ACTION = N_CARDS         # index 33
HIDDEN = 256
LAYER_SIZES = (STATE_DIM, HIDDEN, HIDDEN, N_ACTIONS)

_PARAM_KEYS = ("w1", "b1", "w2", "b2", "w3", "b3")

_DIVISORS = np.array([initial_total(CardId(c)) for c in range(N_CARDS)], dtype=np.float64)
_VICTORY_TYPES = (CardId.Estate, CardId.Duchy, CardId.Province, CardId.Gardens)

_FEATURE_CLIP = 1.5


# --- state encoding and action mask -----------------------------------------


def encode_state(state, player: int) -> np.ndarray:
    """140-feature view of a buy decision from ``player``'s seat."""
    x = np.zeros(STATE_DIM, dtype=np.float64)
    z = state.players[player]
    supply = state.supply

    counts = [0] * N_CARDS
    for c in z.deck:
        counts[c] += 1
    deck_c = counts
    counts = [0] * N_CARDS
    for c in z.hand:
        counts[c] += 1
    hand_c = counts
    counts = [0] * N_CARDS
    for c in z.discard:
        counts[c] += 1
    disc_c = counts

    for c in range(N_CARDS):
        pile = supply[c]
        if pile < 0:
            continue  # pile not in this game; all four features stay 0
        base = 4 * c
        div = _DIVISORS[c]
        x[base] = pile / div
        x[base + 1] = deck_c[c] / div
        x[base + 2] = hand_c[c] / div
        x[base + 3] = disc_c[c] / div

    opp = state.players[1 - player]
    opp_counts = [0] * N_CARDS
    for c in opp.all_cards():
        opp_counts[c] += 1

    x[132] = state.coins / 16.0
    x[133] = state.buys_left / 4.0
    x[134] = supply[CardId.Province] / 8.0
    x[135] = state.turn_counts[player] / 100.0
    for k, vc in enumerate(_VICTORY_TYPES):
        x[136 + k] = opp_counts[vc] / 8.0
    np.clip(x, 0.0, _FEATURE_CLIP, out=x)
    return x


def gain_mask(state) -> np.ndarray:
    """Legal-gain mask: pile nonempty and affordable; decline always legal."""
    mask = np.zeros(N_ACTIONS, dtype=bool)
    coins = state.coins
    supply = state.supply
    from .cards import COST
    for c in state.cards_in_game:
        if supply[c] > 0 and COST[c] <= coins:
            mask[c] = True
    mask[DECLINE_ACTION] = True
    return mask


def action_to_choice(action: int):
    return DECLINE if action == DECLINE_ACTION else CardId(action)


# --- network -----------------------------------------------------------------


def init_params(seed: int) -> dict:
    """He-uniform initialized parameters, float64, deterministic per seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    params = {}
    dims = list(zip(LAYER_SIZES[:-1], LAYER_SIZES[1:]))
    for i, (fan_in, fan_out) in enumerate(dims, start=1):
        bound = np.sqrt(6.0 / fan_in)
        params[f"w{i}"] = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        params[f"b{i}"] = np.zeros(fan_out)
    return params


def forward(params: dict, x: np.ndarray) -> np.ndarray:
    """Action values; accepts a single encoding or a batch."""
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != STATE_DIM:
        raise ValueError(f"expected {STATE_DIM} features, got {x.shape[1]}")
    h1 = np.maximum(x @ params["w1"] + params["b1"], 0.0)
    h2 = np.maximum(h1 @ params["w2"] + params["b2"], 0.0)
    q = h2 @ params["w3"] + params["b3"]
    return q[0] if single else q


def td_loss(params: dict, states, actions, targets) -> float:
    q = forward(params, states)
    taken = q[np.arange(len(actions)), actions]
    return float(np.mean((taken - targets) ** 2))


def gradient(params: dict, states, actions, targets) -> dict:
    """Exact gradients of the mean squared TD error over the batch."""
    x = np.asarray(states, dtype=np.float64)
    a = np.asarray(actions)
    y = np.asarray(targets, dtype=np.float64)
    n = len(a)

    z1 = x @ params["w1"] + params["b1"]
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ params["w2"] + params["b2"]
    h2 = np.maximum(z2, 0.0)
    q = h2 @ params["w3"] + params["b3"]

    rows = np.arange(n)
    dq = np.zeros_like(q)
    dq[rows, a] = 2.0 * (q[rows, a] - y) / n

    grads = {}
    grads["w3"] = h2.T @ dq
    grads["b3"] = dq.sum(axis=0)
    dh2 = dq @ params["w3"].T
    dz2 = dh2 * (z2 > 0.0)
    grads["w2"] = h1.T @ dz2
    grads["b2"] = dz2.sum(axis=0)
    dh1 = dz2 @ params["w2"].T
    dz1 = dh1 * (z1 > 0.0)
    grads["w1"] = x.T @ dz1
    grads["b1"] = dz1.sum(axis=0)
    return grads


class Adam:
    """Adaptive-moment optimizer over a parameter dict."""

    def __init__(self, params: dict, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def update(self, params: dict, grads: dict) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for k, gk in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * gk
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * gk * gk
            params[k] -= self.lr * (self.m[k] / b1c) / (np.sqrt(self.v[k] / b2c) + self.eps)


# --- replay -------------------------------------------------------------------


class ReplayBuffer:
    """Uniform-sampling ring buffer of transitions."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.size = 0
        self._next = 0
        self.states = np.zeros((capacity, STATE_DIM), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.next_states = np.zeros((capacity, STATE_DIM), dtype=np.float32)
        self.next_masks = np.zeros((capacity, N_ACTIONS), dtype=bool)
        self.terminal = np.zeros(capacity, dtype=bool)

    def push(self, s, a, r, s_next, mask_next, terminal):
        i = self._next
        self.states[i] = s
        self.actions[i] = a
        self.rewards[i] = r
        self.next_states[i] = s_next
        self.next_masks[i] = mask_next
        self.terminal[i] = terminal
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch_size)
        return (
            self.states[idx].astype(np.float64),
            self.actions[idx],
            self.rewards[idx].astype(np.float64),
            self.next_states[idx].astype(np.float64),
            self.next_masks[idx],
            self.terminal[idx],
        )


# --- learner ------------------------------------------------------------------


@dataclass
class TrainConfig:
    kingdom: tuple = field(default_factory=lambda: bots.BENCHMARK_KINGDOM)
    total_games: int = 7000
    replay_capacity: int = 100_000
    batch_size: int = 64
    gamma: float = 0.99
    learning_rate: float = 1e-4
    target_sync: int = 1000          # updates between target refreshes
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_fraction: float = 0.5    # share of the budget spent annealing
    updates_per_game: int = 4
    warmup_transitions: int = 2000
    seed: int = 0

    def validate(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        for f in ("total_games", "replay_capacity", "batch_size",
                  "target_sync", "updates_per_game"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")

    def epsilon(self, game_index: int) -> float:
        horizon = max(1, int(self.total_games * self.epsilon_fraction))
        frac = min(1.0, game_index / horizon)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["kingdom"] = [int(c) for c in self.kingdom]
        return d


class DqnLearner:
    """Online/target parameter pair plus optimizer state."""

    def __init__(self, config: TrainConfig):
        config.validate()
        self.config = config
        self.params = init_params(config.seed)
        self.target_params = {k: v.copy() for k, v in self.params.items()}
        self.optimizer = Adam(self.params, config.learning_rate)
        self.updates = 0

    def targets(self, rewards, next_states, next_masks, terminal) -> np.ndarray:
        """Double-DQN targets; masked actions never enter the argmax."""
        q_online = forward(self.params, next_states)
        q_online[~next_masks] = -np.inf
        best = np.argmax(q_online, axis=1)
        q_target = forward(self.target_params, next_states)
        boot = q_target[np.arange(len(best)), best]
        return rewards + self.config.gamma * boot * (~terminal)

    def train_step(self, batch) -> float:
        states, actions, rewards, next_states, next_masks, terminal = batch
        y = self.targets(rewards, next_states, next_masks, terminal)
        grads = gradient(self.params, states, actions, y)
        self.optimizer.update(self.params, grads)
        self.updates += 1
        if self.updates % self.config.target_sync == 0:
            self.target_params = {k: v.copy() for k, v in self.params.items()}
        return td_loss(self.params, states, actions, y)


def train_step(learner: DqnLearner, batch) -> float:
    """One optimization step on a transition batch; returns the batch loss."""
    return learner.train_step(batch)


# --- acting -------------------------------------------------------------------


def select_action(params: dict, encoding, mask, epsilon: float,
                  rng: np.random.Generator | None) -> int:
    """Epsilon-greedy over legal actions only."""
    if epsilon > 0.0 and rng is not None and rng.random() < epsilon:
        legal = np.flatnonzero(mask)
        return int(legal[rng.integers(len(legal))])
    q = forward(params, encoding)
    q = np.where(mask, q, -np.inf)
    return int(np.argmax(q))


class DqnPolicy(bots.Policy):
    """Engine policy wrapping a parameter set; non-buy decisions use the
    shared heuristic rule table."""

    def __init__(self, params: dict, name="dqn", epsilon=0.0, rng=None):
        self.params = params
        self.name = name
        self.epsilon = epsilon
        self.rng = rng

    def decide(self, request, state):
        if request.kind != CHOOSE_BUY:
            return bots.default_decision(request, state)
        enc = encode_state(state, request.player)
        mask = gain_mask(state)
        action = select_action(self.params, enc, mask, self.epsilon, self.rng)
        choice = action_to_choice(action)
        if choice not in request.options:  # pragma: no cover - mask invariant
            raise AssertionError(f"masked selection produced illegal {choice!r}")
        return choice


# --- self-play training --------------------------------------------------------


def _self_play_game(learner: DqnLearner, replay: ReplayBuffer, game_index: int,
                    rng: np.random.Generator):
    """One self-play episode; both seats share the online network."""
    cfg = learner.config
    eps = cfg.epsilon(game_index)
    seed = derive_seed(cfg.seed, 0x5E1F, game_index)
    g = new_game(seed, cfg.kingdom, first_player=game_index % 2, record=False)
    pending = [None, None]  # per seat: (encoding, action) awaiting next state

    while True:
        req = step(g)
        if req is GAME_OVER:
            break
        p = req.player
        if req.kind == CHOOSE_BUY:
            enc = encode_state(g, p)
            mask = gain_mask(g)
            if pending[p] is not None:
                s, a = pending[p]
                replay.push(s, a, 0.0, enc, mask, False)
            action = select_action(learner.params, enc, mask, eps, rng)
            pending[p] = (enc, action)
            choice = action_to_choice(action)
        else:
            choice = bots.default_decision(req, g)
        apply_decision(g, req, choice)

    from .engine import score
    _vp, winner = score(g)
    zero = np.zeros(STATE_DIM, dtype=np.float64)
    end_mask = np.zeros(N_ACTIONS, dtype=bool)
    end_mask[DECLINE_ACTION] = True
    for p in (0, 1):
        if pending[p] is None:
            continue
        s, a = pending[p]
        r = 0.0 if winner is None else (1.0 if winner == p else -1.0)
        replay.push(s, a, r, zero, end_mask, True)
    return winner


def self_play_train(config: TrainConfig, checkpoint_path=None,
                    progress=None) -> dict:
    """Train by self-play for the configured game budget; returns params."""
    learner = DqnLearner(config)
    replay = ReplayBuffer(config.replay_capacity)
    rng = np.random.Generator(np.random.PCG64(derive_seed(config.seed, 0xD01)))

    recent = []
    for game in range(config.total_games):
        winner = _self_play_game(learner, replay, game, rng)
        recent.append(winner)
        if replay.size >= max(config.warmup_transitions, config.batch_size):
            for _ in range(config.updates_per_game):
                batch = replay.sample(config.batch_size, rng)
                learner.train_step(batch)
        if progress is not None and (game + 1) % 500 == 0:
            progress(game + 1, learner, replay)
    if checkpoint_path is not None:
        save_checkpoint(checkpoint_path, learner.params, config.to_dict())
    return learner.params


def evaluate_policy(params: dict, opponent_policy, n_games: int, seed: int,
                    kingdom=None, jobs: int = 1,
                    opponent_first: bool = True) -> arena.MatchResult:
    """Greedy masked evaluation; the opponent takes the first turn by default.

    The returned tallies are from the opponent's seat A perspective:
    ``wins_b`` counts the learned policy's wins.
    """
    if kingdom is None:
        kingdom = tuple(TrainConfig().kingdom)
    policy = DqnPolicy(params, epsilon=0.0)
    rule = arena.FIRST_ALWAYS_A if opponent_first else arena.FIRST_ALWAYS_B
    return arena.run_match(arena.MatchConfig(
        policy_a=opponent_policy, policy_b=policy, n_games=n_games,
        kingdom=tuple(kingdom), first_player_rule=rule, base_seed=seed,
        jobs=jobs,
    ))


# --- checkpoints ----------------------------------------------------------------

_CKPT_MAGIC = b"DSQN"
_CKPT_VERSION = 1


def save_checkpoint(path, params: dict, config_echo: dict | None = None) -> None:
    """Versioned binary blob: layer shapes + row-major float64 coefficients."""
    header = {
        "version": _CKPT_VERSION,
        "keys": list(_PARAM_KEYS),
        "shapes": {k: list(params[k].shape) for k in _PARAM_KEYS},
        "config": config_echo or {},
    }
    blob = json.dumps(header).encode()
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<II", _CKPT_VERSION, len(blob)))
        fh.write(blob)
        for k in _PARAM_KEYS:
            fh.write(np.ascontiguousarray(params[k], dtype=np.float64).tobytes())


def load_checkpoint(path):
    """Returns (params, config_echo)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _CKPT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        version, hlen = struct.unpack("<II", fh.read(8))
        if version != _CKPT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        header = json.loads(fh.read(hlen).decode())
        params = {}
        for k in header["keys"]:
            shape = tuple(header["shapes"][k])
            n = int(np.prod(shape))
            buf = fh.read(n * 8)
            params[k] = np.frombuffer(buf, dtype=np.float64).reshape(shape).copy()
    return params, header.get("config", {})
