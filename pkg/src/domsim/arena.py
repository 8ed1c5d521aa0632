"""Match harness: N seeded games between two policies, with tallies.

Game i always runs on ``derive_seed(base_seed, i)``, so any single game
of a match can be reproduced in isolation, and swapping the two
policies while flipping the first-player rule transposes the tallies
exactly.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import bots
from .cards import CardId, CARD_NAMES, sample_kingdom
from .engine import GameRecord, IllegalChoiceError, play_game
from .rng import derive_seed

FIRST_ALWAYS_A = "always-a"
FIRST_ALWAYS_B = "always-b"
FIRST_ALTERNATE = "alternate"

_KINGDOM_STREAM = 0x6B  # index tag for per-game kingdom sampling


@dataclass
class MatchConfig:
    policy_a: object
    policy_b: object
    n_games: int
    kingdom: tuple[CardId, ...] | None = None   # None: sampled per game
    first_player_rule: str = FIRST_ALTERNATE
    base_seed: int = 0
    record: bool = False
    jobs: int = 1


@dataclass
class MatchResult:
    wins_a: int = 0
    ties: int = 0
    wins_b: int = 0
    aborted: int = 0
    n_games: int = 0
    mean_vp_a: float = 0.0
    mean_vp_b: float = 0.0
    mean_margin: float = 0.0
    first_player_wins: int = 0
    first_player_games: int = 0
    records: list[GameRecord] = field(default_factory=list)

    @property
    def first_player_share(self) -> float:
        return self.first_player_wins / self.first_player_games if self.first_player_games else 0.0

    def to_dict(self) -> dict:
        return {
            "wins_a": self.wins_a,
            "ties": self.ties,
            "wins_b": self.wins_b,
            "aborted": self.aborted,
            "n_games": self.n_games,
            "mean_vp_a": self.mean_vp_a,
            "mean_vp_b": self.mean_vp_b,
            "mean_margin": self.mean_margin,
            "first_player_wins": self.first_player_wins,
            "first_player_share": self.first_player_share,
        }


def _first_player(rule: str, i: int) -> int:
    if rule == FIRST_ALWAYS_A:
        return 0
    if rule == FIRST_ALWAYS_B:
        return 1
    if rule == FIRST_ALTERNATE:
        return i % 2
    raise ValueError(f"unknown first-player rule: {rule!r}")


def _game_args(config: MatchConfig, i: int):
    seed = derive_seed(config.base_seed, i)
    if config.kingdom is not None:
        kingdom = tuple(config.kingdom)
    else:
        kingdom = sample_kingdom(derive_seed(config.base_seed, i, _KINGDOM_STREAM))
    return kingdom, seed, _first_player(config.first_player_rule, i)


def _run_one(config: MatchConfig, i: int):
    kingdom, seed, first = _game_args(config, i)
    try:
        rec = play_game(
            config.policy_a, config.policy_b, kingdom, seed, first,
            record=config.record, game_id=seed,
        )
    except IllegalChoiceError:
        return i, None, first
    return i, rec, first


def _run_slice(args):
    config, lo, hi = args
    return [_run_one(config, i) for i in range(lo, hi)]


def run_match(config: MatchConfig) -> MatchResult:
    """Play the configured match; aggregation is in game-index order."""
    res = MatchResult(n_games=config.n_games)
    if config.n_games == 0:
        return res

    if config.jobs > 1:
        chunk = max(1, (config.n_games + config.jobs - 1) // config.jobs)
        slices = [
            (config, lo, min(lo + chunk, config.n_games))
            for lo in range(0, config.n_games, chunk)
        ]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = [o for part in pool.map(_run_slice, slices) for o in part]
    else:
        outcomes = [_run_one(config, i) for i in range(config.n_games)]

    vp_a = vp_b = margin = 0
    scored = 0
    for _i, rec, first in outcomes:
        if rec is None:
            res.aborted += 1
            continue
        scored += 1
        if rec.winner == 0:
            res.wins_a += 1
        elif rec.winner == 1:
            res.wins_b += 1
        else:
            res.ties += 1
        if rec.winner is not None:
            res.first_player_games += 1
            if rec.winner == first:
                res.first_player_wins += 1
        else:
            res.first_player_games += 1
        vp_a += rec.vp[0]
        vp_b += rec.vp[1]
        margin += abs(rec.vp[0] - rec.vp[1])
        if config.record:
            res.records.append(rec)
    if scored:
        res.mean_vp_a = vp_a / scored
        res.mean_vp_b = vp_b / scored
        res.mean_margin = margin / scored
    return res


@dataclass
class BenchmarkRow:
    reference: str
    menu_text: str
    candidate: str
    wins: int      # candidate's wins
    ties: int
    losses: int
    aborted: int


def benchmark_table(candidates, reference_policies, n_games, *,
                    kingdom=None, base_seed=0, jobs=1) -> list[BenchmarkRow]:
    """One row per (reference, candidate); the reference moves first."""
    if not candidates or not reference_policies:
        raise ValueError("need at least one candidate and one reference policy")
    if kingdom is None:
        kingdom = bots.BENCHMARK_KINGDOM
    rows = []
    for ref in reference_policies:
        menu = ref.menu.text() if isinstance(ref, bots.MenuPolicy) else ""
        for cand in candidates:
            r = run_match(MatchConfig(
                policy_a=ref, policy_b=cand, n_games=n_games,
                kingdom=kingdom, first_player_rule=FIRST_ALWAYS_A,
                base_seed=base_seed, jobs=jobs,
            ))
            rows.append(BenchmarkRow(
                reference=ref.name, menu_text=menu, candidate=cand.name,
                wins=r.wins_b, ties=r.ties, losses=r.wins_a, aborted=r.aborted,
            ))
    return rows


def render_benchmark(rows: list[BenchmarkRow]) -> str:
    """Aligned text table in the Win/Tie/Lose layout."""
    name_w = max(len(r.reference) for r in rows)
    menu_w = max(len(r.menu_text) for r in rows)
    lines = [
        f"{'Bot':<{name_w}}  {'Bot Buy Menu':<{menu_w}}  {'Candidate':<12}  "
        f"{'Win':>5} {'Tie':>5} {'Lose':>5}"
    ]
    for r in rows:
        line = (
            f"{r.reference:<{name_w}}  {r.menu_text:<{menu_w}}  {r.candidate:<12}  "
            f"{r.wins:>5} {r.ties:>5} {r.losses:>5}"
        )
        if r.aborted:
            line += f"  (aborted: {r.aborted})"
        lines.append(line)
    return "\n".join(lines)


def benchmark_json(rows: list[BenchmarkRow]) -> str:
    return json.dumps([r.__dict__ for r in rows], indent=2)
