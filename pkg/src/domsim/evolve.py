"""Competitive coevolution of buy-menu genomes for a fixed kingdom.

A genome is a fixed-slot buy menu plus victory-card thresholds. Each
generation plays a full round robin inside the population; the top
quarter survives, elites are copied through unchanged, and the rest of
the next population is built by single-operator mutations. A hall-of-fame
champion is maintained on the side: each generation's selection winner
is scored against a fixed reference schedule (big-money, fixed seeds)
and replaces the incumbent only when it scores strictly higher, which
makes the reported best-fitness curve non-decreasing.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bots import MenuPolicy, VictoryRule, preset
from .cards import CardId, CARD_NAMES, NAME_TO_CARD, is_kingdom
from .engine import play_game
from .rng import GameRng, derive_seed

MUTATION_OPS = ("replace", "count", "swap", "threshold")

DEFAULT_MUTATION_RATES = {
    "replace": 0.35,
    "count": 0.35,
    "swap": 0.15,
    "threshold": 0.15,
}

_MAX_COUNT = 99
_MAX_THRESHOLD = 8

# Stream tags for seed derivation.
_S_INIT = 0xA1
_S_GEN = 0xA2
_S_CHAMP = 0xA3
_S_REPORT = 0xA4


@dataclass(frozen=True)
class Genome:
    menu: tuple[tuple[CardId, int], ...]
    victory: VictoryRule

    def menu_text(self) -> str:
        return ", ".join(f"({CARD_NAMES[c]}, {n})" for c, n in self.menu)

    def total_count(self) -> int:
        return sum(n for _c, n in self.menu)

    def policy(self, name="genome") -> MenuPolicy:
        return MenuPolicy(name, self.menu, self.victory)

    def to_dict(self) -> dict:
        return {
            "menu": [[CARD_NAMES[c], n] for c, n in self.menu],
            "victory": {
                "province_always": self.victory.province_always,
                "duchy_threshold": self.victory.duchy_threshold,
                "estate_threshold": self.victory.estate_threshold,
            },
        }

    @staticmethod
    def from_dict(d: dict) -> "Genome":
        menu = tuple((NAME_TO_CARD[name], int(n)) for name, n in d["menu"])
        v = d["victory"]
        return Genome(menu, VictoryRule(
            bool(v["province_always"]),
            int(v["duchy_threshold"]),
            int(v["estate_threshold"]),
        ))


@dataclass
class EvolutionConfig:
    population_size: int = 32
    generations: int = 32
    games_per_pairing: int = 20
    slot_count: int = 16
    mutation_rates: dict = field(default_factory=lambda: dict(DEFAULT_MUTATION_RATES))
    elite_count: int = 2
    seed: int = 0
    champion_eval_games: int = 200       # fixed-schedule hall-of-fame eval
    report_top_n: int = 5
    report_games_per_pairing: int = 10_000

    def validate(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 < self.elite_count < self.population_size:
            raise ValueError("elite_count must be in (0, population_size)")
        for f in ("generations", "games_per_pairing", "slot_count"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")


@dataclass
class GenerationReport:
    generation: int
    best_fitness: float          # hall-of-fame score; non-decreasing
    selection_fitness: float     # raw round-robin fitness of the gen winner
    mean_fitness: float
    best_menu: str


@dataclass
class Leaderboard:
    kingdom: tuple[CardId, ...]
    entries: list[Genome]
    fitness: list[float]
    win_matrix: list[list[float]]
    tie_matrix: list[list[float]]
    champion: Genome
    champion_score: float        # wins + 0.5*ties per game on the reference schedule
    history: list[GenerationReport]

    def to_json(self) -> str:
        return json.dumps({
            "kingdom": [CARD_NAMES[c] for c in self.kingdom],
            "entries": [g.to_dict() for g in self.entries],
            "fitness": self.fitness,
            "win_matrix": self.win_matrix,
            "tie_matrix": self.tie_matrix,
            "champion": self.champion.to_dict(),
            "champion_score": self.champion_score,
            "history": [r.__dict__ for r in self.history],
        }, indent=2)

    def render(self) -> str:
        lines = ["Leading strategies", "=" * 18]
        for rank, (g, f) in enumerate(zip(self.entries, self.fitness), 1):
            v = g.victory
            lines.append(
                f"#{rank}  fitness={f:.1f}  thresholds: "
                f"duchy<={v.duchy_threshold} estate<={v.estate_threshold}"
            )
            lines.append(f"    {g.menu_text()}")
        lines.append("")
        lines.append("Win-ratio matrix (row vs column):")
        for row in self.win_matrix:
            lines.append("  " + "  ".join(f"{x:.3f}" for x in row))
        lines.append("")
        lines.append(f"Champion score vs big-money: {self.champion_score:.3f}")
        lines.append(f"Champion menu: {self.champion.menu_text()}")
        return "\n".join(lines)


def genome_pool(kingdom) -> tuple[CardId, ...]:
    """Cards a genome may reference: the kingdom plus Silver and Gold."""
    return tuple(sorted(kingdom)) + (CardId.Silver, CardId.Gold)


def random_genome(pool, slot_count: int, rng: GameRng) -> Genome:
    menu = []
    for _ in range(slot_count):
        card = rng.choice(pool)
        count = _MAX_COUNT if rng.random() < 0.25 else rng.randbelow(6)
        menu.append((card, count))
    victory = VictoryRule(
        province_always=True,
        duchy_threshold=rng.randbelow(_MAX_THRESHOLD + 1),
        estate_threshold=rng.randbelow(_MAX_THRESHOLD + 1),
    )
    return Genome(tuple(menu), victory)


def mutate(genome: Genome, rng: GameRng, pool,
           rates: dict | None = None) -> Genome:
    """Apply exactly one mutation operator, chosen by the configured rates."""
    rates = rates or DEFAULT_MUTATION_RATES
    total = sum(rates[op] for op in MUTATION_OPS)
    pick = rng.random() * total
    acc = 0.0
    op = MUTATION_OPS[-1]
    for candidate in MUTATION_OPS:
        acc += rates[candidate]
        if pick < acc:
            op = candidate
            break

    menu = list(genome.menu)
    victory = genome.victory
    if op == "replace":
        i = rng.randbelow(len(menu))
        old_card, count = menu[i]
        new_card = rng.choice(pool)
        while new_card == old_card:
            new_card = rng.choice(pool)
        menu[i] = (new_card, count)
    elif op == "count":
        i = rng.randbelow(len(menu))
        card, count = menu[i]
        delta = 1 + rng.randbelow(3)
        if rng.randbelow(2):
            delta = -delta
        menu[i] = (card, min(_MAX_COUNT, max(0, count + delta)))
    elif op == "swap":
        i = rng.randbelow(len(menu))
        j = rng.randbelow(len(menu) - 1)
        if j >= i:
            j += 1
        menu[i], menu[j] = menu[j], menu[i]
    else:  # threshold
        delta = 1 if rng.randbelow(2) else -1
        if rng.randbelow(2):
            value = min(_MAX_THRESHOLD, max(0, victory.duchy_threshold + delta))
            victory = VictoryRule(victory.province_always, value,
                                  victory.estate_threshold)
        else:
            value = min(_MAX_THRESHOLD, max(0, victory.estate_threshold + delta))
            victory = VictoryRule(victory.province_always,
                                  victory.duchy_threshold, value)
    return Genome(tuple(menu), victory)


def _play_pairing(args):
    """All games of one (i, j) pairing; first player alternates."""
    pol_i, pol_j, kingdom, games, pair_seed = args
    wins_i = wins_j = ties = 0
    for k in range(games):
        rec = play_game(
            pol_i, pol_j, kingdom, derive_seed(pair_seed, k),
            first_player=k % 2, record=False,
        )
        if rec.winner == 0:
            wins_i += 1
        elif rec.winner == 1:
            wins_j += 1
        else:
            ties += 1
    return wins_i, ties, wins_j


def round_robin_fitness(population, kingdom, games_per_pairing, seed, jobs=1):
    """Full round robin; returns (fitness list, win matrix, tie matrix).

    fitness = total wins + 0.5 * ties across all of a genome's games.
    matrix[i][j] is i's win share against j; the diagonal is 0.5 by
    convention (no self-games are played).
    """
    n = len(population)
    if n < 2:
        raise ValueError("population must have at least 2 genomes")
    policies = [
        g.policy(f"genome-{i}") if isinstance(g, Genome) else g
        for i, g in enumerate(population)
    ]
    pairings = [(i, j) for i in range(n) for j in range(i + 1, n)]
    tasks = [
        (policies[i], policies[j], tuple(kingdom), games_per_pairing,
         derive_seed(seed, idx))
        for idx, (i, j) in enumerate(pairings)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_play_pairing, tasks, chunksize=8))
    else:
        outcomes = [_play_pairing(t) for t in tasks]

    fitness = [0.0] * n
    wins = [[0.5 if i == j else 0.0 for j in range(n)] for i in range(n)]
    ties_m = [[0.0] * n for _ in range(n)]
    for (i, j), (wi, ties, wj) in zip(pairings, outcomes):
        games = games_per_pairing
        fitness[i] += wi + 0.5 * ties
        fitness[j] += wj + 0.5 * ties
        wins[i][j] = wi / games
        wins[j][i] = wj / games
        ties_m[i][j] = ties_m[j][i] = ties / games
    return fitness, wins, ties_m


def reference_score(genome: Genome, kingdom, seed: int, n_games: int,
                    jobs: int = 1) -> float:
    """Mean score (win=1, tie=0.5) against big-money on a fixed schedule."""
    if n_games <= 0:
        return 0.0
    task = (genome.policy("candidate"), preset("big-money"),
            tuple(kingdom), n_games, seed)
    wi, ties, _wj = _play_pairing(task)
    return (wi + 0.5 * ties) / n_games


def evolve_run(kingdom, config: EvolutionConfig, jobs: int = 1,
               progress=None) -> Leaderboard:
    """Evolve buy menus for a kingdom; deterministic per (kingdom, config)."""
    config.validate()
    kingdom = tuple(sorted(kingdom))
    if not all(is_kingdom(c) for c in kingdom):
        raise ValueError("kingdom must contain kingdom cards only")
    pool = genome_pool(kingdom)
    rng = GameRng(derive_seed(config.seed, _S_INIT))
    population = [
        random_genome(pool, config.slot_count, rng)
        for _ in range(config.population_size)
    ]
    survivors_n = max(config.elite_count, config.population_size // 4)

    champion: Genome | None = None
    champion_score = -1.0
    history: list[GenerationReport] = []

    def rank(fitness):
        return sorted(
            range(len(population)),
            key=lambda i: (-fitness[i], population[i].total_count(), i),
        )

    for gen in range(config.generations):
        fitness, _w, _t = round_robin_fitness(
            population, kingdom, config.games_per_pairing,
            derive_seed(config.seed, _S_GEN, gen), jobs,
        )
        order = rank(fitness)
        best = population[order[0]]
        score = reference_score(
            best, kingdom, derive_seed(config.seed, _S_CHAMP),
            config.champion_eval_games,
        )
        if score > champion_score:
            champion, champion_score = best, score
        history.append(GenerationReport(
            generation=gen,
            best_fitness=champion_score,
            selection_fitness=fitness[order[0]],
            mean_fitness=sum(fitness) / len(fitness),
            best_menu=best.menu_text(),
        ))
        if progress is not None:
            progress(history[-1])

        elites = [population[i] for i in order[:config.elite_count]]
        parents = [population[i] for i in order[:survivors_n]]
        next_pop = list(elites)
        k = 0
        while len(next_pop) < config.population_size:
            next_pop.append(mutate(parents[k % len(parents)], rng, pool,
                                   config.mutation_rates))
            k += 1
        population = next_pop

    # Rank the final population, then report the top strategies.
    fitness, _w, _t = round_robin_fitness(
        population, kingdom, config.games_per_pairing,
        derive_seed(config.seed, _S_GEN, config.generations), jobs,
    )
    order = rank(fitness)
    final_best = population[order[0]]
    score = reference_score(
        final_best, kingdom, derive_seed(config.seed, _S_CHAMP),
        config.champion_eval_games,
    )
    if score > champion_score:
        champion, champion_score = final_best, score

    top_n = min(config.report_top_n, len(population))
    top = [population[i] for i in order[:top_n]]
    top_fitness = [fitness[i] for i in order[:top_n]]
    win_m, tie_m = [], []
    if top_n >= 2 and config.report_games_per_pairing > 0:
        _f, win_m, tie_m = round_robin_fitness(
            top, kingdom, config.report_games_per_pairing,
            derive_seed(config.seed, _S_REPORT), jobs,
        )
    return Leaderboard(
        kingdom=kingdom,
        entries=top,
        fitness=top_fitness,
        win_matrix=win_m,
        tie_matrix=tie_m,
        champion=champion,
        champion_score=champion_score,
        history=history,
    )


def load_genome(path: str) -> Genome:
    """Read a genome from a JSON file (either bare or a leaderboard's champion)."""
    with open(path) as fh:
        data = json.load(fh)
    if "menu" in data:
        return Genome.from_dict(data)
    if "champion" in data:
        return Genome.from_dict(data["champion"])
    raise ValueError(f"{path}: no genome found in JSON")
