"""Glicko-2 rating math on the native (mu, phi, sigma) scale.

The online service this mirrors rates players directly on the Glicko-2
scale, where an average-strength player sits near mu = 0 and a 95%
confidence interval for true skill is (mu - 2*phi, mu + 2*phi).
Conversion helpers to and from the classic 1500/350 scale are provided
for interoperability; the scale factor is 173.7178.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

GLICKO1_SCALE = 173.7178
GLICKO1_BASE = 1500.0

DEFAULT_TAU = 0.5
_CONVERGENCE = 1e-9
_MAX_ITERATIONS = 100

WIN = 1.0
DRAW = 0.5
LOSS = 0.0


@dataclass(frozen=True)
class Rating:
    mu: float = 0.0
    phi: float = 350.0 / GLICKO1_SCALE
    sigma: float = 0.06

    def __post_init__(self):
        if self.phi <= 0:
            raise ValueError("phi must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


class VolatilityError(Exception):
    """The volatility root-finder failed to converge."""


def from_glicko1(rating: float, rd: float, sigma: float = 0.06) -> Rating:
    return Rating((rating - GLICKO1_BASE) / GLICKO1_SCALE, rd / GLICKO1_SCALE, sigma)


def to_glicko1(r: Rating) -> tuple[float, float]:
    return (GLICKO1_BASE + GLICKO1_SCALE * r.mu, GLICKO1_SCALE * r.phi)


def g(phi: float) -> float:
    return 1.0 / math.sqrt(1.0 + 3.0 * phi * phi / (math.pi * math.pi))


def expected_score(a: Rating, b: Rating) -> float:
    """Win probability of a over b, discounted by b's deviation."""
    return 1.0 / (1.0 + math.exp(-g(b.phi) * (a.mu - b.mu)))


def interval(r: Rating) -> tuple[float, float]:
    """95% confidence interval for true skill."""
    return (r.mu - 2.0 * r.phi, r.mu + 2.0 * r.phi)


def _new_volatility(phi, v, delta, sigma, tau):
    """Illinois-method root finder for the volatility update."""
    a = math.log(sigma * sigma)
    phi2 = phi * phi
    delta2 = delta * delta

    def f(x):
        ex = math.exp(x)
        num = ex * (delta2 - phi2 - v - ex)
        den = 2.0 * (phi2 + v + ex) ** 2
        return num / den - (x - a) / (tau * tau)

    big_a = a
    if delta2 > phi2 + v:
        big_b = math.log(delta2 - phi2 - v)
    else:
        k = 1
        while f(a - k * tau) < 0:
            k += 1
            if k > _MAX_ITERATIONS:
                raise VolatilityError("no bracket for volatility iteration")
        big_b = a - k * tau

    fa, fb = f(big_a), f(big_b)
    for _ in range(_MAX_ITERATIONS):
        if abs(big_b - big_a) <= _CONVERGENCE:
            break
        big_c = big_a + (big_a - big_b) * fa / (fb - fa)
        fc = f(big_c)
        if fc * fb <= 0:
            big_a, fa = big_b, fb
        else:
            fa /= 2.0
        big_b, fb = big_c, fc
    else:
        raise VolatilityError("volatility iteration did not converge")
    return math.exp(big_a / 2.0)


def update(player: Rating, results, tau: float = DEFAULT_TAU) -> Rating:
    """One rating-period update from (opponent, score) pairs.

    Scores are 1 for a win, 0.5 for a tie, 0 for a loss.
    """
    results = list(results)
    if not results:
        raise ValueError("results must be nonempty")

    gs, es, scores = [], [], []
    for opponent, score in results:
        gj = g(opponent.phi)
        ej = 1.0 / (1.0 + math.exp(-gj * (player.mu - opponent.mu)))
        gs.append(gj)
        es.append(ej)
        scores.append(score)

    v = 1.0 / sum(gj * gj * ej * (1.0 - ej) for gj, ej in zip(gs, es))
    residual = sum(gj * (s - ej) for gj, s, ej in zip(gs, scores, es))
    delta = v * residual

    sigma_new = _new_volatility(player.phi, v, delta, player.sigma, tau)
    phi_star = math.sqrt(player.phi * player.phi + sigma_new * sigma_new)
    phi_new = 1.0 / math.sqrt(1.0 / (phi_star * phi_star) + 1.0 / v)
    mu_new = player.mu + phi_new * phi_new * residual
    return Rating(mu_new, phi_new, sigma_new)
