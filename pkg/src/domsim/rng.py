"""Seeded pseudo-random source shared by every stochastic component.

The generator is splitmix64 (algorithm id ``splitmix64/1``): a 64-bit
counter advanced by the golden-ratio increment and finalized with the
Stafford mix. It is tiny, platform independent, and trivially seedable,
so game records replay byte-for-byte anywhere.

Bounded draws use the multiply-shift reduction ``(u64 * n) >> 64``; its
bias is below n / 2**64, irrelevant at game scale, and it keeps the
draw count at exactly one word per request, which matters because a
single match consumes hundreds of shuffles.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

RNG_ALGORITHM = "splitmix64/1"


def mix64(z: int) -> int:
    """Stafford variant 13 finalizer on a 64-bit word."""
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def derive_seed(base_seed: int, *indices: int) -> int:
    """Fold integer indices into a base seed.

    ``derive_seed(s, i, j)`` is the documented stream-split rule: every
    consumer (arena game i, evolution pairing (g, p, k), ...) derives its
    own seed this way, so independent implementations can reproduce any
    single game without replaying the whole run.
    """
    s = mix64(base_seed)
    for i in indices:
        s = mix64(s ^ mix64((i + _GAMMA) & _MASK))
    return s


class GameRng:
    """splitmix64 stream with the handful of draws the simulator needs."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return (self.next_u64() * n) >> 64

    def random(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def choice(self, seq):
        return seq[(self.next_u64() * len(seq)) >> 64]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, high index down."""
        next_u64 = self.next_u64
        for i in range(len(items) - 1, 0, -1):
            j = (next_u64() * (i + 1)) >> 64
            items[i], items[j] = items[j], items[i]

    def sample(self, seq, k: int) -> list:
        """k distinct elements, drawn without replacement."""
        pool = list(seq)
        self.shuffle(pool)
        return pool[:k]

    def getstate(self) -> int:
        return self._state

    def setstate(self, state: int) -> None:
        self._state = state & _MASK
