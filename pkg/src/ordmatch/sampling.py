"""Random and exhaustive generation of ordered matchings.

All randomness flows through a self-contained splitmix64 generator so that
identical (master seed, n, trial) triples produce bit-identical samples on
every platform. The derivation rule is ``derive_seed`` below.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Iterator

from .errors import CapExceeded, RangeError
from .matchings import OrderedMatching

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

ENUMERATION_CAP = 10**7


def mix64(x: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit bijective scrambler."""
    x = (x + _GAMMA) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(master: int, n: int, trial: int) -> int:
    """Per-task seed: mix64 chained over the master seed, n, and trial index."""
    s = mix64(master & _MASK)
    s = mix64(s ^ mix64(n & _MASK))
    s = mix64(s ^ mix64(trial & _MASK))
    return s


class SplitMix64:
    """Sequential splitmix64 stream; used for every sampler in the package."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        x = self._state
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
        return x ^ (x >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection; exact, no modulo bias."""
        if bound <= 0:
            raise RangeError("bound must be positive")
        limit = _MASK + 1 - ((_MASK + 1) % bound)
        while True:
            x = self.next64()
            if x < limit:
                return x % bound

    def shuffle(self, xs: list) -> None:
        """In-place Fisher-Yates, swapping from the top down."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.below(i + 1)
            xs[i], xs[j] = xs[j], xs[i]


def count_matchings(r: int, n: int) -> int:
    """(rn)! / ((r!)^n n!), exactly."""
    return factorial(r * n) // (factorial(r) ** n * factorial(n))


def edge_probability(r: int, n: int) -> Fraction:
    """Probability that one fixed r-set is an edge of the uniform matching."""
    if n < 1:
        raise RangeError("n must be positive")
    return Fraction(1, comb(r * n - 1, r - 1))


def sample_uniform(r: int, n: int, seed: int) -> OrderedMatching:
    """Uniform matching on 1..rn via a shuffled permutation chopped into r-blocks."""
    if n < 1 or r < 1:
        raise RangeError("r and n must be positive")
    perm = list(range(1, r * n + 1))
    SplitMix64(seed).shuffle(perm)
    edges = sorted(tuple(sorted(perm[i * r : (i + 1) * r])) for i in range(n))
    return OrderedMatching(r, tuple(edges))


def sample_online(r: int, n: int, seed: int, steps: int | None = None) -> OrderedMatching:
    """First ``steps`` edges of the sequential process: join the smallest free
    vertex with r-1 uniform picks from the remaining free vertices."""
    if n < 1 or r < 1:
        raise RangeError("r and n must be positive")
    steps = n if steps is None else steps
    if not 1 <= steps <= n:
        raise RangeError(f"steps must lie in 1..{n}")
    rng = SplitMix64(seed)
    total = r * n
    pool = list(range(1, total + 1))  # free vertices, unordered
    slot = {v: i for i, v in enumerate(pool)}
    taken = [False] * (total + 1)
    cursor = 1

    def drop(v: int) -> None:
        i = slot[v]
        last = pool[-1]
        pool[i] = last
        slot[last] = i
        pool.pop()
        del slot[v]
        taken[v] = True

    edges = []
    for _ in range(steps):
        while taken[cursor]:
            cursor += 1
        v = cursor
        drop(v)
        edge = [v]
        for _ in range(r - 1):
            pick = pool[rng.below(len(pool))]
            drop(pick)
            edge.append(pick)
        edges.append(tuple(sorted(edge)))
    return OrderedMatching(r, tuple(sorted(edges)))


def enumerate_matchings(r: int, n: int) -> Iterator[OrderedMatching]:
    """Every matching on 1..rn exactly once, in lexicographic word order.

    Each new edge covers the smallest uncovered vertex, with partner sets
    emitted in lexicographic order; that makes the word order lexicographic.
    """
    if count_matchings(r, n) > ENUMERATION_CAP:
        raise CapExceeded(f"more than {ENUMERATION_CAP} matchings for r={r}, n={n}")
    verts = list(range(1, r * n + 1))

    def rec(free: tuple[int, ...], acc: list[tuple[int, ...]]) -> Iterator[OrderedMatching]:
        if not free:
            yield OrderedMatching(r, tuple(acc))
            return
        head, rest = free[0], free[1:]
        for partners in combinations(rest, r - 1):
            acc.append((head,) + partners)
            chosen = set(partners)
            yield from rec(tuple(v for v in rest if v not in chosen), acc)
            acc.pop()

    yield from rec(tuple(verts), [])
