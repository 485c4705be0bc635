"""Trace-decoding rules and reconstructibility checks for clique families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .cliques import PatternSet, iter_cliques
from .errors import CapExceeded, InvalidTrace
from .matchings import OrderedMatching, Trace, is_valid_trace, pattern_of_pair, to_word, trace_of

CLIQUE_COUNT_CAP = 24

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Rule:
    """Per-digit decoding policy: each digit >= 2 extends the leftmost or the
    rightmost letter seen exactly digit-1 times; digit 1 opens a fresh letter.

    ``default`` covers digits without an explicit override.
    """

    default: str = LEFT
    overrides: tuple[tuple[int, str], ...] = ()

    def policy(self, digit: int) -> str:
        for d, pol in self.overrides:
            if d == digit:
                return pol
        return self.default


def named_rule(name: str) -> Rule:
    """left | right | lr | rl. The mixed rules put digit 2 on one side and all
    higher digits on the other, which matches the classical r = 3 variants."""
    if name == "left":
        return Rule(LEFT)
    if name == "right":
        return Rule(RIGHT)
    if name == "lr":
        return Rule(RIGHT, ((2, LEFT),))
    if name == "rl":
        return Rule(LEFT, ((2, RIGHT),))
    raise ValueError(f"unknown rule {name!r}")


def reconstruct(trace: Trace, rule: Rule) -> OrderedMatching:
    """Decode a staircase digit sequence into a matching under the rule."""
    if not is_valid_trace(trace):
        raise InvalidTrace(f"not a decodable trace: {trace}")
    positions: list[list[int]] = []
    counts: list[int] = []
    for pos, digit in enumerate(trace.symbols, start=1):
        if digit == 1:
            positions.append([pos])
            counts.append(1)
            continue
        candidates = [i for i, c in enumerate(counts) if c == digit - 1]
        if not candidates:
            raise InvalidTrace(f"no letter available for digit {digit} at {pos}")
        pick = candidates[0] if rule.policy(digit) == LEFT else candidates[-1]
        positions[pick].append(pos)
        counts[pick] += 1
    return OrderedMatching(trace.r, tuple(tuple(p) for p in positions))


@dataclass(frozen=True)
class ReconVerdict:
    reconstructible: bool
    collision: tuple[str, str, str] | None = None  # two words and their shared trace


def check_reconstructible(r: int, ps: PatternSet, k: int) -> ReconVerdict:
    """Group all allowed cliques of size k by trace; reconstructible when every
    group is a singleton, else report the lexicographically first collision."""
    if r * k > CLIQUE_COUNT_CAP:
        raise CapExceeded(f"reconstructibility check capped at r*k <= {CLIQUE_COUNT_CAP}")
    by_trace: dict[tuple[int, ...], list[OrderedMatching]] = {}
    for clique in iter_cliques(r, ps, k):
        by_trace.setdefault(trace_of(clique).symbols, []).append(clique)
    collisions = {t: ms for t, ms in by_trace.items() if len(ms) > 1}
    if not collisions:
        return ReconVerdict(True, None)
    t = min(collisions)
    words = sorted(to_word(mm) for mm in collisions[t])
    return ReconVerdict(False, (words[0], words[1], str(Trace(r, t))))


def enumerate_traces(r: int, k: int) -> Iterator[Trace]:
    """All staircase digit sequences with every digit 1..r appearing k times."""
    counts = [k] + [0] * r  # counts[0] sentinel keeps digit 1 unconstrained
    seq: list[int] = []
    total = r * k

    def rec() -> Iterator[Trace]:
        if len(seq) == total:
            yield Trace(r, tuple(seq))
            return
        for d in range(1, r + 1):
            if counts[d] < counts[d - 1] and counts[d] < k:
                counts[d] += 1
                seq.append(d)
                yield from rec()
                seq.pop()
                counts[d] -= 1

    yield from rec()


def rule_fixpoint_check(r: int, ps: PatternSet, rule: Rule, k: int) -> bool:
    """The rule reproduces every allowed clique from its trace, and decodes
    every valid trace of that shape into an allowed clique."""
    if r * k > CLIQUE_COUNT_CAP:
        raise CapExceeded(f"rule check capped at r*k <= {CLIQUE_COUNT_CAP}")
    for clique in iter_cliques(r, ps, k):
        if reconstruct(trace_of(clique), rule) != clique:
            return False
    words = ps.words()
    for trace in enumerate_traces(r, k):
        decoded = reconstruct(trace, rule)
        for a in range(decoded.n):
            for b in range(a + 1, decoded.n):
                if pattern_of_pair(decoded.edges[a], decoded.edges[b]).word not in words:
                    return False
    return True
