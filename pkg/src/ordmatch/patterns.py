"""Pattern algebra for interleavings of two disjoint same-size edges.

A pattern is a balanced word over {A, B}: the merge order of two disjoint
r-edges, written A for the edge with the smaller minimum. Flipping every
letter describes the same pair, so the canonical form starts with A.
The degenerate r = 1 pattern AB is allowed; it appears as a mega-block of
weight one in cube constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .errors import (
    InternalError,
    InvalidPartition,
    InvalidWord,
    NotCollectable,
    NotMismatch,
    RangeError,
    SizeMismatch,
)

# 1/2 * C(16, 8) = 6435 words at the cap; enumeration beyond r = 8 has no use here.
ENUM_R_CAP = 8

PATTERN_CLASSES = ("all", "collectable", "partite", "dyck", "noncollectable")

_FLIP = str.maketrans("AB", "BA")


def flip_word(word: str) -> str:
    """Swap every A for B and vice versa."""
    return word.translate(_FLIP)


@dataclass(frozen=True, order=True)
class Pattern:
    """Canonical interleaving word of two disjoint edges of equal size."""

    word: str

    def __post_init__(self) -> None:
        w = self.word
        if not w or set(w) - {"A", "B"}:
            raise InvalidWord(f"pattern must be a nonempty word over A/B, got {w!r}")
        if w.count("A") != w.count("B"):
            raise InvalidWord(f"pattern needs equally many A's and B's: {w!r}")
        if w[0] == "B":
            # flips of an entire pattern are identified with the unflipped pattern
            object.__setattr__(self, "word", flip_word(w))

    @property
    def r(self) -> int:
        return len(self.word) // 2

    @cached_property
    def _blocks(self) -> tuple[str, ...] | None:
        return _greedy_split(self.word)

    @property
    def is_collectable(self) -> bool:
        return self._blocks is not None

    def split_blocks(self) -> tuple[str, ...]:
        """Unique splitting into blocks of shape A^tB^t or B^tA^t."""
        if self._blocks is None:
            raise NotCollectable(f"{self.word} has no block splitting")
        return self._blocks

    def composition(self) -> Composition:
        """Half-lengths of the blocks of the unique splitting."""
        return Composition(tuple(len(b) // 2 for b in self.split_blocks()))

    @property
    def is_partite(self) -> bool:
        """True when every block has size two, i.e. the composition is all ones."""
        blocks = self._blocks
        return blocks is not None and all(len(b) == 2 for b in blocks)

    @property
    def is_dyck(self) -> bool:
        """No prefix holds more B's than A's."""
        depth = 0
        for ch in self.word:
            depth += 1 if ch == "A" else -1
            if depth < 0:
                return False
        return True

    def __str__(self) -> str:
        return self.word


def _greedy_split(word: str) -> tuple[str, ...] | None:
    # Inside a valid splitting the leading-letter run of a block is exactly its
    # half-length (the second half is the opposite letter), so the greedy parse
    # recovers the unique splitting and fails only on non-collectable words.
    blocks: list[str] = []
    i, size = 0, len(word)
    while i < size:
        lead = word[i]
        t = 1
        while i + t < size and word[i + t] == lead:
            t += 1
        other = "B" if lead == "A" else "A"
        if word[i + t : i + 2 * t] != other * t:
            return None
        blocks.append(word[i : i + 2 * t])
        i += 2 * t
    return tuple(blocks)


@dataclass(frozen=True)
class Composition:
    """Ordered partition of r recorded block by block."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts or any(p < 1 for p in self.parts):
            raise InvalidWord(f"composition parts must be positive: {self.parts}")

    @property
    def r(self) -> int:
        return sum(self.parts)

    @property
    def s(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def enumerate_patterns(r: int, klass: str = "all") -> list[Pattern]:
    """All canonical r-patterns of one class, in lexicographic word order.

    Classes: all (1/2 * C(2r, r) words), collectable (3^(r-1)),
    partite (2^(r-1)), dyck (Catalan r), noncollectable (the rest).
    """
    if not 1 <= r <= ENUM_R_CAP:
        raise RangeError(f"pattern enumeration supports 1 <= r <= {ENUM_R_CAP}, got {r}")
    if klass not in PATTERN_CLASSES:
        raise ValueError(f"unknown pattern class {klass!r}")
    words = []
    for rest in combinations(range(1, 2 * r), r - 1):
        chars = ["B"] * (2 * r)
        chars[0] = "A"
        for pos in rest:
            chars[pos] = "A"
        words.append("".join(chars))
    pats = [Pattern(w) for w in sorted(words)]
    if klass == "all":
        return pats
    pred = {
        "collectable": lambda p: p.is_collectable,
        "partite": lambda p: p.is_partite,
        "dyck": lambda p: p.is_dyck,
        "noncollectable": lambda p: not p.is_collectable,
    }[klass]
    return [p for p in pats if pred(p)]


def _require_same_r(p: Pattern, q: Pattern) -> None:
    if p.r != q.r:
        raise SizeMismatch(f"patterns of different uniformity: {p.word} vs {q.word}")


def is_harmonious(p: Pattern, q: Pattern) -> bool:
    """Both collectable with equal compositions (an equivalence relation)."""
    _require_same_r(p, q)
    if not (p.is_collectable and q.is_collectable):
        return False
    return p.composition() == q.composition()


def is_mismatch(p: Pattern, q: Pattern) -> bool:
    """One collectable and one not, or both collectable but not harmonious.

    A pair of two non-collectable patterns is neither harmonious nor a
    mismatch, and a pattern never mismatches itself.
    """
    _require_same_r(p, q)
    if p == q:
        return False
    cp, cq = p.is_collectable, q.is_collectable
    if cp != cq:
        return True
    if cp and cq:
        return p.composition() != q.composition()
    return False


@dataclass(frozen=True)
class Cube:
    """A collectable base pattern plus a grouping of its block indices.

    ``partition`` lists the parts T_0, ..., T_t of [s] (1-based block
    indices), T_0 first; flipping the mega-blocks selected by a subset of
    {1..t} generates the 2^t member patterns.
    """

    base: Pattern
    partition: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        s = len(self.base.split_blocks())  # raises NotCollectable for bad bases
        parts = tuple(tuple(sorted(part)) for part in self.partition)
        object.__setattr__(self, "partition", parts)
        if not parts or any(not part for part in parts):
            raise InvalidPartition("partition parts must be nonempty")
        flat = [i for part in parts for i in part]
        if sorted(flat) != list(range(1, s + 1)):
            raise InvalidPartition(f"parts must partition 1..{s}, got {parts}")
        if 1 not in parts[0]:
            raise InvalidPartition("block 1 must belong to the first part")

    @property
    def t(self) -> int:
        return len(self.partition) - 1

    @property
    def weights(self) -> tuple[int, ...]:
        """Mega-block weights: the sum of half-block-lengths in each part."""
        lam = self.base.composition().parts
        return tuple(sum(lam[i - 1] for i in part) for part in self.partition)

    def patterns(self) -> list[Pattern]:
        return cube_expand(self)


def cube_expand(cube: Cube) -> list[Pattern]:
    """The 2^t patterns obtained by flipping subsets of mega-blocks.

    The first part is never flipped, so all results are canonical; the base
    comes first (empty flip set), then flip sets in binary-counter order.
    """
    blocks = cube.base.split_blocks()
    t = cube.t
    out = []
    for mask in range(1 << t):
        flipped = set()
        for j in range(1, t + 1):
            if mask >> (j - 1) & 1:
                flipped.update(cube.partition[j])
        word = "".join(
            flip_word(b) if i + 1 in flipped else b for i, b in enumerate(blocks)
        )
        out.append(Pattern(word))
    return out


def harmonic_family(p: Pattern) -> list[Pattern]:
    """All 2^(s-1) patterns sharing p's composition (the singleton-parts cube)."""
    s = len(p.split_blocks())
    singletons = tuple((i,) for i in range(1, s + 1))
    return cube_expand(Cube(p, singletons))


def remove_letter(p: Pattern, j: int) -> Pattern:
    """Drop the j-th A and the j-th B, yielding an (r-1)-pattern."""
    r = p.r
    if r < 2:
        raise RangeError("letter removal needs r >= 2")
    if not 1 <= j <= r:
        raise RangeError(f"letter index must lie in 1..{r}, got {j}")
    seen = {"A": 0, "B": 0}
    kept = []
    for ch in p.word:
        seen[ch] += 1
        if seen[ch] != j:
            kept.append(ch)
    return Pattern("".join(kept))


def find_inheritance_index(p: Pattern, q: Pattern) -> int:
    """Smallest j for which removing the j-th letters keeps the pair mismatched.

    Existence is guaranteed for every mismatched pair with r >= 3; failure to
    find one would falsify that guarantee, so it raises InternalError.
    """
    if p.r < 3:
        raise RangeError("inheritance index needs r >= 3")
    if not is_mismatch(p, q):
        raise NotMismatch(f"{p.word}, {q.word} is not a mismatched pair")
    for j in range(1, p.r + 1):
        if is_mismatch(remove_letter(p, j), remove_letter(q, j)):
            return j
    raise InternalError(
        f"no letter-removal index preserves the mismatch of {p.word}, {q.word}"
    )


def parse_partition(text: str) -> tuple[tuple[int, ...], ...]:
    """Parse the text form T_0;T_1;... such as ``1,3,5;2,8;4,6,7``."""
    try:
        parts = tuple(
            tuple(int(tok) for tok in group.split(",")) for group in text.split(";")
        )
    except ValueError as exc:
        raise InvalidPartition(f"cannot parse partition {text!r}") from exc
    return parts


def format_partition(partition: tuple[tuple[int, ...], ...]) -> str:
    return ";".join(",".join(map(str, part)) for part in partition)
