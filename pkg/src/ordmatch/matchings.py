"""Ordered matchings, their word and trace codecs, and gluing constructions."""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

from .errors import (
    InvalidWord,
    OrderViolation,
    OverlapError,
    RangeError,
    SizeMismatch,
)
from .patterns import Cube, Pattern

_LETTERS = string.ascii_uppercase


@dataclass(frozen=True)
class OrderedMatching:
    """n pairwise disjoint sorted r-sets over integer vertices, ordered by minimum."""

    r: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        edges = tuple(tuple(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        seen: set[int] = set()
        prev_min = None
        for e in edges:
            if len(e) != self.r:
                raise SizeMismatch(f"edge {e} has size {len(e)}, expected {self.r}")
            if any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
                raise InvalidWord(f"edge {e} is not strictly increasing")
            if seen & set(e):
                raise OverlapError(f"edge {e} reuses a vertex")
            seen.update(e)
            if prev_min is not None and e[0] < prev_min:
                raise InvalidWord("edges must be listed by increasing minimum")
            prev_min = e[0]
        if any(v < 0 for v in seen):
            raise InvalidWord("vertex ids must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.edges)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(v for e in self.edges for v in e))

    @property
    def is_canonical(self) -> bool:
        """Vertex set is exactly 1..r*n."""
        return self.vertices == tuple(range(1, self.r * self.n + 1))

    def canonicalize(self) -> "OrderedMatching":
        """Compress vertex ids to 1..r*n, preserving order."""
        if self.is_canonical:
            return self
        rank = {v: i + 1 for i, v in enumerate(self.vertices)}
        edges = sorted(tuple(rank[v] for v in e) for e in self.edges)
        return OrderedMatching(self.r, tuple(edges))

    def submatching(self, indices) -> "OrderedMatching":
        picked = sorted(self.edges[i] for i in indices)
        return OrderedMatching(self.r, tuple(picked))

    def __str__(self) -> str:
        return to_word(self)


def from_word(text: str, r: int | None = None) -> OrderedMatching:
    """Decode a word (letters, or space-separated edge indices) to a matching.

    Every symbol must occur the same number of times; that count is the
    uniformity, checked against ``r`` when given.
    """
    tokens = text.split() if " " in text.strip() else list(text.strip())
    if not tokens:
        raise InvalidWord("empty word")
    positions: dict[str, list[int]] = {}
    for pos, tok in enumerate(tokens, start=1):
        positions.setdefault(tok, []).append(pos)
    counts = {len(v) for v in positions.values()}
    if len(counts) != 1:
        raise InvalidWord(f"symbols occur unevenly in {text!r}")
    (found_r,) = counts
    if r is not None and r != found_r:
        raise InvalidWord(f"word encodes uniformity {found_r}, expected {r}")
    edges = sorted(tuple(v) for v in positions.values())
    return OrderedMatching(found_r, tuple(edges))


def to_word(m: OrderedMatching) -> str:
    """Word form with letters introduced alphabetically by first occurrence.

    Uses A..Z for n <= 26, otherwise space-separated 1-based edge indices.
    """
    m = m.canonicalize()
    symbol_at: dict[int, str] = {}
    for idx, e in enumerate(m.edges):
        sym = _LETTERS[idx] if m.n <= 26 else str(idx + 1)
        for v in e:
            symbol_at[v] = sym
    parts = [symbol_at[v] for v in range(1, m.r * m.n + 1)]
    return "".join(parts) if m.n <= 26 else " ".join(parts)


def pattern_of_pair(e, f) -> Pattern:
    """Merge two disjoint equal-size edges, writing A for the earlier one."""
    e, f = tuple(e), tuple(f)
    if len(e) != len(f):
        raise SizeMismatch(f"edges of different sizes: {e} vs {f}")
    if set(e) & set(f):
        raise OverlapError(f"edges share vertices: {e} vs {f}")
    a_side = set(e) if min(e) < min(f) else set(f)
    word = "".join("A" if v in a_side else "B" for v in sorted(e + f))
    return Pattern(word)


@dataclass(frozen=True)
class Trace:
    """Within-edge ranks of the vertices, read in vertex order."""

    r: int
    symbols: tuple[int, ...]

    def __str__(self) -> str:
        if self.r <= 9:
            return "".join(map(str, self.symbols))
        return " ".join(map(str, self.symbols))


def trace_of(m: OrderedMatching) -> Trace:
    """Rank of each vertex inside its own edge, listed in vertex order."""
    rank: dict[int, int] = {}
    for e in m.edges:
        for i, v in enumerate(e, start=1):
            rank[v] = i
    return Trace(m.r, tuple(rank[v] for v in sorted(rank)))


def is_valid_trace(t: Trace) -> bool:
    """Staircase property (prefix counts never increase with the digit) plus
    equal final counts for every digit 1..r."""
    counts = [0] * (t.r + 1)
    for d in t.symbols:
        if not 1 <= d <= t.r:
            return False
        if d > 1 and counts[d] >= counts[d - 1]:
            return False
        counts[d] += 1
    return len(set(counts[1:])) == 1 and counts[1] > 0


def parse_trace(text: str, r: int | None = None) -> Trace:
    toks = text.split() if " " in text.strip() else list(text.strip())
    try:
        symbols = tuple(int(tok) for tok in toks)
    except ValueError as exc:
        raise InvalidWord(f"cannot parse trace {text!r}") from exc
    return Trace(r if r is not None else max(symbols, default=0), symbols)


def chi_interval(m: OrderedMatching) -> int:
    """Minimum number of intervals so that no edge repeats inside one.

    The greedy scan (cut only when an edge would repeat) is optimal: the
    first greedy interval is inclusion-maximal, and extending any valid
    first interval to it only loosens what remains.
    """
    owner: dict[int, int] = {}
    for idx, e in enumerate(m.edges):
        for v in e:
            owner[v] = idx
    intervals = 1
    current: set[int] = set()
    for v in sorted(owner):
        edge = owner[v]
        if edge in current:
            intervals += 1
            current = {edge}
        else:
            current.add(edge)
    return intervals


def is_r_partite(m: OrderedMatching) -> bool:
    return chi_interval(m) == m.r


def _check_ranges(ms) -> None:
    if len({m.n for m in ms}) != 1:
        raise SizeMismatch("all glued matchings must have the same size")
    for left, right in zip(ms, ms[1:]):
        if max(left.vertices) >= min(right.vertices):
            raise OrderViolation("vertex ranges must be disjoint and increasing")


def _check_perm(sigma, k: int) -> None:
    if sorted(sigma) != list(range(1, k + 1)):
        raise SizeMismatch(f"{sigma} is not a permutation of 1..{k}")


def concatenate(ms, sigmas) -> OrderedMatching:
    """Glue equal-size matchings on increasing vertex ranges by permutations.

    Edge i of the result joins edge i of the first matching with edge
    sigma_j(i) of the (j+1)-st, for each j; edges are numbered by left end.
    """
    ms = list(ms)
    sigmas = [tuple(s) for s in sigmas]
    _check_ranges(ms)
    if len(sigmas) != len(ms) - 1:
        raise SizeMismatch("need one permutation fewer than matchings")
    k = ms[0].n
    for sigma in sigmas:
        _check_perm(sigma, k)
    edges = []
    for i in range(k):
        verts = list(ms[0].edges[i])
        for j, sigma in enumerate(sigmas, start=1):
            verts.extend(ms[j].edges[sigma[i] - 1])
        edges.append(tuple(sorted(verts)))
    return OrderedMatching(sum(m.r for m in ms), tuple(sorted(edges)))


@dataclass(frozen=True)
class OrderedHypergraph:
    """Uniform ordered hypergraph; edges may share vertices but not repeat.

    ``classes`` optionally labels each vertex with its origin class, which is
    what blow-ups use to define scatteredness.
    """

    r: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]
    classes: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(set(self.edges)) != len(self.edges):
            raise InvalidWord("duplicate hypergraph edges")
        for e in self.edges:
            if len(e) != self.r or any(v not in vs for v in e):
                raise SizeMismatch(f"edge {e} out of range or of wrong size")
        if self.classes is not None and len(self.classes) != len(self.vertices):
            raise SizeMismatch("class labels must cover the vertex list")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def class_of(self) -> dict[int, int]:
        if self.classes is None:
            return {v: v for v in self.vertices}
        return dict(zip(self.vertices, self.classes))

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "classes": list(self.classes) if self.classes is not None else None,
        }


def product(ms) -> OrderedHypergraph:
    """All unions of one edge from each matching; k^(h+1) edges in total."""
    ms = list(ms)
    _check_ranges(ms)
    return _product_hypergraph(ms)


def _product_hypergraph(ms) -> OrderedHypergraph:
    # Internal variant without the range check: mega-block cliques of a cube
    # live on interleaved vertex sets.
    edges = []
    for combo in iproduct(*(m.edges for m in ms)):
        edges.append(tuple(sorted(v for e in combo for v in e)))
    verts = tuple(sorted(v for m in ms for v in m.vertices))
    return OrderedHypergraph(sum(m.r for m in ms), verts, tuple(sorted(edges)))


def unique_clique(p: Pattern, k: int, vertices) -> OrderedMatching:
    """The single p-clique of size k on an ordered vertex list.

    Within an A-first block the i-th edge takes the i-th run of the block's
    vertices; within a B-first block the runs are taken in reverse.
    """
    if k < 1:
        raise RangeError("clique size must be positive")
    vertices = list(vertices)
    if len(vertices) != k * p.r:
        raise SizeMismatch(f"need {k * p.r} vertices, got {len(vertices)}")
    blocks = p.split_blocks()
    edges: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for block in blocks:
        lam = len(block) // 2
        chunk = vertices[offset : offset + k * lam]
        offset += k * lam
        for h in range(k):
            run = h if block[0] == "A" else k - 1 - h
            edges[h].extend(chunk[run * lam : (run + 1) * lam])
    return OrderedMatching(p.r, tuple(sorted(tuple(sorted(e)) for e in edges)))


def build_mega_cliques(cube: Cube, k: int) -> list[OrderedMatching]:
    """The unique mega-block cliques K_0..K_t of a cube on vertices 1..r*k."""
    lam = cube.base.composition().parts
    blocks = cube.base.split_blocks()
    starts = []
    pos = 1
    for width in lam:
        starts.append(pos)
        pos += k * width
    cliques = []
    for part in cube.partition:
        verts: list[int] = []
        word = ""
        for i in sorted(part):
            verts.extend(range(starts[i - 1], starts[i - 1] + k * lam[i - 1]))
            word += blocks[i - 1]
        cliques.append(unique_clique(Pattern(word), k, sorted(verts)))
    return cliques


def build_hk(cube: Cube, k: int) -> OrderedHypergraph:
    """Product of the mega-block cliques: k^(t+1) edges on 1..r*k, every
    disjoint pair of which realizes a member of the cube."""
    return _product_hypergraph(build_mega_cliques(cube, k))


def blow_up(h: OrderedHypergraph, ell: int) -> OrderedHypergraph:
    """Replace each vertex by ell consecutive copies and each edge by all
    ell^r transversals of its copy classes; class labels record the origin."""
    if ell < 1:
        raise RangeError("blow-up factor must be >= 1")
    order = {v: i for i, v in enumerate(sorted(h.vertices))}
    span = {v: range(order[v] * ell + 1, order[v] * ell + ell + 1) for v in h.vertices}
    new_edges = []
    for e in h.edges:
        for combo in iproduct(*(span[v] for v in e)):
            new_edges.append(tuple(sorted(combo)))
    n_new = len(h.vertices) * ell
    classes = tuple(v for v in sorted(h.vertices) for _ in range(ell))
    return OrderedHypergraph(h.r, tuple(range(1, n_new + 1)), tuple(sorted(new_edges)), classes)


def is_scattered(m: OrderedMatching, class_of: dict[int, int]) -> bool:
    """At most one matching vertex per blow-up class."""
    seen: set[int] = set()
    for e in m.edges:
        for v in e:
            c = class_of[v]
            if c in seen:
                return False
            seen.add(c)
    return True


def remove_letter_matching(m: OrderedMatching, j: int) -> OrderedMatching:
    """Drop the j-th vertex of every edge and recompress the rest."""
    if m.r < 2:
        raise RangeError("letter removal needs r >= 2")
    if not 1 <= j <= m.r:
        raise RangeError(f"letter index must lie in 1..{m.r}, got {j}")
    edges = sorted(e[: j - 1] + e[j:] for e in m.edges)
    return OrderedMatching(m.r - 1, tuple(edges)).canonicalize()
