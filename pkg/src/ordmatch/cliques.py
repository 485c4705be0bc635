"""Exact solvers and counters for pattern-constrained sub-matchings.

The central quantity is the largest sub-matching of M whose edge pairs all
realize patterns from a fixed allowed set. Three exact solvers cover the
practically relevant regimes: a cut-vector scan for the full partite family,
a longest-path dynamic program for instances whose min-ordered relation is
verified transitive, and a branch-and-bound with greedy-coloring bounds for
everything else.
"""

from __future__ import annotations

import time
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations, permutations, product as iproduct
from math import comb, factorial
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    GeometryMismatch,
    InternalError,
    InvalidPartition,
    NotPartite,
    RangeError,
    SizeMismatch,
    SolverMismatch,
    UnboundedFamily,
)
from .matchings import (
    OrderedHypergraph,
    OrderedMatching,
    build_mega_cliques,
    is_r_partite,
    pattern_of_pair,
)
from .patterns import (
    Cube,
    Pattern,
    cube_expand,
    enumerate_patterns,
    harmonic_family,
    parse_partition,
)

CLIQUE_COUNT_CAP = 24  # max r*k for exhaustive clique counting
AVOIDING_TUPLE_CAP = 10**7
CHAIN_GENERIC_CAP = 2048  # bitset triple check is cubic; keep it small
PARTITION_R4_CAP = 200


# ---------------------------------------------------------------------------
# pattern sets


@dataclass(frozen=True)
class PatternSet:
    """A nonempty family of same-uniformity patterns with a provenance tag."""

    r: int
    members: frozenset[Pattern]
    tag: str = "custom"

    def __post_init__(self) -> None:
        if not self.members:
            raise SizeMismatch("pattern set must be nonempty")
        if any(p.r != self.r for p in self.members):
            raise SizeMismatch("pattern set mixes uniformities")

    @classmethod
    def from_words(cls, words: Sequence[str], tag: str = "custom") -> "PatternSet":
        pats = frozenset(Pattern(w) for w in words)
        return cls(next(iter(pats)).r, pats, tag)

    @classmethod
    def named(cls, r: int, name: str) -> "PatternSet":
        return cls(r, frozenset(enumerate_patterns(r, name)), name)

    @classmethod
    def from_spec(cls, r: int, text: str) -> "PatternSet":
        """Parse the pattern-set grammar used by the CLI and configs.

        all | collectable | partite | dyck | harmonic:<WORD>
        | cube:<WORD>:<PARTITION> | cube-complement:<WORD>:<PARTITION>
        | list:<W1,W2,...>
        """
        head, _, rest = text.partition(":")
        if head in ("all", "collectable", "partite", "dyck"):
            ps = cls.named(r, head)
        elif head == "harmonic":
            ps = cls(Pattern(rest).r, frozenset(harmonic_family(Pattern(rest))), text)
        elif head in ("cube", "cube-complement"):
            word, _, part_text = rest.partition(":")
            cube = Cube(Pattern(word), parse_partition(part_text))
            members = frozenset(cube_expand(cube))
            if head == "cube-complement":
                if not cube.base.is_partite:
                    raise NotPartite("cube-complement needs a partite base pattern")
                members = frozenset(_partite_family(cube.base.r)) - members
            ps = cls(cube.base.r, members, text)
        elif head == "list":
            ps = cls.from_words([w for w in rest.split(",") if w], text)
        else:
            raise ValueError(f"unknown pattern-set spec {text!r}")
        if ps.r != r:
            raise SizeMismatch(f"spec {text!r} has uniformity {ps.r}, expected {r}")
        return ps

    def words(self) -> frozenset[str]:
        return frozenset(p.word for p in self.members)

    def sorted_words(self) -> list[str]:
        return sorted(self.words())

    @property
    def is_partite_family(self) -> bool:
        """Exactly the family of all r-partite patterns."""
        if len(self.members) != 1 << (self.r - 1):
            return False
        return all(p.is_partite for p in self.members)

    @property
    def all_noncollectable(self) -> bool:
        return all(not p.is_collectable for p in self.members)


def _partite_family(r: int) -> list[Pattern]:
    # first block AB, every other block AB or BA
    pats = []
    for mask in range(1 << (r - 1)):
        word = "AB" + "".join(
            "BA" if mask >> i & 1 else "AB" for i in range(r - 1)
        )
        pats.append(Pattern(word))
    return pats


def _word_key(word: str) -> int:
    """Bitmask of A-positions; the fingerprint used for fast pair lookups."""
    key = 0
    for pos, ch in enumerate(word):
        if ch == "A":
            key |= 1 << pos
    return key


def _row_keys(E: np.ndarray, i: int) -> np.ndarray:
    """Pair fingerprints of edge i (the earlier one) against all edges after it.

    The A at coordinate m of the earlier edge lands at merged position
    m + (number of later-edge vertices below it).
    """
    rest = E[i + 1 :]
    keys = np.zeros(len(rest), dtype=np.int64)
    for m in range(E.shape[1]):
        c = (rest < E[i, m]).sum(axis=1)
        keys |= np.int64(1) << (m + c)
    return keys


def _allowed_key_array(ps: PatternSet) -> np.ndarray:
    return np.array(sorted(_word_key(w) for w in ps.words()), dtype=np.int64)


class PatternGraph:
    """Edges of a matching as vertices; bitset rows mark allowed pair patterns."""

    def __init__(self, m: OrderedMatching, ps: PatternSet):
        if m.r != ps.r:
            raise SizeMismatch("matching and pattern set have different uniformity")
        self.n = m.n
        E = np.array(m.edges, dtype=np.int64)
        allowed = _allowed_key_array(ps)
        mat = np.zeros((self.n, self.n), dtype=bool)
        for i in range(self.n - 1):
            hit = np.isin(_row_keys(E, i), allowed, assume_unique=False)
            mat[i, i + 1 :] = hit
            mat[i + 1 :, i] = hit
        self.rows = [
            int.from_bytes(np.packbits(mat[i], bitorder="little").tobytes(), "little")
            for i in range(self.n)
        ]

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.rows]


# ---------------------------------------------------------------------------
# solve results and verification


@dataclass(frozen=True)
class SolveResult:
    size: int
    witness: tuple[int, ...]
    status: str  # Exact | LowerBound
    solver: str
    elapsed: float


def verify_clique(m: OrderedMatching, ps: PatternSet, subset: Sequence[int]) -> bool:
    """Every pair of the selected edges realizes an allowed pattern."""
    idx = sorted(subset)
    if len(idx) > 64:
        E = np.array([m.edges[i] for i in idx], dtype=np.int64)
        return _pairs_all_allowed(E, ps)
    words = ps.words()
    for a, b in combinations(idx, 2):
        if pattern_of_pair(m.edges[a], m.edges[b]).word not in words:
            return False
    return True


def _pairs_all_allowed(E: np.ndarray, ps: PatternSet) -> bool:
    # Chunked count-code evaluation over all ordered pairs (i earlier, j later).
    n, r = E.shape
    dtype = np.uint32 if (r + 1) ** r < 2**32 else np.uint64
    codes = np.array(sorted(_word_count_code(w, r) for w in ps.words()), dtype=dtype)
    mult = (r + 1) ** np.arange(r, dtype=dtype)
    block = max(1, min(512, (1 << 21) // max(n, 1)))
    for lo in range(0, n - 1, block):
        hi = min(lo + block, n - 1)
        bsz = hi - lo
        cols = E[lo + 1 :]
        width = cols.shape[0]
        code = np.zeros((bsz, width), dtype=dtype)
        for mm in range(r):
            x = E[lo:hi, mm][:, None]
            c = np.zeros((bsz, width), dtype=np.uint8)
            for b in range(r):
                c += cols[None, :, b] < x
            code += c.astype(dtype) * mult[mm]
        hit = code == codes[0]
        for extra in codes[1:]:
            hit |= code == extra
        for off in range(bsz):
            if not bool(hit[off, off:].all()):
                return False
    return True


def _checked(m, ps, size, witness, status, solver, t0) -> SolveResult:
    witness = tuple(sorted(witness))
    if len(witness) != size or not verify_clique(m, ps, witness):
        raise InternalError(f"solver {solver} produced an invalid witness")
    return SolveResult(size, witness, status, solver, time.monotonic() - t0)


# ---------------------------------------------------------------------------
# partition solver (full partite family only)


class _MaxSegtree:
    """Range add over positions, global (max, leftmost argmax)."""

    def __init__(self, size: int):
        self.size = 1
        while self.size < size:
            self.size *= 2
        self.mx = [0] * (2 * self.size)
        self.arg = [0] * (2 * self.size)
        for leaf in range(self.size):
            node = leaf + self.size
            self.arg[node] = leaf
        for node in range(self.size - 1, 0, -1):
            self.arg[node] = self.arg[2 * node]
        self.lazy = [0] * (2 * self.size)

    def _pull(self, node: int) -> None:
        left, right = 2 * node, 2 * node + 1
        if self.mx[left] >= self.mx[right]:
            self.mx[node], self.arg[node] = self.mx[left], self.arg[left]
        else:
            self.mx[node], self.arg[node] = self.mx[right], self.arg[right]
        self.mx[node] += self.lazy[node]

    def add(self, lo: int, hi: int, val: int, node: int = 1, nlo: int = 0, nhi: int | None = None) -> None:
        if nhi is None:
            nhi = self.size
        if hi <= nlo or nhi <= lo:
            return
        if lo <= nlo and nhi <= hi:
            self.mx[node] += val
            self.lazy[node] += val
            return
        mid = (nlo + nhi) // 2
        self.add(lo, hi, val, 2 * node, nlo, mid)
        self.add(lo, hi, val, 2 * node + 1, mid, nhi)
        self._pull(node)

    def best(self) -> tuple[int, int]:
        return self.mx[1], self.arg[1]


def _partition_solve(m: OrderedMatching) -> tuple[int, list[int], tuple[int, ...]]:
    """Largest spanning-edge count over all cut vectors, with the best cuts.

    A cut vector (c_1 < ... < c_(r-1)) splits 1..rn into r intervals; an edge
    spans when it has one vertex per interval, i.e. c_i in [x_i, x_(i+1) - 1].
    """
    r, n = m.r, m.n
    E = m.edges
    total = r * n
    if r == 2:
        diff = [0] * (total + 2)
        for x, y in E:
            diff[x] += 1
            diff[y] -= 1
        best, best_c, run = 0, 0, 0
        for c in range(1, total + 1):
            run += diff[c]
            if run > best:
                best, best_c = run, c
        cuts = (best_c,)
    elif r == 3:
        # sweep c1 upward, maintaining spanning counts over c2 in a segment tree
        tree = _MaxSegtree(total + 1)
        add_at: list[list[tuple[int, int, int]]] = [[] for _ in range(total + 2)]
        for x, y, z in E:
            add_at[x].append((y, z, 1))
            add_at[y].append((y, z, -1))
        best, cuts = 0, (0, 0)
        for c1 in range(1, total + 1):
            for y, z, val in add_at[c1]:
                tree.add(y, z, val)
            val, c2 = tree.best()
            if val > best:
                best, cuts = val, (c1, c2)
    elif r == 4:
        if n > PARTITION_R4_CAP:
            raise CapExceeded(f"r=4 partition solver capped at n={PARTITION_R4_CAP}")
        axes = [sorted({e[i] for e in E}) for i in range(3)]
        shape = tuple(len(a) + 1 for a in axes)
        grid = np.zeros(shape, dtype=np.int32)
        for e in E:
            lo = [bisect_left(axes[i], e[i]) for i in range(3)]
            hi = [bisect_left(axes[i], e[i + 1]) for i in range(3)]
            if all(l < h for l, h in zip(lo, hi)):
                grid[lo[0], lo[1], lo[2]] += 1
                grid[hi[0], lo[1], lo[2]] -= 1
                grid[lo[0], hi[1], lo[2]] -= 1
                grid[lo[0], lo[1], hi[2]] -= 1
                grid[hi[0], hi[1], lo[2]] += 1
                grid[hi[0], lo[1], hi[2]] += 1
                grid[lo[0], hi[1], hi[2]] += 1
                grid[hi[0], hi[1], hi[2]] -= 1
        cov = grid.cumsum(0).cumsum(1).cumsum(2)
        flat = int(cov.argmax())
        best = int(cov.max())
        ii = np.unravel_index(flat, shape)
        cuts = tuple(axes[d][min(ii[d], len(axes[d]) - 1)] for d in range(3))
    else:
        raise SolverMismatch("partition solver supports r <= 4; use bb for larger r")
    full_cuts = (0,) + tuple(cuts) + (total,)
    witness = [
        i
        for i, e in enumerate(E)
        if all(full_cuts[d] < e[d] <= full_cuts[d + 1] for d in range(r))
    ]
    if len(witness) != best and best > 0:
        raise InternalError("partition solver cut reconstruction mismatch")
    return best, witness, tuple(cuts)


# ---------------------------------------------------------------------------
# chain solver (per-instance transitivity proof, then longest path)


def _forward_rows(m: OrderedMatching, ps: PatternSet) -> Iterator[np.ndarray]:
    E = np.array(m.edges, dtype=np.int64)
    allowed = _allowed_key_array(ps)
    for i in range(m.n - 1):
        yield np.isin(_row_keys(E, i), allowed)


def _word_count_code(word: str, r: int) -> int:
    # The pair pattern is equivalent to its count vector (c_1..c_r), where c_m
    # counts later-edge vertices below the earlier edge's m-th vertex; radix
    # encoding in base r+1 keeps adjacency tests in small unsigned integers.
    c, below = [], 0
    for ch in word:
        if ch == "A":
            c.append(below)
        else:
            below += 1
    return sum(ci * (r + 1) ** mi for mi, ci in enumerate(c))


def _chain_suffix_profile(m: OrderedMatching, ps: PatternSet) -> list[int] | None:
    """If every successor set is a suffix in min order, return its start indices."""
    n, r = m.n, m.r
    E = np.array(m.edges, dtype=np.int64)
    dtype = np.uint32 if (r + 1) ** r < 2**32 else np.uint64
    codes = np.array(sorted(_word_count_code(w, r) for w in ps.words()), dtype=dtype)
    mult = (r + 1) ** np.arange(r, dtype=dtype)
    starts = [n] * n
    block = max(1, min(512, (1 << 21) // max(n, 1)))
    for lo in range(0, n - 1, block):
        hi = min(lo + block, n - 1)
        bsz = hi - lo
        cols = E[lo + 1 :]  # candidate successors of every row in the block
        width = cols.shape[0]
        code = np.zeros((bsz, width), dtype=dtype)
        for mm in range(r):
            x = E[lo:hi, mm][:, None]
            c = np.zeros((bsz, width), dtype=np.uint8)
            for b in range(r):
                c += cols[None, :, b] < x
            code += c.astype(dtype) * mult[mm]
        hit = code == codes[0]
        for extra in codes[1:]:
            hit |= code == extra
        # inside the block, row off may only see columns after its own edge
        for off in range(bsz):
            if off:
                hit[off, :off] = False
        totals = hit.sum(axis=1)
        firsts = hit.argmax(axis=1)
        for off in range(bsz):
            if totals[off] == 0:
                continue
            if totals[off] != width - firsts[off]:
                return None  # successors are not a contiguous tail
            starts[lo + off] = int(firsts[off]) + lo + 1
    return starts


def _chain_from_suffixes(starts: list[int]) -> tuple[int, list[int]] | None:
    """Longest path when successor sets are suffixes and the relation is
    transitive; returns None when the transitivity test fails."""
    n = len(starts)
    sufmin = [n + 1] * (n + 1)
    for i in range(n - 1, -1, -1):
        sufmin[i] = min(starts[i], sufmin[i + 1])
    for i in range(n):
        if starts[i] < n and sufmin[starts[i]] < starts[i]:
            return None  # some successor reaches outside succ(i)
    dp = [1] * n
    best_from_val = [0] * (n + 1)
    best_from_arg = [-1] * (n + 1)
    for i in range(n - 1, -1, -1):
        if starts[i] < n:
            dp[i] = 1 + best_from_val[starts[i]]
        if dp[i] > best_from_val[i + 1]:
            best_from_val[i] = dp[i]
            best_from_arg[i] = i
        else:
            best_from_val[i] = best_from_val[i + 1]
            best_from_arg[i] = best_from_arg[i + 1]
    size = best_from_val[0]
    witness = []
    i = best_from_arg[0]
    while i >= 0:
        witness.append(i)
        i = best_from_arg[starts[i]] if starts[i] < len(starts) else -1
        if len(witness) == size:
            break
    return size, witness


def _chain_generic(m: OrderedMatching, ps: PatternSet) -> tuple[int, list[int]] | None:
    """Bitset triple check of transitivity, then longest-path DP."""
    n = m.n
    succ = [0] * n
    for i, row in enumerate(_forward_rows(m, ps)):
        bits = int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
        succ[i] = bits << (i + 1)
    for i in range(n):
        s = succ[i]
        rest = s
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if succ[j] & ~s:
                return None
    dp = [1] * n
    nxt = [-1] * n
    for i in range(n - 1, -1, -1):
        rest = succ[i]
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if dp[j] + 1 > dp[i]:
                dp[i] = dp[j] + 1
                nxt[i] = j
    best = max(range(n), key=lambda i: (dp[i], -i))
    witness = []
    i = best
    while i >= 0:
        witness.append(i)
        i = nxt[i]
    return dp[best], witness


# ---------------------------------------------------------------------------
# branch and bound with greedy coloring bounds


class _BudgetExhausted(Exception):
    pass


def _degeneracy_order(mat: np.ndarray) -> list[int]:
    n = mat.shape[0]
    deg = mat.sum(axis=1).astype(np.int64)
    alive = np.ones(n, dtype=bool)
    order = []
    big = np.int64(1 << 40)
    for _ in range(n):
        masked = np.where(alive, deg, big)
        v = int(masked.argmin())  # ties resolve to the smallest index
        order.append(v)
        alive[v] = False
        deg -= mat[v].astype(np.int64)
    return order


def _bb_max_clique(
    rows: list[int], n: int, deadline: float | None
) -> tuple[int, list[int], bool]:
    """Tomita-style search: greedy coloring bound, reverse-color branching."""
    best = 0
    best_wit: list[int] = []
    node_counter = 0

    # greedy warm start over vertex order
    mask_all = (1 << n) - 1
    cur, cur_mask = [], mask_all
    for v in range(n):
        if cur_mask >> v & 1:
            cur.append(v)
            cur_mask &= rows[v]
    best, best_wit = len(cur), cur

    def expand(rsize: int, pmask: int, stack: list[int]) -> None:
        nonlocal best, best_wit, node_counter
        node_counter += 1
        if deadline is not None and node_counter % 512 == 0 and time.monotonic() > deadline:
            raise _BudgetExhausted
        order: list[int] = []
        bound: list[int] = []
        color = 0
        q = pmask
        while q:
            color += 1
            avail = q
            while avail:
                v = (avail & -avail).bit_length() - 1
                bit = 1 << v
                order.append(v)
                bound.append(color)
                q &= ~bit
                avail &= ~rows[v] & ~bit
        for v, c in zip(reversed(order), reversed(bound)):
            if rsize + c <= best:
                return
            bit = 1 << v
            newp = pmask & rows[v]
            stack.append(v)
            if newp:
                expand(rsize + 1, newp, stack)
            elif rsize + 1 > best:
                best = rsize + 1
                best_wit = stack.copy()
            stack.pop()
            pmask &= ~bit

    try:
        expand(0, mask_all, [])
        return best, best_wit, True
    except _BudgetExhausted:
        return best, best_wit, False


def _solve_bb(m: OrderedMatching, ps: PatternSet, budget: float) -> tuple[int, list[int], bool]:
    E = np.array(m.edges, dtype=np.int64)
    n = m.n
    allowed = _allowed_key_array(ps)
    mat = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        hit = np.isin(_row_keys(E, i), allowed)
        mat[i, i + 1 :] = hit
        mat[i + 1 :, i] = hit
    order = _degeneracy_order(mat)
    order.reverse()  # highest-degeneracy vertices first
    perm = np.array(order)
    mat = mat[np.ix_(perm, perm)]
    rows = [
        int.from_bytes(np.packbits(mat[i], bitorder="little").tobytes(), "little")
        for i in range(n)
    ]
    deadline = time.monotonic() + budget if budget else None
    size, wit, exact = _bb_max_clique(rows, n, deadline)
    return size, [order[v] for v in wit], exact


# ---------------------------------------------------------------------------
# dispatcher


def max_clique(
    m: OrderedMatching,
    ps: PatternSet,
    solver: str = "auto",
    budget: float = 30.0,
) -> SolveResult:
    """Largest allowed sub-matching of m; witness is always re-verified.

    ``partition`` applies only to the full partite family (r <= 4);
    ``chain`` applies only when the min-ordered relation is transitive on
    this instance; ``bb`` always applies and honors the time budget.
    """
    t0 = time.monotonic()
    if m.r != ps.r:
        raise SizeMismatch("matching and pattern set have different uniformity")
    if m.n <= 1:
        return _checked(m, ps, m.n, list(range(m.n)), "Exact", solver, t0)

    if solver == "partition":
        if not ps.is_partite_family:
            raise SolverMismatch("partition solver needs the full partite family")
        size, wit, _ = _partition_solve(m)
        return _checked(m, ps, size, wit, "Exact", "partition", t0)

    if solver == "chain":
        starts = _chain_suffix_profile(m, ps)
        if starts is not None:
            res = _chain_from_suffixes(starts)
            if res is not None:
                return _checked(m, ps, res[0], res[1], "Exact", "chain", t0)
        if m.n <= CHAIN_GENERIC_CAP:
            res = _chain_generic(m, ps)
            if res is not None:
                return _checked(m, ps, res[0], res[1], "Exact", "chain", t0)
            raise SolverMismatch("min-ordered relation is not transitive here")
        raise SolverMismatch(
            f"cannot certify transitivity above n={CHAIN_GENERIC_CAP}; use bb"
        )

    if solver == "bb":
        size, wit, exact = _solve_bb(m, ps, budget)
        return _checked(m, ps, size, wit, "Exact" if exact else "LowerBound", "bb", t0)

    if solver == "auto":
        if ps.is_partite_family and m.r <= 4 and (m.r != 4 or m.n <= PARTITION_R4_CAP):
            size, wit, _ = _partition_solve(m)
            return _checked(m, ps, size, wit, "Exact", "partition", t0)
        starts = _chain_suffix_profile(m, ps)
        if starts is not None:
            res = _chain_from_suffixes(starts)
            if res is not None:
                return _checked(m, ps, res[0], res[1], "Exact", "chain", t0)
        size, wit, exact = _solve_bb(m, ps, budget)
        return _checked(m, ps, size, wit, "Exact" if exact else "LowerBound", "bb", t0)

    raise ValueError(f"unknown solver {solver!r}")


# ---------------------------------------------------------------------------
# exhaustive clique enumeration on a fixed vertex set


def iter_cliques(r: int, ps: PatternSet, k: int) -> Iterator[OrderedMatching]:
    """All allowed cliques of size k on vertices 1..rk, in word order.

    Vertices are assigned left to right, either extending an open edge or
    opening the next one; every assignment updates the merged word of each
    affected pair, pruned against the prefix tree of the allowed words. A
    surviving full assignment therefore has all pair words allowed, and every
    clique appears exactly once.
    """
    if r * k > CLIQUE_COUNT_CAP:
        raise CapExceeded(f"clique enumeration capped at r*k <= {CLIQUE_COUNT_CAP}")
    if ps.r != r:
        raise SizeMismatch("pattern set has wrong uniformity")
    allowed = ps.words()
    pref_ok = {w[:i] for w in allowed for i in range(2 * r + 1)}
    rk = r * k
    edge_verts: list[list[int]] = []
    sigs: dict[tuple[int, int], str] = {}

    def rec(v: int) -> Iterator[OrderedMatching]:
        if v > rk:
            yield OrderedMatching(r, tuple(tuple(e) for e in edge_verts))
            return
        m = len(edge_verts)
        for i in range(m):
            if len(edge_verts[i]) == r:
                continue
            updates = []
            ok = True
            for j in range(m):
                if j == i:
                    continue
                key = (i, j) if i < j else (j, i)
                grown = sigs[key] + ("A" if i == key[0] else "B")
                if grown not in pref_ok:
                    ok = False
                    break
                updates.append((key, grown))
            if ok:
                saved = [(key, sigs[key]) for key, _ in updates]
                for key, grown in updates:
                    sigs[key] = grown
                edge_verts[i].append(v)
                yield from rec(v + 1)
                edge_verts[i].pop()
                for key, old in saved:
                    sigs[key] = old
        if m < k:
            fresh = ["A" * len(edge_verts[i]) + "B" for i in range(m)]
            if all(sig in pref_ok for sig in fresh):
                for i in range(m):
                    sigs[(i, m)] = fresh[i]
                edge_verts.append([v])
                yield from rec(v + 1)
                edge_verts.pop()
                for i in range(m):
                    del sigs[(i, m)]

    yield from rec(1)


def count_cliques(r: int, ps: PatternSet, k: int) -> int:
    """Exact number of allowed cliques of size k on 1..rk."""
    return sum(1 for _ in iter_cliques(r, ps, k))


def max_clique_global(r: int, ps: PatternSet, cap: int | None = None) -> int:
    """Largest clique any matching can realize for an all-non-collectable set.

    Sub-cliques of cliques are cliques, so the search stops at the first
    empty size level.
    """
    if not ps.all_noncollectable:
        raise UnboundedFamily("a collectable member allows unbounded cliques")
    limit = cap if cap is not None else CLIQUE_COUNT_CAP // r
    k = 2
    while True:
        if k + 1 > limit:
            raise CapExceeded(f"no empty level found up to k={limit}")
        if count_cliques(r, ps, k + 1) == 0:
            return k
        k += 1


# ---------------------------------------------------------------------------
# chains and antichains under the coordinate poset


@dataclass(frozen=True)
class ChainAntichain:
    chain: tuple[int, ...]
    antichain: tuple[int, ...]


def _kuhn_matching(n_left: int, adj: list[list[int]], n_right: int) -> tuple[list[int], list[int]]:
    match_l = [-1] * n_left
    match_r = [-1] * n_right

    def try_augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_r[v] == -1 or try_augment(match_r[v], seen):
                    match_l[u] = v
                    match_r[v] = u
                    return True
        return False

    for u in range(n_left):
        try_augment(u, [False] * n_right)
    return match_l, match_r


def chain_antichain(m: OrderedMatching, cube: Cube) -> ChainAntichain:
    """Longest chain and a maximum antichain of the coordinate poset.

    The poset compares edges coordinate-wise on the base's first part
    (ascending on AB blocks, descending on BA blocks); comparable pairs are
    exactly the cube patterns, so the chain is a cube clique and the
    antichain a clique of the remaining partite patterns.
    """
    if m.r != cube.base.r:
        raise SizeMismatch("matching and cube have different uniformity")
    if not cube.base.is_partite:
        raise InvalidPartition("coordinate poset needs a partite base pattern")
    if any(len(part) != 1 for part in cube.partition[1:]):
        raise InvalidPartition("all parts after the first must be singletons")
    if not is_r_partite(m):
        raise NotPartite("matching must be r-partite")
    blocks = cube.base.split_blocks()
    t0ab = [i - 1 for i in cube.partition[0] if blocks[i - 1] == "AB"]
    t0ba = [i - 1 for i in cube.partition[0] if blocks[i - 1] == "BA"]
    n = m.n
    E = m.edges

    def precedes(a: int, b: int) -> bool:
        ea, eb = E[a], E[b]
        return all(ea[i] < eb[i] for i in t0ab) and all(ea[i] > eb[i] for i in t0ba)

    succ = [[] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if precedes(a, b):
                succ[a].append(b)

    # longest chain by DP over the min order
    dp = [1] * n
    nxt = [-1] * n
    for a in range(n - 1, -1, -1):
        for b in succ[a]:
            if dp[b] + 1 > dp[a]:
                dp[a] = dp[b] + 1
                nxt[a] = b
    start = max(range(n), key=lambda a: (dp[a], -a))
    chain = []
    a = start
    while a >= 0:
        chain.append(a)
        a = nxt[a]

    # maximum antichain from a minimum chain cover via Koenig's construction
    match_l, match_r = _kuhn_matching(n, succ, n)
    matched_count = sum(1 for v in match_l if v >= 0)
    reach_l = [False] * n
    reach_r = [False] * n
    queue = [u for u in range(n) if match_l[u] == -1]
    for u in queue:
        reach_l[u] = True
    while queue:
        u = queue.pop()
        for v in succ[u]:
            if not reach_r[v]:
                reach_r[v] = True
                w = match_r[v]
                if w != -1 and not reach_l[w]:
                    reach_l[w] = True
                    queue.append(w)
    antichain = tuple(v for v in range(n) if reach_l[v] and not reach_r[v])
    if len(antichain) != n - matched_count:
        raise InternalError("antichain extraction disagrees with the matching size")
    return ChainAntichain(tuple(chain), antichain)


# ---------------------------------------------------------------------------
# order-isomorphic containment


def contains_copy(
    m: OrderedMatching, h: OrderedMatching
) -> tuple[bool, tuple[int, ...] | None]:
    """Search for a sub-matching of m order-isomorphic to h, with a witness.

    Backtracks over m's edges in min order, pruning on every pairwise
    interleaving against the already-mapped edges.
    """
    if m.r != h.r:
        raise SizeMismatch("matchings have different uniformity")
    if h.n > m.n:
        return False, None
    want = {
        (a, b): pattern_of_pair(h.edges[a], h.edges[b]).word
        for a, b in combinations(range(h.n), 2)
    }
    chosen: list[int] = []

    def rec(idx: int, lo: int) -> bool:
        if idx == h.n:
            return True
        for j in range(lo, m.n - (h.n - idx) + 1):
            ok = True
            for prev_idx, prev_j in enumerate(chosen):
                if pattern_of_pair(m.edges[prev_j], m.edges[j]).word != want[(prev_idx, idx)]:
                    ok = False
                    break
            if ok:
                chosen.append(j)
                if rec(idx + 1, j + 1):
                    return True
                chosen.pop()
        return False

    if rec(0, 0):
        return True, tuple(chosen)
    return False, None


# ---------------------------------------------------------------------------
# good-edge census of a planted blown-up product hypergraph


@dataclass(frozen=True)
class GoodEdgeCensus:
    """Counts from one random matching against a planted blow-up."""

    y: int  # good edges
    z: int  # non-separated pairs of good edges
    lower_bound: int  # best of greedy deletion and y - z
    exact_max: int | None  # exact largest scattered matching (1-cube case)
    scattered: tuple[int, ...]  # witness edge indices into the host matching

    def __post_init__(self) -> None:
        if not self.y >= self.lower_bound >= 0:
            raise InternalError("good-edge bounds out of order")


def good_edge_census(
    rm: OrderedMatching,
    blown: OrderedHypergraph,
    cube: Cube,
    k: int,
    ell: int,
) -> GoodEdgeCensus:
    """Classify edges of rm against the blow-up of the cube's product graph.

    An edge is good when its per-class projection is an edge of the product
    hypergraph; its type records the mega-block clique indices. Two good
    edges separate when their types differ in every coordinate; pairwise
    separated good edges form a scattered matching, hence a cube clique.
    """
    r = cube.base.r
    if rm.r != r or blown.r != r:
        raise SizeMismatch("host matching, blow-up, and cube must share r")
    planted = r * k * ell
    if planted > r * rm.n:
        raise GeometryMismatch("blow-up does not fit inside the host vertex range")
    t = cube.t
    if len(blown.vertices) != planted or blown.classes is None:
        raise GeometryMismatch("blown hypergraph is not a planted labeled blow-up")
    if blown.n_edges != k ** (t + 1) * ell**r:
        raise GeometryMismatch("blown hypergraph has the wrong edge count")

    mega = build_mega_cliques(cube, k)
    type_of_hk_edge: dict[tuple[int, ...], tuple[int, ...]] = {}
    for combo in iproduct(range(k), repeat=t + 1):
        e = tuple(sorted(v for j, h in enumerate(combo) for v in mega[j].edges[h]))
        type_of_hk_edge[e] = combo

    good: list[tuple[int, tuple[int, ...]]] = []
    for idx, e in enumerate(rm.edges):
        if e[-1] > planted:
            continue
        proj = tuple((v - 1) // ell + 1 for v in e)
        if len(set(proj)) != r:
            continue
        typ = type_of_hk_edge.get(proj)
        if typ is not None:
            good.append((idx, typ))

    y = len(good)
    z = 0
    removed = [False] * y
    for a, b in combinations(range(y), 2):
        if any(good[a][1][j] == good[b][1][j] for j in range(t + 1)):
            z += 1
            if not removed[a] and not removed[b]:
                removed[b] = True
    survivors = [good[i][0] for i in range(y) if not removed[i]]
    lower = max(len(survivors), y - z, 0)

    exact = None
    scattered = survivors
    if t == 1:
        by_type: dict[tuple[int, int], int] = {}
        for idx, typ in good:
            by_type.setdefault(typ, idx)  # keep the lexicographically first edge
        adj: list[list[int]] = [[] for _ in range(k)]
        for (h0, h1), _idx in sorted(by_type.items()):
            adj[h0].append(h1)
        match_l, _ = _kuhn_matching(k, adj, k)
        exact = sum(1 for v in match_l if v >= 0)
        scattered = sorted(
            by_type[(h0, match_l[h0])] for h0 in range(k) if match_l[h0] >= 0
        )
        if exact < lower:
            raise InternalError("exact scattered maximum fell below its lower bound")

    witness = tuple(sorted(scattered))
    cube_words = {p.word for p in cube_expand(cube)}
    for a, b in combinations(witness, 2):
        if pattern_of_pair(rm.edges[a], rm.edges[b]).word not in cube_words:
            raise InternalError("scattered witness is not a cube clique")
    return GoodEdgeCensus(y, z, lower, exact, witness)


# ---------------------------------------------------------------------------
# parallel pattern avoidance in permutation tuples


def count_avoiding_tuples(taus: Sequence[Sequence[int]], k: int) -> int:
    """Tuples of permutations of 1..k avoiding (tau_1, ..., tau_d) in parallel:
    no common index set realizes every tau_i at once. Exact brute force."""
    taus = [tuple(t) for t in taus]
    d = len(taus)
    if d == 0:
        raise SizeMismatch("need at least one forbidden pattern")
    msize = len(taus[0])
    if any(len(t) != msize or sorted(t) != list(range(1, msize + 1)) for t in taus):
        raise SizeMismatch("forbidden patterns must be same-length permutations")
    if factorial(k) ** d > AVOIDING_TUPLE_CAP:
        raise CapExceeded(f"(k!)^d exceeds {AVOIDING_TUPLE_CAP}")
    if k < msize:
        return factorial(k) ** d

    def standardize(seq: tuple[int, ...]) -> tuple[int, ...]:
        order = sorted(seq)
        return tuple(order.index(x) + 1 for x in seq)

    index_sets = list(combinations(range(k), msize))
    perms = list(permutations(range(1, k + 1)))
    total = 0
    for tup in iproduct(perms, repeat=d):
        hit = False
        for idxs in index_sets:
            if all(
                standardize(tuple(tup[i][a] for a in idxs)) == taus[i] for i in range(d)
            ):
                hit = True
                break
        if not hit:
            total += 1
    return total
