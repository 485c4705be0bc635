"""Declarative Monte Carlo experiments with reproducible seeding.

Every row of an experiment derives its own seed from (master, n, trial), so
results are independent of scheduling and identical across reruns; wall-clock
times are the one nondeterministic column.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .cliques import Cube, PatternSet, contains_copy, good_edge_census, max_clique
from .errors import InsufficientData, SizeMismatch
from .matchings import (
    OrderedMatching,
    blow_up,
    build_hk,
    from_word,
    pattern_of_pair,
)
from .patterns import Pattern, parse_partition
from .sampling import derive_seed, sample_online, sample_uniform

EXPERIMENT_KINDS = ("zvalue", "spanning", "goodedge", "containment", "onlinecheck")

CSV_FIELDS = ("n", "trial", "seed", "value", "status", "elapsed_s")


@dataclass(frozen=True)
class ExperimentSpec:
    """One declarative Monte Carlo job."""

    kind: str
    r: int
    n_grid: tuple[int, ...]
    trials: int
    master_seed: int
    patterns: str | None = None
    solver: str = "auto"
    budget: float = 30.0
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        grid = tuple(self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n grid must be nonempty and strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.budget <= 0:
            raise ValueError("budget must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        grid = data.pop("n_grid", None)
        if grid is None:
            lo, hi, ratio = data.pop("n_min"), data.pop("n_max"), data.pop("ratio", 2)
            grid, n = [], lo
            while n <= hi:
                grid.append(n)
                n = math.ceil(n * ratio)
        return cls(
            kind=data["kind"],
            r=data["r"],
            n_grid=tuple(grid),
            trials=data["trials"],
            master_seed=data["master_seed"],
            patterns=data.get("patterns"),
            solver=data.get("solver", "auto"),
            budget=data.get("budget", 30.0),
            params=data.get("params", {}),
        )

    @classmethod
    def from_json(cls, path: str) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "r": self.r,
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "patterns": self.patterns,
            "solver": self.solver,
            "budget": self.budget,
            "params": self.params,
        }


@dataclass(frozen=True)
class ResultRecord:
    n: int
    trial: int
    seed: int
    value: int | str | None
    status: str  # Exact | LowerBound | Failed
    elapsed: float


@lru_cache(maxsize=4)
def _planted_blowup(cube: Cube, k: int, ell: int):
    return blow_up(build_hk(cube, k), ell)


def _cube_from_params(params: dict) -> Cube:
    return Cube(Pattern(params["cube_word"]), parse_partition(params["cube_partition"]))


def _spanning_count(m: OrderedMatching, sizes: Sequence[int]) -> int:
    bounds = [0]
    for b in sizes:
        bounds.append(bounds[-1] + b)
    if bounds[-1] != m.r * m.n or len(sizes) != m.r:
        raise SizeMismatch("block sizes must partition the vertex range into r blocks")
    count = 0
    for e in m.edges:
        if all(bounds[i] < e[i] <= bounds[i + 1] for i in range(m.r)):
            count += 1
    return count


def run_row(spec: ExperimentSpec, n: int, trial: int) -> ResultRecord:
    """Measure one (n, trial) cell; failures are recorded, not raised."""
    seed = derive_seed(spec.master_seed, n, trial)
    import time as _time

    t0 = _time.monotonic()
    try:
        if spec.kind == "zvalue":
            ps = PatternSet.from_spec(spec.r, spec.patterns)
            m = sample_uniform(spec.r, n, seed)
            res = max_clique(m, ps, spec.solver, spec.budget)
            return ResultRecord(n, trial, seed, res.size, res.status, _time.monotonic() - t0)
        if spec.kind == "spanning":
            m = sample_uniform(spec.r, n, seed)
            sizes = spec.params.get("sizes") or [n] * spec.r
            return ResultRecord(
                n, trial, seed, _spanning_count(m, sizes), "Exact", _time.monotonic() - t0
            )
        if spec.kind == "goodedge":
            cube = _cube_from_params(spec.params)
            k, ell = spec.params["k"], spec.params["ell"]
            m = sample_uniform(spec.r, n, seed)
            census = good_edge_census(m, _planted_blowup(cube, k, ell), cube, k, ell)
            return ResultRecord(n, trial, seed, census.y, "Exact", _time.monotonic() - t0)
        if spec.kind == "containment":
            h = from_word(spec.params["h_word"])
            m = sample_uniform(spec.r, n, seed)
            found, _ = contains_copy(m, h)
            return ResultRecord(n, trial, seed, int(found), "Exact", _time.monotonic() - t0)
        if spec.kind == "onlinecheck":
            steps = spec.params.get("steps", 2)
            m = sample_online(spec.r, n, seed, steps)
            value = (
                pattern_of_pair(m.edges[0], m.edges[1]).word if m.n >= 2 else "A" * spec.r
            )
            return ResultRecord(n, trial, seed, value, "Exact", _time.monotonic() - t0)
        raise ValueError(spec.kind)
    except Exception as exc:  # noqa: BLE001 -- a bad row must not sink the run
        return ResultRecord(n, trial, seed, f"{type(exc).__name__}: {exc}", "Failed", _time.monotonic() - t0)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[ResultRecord]:
    """All (n, trial) rows in canonical order; rows are seed-isolated, so the
    worker count never changes the values."""
    cells = [(n, trial) for n in spec.n_grid for trial in range(spec.trials)]
    if workers <= 1:
        records = [run_row(spec, n, trial) for n, trial in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_row_star, [(spec, n, t) for n, t in cells], chunksize=1))
    records.sort(key=lambda rec: (rec.n, rec.trial))
    return records


def _row_star(args) -> ResultRecord:
    return run_row(*args)


# ---------------------------------------------------------------------------
# statistics over result rows


@dataclass(frozen=True)
class FitReport:
    slope: float
    intercept: float
    stderr: float
    n_values: tuple[int, ...]
    excluded: int  # rows dropped because they were not Exact


def fit_exponent(records: Sequence[ResultRecord]) -> FitReport:
    """Least squares on (log n, log median value), Exact rows only."""
    excluded = sum(1 for rec in records if rec.status != "Exact")
    per_n: dict[int, list[float]] = {}
    for rec in records:
        if rec.status == "Exact" and isinstance(rec.value, (int, float)):
            per_n.setdefault(rec.n, []).append(float(rec.value))
    points = [
        (math.log(n), math.log(statistics.median(vals)))
        for n, vals in sorted(per_n.items())
        if statistics.median(vals) > 0
    ]
    if len(points) < 3:
        raise InsufficientData("need medians at 3 or more distinct n")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    slope = sum((x - xbar) * (y - ybar) for x, y in points) / sxx
    intercept = ybar - slope * xbar
    resid = sum((y - (intercept + slope * x)) ** 2 for x, y in points)
    dof = max(len(points) - 2, 1)
    stderr = math.sqrt(resid / dof / sxx)
    return FitReport(slope, intercept, stderr, tuple(sorted(per_n)), excluded)


@dataclass(frozen=True)
class SpanningStats:
    mean: float
    variance: float
    expected: float
    trials: int
    values: tuple[int, ...]


def spanning_census(
    r: int, n: int, sizes: Sequence[int], trials: int, seed: int
) -> SpanningStats:
    """Empirical spanning-edge counts for fixed block sizes against the exact
    expectation prod(b_i) / C(rn-1, r-1)."""
    if sum(sizes) != r * n or len(sizes) != r:
        raise SizeMismatch("sizes must be r nonnegative integers summing to rn")
    values = []
    for t in range(trials):
        m = sample_uniform(r, n, derive_seed(seed, n, t))
        values.append(_spanning_count(m, sizes))
    expected = float(
        Fraction(math.prod(sizes), comb(r * n - 1, r - 1))
    )
    mean = statistics.fmean(values)
    variance = statistics.pvariance(values)
    return SpanningStats(mean, variance, expected, trials, tuple(values))


def containment_frequency(
    h: OrderedMatching, r: int, n: int, trials: int, seed: int
) -> float:
    """Fraction of uniform samples containing an order-isomorphic copy of h."""
    hits = 0
    for t in range(trials):
        m = sample_uniform(r, n, derive_seed(seed, n, t))
        if contains_copy(m, h)[0]:
            hits += 1
    return hits / trials


@dataclass(frozen=True)
class ConcentrationRow:
    n: int
    median: float
    iqr: float
    spread: float  # iqr / median


@dataclass(frozen=True)
class ConcentrationReport:
    rows: tuple[ConcentrationRow, ...]
    shrinking: bool  # spread at the largest n is below the smallest n's


def concentration_stats(records: Sequence[ResultRecord]) -> ConcentrationReport:
    per_n: dict[int, list[float]] = {}
    for rec in records:
        if isinstance(rec.value, (int, float)):
            per_n.setdefault(rec.n, []).append(float(rec.value))
    rows = []
    for n, vals in sorted(per_n.items()):
        if len(vals) < 5:
            raise InsufficientData(f"need at least 5 trials per n, got {len(vals)} at n={n}")
        med = statistics.median(vals)
        q = statistics.quantiles(vals, n=4)
        iqr = q[2] - q[0]
        rows.append(ConcentrationRow(n, med, iqr, iqr / med if med else math.inf))
    if not rows:
        raise InsufficientData("no usable rows")
    shrinking = rows[-1].spread < rows[0].spread if len(rows) > 1 else True
    return ConcentrationReport(tuple(rows), shrinking)


# ---------------------------------------------------------------------------
# persistence


def write_csv(records: Sequence[ResultRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(
                [rec.n, rec.trial, rec.seed, rec.value, rec.status, f"{rec.elapsed:.3f}"]
            )


def read_csv(path: str) -> list[ResultRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            raw = row["value"]
            try:
                value: int | str = int(raw)
            except ValueError:
                value = raw
            records.append(
                ResultRecord(
                    int(row["n"]),
                    int(row["trial"]),
                    int(row["seed"]),
                    value,
                    row["status"],
                    float(row["elapsed_s"]),
                )
            )
    return records


def write_fit_json(report: FitReport, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(
            {
                "slope": report.slope,
                "intercept": report.intercept,
                "stderr": report.stderr,
                "n_values": list(report.n_values),
                "excluded": report.excluded,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
