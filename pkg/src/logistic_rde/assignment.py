"""The random assignment benchmark: exact minimum-cost perfect matching
on random cost matrices, Monte Carlo estimation of the expected optimum,
and the exact partial-sum formula it converges to.

With i.i.d. Exponential costs of mean n, the normalized optimum
(1/n) * sum of matched costs has expectation exactly

    1 + 1/4 + 1/9 + ... + 1/n^2,

which increases to zeta(2) = pi^2 / 6. The same limit appears for
uniform(0,1) costs and the raw (unnormalized) sum, because only the cost
density at 0 matters in the limit.

The solver is a dense shortest-augmenting-path method with dual
potentials (u, v): one Dijkstra sweep per row over reduced costs
c[i,j] - u[i] - v[j], followed by a dual update that keeps every reduced
cost nonnegative and every matched edge tight. Those two facts are the
optimality certificate, and they are re-checked after every solve.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .stats import MeanWithError

COST_LAWS = ("exponential_mean_n", "uniform01")

ZETA2 = math.pi ** 2 / 6.0


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """An n-by-n matrix of nonnegative costs plus the law it was drawn
    from (the law fixes the objective normalization)."""

    n: int
    costs: np.ndarray = field(repr=False)
    law: str = "exponential_mean_n"

    def __post_init__(self):
        if self.law not in COST_LAWS:
            raise ValueError(f"unknown cost law {self.law!r}")
        c = np.ascontiguousarray(np.asarray(self.costs, dtype=float))
        if c.shape != (self.n, self.n):
            raise ValueError(f"costs must be {self.n}x{self.n}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("costs must be finite")
        if c.min(initial=0.0) < 0.0:
            raise ValueError("costs must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)


def sample_costs(n: int, law: str = "exponential_mean_n", seed=0) -> CostMatrix:
    """An i.i.d. cost matrix, deterministic under the seed."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    if law == "exponential_mean_n":
        costs = rng.exponential(scale=float(n), size=(n, n))
    elif law == "uniform01":
        costs = rng.random((n, n))
    else:
        raise ValueError(f"unknown cost law {law!r}")
    return CostMatrix(n, costs, law)


@njit(cache=True)
def _solve_sap(cost):
    """Dense shortest-augmenting-path assignment with dual potentials.

    Returns (col4row, u, v): col4row is the optimal matching row -> col,
    and the duals satisfy u[i] + v[j] <= cost[i, j] with equality on
    matched pairs.
    """
    n = cost.shape[0]
    u = np.zeros(n)
    v = np.zeros(n)
    col4row = np.full(n, -1, dtype=np.int64)
    row4col = np.full(n, -1, dtype=np.int64)
    shortest = np.empty(n)
    path = np.empty(n, dtype=np.int64)
    scanned_rows = np.empty(n, dtype=np.bool_)
    scanned_cols = np.empty(n, dtype=np.bool_)
    remaining = np.empty(n, dtype=np.int64)

    for cur_row in range(n):
        shortest[:] = np.inf
        scanned_rows[:] = False
        scanned_cols[:] = False
        for j in range(n):
            remaining[j] = j
        n_remaining = n

        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            scanned_rows[i] = True
            lowest = np.inf
            index = -1
            for it in range(n_remaining):
                j = remaining[it]
                r = min_val + cost[i, j] - u[i] - v[j]
                if r < shortest[j]:
                    shortest[j] = r
                    path[j] = i
                if shortest[j] < lowest or (shortest[j] == lowest and row4col[j] == -1):
                    lowest = shortest[j]
                    index = it
            min_val = lowest
            j = remaining[index]
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
            scanned_cols[j] = True
            n_remaining -= 1
            remaining[index] = remaining[n_remaining]

        u[cur_row] += min_val
        for k in range(n):
            if scanned_rows[k] and k != cur_row:
                u[k] += min_val - shortest[col4row[k]]
            if scanned_cols[k]:
                v[k] -= min_val - shortest[k]

        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            t = col4row[i]
            col4row[i] = j
            j = t
            if i == cur_row:
                break
    return col4row, u, v


@dataclass(frozen=True, eq=False)
class AssignmentResult:
    """An optimal matching, its objective under the law's normalization,
    and the dual certificate of optimality."""

    permutation: np.ndarray
    objective: float
    n: int
    law: str
    matched_sum: float
    dual_row: np.ndarray = field(repr=False)
    dual_col: np.ndarray = field(repr=False)
    max_certificate_violation: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.permutation, dtype=np.int64)
        if sorted(p.tolist()) != list(range(self.n)):
            raise ValueError("permutation must be a bijection on 0..n-1")
        p.setflags(write=False)
        object.__setattr__(self, "permutation", p)


def _normalize(matched_sum: float, n: int, law: str) -> float:
    """exponential_mean_n reports the mean matched cost (1/n scaling);
    uniform01 reports the raw sum, the classical form of the limit."""
    return matched_sum / n if law == "exponential_mean_n" else matched_sum


def certificate_violation(m: CostMatrix, permutation, dual_row, dual_col) -> float:
    """Worst violation of dual feasibility and complementary slackness,
    in cost units; ~1e-9 * scale or below for a correct solve."""
    reduced = m.costs - dual_row[:, None] - dual_col[None, :]
    feasibility = float(-reduced.min())
    slackness = float(np.abs(reduced[np.arange(m.n), permutation]).max())
    return max(feasibility, slackness)


def solve_exact(m: CostMatrix) -> AssignmentResult:
    """Globally optimal assignment of ``m`` with the dual certificate."""
    col4row, u, v = _solve_sap(m.costs)
    matched_sum = float(m.costs[np.arange(m.n), col4row].sum())
    return AssignmentResult(
        permutation=col4row,
        objective=_normalize(matched_sum, m.n, m.law),
        n=m.n,
        law=m.law,
        matched_sum=matched_sum,
        dual_row=u,
        dual_col=v,
        max_certificate_violation=certificate_violation(m, col4row, u, v),
    )


BRUTE_FORCE_LIMIT = 8
_PERM_CACHE: dict = {}


def _all_permutations(n: int) -> np.ndarray:
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    return _PERM_CACHE[n]


def brute_force_minimum(m: CostMatrix) -> tuple[np.ndarray, float]:
    """Exhaustive minimum over all n! permutations (n <= 8); the
    independent ground truth the solver is tested against."""
    if m.n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is capped at n = {BRUTE_FORCE_LIMIT}")
    perms = _all_permutations(m.n)
    totals = m.costs[np.arange(m.n)[None, :], perms].sum(axis=1)
    best = int(np.argmin(totals))
    return perms[best], float(totals[best])


def parisi_partial_sum(n: int) -> float:
    """1 + 1/4 + ... + 1/n^2, the exact expected optimum at size n."""
    if n < 1:
        raise ValueError("n must be positive")
    k = np.arange(1, n + 1, dtype=float)
    return float(np.sum(1.0 / (k * k)))


@dataclass(frozen=True)
class MeanObjectiveEstimate:
    """Monte Carlo mean of the solver objective over independent
    instances."""

    n: int
    law: str
    replicates: int
    seed: int
    mean: float
    std_error: float

    @property
    def parisi_value(self) -> float:
        return parisi_partial_sum(self.n)

    @property
    def abs_gap(self) -> float:
        return abs(self.mean - self.parisi_value)


def estimate_mean_objective(n: int, law: str = "exponential_mean_n",
                            replicates: int = 1000, seed: int = 0,
                            workers: int = 1) -> MeanObjectiveEstimate:
    """Sample mean and standard error of the optimum over independent
    cost matrices. Each replicate r draws from seed (seed, r) and lands
    in slot r of the value array, so the estimate is bit-identical for
    every worker count."""
    if replicates < 2:
        raise ValueError("replicates must be at least 2")
    values = np.empty(replicates)

    def fill(start: int, stop: int) -> None:
        for r in range(start, stop):
            m = sample_costs(n, law, seed=(seed, r))
            values[r] = solve_exact(m).objective

    workers = max(1, int(workers))
    if workers == 1:
        fill(0, replicates)
    else:
        from concurrent.futures import ThreadPoolExecutor
        size = (replicates + workers - 1) // workers
        spans = [(s, min(s + size, replicates)) for s in range(0, replicates, size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda span: fill(*span), spans))
    stat = MeanWithError.of(values)
    return MeanObjectiveEstimate(
        n=n, law=law, replicates=replicates, seed=seed,
        mean=stat.mean, std_error=stat.std_error,
    )


_TABLE_COLUMNS = ("n", "law", "replicates", "mean", "std_error", "parisi_value", "abs_gap")


def mean_objective_table(ns, law: str = "exponential_mean_n",
                         replicates: int = 1000, seed: int = 0,
                         workers: int = 1) -> list[MeanObjectiveEstimate]:
    """One estimate per matrix size, suitable for the CSV interface."""
    return [estimate_mean_objective(n, law, replicates, seed, workers) for n in ns]


def table_to_csv(estimates, path_or_buf) -> None:
    lines = [",".join(_TABLE_COLUMNS)]
    for e in estimates:
        lines.append(",".join([
            str(e.n), e.law, str(e.replicates),
            f"{e.mean:.17g}", f"{e.std_error:.17g}",
            f"{e.parisi_value:.17g}", f"{e.abs_gap:.17g}",
        ]))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="ascii") as fh:
            fh.write(text)
