"""Monte Carlo on depth-truncated Poisson weighted infinite trees.

Every vertex of the tree carries a rate-1 Poisson process of child edge
weights xi_1 < xi_2 < ..., and the recursion

    X(vertex) = min_j ( xi_j - X(child_j) )

is evaluated depth-first down to a boundary generation whose values are
drawn from a configurable law. The point of the module is the coupling
experiment: evaluate the same tree twice with identical edge weights
everywhere but independent boundary values, and watch the two roots
collapse onto each other as the boundary recedes. The collapse is the
checkable footprint of the root being a function of the edge weights
alone.

Randomness is path-keyed, not sequence-keyed: every tree vertex owns a
splitmix64 stream derived by hashing the child-index path from the root,
so any two evaluations agree on the weights of every vertex they both
visit, independent of visit order, pruning, or thread scheduling.

The recursion is evaluated lazily with a value window, in the style of
alpha-beta search. A child only matters when its value would push
xi_j - X_j below both the parent's running minimum and the largest value
the parent's own caller can still use; the recursion passes that window
down and stops expanding arrivals once xi_j exceeds window + q_window,
where q_window bounds plausible child values (the 1 - 1e-6 logistic
quantile, widened by the boundary law's support when that law is not
logistic). Arrivals above xi_cutoff are not part of the truncated tree
at all; a per-replicate flag records roots large enough that this
truncation could have mattered.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from . import logistic
from ._version import VERSION
from .stats import EmpiricalLaw, ks_statistic

GOLD = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
ONE = np.uint64(1)

# Stream roles of a vertex: its arrival weights, and the two boundary
# draws of the coupled pair. Far above any reachable child index.
ROLE_XI = np.uint64(0xA5A5A5A5A5A5A5A5)
ROLE_B1 = np.uint64(0xB1B1B1B1B1B1B1B1)
ROLE_B2 = np.uint64(0xB2B2B2B2B2B2B2B2)

TRUNCATION_QUANTILE = 1e-6
Q_HI = float(logistic.quantile(1.0 - TRUNCATION_QUANTILE))

MAX_DEPTH = 14
MIN_XI_CUTOFF = 8.0
NODE_BUDGET = 50_000_000

DEFAULT_DEPTH_LADDER = (0, 2, 4, 6, 8, 10)
DEFAULT_MASTER_SEED = 112358132134


@njit(cache=True)
def _sm_out(state):
    """One splitmix64 step: (output, advanced state)."""
    state = state + GOLD
    z = state
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    z = z ^ (z >> np.uint64(31))
    return z, state


@njit(cache=True)
def _fold(key, v):
    """Derive a child key from (key, v); a double finalizer mix."""
    z = key ^ ((v + ONE) * GOLD)
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    z = z ^ (z >> np.uint64(31))
    z = (z ^ (z >> np.uint64(30))) * MIX1
    z = (z ^ (z >> np.uint64(27))) * MIX2
    z = z ^ (z >> np.uint64(31))
    return z


@njit(cache=True)
def _u01(out):
    """Map 64 random bits to a double strictly inside (0,1).

    52 payload bits plus a half-ulp offset: every intermediate is exact,
    so the result lives in [2^-53, 1 - 2^-53]. A 53-bit payload would
    round (2^53 - 1) + 0.5 up and could return exactly 1.0.
    """
    return (np.float64(out >> np.uint64(12)) + 0.5) * (2.0 ** -52)


@njit(cache=True)
def _boundary_draw(key, brole, bkind, bp0, bp1):
    """One boundary value from the vertex stream for the given role."""
    if bkind == 1:  # point mass
        return bp0
    state = _fold(key, brole)
    out, state = _sm_out(state)
    u = _u01(out)
    if bkind == 0:  # logistic
        return np.log(u) - np.log1p(-u)
    return bp0 + (bp1 - bp0) * u  # uniform(a, b)


@njit(cache=True)
def _node_value(key, depth, alpha, beta, cutoff, q_window,
                brole, bkind, bp0, bp1, budget, stats):
    """Value of one vertex, exact inside the window (alpha, beta).

    Contract: the true value V is returned exactly whenever
    alpha < V < beta; otherwise some value on V's side of the window is
    returned (<= alpha when V <= alpha, >= beta when V >= beta), which
    is all the caller needs to discard the vertex.
    """
    stats[0] += 1
    if stats[0] > budget:
        raise RuntimeError("node budget exceeded; reduce depth or replicates")
    if depth == 0:
        return _boundary_draw(key, brole, bkind, bp0, bp1)
    xi_state = _fold(key, ROLE_XI)
    best = np.inf
    xi = 0.0
    j = ONE
    while True:
        out, xi_state = _sm_out(xi_state)
        xi -= np.log1p(-_u01(out))
        lim = beta if beta < best else best
        if xi > cutoff:
            break
        if xi >= lim + q_window:
            break
        c = _node_value(_fold(key, j), depth - 1, xi - lim, xi - alpha,
                        cutoff, q_window, brole, bkind, bp0, bp1, budget, stats)
        t = xi - c
        if t < best:
            best = t
            if best <= alpha:
                return best
        j += ONE
    return best


@njit(cache=True)
def _batch_roots(master, depth, cutoff, q_window, brole, bkind, bp0, bp1,
                 budget, rep_start, n_rep):
    """Root values for replicates rep_start .. rep_start + n_rep - 1."""
    out = np.empty(n_rep)
    stats = np.zeros(1, dtype=np.int64)
    for r in range(n_rep):
        stats[0] = 0
        key = _fold(_fold(master, np.uint64(depth)), np.uint64(rep_start + r))
        out[r] = _node_value(key, depth, -np.inf, np.inf, cutoff, q_window,
                             brole, bkind, bp0, bp1, budget, stats)
    return out


_BOUNDARY_KINDS = ("logistic", "point_mass", "uniform")


@dataclass(frozen=True)
class BoundaryLaw:
    """Law of the boundary generation: logistic, point_mass(v), or
    uniform(a, b)."""

    kind: str
    p0: float = 0.0
    p1: float = 0.0

    def __post_init__(self):
        if self.kind not in _BOUNDARY_KINDS:
            raise ValueError(f"unknown boundary law {self.kind!r}")
        if not (np.isfinite(self.p0) and np.isfinite(self.p1)):
            raise ValueError("boundary law parameters must be finite")
        if self.kind == "uniform" and not (self.p0 < self.p1):
            raise ValueError("uniform boundary law needs a < b")

    @classmethod
    def logistic(cls) -> "BoundaryLaw":
        return cls("logistic")

    @classmethod
    def point_mass(cls, v: float) -> "BoundaryLaw":
        return cls("point_mass", float(v))

    @classmethod
    def uniform(cls, a: float, b: float) -> "BoundaryLaw":
        return cls("uniform", float(a), float(b))

    @classmethod
    def parse(cls, text: str) -> "BoundaryLaw":
        """Parse 'logistic', 'point_mass:V', or 'uniform:A:B'."""
        parts = text.strip().split(":")
        name = parts[0]
        if name == "logistic" and len(parts) == 1:
            return cls.logistic()
        if name == "point_mass" and len(parts) == 2:
            return cls.point_mass(float(parts[1]))
        if name == "uniform" and len(parts) == 3:
            return cls.uniform(float(parts[1]), float(parts[2]))
        raise ValueError(
            f"cannot parse boundary law {text!r}; expected 'logistic', "
            "'point_mass:V', or 'uniform:A:B'"
        )

    def describe(self) -> str:
        if self.kind == "logistic":
            return "logistic"
        if self.kind == "point_mass":
            return f"point_mass:{self.p0:g}"
        return f"uniform:{self.p0:g}:{self.p1:g}"

    @property
    def code(self) -> int:
        return _BOUNDARY_KINDS.index(self.kind)

    @property
    def support_bound(self) -> float:
        """Bound on |value| of a boundary draw (inf for logistic handled
        separately by the quantile window)."""
        if self.kind == "logistic":
            return 0.0
        return max(abs(self.p0), abs(self.p1))


def _check_seed(seed: int, what: str) -> int:
    seed = int(seed)
    if not (0 <= seed < 2 ** 64):
        raise ValueError(f"{what} must be a 64-bit unsigned integer")
    return seed


@dataclass(frozen=True)
class InnovationStream:
    """Deterministic map from (master_seed, vertex path, role) to an
    independent splitmix64 substream.

    Identical (master_seed, path) always reproduces the identical
    substream, which is what lets two evaluations of the same tree share
    every edge weight exactly while disagreeing on boundary draws.
    """

    master_seed: int
    derivation: str = "splitmix64-fold-v1"

    def __post_init__(self):
        object.__setattr__(self, "master_seed", _check_seed(self.master_seed, "master_seed"))
        if self.derivation != "splitmix64-fold-v1":
            raise ValueError(f"unknown derivation scheme {self.derivation!r}")

    def replicate_key(self, depth: int, replicate: int) -> int:
        """Root key of one replicate tree at one depth."""
        # the dispatcher boxes uint64 results as Python ints, so the
        # intermediate must be re-wrapped or the next call would unbox
        # it as int64 and overflow
        key = _fold(np.uint64(self.master_seed), np.uint64(int(depth)))
        return int(_fold(np.uint64(key), np.uint64(int(replicate))))


@dataclass(frozen=True)
class PwitConfig:
    """One truncated-tree experiment: depth, Poisson cutoff, boundary
    law, replicate count, and the master seed all randomness derives
    from."""

    depth: int = 10
    xi_cutoff: float = 30.0
    boundary_law: BoundaryLaw = field(default_factory=BoundaryLaw.logistic)
    replicates: int = 10_000
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self):
        if not (0 <= int(self.depth) <= MAX_DEPTH):
            raise ValueError(f"depth must lie in [0, {MAX_DEPTH}], got {self.depth}")
        if not (np.isfinite(self.xi_cutoff) and self.xi_cutoff >= MIN_XI_CUTOFF):
            raise ValueError(f"xi_cutoff must be at least {MIN_XI_CUTOFF}")
        if int(self.replicates) < 1:
            raise ValueError("replicates must be positive")
        object.__setattr__(self, "depth", int(self.depth))
        object.__setattr__(self, "xi_cutoff", float(self.xi_cutoff))
        object.__setattr__(self, "replicates", int(self.replicates))
        object.__setattr__(self, "master_seed", _check_seed(self.master_seed, "master_seed"))

    @property
    def q_window(self) -> float:
        """Bound on plausible child values used by the lazy recursion."""
        return Q_HI + self.boundary_law.support_bound

    @property
    def stream(self) -> InnovationStream:
        return InnovationStream(self.master_seed)


_ROLES = {1: ROLE_B1, 2: ROLE_B2}


def _role_for_tag(boundary_tag: int) -> np.uint64:
    if boundary_tag not in _ROLES:
        raise ValueError(f"boundary_tag must be 1 or 2, got {boundary_tag}")
    return _ROLES[boundary_tag]


def sample_root(config: PwitConfig, stream: InnovationStream,
                boundary_tag: int, replicate: int = 0) -> float:
    """One root value of the truncated tree, fully determined by
    (config, stream, boundary_tag, replicate)."""
    law = config.boundary_law
    out = _batch_roots(
        np.uint64(stream.master_seed), config.depth, config.xi_cutoff,
        config.q_window, _role_for_tag(boundary_tag), law.code, law.p0, law.p1,
        NODE_BUDGET, int(replicate), 1,
    )
    return float(out[0])


def sample_roots(config: PwitConfig, boundary_tag: int = 1,
                 workers: int = 1) -> np.ndarray:
    """All replicate root values for one boundary tag, in replicate order."""
    law = config.boundary_law
    role = _role_for_tag(boundary_tag)
    master = np.uint64(config.master_seed)
    chunks = []
    for start, count in _chunk_ranges(config.replicates, workers):
        chunks.append(_batch_roots(
            master, config.depth, config.xi_cutoff, config.q_window,
            role, law.code, law.p0, law.p1, NODE_BUDGET, start, count,
        ))
    return np.concatenate(chunks)


def _chunk_ranges(total: int, workers: int):
    """Deterministic contiguous split of range(total); the split shape
    never changes the values computed, only the batching."""
    workers = max(1, int(workers))
    size = (total + workers - 1) // workers
    out = []
    start = 0
    while start < total:
        count = min(size, total - start)
        out.append((start, count))
        start += count
    return out


def truncation_flags(config: PwitConfig, roots: np.ndarray) -> np.ndarray:
    """Replicates whose root is so large that arrivals beyond xi_cutoff
    could plausibly have lowered it."""
    return roots > config.xi_cutoff - config.q_window


@dataclass(frozen=True)
class CouplingRow:
    """Coupling statistics at one boundary depth."""

    depth: int
    replicates: int
    mean_abs_root_gap: float
    rms_root_gap: float
    ks_statistic_min_vs_logistic: float
    ks_statistic_root_vs_logistic: float
    truncation_flag_rate: float
    gap_std_error: float


_COUPLING_COLUMNS = (
    "depth", "replicates", "mean_abs_root_gap", "rms_root_gap",
    "ks_statistic_min_vs_logistic", "ks_statistic_root_vs_logistic",
    "truncation_flag_rate", "gap_std_error",
)


@dataclass(frozen=True)
class CouplingReport:
    """Per-depth coupling statistics plus everything needed to replay.

    ``samples`` optionally carries the raw per-depth root pairs
    {depth: (x1, x2)} when the caller asked to keep them; it is never
    serialized.
    """

    rows: tuple
    config: PwitConfig
    code_version: str = VERSION
    samples: dict | None = field(default=None, repr=False, compare=False)

    def row_for(self, depth: int) -> CouplingRow:
        for row in self.rows:
            if row.depth == depth:
                return row
        raise KeyError(f"no row at depth {depth}")

    @property
    def depths(self) -> tuple:
        return tuple(row.depth for row in self.rows)

    def to_csv(self, path_or_buf) -> None:
        lines = [",".join(_COUPLING_COLUMNS)]
        for row in self.rows:
            lines.append(",".join([
                str(row.depth),
                str(row.replicates),
                f"{row.mean_abs_root_gap:.17g}",
                f"{row.rms_root_gap:.17g}",
                f"{row.ks_statistic_min_vs_logistic:.17g}",
                f"{row.ks_statistic_root_vs_logistic:.17g}",
                f"{row.truncation_flag_rate:.17g}",
                f"{row.gap_std_error:.17g}",
            ]))
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="ascii") as fh:
                fh.write(text)

    def to_json_dict(self) -> dict:
        return {
            "master_seed": self.config.master_seed,
            "config": {
                "depth": self.config.depth,
                "xi_cutoff": self.config.xi_cutoff,
                "boundary_law": self.config.boundary_law.describe(),
                "replicates": self.config.replicates,
                "master_seed": self.config.master_seed,
            },
            "code_version": self.code_version,
            "rows": [
                {col: getattr(row, col) for col in _COUPLING_COLUMNS}
                for row in self.rows
            ],
        }


def coupled_roots(config: PwitConfig, workers: int = 1):
    """The two coupled root samples (shared weights, independent
    boundaries), in replicate order."""
    x1 = sample_roots(config, boundary_tag=1, workers=workers)
    x2 = sample_roots(config, boundary_tag=2, workers=workers)
    return x1, x2


def run_coupling(config: PwitConfig, depths=None, workers: int = 1,
                 keep_samples: bool = False) -> CouplingReport:
    """Coupling statistics across a depth ladder.

    ``depths`` defaults to the standard ladder capped at config.depth.
    Each rung reuses the config with that depth; all rungs share the
    master seed but key their replicates by (depth, replicate), so rungs
    are statistically independent of each other.
    """
    if depths is None:
        depths = tuple(d for d in DEFAULT_DEPTH_LADDER if d <= config.depth)
        if not depths:
            depths = (config.depth,)
    rows = []
    samples = {} if keep_samples else None
    for d in depths:
        rung = replace(config, depth=int(d))
        x1, x2 = coupled_roots(rung, workers=workers)
        if keep_samples:
            samples[rung.depth] = (x1, x2)
        gap = np.abs(x1 - x2)
        flagged = truncation_flags(rung, x1) | truncation_flags(rung, x2)
        n = gap.size
        rows.append(CouplingRow(
            depth=rung.depth,
            replicates=n,
            mean_abs_root_gap=float(gap.mean()),
            rms_root_gap=float(np.sqrt(np.mean(gap * gap))),
            ks_statistic_min_vs_logistic=ks_statistic(np.minimum(x1, x2)),
            ks_statistic_root_vs_logistic=ks_statistic(x1),
            truncation_flag_rate=float(flagged.mean()),
            gap_std_error=float(gap.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan"),
        ))
    return CouplingReport(rows=tuple(rows), config=config, samples=samples)


def estimate_min_law(config: PwitConfig, workers: int = 1) -> EmpiricalLaw:
    """Empirical law of the coupled minimum X1 ^ X2 at config.depth."""
    x1, x2 = coupled_roots(config, workers=workers)
    return EmpiricalLaw(np.minimum(x1, x2))


def estimate_root_law(config: PwitConfig, boundary_tag: int = 1,
                      workers: int = 1) -> EmpiricalLaw:
    """Empirical law of the root itself at config.depth."""
    return EmpiricalLaw(sample_roots(config, boundary_tag, workers=workers))
