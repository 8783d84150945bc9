"""Goodness-of-fit and comparison statistics used by the Monte Carlo
experiments: the Kolmogorov-Smirnov distance to a reference law, its
asymptotic significance machinery, empirical tails, and a one-sided
two-sample mean comparison.

The KS statistic itself is computed directly from the sorted sample (the
exact sup over the empirical step function); only the limiting
Kolmogorov distribution comes from scipy.special.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogi, kolmogorov

from . import logistic


def ks_statistic(samples, cdf=logistic.cdf) -> float:
    """sup_x |F_empirical(x) - cdf(x)| for an i.i.d. sample.

    The sup over each step interval is attained at a sample point, from
    one side or the other, so the exact statistic is the larger of the
    two one-sided gaps at the order statistics.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("need at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    ref = np.asarray(cdf(x), dtype=float)
    steps = np.arange(1, n + 1) / n
    d_plus = np.max(steps - ref)
    d_minus = np.max(ref - (steps - 1.0 / n))
    return float(max(d_plus, d_minus))


def ks_pvalue(statistic: float, n: int) -> float:
    """Asymptotic p-value of the KS statistic for sample size n."""
    if n < 1:
        raise ValueError("n must be positive")
    return float(kolmogorov(np.sqrt(n) * statistic))


def ks_critical_value(n: int, level: float) -> float:
    """Statistic value whose asymptotic p-value equals ``level``."""
    if not (0.0 < level < 1.0):
        raise ValueError("level must lie in (0,1)")
    if n < 1:
        raise ValueError("n must be positive")
    return float(kolmogi(level) / np.sqrt(n))


def passes_ks(samples, level: float, cdf=logistic.cdf) -> bool:
    """True when the sample is not rejected at the given level."""
    stat = ks_statistic(samples, cdf)
    return stat < ks_critical_value(len(np.atleast_1d(samples)), level)


@dataclass(frozen=True)
class MeanWithError:
    """A sample mean with its standard error."""

    mean: float
    std_error: float
    n: int

    @classmethod
    def of(cls, samples) -> "MeanWithError":
        x = np.asarray(samples, dtype=float)
        if x.size < 1:
            raise ValueError("need at least one sample")
        se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else float("nan")
        return cls(float(x.mean()), se, int(x.size))

    def covers(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.mean - target) <= n_se * self.std_error


def decrease_z_score(higher, lower) -> float:
    """z statistic for the one-sided hypothesis mean(higher) > mean(lower),
    from two independent samples. Large positive values support a genuine
    decrease; the 1% one-sided threshold is 2.3263.
    """
    a = MeanWithError.of(higher)
    b = MeanWithError.of(lower)
    denom = float(np.hypot(a.std_error, b.std_error))
    if denom == 0.0:
        return float("inf") if a.mean > b.mean else 0.0
    return (a.mean - b.mean) / denom


ONE_SIDED_1PCT_Z = 2.3263478740408408  # Phi^{-1}(0.99)


@dataclass(frozen=True, eq=False)
class EmpiricalLaw:
    """The empirical distribution of a one-dimensional sample."""

    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.sort(np.asarray(self.samples, dtype=float))
        if x.size == 0:
            raise ValueError("need at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n(self) -> int:
        return self.samples.size

    def tail(self, x) -> float | np.ndarray:
        """Fraction of the sample strictly above x."""
        pos = np.searchsorted(self.samples, x, side="right")
        out = 1.0 - pos / self.n
        return float(out) if np.ndim(x) == 0 else out

    def cdf(self, x) -> float | np.ndarray:
        pos = np.searchsorted(self.samples, x, side="right")
        out = pos / self.n
        return float(out) if np.ndim(x) == 0 else out

    def ks_vs(self, cdf=logistic.cdf) -> float:
        return ks_statistic(self.samples, cdf)
