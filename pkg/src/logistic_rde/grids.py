"""Grid representations of monotone tails on R and of curves on [0,1],
with the quadrature both operator modules run on.

Two families of objects:

* :class:`TailFunction`: a non-increasing function on a uniform grid
  [x_min, x_max], values in [0,1], plus a closure rule describing the
  function beyond the grid. Right tail integrals combine composite
  quadrature on the grid with a closed-form closure mass.

* :class:`UnitIntervalCurve`: values on the uniform grid k/m of [0,1],
  used by the unit-interval recursion.

Composite quadrature on a uniform grid is done per interval with the
cubic Newton-Cotes weights (-1, 13, 13, -1)/24 (one-sided cubic rules at
the two boundary intervals). Each interval integral is exact for cubics,
so the composite rule carries the same 4th-order accuracy as Simpson's
rule while giving integrals from every node to the grid end in one
cumulative pass. The "trapezoid" rule is the plain 2nd-order composite.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .logistic import tail as logistic_tail
from .logistic import tail_integral

DEFAULT_X_MAX = 40.0
DEFAULT_STEP = 0.01
DEFAULT_RESOLUTION = 10_000

CLOSURES = ("logistic-squeeze", "clamp")

FLOAT_FMT = "%.17g"


class NonIntegrableTailError(ValueError):
    """Raised when a right tail integral diverges under the closure rule."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature rule selector plus the absolute error budget it claims."""

    rule: str = "simpson"
    abs_tolerance: float = 1e-8

    def __post_init__(self):
        if self.rule not in ("trapezoid", "simpson"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if not (self.abs_tolerance > 0):
            raise ValueError("abs_tolerance must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()


def interval_integrals(values: np.ndarray, step: float, rule: str = "simpson") -> np.ndarray:
    """Integral of the sampled function over each grid interval.

    Returns an array of length n-1 whose k-th entry approximates the
    integral over [x_k, x_{k+1}].
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 2:
        raise ValueError("need at least two grid values")
    if rule == "trapezoid":
        return 0.5 * step * (v[:-1] + v[1:])
    if rule != "simpson":
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if n < 4:
        # not enough points for the cubic rule; fall back to trapezoid
        return 0.5 * step * (v[:-1] + v[1:])
    s = np.empty(n - 1)
    s[1:n - 2] = (-v[0:n - 3] + 13.0 * v[1:n - 2] + 13.0 * v[2:n - 1] - v[3:n]) * (step / 24.0)
    s[0] = (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) * (step / 24.0)
    s[n - 2] = (v[n - 4] - 5.0 * v[n - 3] + 19.0 * v[n - 2] + 9.0 * v[n - 1]) * (step / 24.0)
    return s


def cumulative_right_integrals(values: np.ndarray, step: float, rule: str = "simpson") -> np.ndarray:
    """Integral from each grid node to the last node, as one array."""
    s = interval_integrals(values, step, rule)
    out = np.zeros(len(s) + 1)
    out[:-1] = np.cumsum(s[::-1])[::-1]
    return out


def _validate_unit_interval(values: np.ndarray, what: str, atol: float = 1e-9) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{what} values must be finite")
    if v.min() < -atol or v.max() > 1.0 + atol:
        raise ValueError(
            f"{what} values must lie in [0,1]; range is [{v.min()}, {v.max()}]"
        )
    return np.clip(v, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class TailFunction:
    """Non-increasing function sampled on x_min + k*step, values in [0,1].

    ``tail_closure`` fixes the function beyond the grid:

    * ``"logistic-squeeze"``: left of the grid, clamp to values[0]; right
      of the grid, follow r*tail(x) where r = values[-1]/tail(x_max) is
      the boundary ratio to the logistic tail. Any function squeezed
      between tail^2 and tail keeps r in [tail(x_max), 1], so the closure
      stays inside the same envelope and integrates in closed form.
    * ``"clamp"``: hold the boundary value on both sides. Integrable on
      the right only when values[-1] == 0.
    """

    x_min: float
    x_max: float
    step: float
    values: np.ndarray
    tail_closure: str = "logistic-squeeze"

    def __post_init__(self):
        if self.tail_closure not in CLOSURES:
            raise ValueError(f"unknown tail_closure {self.tail_closure!r}")
        if not (self.step > 0 and np.isfinite(self.step)):
            raise ValueError("step must be positive and finite")
        if not (self.x_min < self.x_max):
            raise ValueError("x_min must be below x_max")
        v = _validate_unit_interval(self.values, "TailFunction", atol=1e-12)
        n = v.size
        if n < 4:
            raise ValueError("TailFunction needs at least 4 grid points")
        span = self.x_min + (n - 1) * self.step - self.x_max
        if abs(span) > 1e-9 * max(1.0, abs(self.x_max)):
            raise ValueError(
                f"grid mismatch: {n} values at step {self.step} do not span "
                f"[{self.x_min}, {self.x_max}]"
            )
        increases = np.diff(v)
        worst = increases.max(initial=-np.inf)
        if worst > 1e-12:
            k = int(np.argmax(increases))
            raise ValueError(
                f"values must be non-increasing within 1e-12; increase of "
                f"{worst:.3e} at x = {self.grid_at(k):.6g}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def grid_at(self, k: int) -> float:
        return float(self.x_min + k * self.step)

    @property
    def boundary_ratio(self) -> float:
        """values[-1] / tail(x_max), the constant of the squeeze closure."""
        return float(self.values[-1] / logistic_tail(self.x_max))

    @classmethod
    def from_function(cls, fn, x_min: float = -DEFAULT_X_MAX, x_max: float = DEFAULT_X_MAX,
                      step: float = DEFAULT_STEP, tail_closure: str = "logistic-squeeze"):
        n = int(round((x_max - x_min) / step)) + 1
        xs = np.linspace(x_min, x_max, n)
        return cls(x_min, x_max, step, np.asarray(fn(xs), dtype=float), tail_closure)

    def in_envelope(self, atol: float = 1e-9) -> bool:
        """True when tail(x)^2 <= value <= tail(x) at every node (within atol)."""
        t = logistic_tail(self.grid)
        return bool(np.all(self.values >= t * t - atol) and np.all(self.values <= t + atol))

    def envelope_violation(self, atol: float = 1e-9):
        """Index and x of the worst envelope violation, or None."""
        t = logistic_tail(self.grid)
        below = (t * t - atol) - self.values
        above = self.values - (t + atol)
        worst = np.maximum(below, above)
        k = int(np.argmax(worst))
        if worst[k] <= 0:
            return None
        return k, self.grid_at(k)

    def to_csv(self, path_or_buf) -> None:
        """Write (x, value) rows at 17 significant digits."""
        _write_csv(path_or_buf, "x,value", self.grid, self.values)

    @classmethod
    def from_csv(cls, path_or_buf, tail_closure: str = "logistic-squeeze"):
        xs, vals = _read_csv(path_or_buf, "x,value")
        n = xs.size
        step = (xs[-1] - xs[0]) / (n - 1)
        return cls(float(xs[0]), float(xs[-1]), float(step), vals, tail_closure)


def logistic_tail_grid(x_min: float = -DEFAULT_X_MAX, x_max: float = DEFAULT_X_MAX,
                       step: float = DEFAULT_STEP) -> TailFunction:
    """The logistic tail itself as a TailFunction on the default grid."""
    return TailFunction.from_function(logistic_tail, x_min, x_max, step)


def logistic_tail_squared_grid(x_min: float = -DEFAULT_X_MAX, x_max: float = DEFAULT_X_MAX,
                               step: float = DEFAULT_STEP) -> TailFunction:
    """The squared logistic tail, the lower envelope seed."""
    return TailFunction.from_function(lambda x: logistic_tail(x) ** 2, x_min, x_max, step)


def evaluate(f: TailFunction, x) -> float | np.ndarray:
    """Evaluate ``f`` anywhere on R: linear interpolation on the grid,
    closure rule beyond it."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    out = np.interp(xs, f.grid, f.values)
    right = xs > f.x_max
    if np.any(right):
        if f.tail_closure == "logistic-squeeze":
            out[right] = f.boundary_ratio * logistic_tail(xs[right])
        else:
            out[right] = f.values[-1]
    # np.interp already clamps to values[0] on the left for both closures
    return float(out[0]) if scalar else out


def closure_mass(f: TailFunction, a: float | None = None) -> float:
    """Closed-form integral of the closure from max(a, x_max) to infinity."""
    start = f.x_max if a is None else max(a, f.x_max)
    if f.tail_closure == "logistic-squeeze":
        return f.boundary_ratio * tail_integral(start)
    if f.values[-1] == 0.0:
        return 0.0
    raise NonIntegrableTailError(
        "clamp closure with nonzero boundary value has infinite right tail mass"
    )


def integrate_right_nodes(f: TailFunction, quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """Integral of f from every grid node to infinity, as one array."""
    cum = cumulative_right_integrals(f.values, f.step, quadrature.rule)
    return cum + closure_mass(f)


def integrate_right(f: TailFunction, a: float,
                    quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integral of f over [a, infinity) under the closure rule."""
    if not np.isfinite(a):
        raise ValueError("lower limit must be finite")
    if a >= f.x_max:
        return closure_mass(f, a)
    nodes = integrate_right_nodes(f, quadrature)
    if a <= f.x_min:
        return float(f.values[0] * (f.x_min - a) + nodes[0])
    pos = (a - f.x_min) / f.step
    k = int(np.ceil(pos - 1e-12))
    partial = 0.0
    if k > pos:
        # a sits inside interval [x_{k-1}, x_k]; add the trapezoid sliver
        fa = evaluate(f, a)
        xk = f.grid_at(k)
        partial = 0.5 * (fa + f.values[k]) * (xk - a)
    return float(nodes[k] + partial)


@dataclass(frozen=True, eq=False)
class UnitIntervalCurve:
    """Values on the uniform grid k/m of [0,1], linearly interpolated."""

    resolution: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.resolution
        if m < 4:
            raise ValueError("resolution must be at least 4")
        v = _validate_unit_interval(self.values, "UnitIntervalCurve")
        if v.size != m + 1:
            raise ValueError(f"expected {m + 1} values for resolution {m}, got {v.size}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.resolution + 1)

    @classmethod
    def from_function(cls, fn, resolution: int = DEFAULT_RESOLUTION):
        m = int(resolution)
        return cls(m, np.asarray(fn(np.linspace(0.0, 1.0, m + 1)), dtype=float))

    @classmethod
    def zero(cls, resolution: int = DEFAULT_RESOLUTION):
        return cls(resolution, np.zeros(resolution + 1))

    def __call__(self, s) -> float | np.ndarray:
        out = np.interp(s, self.nodes, self.values)
        return float(out) if np.ndim(s) == 0 else out

    def to_csv(self, path_or_buf) -> None:
        _write_csv(path_or_buf, "s,value", self.nodes, self.values)

    @classmethod
    def from_csv(cls, path_or_buf):
        ss, vals = _read_csv(path_or_buf, "s,value")
        return cls(ss.size - 1, vals)


def integrand_on_nodes(c: UnitIntervalCurve, transform) -> np.ndarray:
    """transform(w, c(1-w)) at every node, with the w=0 node filled in by
    cubic extrapolation from the first three interior nodes.

    The node mirror is exact: 1 - k/m is itself a node, so c(1-w) needs
    no interpolation. The extrapolation realizes the bounded limit of an
    integrand whose closed form is 0/0 at w = 0.
    """
    w = c.nodes
    mirrored = c.values[::-1]
    psi = np.empty_like(w)
    psi[1:] = transform(w[1:], mirrored[1:])
    psi[0] = 3.0 * psi[1] - 3.0 * psi[2] + psi[3]
    if not np.all(np.isfinite(psi)):
        raise ValueError("transform produced non-finite integrand values")
    return psi


def integrate_unit_nodes(c: UnitIntervalCurve, transform,
                         quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """Integral of transform(w, c(1-w)) from every node s to 1."""
    psi = integrand_on_nodes(c, transform)
    return cumulative_right_integrals(psi, 1.0 / c.resolution, quadrature.rule)


def integrate_unit(c: UnitIntervalCurve, s: float, transform,
                   quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integral of transform(w, c(1-w)) over [s, 1]."""
    if not (0.0 <= s <= 1.0):
        raise ValueError(f"integration start must lie in [0,1], got {s}")
    nodes = integrate_unit_nodes(c, transform, quadrature)
    # the cumulative integral is smooth in s; interpolate between nodes
    return float(np.interp(s, c.nodes, nodes))


def _write_csv(path_or_buf, header: str, col0: np.ndarray, col1: np.ndarray) -> None:
    lines = [header]
    lines.extend(
        f"{a:.17g},{b:.17g}" for a, b in zip(col0.tolist(), col1.tolist())
    )
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="ascii") as fh:
            fh.write(text)


def _read_csv(path_or_buf, expected_header: str):
    if hasattr(path_or_buf, "read"):
        text = path_or_buf.read()
    else:
        with open(path_or_buf, "r", encoding="ascii") as fh:
            text = fh.read()
    lines = text.strip().split("\n")
    if lines[0].strip() != expected_header:
        raise ValueError(f"expected header {expected_header!r}, got {lines[0]!r}")
    data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
    return data[:, 0], data[:, 1]
