"""The two grid operators built on right tail integrals of the logistic
law, their fixed-point iteration, and the bivariate tail map.

For a tail function f the minimum-over-arrivals operator is

    A(f)(x) = exp(-I_f(-x)),    I_f(a) = integral of f over [a, infinity),

defined whenever the right tail of f is integrable. The diagonal
operator squeezes its input against the logistic tail:

    T(f)(x) = tail(x) * exp(-[I_tail(-x) - I_f(-x)]),

which equals tail(x)^2 * exp(I_f(-x)) because tail(x) = exp(-I_tail(-x))
exactly; the difference form keeps the exponent small and of one scale,
so it is the one computed. Both operators evaluate their integrals with
the same cumulative quadrature on the same grid, which makes the product

    (T(f)(x) / tail(x)) * (A(f)(x) / tail(x)) = 1

hold on the grid up to the quadrature error of I_tail alone, independent
of f.

T maps the envelope band [tail^2, tail] into itself and preserves
pointwise order; A reverses pointwise order. Iterating T from the lower
envelope drives the iterates up toward the logistic tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import (
    DEFAULT_QUADRATURE,
    DEFAULT_STEP,
    DEFAULT_X_MAX,
    QuadratureSpec,
    TailFunction,
    closure_mass,
    cumulative_right_integrals,
    integrate_right_nodes,
    logistic_tail_grid,
    logistic_tail_squared_grid,
)
from .logistic import tail as logistic_tail


class EnvelopeViolationError(ValueError):
    """Input leaves the band [tail^2, tail]; carries the offending x."""

    def __init__(self, x: float, value: float, lo: float, hi: float):
        self.x = x
        self.value = value
        super().__init__(
            f"value {value!r} at x = {x:.6g} leaves the envelope "
            f"[{lo:.6g}, {hi:.6g}]"
        )


def _require_symmetric(f: TailFunction) -> None:
    if abs(f.x_min + f.x_max) > 1e-9 * max(1.0, abs(f.x_max)):
        raise ValueError(
            "operator needs a symmetric grid (x_min = -x_max) so that -x "
            f"lands on a node; got [{f.x_min}, {f.x_max}]"
        )


def _check_envelope(f: TailFunction) -> None:
    hit = f.envelope_violation()
    if hit is not None:
        k, x = hit
        t = logistic_tail(x)
        raise EnvelopeViolationError(x, float(f.values[k]), t * t, t)


def apply_T(f: TailFunction, quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
            check_envelope: bool = True) -> TailFunction:
    """The diagonal operator T on the grid of ``f``.

    ``check_envelope`` enforces the envelope precondition, which is the
    band the fixed-point iteration lives in. The operator formula is
    also meaningful for any tail dominated by the logistic tail (that is
    what the identity product test exercises), so the check can be
    switched off.
    """
    _require_symmetric(f)
    if check_envelope:
        _check_envelope(f)
    t = logistic_tail_grid(f.x_min, f.x_max, f.step)
    diff = t.values - f.values
    # I_{tail - f} from every node to infinity: grid part plus the two
    # closed-form closure masses. Linearity of the fixed quadrature
    # weights makes this exactly I_tail - I_f node by node.
    grid_part = cumulative_right_integrals(diff, f.step, quadrature.rule)
    mass = closure_mass(t) - closure_mass(f)
    at_minus_x = (grid_part + mass)[::-1]
    out = t.values * np.exp(-at_minus_x)
    return TailFunction(f.x_min, f.x_max, f.step, out, f.tail_closure)


def apply_A(f: TailFunction, quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> TailFunction:
    """The minimum-over-arrivals operator A on the grid of ``f``.

    Raises NonIntegrableTailError (from the closure) when the right tail
    of ``f`` carries infinite mass.
    """
    _require_symmetric(f)
    at_minus_x = integrate_right_nodes(f, quadrature)[::-1]
    out = np.exp(-at_minus_x)
    return TailFunction(f.x_min, f.x_max, f.step, out, "logistic-squeeze")


@dataclass(frozen=True)
class OperatorIterate:
    """One step of the fixed-point trajectory."""

    index: int
    function: TailFunction
    sup_distance_to_logistic_tail: float


class IterateTrajectory(list):
    """A list of OperatorIterate records with a convergence verdict."""

    converged: bool = False
    final_step_distance: float = float("nan")


def sup_distance(f: TailFunction, g: TailFunction) -> float:
    """Largest node distance between two functions on the same grid."""
    if f.n_points != g.n_points or f.x_min != g.x_min or f.step != g.step:
        raise ValueError("functions live on different grids")
    return float(np.max(np.abs(f.values - g.values)))


def iterate_to_fixed_point(seed: TailFunction, max_iters: int, tolerance: float,
                           quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
                           check_envelope: bool = True) -> IterateTrajectory:
    """Iterate T from ``seed`` until consecutive iterates agree within
    ``tolerance`` in sup norm, or ``max_iters`` steps have been taken.

    Non-convergence is reported on the returned trajectory, not raised.
    Each record carries the sup distance to the logistic tail, the known
    fixed point the iterates approach.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if not (tolerance > 0):
        raise ValueError("tolerance must be positive")
    target = logistic_tail_grid(seed.x_min, seed.x_max, seed.step)
    trajectory = IterateTrajectory()
    current = seed
    trajectory.append(OperatorIterate(0, current, sup_distance(current, target)))
    for n in range(1, max_iters + 1):
        nxt = apply_T(current, quadrature, check_envelope=check_envelope)
        step_dist = sup_distance(nxt, current)
        trajectory.final_step_distance = step_dist
        if step_dist < tolerance:
            trajectory.converged = True
            break
        trajectory.append(OperatorIterate(n, nxt, sup_distance(nxt, target)))
        current = nxt
    return trajectory


def envelope_seed_pair(grid_like: TailFunction | None = None):
    """The two envelope functions (lower tail^2, upper tail) on a grid."""
    if grid_like is None:
        return logistic_tail_squared_grid(), logistic_tail_grid()
    lo = logistic_tail_squared_grid(grid_like.x_min, grid_like.x_max, grid_like.step)
    hi = logistic_tail_grid(grid_like.x_min, grid_like.x_max, grid_like.step)
    return lo, hi


def random_envelope_member(rng: np.random.Generator,
                           x_min: float = -DEFAULT_X_MAX,
                           x_max: float = DEFAULT_X_MAX,
                           step: float = DEFAULT_STEP) -> TailFunction:
    """A random member of the envelope band, non-increasing by construction.

    Built as f = lam * tail^2 + (1 - lam) * tail with a random smooth
    NON-DECREASING mixing weight lam: R -> [0,1]. A non-decreasing lam
    shifts weight toward the lower envelope as x grows, and every term
    of f' is then nonpositive, so f is a genuine tail function.
    """
    n_ramps = int(rng.integers(0, 4))
    base = float(rng.uniform(0.0, 1.0))
    weights = rng.uniform(0.0, 1.0, size=n_ramps)
    total = base + weights.sum()
    if total > 1.0:
        base /= total
        weights = weights / total
    centers = rng.uniform(-8.0, 8.0, size=n_ramps)
    rates = rng.uniform(0.2, 2.0, size=n_ramps)

    def lam(x):
        acc = np.full_like(np.asarray(x, dtype=float), base)
        for w, c, r in zip(weights, centers, rates):
            acc = acc + w / (1.0 + np.exp(-r * (np.asarray(x) - c)))
        return acc

    def member(x):
        t = logistic_tail(x)
        m = lam(x)
        return m * t * t + (1.0 - m) * t

    return TailFunction.from_function(member, x_min, x_max, step)


def random_envelope_pair(rng: np.random.Generator):
    """An ordered pair (f_low, f_high) in the envelope band.

    Scaling the mixing weight of a member by a constant in [0,1] keeps
    it non-decreasing and can only raise the function, so the scaled
    member dominates the original pointwise.
    """
    f_high_weightier = random_envelope_member(rng)
    scale = float(rng.uniform(0.0, 1.0))
    lo, hi = envelope_seed_pair(f_high_weightier)
    # recover lam of the member on the grid and scale it down
    band = hi.values - lo.values
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(band > 0, (hi.values - f_high_weightier.values) / band, 0.0)
    lam_low = np.clip(lam, 0.0, 1.0)
    lam_high = scale * lam_low
    f_low = f_high_weightier
    f_high = TailFunction(
        f_low.x_min, f_low.x_max, f_low.step,
        lam_high * lo.values + (1.0 - lam_high) * hi.values,
        f_low.tail_closure,
    )
    return f_low, f_high


def random_integrable_tail(rng: np.random.Generator) -> TailFunction:
    """A random distribution tail dominated by the logistic tail, with
    integrable right tail. Two families:

    * shifted mixtures sum_k w_k * tail(x + a_k) with a_k >= 0 and
      weights summing to 1 (each term is below tail(x));
    * powers tail(x)^p with p >= 1.
    """
    if rng.uniform() < 0.5:
        k = int(rng.integers(1, 4))
        shifts = rng.uniform(0.0, 6.0, size=k)
        weights = rng.dirichlet(np.ones(k))

        def member(x):
            x = np.asarray(x, dtype=float)
            acc = np.zeros_like(x)
            for w, a in zip(weights, shifts):
                acc = acc + w * logistic_tail(x + a)
            return acc
    else:
        p = float(rng.uniform(1.0, 3.0))

        def member(x):
            return logistic_tail(x) ** p

    return TailFunction.from_function(member)


def normalized_product(f: TailFunction,
                       quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """(T(f)/tail) * (A(f)/tail) at every grid node; identically 1 in
    exact arithmetic for any integrable tail f."""
    tf = apply_T(f, quadrature, check_envelope=False)
    af = apply_A(f, quadrature)
    t = logistic_tail(tf.grid)
    return (tf.values / t) * (af.values / t)


@dataclass(frozen=True)
class BivariateTailQuery:
    """A joint tail query point (x, y)."""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError("query coordinates must be finite")


def bivariate_gamma_tail(sample_set, query: BivariateTailQuery) -> float:
    """Monte Carlo plug-in for the joint tail of the coupled minimum pair,

        G(x, y) = tail(x) * tail(y) * exp(E[(X + x)^+ ^ (Y + y)^+]),

    with the expectation replaced by the sample mean over ``sample_set``
    (pairs drawn from a bivariate law with logistic marginals). On the
    diagonal sample set (X, X) and query (x, x) this reduces to T applied
    to the logistic tail, hence to tail(x) itself.

    The exponent is nonnegative, and the tail product offsets it: the
    exact value is a probability, though the estimator may stray from
    [0, 1] by Monte Carlo noise.
    """
    pairs = np.asarray(sample_set, dtype=float)
    if pairs.size == 0:
        raise ValueError("sample_set must be non-empty")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError(f"sample_set must be pairs, got shape {pairs.shape}")
    if not np.all(np.isfinite(pairs)):
        raise ValueError("sample pairs must be finite")
    zx = np.maximum(pairs[:, 0] + query.x, 0.0)
    zy = np.maximum(pairs[:, 1] + query.y, 0.0)
    mean_min = float(np.minimum(zx, zy).mean())
    return float(logistic_tail(query.x) * logistic_tail(query.y) * np.exp(mean_min))


def trajectory_to_csv(trajectory, path_or_buf) -> None:
    """Write all iterates as rows (n, x, value) at 17 significant digits."""
    lines = ["n,x,value"]
    for it in trajectory:
        xs = it.function.grid
        vals = it.function.values
        lines.extend(
            f"{it.index},{x:.17g},{v:.17g}" for x, v in zip(xs.tolist(), vals.tolist())
        )
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="ascii") as fh:
            fh.write(text)


def trajectory_summary(trajectory) -> list[dict]:
    """JSON-ready per-iterate summary rows."""
    return [
        {"n": it.index, "sup_distance": it.sup_distance_to_logistic_tail}
        for it in trajectory
    ]
