"""The unit-interval recursion

    beta_0(s) = 1 - s,
    beta_n(s) = integral over [s,1] of (1/w) * (1 - exp(-beta_{n-1}(1-w))) dw,

its limit candidate L (a fixed point of the same integral map), and the
eta-diagnostic

    eta(w) = (1-w) * exp(L(1-w)) + w * exp(-L(w)) - 1,

which vanishes on [0,1] only when L is identically zero. The recursion is
the unit-interval shadow of the grid operator iteration: the n-th grid
iterate equals tail(x) * exp(-beta_{n-1}(tail(x))), and the two modules
compute their sides independently so each one checks the other.

The integrand (1/w)(1 - exp(-beta(1-w))) is bounded by beta(1-w)/w <= 1
on (0,1] whenever beta sits below the seed 1-s, and extends continuously
to w = 0; quadrature nodes mirror the curve nodes exactly, so no
interpolation enters the recursion itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import (
    DEFAULT_QUADRATURE,
    DEFAULT_RESOLUTION,
    QuadratureSpec,
    UnitIntervalCurve,
    integrate_unit_nodes,
)


def beta_transform(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(1 - exp(-v)) / w, the recursion integrand at curve values v = c(1-w)."""
    return -np.expm1(-v) / w


def beta_seed(resolution: int = DEFAULT_RESOLUTION) -> UnitIntervalCurve:
    """beta_0(s) = 1 - s."""
    return UnitIntervalCurve.from_function(lambda s: 1.0 - s, resolution)


def next_beta(prev: UnitIntervalCurve,
              quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> UnitIntervalCurve:
    """One recursion step: s -> integral over [s,1] of the transform."""
    vals = integrate_unit_nodes(prev, beta_transform, quadrature)
    return UnitIntervalCurve(prev.resolution, vals)


@dataclass(frozen=True)
class BetaSequence:
    """The computed recursion trajectory beta_0 .. beta_N."""

    curves: list[UnitIntervalCurve]
    values_at_zero: np.ndarray = field(repr=False)
    sup_differences: np.ndarray = field(repr=False)
    stop_tolerance: float
    reached_tolerance: bool

    @property
    def n_terminal(self) -> int:
        # counted from the recorded steps, not from len(curves): a run with
        # keep_curves=False holds only the seed and the terminal curve
        return len(self.sup_differences)

    @property
    def terminal(self) -> UnitIntervalCurve:
        return self.curves[-1]

    @property
    def terminal_sup(self) -> float:
        return float(self.terminal.values.max())


def run_recursion(n_max: int, stop_tolerance: float = 1e-6,
                  resolution: int = DEFAULT_RESOLUTION,
                  quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
                  keep_curves: bool = True) -> BetaSequence:
    """Iterate the recursion from beta_0 until the sup-node difference of
    consecutive curves drops below stop_tolerance, or n_max steps.

    The stopping rule uses successive differences rather than distance to
    zero: the limit is zero but the decay toward it is slow and carries no
    a priori rate. ``keep_curves=False`` retains only seed and terminal
    curve to bound memory on long runs.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not (stop_tolerance > 0):
        raise ValueError("stop_tolerance must be positive")
    current = beta_seed(resolution)
    curves = [current]
    zeros = [float(current.values[0])]
    diffs = []
    reached = False
    for _ in range(n_max):
        nxt = next_beta(current, quadrature)
        diff = float(np.max(np.abs(nxt.values - current.values)))
        diffs.append(diff)
        zeros.append(float(nxt.values[0]))
        if keep_curves:
            curves.append(nxt)
        else:
            curves = [curves[0], nxt]
        current = nxt
        if diff < stop_tolerance:
            reached = True
            break
    return BetaSequence(
        curves=curves,
        values_at_zero=np.asarray(zeros),
        sup_differences=np.asarray(diffs),
        stop_tolerance=stop_tolerance,
        reached_tolerance=reached,
    )


@dataclass(frozen=True)
class LimitDiagnostic:
    """How far a candidate limit curve is from solving the integral
    equation, and how far its eta-diagnostic is from vanishing."""

    L_candidate: UnitIntervalCurve
    integral_residual: float
    eta_max_abs: float


def eta_curve(candidate: UnitIntervalCurve) -> np.ndarray:
    """eta(w) = (1-w) e^{L(1-w)} + w e^{-L(w)} - 1 at every node.

    With candidate(1) = 0 the endpoint values are exactly zero in floating
    arithmetic: at w=0 the formula reduces to e^{L(1)} - 1 and at w=1 to
    e^{-L(1)} - 1.
    """
    w = candidate.nodes
    mirrored = candidate.values[::-1]
    return (1.0 - w) * np.exp(mirrored) + w * np.exp(-candidate.values) - 1.0


def check_L_equation(candidate: UnitIntervalCurve,
                     quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> LimitDiagnostic:
    """Evaluate both fixed-point diagnostics for a candidate limit curve."""
    if candidate.values[-1] != 0.0:
        raise ValueError(
            f"candidate(1) must be 0, got {candidate.values[-1]!r}"
        )
    mapped = integrate_unit_nodes(candidate, beta_transform, quadrature)
    residual = float(np.max(np.abs(candidate.values - mapped)))
    eta = eta_curve(candidate)
    return LimitDiagnostic(
        L_candidate=candidate,
        integral_residual=residual,
        eta_max_abs=float(np.max(np.abs(eta))),
    )
