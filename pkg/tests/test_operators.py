"""Grid operators T and A, their iteration, and the bivariate tail map."""

import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from logistic_rde import logistic
from logistic_rde.grids import (
    NonIntegrableTailError,
    TailFunction,
    logistic_tail_grid,
    logistic_tail_squared_grid,
)
from logistic_rde.operators import (
    BivariateTailQuery,
    EnvelopeViolationError,
    apply_A,
    apply_T,
    bivariate_gamma_tail,
    envelope_seed_pair,
    iterate_to_fixed_point,
    normalized_product,
    random_envelope_member,
    random_envelope_pair,
    random_integrable_tail,
    sup_distance,
    trajectory_summary,
    trajectory_to_csv,
)

GOLDEN = json.loads(
    (Path(__file__).parent / "golden" / "operator_golden.json").read_text())


def small_grid_tail(fn, x_max=10.0, step=0.1, closure="logistic-squeeze"):
    return TailFunction.from_function(fn, -x_max, x_max, step, closure)


class TestFixedPoint:
    def test_T_fixes_logistic_tail_bitwise(self):
        t = logistic_tail_grid()
        out = apply_T(t)
        assert np.array_equal(out.values, t.values)

    def test_A_fixes_logistic_tail(self):
        t = logistic_tail_grid()
        out = apply_A(t)
        assert sup_distance(out, t) <= 1e-8

    def test_first_iterate_from_lower_envelope_closed_form(self):
        # integral of tail - tail^2 over [a, inf) is tail(a), so the first
        # iterate is tail(x) * exp(-tail(-x)) = tail(x) * exp(-cdf(x))
        f1 = apply_T(logistic_tail_squared_grid())
        xs = f1.grid
        want = logistic.tail(xs) * np.exp(-logistic.cdf(xs))
        assert np.max(np.abs(f1.values - want)) <= 1e-9

    def test_first_iterate_value_at_zero(self):
        f1 = apply_T(logistic_tail_squared_grid())
        assert f1.values[f1.n_points // 2] == pytest.approx(
            0.5 * math.exp(-0.5), abs=1e-10)


class TestOperatorProperties:
    def test_T_requires_symmetric_grid(self):
        f = TailFunction.from_function(logistic.tail, -5.0, 6.0, 0.1)
        with pytest.raises(ValueError, match="symmetric"):
            apply_T(f)
        with pytest.raises(ValueError, match="symmetric"):
            apply_A(f)

    def test_T_rejects_envelope_escape_with_location(self):
        f = small_grid_tail(lambda x: logistic.tail(x) ** 3)
        with pytest.raises(EnvelopeViolationError) as exc:
            apply_T(f)
        err = exc.value
        t = logistic.tail(err.x)
        assert err.value < t * t
        assert "envelope" in str(err)

    def test_T_check_can_be_disabled(self):
        f = small_grid_tail(lambda x: logistic.tail(x) ** 3)
        out = apply_T(f, check_envelope=False)
        assert out.values[0] <= 1.0

    def test_A_needs_integrable_tail(self):
        f = small_grid_tail(logistic.tail, closure="clamp")
        with pytest.raises(NonIntegrableTailError):
            apply_A(f)

    def test_T_preserves_pointwise_order(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            f_low, f_high = random_envelope_pair(rng)
            assert np.all(f_low.values <= f_high.values + 1e-12)
            t_low, t_high = apply_T(f_low), apply_T(f_high)
            assert np.all(t_low.values <= t_high.values + 1e-9)

    def test_A_reverses_pointwise_order(self):
        rng = np.random.default_rng(11)
        f_low, f_high = random_envelope_pair(rng)
        a_low, a_high = apply_A(f_low), apply_A(f_high)
        assert np.all(a_high.values <= a_low.values + 1e-9)

    def test_T_maps_envelope_into_itself(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            out = apply_T(random_envelope_member(rng))
            assert out.in_envelope()

    def test_envelope_ends_map_inside(self):
        lo, hi = envelope_seed_pair()
        assert apply_T(lo).in_envelope()
        assert apply_T(hi).in_envelope()

    def test_output_keeps_grid_and_closure(self):
        f = logistic_tail_squared_grid(-10.0, 10.0, 0.1)
        out = apply_T(f)
        assert (out.x_min, out.x_max, out.step) == (-10.0, 10.0, 0.1)
        assert out.tail_closure == "logistic-squeeze"


class TestIdentityProduct:
    def test_product_for_lower_envelope(self):
        prod = normalized_product(logistic_tail_squared_grid())
        assert np.max(np.abs(prod - 1.0)) <= 1e-6

    def test_product_for_random_tails(self):
        rng = np.random.default_rng(20260822)
        for _ in range(5):
            prod = normalized_product(random_integrable_tail(rng))
            assert np.max(np.abs(prod - 1.0)) <= 1e-6

    def test_product_error_is_quadrature_scale(self):
        # the two integrals share their quadrature, so the product should
        # beat the stated budget by orders of magnitude
        prod = normalized_product(logistic_tail_squared_grid())
        assert np.max(np.abs(prod - 1.0)) <= 1e-9


class TestRandomGenerators:
    def test_member_stays_in_band(self):
        rng = np.random.default_rng(99)
        for _ in range(10):
            assert random_envelope_member(rng).in_envelope(atol=1e-12)

    def test_pair_is_ordered(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            f_low, f_high = random_envelope_pair(rng)
            assert np.all(f_low.values <= f_high.values + 1e-12)
            assert f_low.in_envelope() and f_high.in_envelope()

    def test_integrable_tail_below_logistic(self):
        rng = np.random.default_rng(17)
        t = logistic.tail
        for _ in range(10):
            f = random_integrable_tail(rng)
            assert np.all(f.values <= t(f.grid) + 1e-12)

    def test_generators_are_deterministic(self):
        a = random_envelope_member(np.random.default_rng(123))
        b = random_envelope_member(np.random.default_rng(123))
        assert np.array_equal(a.values, b.values)


class TestIteration:
    def test_logistic_seed_converges_immediately(self):
        traj = iterate_to_fixed_point(logistic_tail_grid(), 10, 1e-9)
        assert traj.converged
        assert len(traj) == 1
        assert traj[0].index == 0
        assert traj[0].sup_distance_to_logistic_tail == 0.0
        assert traj.final_step_distance == 0.0

    def test_lower_envelope_trajectory_matches_golden(self):
        traj = iterate_to_fixed_point(logistic_tail_squared_grid(), 80, 1e-9)
        assert not traj.converged
        got = [r.sup_distance_to_logistic_tail for r in traj[:10]]
        assert got == pytest.approx(GOLDEN["sup_distances_first_10"], rel=1e-12)
        n_star = next(i for i, r in enumerate(traj)
                      if r.sup_distance_to_logistic_tail < GOLDEN["distance_threshold"])
        assert n_star == GOLDEN["n_star"]
        assert traj[n_star].sup_distance_to_logistic_tail == pytest.approx(
            GOLDEN["sup_distance_at_n_star"], rel=1e-12)

    def test_distances_decrease_monotonically(self):
        traj = iterate_to_fixed_point(
            logistic_tail_squared_grid(-10.0, 10.0, 0.05), 30, 1e-9)
        d = [r.sup_distance_to_logistic_tail for r in traj]
        assert d[0] == pytest.approx(0.25, abs=1e-12)
        assert all(b < a for a, b in zip(d, d[1:]))

    def test_max_iters_is_respected(self):
        traj = iterate_to_fixed_point(
            logistic_tail_squared_grid(-10.0, 10.0, 0.05), 5, 1e-9)
        assert not traj.converged
        assert len(traj) == 6
        assert [r.index for r in traj] == list(range(6))

    def test_parameter_validation(self):
        seed = logistic_tail_grid(-10.0, 10.0, 0.1)
        with pytest.raises(ValueError):
            iterate_to_fixed_point(seed, 0, 1e-9)
        with pytest.raises(ValueError):
            iterate_to_fixed_point(seed, 5, 0.0)

    def test_sup_distance_rejects_mismatched_grids(self):
        with pytest.raises(ValueError, match="grids"):
            sup_distance(logistic_tail_grid(-10.0, 10.0, 0.1),
                         logistic_tail_grid(-20.0, 20.0, 0.1))


class TestTrajectorySerialization:
    def test_csv_shape_and_round_trip(self):
        traj = iterate_to_fixed_point(
            logistic_tail_squared_grid(-10.0, 10.0, 0.1), 3, 1e-9)
        buf = io.StringIO()
        trajectory_to_csv(traj, buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "n,x,value"
        n_points = traj[0].function.n_points
        assert len(lines) == 1 + len(traj) * n_points
        first = lines[1].split(",")
        assert first[0] == "0"
        assert float(first[2]) == traj[0].function.values[0]

    def test_summary_rows(self):
        traj = iterate_to_fixed_point(
            logistic_tail_squared_grid(-10.0, 10.0, 0.1), 3, 1e-9)
        rows = trajectory_summary(traj)
        assert [r["n"] for r in rows] == [0, 1, 2, 3]
        assert rows[0]["sup_distance"] == traj[0].sup_distance_to_logistic_tail
        json.dumps(rows)  # JSON-ready


def logistic_pairs(rng, n, coupled):
    x = logistic.sample(rng, n)
    y = x if coupled else logistic.sample(rng, n)
    return np.column_stack([x, y])


class TestBivariateTail:
    def test_diagonal_reduces_to_logistic_tail(self):
        rng = np.random.default_rng(2718)
        pairs = logistic_pairs(rng, 100_000, coupled=True)
        for x in (-1.0, 0.0, 0.7, 2.5):
            q = BivariateTailQuery(x, x)
            got = bivariate_gamma_tail(pairs, q)
            # delta-method standard error of the plug-in estimator
            z = np.minimum(np.maximum(pairs[:, 0] + x, 0.0),
                           np.maximum(pairs[:, 1] + x, 0.0))
            se = got * z.std(ddof=1) / math.sqrt(len(z))
            assert abs(got - logistic.tail(x)) <= 3.0 * se

    def test_vanishes_for_large_x(self):
        rng = np.random.default_rng(1)
        pairs = logistic_pairs(rng, 10_000, coupled=False)
        assert bivariate_gamma_tail(pairs, BivariateTailQuery(30.0, 0.0)) <= 1e-10

    def test_saturates_for_very_negative_arguments(self):
        rng = np.random.default_rng(2)
        pairs = logistic_pairs(rng, 10_000, coupled=False)
        got = bivariate_gamma_tail(pairs, BivariateTailQuery(-40.0, -40.0))
        assert got == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_sample_sets(self):
        q = BivariateTailQuery(0.0, 0.0)
        with pytest.raises(ValueError, match="non-empty"):
            bivariate_gamma_tail(np.empty((0, 2)), q)
        with pytest.raises(ValueError, match="pairs"):
            bivariate_gamma_tail(np.zeros((5, 3)), q)
        with pytest.raises(ValueError, match="finite"):
            bivariate_gamma_tail(np.array([[0.0, np.nan]]), q)

    def test_rejects_non_finite_query(self):
        with pytest.raises(ValueError, match="finite"):
            BivariateTailQuery(np.inf, 0.0)
