"""The acceptance gate: one test per shipping criterion, each recording
a single pass/fail line for the terminal summary.

These tests intentionally re-check ground covered by the per-module
suites, at the exact tolerances and sample sizes the package promises,
so this file alone certifies a build. Budgeted runtimes are asserted
where a criterion carries one.
"""

import json
import math
import os
import time
from contextlib import contextmanager

import numpy as np

from logistic_rde import logistic
from logistic_rde.assignment import (
    brute_force_minimum,
    estimate_mean_objective,
    mean_objective_table,
    sample_costs,
    solve_exact,
)
from logistic_rde.beta import run_recursion
from logistic_rde.cli import DEFAULT_SEED, EXIT_OK, main
from logistic_rde.operators import (
    apply_A,
    apply_T,
    envelope_seed_pair,
    normalized_product,
    random_envelope_member,
    random_envelope_pair,
    random_integrable_tail,
)
from logistic_rde.pwit import BoundaryLaw, PwitConfig, run_coupling
from logistic_rde.stats import ONE_SIDED_1PCT_Z, decrease_z_score, ks_critical_value

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


def load_golden(name: str) -> dict:
    with open(os.path.join(GOLDEN_DIR, name), encoding="ascii") as fh:
        return json.load(fh)


class _Criterion:
    def __init__(self):
        self.checks = []

    def check(self, name: str, ok: bool, detail: str) -> None:
        self.checks.append((name, bool(ok), detail))


@contextmanager
def criterion(recorder, number: int, label: str, budget_s: float | None = None):
    """Collect named sub-checks, record one verdict line, then assert."""
    crit = _Criterion()
    started = time.perf_counter()
    try:
        yield crit
    except BaseException as err:
        recorder(number, label, False, f"aborted: {err!r}")
        raise
    elapsed = time.perf_counter() - started
    if budget_s is not None:
        crit.check("runtime", elapsed < budget_s, f"{elapsed:.1f}s < {budget_s:.0f}s")
    parts = [f"{name} {detail}" if ok else f"{name} FAILED ({detail})"
             for name, ok, detail in crit.checks]
    failed = [name for name, ok, _ in crit.checks if not ok]
    recorder(number, label, not failed, "; ".join(parts))
    assert not failed, f"criterion {number} ({label}) failed: {', '.join(failed)}"


def test_criterion_1_logistic_identities(acceptance_log):
    with criterion(acceptance_log, 1, "logistic law identities", budget_s=1.0) as crit:
        xs = np.linspace(-40.0, 40.0, 2001)
        h = 1e-5
        finite_difference = (logistic.cdf(xs + h) - logistic.cdf(xs - h)) / (2 * h)
        density_err = float(np.max(np.abs(finite_difference - logistic.density(xs))))
        crit.check("density_vs_finite_difference", density_err <= 1e-7,
                   f"sup {density_err:.2e} <= 1e-7")

        symmetry_err = float(np.max(np.abs(logistic.tail(xs) - logistic.cdf(-xs))))
        crit.check("symmetry_exact", symmetry_err == 0.0, f"sup {symmetry_err:.1e} == 0")

        residual = float(np.max(np.abs(logistic.fixed_point_residual(xs))))
        crit.check("integral_identity_residual", residual <= 1e-8,
                   f"sup {residual:.2e} <= 1e-8")

        mass_err = abs(logistic.tail_integral(0.0) - math.log(2.0))
        crit.check("right_mass_at_zero", mass_err <= 1e-10,
                   f"|integral - ln 2| {mass_err:.1e} <= 1e-10")


def test_criterion_2_operator_fixed_point(acceptance_log):
    with criterion(acceptance_log, 2, "operator fixed point", budget_s=10.0) as crit:
        _, upper = envelope_seed_pair()
        t_err = float(np.max(np.abs(apply_T(upper).values - upper.values)))
        crit.check("diagonal_operator", t_err <= 1e-5, f"sup {t_err:.2e} <= 1e-5")
        a_err = float(np.max(np.abs(apply_A(upper).values - upper.values)))
        crit.check("independent_operator", a_err <= 1e-5, f"sup {a_err:.2e} <= 1e-5")


def test_criterion_3_envelope_closure(acceptance_log):
    with criterion(acceptance_log, 3, "envelope closure and monotonicity",
                   budget_s=60.0) as crit:
        rng = np.random.default_rng(DEFAULT_SEED)
        lower, upper = envelope_seed_pair()
        worst_below = worst_above = worst_shape = -np.inf
        for _ in range(50):
            mapped = apply_T(random_envelope_member(rng))
            worst_below = max(worst_below, float(np.max(lower.values - mapped.values)))
            worst_above = max(worst_above, float(np.max(mapped.values - upper.values)))
            worst_shape = max(worst_shape, float(np.max(np.diff(mapped.values))))
        crit.check("stays_in_envelope", max(worst_below, worst_above) <= 1e-12,
                   f"50 seeds, worst excursion {max(worst_below, worst_above):.1e}")
        crit.check("non_increasing", worst_shape <= 0.0,
                   f"worst forward difference {worst_shape:.1e}")

        worst_order = -np.inf
        for _ in range(25):
            f_low, f_high = random_envelope_pair(rng)
            worst_order = max(worst_order, float(np.max(
                apply_T(f_low).values - apply_T(f_high).values)))
        crit.check("preserves_order", worst_order <= 1e-12,
                   f"25 ordered pairs, worst inversion {worst_order:.1e}")


def test_criterion_4_product_identity(acceptance_log):
    with criterion(acceptance_log, 4, "operator product identity",
                   budget_s=60.0) as crit:
        rng = np.random.default_rng(DEFAULT_SEED)
        worst = max(float(np.max(np.abs(normalized_product(random_integrable_tail(rng)) - 1.0)))
                    for _ in range(20))
        crit.check("product_equals_one", worst <= 1e-6,
                   f"20 random tails, worst |product - 1| {worst:.2e} <= 1e-6")


def test_criterion_5_grid_vs_unit_recursion(acceptance_log):
    # the two recursions compute the same iterates in different
    # coordinates: the n-th grid iterate from the squared tail equals
    # tail(x) * exp(-beta_{n-1}(tail(x)))
    with criterion(acceptance_log, 5, "grid vs unit-interval recursion",
                   budget_s=60.0) as crit:
        sequence = run_recursion(n_max=4, stop_tolerance=1e-12)
        lower, upper = envelope_seed_pair()
        tail_values = upper.values
        iterate = lower
        for n in range(1, 6):
            iterate = apply_T(iterate)
            beta_prev = sequence.curves[n - 1]
            predicted = tail_values * np.exp(
                -np.interp(tail_values, beta_prev.nodes, beta_prev.values))
            sup = float(np.max(np.abs(iterate.values - predicted)))
            crit.check(f"n={n}", sup <= 1e-3, f"sup {sup:.1e}")


def test_criterion_6_beta_monotone_and_terminal(acceptance_log):
    with criterion(acceptance_log, 6, "unit-interval recursion monotonicity") as crit:
        golden = load_golden("beta_golden.json")
        sequence = run_recursion(n_max=5000,
                                 stop_tolerance=golden["stop_tolerance"],
                                 resolution=golden["default_resolution"])

        zeros = np.asarray(sequence.values_at_zero)
        crit.check("starts_at_one", zeros[0] == 1.0, f"first value {zeros[0]}")
        crit.check("value_at_zero_strictly_decreasing",
                   bool(np.all(np.diff(zeros) < 0.0)), f"{len(zeros)} values")
        first_err = abs(zeros[1] - 0.796600)
        crit.check("first_step_series_oracle", first_err <= 1e-4,
                   f"|beta_1(0) - 0.796600| {first_err:.1e} <= 1e-4")

        worst_rise = max(
            float(np.max(later.values - earlier.values))
            for earlier, later in zip(sequence.curves, sequence.curves[1:]))
        crit.check("pointwise_non_increasing", worst_rise <= 0.0,
                   f"worst node-wise rise {worst_rise:.1e} over {sequence.n_terminal} steps")

        crit.check("terminal_step_matches_golden",
                   sequence.n_terminal == golden["n_terminal"],
                   f"{sequence.n_terminal} == {golden['n_terminal']}")
        oracle_sup = golden["oracle_terminal_sup"]
        inside = oracle_sup / 2.0 <= sequence.terminal_sup <= 2.0 * oracle_sup
        crit.check("terminal_sup_within_2x_of_oracle", inside,
                   f"{sequence.terminal_sup:.6e} vs high-resolution {oracle_sup:.6e}")


def test_criterion_7_coupling_ladder(acceptance_log):
    with criterion(acceptance_log, 7, "endogeny coupling ladder",
                   budget_s=600.0) as crit:
        golden = load_golden("coupling_golden.json")
        ladder = tuple(golden["depth_ladder"])
        config = PwitConfig(depth=max(ladder),
                            xi_cutoff=golden["xi_cutoff"],
                            boundary_law=BoundaryLaw.parse("logistic"),
                            replicates=golden["replicates"],
                            master_seed=golden["master_seed"])
        report = run_coupling(config, depths=ladder, keep_samples=True)
        rows = report.rows

        gap_err = abs(rows[0].mean_abs_root_gap - 2.0)
        band = 3.0 * rows[0].gap_std_error
        crit.check("depth0_gap_is_two", gap_err <= band,
                   f"|{rows[0].mean_abs_root_gap:.4f} - 2| <= 3 SE = {band:.4f}")

        gaps = {d: np.abs(x1 - x2) for d, (x1, x2) in report.samples.items()}
        z_scores = [decrease_z_score(gaps[a], gaps[b])
                    for a, b in zip(ladder, ladder[1:])]
        crit.check("gap_strictly_decreasing_1pct",
                   min(z_scores) > ONE_SIDED_1PCT_Z,
                   f"min z {min(z_scores):.1f} > {ONE_SIDED_1PCT_Z:.2f}")

        min_ks = [row.ks_statistic_min_vs_logistic for row in rows]
        crit.check("min_law_ks_decreasing",
                   all(b < a for a, b in zip(min_ks, min_ks[1:])),
                   f"{min_ks[0]:.3f} down to {min_ks[-1]:.3f}")

        root_crit = ks_critical_value(golden["replicates"], 0.01)
        worst_root_ks = max(row.ks_statistic_root_vs_logistic for row in rows)
        crit.check("root_marginal_logistic", worst_root_ks < root_crit,
                   f"worst KS {worst_root_ks:.4f} < 1% critical {root_crit:.4f}")

        worst_flag = max(row.truncation_flag_rate for row in rows)
        crit.check("truncation_flags", worst_flag <= 1e-3,
                   f"worst rate {worst_flag:.1e} <= 1e-3")

        worst_rel = 0.0
        for row, want in zip(rows, golden["rows"]):
            for field in ("mean_abs_root_gap", "rms_root_gap", "gap_std_error",
                          "ks_statistic_min_vs_logistic",
                          "ks_statistic_root_vs_logistic", "truncation_flag_rate"):
                got = getattr(row, field)
                worst_rel = max(worst_rel, abs(got - want[field]) / max(abs(want[field]), 1e-30))
        crit.check("replays_golden_rows", worst_rel <= 1e-9,
                   f"worst relative deviation {worst_rel:.1e}")


def test_criterion_8_assignment_benchmark(acceptance_log):
    with criterion(acceptance_log, 8, "assignment benchmark", budget_s=900.0) as crit:
        worst_gap = 0.0
        worst_certificate = 0.0
        for n in range(2, 9):
            for instance in range(200):
                costs = sample_costs(n, "exponential_mean_n", seed=(n, instance))
                solved = solve_exact(costs)
                _, best = brute_force_minimum(costs)
                worst_gap = max(worst_gap, abs(solved.matched_sum - best))
                worst_certificate = max(worst_certificate,
                                        solved.max_certificate_violation)
        crit.check("solver_matches_brute_force", worst_gap <= 1e-9,
                   f"1400 instances (n=2..8), worst gap {worst_gap:.1e}, "
                   f"worst certificate slack {worst_certificate:.1e}")

        table = mean_objective_table((1, 2, 3, 5, 10, 50, 100),
                                     "exponential_mean_n", 1000, DEFAULT_SEED)
        worst_ratio = max(e.abs_gap / (3.0 * e.std_error) for e in table)
        crit.check("parisi_within_3se", worst_ratio <= 1.0,
                   f"7 sizes at 1000 replicates, worst gap {worst_ratio:.2f} of band")
        crit.check("n2_target", table[1].parisi_value == 1.25,
                   f"partial sum at n=2 is {table[1].parisi_value}")

        uniform = estimate_mean_objective(200, "uniform01",
                                          replicates=200, seed=DEFAULT_SEED)
        zeta2_err = abs(uniform.mean - math.pi ** 2 / 6.0)
        crit.check("uniform_zeta2", zeta2_err <= 0.05,
                   f"n=200 mean {uniform.mean:.4f}, |gap to pi^2/6| {zeta2_err:.4f} <= 0.05")


def test_criterion_9_reproducibility(acceptance_log, tmp_path, capsys):
    # a manifest must replay to byte-identical result files no matter
    # how many workers the rerun uses
    with criterion(acceptance_log, 9, "worker-count reproducibility") as crit:
        runs = (
            ("coupling", ["coupling", "--depths", "0,2", "--replicates", "150"],
             "coupling.csv"),
            ("assignment", ["assignment", "--n", "1,3", "--replicates", "60"],
             "assignment.csv"),
        )
        for name, argv, result_file in runs:
            first_dir = tmp_path / f"{name}_w1"
            assert main(argv + ["--workers", "1", "--out", str(first_dir)]) == EXIT_OK
            manifest = json.loads(
                (first_dir / f"{name}_manifest.json").read_text())

            config_path = tmp_path / f"{name}_replay.json"
            config_path.write_text(json.dumps(manifest["config"]))
            replay_dir = tmp_path / f"{name}_w3"
            code = main([name, "--config", str(config_path), "--workers", "3",
                         "--out", str(replay_dir)])
            assert code == EXIT_OK

            identical = ((first_dir / result_file).read_bytes()
                         == (replay_dir / result_file).read_bytes())
            crit.check(f"{name}_csv_byte_identical", identical,
                       "workers 1 vs 3 from the recorded manifest")
