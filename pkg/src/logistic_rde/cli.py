"""Command-line front door: configures, runs, and persists the
experiments, and is the package's reproducibility surface.

Configuration comes from an optional JSON file plus command-line flags;
flags win. Every run writes its result files next to a manifest that
records the full canonical config, the seed, the wall time, and the
package version, which is enough to replay the run byte-for-byte.

Exit codes: 0 success, 2 configuration error, 3 invariant violation
during the run (the violated invariant is named in a machine-readable
error record on stderr), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import beta as beta_mod
from . import logistic
from ._version import VERSION
from .assignment import COST_LAWS, mean_objective_table, table_to_csv
from .grids import logistic_tail_squared_grid
from .operators import (
    iterate_to_fixed_point,
    normalized_product,
    random_integrable_tail,
    trajectory_summary,
    trajectory_to_csv,
)
from .pwit import (
    MAX_DEPTH,
    BoundaryLaw,
    PwitConfig,
    run_coupling,
)
from .stats import ks_critical_value, ks_statistic

OUTDIR_ENV_VAR = "LOGISTIC_RDE_OUTDIR"

COMMANDS = ("logistic-check", "iterate-t", "beta", "coupling", "assignment", "identity-check")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_IO = 4

DEFAULT_SEED = 112358132134


class ConfigError(ValueError):
    """Invalid configuration; carries the offending field path."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"config field {path!r}: {reason}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment run depends on, in one flat record.

    Grid overrides (x_max, step, resolution) shape the operator and
    recursion commands; Monte Carlo overrides (depths, replicates,
    xi_cutoff, boundary_law, n_list) shape the tree and assignment
    commands; the iteration knobs bound run lengths. Fields irrelevant
    to a command are simply unused by it.
    """

    command: str
    seed: int = DEFAULT_SEED
    x_max: float = 40.0
    step: float = 0.01
    resolution: int = 10_000
    depths: tuple = (0, 2, 4, 6, 8, 10)
    replicates: int = 10_000
    xi_cutoff: float = 30.0
    boundary_law: str = "logistic"
    n_list: tuple = (1, 2, 3, 5, 10, 50, 100)
    law: str = "exponential_mean_n"
    max_iters: int = 25
    tolerance: float = 1e-6
    n_max: int = 50
    stop_tolerance: float = 1e-6
    identity_trials: int = 20
    output_format: str = "csv"
    output_path: str = ""

    def __post_init__(self):
        _check_field(self.command in COMMANDS, "command",
                     f"must be one of {', '.join(COMMANDS)}")
        _check_field(isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64,
                     "seed", "must be a 64-bit unsigned integer")
        _check_field(np.isfinite(self.x_max) and self.x_max > 0, "x_max", "must be positive")
        _check_field(np.isfinite(self.step) and 0 < self.step <= self.x_max,
                     "step", "must be positive and at most x_max")
        _check_field(self.resolution >= 4, "resolution", "must be at least 4")
        _check_field(len(self.depths) > 0, "depths", "must be non-empty")
        for d in self.depths:
            _check_field(isinstance(d, int) and 0 <= d <= MAX_DEPTH, "depths",
                         f"every depth must be an integer in [0, {MAX_DEPTH}]")
        _check_field(tuple(sorted(self.depths)) == self.depths, "depths",
                     "must be sorted increasing")
        _check_field(self.replicates >= 1, "replicates", "must be positive")
        _check_field(np.isfinite(self.xi_cutoff) and self.xi_cutoff >= 8.0,
                     "xi_cutoff", "must be at least 8")
        try:
            BoundaryLaw.parse(self.boundary_law)
        except ValueError as err:
            raise ConfigError("boundary_law", str(err)) from None
        _check_field(len(self.n_list) > 0, "n_list", "must be non-empty")
        for n in self.n_list:
            _check_field(isinstance(n, int) and 1 <= n <= 2000, "n_list",
                         "every n must be an integer in [1, 2000]")
        _check_field(self.law in COST_LAWS, "law",
                     f"must be one of {', '.join(COST_LAWS)}")
        _check_field(self.max_iters >= 1, "max_iters", "must be positive")
        _check_field(self.tolerance > 0, "tolerance", "must be positive")
        _check_field(self.n_max >= 1, "n_max", "must be positive")
        _check_field(self.stop_tolerance > 0, "stop_tolerance", "must be positive")
        _check_field(self.identity_trials >= 1, "identity_trials", "must be positive")
        _check_field(self.output_format in ("csv", "json"), "output_format",
                     "must be 'csv' or 'json'")


def _check_field(ok: bool, path: str, reason: str) -> None:
    if not ok:
        raise ConfigError(path, reason)


_INT_FIELDS = {"seed", "resolution", "replicates", "max_iters", "n_max", "identity_trials"}
_FLOAT_FIELDS = {"x_max", "step", "xi_cutoff", "tolerance", "stop_tolerance"}
_INT_TUPLE_FIELDS = {"depths", "n_list"}
_STR_FIELDS = {"command", "boundary_law", "law", "output_format", "output_path"}


def _coerce(name: str, value):
    try:
        if name in _INT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError("expected an integer")
            return int(value)
        if name in _FLOAT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError("expected a number")
            return float(value)
        if name in _INT_TUPLE_FIELDS:
            if not isinstance(value, (list, tuple)):
                raise TypeError("expected a list of integers")
            out = []
            for item in value:
                if isinstance(item, bool) or not isinstance(item, int):
                    raise TypeError("expected a list of integers")
                out.append(int(item))
            return tuple(out)
        if name in _STR_FIELDS:
            if not isinstance(value, str):
                raise TypeError("expected a string")
            return value
    except TypeError as err:
        raise ConfigError(name, str(err)) from None
    raise ConfigError(name, "unknown field")


def validate_config(raw: str) -> ExperimentConfig:
    """Parse a JSON config text into a validated ExperimentConfig.

    Unknown fields are rejected with their path; missing fields take
    defaults. The result round-trips through canonical_json exactly.
    """
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as err:
        raise ConfigError("<root>", f"not valid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(key, "unknown field")
        kwargs[key] = _coerce(key, value)
    if "command" not in kwargs:
        raise ConfigError("command", "is required")
    return ExperimentConfig(**kwargs)


def canonical_json(config: ExperimentConfig) -> str:
    """The canonical serialization: sorted keys, no whitespace, every
    field explicit. Parsing it back yields an identical config and an
    identical canonical form."""
    record = asdict(config)
    record["depths"] = list(config.depths)
    record["n_list"] = list(config.n_list)
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _parse_int_list(text: str, flag: str) -> tuple:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ConfigError(flag, f"cannot parse integer list from {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logistic-rde",
        description="Numerical and Monte Carlo experiments around the "
                    "logistic minimum recursion.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p):
        p.add_argument("--config", metavar="FILE", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
        p.add_argument("--out", metavar="DIR",
                       help=f"output directory (default: ${OUTDIR_ENV_VAR} or the working directory)")
        p.add_argument("--format", choices=("csv", "json"), dest="output_format",
                       help="primary result file format")
        p.add_argument("--workers", type=int, default=1,
                       help="replicate-parallel worker count; results do not depend on it")

    p = sub.add_parser("logistic-check", help="run the logistic-law invariant checks")
    add_common(p)
    p.add_argument("--replicates", type=int, help="sample size for the distributional checks")

    p = sub.add_parser("iterate-t", help="iterate the diagonal operator from the lower envelope")
    add_common(p)
    p.add_argument("--x-max", type=float, dest="x_max", help="grid half-width")
    p.add_argument("--step", type=float, help="grid step")
    p.add_argument("--max-iters", type=int, dest="max_iters", help="iteration cap")
    p.add_argument("--tolerance", type=float, help="sup-norm stopping tolerance")

    p = sub.add_parser("beta", help="run the unit-interval recursion")
    add_common(p)
    p.add_argument("--n-max", type=int, dest="n_max", help="recursion step cap")
    p.add_argument("--stop-tolerance", type=float, dest="stop_tolerance",
                   help="successive-difference stopping tolerance")
    p.add_argument("--resolution", type=int, help="unit-interval grid resolution")

    p = sub.add_parser("coupling", help="shared-weight coupling across a depth ladder")
    add_common(p)
    p.add_argument("--depths", type=str, help="comma-separated depth ladder, e.g. 0,2,4")
    p.add_argument("--replicates", type=int, help="replicates per depth")
    p.add_argument("--xi-cutoff", type=float, dest="xi_cutoff", help="Poisson arrival cutoff")
    p.add_argument("--boundary", dest="boundary_law",
                   help="boundary law: logistic, point_mass:V, or uniform:A:B")

    p = sub.add_parser("assignment", help="random assignment Monte Carlo benchmark")
    add_common(p)
    p.add_argument("--n", dest="n_list", type=str, help="comma-separated matrix sizes")
    p.add_argument("--replicates", type=int, help="instances per size")
    p.add_argument("--law", choices=COST_LAWS, help="cost law")

    p = sub.add_parser("identity-check", help="product identity of the two operators "
                                              "on random integrable tails")
    add_common(p)
    p.add_argument("--trials", type=int, dest="identity_trials", help="number of random tails")

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.command is None:
        raise ConfigError("command", "no command given; see --help")
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as err:
            raise ConfigError("config", f"cannot read {args.config!r}: {err}") from None
        config = validate_config(raw)
        if config.command != args.command:
            config = replace(config, command=args.command)
    else:
        config = ExperimentConfig(command=args.command)
    overrides = {}
    for name in ("seed", "x_max", "step", "resolution", "replicates", "xi_cutoff",
                 "boundary_law", "law", "max_iters", "tolerance", "n_max",
                 "stop_tolerance", "identity_trials", "output_format"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "depths", None) is not None:
        overrides["depths"] = _parse_int_list(args.depths, "depths")
    if getattr(args, "n_list", None) is not None:
        overrides["n_list"] = _parse_int_list(args.n_list, "n_list")
    if getattr(args, "out", None) is not None:
        overrides["output_path"] = args.out
    try:
        return replace(config, **overrides)
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError("<flags>", str(err)) from None


def _outdir(config: ExperimentConfig) -> str:
    out = config.output_path or os.environ.get(OUTDIR_ENV_VAR, "") or os.getcwd()
    os.makedirs(out, exist_ok=True)
    return out


def _write_json(path: str, record: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _float17(x: float) -> str:
    return f"{x:.17g}"


class InvariantFailure(RuntimeError):
    """A named runtime invariant did not hold."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"invariant {invariant!r} violated: {detail}")


def _run_logistic_check(config: ExperimentConfig, outdir: str, workers: int):
    n_samples = min(config.replicates * 10, 1_000_000)
    xs = np.linspace(-config.x_max, config.x_max, 2001)
    h = 1e-5
    fd = (logistic.cdf(xs + h) - logistic.cdf(xs - h)) / (2 * h)
    checks = [
        ("a1_residual_sup", float(np.max(np.abs(logistic.fixed_point_residual(xs)))), 1e-8),
        ("density_vs_finite_difference", float(np.max(np.abs(fd - logistic.density(xs)))), 1e-7),
        ("symmetry_sup", float(np.max(np.abs(logistic.tail(xs) - logistic.cdf(-xs)))), 0.0),
        ("right_mass_at_zero_vs_ln2", abs(logistic.tail_integral(0.0) - np.log(2.0)), 1e-10),
        ("quantile_round_trip", float(np.max(np.abs(
            logistic.quantile(logistic.cdf(np.linspace(-20, 20, 401))) - np.linspace(-20, 20, 401)
        ))), 1e-6),
    ]
    rng = np.random.default_rng(config.seed)
    samples = logistic.sample(rng, size=n_samples)
    mean_bound = 4.0 * (np.pi / np.sqrt(3.0)) / np.sqrt(n_samples)
    checks.append(("sample_mean_abs", abs(float(samples.mean())), mean_bound))
    ks_n = min(n_samples, 100_000)
    checks.append(("ks_statistic", ks_statistic(samples[:ks_n]), ks_critical_value(ks_n, 0.05)))

    rows = [{"name": name, "value": value, "bound": bound, "pass": bool(value <= bound)}
            for name, value, bound in checks]
    if config.output_format == "json":
        result_path = os.path.join(outdir, "logistic_check.json")
        _write_json(result_path, {"checks": rows})
    else:
        result_path = os.path.join(outdir, "logistic_check.csv")
        lines = ["name,value,bound,pass"]
        lines += [f"{r['name']},{_float17(r['value'])},{_float17(r['bound'])},{r['pass']}"
                  for r in rows]
        with open(result_path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    for r in rows:
        status = "ok" if r["pass"] else "FAIL"
        print(f"  {r['name']}: {r['value']:.3e} (bound {r['bound']:.3e}) {status}")
    bad = [r["name"] for r in rows if not r["pass"]]
    if bad:
        raise InvariantFailure(bad[0], "logistic law check out of bounds")
    return [result_path]


def _run_iterate_t(config: ExperimentConfig, outdir: str, workers: int):
    seed_fn = logistic_tail_squared_grid(-config.x_max, config.x_max, config.step)
    trajectory = iterate_to_fixed_point(seed_fn, config.max_iters, config.tolerance)
    summary = {
        "converged": trajectory.converged,
        "final_step_distance": trajectory.final_step_distance,
        "iterates": trajectory_summary(trajectory),
    }
    outputs = []
    if config.output_format == "csv":
        path = os.path.join(outdir, "iterate_t.csv")
        trajectory_to_csv(trajectory, path)
        outputs.append(path)
    summary_path = os.path.join(outdir, "iterate_t_summary.json")
    _write_json(summary_path, summary)
    outputs.append(summary_path)
    last = trajectory[-1]
    print(f"  {len(trajectory)} iterates, sup distance to the logistic tail "
          f"{last.sup_distance_to_logistic_tail:.3e}, converged={trajectory.converged}")
    return outputs


def _run_beta(config: ExperimentConfig, outdir: str, workers: int):
    seq = beta_mod.run_recursion(config.n_max, config.stop_tolerance, config.resolution)
    outputs = []
    if config.output_format == "csv":
        path = os.path.join(outdir, "beta_curves.csv")
        lines = ["n,s,value"]
        for n, curve in enumerate(seq.curves):
            lines.extend(
                f"{n},{s:.17g},{v:.17g}"
                for s, v in zip(curve.nodes.tolist(), curve.values.tolist())
            )
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
        outputs.append(path)
    summary_path = os.path.join(outdir, "beta_summary.json")
    _write_json(summary_path, {
        "n_terminal": seq.n_terminal,
        "reached_tolerance": seq.reached_tolerance,
        "stop_tolerance": seq.stop_tolerance,
        "terminal_sup": seq.terminal_sup,
        "values_at_zero": list(seq.values_at_zero),
    })
    outputs.append(summary_path)
    zeros = seq.values_at_zero
    if not np.all(np.diff(zeros) < 0):
        raise InvariantFailure("beta_at_zero_decreasing",
                               "the value-at-zero sequence failed to decrease")
    print(f"  {seq.n_terminal} steps, value at zero {zeros[0]:.6f} -> {zeros[-1]:.6f}, "
          f"terminal sup {seq.terminal_sup:.3e}")
    return outputs


def _run_coupling(config: ExperimentConfig, outdir: str, workers: int):
    pwit_config = PwitConfig(
        depth=max(config.depths),
        xi_cutoff=config.xi_cutoff,
        boundary_law=BoundaryLaw.parse(config.boundary_law),
        replicates=config.replicates,
        master_seed=config.seed,
    )
    report = run_coupling(pwit_config, depths=config.depths, workers=workers)
    outputs = []
    result_path = os.path.join(outdir, "coupling.csv" if config.output_format == "csv"
                               else "coupling.json")
    if config.output_format == "csv":
        report.to_csv(result_path)
    else:
        _write_json(result_path, report.to_json_dict())
    outputs.append(result_path)
    for row in report.rows:
        print(f"  depth {row.depth:2d}: mean gap {row.mean_abs_root_gap:.4f}, "
              f"min-law KS {row.ks_statistic_min_vs_logistic:.4f}, "
              f"flag rate {row.truncation_flag_rate:.2e}")
    worst_flag = max(row.truncation_flag_rate for row in report.rows)
    if pwit_config.boundary_law.kind == "logistic" and worst_flag > 1e-3:
        raise InvariantFailure("truncation_flag_rate",
                               f"rate {worst_flag:.2e} exceeds 1e-3 at the default cutoff")
    return outputs


def _run_assignment(config: ExperimentConfig, outdir: str, workers: int):
    estimates = mean_objective_table(config.n_list, config.law,
                                     config.replicates, config.seed, workers)
    outputs = []
    result_path = os.path.join(outdir, "assignment.csv" if config.output_format == "csv"
                               else "assignment.json")
    if config.output_format == "csv":
        table_to_csv(estimates, result_path)
    else:
        _write_json(result_path, {"rows": [
            {"n": e.n, "law": e.law, "replicates": e.replicates,
             "mean": e.mean, "std_error": e.std_error,
             "parisi_value": e.parisi_value, "abs_gap": e.abs_gap}
            for e in estimates
        ]})
    outputs.append(result_path)
    for e in estimates:
        band = 3.0 * e.std_error
        inside = "within" if e.abs_gap <= band else "OUTSIDE"
        print(f"  n {e.n:4d}: mean {e.mean:.6f} +- {e.std_error:.6f}, "
              f"target {e.parisi_value:.6f} ({inside} the 3-SE band {band:.6f})")
    return outputs


def _run_identity_check(config: ExperimentConfig, outdir: str, workers: int):
    rng = np.random.default_rng(config.seed)
    residuals = []
    for _ in range(config.identity_trials):
        f = random_integrable_tail(rng)
        product = normalized_product(f)
        residuals.append(float(np.max(np.abs(product - 1.0))))
    worst = max(residuals)
    result_path = os.path.join(outdir, "identity_check.json")
    _write_json(result_path, {
        "trials": config.identity_trials,
        "max_abs_residual": worst,
        "bound": 1e-6,
        "residuals": residuals,
    })
    print(f"  {config.identity_trials} random tails, worst |product - 1| = {worst:.3e}")
    if worst > 1e-6:
        raise InvariantFailure("operator_product_identity",
                               f"residual {worst:.3e} exceeds 1e-6")
    return [result_path]


_RUNNERS = {
    "logistic-check": _run_logistic_check,
    "iterate-t": _run_iterate_t,
    "beta": _run_beta,
    "coupling": _run_coupling,
    "assignment": _run_assignment,
    "identity-check": _run_identity_check,
}


def run(config: ExperimentConfig, workers: int = 1) -> int:
    """Execute one experiment; returns the process exit code."""
    started = time.monotonic()
    try:
        outdir = _outdir(config)
    except OSError as err:
        _error_record("io", str(err))
        return EXIT_IO
    print(f"{config.command} (seed {config.seed}) -> {outdir}")
    try:
        outputs = _RUNNERS[config.command](config, outdir, workers)
    except InvariantFailure as err:
        _error_record("invariant", str(err), invariant=err.invariant)
        return EXIT_INVARIANT
    except OSError as err:
        _error_record("io", str(err))
        return EXIT_IO
    manifest = {
        "command": config.command,
        "config": json.loads(canonical_json(config)),
        "seed": config.seed,
        "version": VERSION,
        "wall_time_s": time.monotonic() - started,
        "outputs": [os.path.basename(p) for p in outputs],
        "workers": workers,
    }
    try:
        _write_json(os.path.join(outdir, f"{config.command.replace('-', '_')}_manifest.json"),
                    manifest)
    except OSError as err:
        _error_record("io", str(err))
        return EXIT_IO
    return EXIT_OK


def _error_record(kind: str, detail: str, **extra) -> None:
    record = {"error": kind, "detail": detail}
    record.update(extra)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except ConfigError as err:
        _error_record("config", str(err), field=err.path)
        return EXIT_CONFIG
    return run(config, workers=max(1, int(getattr(args, "workers", 1) or 1)))


if __name__ == "__main__":
    sys.exit(main())
