"""Command-line harness: ``extpicard {solve,table,mathieu-eigen,bratu,sweep}``.

Experiment configs are YAML mappings::

    problem: glycolysis
    params: {a: 0.4, b: 0.6}
    interval: [0, 10]
    initial: [1, 1]
    variant: extended            # or standard
    settings: {h: 0.1, n_iter: 3, fit_degree: 3, backend: poly-fit}
    reference: {method: rk8, step: 0.01}   # or {method: taylor, order: 5, step: 0.1}, or null
    samples_per_unit: 400
    outputs: {dir: out}

Exit status: 0 on success, 2 on invalid configuration, 3 when a solve
diverges (the failing segment is reported on stderr).
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .analysis import l2_mean_error, reproduce_table, table_ids
from .errors import ConfigError, DivergenceError, ExtPicardError, InvalidArgumentError
from .picard import SolveSettings, solve_segmented
from .problems import (PROBLEMS, ProblemSpec, bratu_exact_solution, bratu_shoot,
                       mathieu_char_series, mathieu_char_values, percent_deviation)
from .reference import rk8_solve, taylor_solve

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3
SAMPLES_PER_UNIT = 400
_SETTING_NAMES = {f.name for f in fields(SolveSettings)}
_CONFIG_KEYS = {"problem", "params", "interval", "initial", "variant", "settings",
                "reference", "samples_per_unit", "outputs", "name"}


@dataclass
class ExperimentConfig:
    problem: str
    params: dict
    interval: tuple
    initial: tuple
    settings: SolveSettings
    variant: str = "extended"
    reference: Optional[dict] = None
    samples_per_unit: int = SAMPLES_PER_UNIT
    outputs: dict = field(default_factory=dict)
    name: str = ""

    def system(self):
        return ProblemSpec(self.problem, self.params).system()

    @property
    def out_dir(self) -> Path:
        return Path(self.outputs.get("dir", "."))

    def output_path(self, key: str, default: str) -> Path:
        return self.out_dir / self.outputs.get(key, default)


def _number(value, what):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{what} must be finite, got {value!r}")
    return out


def _vector(value, what):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{what} must be a list of numbers")
    return tuple(_number(v, what) for v in value)


def build_config(raw: dict) -> ExperimentConfig:
    """Validate a raw mapping against the chosen problem; raise ConfigError."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    problem = raw.get("problem")
    if problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {sorted(PROBLEMS)}, got {problem!r}")
    entry = PROBLEMS[problem]
    params = dict(entry["defaults"])
    params.update(raw.get("params") or {})
    extra = set(params) - set(entry["params"])
    if extra:
        raise ConfigError(f"problem {problem} does not take parameters {sorted(extra)}")
    params = {k: _number(v, f"params.{k}") for k, v in params.items()}
    try:
        n = ProblemSpec(problem, params).system().n
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc)) from None

    interval = _vector(raw.get("interval", entry["interval"]), "interval")
    if len(interval) != 2 or not interval[1] > interval[0]:
        raise ConfigError("interval must be [a, b] with b > a")
    initial = raw.get("initial", entry["initial"])
    if initial is None:
        raise ConfigError(f"problem {problem} needs an explicit initial value")
    initial = _vector(initial, "initial")
    if len(initial) != n:
        raise ConfigError(f"initial must have {n} entries, one per state component")

    settings_raw = dict(raw.get("settings") or {})
    bad = set(settings_raw) - _SETTING_NAMES
    if bad:
        raise ConfigError(f"unknown settings {sorted(bad)}")
    settings_raw.setdefault("h", 0.1)
    try:
        settings = SolveSettings(**settings_raw)
    except (InvalidArgumentError, TypeError) as exc:
        raise ConfigError(f"invalid settings: {exc}") from None

    variant = raw.get("variant", "extended")
    if variant not in ("extended", "standard"):
        raise ConfigError("variant must be 'extended' or 'standard'")
    reference = raw.get("reference", {"method": "rk8", "step": 0.01})
    if reference is not None:
        reference = dict(reference)
        method = reference.get("method", "rk8")
        if method not in ("rk8", "taylor"):
            raise ConfigError("reference.method must be 'rk8' or 'taylor'")
        reference["method"] = method
        reference["step"] = _number(reference.get("step", 0.01), "reference.step")
        if reference["step"] <= 0:
            raise ConfigError("reference.step must be positive")
        if method == "taylor":
            order = reference.get("order", 5)
            if order not in range(2, 11):
                raise ConfigError("reference.order must be an integer in 2..10")
    spu = raw.get("samples_per_unit", SAMPLES_PER_UNIT)
    if not isinstance(spu, int) or spu < 1:
        raise ConfigError("samples_per_unit must be a positive integer")
    outputs = raw.get("outputs") or {}
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be a mapping")
    return ExperimentConfig(problem, params, interval, initial, settings, variant, reference,
                            spu, outputs, str(raw.get("name", "")))


def load_yaml(path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return data or {}


# ---------------------------------------------------------------- outputs

def sample_grid(a: float, b: float, per_unit: int = SAMPLES_PER_UNIT) -> np.ndarray:
    """Uniform grid with ``per_unit`` intervals per unit length (401 points on [0, 1])."""
    count = max(int(round(per_unit * (b - a))), 1) + 1
    return np.linspace(a, b, count)


def write_solution_csv(path, x, Y):
    Y = np.asarray(Y)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x"] + [f"y{i + 1}" for i in range(Y.shape[1])])
        for xi, row in zip(x, Y):
            writer.writerow([format(xi, ".17g")] + [format(v, ".17g") for v in row])


def read_solution_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:]


def write_convergence_csv(path, reports):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["segment", "x0", "x1", "k", "sup_diff", "bound", "bound_ok", "M", "K", "H"])
        for s, rep in enumerate(reports):
            for k, (d, bound, ok) in enumerate(zip(rep.sup_diffs, rep.bounds, rep.bound_ok), start=1):
                writer.writerow([s, format(rep.x0, ".17g"), format(rep.x1, ".17g"), k,
                                 format(d, ".17g"), format(bound, ".17g"), int(bool(ok)),
                                 format(rep.M_est, ".17g"), format(rep.K_est, ".17g"),
                                 format(rep.H_est, ".17g")])


def run(cfg: ExperimentConfig) -> dict:
    """Solve one experiment and write its solution, error and convergence files."""
    system = cfg.system()
    a, b = cfg.interval
    curve = solve_segmented(system, a, b, cfg.initial, cfg.settings, variant=cfg.variant, diagnostics=True)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    x = sample_grid(a, b, cfg.samples_per_unit)
    paths = {"solution": cfg.output_path("solution", "solution.csv"),
             "convergence": cfg.output_path("convergence", "convergence.csv")}
    write_solution_csv(paths["solution"], x, curve(x))
    write_convergence_csv(paths["convergence"], curve.reports)
    result = {"paths": paths, "curve": curve, "error": None}
    if cfg.reference is not None:
        ref = cfg.reference
        if ref["method"] == "rk8":
            reference = rk8_solve(system, a, b, cfg.initial, ref["step"])
        else:
            reference = taylor_solve(system, a, b, cfg.initial, ref["step"], ref.get("order", 5))
        error = l2_mean_error(reference, curve, a, b)
        paths["errors"] = cfg.output_path("errors", "errors.csv")
        with open(paths["errors"], "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["method", "h", "iterations", "degree", "error"])
            writer.writerow(["EP" if cfg.variant == "extended" else "SP", format(cfg.settings.h, ".17g"),
                             cfg.settings.n_iter, cfg.settings.fit_degree, format(error, ".17g")])
        result["error"] = error
    return result


# ---------------------------------------------------------------- commands

def _parse_param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"--param expects KEY=VALUE, got {text!r}")
    return key.strip(), value


def _solve_overrides(args) -> dict:
    raw = load_yaml(args.config) if args.config else {}
    if args.problem:
        raw["problem"] = args.problem
    if args.param:
        raw["params"] = {**(raw.get("params") or {}), **dict(map(_parse_param, args.param))}
    if args.interval:
        raw["interval"] = args.interval
    if args.initial:
        raw["initial"] = args.initial
    if args.variant:
        raw["variant"] = args.variant
    settings = dict(raw.get("settings") or {})
    for name in ("h", "n_iter", "fit_degree", "fit_samples", "backend", "quad_points", "seed"):
        value = getattr(args, name)
        if value is not None:
            settings[name] = value
    raw["settings"] = settings
    if args.no_reference:
        raw["reference"] = None
    elif args.reference_step is not None or args.reference_method is not None:
        ref = dict(raw.get("reference") or {})
        if args.reference_method:
            ref["method"] = args.reference_method
        if args.reference_step is not None:
            ref["step"] = args.reference_step
        raw["reference"] = ref
    if args.out_dir:
        raw["outputs"] = {**(raw.get("outputs") or {}), "dir": args.out_dir}
    return raw


def cmd_solve(args):
    cfg = build_config(_solve_overrides(args))
    result = run(cfg)
    for kind, path in result["paths"].items():
        print(f"{kind}: {path}")
    if result["error"] is not None:
        print(f"error: {result['error']:.6e}")
    return EXIT_OK


def cmd_table(args):
    overrides = {}
    if args.seed:
        overrides["seed"] = args.seed
    if args.backend:
        overrides["backend"] = args.backend
    table = reproduce_table(args.table_id, overrides)
    text = table.to_csv(args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_mathieu_eigen(args):
    roots = mathieu_char_values(args.q, args.n_iter, count=args.count)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["index", "r", "series", "percent_deviation"])
    for i, r in enumerate(roots, start=1):
        target = mathieu_char_series(args.q, i)
        writer.writerow([i, format(r, ".12g"), format(target, ".12g"),
                         format(percent_deviation(r, target), ".6e")])
    return EXIT_OK


def cmd_bratu(args):
    u, curve = bratu_shoot(args.alpha, args.n_iter)
    exact = bratu_exact_solution(args.alpha)
    error = l2_mean_error(exact, curve, 0.0, 1.0, normalize=False)
    print(f"u: {u:.12g}")
    print(f"theta: {exact.theta:.12g}")
    print(f"error: {error:.6e}")
    if args.out:
        x = sample_grid(0.0, 1.0)
        write_solution_csv(args.out, x, curve(x))
    return EXIT_OK


def cmd_sweep(args):
    raw = load_yaml(args.config)
    experiments = raw.get("experiments") if isinstance(raw, dict) else None
    if not experiments:
        raise ConfigError("sweep config needs a non-empty 'experiments' list")
    base = {k: v for k, v in raw.items() if k != "experiments"}
    root = Path(args.out_dir or base.pop("outputs", {}).get("dir", "sweep"))
    base.pop("outputs", None)
    cfgs = []
    for i, exp in enumerate(experiments):
        merged = {**base, **exp}
        merged["settings"] = {**(base.get("settings") or {}), **(exp.get("settings") or {})}
        name = str(exp.get("name", f"exp{i:03d}"))
        merged["outputs"] = {"dir": str(root / name)}
        cfgs.append(build_config(merged))
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(run, cfgs))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["name", "error", "solution"])
    for cfg, res in zip(cfgs, results):
        err = "" if res["error"] is None else format(res["error"], ".6e")
        writer.writerow([cfg.out_dir.name, err, res["paths"]["solution"]])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extpicard", description="Extended Picard ODE benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one experiment from a config file and/or flags")
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"))
    p.add_argument("--initial", nargs="+", type=float)
    p.add_argument("--variant", choices=("extended", "standard"))
    p.add_argument("--h", type=float)
    p.add_argument("--n-iter", dest="n_iter", type=int)
    p.add_argument("--fit-degree", dest="fit_degree", type=int)
    p.add_argument("--fit-samples", dest="fit_samples", type=int)
    p.add_argument("--backend")
    p.add_argument("--quad-points", dest="quad_points", type=int)
    p.add_argument("--seed")
    p.add_argument("--reference-method", choices=("rk8", "taylor"))
    p.add_argument("--reference-step", type=float)
    p.add_argument("--no-reference", action="store_true")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="reproduce one benchmark error table as CSV")
    p.add_argument("table_id", type=str.upper, choices=table_ids())
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--seed", help="segment seed mode override")
    p.add_argument("--backend")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("mathieu-eigen", help="Mathieu characteristic values from y_n(pi) = 0")
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--n-iter", dest="n_iter", type=int, default=3)
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_mathieu_eigen)

    p = sub.add_parser("bratu", help="shoot the Bratu model and compare with the exact solution")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-iter", dest="n_iter", type=int, default=2)
    p.add_argument("--out", help="write the shot solution CSV here")
    p.set_defaults(func=cmd_bratu)

    p = sub.add_parser("sweep", help="run every experiment listed in a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        where = f"segment {exc.segment}" if exc.segment is not None else "unknown segment"
        print(f"extpicard: diverged on {where}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"extpicard: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExtPicardError as exc:
        print(f"extpicard: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
