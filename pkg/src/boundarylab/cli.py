"""Command-line front end: one subcommand per experiment.

`boundary-lab <subcommand> --config <path> [--out <dir>] [--seed N]
[--threads N]` reads a single JSON config (defaults fill anything
omitted), runs the experiment, and writes `<out>/<subcommand>.csv`
(rows) plus `<out>/<subcommand>.json` (header + summary).  Identical
config and seed reproduce byte-identical CSV bodies.

Exit codes: 0 success, 1 usage error, 2 invariant violation (including
config validation), 3 enumeration cap exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Callable

from . import acceptance
from .boundary import from_strings
from .classify import (
    density_ratio_report,
    holder_fit_report,
    metric_pair,
    similarity_deviation_report,
)
from .density import (
    ConformalDensity,
    ahlfors_report,
    build_density,
    cone_report,
    cover_multiplicity_report,
    critical_exponent,
    cylinder_report,
    growth_report,
    shadow_lemma_report,
)
from .flow import (
    bms_invariance_report,
    ergodic_experiment,
    properness_report,
    tau_sigma_gap_report,
)
from .koopman import (
    KernelStep,
    StepFunction,
    decay_report,
    distance_step_function,
    p1_norm_report,
    projection_report,
    sr_convergence_report,
    sr_norm_report,
)
from .report import ExperimentReport
from .words import CapExceeded, GroupModel

USAGE = (
    "usage: boundary-lab <subcommand> [--config PATH] [--out DIR] "
    "[--seed N] [--threads N]\n"
)

DEFAULT_CONFIG: dict = {
    # models
    "rank": 2,
    "weights": [1.0, 1.0],
    "weights2": [1.0, 2.0],  # second model, classify only
    "epsilon": None,  # null -> h/2 (D = 2)
    "epsilon2": None,
    # geometry knobs
    "sigma0": 1.5,
    "alpha": 1.5,
    "C": 1.5,
    "tau_prime": 2.0,
    "r_max": 8.0,
    "annulus_r": 5.0,
    "cone_head": "",
    "cone_period": "b",
    # ladders and grids
    "depth": 4,
    "classify_depth": 10,
    "k_max": 6,
    "psi_depth": 3,
    "decay_n_values": [2, 3, 4, 5, 6, 7, 8],
    "sr_r_values": [3.0, 4.0, 5.0],
    "growth_r_min": 2,
    "growth_r_max": 9,
    "T_grid": [25.0, 50.0, 100.0, 200.0],
    # sample counts
    "samples": 1000,
    "trials": 500,
    "n_pairs": 50,
    "mc_trials": 3,
    "mc_depth": 2,
    # flow window
    "theta": 0.5,
    "window_k": 2.0,
    "cocycle_m": 2.0,
    # plumbing
    "seed": 0,
    "out": "reports",
    "cap": 2_000_000,
}

_POSITIVE_INTS = (
    "rank", "depth", "classify_depth", "k_max", "psi_depth",
    "samples", "trials", "n_pairs", "mc_trials", "mc_depth", "cap",
    "growth_r_min", "growth_r_max",
)
_POSITIVE_FLOATS = ("sigma0", "alpha", "C", "tau_prime", "r_max", "annulus_r", "theta")


def load_config(path: str | None) -> dict:
    """Defaults overlaid with the JSON document at `path` (if given)."""
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
        if not isinstance(overrides, dict):
            raise ValueError("config must be a JSON object")
        unknown = sorted(set(overrides) - set(cfg))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(overrides)
    return cfg


def validate_config(cfg: dict) -> None:
    """Structural checks; epsilon < h is enforced when the density is built."""
    for key in _POSITIVE_INTS:
        v = cfg[key]
        if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            raise ValueError(f"config {key} must be a positive integer, got {v!r}")
    for key in _POSITIVE_FLOATS:
        if not cfg[key] > 0:
            raise ValueError(f"config {key} must be positive, got {cfg[key]!r}")
    for key in ("weights", "weights2"):
        ws = cfg[key]
        if not isinstance(ws, list) or len(ws) != cfg["rank"] or any(w <= 0 for w in ws):
            raise ValueError(f"config {key} must list {cfg['rank']} positive weights")
    grid = cfg["T_grid"]
    if not grid or any(t <= 0 for t in grid) or sorted(grid) != list(grid):
        raise ValueError("T_grid must be positive and ascending")
    if not cfg["decay_n_values"] or not cfg["sr_r_values"]:
        raise ValueError("decay_n_values and sr_r_values must be nonempty")
    if cfg["growth_r_min"] > cfg["growth_r_max"]:
        raise ValueError("growth_r_min must not exceed growth_r_max")


def _model(cfg: dict) -> GroupModel:
    return GroupModel(cfg["rank"], tuple(float(w) for w in cfg["weights"]))


def _density(cfg: dict) -> ConformalDensity:
    return build_density(_model(cfg), cfg["epsilon"])


def _k_rectangle(model: GroupModel) -> KernelStep:
    """Indicator kernel of [first letter] x [second letter]."""
    return KernelStep.from_product(
        StepFunction.indicator(model, (0,)), StepFunction.indicator(model, (2,))
    )


def _sr_params(cfg: dict) -> dict:
    return {
        "alpha": cfg["alpha"],
        "C": cfg["C"],
        "tau_prime": cfg["tau_prime"],
        "sigma0": cfg["sigma0"],
    }


# -- one builder per subcommand ------------------------------------------------


def _run_exponent(cfg: dict) -> ExperimentReport:
    model = _model(cfg)
    h = critical_exponent(model)
    rep = ExperimentReport(
        "exponent",
        ("scale", "h_scaled", "h_scaled_times_scale"),
        header={"rank": model.rank, "weights": ",".join(repr(w) for w in model.weights)},
    )
    for c in (0.5, 1.0, 2.0, 3.0):
        scaled = GroupModel(model.rank, tuple(c * w for w in model.weights))
        hc = critical_exponent(scaled)
        rep.add_row(c, hc, hc * c)
    rep.summary = {
        "h": h,
        "max_homogeneity_dev": max(abs(v - h) for v in rep.column("h_scaled_times_scale")),
    }
    return rep


def _run_density(cfg: dict) -> ExperimentReport:
    return cylinder_report(_density(cfg), cfg["depth"])


def _run_shadow(cfg: dict) -> ExperimentReport:
    return shadow_lemma_report(_density(cfg), cfg["sigma0"], cfg["r_max"])


def _run_ahlfors(cfg: dict) -> ExperimentReport:
    return ahlfors_report(_density(cfg), cfg["samples"], cfg["k_max"], cfg["seed"])


def _run_growth(cfg: dict) -> ExperimentReport:
    r_values = tuple(float(r) for r in range(cfg["growth_r_min"], cfg["growth_r_max"] + 1))
    return growth_report(_model(cfg), r_values, cfg["alpha"], cap=cfg["cap"])


def _run_cone(cfg: dict) -> ExperimentReport:
    density = _density(cfg)
    xi = from_strings(density.model, cfg["cone_head"], cfg["cone_period"])
    r = cfg["annulus_r"]
    s_grid = tuple(0.5 * i for i in range(int(2.0 * r)))
    return cone_report(density, r, cfg["alpha"], s_grid, xi)


def _run_cover(cfg: dict) -> ExperimentReport:
    return cover_multiplicity_report(
        _density(cfg), cfg["annulus_r"], cfg["alpha"], cfg["sigma0"],
        cfg["samples"], cfg["seed"],
    )


def _run_matrix_coeff(cfg: dict) -> ExperimentReport:
    density = _density(cfg)
    model = density.model
    phi = StepFunction.indicator(model, (0,))
    psi = distance_step_function(
        density, from_strings(model, "", "b"), cfg["psi_depth"]
    )
    return decay_report(density, phi, psi, tuple(cfg["decay_n_values"]))


def _run_p1norm(cfg: dict) -> ExperimentReport:
    return p1_norm_report(_density(cfg), cfg["r_max"])


def _run_kernel_convergence(cfg: dict) -> ExperimentReport:
    density = _density(cfg)
    one = StepFunction.constant(density.model, 1.0)
    return sr_convergence_report(
        density, KernelStep.constant(density.model, 1.0), one, one,
        tuple(cfg["sr_r_values"]), **_sr_params(cfg),
    )


def _run_sr_norm(cfg: dict) -> ExperimentReport:
    density = _density(cfg)
    return sr_norm_report(
        density, KernelStep.constant(density.model, 1.0), tuple(cfg["sr_r_values"]),
        cfg["mc_trials"], cfg["mc_depth"], cfg["seed"], **_sr_params(cfg),
    )


def _run_projection(cfg: dict) -> ExperimentReport:
    density = _density(cfg)
    model = density.model
    phi = StepFunction.indicator(model, (0, 2, 0, 2))
    return projection_report(density, (0,), tuple(range(1, cfg["k_max"] + 1)), [phi])


def _run_cocycle(cfg: dict) -> ExperimentReport:
    return tau_sigma_gap_report(
        _density(cfg), cfg["cocycle_m"], cfg["samples"], cfg["seed"]
    )


def _run_bms(cfg: dict) -> ExperimentReport:
    return bms_invariance_report(_density(cfg), cfg["trials"], cfg["seed"])


def _run_properness(cfg: dict) -> ExperimentReport:
    return properness_report(_density(cfg), cfg["theta"], cfg["window_k"])


def _run_ergodic(cfg: dict) -> ExperimentReport:
    density = _density(cfg)
    return ergodic_experiment(
        density, _k_rectangle(density.model), cfg["n_pairs"],
        tuple(cfg["T_grid"]), cfg["seed"],
    )


def _run_classify(cfg: dict) -> ExperimentReport:
    model2 = GroupModel(cfg["rank"], tuple(float(w) for w in cfg["weights2"]))
    mp = metric_pair(_model(cfg), model2, cfg["epsilon"], cfg["epsilon2"])
    sim = similarity_deviation_report(mp, cfg["r_max"])
    dens = density_ratio_report(mp, cfg["classify_depth"])
    hold = holder_fit_report(mp, cfg["samples"], cfg["seed"])
    rep = ExperimentReport("classify", sim.columns, header=sim.header, rows=sim.rows)
    rep.summary = {
        "similarity_slope": sim.summary["slope"],
        "similarity_verdict": sim.summary["verdict"],
        "max_deviation": sim.summary["max_deviation"],
        "density_log_slope": dens.summary["log_slope"],
        "density_verdict": dens.summary["verdict"],
        "final_spread": dens.summary["final_spread"],
        "holder_slope": hold.summary["slope"],
        "dimension_ratio": hold.summary["dimension_ratio"],
        "cross_ratio_slope": hold.summary["cross_ratio_slope"],
    }
    return rep


BUILDERS: dict[str, Callable[[dict], ExperimentReport]] = {
    "exponent": _run_exponent,
    "density": _run_density,
    "shadow": _run_shadow,
    "ahlfors": _run_ahlfors,
    "growth": _run_growth,
    "cone": _run_cone,
    "cover": _run_cover,
    "matrix-coeff": _run_matrix_coeff,
    "p1norm": _run_p1norm,
    "kernel-convergence": _run_kernel_convergence,
    "sr-norm": _run_sr_norm,
    "projection": _run_projection,
    "cocycle": _run_cocycle,
    "bms": _run_bms,
    "properness": _run_properness,
    "ergodic": _run_ergodic,
    "classify": _run_classify,
}

SUBCOMMANDS = tuple(BUILDERS) + ("verify-all",)


def _write(rep: ExperimentReport, sub: str, cfg: dict, outdir: Path, wall_time: float) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    rep.header = {
        **rep.header,
        "config_json": json.dumps(cfg, sort_keys=True),
        "wall_time_s": wall_time,
    }
    rep.write_csv(outdir / f"{sub}.csv")
    rep.write_json(outdir / f"{sub}.json")


def _run_verify_all(cfg: dict, outdir: Path, threads: int) -> int:
    ctx = acceptance.build_context(cap=cfg["cap"])
    start = time.perf_counter()
    results = acceptance.run_checks(ctx, threads=threads)
    rep = ExperimentReport("verify-all", ("check", "passed", "seconds", "detail"))
    for res in results:
        flag = "PASS" if res.passed else "FAIL"
        print(f"{flag}  {res.name:34s} {res.seconds:8.2f}s  {'' if res.passed else res.detail}")
        rep.add_row(res.name, res.passed, res.seconds, res.detail)
    failed = [res.name for res in results if not res.passed]
    rep.summary = {
        "n_checks": len(results),
        "n_failed": len(failed),
        "failed": ", ".join(failed),
    }
    _write(rep, "verify-all", cfg, outdir, time.perf_counter() - start)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 0 if not failed else 2


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        sys.stderr.write(USAGE)
        return 1
    if argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE + "subcommands: " + ", ".join(SUBCOMMANDS) + "\n")
        return 0
    sub = argv[0]
    if sub not in SUBCOMMANDS:
        sys.stderr.write(f"unknown subcommand {sub!r}\n" + USAGE)
        return 1

    parser = argparse.ArgumentParser(prog=f"boundary-lab {sub}")
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--threads", type=int, default=1, help="verify-all worker count")
    try:
        args = parser.parse_args(argv[1:])
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        cfg = load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"cannot read config: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return 2
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    outdir = Path(cfg["out"])

    try:
        validate_config(cfg)
        # epsilon < h is checked against the solved exponent
        _density(cfg)
        if sub == "classify":
            build_density(
                GroupModel(cfg["rank"], tuple(float(w) for w in cfg["weights2"])),
                cfg["epsilon2"],
            )
        if sub == "verify-all":
            return _run_verify_all(cfg, outdir, max(1, args.threads))
        start = time.perf_counter()
        rep = BUILDERS[sub](cfg)
        _write(rep, sub, cfg, outdir, time.perf_counter() - start)
    except CapExceeded as exc:
        sys.stderr.write(f"enumeration cap exhausted: {exc}\n")
        return 3
    except (AssertionError, ValueError) as exc:
        sys.stderr.write(f"invariant violated: {exc}\n")
        return 2
    print(f"{sub}: wrote {outdir / (sub + '.csv')} and {outdir / (sub + '.json')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
