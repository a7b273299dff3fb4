"""Command-line front end for the experiment harness.

Exit codes: 0 success, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, ScenarioConfig, config_from_pairs, load_config
from .harness import (DEFAULT_RHO_GRID, SCHEMES, ExperimentSpec,
                      run_cdf_experiment, run_complexity, run_rho_sweep,
                      run_trajectory_experiment, run_validation,
                      write_complexity_csv, write_sidecar,
                      write_validation_csv)
from .objective import VARIANTS


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="scenario config file (key = value)")
    parser.add_argument("--set", action="append", default=[], metavar="K=V",
                        dest="overrides", help="override a config key")
    parser.add_argument("--seed", type=int, help="experiment RNG seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--realizations", type=int,
                        help="number of Monte Carlo realizations")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel worker processes")
    parser.add_argument("--warmup", type=int, default=5,
                        help="energy-recursion warmup slots")
    parser.add_argument("--mc-draws", type=int, default=4000,
                        help="estimate draws for architectures without a "
                             "closed form")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wptuav",
        description="Link-level simulator for wirelessly powered aerial "
                    "uplink over distributed, single-cell, and co-located "
                    "architectures.")
    sub = parser.add_subparsers(dest="kind", required=True)

    for kind, default_real in (("cdf-se", 5000), ("cdf-he", 5000)):
        p = sub.add_parser(kind, help=f"sample the {kind[4:].upper()} "
                           "distribution over random placements")
        _add_common(p)
        p.add_argument("--variants", default="cf,sc,cellular",
                       help=f"comma list from {','.join(VARIANTS)}")
        p.set_defaults(realizations_default=default_real)

    p = sub.add_parser("rho-sweep", help="median SE across the "
                       "time-splitting fraction grid")
    _add_common(p)
    p.add_argument("--variants", default="cf")
    p.add_argument("--rho-grid",
                   default=",".join(str(r) for r in DEFAULT_RHO_GRID),
                   help="comma list of rho values in [0, 1]")
    p.set_defaults(realizations_default=2000)

    p = sub.add_parser("trajectory", help="plan flights on random "
                       "placements and log per-slot outcomes")
    _add_common(p)
    p.add_argument("--variants", default="cf")
    p.add_argument("--schemes", default=",".join(SCHEMES),
                   help=f"comma list from {','.join(SCHEMES)}")
    p.set_defaults(realizations_default=200)

    p = sub.add_parser("validate", help="closed forms against signal-level "
                       "sample means")
    _add_common(p)
    p.add_argument("--draws", type=int, default=200000,
                   help="Monte Carlo draws per validated quantity")
    p.add_argument("--tolerance", type=float, default=0.02,
                   help="relative-error pass band (calibrated for the "
                        "default draw count)")
    p.set_defaults(realizations_default=1)

    p = sub.add_parser("complexity", help="complex-multiplication counts "
                       "per processing phase")
    _add_common(p)
    p.add_argument("--ues", type=int, default=1, help="served user count")
    p.set_defaults(realizations_default=1)
    return parser


def _load_config(args) -> ScenarioConfig:
    pairs = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        pairs[key.strip()] = value.strip()
    if args.config:
        config = load_config(args.config, overrides=pairs)
    else:
        config = config_from_pairs(pairs, base=ScenarioConfig())
    if args.seed is not None:
        config = config.replace(rng_seed=args.seed)
    return config


def _spec_from_args(args) -> ExperimentSpec:
    variants = tuple(v for v in getattr(args, "variants", "cf").split(",")
                     if v)
    schemes = tuple(s for s in getattr(args, "schemes",
                                       ",".join(SCHEMES)).split(",") if s)
    rho_grid = tuple(float(r) for r in
                     getattr(args, "rho_grid",
                             ",".join(str(r)
                                      for r in DEFAULT_RHO_GRID)).split(","))
    realizations = args.realizations if args.realizations is not None \
        else args.realizations_default
    return ExperimentSpec(kind=args.kind, variants=variants,
                          realizations=realizations,
                          rng_seed=args.seed if args.seed is not None else 0,
                          out_dir=args.out, warmup=args.warmup,
                          mc_draws=args.mc_draws, rho_grid=rho_grid,
                          schemes=schemes, workers=args.workers)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        spec = _spec_from_args(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.kind in ("cdf-se", "cdf-he"):
            summaries, _ = run_cdf_experiment(spec, config)
            for variant, summary in summaries.items():
                print(f"{args.kind} {variant}: median={summary.median:.6g} "
                      f"p95_likely={summary.p95_likely:.6g} "
                      f"mean={summary.mean:.6g}")
        elif args.kind == "rho-sweep":
            table = run_rho_sweep(spec, config)
            for variant in spec.variants:
                medians = [(rho, table[(variant, rho)].median)
                           for rho in spec.rho_grid]
                best = max(medians, key=lambda t: t[1])
                print(f"rho-sweep {variant}: argmax rho={best[0]:g} "
                      f"median_se={best[1]:.6g}")
        elif args.kind == "trajectory":
            slots = run_trajectory_experiment(spec, config)
            for scheme in spec.schemes:
                avg = sum(logs[scheme].average_se() for logs in slots) \
                    / len(slots)
                print(f"trajectory {scheme}: avg_se={avg:.6g}")
        elif args.kind == "validate":
            reports = run_validation(config, draws=args.draws,
                                     warmup=args.warmup,
                                     tolerance=args.tolerance)
            os.makedirs(args.out, exist_ok=True)
            write_validation_csv(reports,
                                 os.path.join(args.out, "validation.csv"))
            write_sidecar(os.path.join(args.out, "validation_meta.json"),
                          config, spec,
                          extra={"draws": args.draws,
                                 "tolerance": args.tolerance})
            failed = False
            for rep in reports:
                status = "PASS" if rep.passed else "FAIL"
                failed = failed or not rep.passed
                print(f"{status} {rep.quantity}: closed={rep.closed_form:.8g}"
                      f" sampled={rep.sample_mean:.8g}"
                      f" rel_error={rep.rel_error:.3e}")
            if failed:
                return 1
        else:
            counts = run_complexity(config, n_ues=args.ues)
            os.makedirs(args.out, exist_ok=True)
            write_complexity_csv(counts,
                                 os.path.join(args.out, "complexity.csv"))
            for name, value in counts.items():
                print(f"{name}: {value:g}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
