"""Command-line front end.

Subcommands: run, analyze, merge, oracle-check.  Exit codes: 0 success,
1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import CouplingSet, build_kernel
from .oracle import compare_mcmc_to_exact
from .runner import (
    ConfigError,
    ExperimentSpec,
    RunManifest,
    analysis_seed,
    analyze_group,
    merge_results,
    resolve_threads,
    run_experiment,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqakz",
        description="Simulated quantum annealing of the transverse-field "
                    "Ising chain with defect-statistics analysis.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment grid from a config file")
    run_p.add_argument("--config", required=True, help="JSON config mirroring "
                       "ExperimentSpec field names")
    run_p.add_argument("--out", help="override out_dir")
    run_p.add_argument("--seed", type=int, help="override master_seed")
    run_p.add_argument("--samples", type=int, help="override samples")
    run_p.add_argument("--threads", type=int, help="worker threads "
                       "(default: SQAKZ_THREADS or all cores)")
    run_p.add_argument("--no-resume", action="store_true",
                       help="recompute cells even if the manifest marks them done")

    an_p = sub.add_parser("analyze", help="recompute derived files from raw CSVs")
    an_p.add_argument("--dir", required=True, help="run output directory")
    an_p.add_argument("--group", help="only this group (e.g. L64_P256_alpha0)")

    mg_p = sub.add_parser("merge", help="merge tables across run directories")
    mg_p.add_argument("--dir", required=True, nargs="+",
                      help="one or more run output directories")
    mg_p.add_argument("--out", help="destination (default <first dir>/merged)")

    oc_p = sub.add_parser("oracle-check",
                          help="frozen-coupling sampler vs exact enumeration")
    oc_p.add_argument("--L", type=int, default=2)
    oc_p.add_argument("--P", type=int, default=4)
    oc_p.add_argument("--J", type=float, default=0.5)
    oc_p.add_argument("--Gamma", type=float, default=0.5)
    oc_p.add_argument("--beta-eff", type=float, default=1.0)
    oc_p.add_argument("--alpha", type=float, default=0.0)
    oc_p.add_argument("--sweeps", type=int, default=1_000_000)
    oc_p.add_argument("--seed", type=int, default=7)
    oc_p.add_argument("--threshold", type=float, default=0.01)
    return parser


def _cmd_run(args) -> int:
    spec = ExperimentSpec.from_json(args.config)
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.threads is not None:
        overrides["threads"] = args.threads
    if overrides:
        d = spec.to_dict()
        d.update(overrides)
        spec = ExperimentSpec.from_dict(d)
    manifest = run_experiment(spec, resume=not args.no_resume)
    print(f"run complete; manifest at {manifest.path}")
    return 0


def _cmd_analyze(args) -> int:
    root = Path(args.dir)
    mpath = root / RunManifest.FILENAME
    if not mpath.exists():
        raise ConfigError(f"no manifest under {root}")
    data = json.loads(mpath.read_text())
    spec = data["spec"]
    groups = data["groups"]
    if args.group is not None:
        if args.group not in groups:
            raise ConfigError(f"group {args.group!r} not in manifest "
                              f"(have {sorted(groups)})")
        groups = {args.group: groups[args.group]}
    for key, g in sorted(groups.items()):
        seed = analysis_seed(spec["master_seed"], g["L"], g["P"], g["alpha"])
        analyze_group(root / key, g["L"], g["P"], g["alpha"], spec["beta_eff"],
                      spec["histogram_mode"], tuple(spec["powerlaw_window"]),
                      tuple(spec["ratio_window"]), seed)
        print(f"analyzed {key}")
    return 0


def _cmd_merge(args) -> int:
    written = merge_results(args.dir, out_dir=args.out)
    for name, path in written.items():
        print(f"wrote {path}")
    return 0


def _cmd_oracle_check(args) -> int:
    import math

    if args.Gamma <= 0:
        raise ConfigError("Gamma must be positive (the Trotter coupling "
                          "diverges at Gamma = 0)")
    resolve_threads(None)
    gamma = -0.5 * math.log(math.tanh(args.beta_eff * args.Gamma))
    c = CouplingSet(J=args.J, Gamma=args.Gamma, gamma=gamma,
                    beta_eff=args.beta_eff, alpha=args.alpha)
    k = build_kernel(args.P, args.alpha, args.beta_eff)
    l1 = compare_mcmc_to_exact(args.L, args.P, c, k, sweeps=args.sweeps,
                               seed=args.seed, mode="config")
    ok = l1 < args.threshold
    print(f"L1(configuration occupancy, exact) = {l1:.6f} after "
          f"{args.sweeps} sweeps  [{'PASS' if ok else 'FAIL'} "
          f"threshold {args.threshold}]")
    return 0 if ok else 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _cmd_run, "analyze": _cmd_analyze,
                "merge": _cmd_merge, "oracle-check": _cmd_oracle_check}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
