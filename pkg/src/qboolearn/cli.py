"""Command-line entry point: ``qboolearn <subcommand> ...``.

The worker count defaults to the ``QBOOLEARN_WORKERS`` environment variable.
Results go to CSV/JSON files with a provenance header; ``--check`` makes the
``repro-*`` commands exit with status 1 if any reference comparison fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import WORKERS_ENV, derived_seed, pmap, worker_count
from .boolean_task import BooleanTask
from .circuits import KINDS
from .fitting import (FitUndefinedError, fit_exponential_lengths,
                      fit_power_law)
from .harness import (KIND_INDEX, ExperimentConfig, run_de_scaling, run_region_table,
                      run_rs_curves, summarize)
from .kernels import backend_name
from .learners import (DEConfig, LearnConfig, average_series, de_run,
                       random_search)
from .records import digest, read_csv, write_csv, write_json
from .region import estimate_gamma


def _target(args, n_bits):
    if args.target is None:
        return None
    return BooleanTask.from_string(args.target, n_bits)


def _add_common(p, trials=True):
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n-bits", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", help="Reed-Muller coefficients, hex (0x..) or binary")
    if trials:
        p.add_argument("--trials", type=int, default=100)


def _cmd_region(args):
    est = estimate_gamma(args.kind, args.n_bits, _target(args, args.n_bits), args.epsilon,
                         args.samples, args.seed, args.stratify_delta, args.workers)
    config = {"command": "region", "kind": args.kind, "n_bits": args.n_bits,
              "epsilon": args.epsilon, "samples": args.samples,
              "stratify_delta": args.stratify_delta, "target": args.target}
    row = [est.kind, est.dim, est.epsilon, est.samples, est.hits, est.gamma, est.std_error]
    write_csv(args.out, ["kind", "D", "epsilon", "samples", "hits", "gamma", "std_error"],
              [row], config, args.seed)
    print(f"{est.kind} D={est.dim}: gamma={est.gamma:.6g} +- {est.std_error:.3g} "
          f"({est.hits}/{est.samples})")
    return 0


def _rs_trial(seed, cfg):
    return random_search(LearnConfig(**{**cfg, "seed": seed})).iterations


def _de_trial(seed, cfg, de, horizon):
    tr = de_run(LearnConfig(**{**cfg, "seed": seed}), de, horizon=horizon)
    return tr.iterations, tr.mean_fidelity


def _cmd_learn(args):
    cfg = {"kind": args.kind, "n_bits": args.n_bits, "target": _target(args, args.n_bits),
           "epsilon": args.epsilon, "max_iterations": args.max_iter}
    LearnConfig(**cfg)  # validate before spawning work
    seeds = [derived_seed(args.seed, KIND_INDEX[args.kind], args.n_bits, t)
             for t in range(args.trials)]
    record = {"command": args.command, **cfg, "target": args.target, "trials": args.trials}
    if args.command == "learn-de":
        de = DEConfig(args.population, args.weight, args.crossover)
        record.update(population=de.population, weight=de.weight, crossover=de.crossover,
                      horizon=args.horizon)
        results = pmap(partial(_de_trial, cfg=cfg, de=de, horizon=args.horizon),
                       seeds, args.workers)
        iters = [r[0] for r in results]
    else:
        iters = pmap(partial(_rs_trial, cfg=cfg), seeds, args.workers)
    write_csv(args.out, ["trial_id", "seed", "iterations", "converged"],
              [[t, s, -1 if it is None else it, int(it is not None)]
               for t, (s, it) in enumerate(zip(seeds, iters))], record, args.seed)
    if args.command == "learn-de" and args.curve_out:
        curve = average_series([r[1] for r in results],
                               args.horizon + 1 if args.horizon else None)
        write_csv(args.curve_out, ["iteration", "mean_fidelity"],
                  enumerate(curve.tolist()), record, args.seed)
    done = [it for it in iters if it is not None]
    mean = f"{np.mean(done):.4g}" if done else "n/a"
    print(f"{args.kind} N={args.n_bits}: {len(done)}/{len(iters)} converged, "
          f"mean iterations {mean}")
    return 0


def _cmd_fit(args):
    if args.model == "exponential":
        if len(args.inputs) != 1:
            raise SystemExit("exponential fit takes exactly one trial CSV")
        rows = read_csv(args.inputs[0])
        lengths = [float(r["iterations"]) for r in rows if int(r["converged"])]
        fit = fit_exponential_lengths(lengths, len(rows))
        payload = {"model": "exponential_cdf", "parameters": {"n_c": fit.n_c},
                   "residual": fit.residual, "n_points": fit.n_points}
    else:
        points = []
        for path in args.inputs:
            rows = read_csv(path)
            done = [float(r["iterations"]) for r in rows if int(r["converged"])]
            n_bits = _n_bits_from_header(path)
            if done and np.mean(done) > 0:
                points.append((1 << n_bits, float(np.mean(done))))
        fit = fit_power_law(points)
        payload = {"model": "power_law",
                   "parameters": {"alpha": fit.alpha, "beta": fit.beta},
                   "residual": fit.residual, "n_points": fit.n_points}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        write_json(args.out, payload)
    print(text)
    return 0


def _n_bits_from_header(path) -> int:
    with open(path) as fh:
        for line in fh:
            if line.startswith("# config "):
                return int(json.loads(line[len("# config "):])["n_bits"])
            if not line.startswith("#"):
                break
    raise ValueError(f"{path}: no config header with n_bits")


def _experiment(args, name):
    kwargs = {"experiment": name, "seed": args.seed, "out_dir": args.out_dir,
              "quick": args.quick, "target": args.target, "workers": args.workers}
    if args.n_bits:
        kwargs["n_bits"] = tuple(args.n_bits)
    for key in ("samples", "trials", "epsilon"):
        if getattr(args, key, None) is not None:
            kwargs[key] = getattr(args, key)
    if getattr(args, "include_classical_n3", False):
        kwargs["include_classical_n3"] = True
    if getattr(args, "stratify_delta", None) is not None:
        kwargs["stratify_delta"] = args.stratify_delta or None
    return ExperimentConfig(**kwargs)


def _cmd_repro(args):
    runner, name = {
        "repro-table2": (run_region_table, "region-table"),
        "repro-fig3": (run_rs_curves, "rs-curves"),
        "repro-fig5": (run_de_scaling, "de-scaling"),
    }[args.command]
    config = _experiment(args, name)
    result = runner(config)
    for note in result.get("notes", []):
        print(f"note: {note}")
    checks = result["checks"]
    if checks:
        print(summarize(checks))
    write_json(Path(args.out_dir) / f"{args.command}_checks.json",
               {"checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks]},
               config.as_dict(), config.seed)
    print(f"wrote {len(result['files'])} files to {args.out_dir} "
          f"(config digest {digest(config.as_dict())})")
    if args.check and not all(ok for _, ok, _ in checks):
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qboolearn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({backend_name()} kernels)")
    parser.add_argument("--workers", type=int, default=None,
                        help=f"worker processes (default ${WORKERS_ENV} or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="estimate the acceptable-region fraction gamma")
    _add_common(p, trials=False)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--stratify-delta", type=float, default=None)
    p.add_argument("--out", default="region.csv")
    p.set_defaults(func=_cmd_region)

    for name, text in (("learn-rs", "random-search trials"),
                       ("learn-de", "differential-evolution trials")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--out", default=f"{name}.csv")
        if name == "learn-de":
            p.add_argument("--population", type=int, default=50)
            p.add_argument("--weight", type=float, default=0.4)
            p.add_argument("--crossover", type=float, default=0.85)
            p.add_argument("--horizon", type=int, default=0,
                           help="keep iterating to this generation for the curve")
            p.add_argument("--curve-out", default=None,
                           help="per-iteration mean-fidelity CSV")
        p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("fit", help="fit n_c from trial CSVs")
    p.add_argument("model", choices=("exponential", "power-law"))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit)

    for name, text in (("repro-table2", "region fractions for D = 2, 4, 8"),
                       ("repro-fig3", "random-search learning curves"),
                       ("repro-fig5", "DE scaling and mean-fidelity curves")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--seed", type=int, default=2014)
        p.add_argument("--out-dir", default="results")
        p.add_argument("--n-bits", type=int, nargs="+", default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--target", default=None)
        p.add_argument("--quick", action="store_true", help="10x fewer samples/trials")
        p.add_argument("--check", action="store_true",
                       help="exit nonzero if any reference check fails")
        if name == "repro-table2":
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--stratify-delta", type=float, default=None,
                           help="corner box for classical D=8, 0 disables")
        else:
            p.add_argument("--trials", type=int, default=None)
        if name == "repro-fig3":
            p.add_argument("--include-classical-n3", action="store_true")
        p.set_defaults(func=_cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers is None:
        args.workers = worker_count()
    try:
        return args.func(args)
    except (ValueError, FitUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
