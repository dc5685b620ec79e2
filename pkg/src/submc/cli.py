"""Command-line interface.

Subcommands:
  generate  emit the probability matrix, a signal instance, and observations
  plan      per-entry submatrix plans as CSV
  run       full experiment (trials, aggregation, artifacts)
  bounds    rate grids and precondition summary only
  report    re-render images/summary from stored CSV grids

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness
from .bounds import bound_report, report_to_files
from .errors import ConfigError, NumericalFailure, SubmcError
from .sampling import probability_to_csv, sample_mask
from .selector import plan_all, plans_to_csv
from .signal import make_signal_instance, observe


def _load_config(args) -> harness.ExperimentConfig:
    overrides = {
        "seed": getattr(args, "seed", None),
        "trials": getattr(args, "trials", None),
        "out_dir": getattr(args, "out", None),
    }
    return harness.ExperimentConfig.from_json(args.config, **overrides)


def _out_dir(config, args) -> str:
    out = getattr(args, "out", None) or config.out_dir or "outputs"
    os.makedirs(out, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    config = _load_config(args)
    out = _out_dir(config, args)
    P = harness.build_probability(config)
    probability_to_csv(P, os.path.join(out, "P.csv"))
    s_factors, s_mask, s_noise = harness._trial_seeds(config.seed, 0)
    inst = make_signal_instance(config.n, config.m, config.r, s_factors)
    mask = sample_mask(P, s_mask)
    obs = observe(inst.M_star, mask, config.sigma, s_noise)
    np.savetxt(os.path.join(out, "M_star.csv"), inst.M_star, delimiter=",", fmt="%.17g")
    np.savetxt(os.path.join(out, "mask.csv"), mask.omega, delimiter=",", fmt="%d")
    np.savetxt(os.path.join(out, "Y.csv"), obs.y, delimiter=",", fmt="%.17g")
    sidecar = {"n": config.n, "m": config.m, "r": config.r,
               "sigma": config.sigma, "seed": config.seed}
    with open(os.path.join(out, "instance.json"), "w") as fh:
        json.dump(sidecar, fh, indent=2)
    print(f"wrote P/M_star/mask/Y to {out}")
    return 0


def cmd_plan(args) -> int:
    config = _load_config(args)
    out = _out_dir(config, args)
    P = harness.build_probability(config)
    groups = plan_all(P)
    path = os.path.join(out, "plans.csv")
    plans_to_csv(groups, path)
    print(f"wrote {sum(len(g.members) for g in groups)} plans "
          f"in {len(groups)} groups to {path}")
    return 0


def cmd_run(args) -> int:
    config = _load_config(args)
    out = _out_dir(config, args)
    report = harness.run_experiment(config)
    harness.render_outputs(report, out)
    means = ", ".join(f"{k}={v:.4f}" for k, v in report.block_means.items())
    print(f"i_star={report.i_star}; mean relative improvement: {means}")
    print(f"artifacts written to {out}")
    return 0


def cmd_bounds(args) -> int:
    config = _load_config(args)
    out = _out_dir(config, args)
    P = harness.build_probability(config)
    block = None
    if config.probability.get("kind") == "block":
        from .bounds import block_rates
        pr = config.probability
        block = block_rates(pr["n1"], pr["n2"], pr["q11"], pr["q12"],
                            pr["q21"], pr["q22"])
    rep = bound_report(P, config.r, config.sigma, config.delta, block_summary=block)
    report_to_files(rep,
                    os.path.join(out, "bound_upper_rate.csv"),
                    os.path.join(out, "bound_lower_rate.csv"),
                    os.path.join(out, "bound_summary.json"))
    print(f"wrote bound rates to {out}")
    return 0


def cmd_report(args) -> int:
    src = args.indir
    try:
        with open(os.path.join(src, "summary.json")) as fh:
            summary = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read stored report in {src}: {exc}") from exc
    out = args.out or src
    os.makedirs(out, exist_ok=True)
    for name, title in [("e_sub", "Mean |error|, SVT-sub"),
                        ("e_whole", "Mean |error|, SVT-whole"),
                        ("rel_improvement", "Relative improvement")]:
        grid = np.loadtxt(os.path.join(src, f"{name}.csv"), delimiter=",", ndmin=2)
        harness._heatmap(os.path.join(out, f"{name}.png"), grid, title)
    harness._hist_png(os.path.join(out, "rel_improvement_hist.png"),
                      summary["histogram"], "Relative improvement histogram")
    print(f"re-rendered images in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="submc",
        description="Submatrix completion experiments for non-uniformly sampled matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")

    for name, fn in [("generate", cmd_generate), ("plan", cmd_plan),
                     ("run", cmd_run), ("bounds", cmd_bounds)]:
        p = sub.add_parser(name)
        add_config_flags(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("report")
    p.add_argument("--indir", required=True, help="directory with stored CSV grids")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except SubmcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
