"""Command line entry point: one subcommand per experiment kind.

Usage::

    coopsec <kind> --config scenario.yaml [--seed N] [--out table.csv]
            [--replications N] [--mc-trials N] [--epsilon X]
            [--sweep-values a,b,c] [--channel H.json]

``<kind>`` is one of approx-error, convergence, iteration-count, rate-vs-k,
rate-vs-radius.  The scenario config is YAML (see scenario.load_scenario);
--channel injects a fixed main channel from a JSON file for convergence
runs.  A summary table is printed; --out writes the full long-format CSV.
"""

import argparse
import sys

from .channel import load_channel_file
from .experiments import (
    EXPERIMENT_KINDS,
    ExperimentSpec,
    report_summary,
    run_experiment,
)
from .scenario import load_scenario

__all__ = ["main", "build_parser"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coopsec",
        description="Secrecy rate experiments for cooperative MIMO with a "
        "location-constrained eavesdropper.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", required=True, help="scenario YAML file")
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--replications", type=int, default=1)
        p.add_argument("--mc-trials", type=int, default=10_000,
                       help="Monte Carlo trials for exact-rate estimates")
        p.add_argument("--epsilon", type=float, default=0.1,
                       help="optimizer stopping threshold (nats/s/Hz)")
        p.add_argument("--sweep-values", default=None,
                       help="comma-separated sweep values overriding defaults")
        if kind == "convergence":
            p.add_argument("--channel", default=None,
                           help="JSON file with an injected channel matrix")
    return parser


def _parse_values(text):
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        num = float(tok)
        vals.append(int(num) if num == int(num) else num)
    if not vals:
        raise ValueError("empty sweep value list")
    return tuple(vals)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.config)
        channel = None
        if getattr(args, "channel", None):
            channel = load_channel_file(args.channel)
        sweep_values = None
        if args.sweep_values:
            sweep_values = _parse_values(args.sweep_values)
        spec = ExperimentSpec(
            kind=args.kind,
            scenario=scenario,
            sweep_values=sweep_values,
            replications=args.replications,
            seed=args.seed,
            mc_trials=args.mc_trials,
            epsilon=args.epsilon,
            channel=channel,
        )
        rows = run_experiment(spec, output_path=args.out)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report_summary(rows))
    if args.out:
        print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
