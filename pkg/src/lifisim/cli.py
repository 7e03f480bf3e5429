"""Command line front end.

Exit codes: 0 on success, 2 for configuration problems, 3 for
numerical failures (diverging reflection series, singular systems).
"""

import argparse
import sys
from dataclasses import asdict

import numpy as np

from .channel import RadiosityError
from .config import (ConfigError, Scenario, load_scenario,
                     scenario_from_dict, scenario_hash)
from .harness import (emit, run_ber_sweep, run_cdf_map, run_orwp_eval,
                      run_uplink_eval)

_COMMANDS = {
    "ber-sweep": "bound and Monte Carlo BER against received SNR",
    "cdf-map": "required-SNR CDF over a sitting lattice",
    "orwp-run": "required-SNR CDF along a walking trajectory",
    "uplink-ee": "uplink BER and energy-efficiency sweep",
    "validate-config": "check a scenario file and print its hash",
}

_OVERRIDE_KEYS = ("seed", "workers", "grid_step",
                  "orientations_per_point", "mc_symbols")


def _add_common(p):
    p.add_argument("--config", metavar="FILE",
                   help="YAML scenario overrides (defaults used if omitted)")
    p.add_argument("--seed", type=int, metavar="N", help="master seed")
    p.add_argument("--out", default="out", metavar="DIR",
                   help="output directory (default: out)")
    p.add_argument("--workers", type=int, default=1, metavar="N",
                   help="worker processes (default: 1)")
    p.add_argument("--grid-step", type=float, dest="grid_step", metavar="M",
                   help="lattice spacing in meters")
    p.add_argument("--orientations-per-point", type=int,
                   dest="orientations_per_point", metavar="N",
                   help="orientation draws per lattice point")
    p.add_argument("--mc-symbols", type=int, dest="mc_symbols", metavar="N",
                   help="Monte Carlo symbols per sweep point (0 disables)")
    p.add_argument("--plots", action="store_true",
                   help="also write SVG plots (needs matplotlib)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lifisim",
        description="Link-level simulator for indoor optical wireless "
                    "links under random device orientation, mobility "
                    "and blockage.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        if name == "validate-config":
            p.add_argument("--config", metavar="FILE",
                           help="YAML scenario file to check")
        else:
            _add_common(p)
    return parser


def _scenario(args):
    base = load_scenario(args.config) if args.config else Scenario()
    values = asdict(base)
    for key in _OVERRIDE_KEYS:
        value = getattr(args, key, None)
        if value is not None and key != "workers":
            values[key] = value
    return scenario_from_dict(values)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate-config":
            sc = load_scenario(args.config) if args.config else Scenario()
            print(f"ok {scenario_hash(sc)}")
            return 0
        sc = _scenario(args)
        if args.command == "cdf-map":
            result = run_cdf_map(sc, args.workers)
            files = emit(result, args.out, "cdf_map", args.plots)
        elif args.command == "orwp-run":
            result = run_orwp_eval(sc, args.workers)
            files = emit(result, args.out, "orwp_run", args.plots)
        elif args.command == "ber-sweep":
            result = run_ber_sweep(sc, args.workers)
            files = emit(result, args.out, "ber_sweep", args.plots)
        else:
            ber, ee = run_uplink_eval(sc, args.workers)
            files = emit(ber, args.out, "uplink_ber", args.plots)
            files += emit(ee, args.out, "uplink_ee", args.plots)
        for path in files:
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RadiosityError, np.linalg.LinAlgError, FloatingPointError,
            ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
