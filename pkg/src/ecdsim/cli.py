"""Command-line entry point.

Frequencies on the command line are ordinary frequencies (GHz/MHz/kHz) and
durations are ns or us, matching lab conventions; conversion to internal
angular units (rad/s) happens exactly once at parse time.

A config file (INI-style key = value sections, see README) can provide any
flag's value; explicit flags override the file. The effective configuration
is echoed into the output metadata.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys

import numpy as np

from .experiments import (
    default_tf_grid,
    run_dissipation_grid,
    run_ecd_scan,
    run_gap_report,
    run_robustness,
    run_sweep_comparison,
)
from .model import TWO_PI, SystemParams
from .spectral import build_cd_profile
from .sweeps import SWEEP_KINDS, SweepSpec

SUBCOMMANDS = ("sweep-compare", "cd-field", "ecd-scan", "robustness",
               "dissipation", "gap-report")


class ConfigError(Exception):
    pass


def _float_list(text):
    try:
        return [float(x) for x in str(text).split(",") if x != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad numeric list {text!r}") from exc


def _add_common(parser):
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--config", help="INI config file; flags override it")
    parser.add_argument("--omega-r-ghz", type=float, default=8.2)
    parser.add_argument("--omega-1-ghz", type=float, default=6.01)
    parser.add_argument("--omega-2-ghz", type=float, default=5.99)
    parser.add_argument("--g-mhz", type=float, default=50.0)


def _add_sweep_flags(parser, kinds=SWEEP_KINDS):
    parser.add_argument("--sweep", choices=kinds, default=kinds[0])
    parser.add_argument("--beta-k", type=int, default=8)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ecdsim",
        description="Accelerated adiabatic two-qubit entangling simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-compare", help="unassisted sweep infidelities")
    _add_common(p)
    p.add_argument("--sweep", choices=SWEEP_KINDS, action="append",
                   help="repeatable; default all kinds")
    p.add_argument("--beta-k", type=int, default=8)
    p.add_argument("--tf-us", type=_float_list,
                   help="comma-separated durations in us; default log grid")

    p = sub.add_parser("cd-field", help="dump the counterdiabatic profile")
    _add_common(p)
    _add_sweep_flags(p)
    p.add_argument("--n-grid", type=int, default=2001)

    p = sub.add_parser("ecd-scan", help="oscillating-drive infidelity scan")
    _add_common(p)
    p.add_argument("--sweep", choices=("pl", "tan"), default="tan")
    p.add_argument("--k-ratio", type=_float_list, default=[1.0, 2.0, 3.0])
    p.add_argument("--omega-ceiling-ghz", type=float, default=7.0)
    p.add_argument("--fixed-omega-ghz", type=_float_list,
                   default=[4.0, 5.0, 6.0, 8.0])
    p.add_argument("--tf-ns", type=_float_list,
                   help="comma-separated durations in ns; default log grid")

    p = sub.add_parser("robustness", help="Monte Carlo over drive biases")
    _add_common(p)
    p.add_argument("--tf-ns", type=_float_list,
                   default=[200.0, 300.0, 400.0, 500.0, 600.0])
    p.add_argument("--n-eps", type=int, default=200)
    p.add_argument("--eps-max", type=float, default=0.05)
    p.add_argument("--fixed-omega-ghz", type=float, default=7.0)

    p = sub.add_parser("dissipation", help="Lindblad fidelity grid")
    _add_common(p)
    p.add_argument("--kappa-khz", type=_float_list,
                   default=[0.0, 5.0, 10.0, 15.0, 20.0])
    p.add_argument("--gamma-khz", type=_float_list,
                   default=[0.0, 5.0, 10.0, 15.0, 20.0])
    p.add_argument("--tf-ns", type=float, default=100.0)
    p.add_argument("--fixed-omega-ghz", type=float, default=7.0)
    p.add_argument("--n-fock", type=int, default=3)

    p = sub.add_parser("gap-report", help="anticrossing diagnostics")
    _add_common(p)
    return parser


def _apply_config_file(parser, argv):
    """Seed parser defaults from --config before the real parse."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv[1:] if argv[:1] and
                                     argv[0] in SUBCOMMANDS else argv)
    if not known.config:
        return
    if not os.path.exists(known.config):
        raise ConfigError(f"config file not found: {known.config}")
    ini = configparser.ConfigParser()
    try:
        ini.read(known.config)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    defaults = {}
    for section in ini.sections():
        for key, value in ini.items(section):
            defaults[key.replace("-", "_")] = value
    for action_parser in parser._subparsers._group_actions[0].choices.values():
        known_dests = {a.dest: a for a in action_parser._actions}
        for dest, value in defaults.items():
            if dest in known_dests:
                action = known_dests[dest]
                if action.type is not None:
                    value = action.type(value)
                elif isinstance(action.default, bool):
                    value = value.lower() in ("1", "true", "yes")
                elif isinstance(action.default, int):
                    value = int(value)
                elif isinstance(action.default, float):
                    value = float(value)
                action_parser.set_defaults(**{dest: value})


def _params_from_args(args):
    return SystemParams(
        omega_r=TWO_PI * args.omega_r_ghz * 1e9,
        omega_1_init=TWO_PI * args.omega_1_ghz * 1e9,
        omega_2_init=TWO_PI * args.omega_2_ghz * 1e9,
        g=TWO_PI * args.g_mhz * 1e6,
    )


def _finish(result, args, name):
    os.makedirs(args.out, exist_ok=True)
    result.metadata["cli_args"] = {
        k: v for k, v in sorted(vars(args).items()) if k != "func"
    }
    path = result.write(os.path.join(args.out, name))
    ok = len(result.ok_rows())
    print(f"{name}: {ok}/{len(result.rows)} rows ok -> {path}")
    if result.rows and ok == 0:
        return 2
    return 0


def _cmd_sweep_compare(args):
    params = _params_from_args(args)
    kinds = args.sweep or list(SWEEP_KINDS)
    tf = ([t * 1e-6 for t in args.tf_us] if args.tf_us
          else list(default_tf_grid()))
    result = run_sweep_comparison(tf, kinds, params, workers=args.workers)
    return _finish(result, args, "sweep_compare")


def _cmd_cd_field(args):
    params = _params_from_args(args)
    spec = SweepSpec.for_params(args.sweep, params, k_beta=args.beta_k)
    profile = build_cd_profile(spec, params, args.n_grid)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "cd_field.csv")
    header = "s," + ",".join(
        f"h_{i+1}{j+1}" for i, j in profile.UPPER_PAIRS)
    np.savetxt(path, profile.csv_rows(), delimiter=",", header=header,
               comments="", fmt="%.12e")
    with open(os.path.join(args.out, "cd_field.meta.json"), "w") as fh:
        json.dump({"sweep": args.sweep, "beta_k": args.beta_k,
                   "n_grid": args.n_grid,
                   "h23_max": profile.h23_max,
                   "dominance_ratio": profile.dominance_ratio()}, fh, indent=2)
    print(f"cd-field: {args.n_grid} samples -> {path}")
    return 0


def _cmd_ecd_scan(args):
    params = _params_from_args(args)
    tf = ([t * 1e-9 for t in args.tf_ns] if args.tf_ns
          else list(default_tf_grid(50e-9, 3e-6)))
    result = run_ecd_scan(
        tf, sweep_kind=args.sweep, k_list=args.k_ratio, params=params,
        omega_ceiling=TWO_PI * args.omega_ceiling_ghz * 1e9,
        fixed_omegas_hz=[f * 1e9 for f in args.fixed_omega_ghz],
        workers=args.workers)
    return _finish(result, args, "ecd_scan")


def _cmd_robustness(args):
    params = _params_from_args(args)
    result = run_robustness(
        [t * 1e-9 for t in args.tf_ns], n_eps=args.n_eps,
        eps_max=args.eps_max, seed=args.seed, params=params,
        omega=TWO_PI * args.fixed_omega_ghz * 1e9, workers=args.workers)
    return _finish(result, args, "robustness")


def _cmd_dissipation(args):
    params = _params_from_args(args)
    result = run_dissipation_grid(
        [k * TWO_PI * 1e3 for k in args.kappa_khz],
        [g * TWO_PI * 1e3 for g in args.gamma_khz],
        t_f=args.tf_ns * 1e-9, params=params,
        omega=TWO_PI * args.fixed_omega_ghz * 1e9, n_fock=args.n_fock,
        workers=args.workers)
    return _finish(result, args, "dissipation")


def _cmd_gap_report(args):
    params = _params_from_args(args)
    report = run_gap_report(params)
    print(f"numerical anticrossing width 2*g0 = "
          f"{report['two_g0_mhz']:.4f} MHz")
    print(f"second-order coupling estimate   = "
          f"{report['rwa_coupling_mhz']:.4f} MHz")
    print(f"with counter-rotating correction = "
          f"{report['renormalized_coupling_mhz']:.4f} MHz")
    print(f"counter-rotating terms {'enlarge' if report['gap_enlarged_by_counter_rotating'] else 'reduce'} the gap")
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "gap_report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    return 0


_DISPATCH = {
    "sweep-compare": _cmd_sweep_compare,
    "cd-field": _cmd_cd_field,
    "ecd-scan": _cmd_ecd_scan,
    "robustness": _cmd_robustness,
    "dissipation": _cmd_dissipation,
    "gap-report": _cmd_gap_report,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse exits 2 on bad flags; map usage errors to exit 1
            return 0 if exc.code == 0 else 1
        return _DISPATCH[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
