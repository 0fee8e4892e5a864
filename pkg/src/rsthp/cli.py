"""Command-line interface for the experiment runner.

Subcommands: snr-sweep, error-sweep, baselines, and validate (closed-form
vs signal-model deviation report). Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""

import argparse
import sys

import numpy as np

from .channel import compose_true, draw_error, draw_estimate
from .config import apply_overrides, default_config, parse_config
from .errors import ConfigInvalid, NoPrivatePower, RankDeficient, RsthpError
from .multibranch import pattern
from .oracle import compare_closed_form, write_deviation_csv
from .runner import run_baselines, run_error_sweep, run_snr_sweep, snr_db_to_etr, write_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsthp",
        description="Rate-splitting THP downlink experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", metavar="PATH", help="key=value scenario file")
        p.add_argument("--seed", type=int, metavar="N", help="override the master seed")
        p.add_argument("--out", metavar="PATH", default="-", help="output CSV path ('-' = stdout)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config key (repeatable)",
        )
        p.add_argument("--workers", type=int, default=1, help="trial worker processes")

    p_snr = sub.add_parser("snr-sweep", help="ergodic sum rate vs SNR")
    add_common(p_snr)

    p_err = sub.add_parser("error-sweep", help="ergodic sum rate vs CSIT error variance")
    add_common(p_err)
    p_err.add_argument(
        "--sigma-e2",
        default="0.01,0.03,0.06,0.1,0.2",
        metavar="LIST",
        help="comma-separated error variances",
    )
    p_err.add_argument("--at-snr-db", type=float, default=20.0, help="fixed SNR in dB")

    p_base = sub.add_parser("baselines", help="reference schemes on paired seeds")
    add_common(p_base)

    p_val = sub.add_parser("validate", help="closed-form vs signal-model deviation report")
    add_common(p_val)
    p_val.add_argument("--instances", type=int, default=200, help="instances per error variance")
    p_val.add_argument(
        "--sigma-e2",
        default="1e-6,1e-4,1e-2",
        metavar="LIST",
        help="comma-separated error variances to probe",
    )
    p_val.add_argument("--delta", type=float, default=0.2, help="common power fraction")
    p_val.add_argument("--at-snr-db", type=float, default=20.0, help="operating SNR in dB")
    return parser


def load_config(args):
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = default_config()
    if args.overrides:
        cfg = apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        cfg = apply_overrides(cfg, [f"seed={args.seed}"])
    return cfg


def _parse_list(raw: str):
    return [float(s) for s in raw.split(",") if s.strip()]


def _emit(rows, out):
    if out == "-":
        write_csv(rows, sys.stdout)
    else:
        write_csv(rows, out)


def _run_validate(cfg, args):
    rng = np.random.default_rng(cfg.master_seed)
    reports = []
    etr = snr_db_to_etr(args.at_snr_db, cfg.sigma_n2)
    branch = pattern(1, cfg.K)
    for sigma_e2 in _parse_list(args.sigma_e2):
        for _ in range(args.instances):
            H_est = draw_estimate(cfg.K, cfg.Nt, rng)
            H_err = draw_error(cfg.K, cfg.Nt, sigma_e2, rng)
            realization = compose_true(H_est, H_err, sigma_e2=sigma_e2)
            reports.append(
                compare_closed_form(
                    realization, cfg.scheme, args.delta, branch, etr, cfg.sigma_n2
                )
            )
    if args.out == "-":
        write_deviation_csv(reports, sys.stdout)
    else:
        write_deviation_csv(reports, args.out)
        medians = {}
        for rep in reports:
            medians.setdefault(rep.sigma_e2, []).extend(rep.private_rel.tolist())
        for sigma_e2 in sorted(medians):
            med = float(np.median(medians[sigma_e2]))
            print(f"sigma_e2={sigma_e2:g}: median private-SINR deviation {med:.3e}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "snr-sweep":
            _emit(run_snr_sweep(cfg, workers=args.workers), args.out)
        elif args.command == "error-sweep":
            rows = run_error_sweep(cfg, _parse_list(args.sigma_e2), args.at_snr_db, workers=args.workers)
            _emit(rows, args.out)
        elif args.command == "baselines":
            _emit(run_baselines(cfg, workers=args.workers), args.out)
        elif args.command == "validate":
            _run_validate(cfg, args)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RankDeficient, NoPrivatePower, FloatingPointError, RsthpError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
