"""Command line interface.

Exit status: 0 when the command ran (whatever the verdicts), 1 on usage or
configuration errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from vpstest.bitseq import BitSequence, parse_bits, serialize_bits
from vpstest.dftt import VARIANTS, dftt_pvalue
from vpstest.generators import GeneratorSpec, InsufficientDataError
from vpstest.harness import ALL_VARIANTS, ExperimentConfig, empirical_cdf, run_batch, run_detection_sweep
from vpstest.secondlevel import second_level
from vpstest.vtest import vtest_pvalue

USAGE_ERROR, IO_ERROR = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    return int(text, 0)


def _add_generator_args(p):
    p.add_argument("--gen", choices=("mt", "aes", "file"), default="mt")
    p.add_argument("--seed", type=_int, default=0, help="MT19937 base seed (sequence i uses seed + i)")
    p.add_argument("--key", default="00" * 16, help="AES-128 key, 32 hex digits")
    p.add_argument("--ctr", type=_int, default=0, help="AES initial 128-bit counter (int or 0x...)")
    p.add_argument("--in", dest="infile", help="input file for --gen file")
    p.add_argument("--format", choices=("ascii01", "raw_msb_first"), default="raw_msb_first")


def _add_experiment_args(p, periods: bool):
    p.add_argument("--config", help="JSON file; keys are flag names, explicit flags win")
    p.add_argument("--test", action="append", choices=ALL_VARIANTS,
                   help="variant to run (repeatable); default kim, pareschi, proposed")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--M", type=int, default=1000, help="sequences per set")
    p.add_argument("--sets", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--out-format", choices=("csv", "json"), default="csv")
    p.add_argument("--debug", action="store_true", help="record per-sequence hashes and p-values (json)")
    if periods:
        p.add_argument("--period", action="append", type=int, help="defect parameter T (repeatable)")
    _add_generator_args(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vpstest", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="p-values for sequences read from a file or generator")
    p.add_argument("--test", action="append", choices=ALL_VARIANTS)
    p.add_argument("--n", type=int, help="bits per sequence (default: whole input)")
    p.add_argument("--count", type=int, default=1, help="number of consecutive sequences")
    _add_generator_args(p)

    _add_experiment_args(sub.add_parser("exp1", help="Type-1-error batch"), periods=False)
    _add_experiment_args(sub.add_parser("exp2", help="detection power vs. period T"), periods=True)

    p = sub.add_parser("cdf", help="empirical CDF of the scaled statistic vs. N(0,1)")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--out")
    _add_generator_args(p)

    p = sub.add_parser("gen", help="dump generator output")
    p.add_argument("--n", type=int, required=True, help="bits per sequence")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", help="output path (default: stdout)")
    _add_generator_args(p)
    return parser


def _generator(args) -> GeneratorSpec:
    try:
        key = bytes.fromhex(args.key)
    except ValueError as exc:
        raise UsageError(f"--key: {exc}") from None
    kind = {"mt": "mt19937", "aes": "aes_ctr", "file": "file"}[args.gen]
    if kind == "file" and not args.infile:
        raise UsageError("--gen file requires --in")
    return GeneratorSpec(kind=kind, seed=args.seed, key=key, counter=args.ctr,
                         path=args.infile, file_format=args.format)


def _load_config(parser, argv):
    """Apply a JSON config file as defaults of the chosen subcommand, then reparse."""
    args = parser.parse_args(argv)
    path = getattr(args, "config", None)
    if not path:
        return args
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in sub._actions}
    defaults, repeated = {}, {}
    for key, value in cfg.items():
        dest = {"in": "infile"}.get(key, key.replace("-", "_"))
        if dest not in dests or dest == "config":
            raise UsageError(f"unknown config key {key!r}")
        if dest in ("test", "period"):
            repeated[dest] = value if isinstance(value, list) else [value]
        else:
            defaults[dest] = value
    sub.set_defaults(**defaults)
    args = parser.parse_args(argv)
    for dest, value in repeated.items():
        if getattr(args, dest) is None:
            setattr(args, dest, value)
    return args


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_test(args):
    variants = args.test or ["kim", "pareschi", "proposed"]
    if args.gen == "file":
        if not args.infile:
            raise UsageError("--gen file requires --in")
        with open(args.infile, "rb") as fh:
            data = fh.read()
        total = args.n * args.count if args.n else None
        if total is None:
            total = (len(data) * 8 if args.format == "raw_msb_first"
                     else sum(data.count(c) for c in (b"0", b"1")))
        try:
            stream = parse_bits(data, args.format, total).bits
        except ValueError as exc:
            raise OSError(f"{args.infile}: {exc}") from None
        n = args.n or total
        bits = stream[: n * args.count].reshape(args.count, n)
    else:
        if not args.n:
            raise UsageError("--n is required for generated input")
        n = args.n
        bits = _generator(args).sequences(0, args.count, n)
    if n % 2 or n < 4:
        raise UsageError(f"tests need an even sequence length >= 4, got {n}")
    print("index,variant,n,statistic,pvalue")
    pvals = {v: [] for v in variants}
    for i, row in enumerate(bits):
        seq = BitSequence.from_bits(row)
        for v in variants:
            out = vtest_pvalue(seq) if v == "proposed" else dftt_pvalue(seq, VARIANTS[v])
            pvals[v].append(out.pvalue)
            print(f"{i},{v},{n},{out.statistic!r},{out.pvalue!r}")
    if args.count > 1:
        print("\nvariant,M,r,proportion_pass,chi2,p_uniform,uniformity_pass")
        for v in variants:
            rep = second_level(pvals[v])
            print(f"{v},{rep.M},{rep.r},{rep.proportion_pass},{rep.chi2_stat!r},{rep.p_uniform!r},{rep.uniformity_pass}")


def _experiment_config(args, periods=()) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            variants=tuple(args.test or ("kim", "pareschi", "proposed")),
            n=args.n, M=args.M, sets=args.sets, generator=_generator(args),
            periods=periods, workers=args.workers, debug=args.debug,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_experiment(args, sweep: bool):
    if sweep:
        if not args.period:
            raise UsageError("exp2 needs at least one --period")
        report = run_detection_sweep(_experiment_config(args, tuple(args.period)))
    else:
        report = run_batch(_experiment_config(args))
    _emit(report.to_json() if args.out_format == "json" else report.to_csv(), args.out)
    if args.out:
        sys.stdout.write(report.summary_csv())


def _cmd_cdf(args):
    try:
        table = empirical_cdf(args.n, args.samples, _generator(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(table.to_csv(), args.out)
    print(f"ks_distance,{table.ks!r}", file=sys.stderr)


def _cmd_gen(args):
    bits = _generator(args).sequences(0, args.count, args.n).ravel()
    data = serialize_bits(BitSequence.from_bits(bits), args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _load_config(parser, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command == "test":
            _cmd_test(args)
        elif args.command in ("exp1", "exp2"):
            _cmd_experiment(args, sweep=args.command == "exp2")
        elif args.command == "cdf":
            _cmd_cdf(args)
        else:
            _cmd_gen(args)
    except UsageError as exc:
        print(f"vpstest: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (OSError, InsufficientDataError) as exc:
        print(f"vpstest: I/O error: {exc}", file=sys.stderr)
        return IO_ERROR
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"vpstest: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
