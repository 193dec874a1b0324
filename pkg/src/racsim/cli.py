"""Command-line front end.

    racsim run --trace t.txt --policy rac
    racsim compare --trace t.bin --format bin --policies rac,lru
    racsim gen --pattern single-set --set 7 --distinct 20 --passes 10 --out t.txt

Exit codes: 0 ok, 1 usage error, 2 I/O error, 3 malformed trace.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from .baselines import POLICIES
from .config import Case4Mode, ConfigError, SimConfig
from .metrics import compare as compare_table
from .metrics import render_human, to_csv, to_json
from .sim import run_policy
from .traceio import (
    FORMATS,
    TraceFormatError,
    encode_canonical_binary,
    format_text,
    gen_cyclic,
    gen_single_set,
    gen_uniform,
    gen_zipf,
    iter_trace,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_TRACE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    return int(text, 0)


def _add_geometry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sets", type=_int, default=2048)
    p.add_argument("--tag-ways", type=_int, default=32)
    p.add_argument("--data-ways", type=_int, default=16)
    p.add_argument("--block", type=_int, default=64, help="block size in bytes")
    p.add_argument("--seed", type=_int, default=0)


def _add_sim_flags(p: argparse.ArgumentParser, emit_default: str) -> None:
    p.add_argument("--trace", required=True, help="trace path, or - for standard input")
    p.add_argument("--format", choices=FORMATS, default="text")
    _add_geometry(p)
    p.add_argument("--warmup", type=_int, default=0)
    p.add_argument("--case4", choices=[m.value for m in Case4Mode], default="reuse")
    p.add_argument("--out", help="write the report here instead of standard output")
    p.add_argument("--emit", choices=("human", "json", "csv"), default=emit_default)
    p.add_argument("--engine", choices=("fast", "oracle"), default="fast", help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="racsim", description="Trace-driven cache replacement simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one policy over a trace")
    _add_sim_flags(run, emit_default="json")
    run.add_argument("--policy", choices=POLICIES, default="rac")

    cmp_ = sub.add_parser("compare", help="simulate several policies over the same trace")
    _add_sim_flags(cmp_, emit_default="human")
    cmp_.add_argument("--policies", required=True, help="comma-separated, e.g. rac,lru")

    gen = sub.add_parser("gen", help="write a synthetic trace")
    gen.add_argument("--pattern", choices=("uniform", "zipf", "cyclic", "single-set"), required=True)
    gen.add_argument("--n-blocks", type=_int, default=1024)
    gen.add_argument("--length", type=_int, default=10000)
    gen.add_argument("--s", type=float, default=1.0, help="zipf exponent")
    gen.add_argument("--blocks", help="comma-separated block addresses for --pattern cyclic")
    gen.add_argument("--passes", type=_int, default=1)
    gen.add_argument("--set", type=_int, default=0)
    gen.add_argument("--distinct", type=_int, default=1)
    gen.add_argument("--sets", type=_int, default=2048)
    gen.add_argument("--block", type=_int, default=64)
    gen.add_argument("--seed", type=_int, default=0)
    gen.add_argument("--fmt", choices=("text", "bin"), default="text")
    gen.add_argument("--out", help="output path (default standard output)")
    return parser


def _config(args) -> SimConfig:
    try:
        return SimConfig(
            num_sets=args.sets,
            tag_ways=args.tag_ways,
            data_ways=args.data_ways,
            block_size_bytes=args.block,
            seed=args.seed,
            case4_mode=Case4Mode(args.case4),
        )
    except ConfigError as e:
        raise UsageError(str(e)) from None


@contextlib.contextmanager
def _open_trace(path: str, fmt: str):
    if path == "-":
        yield sys.stdin if fmt == "text" else sys.stdin.buffer
        return
    if fmt == "text":
        with open(path, encoding="utf-8") as fh:
            yield fh
    else:
        with open(path, "rb") as fh:
            yield fh


def _write(text: str | bytes, out: str | None) -> None:
    if out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
        return
    mode = "wb" if isinstance(text, bytes) else "w"
    with open(out, mode, **({} if isinstance(text, bytes) else {"encoding": "utf-8", "newline": ""})) as fh:
        fh.write(text)


def _trace_label(args) -> str:
    return f"{args.format}:{'stdin' if args.trace == '-' else args.trace}"


def cmd_run(args) -> int:
    config = _config(args)
    with _open_trace(args.trace, args.format) as fh:
        report = run_policy(
            args.policy,
            config,
            iter_trace(args.format, fh),
            warmup=args.warmup,
            trace=_trace_label(args),
            use_oracle=args.engine == "oracle",
        )
    if args.emit == "json":
        text = to_json(report)
    elif args.emit == "csv":
        text = to_csv([report])
    else:
        text = render_human(report)
    _write(text, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    unknown = [p for p in policies if p not in POLICIES]
    if unknown:
        raise UsageError(f"unknown policies: {', '.join(unknown)}")
    if len(policies) < 2:
        raise UsageError("compare needs at least two policies")
    config = _config(args)
    with _open_trace(args.trace, args.format) as fh:
        accesses = list(iter_trace(args.format, fh))
    label = _trace_label(args)
    reports = [
        run_policy(p, config, accesses, args.warmup, label, use_oracle=args.engine == "oracle") for p in policies
    ]
    if args.emit == "json":
        text = to_json(reports)
    elif args.emit == "csv":
        text = to_csv(reports)
    else:
        text = compare_table(reports)
    _write(text, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.pattern == "uniform":
            stream = gen_uniform(args.n_blocks, args.length, args.seed, args.block)
        elif args.pattern == "zipf":
            stream = gen_zipf(args.n_blocks, args.s, args.length, args.seed, args.block)
        elif args.pattern == "cyclic":
            if not args.blocks:
                raise UsageError("--pattern cyclic needs --blocks")
            try:
                blocks = [int(b, 0) for b in args.blocks.split(",") if b.strip()]
            except ValueError:
                raise UsageError(f"bad --blocks list {args.blocks!r}") from None
            stream = gen_cyclic(blocks, args.passes, args.block)
        else:
            geometry = SimConfig(num_sets=args.sets, block_size_bytes=args.block)
            stream = gen_single_set(geometry, args.set, args.distinct, args.passes)
    except (ValueError, ConfigError) as e:
        raise UsageError(str(e)) from None
    if args.fmt == "bin":
        _write(encode_canonical_binary(stream), args.out)
    else:
        _write(format_text(stream), args.out)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"racsim: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TraceFormatError as e:
        print(f"racsim: malformed trace: {e}", file=sys.stderr)
        return EXIT_TRACE
    except (OSError, UnicodeDecodeError) as e:
        print(f"racsim: I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
