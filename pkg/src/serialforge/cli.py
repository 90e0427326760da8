"""Command-line entry point.

Subcommands cover the pipeline end to end: generate a matrix, recode it
to CSD, compile a netlist, simulate it, estimate cost, run sweep
benchmarks, drive the echo state network demo, and print the textbook
serial-adder trace.  Errors exit with distinct codes so scripts can
branch: 2 for usage errors, 3 for missing files, 4 for validation
failures.
"""

from __future__ import annotations

import argparse
import csv as csv_module
import json
import sys

from . import __version__
from .circuit import census, compile_netlist, dump_structure, export_netlist, import_netlist
from .cost import (
    COST_CSV_COLUMNS,
    cost_sweep,
    default_profile,
    estimate,
    load_profile,
    write_cost_csv,
)
from .csd import csd_transform
from .esn import EsnConfig, demo_task
from .matrix import (
    MatrixPair,
    gen_bit_sparse,
    gen_element_sparse,
    pn_split,
    read_matrix,
    stats,
    write_matrix,
)
from .oracle import (
    BENCH_CSV_COLUMNS,
    run_batch_sweep,
    run_latency_sweep,
    write_bench_csv,
)
from .sim import adder_trace, simulate

EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_VALIDATION = 4


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _load_pair(path_p: str, path_n: str) -> MatrixPair:
    return MatrixPair(read_matrix(path_p), read_matrix(path_n))


def _profile(path: str | None):
    return load_profile(path) if path else default_profile()


def _print_bench(rows, out: str | None) -> None:
    if out:
        write_bench_csv(rows, out)
        return
    writer = csv_module.writer(sys.stdout)
    writer.writerow(BENCH_CSV_COLUMNS)
    for row in rows:
        writer.writerow([getattr(row, col) for col in BENCH_CSV_COLUMNS])


def _cmd_gen(args) -> int:
    if args.bit_sparsity is not None:
        if args.signed:
            raise ValueError("bit-sparse generation is unsigned; drop --signed")
        m = gen_bit_sparse(args.rows, args.cols, args.bitwidth, args.bit_sparsity, args.seed)
    else:
        m = gen_element_sparse(
            args.rows, args.cols, args.bitwidth, args.signed, args.element_sparsity, args.seed
        )
    write_matrix(m, args.out)
    s = stats(m)
    print(
        f"wrote {args.out}: {m!r}, element_sparsity={s.element_sparsity:.4f}, "
        f"ones={s.ones_count}"
    )
    return 0


def _cmd_csd(args) -> int:
    m = read_matrix(args.infile)
    before = stats(m).ones_count
    pair = csd_transform(m, args.seed, coin_mode=args.coin)
    write_matrix(pair.p, args.out_p)
    write_matrix(pair.n, args.out_n)
    after = stats(pair.p).ones_count + stats(pair.n).ones_count
    reduction = 0.0 if before == 0 else 1.0 - after / before
    print(f"ones_before={before} ones_after={after} reduction={reduction:.4f}")
    return 0


def _cmd_compile(args) -> int:
    pair = _load_pair(args.in_p, args.in_n)
    netlist = compile_netlist(pair, args.input_bitwidth, args.extend)
    export_netlist(netlist, args.out)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(dump_structure(netlist))
    c = census(netlist)
    print(
        f"wrote {args.out}: nodes={c.total_nodes} adders={c.adders} "
        f"subtractors={c.subtractors} delay_ffs={c.delay_ffs} depth={netlist.tree_depth}"
    )
    return 0


def _cmd_simulate(args) -> int:
    netlist = import_netlist(args.netlist)
    if args.input.lstrip().startswith("["):
        source, text = "--input", args.input
    else:
        source = args.input
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        vector = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(vector, list):
        raise ValueError(f"{source}: input must be a JSON array of integers")
    result = simulate(netlist, vector, extension=args.extend, trace=args.trace is not None)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            writer = csv_module.writer(fh)
            writer.writerow(("cycle", "node_id", "sum", "carry"))
            for cycle, node, s, carry in result.trace:
                writer.writerow((cycle, node, s, "" if carry is None else carry))
    print(json.dumps({"outputs": result.outputs, "latency_cycles": result.latency_cycles}))
    return 0


def _cmd_cost(args) -> int:
    pair = _load_pair(args.in_p, args.in_n)
    netlist_stats = census(import_netlist(args.netlist)) if args.netlist else None
    report = estimate(pair, args.input_bitwidth, _profile(args.profile), netlist_stats)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def _cmd_sweep(args) -> int:
    profile = _profile(args.profile)
    if args.mode == "latency":
        rows = run_latency_sweep(
            _int_list(args.dims),
            sparsity=args.sparsity,
            seed=args.seed,
            profile=profile,
            scheme=args.scheme,
            width=args.width,
            jobs=args.jobs,
            allow_large=args.large,
        )
        _print_bench(rows, args.out)
    elif args.mode == "batch":
        rows = run_batch_sweep(
            args.dim,
            args.sparsity,
            _int_list(args.batches),
            seed=args.seed,
            profile=profile,
            scheme=args.scheme,
            width=args.width,
            jobs=args.jobs,
            allow_large=args.large,
        )
        _print_bench(rows, args.out)
    else:
        rows = cost_sweep(
            _int_list(args.dims),
            _float_list(args.sparsities),
            _int_list(args.widths),
            schemes=tuple(args.schemes.split(",")),
            profile=profile,
            seed=args.seed,
            jobs=args.jobs,
        )
        if args.out:
            write_cost_csv(rows, args.out)
        else:
            writer = csv_module.writer(sys.stdout)
            writer.writerow(COST_CSV_COLUMNS)
            for row in rows:
                writer.writerow(
                    ["true" if row[c] is True else "false" if row[c] is False else row[c]
                     for c in COST_CSV_COLUMNS]
                )
    return 0


def _cmd_esn(args) -> int:
    config = EsnConfig.from_json(args.config) if args.config else EsnConfig()
    report = demo_task(config, args.task, backend=args.backend)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    print(
        f"task={report['task']} backend={report['backend']} "
        f"train_mse={report['train_mse']:.6g} test_mse={report['test_mse']:.6g}"
    )
    return 0


def _cmd_trace_adder(args) -> int:
    a = args.a if args.a is not None else args.pos_a
    b = args.b if args.b is not None else args.pos_b
    if a is None or b is None:
        raise ValueError("trace-adder needs two operands (positional or --a/--b)")
    rows = adder_trace(a, b, args.cycles)
    print(f"{a} + {b}, one bit per cycle, LSb first:")
    print("Cycle  C_in  A  B  S  C_out  Result")
    sums: list[int] = []
    for t, (c_in, a_bit, b_bit, s, c_out) in enumerate(rows, start=1):
        sums.append(s)
        shown = "".join(str(bit) for bit in reversed(sums)).ljust(len(rows), "0")
        print(f"{t:<5}  {c_in:<4}  {a_bit}  {b_bit}  {s}  {c_out:<5}  {shown}")
    value = sum(bit << k for k, bit in enumerate(sums))
    print(f"result = {value} ({value:0{len(rows)}b}b)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="serialforge",
        description="Compile fixed matrices into bit-serial circuits, simulate, and cost them.",
    )
    parser.add_argument("--version", action="version", version=f"serialforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random matrix file")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--bitwidth", type=int, required=True)
    p.add_argument("--signed", action="store_true")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--element-sparsity", type=float)
    group.add_argument("--bit-sparsity", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("csd", help="recode a matrix into a CSD (P, N) pair")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-p", required=True)
    p.add_argument("--out-n", required=True)
    p.add_argument("--coin", choices=("random", "heads", "tails"), default="random")
    p.set_defaults(func=_cmd_csd)

    p = sub.add_parser("compile", help="compile a (P, N) pair into a netlist")
    p.add_argument("--in-p", required=True)
    p.add_argument("--in-n", required=True)
    p.add_argument("--input-bitwidth", type=int, required=True)
    p.add_argument("--extend", type=int, default=0, help="extra sign-extension cycles")
    p.add_argument("--out", required=True)
    p.add_argument("--dump", help="also write a line-based structural dump")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("simulate", help="run an input vector through a netlist")
    p.add_argument("--netlist", required=True)
    p.add_argument("--input", required=True,
                   help="JSON array of integers, inline or a file path")
    p.add_argument("--extend", type=int, default=None)
    p.add_argument("--trace", help="write a cycle,node_id,sum,carry CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("cost", help="estimate area, frequency, and latency for a pair")
    p.add_argument("--in-p", required=True)
    p.add_argument("--in-n", required=True)
    p.add_argument("--input-bitwidth", type=int, required=True)
    p.add_argument("--profile", help="device profile JSON")
    p.add_argument("--netlist", help="netlist JSON for exact counts")
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("sweep", help="benchmark sweeps (CSV)")
    mode = p.add_subparsers(dest="mode", required=True)

    q = mode.add_parser("latency", help="latency across dimensions")
    q.add_argument("--dims", required=True, help="comma-separated, e.g. 64,128,256")
    q.add_argument("--sparsity", type=float, default=0.98)
    q.add_argument("--width", type=int, default=8)
    q.add_argument("--scheme", choices=("pn", "csd"), default="csd")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--profile")
    q.add_argument("--out")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--large", action="store_true", help="allow dims above 2048")
    q.set_defaults(func=_cmd_sweep)

    q = mode.add_parser("batch", help="back-to-back batches through one matrix")
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--sparsity", type=float, default=0.95)
    q.add_argument("--batches", required=True, help="comma-separated, e.g. 1,2,4,8")
    q.add_argument("--width", type=int, default=8)
    q.add_argument("--scheme", choices=("pn", "csd"), default="csd")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--profile")
    q.add_argument("--out")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--large", action="store_true")
    q.set_defaults(func=_cmd_sweep)

    q = mode.add_parser("cost", help="cost model over a parameter grid")
    q.add_argument("--dims", required=True)
    q.add_argument("--sparsities", required=True, help="comma-separated fractions")
    q.add_argument("--widths", required=True)
    q.add_argument("--schemes", default="pn,csd")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--profile")
    q.add_argument("--out")
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("esn", help="echo state network demo task")
    p.add_argument("--config", help="EsnConfig JSON; defaults used when omitted")
    p.add_argument("--task", required=True, help="sine or recall[:delay]")
    p.add_argument("--backend", choices=("reference", "netlist"), default="reference")
    p.add_argument("--report", help="write the report JSON here")
    p.set_defaults(func=_cmd_esn)

    p = sub.add_parser("trace-adder", help="print the serial full-adder trace")
    p.add_argument("pos_a", nargs="?", type=int, default=None, metavar="a")
    p.add_argument("pos_b", nargs="?", type=int, default=None, metavar="b")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--cycles", type=int, default=None)
    p.set_defaults(func=_cmd_trace_adder)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"serialforge: error: missing file: {exc.filename or exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except ValueError as exc:
        print(f"serialforge: error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"serialforge: error: cannot access file: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE


if __name__ == "__main__":
    sys.exit(main())
