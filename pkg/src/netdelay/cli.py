"""Command-line front end.

Subcommands: fit (estimate parameters from one or two traces), gof
(windowed chi-square table), generate (synthetic trace CSV), plotdata
(columnar CDF data for external plotting). Exit codes are stable for
scripting: 0 success, 2 input/parse failure, 3 estimation/statistical
failure. Every command is deterministic given its inputs and flags.
"""

from __future__ import annotations

import argparse
import math
import sys

from netdelay import __version__
from netdelay.dist import DelayDistribution, DistKind, cdf
from netdelay.errors import (
    EstimationError,
    InputError,
    InvalidProbability,
    NetDelayError,
    TraceTooShort,
)
from netdelay.generate import GeneratorConfig, generate_uniform_stream
from netdelay.ingest import parse_auto, serialize_csv
from netdelay.model import (
    DelayTrace,
    PathParameters,
    fit_single,
    fit_two_size,
)
from netdelay.report import FitReport, Provenance
from netdelay.stats import (
    DEFAULT_WINDOW_SIZES,
    WindowScan,
    empirical_cdf,
    pearson_correlation,
    window_scan,
)

DEFAULT_WINDOWS_FLAG = ",".join(str(s) for s in DEFAULT_WINDOW_SIZES)


def _windows_list(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window list {text!r}") from None
    if any(s < 10 for s in sizes):
        raise argparse.ArgumentTypeError("window sizes must be >= 10")
    return sizes


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netdelay",
        description="Fit, test and generate end-to-end packet delays.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="estimate model parameters from traces")
    fit.add_argument("--trace", action="append", required=True, metavar="PATH",
                     help="trace file (ping output or canonical CSV); give "
                          "twice with distinct packet sizes to estimate capacity")
    fit.add_argument("--size", type=int, default=None, metavar="BYTES",
                     help="assumed packet size for ping output without byte counts")
    fit.add_argument("--capacity-stat", choices=("mean", "min"), default="mean",
                     help="per-trace delay statistic for the capacity slope")
    fit.add_argument("--windows", type=_windows_list, default=DEFAULT_WINDOW_SIZES,
                     metavar=DEFAULT_WINDOWS_FLAG,
                     help="window sizes for the stationarity scan (sizes beyond "
                          "the trace length are skipped)")
    fit.add_argument("--significance", type=float, default=0.95)
    fit.add_argument("--out", default=None, metavar="PATH")
    fit.set_defaults(func=cmd_fit)

    gof = sub.add_parser("gof", help="windowed chi-square goodness-of-fit table")
    gof.add_argument("--trace", required=True, metavar="PATH")
    gof.add_argument("--hypothesis", choices=("exp", "normal"), required=True)
    gof.add_argument("--windows", type=_windows_list, default=DEFAULT_WINDOW_SIZES,
                     metavar=DEFAULT_WINDOWS_FLAG)
    gof.add_argument("--significance", type=float, default=0.95)
    gof.add_argument("--size", type=int, default=None, metavar="BYTES")
    gof.add_argument("--out", default=None, metavar="PATH")
    gof.set_defaults(func=cmd_gof)

    gen = sub.add_parser("generate", help="emit a synthetic delay trace CSV")
    gen.add_argument("--report", default=None, metavar="PATH",
                     help="fit report supplying the parameters")
    gen.add_argument("--d-min", type=float, default=None, metavar="SECONDS")
    gen.add_argument("--capacity", type=float, default=None, metavar="B/S",
                     help="omit for a size-independent model (infinite capacity)")
    gen.add_argument("--lambda", dest="lam", type=float, default=None,
                     metavar="1/S", help="exponential rate of the variable part")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--size", type=int, required=True, metavar="BYTES")
    gen.add_argument("--seed", type=_u64, default=0)
    gen.add_argument("--interval", type=float, default=1.0, metavar="SECONDS")
    gen.add_argument("--out", default=None, metavar="PATH")
    gen.set_defaults(func=cmd_generate)

    plot = sub.add_parser("plotdata",
                          help="columnar empirical/model CDF data for plotting")
    plot.add_argument("--trace", required=True, metavar="PATH")
    plot.add_argument("--report", required=True, metavar="PATH")
    plot.add_argument("--size", type=int, default=None, metavar="BYTES")
    plot.add_argument("--out", default=None, metavar="PATH")
    plot.set_defaults(func=cmd_plotdata)

    return parser


def _load_trace(path: str, assumed_size: int | None) -> DelayTrace:
    try:
        with open(path, "rb") as handle:
            data = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_auto(data, assumed_size=assumed_size)


def _write_out(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _check_significance(value: float):
    if not 0.0 < value < 1.0:
        raise InputError(f"--significance must be in (0, 1), got {value}")


def cmd_fit(args) -> int:
    if not 1 <= len(args.trace) <= 2:
        raise InputError("give --trace once or twice")
    _check_significance(args.significance)
    traces = [_load_trace(path, args.size) for path in args.trace]

    if len(traces) == 1:
        params = fit_single(traces[0])
    else:
        params = fit_two_size(traces[0], traces[1],
                              capacity_statistic=args.capacity_stat)

    reference = traces[0]
    w_ref = reference.uniform_size()
    ecdf = empirical_cdf(reference)
    k_nor = pearson_correlation(
        ecdf, DelayDistribution(DistKind.TRUNCATED_NORMAL, params), w_ref)
    k_exp = pearson_correlation(
        ecdf, DelayDistribution(DistKind.EXPONENTIAL, params), w_ref)

    usable = tuple(s for s in args.windows if s <= len(reference))
    windows = {
        kind: window_scan(reference, usable, kind,
                          significance=args.significance)
        for kind in (DistKind.EXPONENTIAL, DistKind.TRUNCATED_NORMAL)
    }

    all_samples = [s for t in traces for s in t.samples]
    provenance = Provenance(
        files=tuple(args.trace),
        sample_counts=tuple(len(t) for t in traces),
        ts_first=min(s.sent_at for s in all_samples),
        ts_last=max(s.sent_at for s in all_samples),
        source=reference.source,
        destination=reference.destination,
        kind=reference.kind,
    )
    report = FitReport(params=params, k_nor=k_nor, k_exp=k_exp,
                       windows=windows, provenance=provenance)
    _write_out(report.to_text(), args.out)
    return 0


def _gof_table(scan: WindowScan, args, trace: DelayTrace) -> str:
    width = 10
    title = "exponential" if args.hypothesis == "exp" else "truncated-normal"
    lines = [
        f"# goodness of fit: {title} hypothesis, significance {args.significance}",
        f"# trace: {args.trace} ({len(trace)} samples, "
        f"{trace.uniform_size()} B packets)",
        "N".ljust(12) + "".join(str(r.n_samples).rjust(width)
                                for r in scan.results),
        "n".ljust(12) + "".join(str(r.n_cells).rjust(width)
                                for r in scan.results),
        "threshold".ljust(12) + "".join(f"{r.threshold:.2f}".rjust(width)
                                        for r in scan.results),
        "t".ljust(12) + "".join(f"{r.statistic:.2f}".rjust(width)
                                for r in scan.results),
        "accepted".ljust(12) + "".join(("Yes" if r.accepted else "No").rjust(width)
                                       for r in scan.results),
    ]
    return "\n".join(lines) + "\n"


def cmd_gof(args) -> int:
    _check_significance(args.significance)
    trace = _load_trace(args.trace, args.size)
    usable = tuple(s for s in args.windows if s <= len(trace))
    if not usable:
        raise TraceTooShort(
            f"trace has {len(trace)} samples; smallest requested window is "
            f"{min(args.windows, default=0)}"
        )
    kind = DistKind(args.hypothesis)
    scan = window_scan(trace, usable, kind, significance=args.significance)
    _write_out(_gof_table(scan, args, trace), args.out)
    return 0


def _params_from_args(args) -> PathParameters:
    if args.report is not None:
        try:
            with open(args.report, "r", encoding="utf-8") as handle:
                return FitReport.from_text(handle.read()).params
        except OSError as exc:
            raise InputError(f"cannot read {args.report}: {exc}") from None
    if args.d_min is None or args.lam is None:
        raise InputError("give --report, or both --d-min and --lambda")
    capacity = args.capacity if args.capacity is not None else math.inf
    try:
        return PathParameters.create(d_min=args.d_min, capacity=capacity,
                                     lam=args.lam, packet_size_ref=args.size)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_generate(args) -> int:
    if args.size < 1:
        raise InputError(f"--size must be >= 1, got {args.size}")
    if args.count < 1:
        raise InputError(f"--count must be >= 1, got {args.count}")
    if args.interval <= 0:
        raise InputError(f"--interval must be > 0, got {args.interval}")
    params = _params_from_args(args)
    config = GeneratorConfig(params=params, seed=args.seed,
                             default_size=args.size)
    trace = generate_uniform_stream(config, count=args.count, size=args.size,
                                    interval=args.interval)
    _write_out(serialize_csv(trace), args.out)
    return 0


def cmd_plotdata(args) -> int:
    trace = _load_trace(args.trace, args.size)
    try:
        with open(args.report, "r", encoding="utf-8") as handle:
            params = FitReport.from_text(handle.read()).params
    except OSError as exc:
        raise InputError(f"cannot read {args.report}: {exc}") from None

    ordered = sorted(trace.samples, key=lambda s: s.delay)
    ecdf = empirical_cdf(trace)
    lines = ["# delay_s F_emp F_normal F_exp"]
    normal = DelayDistribution(DistKind.TRUNCATED_NORMAL, params)
    exponential = DelayDistribution(DistKind.EXPONENTIAL, params)
    for sample in ordered:
        d, w = sample.delay, sample.packet_size
        lines.append(
            f"{d!r} {float(ecdf(d))!r} {cdf(normal, d, w)!r} "
            f"{cdf(exponential, d, w)!r}"
        )
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"netdelay: {exc}", file=sys.stderr)
        return 2
    except InvalidProbability as exc:
        print(f"netdelay: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"netdelay: {exc}", file=sys.stderr)
        return 3
    except NetDelayError as exc:
        print(f"netdelay: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"netdelay: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
