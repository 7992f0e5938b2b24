"""Fit report: the structured text artifact produced by `netdelay fit`.

The report has a human block (times in milliseconds) followed by a
`[machine]` section of key=value lines (times in seconds, floats via repr)
that `from_text` re-parses losslessly. The machine section is the contract
consumed by `netdelay generate --report`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from netdelay.dist import DistKind
from netdelay.errors import ReportParseError
from netdelay.model import PathParameters, TraceKind
from netdelay.stats import GofResult, WindowScan

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Provenance:
    files: tuple[str, ...]
    sample_counts: tuple[int, ...]
    ts_first: float
    ts_last: float
    source: str
    destination: str
    kind: TraceKind


@dataclass(frozen=True)
class FitReport:
    params: PathParameters
    k_nor: float
    k_exp: float
    windows: dict[DistKind, WindowScan]
    provenance: Provenance

    def to_text(self) -> str:
        return render_report(self)

    @classmethod
    def from_text(cls, text: str) -> "FitReport":
        return parse_report(text)


def _human_block(report: FitReport) -> list[str]:
    p = report.params
    prov = report.provenance
    lines = [
        "netdelay fit report",
        "===================",
        "",
        f"path        : {prov.source} -> {prov.destination} ({prov.kind.value})",
        "inputs      : " + "; ".join(
            f"{name} ({count} samples)"
            for name, count in zip(prov.files, prov.sample_counts)
        ),
        f"trace span  : {prov.ts_first:.3f} .. {prov.ts_last:.3f} s",
        "",
        "fitted parameters (milliseconds)",
        f"  min delay, zero size   {p.d_min * 1e3:.6f} ms",
    ]
    if math.isinf(p.capacity):
        lines.append("  capacity               unavailable (single packet size)")
    else:
        lines.append(f"  capacity               {p.capacity:.1f} B/s")
    lines += [
        f"  mean variable delay    {p.sigma * 1e3:.6f} ms   (rate {p.lam:.6f} 1/s)",
        f"  average delay          {p.d_av * 1e3:.6f} ms at {p.packet_size_ref} B",
        "",
        "cdf correlation",
        f"  K_nor {report.k_nor:.6f}   K_exp {report.k_exp:.6f}",
    ]
    for kind, scan in report.windows.items():
        title = ("exponential" if kind is DistKind.EXPONENTIAL
                 else "truncated-normal")
        lines += ["", f"goodness of fit: {title} hypothesis"]
        if not scan.results:
            lines.append("  (trace too short for the windowed scan)")
            continue
        lines.append(f"  {'N':>6} {'n':>4} {'threshold':>10} {'t':>12} accepted")
        for r in scan.results:
            lines.append(
                f"  {r.n_samples:>6} {r.n_cells:>4} {r.threshold:>10.2f} "
                f"{r.statistic:>12.2f} {'Yes' if r.accepted else 'No'}"
            )
    return lines


def _serialize_scan(scan: WindowScan) -> str:
    records = []
    for r in scan.results:
        records.append(
            f"{r.n_samples}:{r.n_cells}:{r.statistic!r}:{r.threshold!r}:"
            f"{'yes' if r.accepted else 'no'}"
        )
    return ";".join(records)


def _parse_scan(value: str, kind: DistKind) -> WindowScan:
    if not value:
        return WindowScan(window_sizes=(), results=())
    sizes = []
    results = []
    for record in value.split(";"):
        fields = record.split(":")
        if len(fields) != 5:
            raise ReportParseError(f"bad gof record {record!r}")
        n, cells, stat, thr, acc = fields
        result = GofResult(
            n_samples=int(n), n_cells=int(cells), statistic=float(stat),
            threshold=float(thr), accepted=(acc == "yes"), dist_kind=kind,
        )
        sizes.append(result.n_samples)
        results.append(result)
    return WindowScan(window_sizes=tuple(sizes), results=tuple(results))


def render_report(report: FitReport) -> str:
    p = report.params
    prov = report.provenance
    machine = [
        "[machine]",
        f"format_version={FORMAT_VERSION}",
        f"source={prov.source}",
        f"destination={prov.destination}",
        f"kind={prov.kind.value}",
        "files=" + ";".join(prov.files),
        "sample_counts=" + ";".join(str(c) for c in prov.sample_counts),
        f"ts_first={prov.ts_first!r}",
        f"ts_last={prov.ts_last!r}",
        f"d_min_s={p.d_min!r}",
        f"capacity_Bps={p.capacity!r}",
        f"sigma_s={p.sigma!r}",
        f"d_av_s={p.d_av!r}",
        f"packet_size_ref_B={p.packet_size_ref}",
        f"k_nor={report.k_nor!r}",
        f"k_exp={report.k_exp!r}",
    ]
    for kind in (DistKind.EXPONENTIAL, DistKind.TRUNCATED_NORMAL):
        if kind in report.windows:
            machine.append(f"gof_{kind.value}={_serialize_scan(report.windows[kind])}")
    return "\n".join(_human_block(report) + [""] + machine) + "\n"


def parse_report(text: str) -> FitReport:
    lines = text.splitlines()
    try:
        start = lines.index("[machine]")
    except ValueError:
        raise ReportParseError("no [machine] section found") from None
    fields = {}
    for line in lines[start + 1:]:
        if not line.strip():
            continue
        if "=" not in line:
            raise ReportParseError(f"bad machine line {line!r}")
        key, value = line.split("=", 1)
        fields[key] = value

    try:
        version = int(fields["format_version"])
        if version != FORMAT_VERSION:
            raise ReportParseError(f"unsupported format_version {version}")
        counts = fields["sample_counts"]
        files = fields["files"]
        prov = Provenance(
            files=tuple(files.split(";")) if files else (),
            sample_counts=tuple(int(c) for c in counts.split(";")) if counts else (),
            ts_first=float(fields["ts_first"]),
            ts_last=float(fields["ts_last"]),
            source=fields["source"],
            destination=fields["destination"],
            kind=TraceKind(fields["kind"]),
        )
        params = PathParameters(
            d_min=float(fields["d_min_s"]),
            capacity=float(fields["capacity_Bps"]),
            sigma=float(fields["sigma_s"]),
            d_av=float(fields["d_av_s"]),
            packet_size_ref=int(fields["packet_size_ref_B"]),
        )
        windows = {}
        for kind in (DistKind.EXPONENTIAL, DistKind.TRUNCATED_NORMAL):
            key = f"gof_{kind.value}"
            if key in fields:
                windows[kind] = _parse_scan(fields[key], kind)
        return FitReport(
            params=params,
            k_nor=float(fields["k_nor"]),
            k_exp=float(fields["k_exp"]),
            windows=windows,
            provenance=prov,
        )
    except ReportParseError:
        raise
    except (KeyError, ValueError) as exc:
        raise ReportParseError(f"malformed machine section: {exc}") from None
