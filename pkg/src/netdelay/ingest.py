"""Trace ingestion: ping console output and the canonical CSV format.

Canonical CSV is the interchange contract for every CLI command: UTF-8,
header `ts,delay_us,size_bytes,kind`, with `ts` in decimal seconds since
epoch, `delay_us` in non-negative decimal microseconds and `kind` one of
RTT/OWD. Path labels are not part of the schema.

Ping output carries no absolute timestamps, so sent_at is synthesized as
probe-index * interval; timeout lines advance the probe index but produce
no sample. Packet sizes are recorded exactly as the tool printed them
(payload vs payload+header differences between dialects are not
normalized).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation, localcontext
from fractions import Fraction

from netdelay.errors import (
    AmbiguousFormat,
    MissingSize,
    RowError,
    SchemaMismatch,
    UnrecognizedFormat,
)
from netdelay.model import DelaySample, DelayTrace, TraceKind

CSV_HEADER = "ts,delay_us,size_bytes,kind"


class TraceFormat(enum.Enum):
    PING_LINUX = "PingLinux"
    PING_WINDOWS = "PingWindows"
    CANONICAL_CSV = "CanonicalCsv"


# "64 bytes from 193.0.0.1: icmp_seq=1 ttl=54 time=10.3 ms"
_LINUX_REPLY = re.compile(
    r"^\s*(?P<size>\d+)\s+bytes\s+from\s+\S.*?:\s+icmp_[rs]eq=\d+\s+"
    r"(?:ttl|hlim)=\d+\s+time(?P<cmp>[=<])(?P<val>[\d.,]+)\s*ms",
    re.IGNORECASE,
)

# "Reply from 193.0.0.1: bytes=32 time=25ms TTL=54"
_WINDOWS_REPLY = re.compile(
    r"^\s*Reply\s+from\s+(?P<host>\S+?):\s+(?:bytes=(?P<size>\d+)\s+)?"
    r"time(?P<cmp>[=<])(?P<val>[\d.,]+)\s*ms",
    re.IGNORECASE,
)

_TIMEOUT = re.compile(
    r"^\s*(?:Request timed out|no answer yet)", re.IGNORECASE
)

_LINUX_PREAMBLE = re.compile(r"^\s*PING\s+(\S+)")
_WINDOWS_PREAMBLE = re.compile(r"^\s*Pinging\s+(\S+?)(?:\s+\[[^\]]+\])?\s+with",
                               re.IGNORECASE)


@dataclass(frozen=True)
class PingParseStats:
    replies: int
    timeouts: int
    below_resolution: int   # lines of the form time<1ms


def _as_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return bytes(data).decode("utf-8", errors="replace")
    return data


def detect_format(data) -> TraceFormat:
    """Identify the input format, refusing to guess on ambiguity."""
    text = _as_text(data)
    for line in text.splitlines():
        if line.strip():
            if line.strip().lstrip("﻿") == CSV_HEADER:
                return TraceFormat.CANONICAL_CSV
            break
    has_linux = any(_LINUX_REPLY.match(l) for l in text.splitlines())
    has_windows = any(_WINDOWS_REPLY.match(l) for l in text.splitlines())
    if has_linux and has_windows:
        raise AmbiguousFormat("input mixes both ping dialects")
    if has_linux:
        return TraceFormat.PING_LINUX
    if has_windows:
        return TraceFormat.PING_WINDOWS
    raise UnrecognizedFormat("input is neither canonical CSV nor ping output")


def parse_ping_details(data, assumed_size: int | None = None,
                       interval: float = 1.0) -> tuple[DelayTrace, PingParseStats]:
    """Parse ping output, returning the trace plus reply/timeout counters."""
    text = _as_text(data)
    destination = "unknown"
    samples = []
    probe_index = 0
    timeouts = 0
    below_resolution = 0

    for line in text.splitlines():
        pre = _LINUX_PREAMBLE.match(line) or _WINDOWS_PREAMBLE.match(line)
        if pre and not samples:
            destination = pre.group(1)
            continue
        if _TIMEOUT.match(line):
            timeouts += 1
            probe_index += 1
            continue
        m = _LINUX_REPLY.match(line) or _WINDOWS_REPLY.match(line)
        if not m:
            continue
        size_text = m.group("size")
        if size_text is not None:
            size = int(size_text)
        elif assumed_size is not None:
            size = assumed_size
        else:
            raise MissingSize(
                "reply line reports no byte count and no assumed size was given"
            )
        # decimal commas from non-English locales are accepted
        value_ms = float(m.group("val").replace(",", "."))
        if m.group("cmp") == "<":
            delay = (value_ms / 1000.0) / 2.0  # below tool resolution, take half
            below_resolution += 1
        else:
            delay = value_ms / 1000.0
        samples.append(DelaySample(sent_at=probe_index * interval, delay=delay,
                                   packet_size=size))
        probe_index += 1

    if not samples:
        raise UnrecognizedFormat("no ping reply lines found")
    trace = DelayTrace(samples=tuple(samples), source="local",
                       destination=destination, kind=TraceKind.RTT)
    return trace, PingParseStats(replies=len(samples), timeouts=timeouts,
                                 below_resolution=below_resolution)


def parse_ping(data, assumed_size: int | None = None,
               interval: float = 1.0) -> DelayTrace:
    trace, _ = parse_ping_details(data, assumed_size=assumed_size,
                                  interval=interval)
    return trace


_MICRO = 10 ** 6


def _parse_delay_us(text: str) -> float:
    """Seconds from decimal microseconds, rounded once from the exact value.

    A single correctly-rounded conversion (instead of string->double->/1e6,
    which rounds twice) is what makes serialize_csv/parse_csv an exact round
    trip for every representable delay.
    """
    value = Fraction(Decimal(text)) / _MICRO
    if value <= 0:
        raise ValueError(f"delay_us must be positive, got {text!r}")
    return float(value)


def parse_csv(data, source: str = "", destination: str = "") -> DelayTrace:
    """Parse canonical CSV into a trace (may be empty if only a header)."""
    text = _as_text(data)
    lines = text.splitlines()
    if not lines or lines[0].strip().lstrip("﻿") != CSV_HEADER:
        raise SchemaMismatch(
            f"expected header {CSV_HEADER!r}, got {(lines[0].strip() if lines else '')!r}"
        )
    samples = []
    kind = None
    last_ts = -math.inf
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise RowError(lineno, f"expected 4 fields, got {len(parts)}")
        ts_text, delay_text, size_text, kind_text = parts
        try:
            ts = float(ts_text)
            delay = _parse_delay_us(delay_text)
            size = int(size_text)
        except (ValueError, InvalidOperation, OverflowError) as exc:
            raise RowError(lineno, str(exc)) from None
        if not math.isfinite(ts):
            raise RowError(lineno, f"ts {ts_text} is not finite")
        if size < 1:
            raise RowError(lineno, f"size_bytes must be >= 1, got {size}")
        if ts < last_ts:
            raise RowError(lineno, "ts went backwards; rows must be time-ordered")
        last_ts = ts
        try:
            row_kind = TraceKind(kind_text)
        except ValueError:
            raise RowError(lineno, f"kind must be RTT or OWD, got {kind_text!r}") from None
        if kind is None:
            kind = row_kind
        elif row_kind is not kind:
            raise RowError(lineno, f"kind changed from {kind.value} to {row_kind.value}")
        samples.append(DelaySample(sent_at=ts, delay=delay, packet_size=size))
    return DelayTrace(samples=tuple(samples), source=source,
                      destination=destination, kind=kind or TraceKind.RTT)


def _format_delay_us(delay: float) -> str:
    """Decimal microseconds that parse back to the exact delay.

    Prefers the shortest representation of delay*1e6; when the scaled double
    has no short preimage under the parser's rounding, falls back to the
    exact decimal expansion of the product.
    """
    short = repr(delay * 1e6)
    if "e" not in short and "E" not in short:
        if short.endswith(".0"):
            short = short[:-2]
        if _parse_delay_us(short) == delay:
            return short
    with localcontext() as ctx:
        ctx.prec = 1200  # exact: a double's expansion needs < 1200 digits
        exact = format(Decimal(delay) * _MICRO, "f")
    if "." in exact:
        exact = exact.rstrip("0").rstrip(".")
    return exact


def serialize_csv(trace: DelayTrace) -> str:
    """Render a trace in canonical CSV; inverse of parse_csv for the stored fields."""
    out = [CSV_HEADER]
    for s in trace.samples:
        out.append(
            f"{s.sent_at!r},{_format_delay_us(s.delay)},{s.packet_size},{trace.kind.value}"
        )
    return "\n".join(out) + "\n"


def split_by_size(trace: DelayTrace) -> dict[int, DelayTrace]:
    """Partition samples by packet size, preserving order inside each part."""
    groups: dict[int, list[DelaySample]] = {}
    for s in trace.samples:
        groups.setdefault(s.packet_size, []).append(s)
    return {
        size: DelayTrace(samples=tuple(samples), source=trace.source,
                         destination=trace.destination, kind=trace.kind)
        for size, samples in groups.items()
    }


def parse_auto(data, assumed_size: int | None = None) -> DelayTrace:
    """Detect the format and parse accordingly."""
    fmt = detect_format(data)
    if fmt is TraceFormat.CANONICAL_CSV:
        return parse_csv(data)
    return parse_ping(data, assumed_size=assumed_size)
