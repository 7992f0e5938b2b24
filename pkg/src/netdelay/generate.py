"""Synthetic delay generation for traffic emulators.

Delays are produced by feeding a counter-based uniform stream (see
netdelay._kernels) through the exponential quantile, so a (seed, schedule)
pair always yields the same trace, bit for bit. Batch generation and
one-at-a-time sampling walk the identical stream: sample k of a generator
equals element k of the batch output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netdelay import _kernels
from netdelay.dist import quantile
from netdelay.errors import EmptySchedule
from netdelay.model import DelaySample, DelayTrace, PathParameters, TraceKind

_U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class GeneratorConfig:
    params: PathParameters
    seed: int           # 64-bit unsigned
    default_size: int   # bytes

    def __post_init__(self):
        if not 0 <= self.seed <= _U64_MAX:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.default_size < 1:
            raise ValueError("default_size must be >= 1")


@dataclass(frozen=True)
class PacketSchedule:
    """Ordered (send_at seconds, size bytes) pairs."""

    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           tuple((float(t), int(s)) for t, s in self.entries))
        times = [t for t, _ in self.entries]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("send_at must be non-decreasing")
        if any(s < 1 for _, s in self.entries):
            raise ValueError("sizes must be >= 1")

    def __len__(self):
        return len(self.entries)

    @classmethod
    def uniform(cls, count: int, size: int, interval: float,
                start: float = 0.0) -> "PacketSchedule":
        if count < 1:
            raise ValueError("count must be >= 1")
        if interval <= 0:
            raise ValueError("interval must be > 0")
        return cls(tuple((start + i * interval, size) for i in range(count)))


class DelayGenerator:
    """Stateful one-at-a-time sampler over the seeded stream.

    Single-owner: advance it from one context only. Independent generators
    (distinct seeds, or separate instances replaying the same seed) may run
    concurrently.
    """

    def __init__(self, config: GeneratorConfig):
        self.config = config
        self._index = 0

    @property
    def index(self) -> int:
        """Number of draws consumed so far."""
        return self._index

    def sample_delay(self, w: int | None = None) -> float:
        """Draw the next uniform and map it through the quantile at size w."""
        if w is None:
            w = self.config.default_size
        u = _kernels.next_uniform(self.config.seed, self._index)
        self._index += 1
        return quantile(self.config.params, u, w)


def generate_trace(config: GeneratorConfig, schedule: PacketSchedule,
                   kind: TraceKind = TraceKind.OWD,
                   source: str = "synthetic",
                   destination: str = "synthetic") -> DelayTrace:
    """One sample per schedule entry; deterministic given (seed, schedule)."""
    if len(schedule) == 0:
        raise EmptySchedule("schedule has no entries")
    p = config.params
    sizes = np.array([s for _, s in schedule.entries], dtype=np.float64)
    delays = np.empty(len(schedule), dtype=np.float64)
    _kernels.fill_exp_delays(delays, sizes, config.seed, 0,
                             p.d_min, p.capacity, p.lam)
    samples = tuple(
        DelaySample(sent_at=t, delay=float(d), packet_size=s)
        for (t, s), d in zip(schedule.entries, delays)
    )
    return DelayTrace(samples=samples, source=source, destination=destination,
                      kind=kind)


def generate_uniform_stream(config: GeneratorConfig, count: int, size: int,
                            interval: float = 1.0,
                            kind: TraceKind = TraceKind.OWD) -> DelayTrace:
    """Evenly spaced fixed-size packets: send_at = i * interval."""
    schedule = PacketSchedule.uniform(count=count, size=size, interval=interval)
    return generate_trace(config, schedule, kind=kind)
