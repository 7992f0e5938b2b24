import numpy as np
import pytest

from netdelay.model import DelaySample, DelayTrace, PathParameters, TraceKind


@pytest.fixture
def params():
    # d_min 9 ms, 1 Mbit/s, mean variable delay 2 ms
    return PathParameters.create(d_min=0.009, capacity=125000.0, lam=500.0,
                                 packet_size_ref=100)


def make_trace(delays, size=100, kind=TraceKind.RTT, interval=1.0):
    samples = tuple(
        DelaySample(sent_at=i * interval, delay=float(d), packet_size=size)
        for i, d in enumerate(delays)
    )
    return DelayTrace(samples=samples, source="a", destination="b", kind=kind)


def exp_delays(rng, n, offset, scale):
    """numpy-drawn exponential delays; the oracle-side generator for tests."""
    return offset + rng.exponential(scale, size=n)


@pytest.fixture
def trace_builder():
    return make_trace


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
