"""netdelay: fit, test and generate end-to-end packet delays.

The delay of a packet of size W is modeled as an affine fixed part
(propagation plus serialization, d_min + W/capacity) plus an exponentially
distributed variable part. The package estimates the parameters from delay
traces, checks the distributional hypothesis with Pearson correlation and a
windowed chi-square test, and turns the fitted quantile function into a
deterministic synthetic-delay generator for traffic emulators.
"""

__version__ = "0.1.0"

from netdelay import errors
from netdelay._kernels import BACKEND as KERNEL_BACKEND
from netdelay.dist import (
    DelayDistribution,
    DistKind,
    cdf,
    exp_cdf,
    quantile,
    trunc_normal_cdf,
    trunc_normal_quantile,
)
from netdelay.generate import (
    DelayGenerator,
    GeneratorConfig,
    PacketSchedule,
    generate_trace,
    generate_uniform_stream,
)
from netdelay.ingest import (
    TraceFormat,
    detect_format,
    parse_auto,
    parse_csv,
    parse_ping,
    parse_ping_details,
    serialize_csv,
    split_by_size,
)
from netdelay.model import (
    DelaySample,
    DelayTrace,
    PathParameters,
    TraceKind,
    decompose,
    estimate_capacity,
    estimate_d_min,
    fit_parameters,
    fit_single,
    fit_two_size,
    fixed_delay,
)
from netdelay.report import FitReport, Provenance
from netdelay.stats import (
    DEFAULT_WINDOW_SIZES,
    EmpiricalCdf,
    GofResult,
    WindowScan,
    chi_square_quantile,
    chi_square_statistic,
    empirical_cdf,
    gof_test,
    pearson_correlation,
    sturges_cells,
    window_scan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
