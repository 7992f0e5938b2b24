"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python twin when the
extension was not built. Set NETDELAY_PURE_KERNELS=1 to force the fallback
(used by the benchmark and the cross-backend tests).
"""

import os

if os.environ.get("NETDELAY_PURE_KERNELS") == "1":
    from netdelay._kernels import _pure as _impl
else:
    try:
        from netdelay._kernels import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from netdelay._kernels import _pure as _impl

BACKEND = _impl.BACKEND
next_uniform = _impl.next_uniform
fill_uniforms = _impl.fill_uniforms
fill_exp_delays = _impl.fill_exp_delays
erf = _impl.erf
fill_erf = _impl.fill_erf
