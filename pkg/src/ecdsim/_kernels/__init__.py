"""Hot stepping kernels: compiled extension with a pure-numpy fallback.

The compiled core is preferred when importable; set ECDSIM_PURE=1 to force
the fallback (used by the benchmark and by tests comparing both paths).
"""
import os

from . import fallback

if os.environ.get("ECDSIM_PURE") == "1":
    _impl = fallback
    BACKEND = "fallback"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = fallback
        BACKEND = "fallback"

apply_expm_sequence = _impl.apply_expm_sequence


def backend_name():
    return BACKEND
