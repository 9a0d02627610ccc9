"""Hot-kernel dispatch: compiled extension when built, NumPy otherwise.

Set ``CONFCAM_PURE=1`` to force the NumPy versions.
"""
import os

from . import _fallback

try:
    if os.environ.get("CONFCAM_PURE", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _ext as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "numpy"

moebius_apply_array = _impl.moebius_apply_array
bilinear_sample = _impl.bilinear_sample
render_sum = _impl.render_sum


def backends():
    """Map of available backend name -> kernel module."""
    out = {"numpy": _fallback}
    try:
        from . import _ext
        out["compiled"] = _ext
    except ImportError:
        pass
    return out
