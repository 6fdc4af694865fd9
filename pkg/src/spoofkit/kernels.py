"""Kernel backend selection.

The compiled extension is used when it built; otherwise the pure-Python
twin takes over. Both produce bit-identical output, so the choice is purely
a speed matter. Set SPOOFKIT_PURE_KERNELS=1 to force the pure path (useful
for benchmarking and for ruling the extension out when debugging).
"""

import os

from spoofkit import _kernels_py

_compiled = None
if os.environ.get("SPOOFKIT_PURE_KERNELS", "") in ("", "0"):
    try:
        from spoofkit import _kernels as _compiled
    except ImportError:
        _compiled = None

_active = _compiled if _compiled is not None else _kernels_py

BACKEND = "compiled" if _compiled is not None else "pure"

gaussians = _active.gaussians
oscillation_values = _active.oscillation_values
halfsine_values = _active.halfsine_values
peak_count = _active.peak_count


def available_backends():
    """Importable backends by name; always contains 'pure'."""
    backends = {"pure": _kernels_py}
    if _compiled is not None:
        backends["compiled"] = _compiled
    return backends
