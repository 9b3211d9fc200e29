"""Selects the kernel backend at import time.

The compiled extension is preferred when it built successfully; otherwise the
numpy fallback is used. Set COORDBOUNDS_BACKEND=pure or =compiled to force a
choice (forcing "compiled" raises if the extension is unavailable).
"""

import os

_requested = os.environ.get("COORDBOUNDS_BACKEND", "").strip().lower()

if _requested == "pure":
    from . import _pykernels as kernels
elif _requested == "compiled":
    from . import _ckernels as kernels  # noqa: F401  (ImportError is the diagnostic)
elif _requested == "":
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _pykernels as kernels
else:
    raise ValueError(
        f"COORDBOUNDS_BACKEND must be 'pure' or 'compiled', got {_requested!r}"
    )


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return kernels.backend_name
