"""Select the compiled kernel module, falling back to pure Python.

Set ``NSFEED_PURE=1`` to force the fallback.
"""

import os

from . import _pure

if os.environ.get("NSFEED_PURE", "") not in ("", "0"):
    kernels = _pure
    COMPILED = False
else:
    try:
        from . import _core as kernels  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:  # extension not built
        kernels = _pure
        COMPILED = False

BACKEND = "cython" if COMPILED else "python"
