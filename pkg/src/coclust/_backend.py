"""Kernel backend selection: compiled extension if importable, numpy otherwise.

Set ``COCLUST_PURE_PYTHON=1`` to force the numpy fallback (benchmarking,
debugging a suspected extension issue).
"""

import os

if os.environ.get("COCLUST_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _kernels_py as kernels

    USING_COMPILED = False
else:
    try:
        from . import _kernels as kernels  # compiled at install time

        USING_COMPILED = True
    except ImportError:
        from . import _kernels_py as kernels

        USING_COMPILED = False


def backend_name():
    return "compiled" if USING_COMPILED else "numpy"
