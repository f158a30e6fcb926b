"""Kernel backend selection.

The reduction hot loop lives in a small kernel module that exists twice: a
Cython extension (``opcert._kernel``) and a pure-Python fallback
(``opcert._kernel_py``).  The compiled one is used when importable; set
``OPCERT_KERNEL=py`` to force the fallback or ``OPCERT_KERNEL=c`` to insist on
the extension (ImportError if it was not built).  Both backends are
behaviourally identical; ``benchmarks/bench_kernels.py`` compares them.
"""

import os

from . import _kernel_py


def load_kernel(prefer: str | None = None):
    prefer = prefer or os.environ.get("OPCERT_KERNEL", "auto")
    if prefer not in ("auto", "c", "py"):
        raise ValueError(f"unknown kernel backend {prefer!r}")
    if prefer in ("auto", "c"):
        try:
            from . import _kernel  # compiled extension, optional
            return _kernel
        except ImportError:
            if prefer == "c":
                raise
    return _kernel_py


KERNEL = load_kernel()
BACKEND = KERNEL.BACKEND
