"""Backend selection for the convolution hot loop.

The compiled kernel (``qtheta._ckernels``) is used when it was built and
imports cleanly; otherwise the pure-Python kernels are used.  Set
``QTHETA_BACKEND=python`` to force the fallback, ``QTHETA_BACKEND=c`` to
require the native kernel.  Both backends return bit-identical results; the
native one raises ``OverflowError`` past int64 and the dispatcher retries in
Python ints.  Products of two dense operands go to the Kronecker kernel on
either backend, since big-int multiplication beats the quadratic native loop.
"""

from __future__ import annotations

import os
from typing import Callable, Sequence

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

Convolver = Callable[[Sequence[int], Sequence[int], int], list]


def available_backends() -> list[str]:
    return ["c", "python"] if _ckernels is not None else ["python"]


def _select(name: str) -> str:
    if name == "auto":
        return "c" if _ckernels is not None else "python"
    if name == "c" and _ckernels is None:
        raise ImportError("QTHETA_BACKEND=c but the compiled kernel is not available")
    if name not in ("c", "python"):
        raise ValueError(f"unknown backend {name!r}")
    return name


BACKEND = _select(os.environ.get("QTHETA_BACKEND", "auto"))


def _native_wins(a: Sequence[int], b: Sequence[int], n: int) -> bool:
    # The native loop is O(nnz * n); big-int packing wins once both sides are dense.
    # Crossover measured on x86-64 across n = 4e3 .. 1e5.
    nnz = min(len(a[:n]) - a[:n].count(0), len(b[:n]) - b[:n].count(0))
    return nnz <= 3000 + n // 10


def convolve_with(backend: str, a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    if backend == "c" and _native_wins(a, b, n):
        try:
            return _ckernels.convolve(a, b, n)
        except OverflowError:
            pass
    return _pykernels.convolve(a, b, n)


def convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Exact truncated product using the backend chosen at import."""
    return convolve_with(BACKEND, a, b, n)


def set_backend(name: str) -> str:
    """Switch backend at runtime (benchmarks and tests); returns the old one."""
    global BACKEND
    old, BACKEND = BACKEND, _select(name)
    return old
