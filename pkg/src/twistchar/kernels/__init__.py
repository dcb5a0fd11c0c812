"""Hot inner loops, compiled when possible.

The Cython extension ``_ckernels`` is preferred; the pure-Python module
``_pykernels`` is used when the extension is not built or when the
environment variable ``TWISTCHAR_PURE_PYTHON=1`` is set. Both expose the
same functions and produce identical exact results.
"""
from __future__ import annotations

import importlib
import os

from . import _pykernels
from ._pykernels import BoxTooSmall

_ckernels = None
if os.environ.get("TWISTCHAR_PURE_PYTHON") != "1":
    try:
        _ckernels = importlib.import_module(__name__ + "._ckernels")
    except ImportError:
        _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

__all__ = ["BACKEND", "BoxTooSmall", "conv_trunc", "freudenthal_mults", "qp_histogram"]


def conv_trunc(a, b, n, backend=None):
    """Truncated product of dense integer coefficient lists (length ``n``)."""
    impl = _select(backend)
    if impl is not _pykernels:
        try:
            return impl.conv_trunc(a, b, n)
        except OverflowError:
            pass
    return _pykernels.conv_trunc(a, b, n)


def freudenthal_mults(bform, lev, rho, roots, max_depth, upper, backend=None):
    """Freudenthal multiplicity table; see ``_pykernels.freudenthal_mults``.

    The compiled kernel works in a dense box given by ``upper``; the box is
    doubled until no weight touches an outer face.
    """
    impl = _select(backend)
    if impl is not _pykernels:
        box = list(upper)
        while True:
            try:
                return impl.freudenthal_mults(bform, lev, rho, roots, max_depth, box)
            except BoxTooSmall:
                box = [box[0]] + [2 * b + 1 for b in box[1:]]
            except OverflowError:
                break
    return _pykernels.freudenthal_mults(bform, lev, rho, roots, max_depth, upper)


def qp_histogram(caps, rho, charge, run_start, budget, check=True, backend=None):
    """Energy-surplus histogram of one charge-type; see ``_pykernels.qp_histogram``."""
    impl = _select(backend)
    if impl is not _pykernels:
        try:
            return impl.qp_histogram(caps, rho, charge, run_start, budget, check)
        except OverflowError:
            pass
    return _pykernels.qp_histogram(caps, rho, charge, run_start, budget, check)


def _select(backend):
    if backend is None:
        return _ckernels or _pykernels
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")
