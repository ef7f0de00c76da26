"""Backend selection for the combinatorial kernels.

The compiled extension ``crosscov._ckernels`` is used when it was built;
otherwise, or when ``CROSSCOV_PURE_PYTHON`` is set to a non-empty value other
than ``0``, the numpy implementation in ``crosscov._kernels_py`` is used.
Both produce identical outputs.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("CROSSCOV_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

nc_rgs = _impl.nc_rgs
nc2_partners = _impl.nc2_partners
mobius_to_top = _impl.mobius_to_top
cc_tally = _impl.cc_tally
pair_tally = _impl.pair_tally


def decode_key(key: int, n: int, width: int) -> tuple[int, ...]:
    """Invert the mixed-radix ``n + 1`` exponent encoding used by the tallies."""
    base = n + 1
    out = []
    for _ in range(width):
        key, e = divmod(key, base)
        out.append(e)
    return tuple(out)
