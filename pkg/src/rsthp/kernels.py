"""Backend dispatch for the numerical hot loops.

The compiled extension is used when importable; otherwise the pure NumPy
implementation takes over. Set RSTHP_PURE_PY=1 to force the fallback
(useful for debugging and for the backend benchmark).
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("RSTHP_PURE_PY"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'numpy'."""
    return "numpy" if _impl is _kernels_py else "cython"


def asr_accumulate(a2, s2, common_num, inv_l2, sum_inv_l2, delta_grid, etr, sigma_n2, cthp):
    """Draw-averaged common/private rates over a power-split grid.

    See _kernels_py.asr_accumulate for the argument layout.
    """
    return _impl.asr_accumulate(
        np.ascontiguousarray(a2, dtype=np.float64),
        np.ascontiguousarray(s2, dtype=np.float64),
        np.ascontiguousarray(common_num, dtype=np.float64),
        np.ascontiguousarray(inv_l2, dtype=np.float64),
        float(sum_inv_l2),
        np.ascontiguousarray(delta_grid, dtype=np.float64),
        float(etr),
        float(sigma_n2),
        bool(cthp),
    )


def thp_encode_batch(s, b, lam):
    """Batched feedback-recursion encoding; returns (v, d) with b @ v = s + d."""
    return _impl.thp_encode_batch(
        np.ascontiguousarray(s, dtype=np.complex128),
        np.ascontiguousarray(b, dtype=np.complex128),
        float(lam),
    )
