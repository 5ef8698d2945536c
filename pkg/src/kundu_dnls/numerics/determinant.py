"""Dense complex determinants by row elimination with partial pivoting.

The batched form works on arrays of shape (..., m, m) so whole grids of
small transformation determinants evaluate in a handful of vectorized
passes.  Alongside the determinant it reports the pivot-magnitude ratio
max|p_k| / min|p_k|, the conditioning estimate used to detect near-singular
evaluation points in the degenerate regimes.
"""
from __future__ import annotations

import numpy as np

from ..errors import NonFiniteError

Array = np.ndarray


def batched_det(mats: Array) -> tuple[Array, Array]:
    """Determinants and pivot ratios of a stack of square complex matrices.

    Returns (det, pivot_ratio), each of shape mats.shape[:-2].  A zero pivot
    yields det 0 and pivot_ratio inf.
    """
    a = np.array(mats, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    m = a.shape[-1]
    lead = a.shape[:-2]
    a = a.reshape((-1, m, m))
    n = a.shape[0]
    sign = np.ones(n, dtype=complex)
    piv_max = np.zeros(n)
    piv_min = np.full(n, np.inf)
    det_val = np.ones(n, dtype=complex)
    for k in range(m):
        rel = np.argmax(np.abs(a[:, k:, k]), axis=1) + k
        swap = np.flatnonzero(rel != k)
        if swap.size:
            r = rel[swap]
            tmp = a[swap, k, :].copy()
            a[swap, k, :] = a[swap, r, :]
            a[swap, r, :] = tmp
            sign[swap] = -sign[swap]
        piv = a[:, k, k]
        ap = np.abs(piv)
        piv_max = np.maximum(piv_max, ap)
        piv_min = np.minimum(piv_min, ap)
        det_val *= piv
        if k < m - 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                factor = np.where(ap[:, None] > 0, a[:, k + 1:, k] / piv[:, None], 0.0)
            a[:, k + 1:, k:] -= factor[:, :, None] * a[:, None, k, k:]
    det_val *= sign
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(piv_min > 0, piv_max / piv_min, np.inf)
    return det_val.reshape(lead), ratio.reshape(lead)


def det(matrix: Array) -> complex:
    """Determinant of one square complex matrix; raises on non-finite entries."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    d, _ = batched_det(a[None])
    return complex(d[0])


def pivot_ratio(matrix: Array) -> float:
    """max/min pivot magnitude from the pivoted elimination of one matrix."""
    a = np.asarray(matrix, dtype=complex)
    _, r = batched_det(a[None])
    return float(r[0])
