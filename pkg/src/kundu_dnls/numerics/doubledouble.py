"""Vectorized double-double (~31 significant digits) complex arithmetic.

Built from the classic error-free transformations (two_sum, Dekker split /
two_prod).  Near-coalescent spectral data cancel roughly n*|log10 eps|
digits inside the transformation determinants, which overruns plain doubles
for the smallest perturbation radii; the engine switches to this
representation there.  Matrix entries are seeded from mpmath values so the
inputs carry more than double accuracy to begin with.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

Array = np.ndarray

_SPLIT = 134217729.0  # 2**27 + 1


def _two_sum(a: Array, b: Array) -> tuple[Array, Array]:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a: Array, b: Array) -> tuple[Array, Array]:
    s = a + b
    return s, b - (s - a)


def _split(a: Array) -> tuple[Array, Array]:
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: Array, b: Array) -> tuple[Array, Array]:
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(ahi, alo, bhi, blo):
    s, e = _two_sum(ahi, bhi)
    t, f = _two_sum(alo, blo)
    e = e + t
    s, e = _quick_two_sum(s, e)
    e = e + f
    return _quick_two_sum(s, e)


def _dd_mul(ahi, alo, bhi, blo):
    p, e = _two_prod(ahi, bhi)
    e = e + (ahi * blo + alo * bhi)
    return _quick_two_sum(p, e)


def _dd_div(ahi, alo, bhi, blo):
    q1 = ahi / bhi
    # r = a - q1*b, evaluated in double-double
    p, e = _dd_mul(np.asarray(q1), np.zeros_like(q1), bhi, blo)
    rhi, rlo = _dd_add(ahi, alo, -p, -e)
    q2 = (rhi + rlo) / bhi
    return _quick_two_sum(q1, q2)


@dataclass
class DDComplexArray:
    """Complex array with double-double real and imaginary parts."""

    re_hi: Array
    re_lo: Array
    im_hi: Array
    im_lo: Array

    @property
    def shape(self):
        return np.shape(self.re_hi)

    @classmethod
    def zeros(cls, shape) -> "DDComplexArray":
        z = np.zeros(shape)
        return cls(z.copy(), z.copy(), z.copy(), z.copy())

    @classmethod
    def from_complex(cls, z: Array) -> "DDComplexArray":
        z = np.asarray(z, dtype=complex)
        zero = np.zeros(z.shape)
        return cls(z.real.copy(), zero.copy(), z.imag.copy(), zero.copy())

    @classmethod
    def from_mp(cls, values) -> "DDComplexArray":
        """Build from an array-like of mpmath mpc values (shape preserved)."""
        arr = np.asarray(values, dtype=object)
        flat = arr.ravel()
        re_hi = np.empty(flat.shape)
        re_lo = np.empty(flat.shape)
        im_hi = np.empty(flat.shape)
        im_lo = np.empty(flat.shape)
        for i, v in enumerate(flat):
            v = mp.mpc(v)
            rh = float(v.real)
            ih = float(v.imag)
            re_hi[i] = rh
            im_hi[i] = ih
            re_lo[i] = float(v.real - mp.mpf(rh))
            im_lo[i] = float(v.imag - mp.mpf(ih))
        return cls(re_hi.reshape(arr.shape), re_lo.reshape(arr.shape),
                   im_hi.reshape(arr.shape), im_lo.reshape(arr.shape))

    def to_complex(self) -> Array:
        return (self.re_hi + self.re_lo) + 1j * (self.im_hi + self.im_lo)

    def copy(self) -> "DDComplexArray":
        return DDComplexArray(self.re_hi.copy(), self.re_lo.copy(),
                              self.im_hi.copy(), self.im_lo.copy())

    def __getitem__(self, idx) -> "DDComplexArray":
        return DDComplexArray(self.re_hi[idx], self.re_lo[idx],
                              self.im_hi[idx], self.im_lo[idx])

    def __setitem__(self, idx, other: "DDComplexArray"):
        self.re_hi[idx] = other.re_hi
        self.re_lo[idx] = other.re_lo
        self.im_hi[idx] = other.im_hi
        self.im_lo[idx] = other.im_lo

    def __add__(self, other: "DDComplexArray") -> "DDComplexArray":
        rh, rl = _dd_add(self.re_hi, self.re_lo, other.re_hi, other.re_lo)
        ih, il = _dd_add(self.im_hi, self.im_lo, other.im_hi, other.im_lo)
        return DDComplexArray(rh, rl, ih, il)

    def __sub__(self, other: "DDComplexArray") -> "DDComplexArray":
        return self + (-other)

    def __neg__(self) -> "DDComplexArray":
        return DDComplexArray(-self.re_hi, -self.re_lo, -self.im_hi, -self.im_lo)

    def __mul__(self, other: "DDComplexArray") -> "DDComplexArray":
        ac0, ac1 = _dd_mul(self.re_hi, self.re_lo, other.re_hi, other.re_lo)
        bd0, bd1 = _dd_mul(self.im_hi, self.im_lo, other.im_hi, other.im_lo)
        ad0, ad1 = _dd_mul(self.re_hi, self.re_lo, other.im_hi, other.im_lo)
        bc0, bc1 = _dd_mul(self.im_hi, self.im_lo, other.re_hi, other.re_lo)
        rh, rl = _dd_add(ac0, ac1, -bd0, -bd1)
        ih, il = _dd_add(ad0, ad1, bc0, bc1)
        return DDComplexArray(rh, rl, ih, il)

    def __truediv__(self, other: "DDComplexArray") -> "DDComplexArray":
        # a/b = a * conj(b) / |b|^2, all in double-double
        conj = DDComplexArray(other.re_hi, other.re_lo, -other.im_hi, -other.im_lo)
        num = self * conj
        r20, r21 = _dd_mul(other.re_hi, other.re_lo, other.re_hi, other.re_lo)
        i20, i21 = _dd_mul(other.im_hi, other.im_lo, other.im_hi, other.im_lo)
        den_hi, den_lo = _dd_add(r20, r21, i20, i21)
        rh, rl = _dd_div(num.re_hi, num.re_lo, den_hi, den_lo)
        ih, il = _dd_div(num.im_hi, num.im_lo, den_hi, den_lo)
        return DDComplexArray(rh, rl, ih, il)

    def abs_hi(self) -> Array:
        """Leading-order magnitude, used for pivot selection."""
        return np.hypot(self.re_hi, self.im_hi)


def dd_batched_det(mat: DDComplexArray) -> tuple[DDComplexArray, Array]:
    """Pivoted elimination determinant over a (..., m, m) double-double stack.

    Mirrors `determinant.batched_det`: returns (det, pivot_ratio).
    """
    shp = mat.shape
    m = shp[-1]
    if len(shp) < 2 or shp[-2] != m:
        raise ValueError(f"expected square matrices, got shape {shp}")
    lead = shp[:-2]
    n = int(np.prod(lead)) if lead else 1
    a = DDComplexArray(mat.re_hi.reshape(n, m, m).copy(), mat.re_lo.reshape(n, m, m).copy(),
                       mat.im_hi.reshape(n, m, m).copy(), mat.im_lo.reshape(n, m, m).copy())
    det = DDComplexArray.from_complex(np.ones(n, dtype=complex))
    sign = np.ones(n)
    piv_max = np.zeros(n)
    piv_min = np.full(n, np.inf)
    idx = np.arange(n)
    for k in range(m):
        mags = a[idx[:, None], np.arange(k, m)[None, :], k].abs_hi()
        rel = np.argmax(mags, axis=1) + k
        swap = np.flatnonzero(rel != k)
        if swap.size:
            r = rel[swap]
            for part in ("re_hi", "re_lo", "im_hi", "im_lo"):
                arr = getattr(a, part)
                tmp = arr[swap, k, :].copy()
                arr[swap, k, :] = arr[swap, r, :]
                arr[swap, r, :] = tmp
            sign[swap] = -sign[swap]
        piv = a[:, k, k]
        ap = piv.abs_hi()
        piv_max = np.maximum(piv_max, ap)
        piv_min = np.minimum(piv_min, ap)
        det = det * piv
        if k < m - 1:
            safe = ap > 0
            piv_safe = DDComplexArray(np.where(safe, piv.re_hi, 1.0), np.where(safe, piv.re_lo, 0.0),
                                      np.where(safe, piv.im_hi, 0.0), np.where(safe, piv.im_lo, 0.0))
            below = a[:, k + 1:, k]
            factor = below / DDComplexArray(
                np.broadcast_to(piv_safe.re_hi[:, None], below.shape).copy(),
                np.broadcast_to(piv_safe.re_lo[:, None], below.shape).copy(),
                np.broadcast_to(piv_safe.im_hi[:, None], below.shape).copy(),
                np.broadcast_to(piv_safe.im_lo[:, None], below.shape).copy())
            zero = np.zeros(factor.shape)
            factor = DDComplexArray(np.where(safe[:, None], factor.re_hi, zero),
                                    np.where(safe[:, None], factor.re_lo, zero),
                                    np.where(safe[:, None], factor.im_hi, zero),
                                    np.where(safe[:, None], factor.im_lo, zero))
            fexp = DDComplexArray(
                np.broadcast_to(factor.re_hi[:, :, None], (n, m - k - 1, m - k)).copy(),
                np.broadcast_to(factor.re_lo[:, :, None], (n, m - k - 1, m - k)).copy(),
                np.broadcast_to(factor.im_hi[:, :, None], (n, m - k - 1, m - k)).copy(),
                np.broadcast_to(factor.im_lo[:, :, None], (n, m - k - 1, m - k)).copy())
            prow = a[:, k, k:]
            pexp = DDComplexArray(
                np.broadcast_to(prow.re_hi[:, None, :], (n, m - k - 1, m - k)).copy(),
                np.broadcast_to(prow.re_lo[:, None, :], (n, m - k - 1, m - k)).copy(),
                np.broadcast_to(prow.im_hi[:, None, :], (n, m - k - 1, m - k)).copy(),
                np.broadcast_to(prow.im_lo[:, None, :], (n, m - k - 1, m - k)).copy())
            a[:, k + 1:, k:] = a[:, k + 1:, k:] - fexp * pexp
    sgn = DDComplexArray(sign, np.zeros(n), np.zeros(n), np.zeros(n))
    det = det * sgn
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(piv_min > 0, piv_max / piv_min, np.inf)
    det_out = DDComplexArray(det.re_hi.reshape(lead), det.re_lo.reshape(lead),
                             det.im_hi.reshape(lead), det.im_lo.reshape(lead))
    return det_out, ratio.reshape(lead)
