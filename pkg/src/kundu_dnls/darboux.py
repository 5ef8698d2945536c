"""One-fold and determinant-form n-fold Darboux transformations.

The n-fold map is evaluated through four 2n x 2n determinants built from the
spectral data; only determinant ratios reach the output, so any common
rescaling of a row cancels (gauge covariance).  Degenerate (coalescing)
spectral configurations are handled numerically with a small perturbation
radius and, when that radius is tiny, extended-precision determinants.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath as mp
import numpy as np

from .errors import (ConditionBlowupError, DegeneratePairError,
                     DenominatorVanishesError, SingularOmegaError)
from .lax import (PhasePolynomial, PlaneWaveSeed, Seed, branch_quantity,
                  plane_wave_eigenfunction, zero_seed_eigenfunction)
from .numerics.determinant import batched_det
from .numerics.doubledouble import DDComplexArray, dd_batched_det

Array = np.ndarray

EXTENDED_EPS_THRESHOLD = 1e-3   # degeneration radius at or below which dd kicks in
DEFAULT_CONDITION_BOUND = 1e12

_MP_DPS = 40


@dataclass
class SpectralSet:
    """Ordered spectral data of even length 2n, optionally conjugate-reduced."""

    data: list
    reduction: bool = False

    def __post_init__(self):
        if len(self.data) % 2 != 0 or not self.data:
            raise ValueError("a spectral set holds an even, positive number of data")
        lams = [d.lam for d in self.data]
        if any(li == 0 for li in lams):
            raise ValueError("eigenvalues must be nonzero")
        if self.reduction:
            for i, li in enumerate(lams):
                for lj in lams[:i]:
                    if li == lj:
                        raise ValueError(
                            "reduced sets need pairwise distinct eigenvalues")

    @property
    def order(self) -> int:
        return len(self.data) // 2


def build_reduced_set(lambdas: Sequence[complex], seed: Seed,
                      weights_per_lambda: Optional[Sequence] = None,
                      pairing: str = "reference") -> SpectralSet:
    """Complete each upper-half representative with its conjugate partner.

    The partner carries (lam*, varphi*, phi*), which is what makes the
    transformed pair satisfy R = -Q*.
    """
    if weights_per_lambda is None:
        weights_per_lambda = [(1.0, 1.0)] * len(lambdas)
    if len(weights_per_lambda) != len(lambdas):
        raise ValueError("weights list must match lambdas")
    data = []
    for lam, w in zip(lambdas, weights_per_lambda):
        lam = complex(lam)
        if lam.real == 0.0 or lam.imag == 0.0:
            raise DegeneratePairError(
                f"lambda {lam} on an axis collapses its conjugate pair")
        if isinstance(seed, PlaneWaveSeed):
            if abs(branch_quantity(lam, seed)) < 1e-12 and complex(w[0]) == complex(w[1]):
                raise DegeneratePairError(
                    f"branch quantity vanishes at lambda {lam}; the two basis "
                    "solutions coincide and the eigenfunction degenerates")
            datum = plane_wave_eigenfunction(lam, seed, weights=tuple(w), pairing=pairing)
        else:
            datum = zero_seed_eigenfunction(lam)
        data += [datum, datum.conjugate_partner()]
    return SpectralSet(data=data, reduction=True)


@dataclass
class DTOutput:
    """A transformed solution: vectorized field closures plus conditioning data.

    Q(x, t) returns NaN at flagged points (transformation poles, condition
    blowups); `at` is the scalar accessor that raises instead.
    """

    Q: Callable
    R: Callable
    condition_estimate: Callable
    condition_bound: float = DEFAULT_CONDITION_BOUND

    def at(self, x: float, t: float) -> complex:
        cond = float(self.condition_estimate(x, t))
        if not np.isfinite(cond):
            raise SingularOmegaError(f"main determinant vanishes near ({x}, {t})")
        if cond > self.condition_bound:
            raise ConditionBlowupError(
                f"pivot ratio {cond:.3e} exceeds bound {self.condition_bound:.3e} at ({x}, {t})")
        q = complex(np.asarray(self.Q(x, t)).reshape(()))
        if not np.isfinite(q):
            raise DenominatorVanishesError(f"transformation denominator vanishes at ({x}, {t})")
        return q

    def intensity(self, x, t) -> Array:
        return np.abs(self.Q(x, t)) ** 2


def _seed_terms(seed: Seed, x, t):
    Q = seed.value(x, t)
    th = seed.theta(x, t)
    return Q, np.exp(-1j * th), np.exp(1j * th), np.sqrt(seed.alpha)


def one_fold(spectral_set: SpectralSet, seed: Seed,
             condition_bound: float = DEFAULT_CONDITION_BOUND) -> DTOutput:
    """Single-step transformation from one eigenvalue pair via its matrix elements."""
    if len(spectral_set.data) != 2:
        raise ValueError("one_fold needs a spectral set of exactly 2 data")
    d1, d2 = spectral_set.data
    l1, l2 = d1.lam, d2.lam

    def fields(x, t):
        p1, v1 = d1.phi(x, t), d1.varphi(x, t)
        p2, v2 = d2.phi(x, t), d2.varphi(x, t)
        den_a = p1 * v2 * l1 - v1 * p2 * l2        # denominator of a2
        num_a = v1 * p2 * l1 - p1 * v2 * l2
        factor = l1 * l1 - l2 * l2
        with np.errstate(all="ignore"):
            a2 = num_a / den_a
            d2_el = 1.0 / a2
            if factor == 0:
                # coalesced eigenvalues act trivially: the off-diagonal
                # elements carry an exactly vanishing factor
                b1 = np.zeros_like(a2)
                c1 = np.zeros_like(a2)
            else:
                b1 = p1 * p2 * factor / (-den_a)
                c1 = v1 * v2 * factor / (-num_a)
        return a2, d2_el, b1, c1, den_a

    def Q_new(x, t):
        a2, d2_el, _, c1, _ = fields(x, t)
        Q, eim, _, ra = _seed_terms(seed, x, t)
        with np.errstate(all="ignore"):
            out = (d2_el / a2) * Q - c1 * eim / (a2 * ra)
        return np.where(np.isfinite(out), out, np.nan + 0j)

    def R_new(x, t):
        a2, d2_el, b1, _, _ = fields(x, t)
        Q, _, eip, ra = _seed_terms(seed, x, t)
        R = -np.conj(Q)
        with np.errstate(all="ignore"):
            out = (a2 / d2_el) * R + b1 * eip / (d2_el * ra)
        return np.where(np.isfinite(out), out, np.nan + 0j)

    def cond(x, t):
        v1, p2 = d1.varphi(x, t), d2.phi(x, t)
        v2, p1 = d2.varphi(x, t), d1.phi(x, t)
        shape = np.broadcast(p1, p2).shape
        M = np.zeros(shape + (2, 2), dtype=complex)
        M[..., 0, 0] = l1 * v1
        M[..., 0, 1] = p1
        M[..., 1, 0] = l2 * v2
        M[..., 1, 1] = p2
        _, r = batched_det(M)
        return r

    return DTOutput(Q=Q_new, R=R_new, condition_estimate=cond, condition_bound=condition_bound)


# ---------------------------------------------------------------------------
# n-fold determinants
# ---------------------------------------------------------------------------

def _component_table(spectral_set: SpectralSet, x, t) -> tuple[list, list, list]:
    lams, phis, vphs = [], [], []
    for d in spectral_set.data:
        lams.append(d.lam)
        phis.append(np.asarray(d.phi(x, t), dtype=complex))
        vphs.append(np.asarray(d.varphi(x, t), dtype=complex))
    return lams, phis, vphs


def _omega_matrix(lams, phis, vphs, swap: bool, shifted: bool) -> Array:
    """Stack of the 2n x 2n determinant matrices over the broadcast point shape.

    Row j alternates descending powers of lam_j against the two components:
    odd powers weight varphi, even powers weight phi (swap exchanges roles);
    `shifted` replaces the leading column with lam^{2n} times the even-power
    component.
    """
    m = len(lams)
    shape = np.broadcast(phis[0], vphs[0]).shape
    M = np.zeros(shape + (m, m), dtype=complex)
    for j in range(m):
        f, v = (phis[j], vphs[j]) if not swap else (vphs[j], phis[j])
        lam = lams[j]
        for col in range(m):
            power = m - 1 - col
            M[..., j, col] = (lam ** power) * (v if power % 2 == 1 else f)
        if shifted:
            M[..., j, 0] = (lam ** m) * f
    return M


def _omega_matrix_mp(spectral_set: SpectralSet, x: float, t: float,
                     swap: bool, shifted: bool):
    m = len(spectral_set.data)
    M = [[None] * m for _ in range(m)]
    for j, d in enumerate(spectral_set.data):
        if d.mp_components is None:
            p, v = mp.mpc(complex(d.phi(x, t))), mp.mpc(complex(d.varphi(x, t)))
        else:
            p, v = d.mp_components(x, t)
        if swap:
            p, v = v, p
        lam = mp.mpc(d.lam)
        for col in range(m):
            power = m - 1 - col
            M[j][col] = (lam ** power) * (v if power % 2 == 1 else p)
        if shifted:
            M[j][0] = (lam ** m) * p
    return M


def _omega_dets_double(spectral_set: SpectralSet, x, t):
    lams, phis, vphs = _component_table(spectral_set, x, t)
    out = {}
    ratios = None
    for name, swap, shifted in (("main", False, False), ("swapped", True, False),
                                ("main_shift", False, True), ("swapped_shift", True, True)):
        M = _omega_matrix(lams, phis, vphs, swap, shifted)
        d, r = batched_det(M)
        out[name] = d
        if name == "main":
            ratios = r
    return out, ratios


def _omega_dets_extended(spectral_set: SpectralSet, x, t):
    xs = np.broadcast_to(np.asarray(x, dtype=float), np.broadcast(x, t).shape).ravel()
    ts = np.broadcast_to(np.asarray(t, dtype=float), np.broadcast(x, t).shape).ravel()
    shape = np.broadcast(x, t).shape
    out = {}
    ratios = None
    with mp.workdps(_MP_DPS):
        for name, swap, shifted in (("main", False, False), ("swapped", True, False),
                                    ("main_shift", False, True), ("swapped_shift", True, True)):
            mats = [_omega_matrix_mp(spectral_set, float(xi), float(ti), swap, shifted)
                    for xi, ti in zip(xs, ts)]
            dd = DDComplexArray.from_mp(np.asarray(mats, dtype=object))
            d, r = dd_batched_det(dd)
            out[name] = d.to_complex().reshape(shape)
            if name == "main":
                ratios = np.asarray(r).reshape(shape)
    return out, ratios


def n_fold(spectral_set: SpectralSet, seed: Seed, precision: str = "double",
           condition_bound: float = DEFAULT_CONDITION_BOUND) -> DTOutput:
    """Determinant-form transformation of order n = len(set)/2 (n in 1..3)."""
    n = spectral_set.order
    if n not in (1, 2, 3):
        raise ValueError(f"supported orders are 1..3, got {n}")
    if precision not in ("double", "extended"):
        raise ValueError(f"unknown precision {precision!r}")

    def dets(x, t):
        if precision == "extended":
            return _omega_dets_extended(spectral_set, x, t)
        return _omega_dets_double(spectral_set, x, t)

    def Q_new(x, t):
        om, ratios = dets(x, t)
        Q, eim, _, ra = _seed_terms(seed, x, t)
        with np.errstate(all="ignore"):
            main2 = om["main"] ** 2
            out = (om["swapped"] ** 2 / main2) * Q \
                + eim / ra * om["swapped"] * om["swapped_shift"] / main2
            out = np.where(np.isfinite(out) & (ratios <= condition_bound), out, np.nan + 0j)
        return out

    def R_new(x, t):
        om, ratios = dets(x, t)
        Q, _, eip, ra = _seed_terms(seed, x, t)
        R = -np.conj(Q)
        with np.errstate(all="ignore"):
            sw2 = om["swapped"] ** 2
            out = (om["main"] ** 2 / sw2) * R \
                - eip / ra * om["main"] * om["main_shift"] / sw2
            out = np.where(np.isfinite(out) & (ratios <= condition_bound), out, np.nan + 0j)
        return out

    def cond(x, t):
        _, ratios = dets(x, t)
        return ratios

    return DTOutput(Q=Q_new, R=R_new, condition_estimate=cond, condition_bound=condition_bound)


# ---------------------------------------------------------------------------
# numeric degeneration
# ---------------------------------------------------------------------------

def _default_offsets(n: int) -> list[complex]:
    if n == 1:
        return [1.0 + 0j]
    if n == 2:
        return [1.0 + 0j, -1.0 + 0j]
    return [complex(np.exp(2j * np.pi * k / n)) for k in range(n)]


@dataclass
class DegenerationSpec:
    """Coalescence recipe: base eigenvalue, radius, order, and split phases."""

    lambda_c: complex
    epsilon: float
    n: int
    phases: PhasePolynomial = field(default_factory=PhasePolynomial)
    offsets: Optional[Sequence[complex]] = None

    def __post_init__(self):
        if not (0 < self.epsilon <= 0.1):
            raise ValueError("epsilon must lie in (0, 0.1]")
        if self.n not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        offs = list(self.offsets) if self.offsets is not None else _default_offsets(self.n)
        if len(offs) != self.n:
            raise ValueError("need exactly n offsets")
        for i, oi in enumerate(offs):
            if abs(abs(oi) - 1.0) > 1e-12:
                raise ValueError("offsets must have unit modulus")
            for oj in offs[:i]:
                if abs(oi - oj) < 1e-12:
                    raise ValueError("offsets must be pairwise distinct")
        self.offsets = [complex(o) for o in offs]


def _degenerate_set(spec: DegenerationSpec, seed: Seed, offsets,
                    pairing: str) -> SpectralSet:
    lams, weights = [], []
    for off in offsets:
        eps_j = spec.epsilon * off
        lam_j = spec.lambda_c * (1 + eps_j)
        lams.append(lam_j)
        if isinstance(seed, PlaneWaveSeed):
            s_j = complex(branch_quantity(lam_j, seed))
            S_j = spec.phases(eps_j)
            weights.append((np.exp(-1j * s_j * S_j), np.exp(1j * s_j * S_j)))
        else:
            weights.append((1.0, 1.0))
    return build_reduced_set(lams, seed, weights_per_lambda=weights, pairing=pairing)


def degenerate_limit(spec: DegenerationSpec, seed: Seed,
                     precision: Optional[str] = None,
                     pairing: str = "reference",
                     condition_bound: float = DEFAULT_CONDITION_BOUND) -> DTOutput:
    """Coalescing-eigenvalue approximation of the order-n degenerate solution.

    Perturbed eigenvalues sit at lambda_c (1 + eps * offset_j) with the
    offsets spread over the unit circle.  For n = 1 the single offset makes
    the leading error linear in eps, so the output averages the +offset and
    -offset evaluations, restoring quadratic convergence; for n >= 2 the
    root-of-unity symmetry already cancels the linear term.
    """
    if precision is None:
        precision = "extended" if spec.epsilon <= EXTENDED_EPS_THRESHOLD else "double"
    main = n_fold(_degenerate_set(spec, seed, spec.offsets, pairing), seed,
                  precision=precision, condition_bound=condition_bound)
    if spec.n > 1:
        return main
    mirror = n_fold(_degenerate_set(spec, seed, [-o for o in spec.offsets], pairing), seed,
                    precision=precision, condition_bound=condition_bound)

    def Q_avg(x, t):
        return 0.5 * (main.Q(x, t) + mirror.Q(x, t))

    def R_avg(x, t):
        return 0.5 * (main.R(x, t) + mirror.R(x, t))

    def cond(x, t):
        return np.maximum(main.condition_estimate(x, t), mirror.condition_estimate(x, t))

    return DTOutput(Q=Q_avg, R=R_avg, condition_estimate=cond, condition_bound=condition_bound)
