"""Grid, stencil, determinant, and extended-precision unit tests."""
import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kundu_dnls.errors import GridTooSmallError, NonFiniteError
from kundu_dnls.lax import zero_seed_eigenfunction
from kundu_dnls.numerics import (ComplexField2D, DDComplexArray, Grid2D,
                                 batched_det, central_diff, dd_batched_det, det,
                                 sample)


# ---------------------------------------------------------------------------
# determinant oracle: brute-force cofactor expansion for n <= 4
# ---------------------------------------------------------------------------

def cofactor_det(m):
    m = np.asarray(m, dtype=complex)
    if m.shape == (1, 1):
        return m[0, 0]
    return sum((-1) ** j * m[0, j] * cofactor_det(np.delete(m[1:], j, axis=1))
               for j in range(m.shape[1]))


def test_det_identity_case():
    assert det(np.array([[1.0]])) == 1.0


def test_det_permutation_matrix():
    assert det(np.array([[0.0, 1.0], [1.0, 0.0]])) == -1.0


def test_det_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        det(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_det_4x4_spectral_matrix_vs_cofactor_oracle():
    # main determinant layout built from zero-background eigenfunctions at the
    # four conjugate eigenvalues, evaluated at the origin
    lams = [1 + 2j, 1 - 2j, 0.7 + 0.3j, 0.7 - 0.3j]
    rows = []
    for k, lam in enumerate(lams):
        d = zero_seed_eigenfunction(lam)
        if k % 2 == 1:
            phi, vph = np.conj(d.varphi(0, 0)), np.conj(d.phi(0, 0))
        else:
            phi, vph = d.phi(0, 0), d.varphi(0, 0)
        rows.append([lam ** 3 * vph, lam ** 2 * phi, lam * vph, phi])
    m = np.array(rows)
    want = cofactor_det(m)
    assert abs(det(m) - want) <= 1e-12 * abs(want)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_det_matches_cofactor_oracle_random(n):
    rng = np.random.default_rng(n)
    for _ in range(25):
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        want = cofactor_det(m)
        assert abs(det(m) - want) <= 1e-12 * max(1e-30, abs(want))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1), st.sampled_from([2, 3]))
def test_det_multiplicative(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    b = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    lhs = det(a @ b)
    rhs = det(a) * det(b)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_batched_det_pivot_ratio_flags_singular():
    m = np.zeros((1, 2, 2), dtype=complex)
    m[0] = [[1, 1], [1, 1]]
    d, r = batched_det(m)
    assert abs(d[0]) < 1e-14
    assert r[0] > 1e12 or np.isinf(r[0])


# ---------------------------------------------------------------------------
# grids, sampling, stencils
# ---------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(GridTooSmallError):
        Grid2D(0, 1, 0, 1, 1, 10)
    with pytest.raises(ValueError):
        Grid2D(1, 0, 0, 1, 10, 10)
    g = Grid2D(-1, 1, 0, 1, 5, 3)
    assert g.hx == pytest.approx(0.5) and g.ht == pytest.approx(0.5)


def test_sample_zero_and_pointwise():
    g = Grid2D(-1, 1, -1, 1, 7, 7)
    z = sample(lambda x, t: 0.0 * x * t, g)
    assert np.all(z.values == 0)
    f = sample(lambda x, t: np.exp(1j * (2 * x + t)), g)
    i0, j0 = 3, 3  # node at the origin
    assert f.values[i0, j0] == pytest.approx(1.0)


def test_sample_flags_non_finite_instead_of_raising():
    g = Grid2D(-1, 1, -1, 1, 5, 5)
    f = sample(lambda x, t: np.where(np.abs(x) < 1e-12, np.nan, 1.0 + 0j), g)
    assert f.invalid[2].all() and not f.invalid[0].any()


def test_central_diff_exponential_and_order():
    g = Grid2D(-1, 1, 0, 1, 401, 5)
    f = sample(lambda x, t: np.exp(1j * x) + 0 * t, g)
    d = central_diff(f, "x", 1)
    want = 1j * f.values
    err = np.abs(d.values - want)[1:-1, :].max()
    assert err <= 1e-4

    # halving hx reduces the max interior error by a factor in [3.5, 4.5]
    def interior_err(n):
        gg = Grid2D(-1, 1, 0, 1, n, 5)
        ff = sample(lambda x, t: np.exp(1.3 * x) + 0 * t, gg)
        dd = central_diff(ff, "x", 1)
        return np.abs(dd.values - 1.3 * ff.values)[1:-1, :].max()

    factor = interior_err(201) / interior_err(401)
    assert 3.5 <= factor <= 4.5


def test_central_diff_constant_and_quadratic():
    g = Grid2D(-2, 2, 0, 1, 41, 5)
    const = sample(lambda x, t: (1.5 - 0.5j) * np.ones_like(x), g)
    assert np.abs(central_diff(const, "x", 1).values).max() <= 1e-13
    quad = sample(lambda x, t: x ** 2 + 0j * t, g)
    d2 = central_diff(quad, "x", 2)
    assert np.abs(d2.values[1:-1, :] - 2.0).max() <= 1e-8


def test_central_diff_requires_five_samples():
    g = Grid2D(-1, 1, 0, 1, 4, 6)
    f = sample(lambda x, t: x + 0j * t, g)
    with pytest.raises(GridTooSmallError):
        central_diff(f, "x", 1)
    assert central_diff(f, "t", 1) is not None


def test_central_diff_marks_degraded_boundaries():
    g = Grid2D(-1, 1, 0, 1, 11, 7)
    f = sample(lambda x, t: x ** 3 + 0j * t, g)
    d = central_diff(f, "x", 1)
    assert d.degraded[0].all() and d.degraded[-1].all()
    assert not d.degraded[1:-1].any()


def test_field_shape_validation():
    g = Grid2D(-1, 1, 0, 1, 5, 5)
    with pytest.raises(Exception):
        ComplexField2D(g, np.zeros((4, 5), dtype=complex))


# ---------------------------------------------------------------------------
# double-double arithmetic
# ---------------------------------------------------------------------------

def test_dd_roundtrip_and_arithmetic():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    b = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    da, db = DDComplexArray.from_complex(a), DDComplexArray.from_complex(b)
    assert np.allclose((da * db).to_complex(), a * b, rtol=1e-15)
    assert np.allclose((da + db).to_complex(), a + b, rtol=1e-15)
    assert np.allclose((da / db).to_complex(), a / b, rtol=1e-14)


def test_dd_mul_captures_sub_double_error():
    # (1 + 2^-40) * (1 - 2^-40) = 1 - 2^-80: the correction lives in the low word
    eps = 2.0 ** -40
    a = DDComplexArray.from_complex(np.array([1.0 + 0j])) + \
        DDComplexArray.from_complex(np.array([eps + 0j]))
    b = DDComplexArray.from_complex(np.array([1.0 + 0j])) + \
        DDComplexArray.from_complex(np.array([-eps + 0j]))
    prod = a * b
    assert prod.re_hi[0] == 1.0
    assert prod.re_lo[0] == pytest.approx(-eps * eps, rel=1e-12)


def test_dd_det_matches_mpmath_on_clustered_matrix():
    eps = 1e-6
    base = np.array([[1.0, 1.0, 1.0],
                     [1.0, 1.0 + eps, 1.0 + 2 * eps],
                     [1.0, 1.0 + 2 * eps, 1.0 + 4.1 * eps]], dtype=complex) * (1 + 0.3j)
    dd = DDComplexArray.from_complex(base[None])
    d, _ = dd_batched_det(dd)
    with mp.workdps(40):
        ref = mp.det(mp.matrix([[mp.mpc(base[i, j]) for j in range(3)] for i in range(3)]))
        rel = abs(mp.mpc(complex(d.to_complex()[0])) - ref) / abs(ref)
    assert rel < 1e-15  # double-double floor; plain doubles sit near 1e-4 here


def test_dd_from_mp_preserves_extra_digits():
    with mp.workdps(40):
        val = mp.mpf(1) / mp.mpf(3) + mp.mpc(0, 1) * mp.mpf(1) / mp.mpf(7)
        dd = DDComplexArray.from_mp(np.array([[val]], dtype=object))
        err = abs(mp.mpf(dd.re_hi[0, 0]) + mp.mpf(dd.re_lo[0, 0]) - mp.mpf(1) / 3)
    assert err < mp.mpf(10) ** -30
