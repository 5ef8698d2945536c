"""Verifier tests: residual operator, comparisons, convergence, peak analysis."""
import numpy as np
import pytest

import kundu_dnls as kd
from kundu_dnls.errors import (AllNodesExcludedError, GridMismatchError,
                               ResolutionTooCoarseError)
from kundu_dnls.verify import (ALL_VARIANTS, ConventionVariant, compare_fields,
                               convergence_study, exact_seed_residual, pde_residual,
                               peak_analysis, pin_down_convention)


# ---------------------------------------------------------------------------
# convention pin-down and the residual operator
# ---------------------------------------------------------------------------

def test_exact_seed_residual_pins_nonlinear_sign():
    seed = kd.make_plane_wave_seed(-2.0, 1.0, 1.0)
    assert exact_seed_residual(seed, +1) <= 1e-14
    assert exact_seed_residual(seed, -1) == pytest.approx(2.0, rel=1e-12)


def test_pin_down_is_decisive():
    variant = pin_down_convention()
    assert variant == ConventionVariant(1, "independent")
    assert len(ALL_VARIANTS) == 4


def test_zero_field_residual_vanishes_for_every_variant():
    seed = kd.zero_seed()
    g = kd.Grid2D(-1, 1, -1, 1, 17, 17)
    for variant in ALL_VARIANTS:
        rep = pde_residual(lambda x, t: 0.0 * (x + t), seed, variant, g, refinements=2)
        assert all(n[1] == 0 for n in rep.norms)


def test_residual_excludes_pole_neighbourhoods():
    seed = kd.zero_seed()
    g = kd.Grid2D(-1, 1, -1, 1, 33, 33)

    def field(x, t):
        # a single poisoned node at the origin
        out = np.exp(1j * x) + 0j * t
        return np.where((np.abs(x) < 1e-9) & (np.abs(t) < 1e-9), np.nan, out)

    rep = pde_residual(field, seed, ConventionVariant(), g, refinements=2)
    assert np.isfinite(rep.norms[0][1])
    with pytest.raises(AllNodesExcludedError):
        pde_residual(lambda x, t: np.full(np.broadcast(x, t).shape, np.nan + 0j),
                     seed, ConventionVariant(), g, refinements=1)


def test_residual_reports_decreasing_h():
    seed = kd.zero_seed()
    rep = pde_residual(kd.catalog.one_soliton(1, 2).eval, seed, ConventionVariant(),
                       kd.Grid2D(-2, 2, -1, 1, 81, 81), refinements=3)
    hs = [n[0] for n in rep.norms]
    assert hs[0] > hs[1] > hs[2]
    assert 1.7 <= rep.estimated_order <= 2.3


# ---------------------------------------------------------------------------
# field comparison
# ---------------------------------------------------------------------------

def _two_fields():
    g = kd.Grid2D(-1, 1, -1, 1, 21, 21)
    a = kd.sample(lambda x, t: np.exp(1j * (x + t)) * (1 + 0.3 * x), g)
    return a, g


def test_compare_fields_identical():
    a, g = _two_fields()
    for mode in ("intensity", "modulus_of_difference"):
        assert compare_fields(a, a, mode) == (0.0, 0.0)
    mx, mn = compare_fields(a, a, "up_to_global_phase")
    assert mx <= 1e-14 and mn <= 1e-14


def test_compare_fields_global_phase_mode():
    a, g = _two_fields()
    b = kd.ComplexField2D(g, np.exp(1j * np.pi / 3) * a.values)
    max_mod, _ = compare_fields(b, a, "modulus_of_difference")
    assert max_mod > 0.1
    max_ph, _ = compare_fields(b, a, "up_to_global_phase")
    assert max_ph <= 1e-12
    max_int, _ = compare_fields(b, a, "intensity")
    assert max_int <= 1e-12


def test_compare_fields_phase_mode_invariant_under_unimodular_factor():
    a, g = _two_fields()
    b = kd.ComplexField2D(g, a.values * np.exp(0.7j))
    e1, _ = compare_fields(a, b, "up_to_global_phase")
    c = kd.ComplexField2D(g, a.values * np.exp(-2.2j))
    e2, _ = compare_fields(c, b, "up_to_global_phase")
    assert abs(e1 - e2) <= 1e-12


def test_compare_fields_grid_mismatch():
    a, _ = _two_fields()
    other = kd.sample(lambda x, t: x + 0j * t, kd.Grid2D(-1, 1, -1, 1, 31, 31))
    with pytest.raises(GridMismatchError):
        compare_fields(a, other)


def test_convergence_study_trivial_and_validation():
    a, g = _two_fields()
    rows, monotone = convergence_study(lambda eps: a, a, [1e-1, 1e-2])
    assert all(err == 0 for _, err in rows) and not monotone
    with pytest.raises(ValueError):
        convergence_study(lambda eps: a, a, [1e-2, 1e-1])


# ---------------------------------------------------------------------------
# peak analysis
# ---------------------------------------------------------------------------

def _bump(X, T, x0, t0, h):
    return h / (1 + 4 * ((X - x0) ** 2 + (T - t0) ** 2))


def _intensity_field(fn, lo=-10, hi=10, n=201):
    g = kd.Grid2D(lo, hi, lo, hi, n, n)
    X, T = g.mesh()
    return kd.ComplexField2D(g, fn(X, T).astype(complex)), g


def test_peak_analysis_single_bump_fundamental():
    fld, g = _intensity_field(lambda X, T: 1 + _bump(X, T, 0, 0, 8.0))
    ps = peak_analysis(fld)
    assert ps.classification == "fundamental"
    assert len(ps.peaks) == 1
    x, t, h = ps.peaks[0]
    assert (x, t) == (0.0, 0.0) and h == pytest.approx(9.0, abs=0.05)


def test_peak_analysis_rogue1_field():
    ent = kd.catalog.rogue1()
    g = kd.Grid2D(-4, 4, -4, 4, 401, 401)
    fld = kd.sample(ent.eval, g)
    ps = peak_analysis(kd.ComplexField2D(g, np.abs(fld.values) ** 2))
    assert ps.classification == "fundamental"
    assert len(ps.peaks) == 1
    x, t, h = ps.peaks[0]
    assert abs(x) <= g.hx and abs(t) <= g.ht
    assert h == pytest.approx(9.0, abs=0.05)


def test_peak_analysis_triangle_and_ring_synthetic():
    def triangle(X, T):
        out = 1.0 + 0 * X
        for x0, t0 in [(-6, -4), (6, -4), (0, 6)]:
            out = out + _bump(X, T, x0, t0, 8.0)
        return out

    fld, _ = _intensity_field(triangle)
    assert peak_analysis(fld).classification == "triangular"

    def ring(X, T):
        out = 1.0 + 0 * X
        for k in range(5):
            ang = 2 * np.pi * k / 5
            out = out + _bump(X, T, 6 * np.cos(ang), 6 * np.sin(ang), 8.0)
        return out + _bump(X, T, 0, 0, 8.0)  # central hump is tolerated

    fld, _ = _intensity_field(ring)
    assert peak_analysis(fld).classification == "ring"


def test_peak_analysis_translation_equivariance():
    def base(X, T):
        return 1 + _bump(X, T, 1.0, -2.0, 8.0) + _bump(X, T, -5.0, 4.0, 6.0)

    fld, g = _intensity_field(base)
    ps = peak_analysis(fld)
    dx, dt = 5 * g.hx, 3 * g.ht
    shifted, _ = _intensity_field(lambda X, T: base(X - dx, T - dt))
    ps2 = peak_analysis(shifted)
    moved = sorted((round(x + dx, 9), round(t + dt, 9)) for x, t, _ in ps.peaks)
    got = sorted((round(x, 9), round(t, 9)) for x, t, _ in ps2.peaks)
    assert moved == got


def test_peak_analysis_resolution_guard():
    g = kd.Grid2D(-10, 10, -10, 10, 21, 21)
    fld = kd.ComplexField2D(g, np.ones((21, 21), dtype=complex))
    with pytest.raises(ResolutionTooCoarseError):
        peak_analysis(fld)


def test_peak_analysis_clusters_composite_centre():
    # two overlapping humps within the cluster radius count as one structure
    fld, _ = _intensity_field(
        lambda X, T: 1 + _bump(X, T, -0.8, 0, 8.0) + _bump(X, T, 0.8, 0, 8.0))
    ps = peak_analysis(fld)
    assert len(ps.peaks) == 2
    assert len(ps.structures) == 1
    assert ps.classification == "fundamental"
