import itertools
import math

import numpy as np
import pytest

from locuslab import (
    cheb_lattice_candidates,
    cheb_membership_check,
    cheb_point,
    chebyshev_symbol,
    hausdorff_gap,
    hypocycloid,
    hypocycloid_curve,
    rank_filter,
    solve_n1,
    star_boundary,
    star_curve,
    star_symbol,
)
from locuslab.band_symbol import c_residual_many

rng = np.random.default_rng(550)


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------


def test_chebyshev_symbol_structure():
    sym = chebyshev_symbol(2)
    assert (sym.k, sym.h, sym.n) == (1, 3, 2)
    assert sym.coef(-1) == 1 and sym.coef(3) == 1
    assert sym.coef(0) == sym.coef(1) == sym.coef(2) == 0


def test_star_symbol_structure():
    sym = star_symbol(2)
    assert (sym.k, sym.h, sym.n) == (2, 3, 1)
    assert sym.coef(-2) == 1 and sym.coef(3) == 1
    assert star_symbol(1) == chebyshev_symbol(1)
    with pytest.raises(ValueError):
        star_symbol(0)


# ---------------------------------------------------------------------------
# torus parametrization
# ---------------------------------------------------------------------------


def test_cheb_point_pins():
    assert np.allclose(cheb_point([2 * np.pi / 3, -2 * np.pi / 3]), [0.0, 0.0], atol=1e-12)
    assert abs(cheb_point([np.pi / 2])[0]) < 1e-12
    assert np.allclose(cheb_point([0.0, 0.0]), [-3.0, -3.0])


def test_cheb_point_images_stay_in_region():
    # 10^4 random angle tuples; every image has residual ~ 0 for the
    # matching symbol, across n = 0..3.
    for n in range(4):
        th = rng.uniform(-np.pi, np.pi, size=(10_000 // (n + 1), n + 1))
        pts = np.array([cheb_point(t) for t in th])
        res = c_residual_many(chebyshev_symbol(n), pts)
        assert res.max() < 1e-10, n


def test_cheb_point_symmetric_under_angle_permutations():
    th = rng.uniform(-np.pi, np.pi, size=2)
    full = np.append(th, -th.sum())
    base = cheb_point(th)
    for perm in itertools.permutations(range(3)):
        again = cheb_point(full[list(perm)][:2])
        assert np.allclose(again, base, atol=1e-12)


def test_cheb_point_conjugate_reversal():
    for n in (0, 1, 2):
        th = rng.uniform(-np.pi, np.pi, size=n + 1)
        a = cheb_point(-th)
        b = np.conj(cheb_point(th))[::-1]
        assert np.allclose(a, b, atol=1e-12)


def test_membership_pins():
    assert cheb_membership_check([0.0, 0.0])
    assert cheb_membership_check([-3.0, -3.0])  # triple root (t+1)^3
    assert not cheb_membership_check([7.0, 7.0])
    assert not cheb_membership_check([0.0, 1.0])


# ---------------------------------------------------------------------------
# lattice search
# ---------------------------------------------------------------------------


def test_lattice_scalar_order_three():
    rep = cheb_lattice_candidates(0, 3)
    assert rep["expected"] == 3
    assert rep["validated"] == 8  # theta = 2 pi l / 8, i.e. p pi / 4
    got = np.sort(np.real(np.asarray(rep["points"]).ravel()))
    want = np.sort([-2 * math.cos(p * math.pi / 4) for p in (1, 2, 3)])
    assert np.allclose(got, want, atol=1e-9)


def test_lattice_two_slot_order_one():
    rep = cheb_lattice_candidates(1, 1)
    assert rep["validated"] == 3
    pts = np.asarray(rep["points"])
    assert pts.shape == (1, 2)
    assert np.max(np.abs(pts)) < 1e-9  # the origin


def test_lattice_two_slot_order_two_matches_solver():
    rep = cheb_lattice_candidates(1, 2)
    assert rep["validated"] is not None
    lattice_pts = np.asarray(rep["points"])
    assert len(lattice_pts) == rep["expected"] == 3
    sym = chebyshev_symbol(1)
    solved = rank_filter(sym, 2, solve_n1(sym, 2)).coords()
    assert hausdorff_gap(lattice_pts, solved) < 1e-9


def test_lattice_report_shape():
    rep = cheb_lattice_candidates(1, 1)
    assert set(rep) >= {"expected", "candidates", "validated", "points", "thetas"}
    assert all(isinstance(N, int) for N, _hits in rep["candidates"])
    with pytest.raises(ValueError):
        cheb_lattice_candidates(5, 1)


# ---------------------------------------------------------------------------
# boundary curves
# ---------------------------------------------------------------------------


def test_hypocycloid_pins():
    assert hypocycloid(2, 0.0) == pytest.approx(7.0)
    assert hypocycloid(2, np.pi) == pytest.approx(-1.0, abs=1e-12)
    assert hypocycloid(3, 0.0) == pytest.approx(-9.0)
    with pytest.raises(ValueError):
        hypocycloid(0, 0.0)


def test_hypocycloid_rotational_periodicity():
    # advancing theta by 2 pi/(2d+3) rotates the curve point by
    # e^{-2 pi i (d+2)/(2d+3)}
    for d in (1, 2, 3):
        th = rng.uniform(0, 2 * np.pi, size=8)
        step = 2 * np.pi / (2 * d + 3)
        rot = np.exp(-2j * np.pi * (d + 2) / (2 * d + 3))
        assert np.allclose(hypocycloid(d, th + step), rot * hypocycloid(d, th))


def test_star_boundary_rotational_symmetry():
    for d in (1, 2, 3):
        th = rng.uniform(0, 2 * np.pi, size=8)
        step = 2 * np.pi / (2 * d + 1)
        rot = np.exp(1j * d * step)
        assert np.allclose(star_boundary(d, th + step), rot * star_boundary(d, th))


def test_star_boundary_cusps():
    # speed vanishes exactly at the 2d+1 cusp angles and nowhere between
    for d in (1, 2):
        cusp_th = 2 * np.pi * np.arange(2 * d + 1) / (2 * d + 1)
        mid_th = cusp_th + np.pi / (2 * d + 1)
        eps = 1e-6

        def speed(t):
            return np.abs(star_boundary(d, t + eps) - star_boundary(d, t - eps)) / (2 * eps)

        assert np.max(speed(cusp_th)) < 1e-4
        assert np.min(speed(mid_th)) > 0.5
        assert np.max(np.abs(star_boundary(d, cusp_th))) == pytest.approx(2 * d + 1)


def test_star_boundary_matches_equal_angle_torus_fiber():
    # d = 1: the boundary is the image of the coincident-angle fibers of
    # the two-slot torus parametrization, coordinate 0.
    th = rng.uniform(-np.pi, np.pi, size=16)
    want = np.array([cheb_point([t, t])[0] for t in th])
    assert np.allclose(star_boundary(1, th), want, atol=1e-12)


def test_curve_samplers():
    c1 = star_curve(2, samples=512)
    c2 = hypocycloid_curve(2, samples=512)
    assert c1.shape == c2.shape == (512,)
    assert np.max(np.abs(c1)) == pytest.approx(5.0, abs=1e-3)
    assert np.max(np.abs(c2)) == pytest.approx(7.0, abs=1e-3)
