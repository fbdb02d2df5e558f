import math

import numpy as np
import pytest

from locuslab import (
    AffineMap,
    BandSymbol,
    alpha_roots,
    c_region_scan,
    c_residual,
    cauchy_bound,
    chebyshev_symbol,
    cheb_point,
    classify_boundary,
    is_multihermitian,
    normalize,
    q_poly,
    rank_filter,
    solve_n0,
    solve_n1,
    star_symbol,
)
from locuslab.band_symbol import c_residual_many, in_c
from locuslab.polycore import DEFAULT_TOLS

rng = np.random.default_rng(71)

TRID = chebyshev_symbol(0)  # k = h = 1, c = (1, 0, 1), scalar slot
CHEB = chebyshev_symbol(1)  # k = 1, h = 2, c = (1, 0, 0, 1)

PHI_LO = (3 - math.sqrt(5)) / 2
PHI_HI = (3 + math.sqrt(5)) / 2


def random_symbol(n, k, h, scale=1.0):
    c = scale * (rng.normal(size=k + h + 1) + 1j * rng.normal(size=k + h + 1))
    c[0] += 2.0 * scale
    c[-1] += 2.0 * scale
    return BandSymbol(k=k, h=h, c=c, n=n)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def test_band_symbol_shape_checks():
    BandSymbol(k=1, h=2, c=[1, 0, 0, 1], n=1)
    with pytest.raises(ValueError):
        BandSymbol(k=1, h=2, c=[1, 0, 0], n=1)  # wrong length
    with pytest.raises(ValueError):
        BandSymbol(k=1, h=2, c=[0, 0, 0, 1], n=1)  # c_{-k} = 0
    with pytest.raises(ValueError):
        BandSymbol(k=1, h=2, c=[1, 0, 0, 0], n=1)  # c_h = 0
    with pytest.raises(ValueError):
        BandSymbol(k=0, h=2, c=[1, 0, 1], n=1)  # no lower band
    with pytest.raises(ValueError):
        BandSymbol(k=1, h=1, c=[1, 0, 1], n=2)  # variable slot past h


def test_coef_indexing():
    sym = BandSymbol(k=2, h=1, c=[5, 0, 3, 7], n=0)
    assert sym.coef(-2) == 5 and sym.coef(0) == 3 and sym.coef(1) == 7
    assert sym.coef(-3) == 0 and sym.coef(4) == 0  # outside the band
    assert sym.degree == 3


def test_symbol_equality_and_hash():
    assert chebyshev_symbol(1) == star_symbol(1)
    assert hash(chebyshev_symbol(1)) == hash(star_symbol(1))
    assert chebyshev_symbol(1) != chebyshev_symbol(2)


# ---------------------------------------------------------------------------
# the symbol polynomial
# ---------------------------------------------------------------------------


def test_q_poly_chebyshev_origin():
    q = q_poly(CHEB, [0.0, 0.0])
    assert np.allclose(q.coeffs, [1, 0, 0, 1])


def test_q_poly_scalar_pin():
    q = q_poly(TRID, [3.0])
    assert np.allclose(q.coeffs, [1, -3, 1])


def test_q_poly_subtracts_variables_on_their_slots():
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    q = q_poly(CHEB, x)
    assert np.allclose(q.coeffs, [1.0, -x[0], -x[1], 1.0])


def test_q_poly_arity_check():
    with pytest.raises(ValueError):
        q_poly(CHEB, [1.0])


# ---------------------------------------------------------------------------
# root data
# ---------------------------------------------------------------------------


def test_alpha_moduli_pins():
    spec = alpha_roots(TRID, [3.0])
    assert np.allclose(spec.moduli, [PHI_LO, PHI_HI])
    spec0 = alpha_roots(TRID, [0.0])
    assert np.allclose(np.sort_complex(spec0.roots), [-1j, 1j])


def test_alpha_moduli_sorted():
    for _ in range(10):
        sym = random_symbol(1, 2, 3)
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        mod = alpha_roots(sym, x).moduli
        assert np.all(np.diff(mod) >= -1e-15)
        assert len(mod) == sym.degree


def test_alpha_roots_rejects_vanishing_leading_term():
    # h = n makes the top slot a variable slot; x_n = c_h kills the degree.
    sym = BandSymbol(k=1, h=1, c=[1.0, 0.0, 1.0], n=1)
    with pytest.raises(ValueError):
        alpha_roots(sym, [0.0, 1.0])


def test_vieta_product_of_roots():
    for _ in range(10):
        sym = random_symbol(rng.integers(0, 3), rng.integers(1, 4), 3)
        x = rng.normal(size=sym.n + 1) + 1j * rng.normal(size=sym.n + 1)
        q = q_poly(sym, x)
        roots = alpha_roots(sym, x).roots
        want = (-1.0) ** q.degree * q.coeffs[0] / q.coeffs[-1]
        assert np.prod(roots) == pytest.approx(want, rel=1e-8)


# ---------------------------------------------------------------------------
# the limit-region residual
# ---------------------------------------------------------------------------


def test_c_residual_pin():
    # moduli at x0 = 3 are the golden pair; the middle chain of length
    # n+2 = 2 must be flat, so the defect is their scaled gap.
    want = (PHI_HI - PHI_LO) / (1 + PHI_HI)
    assert c_residual(TRID, [3.0]) == pytest.approx(want, abs=1e-12)
    assert c_residual(TRID, [3.0]) == pytest.approx(0.6180339887498949)


def test_c_residual_zero_on_torus_images():
    for _ in range(25):
        x = cheb_point(rng.uniform(-np.pi, np.pi, size=2))
        assert c_residual(CHEB, x) < 1e-12
        assert in_c(CHEB, x)
    assert not in_c(TRID, [3.0])


def test_c_residual_many_matches_scalar():
    xs = rng.normal(size=(40, 2)) + 1j * rng.normal(size=(40, 2))
    batch = c_residual_many(CHEB, xs)
    for x, r in zip(xs, batch):
        assert r == pytest.approx(c_residual(CHEB, x), rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------------------
# boundary classification
# ---------------------------------------------------------------------------


def test_classify_boundary_double_root_at_band_edge():
    assert classify_boundary(TRID, [2.0]) == {"double_root"}
    assert classify_boundary(TRID, [-2.0]) == {"double_root"}


def test_classify_boundary_interior_point_is_clean():
    assert classify_boundary(TRID, [0.0]) == set()


def test_classify_boundary_requires_membership():
    with pytest.raises(ValueError):
        classify_boundary(TRID, [3.0])


def test_classify_boundary_chebyshev_cusp():
    # (-3, -3) is the triple-root cusp (t + 1)^3 of the two-slot family.
    flags = classify_boundary(CHEB, [-3.0, -3.0])
    assert "double_root" in flags


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def test_normalize_pin():
    sym = BandSymbol(k=1, h=1, c=[1.0, 5.0, 2.0], n=0)
    red, amap = normalize(sym)
    assert np.allclose(red.c, [0.5, 0.0, 1.0])
    assert amap.scale == pytest.approx(2.0)
    assert np.allclose(amap.shift, [5.0])
    assert amap.apply([1.0])[0] == pytest.approx(7.0)
    assert amap.invert([7.0])[0] == pytest.approx(1.0)


def test_normalize_idempotent_on_reduced_symbols():
    red, amap = normalize(chebyshev_symbol(1))
    assert red == chebyshev_symbol(1)
    assert amap.is_identity()


def test_affine_map_round_trip():
    amap = AffineMap(2.0 - 1.0j, np.array([1.0 + 2.0j, -3.0]))
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert np.allclose(amap.invert(amap.apply(x)), x)


def test_normalized_locus_maps_back_scalar():
    # Locus of the normalized symbol, pushed through the affine map,
    # must be the locus of the original symbol.
    sym = BandSymbol(k=1, h=1, c=[1.5, -2.0 + 1.0j, 3.0], n=0)
    red, amap = normalize(sym)
    for m in (2, 4, 6):
        orig = solve_n0(sym, m).coords()
        back = np.array([amap.apply(x) for x in solve_n0(red, m).coords()])
        d = np.abs(orig[:, None, 0] - back[None, :, 0])
        assert d.min(axis=1).max() < 1e-8


def test_normalized_locus_maps_back_two_slot():
    sym = BandSymbol(k=1, h=2, c=[2.0, 1.0 - 1.0j, 0.5j, 1.0 + 0.5j], n=1)
    red, amap = normalize(sym)
    for m in (2, 3):
        orig = rank_filter(sym, m, solve_n1(sym, m)).coords()
        back = np.array(
            [amap.apply(x) for x in rank_filter(red, m, solve_n1(red, m)).coords()]
        )
        d = np.linalg.norm(orig[:, None, :] - back[None, :, :], axis=2)
        assert d.min(axis=1).max() < 1e-8


# ---------------------------------------------------------------------------
# symmetry and bounds
# ---------------------------------------------------------------------------


def test_is_multihermitian_pins():
    assert is_multihermitian(CHEB)
    assert is_multihermitian(star_symbol(2))
    assert not is_multihermitian(BandSymbol(k=1, h=2, c=[1, 0, 0, 2], n=1))
    assert not is_multihermitian(BandSymbol(k=2, h=1, c=[1, 0, 0, 1], n=0))  # h - n != k
    sym = BandSymbol(k=2, h=3, c=[1j, 2.0, 0, 0, 2.0, -1j], n=1)
    assert is_multihermitian(sym)  # c_{-2} = conj(c_3), c_{-1} = conj(c_2)


def test_cauchy_bound_contains_small_loci():
    assert cauchy_bound(TRID) == pytest.approx(5.0)
    for _ in range(3):
        sym = random_symbol(1, 1, 2)
        bound = cauchy_bound(sym)
        pts = rank_filter(sym, 3, solve_n1(sym, 3)).coords()
        assert np.max(np.abs(pts)) < bound


# ---------------------------------------------------------------------------
# plane scan
# ---------------------------------------------------------------------------


def test_c_region_scan_recovers_real_interval():
    scan = c_region_scan(TRID, (-3.0, 3.0), (-3.0, 3.0), resolution=121)
    assert scan.residuals.shape == (121, 121)
    inside = scan.inside_points()
    assert inside.size > 0
    step = 6.0 / 120
    # the scalar two-way band fills exactly [-2, 2] on the real axis
    assert np.max(np.abs(inside.imag)) <= step + 1e-9
    assert np.max(np.abs(inside.real)) <= 2.0 + step + 1e-9
    lo, hi = inside.real.min(), inside.real.max()
    assert lo == pytest.approx(-2.0, abs=2 * step)
    assert hi == pytest.approx(2.0, abs=2 * step)


def test_c_region_scan_boundary_polylines_trace_the_ends():
    scan = c_region_scan(TRID, (-3.0, 3.0), (-0.5, 0.5), resolution=161)
    assert scan.boundary, "expected at least one boundary polyline"
    verts = np.concatenate([np.asarray(p) for p in scan.boundary])
    # every traced vertex hugs the interval, and the extreme points reach
    # its two endpoints
    assert np.max(np.abs(verts.imag)) < 0.1
    assert verts.real.max() == pytest.approx(2.0, abs=0.1)
    assert verts.real.min() == pytest.approx(-2.0, abs=0.1)
