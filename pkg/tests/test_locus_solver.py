import math

import numpy as np
import pytest

from locuslab import (
    BandSymbol,
    char_roots,
    chebyshev_symbol,
    det_window,
    det_window_scaled,
    expected_count,
    hausdorff_gap,
    leading_block,
    rank_filter,
    solve_n0,
    solve_n1,
    star_symbol,
    widom_eval,
    window_matrix,
)
from locuslab.locus_solver import AlphaCollisionError

rng = np.random.default_rng(40896)

TRID = chebyshev_symbol(0)
CHEB = chebyshev_symbol(1)
SQ2 = math.sqrt(2.0)


def random_symbol(n, k, h, integer=False):
    if integer:
        c = rng.integers(-2, 3, size=k + h + 1) + 1j * rng.integers(-2, 3, size=k + h + 1)
        c = c.astype(complex)
        c[0] += 1.0 if c[0] == 0 else 0.0
        c[-1] += 1.0 if c[-1] == 0 else 0.0
    else:
        c = rng.normal(size=k + h + 1) + 1j * rng.normal(size=k + h + 1)
        c[0] += 2.0
        c[-1] += 2.0
    return BandSymbol(k=k, h=h, c=c, n=n)


def full_locus(sym, m):
    if sym.n == 0:
        return solve_n0(sym, m)
    return rank_filter(sym, m, solve_n1(sym, m))


def bareiss_det(entries):
    """Exact determinant of a Gaussian-integer matrix.

    Fraction-free (Bareiss) elimination: every division is exact in the
    Gaussian integers, so the result is the true determinant with no
    rounding at all — a genuinely independent route from the LU code.
    """

    def mul(p, q):
        return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])

    def exact_div(p, q):
        d = q[0] * q[0] + q[1] * q[1]
        re, im = p[0] * q[0] + p[1] * q[1], p[1] * q[0] - p[0] * q[1]
        assert re % d == 0 and im % d == 0, "Bareiss division must be exact"
        return (re // d, im // d)

    a = [[(int(round(z.real)), int(round(z.imag))) for z in row] for row in entries]
    size = len(a)
    prev = (1, 0)
    sign = 1
    for piv in range(size - 1):
        if a[piv][piv] == (0, 0):
            for r in range(piv + 1, size):
                if a[r][piv] != (0, 0):
                    a[piv], a[r] = a[r], a[piv]
                    sign = -sign
                    break
            else:
                return 0.0 + 0.0j
        for r in range(piv + 1, size):
            for c in range(piv + 1, size):
                num = mul(a[r][c], a[piv][piv])
                num = (num[0] - mul(a[r][piv], a[piv][c])[0],
                       num[1] - mul(a[r][piv], a[piv][c])[1])
                a[r][c] = exact_div(num, prev)
            a[r][piv] = (0, 0)
        prev = a[piv][piv]
    z = a[size - 1][size - 1]
    return sign * complex(z[0], z[1])


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


def test_expected_count_pins():
    assert expected_count(3, 0) == 3
    assert expected_count(1, 1) == 1
    assert expected_count(2, 1) == 3
    assert expected_count(3, 1) == 6
    assert expected_count(5, 2) == math.comb(7, 3)


# ---------------------------------------------------------------------------
# windows and determinants
# ---------------------------------------------------------------------------


def test_window_matrix_scalar():
    w = window_matrix(TRID, 2, 0, [3.0])
    assert np.allclose(w, [[-3.0, 1.0], [1.0, -3.0]])


def test_window_matrix_slides_right():
    x = np.array([0.3, -0.7j])
    w0 = window_matrix(CHEB, 1, 0, x)
    w1 = window_matrix(CHEB, 1, 1, x)
    assert np.allclose(w0, [[-x[0]]])
    assert np.allclose(w1, [[-x[1]]])


def test_det_window_pins():
    assert det_window(TRID, 2, 0, [0.0]) == pytest.approx(-1.0)
    assert det_window(TRID, 2, 0, [3.0]) == pytest.approx(8.0)
    assert det_window(CHEB, 1, 0, [0.0, 0.0]) == pytest.approx(0.0)
    assert det_window(CHEB, 1, 1, [0.0, 0.0]) == pytest.approx(0.0)


def test_det_window_matches_window_matrix():
    for _ in range(10):
        sym = random_symbol(1, int(rng.integers(1, 3)), int(rng.integers(1, 4)))
        m = int(rng.integers(1, 6))
        j = int(rng.integers(0, 2))
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        want = np.linalg.det(window_matrix(sym, m, j, x))
        assert det_window(sym, m, j, x) == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_det_window_scaled_consistency():
    x = np.array([1.7 - 0.4j, 0.2 + 0.9j])
    mant, log = det_window_scaled(CHEB, 6, 1, x)
    assert abs(abs(mant) - 1.0) < 1e-12
    assert mant * math.exp(log) == pytest.approx(det_window(CHEB, 6, 1, x))


def test_det_window_against_exact_bareiss():
    # LU vs exact integer elimination on Gaussian-integer bands, m up
    # to 12; conditioning of these small-entry matrices keeps the LU
    # route honest to far better than 1e-10.
    for _ in range(6):
        n = int(rng.integers(0, 2))
        sym = random_symbol(n, int(rng.integers(1, 3)), int(rng.integers(max(n, 1), n + 3)), integer=True)
        m = int(rng.integers(8, 13))
        j = int(rng.integers(0, n + 1))
        x = (rng.integers(-2, 3, size=n + 1) + 1j * rng.integers(-2, 3, size=n + 1)).astype(complex)
        got = det_window(sym, m, j, x)
        want = bareiss_det(window_matrix(sym, m, j, x))
        scale = max(1.0, abs(want))
        assert abs(got - want) <= 1e-10 * scale, (m, j, got, want)


def test_leading_block_entries():
    x = np.array([0.5, -0.25])
    blk = leading_block(CHEB, 3, x)
    assert blk.shape == (3, 4)
    # band value minus the slot variable on the two displaced diagonals
    assert np.allclose(np.diag(blk), -x[0])
    assert np.allclose(np.diag(blk, 1), -x[1])
    assert np.allclose(np.diag(blk, -1), 1.0)
    assert np.allclose(np.diag(blk, 2), 1.0)


# ---------------------------------------------------------------------------
# characteristic roots and the product expansion
# ---------------------------------------------------------------------------


def test_char_roots_scalar_pin():
    got = sorted(np.asarray(char_roots(TRID, 0, [3.0])).ravel(), key=lambda z: z.real)
    assert got[0] == pytest.approx(-(3 + math.sqrt(5)) / 2)
    assert got[1] == pytest.approx(-(3 - math.sqrt(5)) / 2)


def test_char_roots_count_and_moduli_at_origin():
    got = np.asarray(char_roots(CHEB, 0, [0.0, 0.0])).ravel()
    assert got.size == math.comb(3, 1)
    assert np.allclose(np.abs(got), 1.0)


def test_widom_matches_lu_small_pins():
    assert widom_eval(TRID, 2, 0, [3.0]) == pytest.approx(8.0)
    assert widom_eval(TRID, 1, 0, [3.0]) == pytest.approx(-3.0)


def test_widom_matches_lu_randomized():
    hits = 0
    while hits < 20:
        n = int(rng.integers(0, 2))
        sym = random_symbol(n, int(rng.integers(1, 3)), int(rng.integers(max(n, 1), n + 3)))
        m = int(rng.integers(1, 9))
        j = int(rng.integers(0, n + 1))
        x = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        try:
            got = widom_eval(sym, m, j, x)
        except AlphaCollisionError:
            continue
        want = det_window(sym, m, j, x)
        assert abs(got - want) <= 1e-8 * max(abs(want), 1e-3), (n, m, j)
        hits += 1


def test_widom_refuses_collided_roots():
    # x_0 = 2 puts a double root at t = 1: the expansion has a pole there.
    with pytest.raises(AlphaCollisionError):
        widom_eval(TRID, 3, 0, [2.0])


# ---------------------------------------------------------------------------
# the scalar solver
# ---------------------------------------------------------------------------


def test_solve_n0_tridiagonal_small():
    assert sorted(z.real for z in solve_n0(TRID, 1).coords().ravel()) == pytest.approx([0.0], abs=1e-12)
    assert sorted(z.real for z in solve_n0(TRID, 2).coords().ravel()) == pytest.approx([-1.0, 1.0])
    got = sorted(z.real for z in solve_n0(TRID, 3).coords().ravel())
    assert got == pytest.approx([-SQ2, 0.0, SQ2], abs=1e-10)


def test_solve_n0_tridiagonal_closed_form():
    m = 9
    locus = solve_n0(TRID, m)
    want = sorted(-2 * math.cos(p * math.pi / (m + 1)) for p in range(1, m + 1))
    got = sorted(z.real for z in locus.coords().ravel())
    assert np.max(np.abs(np.array(got) - np.array(want))) < 1e-10
    assert locus.kind == "full"
    assert locus.total_multiplicity() == m
    assert not locus.defects


def test_solve_n0_rejects_other_arity():
    with pytest.raises(ValueError):
        solve_n0(CHEB, 3)


def test_solve_n0_residual_certificates():
    for p in solve_n0(random_symbol(0, 2, 2), 5):
        assert p.residuals["det_rel"].max() < 1e-8


# ---------------------------------------------------------------------------
# the two-variable solver
# ---------------------------------------------------------------------------


def test_solve_n1_order_one_origin():
    locus = full_locus(CHEB, 1)
    assert locus.total_multiplicity() == 1
    assert np.max(np.abs(locus.coords())) < 1e-10


def test_solve_n1_rejects_other_arity():
    with pytest.raises(ValueError):
        solve_n1(TRID, 3)
    with pytest.raises(ValueError):
        solve_n1(CHEB, 0)


def test_solve_n1_counts_random_bands():
    # h >= n + 1 keeps the leading symbol coefficient fixed; with h = n
    # the top coefficient is itself displaced and the count law below
    # genuinely fails, so that family is out of scope here.
    for _ in range(3):
        sym = random_symbol(1, int(rng.integers(1, 3)), int(rng.integers(2, 4)))
        m = int(rng.integers(2, 5))
        locus = full_locus(sym, m)
        assert locus.total_multiplicity() == expected_count(m, 1), sym
        assert not [d for d in locus.defects if d["kind"] == "count_mismatch"]


def test_solve_n1_residual_certificates():
    sym = random_symbol(1, 2, 2)
    for p in full_locus(sym, 3):
        assert p.residuals["det_rel"].max() < 1e-8
        assert p.residuals["sigma_ratio"] <= 1e-7


def test_full_points_subset_of_tilde():
    sym = random_symbol(1, 1, 2)
    m = 4
    tilde = solve_n1(sym, m)
    full = rank_filter(sym, m, tilde)
    assert full.kind == "full" and tilde.kind == "tilde"
    assert full.total_multiplicity() <= tilde.total_multiplicity()
    tc = tilde.coords()
    for p in full:
        gap = np.linalg.norm(tc - p.coords, axis=1).min()
        assert gap < 1e-7 * (1 + np.abs(tc).max())


def test_rank_filter_flags_count_mismatch():
    # filtering a deliberately wrong set must report, not raise
    from locuslab import EigenLocus, LocusPoint

    fake = EigenLocus(2, [LocusPoint([9.0, 9.0], 1, {})], "tilde")
    out = rank_filter(CHEB, 2, fake)
    kinds = [d["kind"] for d in out.defects]
    assert "count_mismatch" in kinds
    assert len(out.points) == 0


# ---------------------------------------------------------------------------
# invariances
# ---------------------------------------------------------------------------


def test_scaling_equivariance_scalar():
    sym = random_symbol(0, 1, 2)
    lam = 0.7 - 1.3j
    scaled = BandSymbol(sym.k, sym.h, lam * sym.c, 0)
    a = solve_n0(sym, 4).coords() * lam
    b = solve_n0(scaled, 4).coords()
    assert hausdorff_gap(a, b) < 1e-8


def test_scaling_and_shift_equivariance_two_slot():
    sym = random_symbol(1, 1, 2)
    lam = 1.4 + 0.3j
    mu = np.array([0.8 - 0.2j, -0.5 + 1.1j])
    c2 = lam * sym.c
    scaled = BandSymbol(sym.k, sym.h, c2, 1)
    c3 = sym.c.copy()
    c3[sym.k : sym.k + 2] += mu
    shifted = BandSymbol(sym.k, sym.h, c3, 1)
    base = full_locus(sym, 3).coords()
    assert hausdorff_gap(base * lam, full_locus(scaled, 3).coords()) < 1e-8
    assert hausdorff_gap(base + mu, full_locus(shifted, 3).coords()) < 1e-8


def test_conjugate_reversal_symmetry_of_symmetric_bands():
    # conjugate-reversal-symmetric bands have loci stable under
    # (x_0, x_1) -> (conj x_1, conj x_0)
    for sym, m in [(CHEB, 4), (star_symbol(2), 3)]:
        pts = full_locus(sym, m).coords()
        mirrored = np.conj(pts[:, ::-1])
        assert hausdorff_gap(pts, mirrored) < 1e-7


def test_hausdorff_gap_basics():
    a = np.array([[0.0 + 0j], [1.0 + 0j]])
    b = np.array([[0.0 + 0j], [1.5 + 0j]])
    assert hausdorff_gap(a, a) == 0.0
    assert hausdorff_gap(a, b) == pytest.approx(0.5)
    assert hausdorff_gap(a, b) == hausdorff_gap(b, a)
