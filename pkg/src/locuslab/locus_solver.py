"""Window determinants and the finite-m locus solvers.

The m-th locus lives where the m x (m+n) leading block of the displaced
band matrix drops rank.  Writing D^m_j for the determinant of the m x m
window spanning columns j+1 .. j+m (j = 0..n), the candidate set is the
solution set of D^m_0 = ... = D^m_n = 0, and the locus proper is the
subset where the whole rectangular block is rank-deficient.

Two solve paths are provided: n = 0 reduces to an ordinary eigenvalue
problem for the m x m window, and n = 1 is handled by resultant
elimination — evaluation-interpolation of Sylvester determinant samples
for the monomial route, plus the finite spectrum of the linearized
Sylvester matrix polynomial, which sees roots the monomial basis cannot
represent (all determinants go through log-scaled LU so that nothing
overflows on the way to m around 30).  A Widom-style root-product
expansion of the same window determinants is implemented independently
and serves as the cross-check oracle wherever the symbol roots are well
separated.

Everything returns residual certificates; count mismatches against the
expected binom(m+n, n+1) are reported as defects, never patched over.
"""

import math
from functools import lru_cache
from itertools import combinations

import numpy as np
import scipy.linalg

from .band_symbol import _q_rows, alpha_roots, cauchy_bound
from .polycore import (
    DEFAULT_TOLS,
    RootFindingError,
    cluster_points,
    roots_many,
    roots_univariate,
)

__all__ = [
    "AlphaCollisionError",
    "EigenLocus",
    "LocusPoint",
    "char_roots",
    "det_window",
    "det_window_scaled",
    "expected_count",
    "hausdorff_gap",
    "leading_block",
    "rank_filter",
    "solve_n0",
    "solve_n1",
    "widom_eval",
    "window_matrix",
]

# relative residual gate for certified points: |D| <= gate * window scale
RESIDUAL_GATE = 1e-8
# interpolated coefficients below this (relative, per sample) count as zero
COEFF_TRIM = 1e-12
# pre-polish filter on the complementary window at back-substituted points
BACKSOLVE_FILTER = 5e-2
# polished-but-uncertified candidates closer than this get individual records
NEAR_MISS = 1e-4
# multiplicity > 1 requires the system Jacobian ratio below this
JACOBIAN_GATE = 1e-4
# interpolation failures shrink the sampling circle and retry
INTERP_RETRIES = 3
RETRY_SHRINK = 0.7
# pencil eigenvalues beyond this multiple of the search bound are junk
SPECTRUM_KEEP = 3.0


class AlphaCollisionError(RuntimeError):
    """Symbol roots too close for the product expansion to be trusted."""


class LocusPoint:
    """One locus point: coordinates, cluster multiplicity, certificates."""

    __slots__ = ("coords", "multiplicity", "residuals")

    def __init__(self, coords, multiplicity, residuals):
        self.coords = np.asarray(coords, dtype=complex)
        self.multiplicity = int(multiplicity)
        self.residuals = dict(residuals)

    def __repr__(self):
        c = ", ".join(f"{z:.6g}" for z in self.coords)
        return f"LocusPoint(({c}), mult={self.multiplicity})"


class EigenLocus:
    """Solver output: points with multiplicity, plus defect records.

    kind is "tilde" for the raw solution set of the window system and
    "full" once the rank filter has been applied.  For kind="full" the
    total multiplicity should equal binom(m+n, n+1); a mismatch is
    recorded in ``defects`` (list of dicts) rather than raised.
    """

    __slots__ = ("m", "points", "kind", "defects")

    def __init__(self, m, points, kind, defects=None):
        if kind not in ("tilde", "full"):
            raise ValueError("kind must be 'tilde' or 'full'")
        self.m = int(m)
        self.points = list(points)
        self.kind = kind
        self.defects = list(defects or [])

    def coords(self):
        if not self.points:
            return np.empty((0, 0), dtype=complex)
        return np.array([p.coords for p in self.points])

    def total_multiplicity(self):
        return sum(p.multiplicity for p in self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return (
            f"EigenLocus(m={self.m}, kind={self.kind}, "
            f"points={len(self.points)}, total={self.total_multiplicity()}, "
            f"defects={len(self.defects)})"
        )


def expected_count(m, n):
    """Locus cardinality (with multiplicity) predicted for order m."""
    return math.comb(m + n, n + 1)


# ---------------------------------------------------------------------------
# window matrices and determinants
# ---------------------------------------------------------------------------


@lru_cache(maxsize=512)
def _window_placements(sym, m, j):
    """Constant window matrix and variable placement masks, cached.

    Window j covers block columns j+1 .. j+m, so entry (r, c) sits on
    band diagonal j + c - r; variable x_s displaces it when that index
    is s.
    """
    base = np.empty((m, m), dtype=complex)
    for r in range(m):
        for c in range(m):
            base[r, c] = sym.coef(j + c - r)
    plc = np.zeros((sym.n + 1, m, m), dtype=complex)
    for s in range(sym.n + 1):
        for r in range(m):
            c = r + s - j
            if 0 <= c < m:
                plc[s, r, c] = 1.0
    base.flags.writeable = False
    plc.flags.writeable = False
    return base, plc


def window_matrix(sym, m, j, x):
    """The m x m window of the displaced band at the point x."""
    if not 0 <= j <= sym.n:
        raise ValueError(f"window index j must lie in 0..{sym.n}")
    base, plc = _window_placements(sym, m, j)
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != sym.n + 1:
        raise ValueError(f"x must have {sym.n + 1} coordinates")
    return base - np.tensordot(x, plc, axes=1)


def _dets_scaled(sym, m, j, xs):
    """(sign, log|det|) of window j over a batch of points xs (B, n+1)."""
    base, plc = _window_placements(sym, m, j)
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    mats = base[None, :, :] - np.tensordot(xs, plc, axes=([1], [0]))
    sign, logabs = np.linalg.slogdet(mats)
    return sign, logabs


def det_window_scaled(sym, m, j, x):
    """Window determinant as (mantissa, log-magnitude): value = mantissa * e^log.

    The overflow-proof form used by the solvers; the mantissa has unit
    modulus (or is 0 for an exactly singular window).
    """
    sign, logabs = _dets_scaled(sym, m, j, np.asarray(x, dtype=complex)[None, :])
    return complex(sign[0]), float(logabs[0])


def det_window(sym, m, j, x):
    """Window determinant as a plain complex number.

    Convenient at moderate m; for large windows or far-out points use
    det_window_scaled, this one can overflow.
    """
    sign, logabs = det_window_scaled(sym, m, j, x)
    return sign * np.exp(logabs)


def _hadamard_log(mats, floor):
    """log of the floored Hadamard bound prod_r max(||row_r||_2, floor).

    The plain Hadamard product collapses together with the determinant
    when whole rows vanish (e.g. the 1x1 window [-x_0] at x_0 = 0 has
    |det| / ||row|| identically 1 however close to the locus the point
    is), so each row norm is floored at the natural entry scale of the
    window — floor should be ~ max|c| + ||x||_inf, broadcast over the
    batch.
    """
    norms = np.linalg.norm(mats, axis=-1)
    floor = np.asarray(floor)[..., None]
    return np.sum(np.log(np.maximum(norms, floor)), axis=-1)


def _scale_floor(sym, xs):
    """Natural entry scale max|c| + ||x||_inf per point, shape (B,)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    return np.max(np.abs(sym.c)) + np.max(np.abs(xs), axis=1)


def _window_relres(sym, m, xs):
    """Relative residuals exp(log|D_j| - log window scale), shape (n+1, B)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    floor = _scale_floor(sym, xs)
    out = np.empty((sym.n + 1, xs.shape[0]))
    for j in range(sym.n + 1):
        base, plc = _window_placements(sym, m, j)
        mats = base[None, :, :] - np.tensordot(xs, plc, axes=([1], [0]))
        _, logabs = np.linalg.slogdet(mats)
        out[j] = np.exp(logabs - _hadamard_log(mats, floor))
    return out


def leading_block(sym, m, x):
    """The m x (m+n) leading block of the displaced band at x."""
    x = np.asarray(x, dtype=complex).ravel()
    n = sym.n
    blk = np.empty((m, m + n), dtype=complex)
    for r in range(m):
        for c in range(m + n):
            s = c - r
            v = sym.coef(s)
            if 0 <= s <= n:
                v = v - x[s]
            blk[r, c] = v
    return blk


# ---------------------------------------------------------------------------
# Widom-style product expansion (the independent oracle)
# ---------------------------------------------------------------------------


def char_roots(sym, j, x, tols=DEFAULT_TOLS):
    """Characteristic ratios of window j: all (k+j)-subset root products.

    For each size-(k+j) subset sigma of the symbol roots the recurrence
    driving window j contributes the ratio
    (-1)^(k+j) / prod_{i in sigma} alpha_i.
    """
    al = alpha_roots(sym, x, tols).roots
    size = sym.k + j
    sign = (-1.0) ** size
    return np.array(
        [sign / np.prod(al[list(sig)]) for sig in combinations(range(al.size), size)]
    )


def widom_eval(sym, m, j, x, tols=DEFAULT_TOLS):
    """Window determinant via the root-product expansion.

    D^m_j = c_{-k}^m * sum_sigma prod_{l in sigma, i not in sigma}
    (1 - alpha_l / alpha_i)^{-1} * r_{j sigma}^m, summed over all
    (k+j)-subsets sigma, with r as in char_roots.  (Derivation: by
    dual Jacobi-Trudi the window determinant is the rectangular Schur
    polynomial s_{(m^{h-j})} of the symbol roots times the m-th power
    of the leading coefficient and a sign; passing to complementary
    subsets turns the leading coefficient into the trailing one, hence
    the c_{-k}^m out front — often dropped in the literature where
    c_{-k} is normalized to 1, but required for general bands.)

    Requires well-separated symbol roots; raises AlphaCollisionError
    when any ratio alpha_l/alpha_i is within tol_sep of 1, and the
    caller should fall back to det_window.  Deliberately kept as an
    independent code path from the LU route: agreement of the two is a
    primary correctness check.
    """
    al = alpha_roots(sym, x, tols).roots
    d = al.size
    ratio = al[None, :] / al[:, None]
    off = ~np.eye(d, dtype=bool)
    if np.min(np.abs(1.0 - ratio[off])) < tols.tol_sep:
        raise AlphaCollisionError(
            "symbol roots nearly coincide; product expansion unreliable"
        )
    size = sym.k + j
    sign = (-1.0) ** size
    cmk = sym.coef(-sym.k)
    total = 0.0 + 0.0j
    idx = range(d)
    for sig in combinations(idx, size):
        inside = list(sig)
        outside = [i for i in idx if i not in sig]
        denom = np.prod(1.0 - ratio[np.ix_(outside, inside)].T)
        r = sign / np.prod(al[inside])
        total += r**m / denom
    return cmk**m * total


def _widom_values(sym, m, xs, tols):
    """Both window determinants via the product expansion, batched/scaled.

    Returns (vals, logs, good): D^m_j(x_b) = vals[j, b] * exp(logs[j, b])
    wherever good[b].  Points the expansion cannot handle — vanished
    leading coefficient, nearly-collided symbol roots (its poles), or
    non-finite intermediates — come back flagged instead of raising, so
    callers can fall back to the LU route pointwise.  Only n = 1.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    B = xs.shape[0]
    d = sym.degree
    vals = np.zeros((2, B), dtype=complex)
    logs = np.zeros((2, B))
    good = np.zeros(B, dtype=bool)
    rows = _q_rows(sym, xs)
    keep = np.abs(rows[:, -1]) > 1e-12 * np.abs(rows).max(axis=1)
    if not keep.any():
        return vals, logs, good
    try:
        al = roots_many(rows[keep], tols)
    except RootFindingError:
        return vals, logs, good
    ratio = al[:, None, :] / al[:, :, None]  # [b, i, l] = al[b, l] / al[b, i]
    off = ~np.eye(d, dtype=bool)
    sep = np.abs(1.0 - ratio[:, off]).min(axis=1) >= tols.tol_sep
    kidx = np.nonzero(keep)[0][sep]
    if not kidx.size:
        return vals, logs, good
    al, ratio = al[sep], ratio[sep]
    lcmk = m * np.log(complex(sym.coef(-sym.k)))
    fine = np.ones(kidx.size, dtype=bool)
    for j in (0, 1):
        size = sym.k + j
        sign = (-1.0) ** size
        lterms = []
        for sig in combinations(range(d), size):
            inside = list(sig)
            outside = [i for i in range(d) if i not in sig]
            den = np.prod(1.0 - ratio[:, outside][:, :, inside], axis=(1, 2))
            lterms.append(m * np.log(sign / np.prod(al[:, inside], axis=1)) - np.log(den))
        lt = np.array(lterms)
        ref = lt.real.max(axis=0)
        v = np.exp(lt - ref).sum(axis=0) * np.exp(1j * lcmk.imag)
        vals[j, kidx] = v
        logs[j, kidx] = ref + lcmk.real
        fine &= np.isfinite(v) & np.isfinite(ref)
    good[kidx] = fine
    return vals, logs, good


def _widom_refine(sym, m, pts, tols):
    """Sharpen polished roots by Newton steps on the product expansion.

    LU determinant values lose all contrast within roughly
    eps * cond(window) of a root, which by m around 14 leaves a flat
    residual basin some 1e-6 wide: the polisher certifies anywhere
    inside it, coincident candidates land at distinct spots, and one
    point masquerades as several.  On the locus the expansion's leading
    terms stay comparably sized, so its values keep full relative
    contrast at any m and Newton localizes to near machine precision.
    Points the expansion cannot evaluate are returned unchanged, and
    every refined point is leashed to its input: the second evaluator
    may sharpen a position, never rehome it.
    """
    z = np.array(pts, dtype=complex)
    if z.size == 0:
        return z
    start = z.copy()
    active = np.ones(len(z), dtype=bool)
    for _ in range(12):
        idx = np.nonzero(active)[0]
        if not idx.size:
            break
        zl = z[idx]
        nb = idx.size
        hh = 1e-7 * (1.0 + np.abs(zl))
        zero = np.zeros(nb)
        stencil = np.concatenate(
            [
                zl,
                zl + np.column_stack([hh[:, 0], zero]),
                zl - np.column_stack([hh[:, 0], zero]),
                zl + np.column_stack([zero, hh[:, 1]]),
                zl - np.column_stack([zero, hh[:, 1]]),
            ]
        )
        vals, logs, good = _widom_values(sym, m, stencil, tols)
        vals = vals.reshape(2, 5, nb)
        logs = logs.reshape(2, 5, nb)
        good = good.reshape(5, nb).all(axis=0)
        ref = logs.max(axis=1)  # one scale per window per point
        w = vals * np.exp(logs - ref[:, None, :])
        f0, f1 = w[0, 0], w[1, 0]
        j00 = (w[0, 1] - w[0, 2]) / (2 * hh[:, 0])
        j01 = (w[0, 3] - w[0, 4]) / (2 * hh[:, 1])
        j10 = (w[1, 1] - w[1, 2]) / (2 * hh[:, 0])
        j11 = (w[1, 3] - w[1, 4]) / (2 * hh[:, 1])
        det = j00 * j11 - j01 * j10
        det = np.where((det == 0) | ~np.isfinite(det), 1.0, det)
        step = np.column_stack(
            [(j11 * f0 - j01 * f1) / det, (j00 * f1 - j10 * f0) / det]
        )
        step[~(good & np.isfinite(step).all(axis=1))] = 0.0
        z[idx] = zl - step
        active[idx] = np.abs(step).max(axis=1) > 1e-14 * (
            1.0 + np.abs(z[idx]).max(axis=1)
        )
    drift = np.abs(z - start).max(axis=1)
    rev = drift > 1e-4 * (1.0 + np.abs(start).max(axis=1))
    z[rev] = start[rev]
    return z


# ---------------------------------------------------------------------------
# n = 0: plain eigenvalue problem
# ---------------------------------------------------------------------------


def _certify_points(sym, m, clusters, tols):
    """LocusPoint records (det residuals + rank gap) for cluster output."""
    points = []
    for center, count, _ in clusters:
        x = np.atleast_1d(center)
        relres = _window_relres(sym, m, x[None, :])[:, 0]
        det_abs = np.array(
            [abs(det_window(sym, m, j, x)) for j in range(sym.n + 1)]
        )
        smin, ratio = _rank_gap(sym, m, x)
        points.append(
            LocusPoint(
                x,
                count,
                {
                    "det_abs": det_abs,
                    "det_rel": relres,
                    "sigma_min": smin,
                    "sigma_ratio": ratio,
                },
            )
        )
    return points


def _rank_gap(sym, m, x):
    """(sigma_min, sigma_min / scale) of the leading block at x.

    The scale is max(largest singular value, entry scale) — the entry
    floor matters when the whole block degenerates (m=1 blocks have a
    single singular value, so a bare sigma_min/sigma_max is useless).
    """
    sv = np.linalg.svd(leading_block(sym, m, x), compute_uv=False)
    scale = max(float(sv[0]), float(_scale_floor(sym, np.atleast_2d(x))[0]))
    return float(sv[-1]), float(sv[-1] / scale)


def solve_n0(sym, m, tols=DEFAULT_TOLS):
    """Locus for a single variable slot: eigenvalues of the m x m window.

    With n = 0 the only window is the band matrix itself minus x_0 on
    the diagonal, so the locus is exactly its spectrum (returned with
    cluster multiplicities); kind="full" since every eigenvalue already
    drops the rank of the square block.
    """
    if sym.n != 0:
        raise ValueError("solve_n0 requires a symbol with n = 0")
    base, _ = _window_placements(sym, m, 0)
    ev = np.linalg.eigvals(np.asarray(base))
    clusters = cluster_points(ev, tols.tol_cluster)
    points = _certify_points(sym, m, clusters, tols)
    defects = []
    total = sum(p.multiplicity for p in points)
    want = expected_count(m, 0)
    if total != want:
        defects.append({"kind": "count_mismatch", "expected": want, "got": total})
    return EigenLocus(m, points, "full", defects)


# ---------------------------------------------------------------------------
# n = 1: resultant elimination with evaluation-interpolation
# ---------------------------------------------------------------------------


class _InterpolationError(RuntimeError):
    pass


def _fiber_coeffs(sym, m, x0_vals, rho1, tols):
    """Coefficients of both window determinants as polynomials in x_1.

    For every x_0 in x0_vals the two windows are sampled on the circle
    |x_1| = rho1 at m+1 nodes and inverted by FFT.  Returns, per window
    j: coefficient array (S, m+1) in the scaled variable u = x_1/rho1,
    the per-sample log scale L_j (S,), and the per-sample relative
    residual level (S,) used to detect fibers on which the determinant
    vanishes identically.
    """
    x0_vals = np.asarray(x0_vals, dtype=complex)
    S = x0_vals.size
    P = m + 1
    nodes = rho1 * np.exp(2j * np.pi * np.arange(P) / P)
    xs = np.empty((S * P, 2), dtype=complex)
    xs[:, 0] = np.repeat(x0_vals, P)
    xs[:, 1] = np.tile(nodes, S)
    out = []
    floor = _scale_floor(sym, xs)
    for j in (0, 1):
        base, plc = _window_placements(sym, m, j)
        mats = base[None, :, :] - np.tensordot(xs, plc, axes=([1], [0]))
        sign, logabs = np.linalg.slogdet(mats)
        relres = np.exp(
            (logabs - _hadamard_log(mats, floor)).reshape(S, P)
        )
        sign = sign.reshape(S, P)
        logabs = logabs.reshape(S, P)
        L = np.max(logabs, axis=1)
        L = np.where(np.isfinite(L), L, 0.0)
        vals = sign * np.exp(logabs - L[:, None])
        # samples are v_p = sum_t b_t e^{+2 pi i p t / P}, inverted by fft/P
        coeffs = np.fft.fft(vals, axis=1) / P
        out.append((coeffs, L, np.max(relres, axis=1)))
    return out


def _live_degree(coeffs):
    """Largest coefficient index that is nonzero somewhere in the batch.

    Per-sample relative comparison, so samples at wildly different
    absolute scales all get a vote.  Returns -1 for an identically zero
    batch.
    """
    mags = np.abs(coeffs)
    top = np.max(mags, axis=1, keepdims=True)
    prof = np.max(mags / np.maximum(top, 1e-300), axis=0)
    live = np.nonzero(prof > COEFF_TRIM * 10)[0]
    return int(live[-1]) if live.size else -1


def _resultant_samples(c0, c1, d0, d1):
    """log-scaled Sylvester determinants, batched over the sample axis."""
    S = c0.shape[0]
    size = d0 + d1
    syl = np.zeros((S, size, size), dtype=complex)
    rev0 = c0[:, d0::-1]
    rev1 = c1[:, d1::-1]
    for r in range(d1):
        syl[:, r, r : r + d0 + 1] = rev0
    for r in range(d0):
        syl[:, d1 + r, r : r + d1 + 1] = rev1
    return np.linalg.slogdet(syl)


def _trimmed_poly(coeffs):
    """Drop trailing relative noise; returns (coeffs, degree)."""
    mags = np.abs(coeffs)
    mx = mags.max()
    if mx == 0:
        return coeffs[:1], -1
    live = np.nonzero(mags > COEFF_TRIM * mx)[0]
    if live.size == 0:
        return coeffs[:1], -1
    return coeffs[: live[-1] + 1], int(live[-1])


def _newton_polish(sym, m, pts, tols):
    """Vectorized damped two-variable Newton on both window determinants.

    All candidates iterate simultaneously.  Determinant values inside a
    point's finite-difference stencil share one log scale, so the
    Jacobian is formed from representable numbers no matter how large
    the raw determinants are.  A step is only accepted where it lowers
    the certified relative residual, otherwise halved, up to the
    backtrack budget.  Returns (points, final residuals, ok mask).
    """
    z = np.array(pts, dtype=complex)
    B = z.shape[0]
    if B == 0:
        return z, np.empty(0), np.zeros(0, dtype=bool)
    bases = []
    for j in (0, 1):
        base, plc = _window_placements(sym, m, j)
        bases.append((base, plc))

    def eval_raw(zz):
        """(sign, logabs, log scale) per window, for points zz (B, 2)."""
        floor = _scale_floor(sym, zz)
        sgn = np.empty((2, zz.shape[0]), dtype=complex)
        la = np.empty((2, zz.shape[0]))
        ha = np.empty((2, zz.shape[0]))
        for j, (base, plc) in enumerate(bases):
            mats = base[None, :, :] - np.tensordot(zz, plc, axes=([1], [0]))
            s, l = np.linalg.slogdet(mats)
            sgn[j], la[j] = s, l
            ha[j] = _hadamard_log(mats, floor)
        return sgn, la, ha

    def relres_of(zz):
        _, la, ha = eval_raw(zz)
        return np.max(np.exp(la - ha), axis=0)

    res = relres_of(z)
    frozen = res <= 1e-13
    h0 = 1e-6  # central differences; balanced truncation vs cancellation
    for _ in range(tols.newton_maxiter):
        live = ~frozen
        if not live.any():
            break
        zl = z[live]
        hh = h0 * (1.0 + np.abs(zl))
        stencil = [
            zl,
            zl + np.column_stack([hh[:, 0], np.zeros(len(zl))]),
            zl - np.column_stack([hh[:, 0], np.zeros(len(zl))]),
            zl + np.column_stack([np.zeros(len(zl)), hh[:, 1]]),
            zl - np.column_stack([np.zeros(len(zl)), hh[:, 1]]),
        ]
        sgns, las = [], []
        for st in stencil:
            sg, la, _ = eval_raw(st)
            sgns.append(sg)
            las.append(la)
        las = np.array(las)  # (5, 2, Bl)
        sgns = np.array(sgns)
        ref = np.max(las, axis=0).max(axis=0)  # shared per-point scale
        vals = sgns * np.exp(las - ref[None, None, :])
        f0, f1 = vals[0, 0], vals[0, 1]
        j00 = (vals[1, 0] - vals[2, 0]) / (2 * hh[:, 0])
        j01 = (vals[3, 0] - vals[4, 0]) / (2 * hh[:, 1])
        j10 = (vals[1, 1] - vals[2, 1]) / (2 * hh[:, 0])
        j11 = (vals[3, 1] - vals[4, 1]) / (2 * hh[:, 1])
        det = j00 * j11 - j01 * j10
        det = np.where(det == 0, 1.0, det)
        dx = (j11 * f0 - j01 * f1) / det
        dy = (j00 * f1 - j10 * f0) / det
        step = np.column_stack([dx, dy])
        step = np.where(np.isfinite(step), step, 0.0)

        cur = res[live].copy()
        znew = zl.copy()
        pending = np.ones(len(zl), dtype=bool)
        for _bt in range(tols.newton_backtracks):
            if not pending.any():
                break
            trial = zl[pending] - step[pending]
            rt = relres_of(trial)
            better = rt < cur[pending]
            idx = np.nonzero(pending)[0]
            znew[idx[better]] = trial[better]
            cur[idx[better]] = rt[better]
            pending[idx[better]] = False
            step[idx[~better]] *= 0.5
        moved = np.abs(znew - zl).max(axis=1)
        z[live] = znew
        res[live] = cur
        frozen[live] |= (cur <= 1e-13) | (
            moved <= 1e-15 * (1.0 + np.abs(znew).max(axis=1))
        )
    ok = res <= RESIDUAL_GATE
    return z, res, ok


def _jacobian_ratio(sym, m, pts, tols):
    """sigma_min/sigma_max of the row-normalized system Jacobian.

    A zero of the two-window system has multiplicity 1 exactly when its
    Jacobian is regular, so this ratio arbitrates whether coincident
    candidate copies mean a genuinely multiple point or an accident of
    the elimination (e.g. a nearly-tangent fiber polynomial at a simple
    point, where one partial vanishes but the Jacobian does not).
    Central differences share one log scale per point, as in the Newton
    polisher.
    """
    z = np.asarray(pts, dtype=complex)
    B = z.shape[0]
    if B == 0:
        return np.empty(0)
    bases = [_window_placements(sym, m, j) for j in (0, 1)]
    hh = 1e-6 * (1.0 + np.abs(z))
    zero = np.zeros(B)
    stencil = [
        z + np.column_stack([hh[:, 0], zero]),
        z - np.column_stack([hh[:, 0], zero]),
        z + np.column_stack([zero, hh[:, 1]]),
        z - np.column_stack([zero, hh[:, 1]]),
    ]
    sgns = np.empty((4, 2, B), dtype=complex)
    las = np.empty((4, 2, B))
    for s, st in enumerate(stencil):
        for j, (base, plc) in enumerate(bases):
            mats = base[None, :, :] - np.tensordot(st, plc, axes=([1], [0]))
            sgns[s, j], las[s, j] = np.linalg.slogdet(mats)
    ref = las.max(axis=(0, 1))
    vals = sgns * np.exp(las - ref[None, None, :])
    jac = np.empty((B, 2, 2), dtype=complex)
    for j in (0, 1):
        jac[:, j, 0] = (vals[0, j] - vals[1, j]) / (2 * hh[:, 0])
        jac[:, j, 1] = (vals[2, j] - vals[3, j]) / (2 * hh[:, 1])
    rowscale = np.abs(jac).max(axis=2, keepdims=True)
    jac = jac / np.where(rowscale > 0, rowscale, 1.0)
    sv = np.linalg.svd(jac, compute_uv=False)
    return sv[:, 1] / np.maximum(sv[:, 0], 1e-300)


def solve_n1(sym, m, tols=DEFAULT_TOLS, max_m=30):
    """Solution set of the two-window system for a band with n = 1.

    Pipeline: (1) eliminate x_1 by a resultant — both window
    determinants are interpolated in x_1 on a circle for every x_0
    sample node, the Sylvester determinant gives resultant samples on a
    Cauchy-bound circle of x_0 values, and an inverse DFT recovers the
    resultant coefficients; (2) root-find the resultant; (3) take the
    union with the finite spectrum of the linearized Sylvester pencil
    (see :func:`_x0_spectrum` for why the union is not redundant); (4)
    back-substitute each distinct x_0 to get x_1 candidates (roots of
    whichever window genuinely depends on x_1 on that fiber), filtered
    by the complementary window; (5) polish every candidate pair with
    damped Newton; (6) cluster into multiplicities.
    """
    if sym.n != 1:
        raise ValueError("solve_n1 requires a symbol with n = 1")
    if m < 1 or m > max_m:
        raise ValueError(f"m must lie in 1..{max_m}")
    rho_top = cauchy_bound(sym)
    defects = []

    rho0 = rho_top
    mono_roots = None
    for _ in range(INTERP_RETRIES):
        try:
            mono_roots = _resultant_roots(sym, m, rho0, tols)
            break
        except (RootFindingError, _InterpolationError) as exc:
            defects.append(
                {
                    "kind": "interpolation_retry",
                    "radius": float(rho0),
                    "error": str(exc),
                }
            )
            rho0 *= RETRY_SHRINK
    if mono_roots is None:
        mono_roots = np.zeros(0, dtype=complex)
        defects.append({"kind": "resultant_failed"})

    try:
        eig_roots = _x0_spectrum(sym, m, tols)
    except np.linalg.LinAlgError as exc:
        eig_roots = np.zeros(0, dtype=complex)
        defects.append({"kind": "spectrum_failed", "error": str(exc)})
    if mono_roots.size == 0 and eig_roots.size == 0:
        raise RuntimeError("x_0 elimination produced no candidates at all")

    reps, copies, run_defects = _backsolve(sym, m, mono_roots, eig_roots, tols)
    defects.extend(run_defects)
    if not reps.shape[0]:
        return EigenLocus(m, [], "tilde", defects)

    # the same point reached from two fibers (e.g. the monomial and the
    # pencil approximation of one x_0 root landing in separate clusters)
    # is one point: take the max per-fiber copy count, never the sum
    clusters = []
    for center, _cnt, members in cluster_points(reps, tols.tol_cluster):
        members = np.asarray(members)
        mult = int(copies[members].max())
        clusters.append((center, mult, members))
    multi = [i for i, (_c, mu, _m) in enumerate(clusters) if mu > 1]
    if multi:
        ratios = _jacobian_ratio(
            sym, m, np.array([clusters[i][0] for i in multi]), tols
        )
        for i, ratio in zip(multi, ratios):
            if ratio > JACOBIAN_GATE:
                center, _mu, members = clusters[i]
                clusters[i] = (center, 1, members)
    points = _certify_points(sym, m, clusters, tols)
    total = sum(p.multiplicity for p in points)
    if total > m * m:
        defects.append(
            {"kind": "bezout_excess", "expected_max": m * m, "got": total}
        )
    return EigenLocus(m, points, "tilde", defects)


def _resultant_roots(sym, m, rho0, tols):
    """Monomial-basis route: interpolate R(x_0) on a circle, root-find."""
    rho1 = cauchy_bound(sym)
    S = 2 * m * m + 2
    x0_nodes = rho0 * np.exp(2j * np.pi * np.arange(S) / S)
    (c0, L0, _), (c1, L1, _) = _fiber_coeffs(sym, m, x0_nodes, rho1, tols)
    d0 = _live_degree(c0)
    d1 = _live_degree(c1)
    if d0 < 0 or d1 < 0:
        raise _InterpolationError("a window determinant vanishes identically")
    if d0 == 0 and d1 == 0:
        raise ValueError(
            "neither window depends on x_1; this is not a two-variable system"
        )
    sign_r, la_r = _resultant_samples(c0, c1, d0, d1)
    lr = la_r + d1 * L0 + d0 * L1
    lstar = np.max(lr)
    if not np.isfinite(lstar):
        raise _InterpolationError("resultant samples all singular")
    y = sign_r * np.exp(lr - lstar)
    beta = np.fft.fft(y) / S
    beta_t, deg = _trimmed_poly(beta)
    if deg < 0:
        raise _InterpolationError("resultant is numerically zero everywhere")
    if deg == 0:
        return np.zeros(0, dtype=complex)
    return rho0 * roots_univariate(beta_t, tols)


def _x0_spectrum(sym, m, tols):
    """x_0 values of the system as eigenvalues of the Sylvester pencil.

    The resultant's magnitude can swing through scores of orders of
    magnitude around any one sampling circle, and monomial coefficients
    in double precision cannot represent roots whose local scale sits
    below that swing — they vanish into a flat noise canyon that no
    choice of radius rescues.  The cure is to never form the resultant:
    the Sylvester matrix is a matrix *polynomial* in x_0 with tame
    entries (the fiber coefficients), so its determinant's roots are
    the finite eigenvalues of the block-companion linearization, and
    the QZ iteration balances scales locally.  Returns the finite
    spectrum inside SPECTRUM_KEEP times the search bound, with copies.
    """
    rho1 = cauchy_bound(sym)
    rho0 = rho1
    S = 2 * m + 4
    x0_nodes = rho0 * np.exp(2j * np.pi * np.arange(S) / S)
    (c0, L0, _), (c1, L1, _) = _fiber_coeffs(sym, m, x0_nodes, rho1, tols)
    d0 = _live_degree(c0)
    d1 = _live_degree(c1)
    if d0 < 1 and d1 < 1:
        return np.zeros(0, dtype=complex)

    # de-normalized fiber coefficients; one overall scale per window is a
    # harmless constant factor on the determinant
    blocks = []
    for c, L, d in ((c0, L0, d0), (c1, L1, d1)):
        Lref = np.max(L)
        vals = c[:, : d + 1] * np.exp(L - Lref)[:, None]
        # x_0-coefficients of every x_1-coefficient, highest x_1 first
        # (Sylvester rows want descending order)
        g = np.fft.fft(vals, axis=0) / S
        blocks.append(g[:, ::-1])
    g0, g1 = blocks

    prof = np.maximum(
        np.abs(g0).max(axis=1) / max(np.abs(g0).max(), 1e-300),
        np.abs(g1).max(axis=1) / max(np.abs(g1).max(), 1e-300),
    )
    live = np.nonzero(prof > COEFF_TRIM)[0]
    T = int(live[-1]) if live.size else 0
    if T == 0:
        return np.zeros(0, dtype=complex)

    q = d0 + d1
    coeff = np.zeros((T + 1, q, q), dtype=complex)
    for t in range(T + 1):
        for r in range(d1):
            coeff[t, r, r : r + d0 + 1] = g0[t]
        for r in range(d0):
            coeff[t, d1 + r, r : r + d1 + 1] = g1[t]

    N = T * q
    lhs = np.zeros((N, N), dtype=complex)
    rhs = np.zeros((N, N), dtype=complex)
    eye = np.eye(q, dtype=complex)
    for b in range(T - 1):
        lhs[b * q : (b + 1) * q, (b + 1) * q : (b + 2) * q] = eye
        rhs[b * q : (b + 1) * q, b * q : (b + 1) * q] = eye
    for t in range(T):
        lhs[(T - 1) * q :, t * q : (t + 1) * q] = -coeff[t]
    rhs[(T - 1) * q :, (T - 1) * q :] = coeff[T]
    w = scipy.linalg.eigvals(lhs, rhs)
    w = w[np.isfinite(w)]
    w = w[np.abs(w) <= SPECTRUM_KEEP]
    return rho0 * w


def _backsolve(sym, m, mono_roots, eig_roots, tols):
    """Fibers over the union of x_0 roots: candidates, polish, count.

    Returns (representatives, per-fiber copy counts, defects): one row
    per distinct polished point per fiber.  A fiber's copy count for a
    point is the number of coincident x_1 roots among candidates whose
    Newton travel stayed local (strays discover points but carry no
    multiplicity), raised to the fiber's x_0-eigenvalue copy count when
    the fiber kept a single distinct point — transversal double points
    show up as coincident eigenvalues, not as repeated x_1 roots.
    """
    rho1 = cauchy_bound(sym)
    empty = (
        np.empty((0, 2), dtype=complex),
        np.zeros(0, dtype=int),
        [],
    )
    defects = []

    # the monomial route resolves roots to ~1e-6 at best (worse in its
    # blind spots) while the pencil route is backward stable; a monomial
    # root close to some pencil root is the same root seen twice, and
    # keeping the blurry copy would seed a duplicate fiber
    if eig_roots.size and mono_roots.size:
        gap = np.abs(mono_roots[:, None] - eig_roots[None, :]).min(axis=1)
        scale = 1.0 + np.abs(mono_roots)
        mono_roots = mono_roots[gap > 1e-3 * scale]

    allx0 = np.concatenate([mono_roots, eig_roots])
    from_eig = np.concatenate(
        [np.zeros(mono_roots.size, bool), np.ones(eig_roots.size, bool)]
    )
    x0_vals = []
    x0_weight = []
    for center, _cnt, members in cluster_points(allx0, tols.tol_cluster):
        x0_vals.append(complex(np.atleast_1d(center)[0]))
        copies = from_eig[np.asarray(members)]
        # the eigenvalue route carries algebraic copy counts; the
        # monomial route may see the same root more or less often
        x0_weight.append(max(1, int(np.count_nonzero(copies))))
    x0_vals = np.array(x0_vals)
    x0_weight = np.array(x0_weight, dtype=int)

    (f0, _l0, z0), (f1, _l1, z1) = _fiber_coeffs(sym, m, x0_vals, rho1, tols)
    groups = {}
    for i in range(x0_vals.size):
        p0, dd0 = _trimmed_poly(f0[i])
        p1, dd1 = _trimmed_poly(f1[i])
        # a fiber where a window vanishes identically (relative to its own
        # matrix scale) cannot pin x_1 from that window
        if z0[i] <= 1e-11:
            dd0 = -1
        if z1[i] <= 1e-11:
            dd1 = -1
        if dd0 >= 1:
            other, poly, dd = 1, p0, dd0
        elif dd1 >= 1:
            other, poly, dd = 0, p1, dd1
        else:
            defects.append(
                {
                    "kind": "degenerate_fiber",
                    "x0": complex(x0_vals[i]),
                    "levels": (float(z0[i]), float(z1[i])),
                }
            )
            continue
        groups.setdefault((other, dd), []).append((i, poly))

    candidates = []
    cand_other = []
    cand_fiber = []
    for (other, dd), items in sorted(groups.items()):
        rows = np.array([poly for _, poly in items])
        try:
            u1 = roots_many(rows, tols)
        except RootFindingError:
            # retry the group one fiber at a time so a single sick row
            # only costs its own fiber
            u1 = np.full((len(items), dd), np.nan, dtype=complex)
            for row, (i, poly) in enumerate(items):
                try:
                    u1[row] = roots_many(poly[None, :], tols)[0]
                except RootFindingError:
                    defects.append(
                        {
                            "kind": "fiber_rootfind_failed",
                            "x0": complex(x0_vals[i]),
                        }
                    )
        for (i, _), urow in zip(items, u1):
            urow = urow[np.isfinite(urow)]
            if urow.size:
                candidates.append(
                    np.column_stack(
                        [np.full(urow.size, x0_vals[i]), rho1 * urow]
                    )
                )
                cand_other.append(np.full(urow.size, other))
                cand_fiber.append(np.full(urow.size, i))

    if not candidates:
        return empty[0], empty[1], defects
    allc = np.vstack(candidates)
    which = np.concatenate(cand_other)
    fiber_of = np.concatenate(cand_fiber)
    rel = _window_relres(sym, m, allc)
    keep = rel[which, np.arange(which.size)] <= BACKSOLVE_FILTER
    if not np.any(keep):
        return empty[0], empty[1], defects
    start = allc[keep]
    fiber_of = fiber_of[keep]

    polished, res, ok = _newton_polish(sym, m, start, tols)
    near = ~ok & (res <= NEAR_MISS)
    for p, r in zip(polished[near], res[near]):
        defects.append(
            {"kind": "newton_stall", "coords": tuple(p), "relres": float(r)}
        )
    n_junk = int(np.sum(~ok & ~near))
    if n_junk:
        defects.append({"kind": "newton_discards", "count": n_junk})
    # candidates that Newton moved beyond the start's own accuracy did
    # find a genuine point, but they are strays (spurious resultant or
    # pencil roots, or the far twin of an accidentally near-double fiber
    # root) — they discover, they do not add multiplicity; genuinely
    # multiple points split their fiber roots only by the noise scale,
    # orders below this gate
    travel = np.linalg.norm(polished - start, axis=1)
    local = travel <= 1e-5 * (1.0 + np.abs(polished).max(axis=1))

    pol_ok = polished[ok]
    fib_ok = fiber_of[ok]
    loc_ok = local[ok]
    if not pol_ok.shape[0]:
        return empty[0], empty[1], defects
    pol_ok = _widom_refine(sym, m, pol_ok, tols)
    reps = []
    copies = []
    for i in np.unique(fib_ok):
        sel = np.nonzero(fib_ok == i)[0]
        sub = cluster_points(pol_ok[sel], tols.tol_cluster)
        for center, _cnt, members in sub:
            members = sel[np.asarray(members)]
            n_local = int(np.count_nonzero(loc_ok[members]))
            cc = max(1, n_local)
            if len(sub) == 1 and n_local:
                cc = max(cc, int(x0_weight[i]))
            reps.append(center)
            copies.append(cc)
    return np.array(reps), np.array(copies, dtype=int), defects


# ---------------------------------------------------------------------------
# rank filter and set comparison
# ---------------------------------------------------------------------------


def rank_filter(sym, m, locus, tols=DEFAULT_TOLS):
    """Keep the points where the full rectangular block drops rank.

    The window system can have solutions with full-rank block (excess
    of the elimination); the locus proper keeps x only when the m x
    (m+n) block has smallest singular value <= tol_rank * largest.
    The filtered total is checked against binom(m+n, n+1); a mismatch
    becomes a defect record on the returned locus.
    """
    kept = []
    for p in locus.points:
        smin, ratio = _rank_gap(sym, m, p.coords)
        if ratio <= tols.tol_rank:
            res = dict(p.residuals)
            res["sigma_min"] = smin
            res["sigma_ratio"] = ratio
            kept.append(LocusPoint(p.coords, p.multiplicity, res))
    defects = list(locus.defects)
    total = sum(p.multiplicity for p in kept)
    want = expected_count(m, sym.n)
    if total != want:
        defects.append({"kind": "count_mismatch", "expected": want, "got": total})
    return EigenLocus(m, kept, "full", defects)


def hausdorff_gap(locus_a, locus_b):
    """Symmetric Hausdorff distance between two loci (coords only)."""
    a = locus_a.coords() if isinstance(locus_a, EigenLocus) else np.atleast_2d(locus_a)
    b = locus_b.coords() if isinstance(locus_b, EigenLocus) else np.atleast_2d(locus_b)
    if a.size == 0 or b.size == 0:
        return float("inf") if a.size != b.size else 0.0
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
