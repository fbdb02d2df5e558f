"""Banded Toeplitz symbols and the equal-modulus root condition.

A band is described by its lower/upper bandwidths ``k``/``h`` and the
complex diagonal values ``c_j`` for ``j`` in ``[-k, h]``.  The first
``n + 1`` upper diagonals (``j = 0..n``) carry the variables ``x_j``, so
each point ``x`` turns the band into an ordinary Laurent symbol whose
numerator is a degree-``h + k`` polynomial

    q(t, x) = sum_j (c_j - x_j [0 <= j <= n]) t^(k + j).

Everything downstream is driven by the moduli of the roots of ``q``: the
set of interest collects the points ``x`` where roots number ``k``
through ``k + n + 1`` (counting from the smallest modulus, 1-based)
share a common modulus.  This module owns the symbol type, the root
sorting, the membership residual, boundary classification, the
conjugate-reversal symmetry test, and a grid scanner that maps the
region in the ``x_0`` plane.
"""

import numpy as np

from .polycore import (
    DEFAULT_TOLS,
    UniPoly,
    discriminant,
    roots_many,
    roots_univariate,
)

__all__ = [
    "AffineMap",
    "AlphaSpectrum",
    "BandSymbol",
    "CRegionScan",
    "alpha_moduli_many",
    "alpha_roots",
    "c_region_scan",
    "c_residual",
    "c_residual_many",
    "cauchy_bound",
    "classify_boundary",
    "in_c",
    "is_multihermitian",
    "normalize",
    "q_poly",
]


class BandSymbol:
    """Immutable band description: bandwidths, diagonal values, slot count.

    Parameters
    ----------
    k, h : positive ints, lower and upper bandwidth.
    c : complex values c_{-k}, ..., c_h in diagonal order (length h+k+1).
    n : number of displaced diagonals minus one; x occupies slots 0..n.
    """

    __slots__ = ("k", "h", "n", "c")

    def __init__(self, k, h, c, n):
        k = int(k)
        h = int(h)
        n = int(n)
        c = np.asarray(c, dtype=complex).copy()
        if k < 1 or h < 1:
            raise ValueError("bandwidths k and h must be positive")
        if c.shape != (h + k + 1,):
            raise ValueError(
                f"need {h + k + 1} diagonal values c_-k..c_h, got {c.shape}"
            )
        if c[0] == 0 or c[-1] == 0:
            raise ValueError("outermost diagonals c_{-k} and c_h must be nonzero")
        if n < 0 or n > h:
            raise ValueError("need 0 <= n <= h")
        c.flags.writeable = False
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("BandSymbol is immutable")

    def coef(self, j):
        """Diagonal value c_j, zero outside the band."""
        if -self.k <= j <= self.h:
            return complex(self.c[j + self.k])
        return 0.0 + 0.0j

    @property
    def degree(self):
        return self.h + self.k

    def __eq__(self, other):
        return (
            isinstance(other, BandSymbol)
            and self.k == other.k
            and self.h == other.h
            and self.n == other.n
            and np.array_equal(self.c, other.c)
        )

    def __hash__(self):
        return hash((self.k, self.h, self.n, bytes(self.c.view(float))))

    def __repr__(self):
        cs = ", ".join(f"c[{j - self.k}]={self.c[j]:g}" for j in range(self.c.size))
        return f"BandSymbol(k={self.k}, h={self.h}, n={self.n}, {cs})"


class AlphaSpectrum:
    """Roots of q(., x) sorted by modulus, ties broken by argument.

    ``gaps[i]`` is the relative modulus gap between roots i and i+1,
    normalized by 1 + |larger root|; all entries are non-negative by
    construction.
    """

    __slots__ = ("roots", "gaps")

    def __init__(self, roots):
        roots = np.asarray(roots, dtype=complex)
        mod = np.abs(roots)
        order = np.lexsort((np.angle(roots), mod))
        roots = roots[order]
        mod = mod[order]
        object.__setattr__(self, "roots", roots)
        object.__setattr__(
            self, "gaps", (mod[1:] - mod[:-1]) / (1.0 + mod[1:])
        )

    def __setattr__(self, name, value):
        raise AttributeError("AlphaSpectrum is immutable")

    @property
    def moduli(self):
        return np.abs(self.roots)

    def __len__(self):
        return self.roots.size

    def __repr__(self):
        return f"AlphaSpectrum({self.roots!r})"


class AffineMap:
    """Change of variables x_original = scale * x_normalized + shift."""

    __slots__ = ("scale", "shift")

    def __init__(self, scale, shift):
        object.__setattr__(self, "scale", complex(scale))
        shift = np.asarray(shift, dtype=complex).copy()
        shift.flags.writeable = False
        object.__setattr__(self, "shift", shift)

    def __setattr__(self, name, value):
        raise AttributeError("AffineMap is immutable")

    def apply(self, x):
        """Map points of the normalized locus back to the original."""
        return self.scale * np.asarray(x, dtype=complex) + self.shift

    def invert(self, x):
        return (np.asarray(x, dtype=complex) - self.shift) / self.scale

    def is_identity(self):
        return self.scale == 1.0 and not np.any(self.shift)

    def __repr__(self):
        return f"AffineMap(scale={self.scale}, shift={list(self.shift)})"


def normalize(sym):
    """Equivalent symbol with c_h = 1 and zeroed variable slots.

    Subtracting c_j from slot j (0 <= j <= n) only renames x_j, and
    dividing every diagonal by c_h rescales the whole matrix, which
    cannot change where the rank drops.  Returns the reduced symbol and
    the AffineMap sending its locus points back to the original's:
    x_original = c_h * x_normalized + (c_0, ..., c_n).
    """
    lam = complex(sym.c[-1])
    shift = sym.c[sym.k : sym.k + sym.n + 1].copy()
    c = sym.c.copy()
    c[sym.k : sym.k + sym.n + 1] = 0.0
    c = c / lam
    return BandSymbol(sym.k, sym.h, c, sym.n), AffineMap(lam, shift)


def q_poly(sym, x):
    """The degree-(h+k) numerator polynomial at the point x."""
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != sym.n + 1:
        raise ValueError(f"x must have {sym.n + 1} coordinates, got {x.size}")
    coeffs = sym.c.copy()
    coeffs[sym.k : sym.k + sym.n + 1] -= x
    return UniPoly(coeffs)


def alpha_roots(sym, x, tols=DEFAULT_TOLS):
    """All h+k roots of q(., x) as a modulus-sorted AlphaSpectrum."""
    q = q_poly(sym, x)
    if q.degree != sym.degree:
        raise ValueError("leading coefficient vanished; band is not tight at x")
    return AlphaSpectrum(roots_univariate(q, tols))


def _q_rows(sym, xs):
    """Coefficient rows of q(., x) for a batch of points xs (B, n+1)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    rows = np.broadcast_to(sym.c, (xs.shape[0], sym.c.size)).copy()
    rows[:, sym.k : sym.k + sym.n + 1] -= xs
    return rows


def alpha_moduli_many(sym, xs, tols=DEFAULT_TOLS, chunk=4096):
    """Sorted root moduli for a batch of points; (B, h+k) float array.

    Only moduli are returned: batch callers (grid scans, samplers)
    consume nothing else, and sorting plain floats row-wise stays cheap
    at six-figure batch sizes.
    """
    rows = _q_rows(sym, xs)
    out = np.empty((rows.shape[0], sym.degree), dtype=float)
    for lo in range(0, rows.shape[0], chunk):
        hi = min(lo + chunk, rows.shape[0])
        out[lo:hi] = np.sort(np.abs(roots_many(rows[lo:hi], tols)), axis=1)
    return out


def c_residual(sym, x, tols=DEFAULT_TOLS):
    """Failure of the equal-modulus chain at x; zero exactly on the set.

    With roots sorted by modulus (1-based), the chain condition ties
    roots k..k+n+1 together; the residual is the largest of the n+1
    consecutive modulus gaps in that window, normalized by
    1 + |alpha_{k+n+1}|.
    """
    mod = alpha_roots(sym, x, tols).moduli
    return _chain_residual(sym, mod[None, :])[0]


def c_residual_many(sym, xs, tols=DEFAULT_TOLS, chunk=4096):
    """Vectorized c_residual over rows of xs."""
    return _chain_residual(sym, alpha_moduli_many(sym, xs, tols, chunk))


def _chain_residual(sym, mod):
    lo = sym.k - 1          # 0-based index of alpha_k
    hi = sym.k + sym.n      # 0-based index of alpha_{k+n+1}
    window = mod[:, lo : hi + 1]
    return np.max(np.diff(window, axis=1), axis=1) / (1.0 + mod[:, hi])


def in_c(sym, x, tols=DEFAULT_TOLS):
    """Membership predicate: c_residual(x) <= tol_c."""
    return bool(c_residual(sym, x, tols) <= tols.tol_c)


def classify_boundary(sym, x, tols=DEFAULT_TOLS):
    """Flags describing how x can sit on the boundary of the region.

    Requires (approximate) membership.  Returns a subset of
    {"double_root", "chain_left", "chain_right"}: a vanishing
    (scale-free) discriminant of q, or the next root modulus
    below/above joining the equal-modulus chain.  An empty set is
    consistent with an interior point.

    The membership gate here is 100x looser than tol_c on purpose: a
    mu-fold root can only be resolved to eps^(1/mu) in doubles, and
    multiple roots are precisely the points this function exists to
    flag.
    """
    q = q_poly(sym, x)
    spec = alpha_roots(sym, x, tols)
    if _chain_residual(sym, spec.moduli[None, :])[0] > 100 * tols.tol_c:
        raise ValueError("classify_boundary requires a point of the set")
    flags = set()
    d = q.degree
    scale = float(np.max(np.abs(q.coeffs))) ** (2 * d - 2)
    if abs(discriminant(q)) <= tols.tol_disc * scale:
        flags.add("double_root")
    mod = spec.moduli
    denom = 1.0 + mod[sym.k + sym.n]
    if sym.k >= 2 and (mod[sym.k - 1] - mod[sym.k - 2]) / denom <= tols.tol_c:
        flags.add("chain_left")
    if sym.k + sym.n + 1 < d and (
        mod[sym.k + sym.n + 1] - mod[sym.k + sym.n]
    ) / denom <= tols.tol_c:
        flags.add("chain_right")
    return flags


def is_multihermitian(sym):
    """Conjugate-reversal symmetry of the diagonal values.

    True iff h - n = k and c_j = conj(c_{n-j}) for every band index j
    outside the variable slots.  The index map j <-> n - j stays inside
    the band exactly when h - n = k, and it pairs the variable slots
    with each other, which is what makes the conjugate-locus symmetry
    possible in the first place.
    """
    if sym.h - sym.n != sym.k:
        return False
    for j in range(-sym.k, sym.h + 1):
        if 0 <= j <= sym.n:
            continue
        if sym.coef(j) != np.conj(sym.coef(sym.n - j)):
            return False
    return True


def cauchy_bound(sym):
    """Loose certified bound on |x_j| over the whole locus.

    1 + sum|c_i| + (h+k) max|c_i|: any larger displacement makes the
    shifted diagonal dominate every root bound that could bring the
    required chain of root moduli together.  Used as a scan box and as
    a sampling radius; never tight.
    """
    a = np.abs(sym.c)
    return float(1.0 + a.sum() + sym.degree * a.max())


class CRegionScan:
    """Result of a rectangular scan of the x_0 plane.

    Fields: ``re_axis``/``im_axis`` (grid lines), ``residuals`` (2-D
    float field, im x re), ``threshold``, ``inside`` (boolean mask),
    ``boundary`` (list of complex polylines tracing the threshold level
    set).
    """

    __slots__ = ("re_axis", "im_axis", "residuals", "threshold", "inside", "boundary")

    def __init__(self, re_axis, im_axis, residuals, threshold, boundary):
        self.re_axis = re_axis
        self.im_axis = im_axis
        self.residuals = residuals
        self.threshold = float(threshold)
        self.inside = residuals <= threshold
        self.boundary = boundary

    def inside_points(self):
        """Complex coordinates of all grid samples inside the region."""
        jj, ii = np.nonzero(self.inside)
        return self.re_axis[ii] + 1j * self.im_axis[jj]


def _march_segments(re_axis, im_axis, field, tau):
    """Threshold level-set segments of a scalar field, cell by cell.

    Classic four-corner lookup with linear interpolation along the
    crossed edges; the two ambiguous saddle cases are split using the
    cell-center average.  Returns a list of complex (start, end) pairs,
    produced in row-major cell order so the output is deterministic.
    """
    below = field <= tau
    segs = []
    ny, nx = field.shape

    def cross(f0, f1, p0, p1):
        t = (tau - f0) / (f1 - f0)
        return p0 + t * (p1 - p0)

    # corner order within a cell: 0=(j,i) 1=(j,i+1) 2=(j+1,i+1) 3=(j+1,i)
    cells = (
        below[:-1, :-1].astype(int)
        | (below[:-1, 1:].astype(int) << 1)
        | (below[1:, 1:].astype(int) << 2)
        | (below[1:, :-1].astype(int) << 3)
    )
    jj, ii = np.nonzero((cells != 0) & (cells != 15))
    for j, i in zip(jj, ii):
        x0, x1 = re_axis[i], re_axis[i + 1]
        y0, y1 = im_axis[j], im_axis[j + 1]
        f = (field[j, i], field[j, i + 1], field[j + 1, i + 1], field[j + 1, i])
        p = (x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1)
        code = cells[j, i]
        # edge e runs from corner e to corner (e+1) % 4
        pts = {}
        for e in range(4):
            a, b = e, (e + 1) % 4
            if (f[a] <= tau) != (f[b] <= tau):
                pts[e] = cross(f[a], f[b], p[a], p[b])
        if code in (5, 10):
            center_below = (sum(f) / 4.0) <= tau
            if code == 5:  # corners 0,2 below
                pairs = [(0, 3), (1, 2)] if center_below else [(0, 1), (2, 3)]
            else:  # corners 1,3 below
                pairs = [(0, 1), (2, 3)] if center_below else [(0, 3), (1, 2)]
            for a, b in pairs:
                segs.append((pts[a], pts[b]))
        else:
            e = sorted(pts)
            if len(e) == 2:
                segs.append((pts[e[0]], pts[e[1]]))
    return segs


def _chain_polylines(segs, snap):
    """Join segments sharing endpoints into polylines, deterministically.

    Endpoints are snapped to a grid of pitch ``snap`` for matching.
    Open chains are emitted first (lexicographically smallest free end
    first), then closed loops; each polyline starts at its smallest
    point and runs in the orientation that makes the second point
    smallest.
    """

    def key(z):
        return (round(z.real / snap), round(z.imag / snap))

    adj = {}
    for idx, (a, b) in enumerate(segs):
        adj.setdefault(key(a), []).append((idx, b, a))
        adj.setdefault(key(b), []).append((idx, a, b))

    used = [False] * len(segs)

    def walk(start_key, start_pt):
        chain = [start_pt]
        cur_key, cur = start_key, start_pt
        while True:
            nxt = None
            for idx, other, here in adj[cur_key]:
                if not used[idx]:
                    nxt = (idx, other)
                    break
            if nxt is None:
                break
            used[nxt[0]] = True
            chain.append(nxt[1])
            cur = nxt[1]
            cur_key = key(cur)
        return np.array(chain)

    deg = {kk: sum(1 for _ in v) for kk, v in adj.items()}
    ends = sorted(
        (kk for kk, d in deg.items() if d % 2 == 1),
        key=lambda kk: (kk[0], kk[1]),
    )
    lines = []
    for kk in ends:
        for idx, other, here in adj[kk]:
            if not used[idx]:
                lines.append(walk(kk, here))
    remaining = sorted(
        (key(a), a) for idx, (a, b) in enumerate(segs) if not used[idx]
    )
    for kk, pt in remaining:
        cand = [i for i, other, here in adj[kk] if not used[i]]
        if cand:
            lines.append(walk(kk, pt))
    return [ln for ln in lines if ln.size > 1]


def c_region_scan(
    sym,
    re_range,
    im_range,
    resolution=201,
    use_conj_symmetry=None,
    tols=DEFAULT_TOLS,
):
    """Map the region in the x_0 plane on a rectangular grid.

    For n = 0 the scan point is x = (x_0,).  For n = 1 the second slot
    is filled with conj(x_0), which requires the conjugate-reversal
    symmetry of the band (that pairing is exactly the symmetry class
    whose locus closes up under x_1 = conj(x_0)).  Returns a CRegionScan
    with the residual field and the tol_c level-set polylines.

    Raises ValueError when no grid sample lands inside the region: the
    grid is too coarse (or the rectangle misses the region entirely).
    """
    if sym.n not in (0, 1):
        raise ValueError("grid scan supports n = 0 and n = 1 only")
    if sym.n == 1:
        if use_conj_symmetry is None:
            use_conj_symmetry = is_multihermitian(sym)
        if not use_conj_symmetry or not is_multihermitian(sym):
            raise ValueError(
                "n = 1 scan needs the conjugate-reversal symmetry to pin x_1"
            )
    re_axis = np.linspace(re_range[0], re_range[1], resolution)
    im_axis = np.linspace(im_range[0], im_range[1], resolution)
    xg, yg = np.meshgrid(re_axis, im_axis)
    pts = (xg + 1j * yg).ravel()
    if sym.n == 0:
        xs = pts[:, None]
    else:
        xs = np.column_stack([pts, np.conj(pts)])
    res = c_residual_many(sym, xs, tols).reshape(resolution, resolution)
    if not np.any(res <= tols.tol_c):
        raise ValueError(
            "no grid sample is inside the region; refine the grid or move the box"
        )
    segs = _march_segments(re_axis, im_axis, res, tols.tol_c)
    snap = 1e-9 * max(
        re_axis[-1] - re_axis[0], im_axis[-1] - im_axis[0], 1.0
    )
    boundary = _chain_polylines(segs, snap)
    return CRegionScan(re_axis, im_axis, res, tols.tol_c, boundary)
