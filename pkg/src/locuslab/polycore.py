"""Polynomial kernels shared by the whole package.

Sparse multivariate polynomials over complex coefficients (lexicographic
variable order ``x_0 > x_1 > ...``), dense univariate polynomials, a
simultaneous-iteration root finder, elementary symmetric functions, and
Sylvester resultants.  All numeric knobs live in one explicit
:class:`Tolerances` record; nothing reads hidden module globals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLS",
    "MultiPoly",
    "UniPoly",
    "RootFindingError",
    "roots_univariate",
    "roots_many",
    "cluster_points",
    "elementary_symmetric",
    "resultant_univariate",
    "discriminant",
]


@dataclass(frozen=True)
class Tolerances:
    """Shared numeric configuration, passed explicitly to every consumer.

    Attributes
    ----------
    tol_cluster : relative threshold merging nearby roots / locus points.
    tol_c : root-modulus coincidence tolerance for limit-region membership.
    tol_disc : relative discriminant residual flagging double roots.
    tol_eval : relative evaluation threshold for symbolic minor filtering.
    tol_rank : singular value ratio below which a pencil counts as rank
        deficient.
    tol_sep : relative pairwise root separation required by the product
        formula for window determinants.
    root_maxiter : iteration budget of the simultaneous root finder.
    newton_maxiter / newton_backtracks : damped Newton polish budgets.
    seed : base seed for every randomized ingredient (start-point jitter,
        rejection sampling); identical seeds give identical runs.
    """

    tol_cluster: float = 1e-7
    tol_c: float = 1e-6
    tol_disc: float = 1e-8
    tol_eval: float = 1e-7
    tol_rank: float = 1e-7
    tol_sep: float = 1e-6
    root_maxiter: int = 160
    newton_maxiter: int = 40
    newton_backtracks: int = 20
    seed: int = 42


DEFAULT_TOLS = Tolerances()


class RootFindingError(RuntimeError):
    """Raised when the simultaneous iteration fails to converge.

    Carries the worst relative backward errors so callers can report the
    failure instead of silently truncating root lists.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


# ---------------------------------------------------------------------------
# sparse multivariate polynomials
# ---------------------------------------------------------------------------


class MultiPoly:
    """Sparse polynomial in ``x_0 .. x_{num_vars-1}`` with complex coefficients.

    ``terms`` maps exponent tuples to coefficients; exact-zero coefficients
    are never stored.  The monomial order used by everything downstream is
    lexicographic with ``x_0 > x_1 > ...``.
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars, terms=None):
        if num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        self.num_vars = int(num_vars)
        clean = {}
        for expo, coef in (terms or {}).items():
            if len(expo) != self.num_vars:
                raise ValueError(
                    f"exponent tuple {expo} does not match num_vars={num_vars}"
                )
            if any(e < 0 for e in expo):
                raise ValueError(f"negative exponent in {expo}")
            c = complex(coef)
            if c != 0:
                clean[tuple(int(e) for e in expo)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, num_vars):
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars, value):
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars, index):
        if not 0 <= index < num_vars:
            raise ValueError(f"variable index {index} out of range")
        expo = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls(num_vars, {expo: 1.0})

    # -- ring operations ----------------------------------------------------

    def _check_peer(self, other):
        if self.num_vars != other.num_vars:
            raise ValueError("operands live in different variable counts")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = MultiPoly.constant(self.num_vars, other)
        self._check_peer(other)
        terms = dict(self.terms)
        for expo, coef in other.terms.items():
            s = terms.get(expo, 0.0) + coef
            if s == 0:
                terms.pop(expo, None)
            else:
                terms[expo] = s
        return MultiPoly(self.num_vars, terms)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return MultiPoly(
            self.num_vars, {e: -c for e, c in self.terms.items()}
        )

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = MultiPoly.constant(self.num_vars, other)
        return self.__add__(other.__neg__())

    def scale(self, factor):
        f = complex(factor)
        if f == 0:
            return MultiPoly.zero(self.num_vars)
        return MultiPoly(
            self.num_vars, {e: f * c for e, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        self._check_peer(other)
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                expo = tuple(a + b for a, b in zip(ea, eb))
                s = out.get(expo, 0.0) + ca * cb
                if s == 0:
                    out.pop(expo, None)
                else:
                    out[expo] = s
        return MultiPoly(self.num_vars, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    # -- queries ------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; raises on the zero polynomial."""
        if not self.terms:
            raise ValueError("degree of the zero polynomial is undefined")
        return max(sum(e) for e in self.terms)

    def leading_homogeneous_part(self):
        """Terms of maximal total degree (idempotent, degree preserving)."""
        d = self.degree()
        return MultiPoly(
            self.num_vars,
            {e: c for e, c in self.terms.items() if sum(e) == d},
        )

    def coefficient(self, expo):
        return self.terms.get(tuple(expo), 0.0 + 0.0j)

    def evaluate(self, point):
        point = np.asarray(point, dtype=complex)
        if point.shape != (self.num_vars,):
            raise ValueError("point dimension mismatch")
        total = 0.0 + 0.0j
        for expo, coef in self.terms.items():
            v = coef
            for x, e in zip(point, expo):
                if e:
                    v *= x**e
            total += v
        return total

    def evaluate_abs(self, point):
        """Sum of term magnitudes at ``|point|``; a scale for residuals."""
        point = np.abs(np.asarray(point, dtype=complex))
        total = 0.0
        for expo, coef in self.terms.items():
            v = abs(coef)
            for x, e in zip(point, expo):
                if e:
                    v *= x**e
            total += v
        return total

    def sorted_terms(self):
        """Terms in descending lexicographic monomial order."""
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for expo, coef in self.sorted_terms():
            mono = "*".join(
                f"x{i}^{e}" if e > 1 else f"x{i}"
                for i, e in enumerate(expo)
                if e
            )
            bits.append(f"({coef:g}){'*' + mono if mono else ''}")
        return "MultiPoly(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# dense univariate polynomials
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``t**i``.

    Trailing exact zeros are trimmed on construction; the zero polynomial
    is stored as the single coefficient ``0``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
        nz = np.nonzero(arr)[0]
        if nz.size == 0:
            arr = np.zeros(1, dtype=complex)
        else:
            arr = arr[: nz[-1] + 1]
        self.coeffs = arr

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        # balanced pairwise products; a sequential left-to-right build lets
        # intermediate coefficients blow up and buries the small ones in
        # rounding noise when moduli are sorted
        rs = np.asarray(roots, dtype=complex).ravel()
        factors = [np.array([-r, 1.0], dtype=complex) for r in rs]
        if not factors:
            return cls([complex(leading)])
        while len(factors) > 1:
            factors = [
                np.convolve(factors[i], factors[i + 1])
                if i + 1 < len(factors)
                else factors[i]
                for i in range(0, len(factors), 2)
            ]
        return cls(complex(leading) * factors[0])

    def is_zero(self):
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    @property
    def degree(self):
        return self.coeffs.size - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros_like(t)
        for c in self.coeffs[::-1]:
            out = out * t + c
        return out if out.shape else complex(out)

    def derivative(self):
        if self.degree == 0:
            return UniPoly([0.0])
        k = np.arange(1, self.coeffs.size)
        return UniPoly(self.coeffs[1:] * k)

    def monic(self):
        return UniPoly(self.coeffs / self.coeffs[-1])

    def trimmed(self, rel_tol):
        """Drop leading coefficients below ``rel_tol * max|coeff|``."""
        mx = np.max(np.abs(self.coeffs))
        if mx == 0:
            return UniPoly([0.0])
        keep = np.nonzero(np.abs(self.coeffs) > rel_tol * mx)[0]
        return UniPoly(self.coeffs[: keep[-1] + 1])

    def __repr__(self):
        return f"UniPoly(degree={self.degree})"


# ---------------------------------------------------------------------------
# simultaneous root finding (Aberth-Ehrlich with Newton polish)
# ---------------------------------------------------------------------------


def _horner_pair(coeff_rows, z):
    """Row-wise Horner for p and p' at z; coeff_rows (B, d+1), z (B, d)."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for i in range(coeff_rows.shape[1] - 1, -1, -1):
        dp = dp * z + p
        p = p * z + coeff_rows[:, i][:, None]
    return p, dp


def _scale_at(coeff_rows, az):
    """Backward-error scale sum_i |a_i| |z|^i for |z| = az (same shapes)."""
    s = np.zeros(az.shape, dtype=float)
    for i in range(coeff_rows.shape[1] - 1, -1, -1):
        s = s * az + np.abs(coeff_rows[:, i])[:, None]
    return s


def _newton_ratio(rows, rows_rev, z):
    """Stable (w, resid) with w = p(z)/p'(z) and resid = |p| / scale.

    Points with |z| <= 1 use plain Horner; points outside evaluate the
    reversed polynomial at 1/z, which keeps high degrees inside floating
    range:  p(z) = z^d q(1/z)  and  p'(z) = z^(d-1) (d q(u) - u q'(u)).
    Non-finite intermediates degrade to w = 0 for that point (the caller's
    residual gate decides whether that is acceptable).
    """
    d = rows.shape[1] - 1
    inside = np.abs(z) <= 1.0
    zi = np.where(inside, z, 0.0)
    p_in, dp_in = _horner_pair(rows, zi)
    res_in = np.abs(p_in) / np.maximum(_scale_at(rows, np.abs(zi)), 1e-300)
    dp_safe = np.where(dp_in == 0, 1.0, dp_in)
    w_in = np.where(dp_in == 0, 0.0, p_in / dp_safe)

    u = np.where(inside, 0.0, 1.0 / np.where(z == 0, 1.0, z))
    q, dq = _horner_pair(rows_rev, u)
    res_out = np.abs(q) / np.maximum(_scale_at(rows_rev, np.abs(u)), 1e-300)
    denom = d * q - u * dq
    denom_safe = np.where(denom == 0, 1.0, denom)
    w_out = np.where(denom == 0, 0.0, z * q / denom_safe)

    w = np.where(inside, w_in, w_out)
    resid = np.where(inside, res_in, res_out)
    w = np.where(np.isfinite(w), w, 0.0)
    return w, resid


def _hull_start(row):
    """Start points from the upper convex hull of (i, log|a_i|).

    Each hull edge (a, b) contributes b - a points on the circle of radius
    |coef_a / coef_b|^(1/(b-a)), which tracks the moduli of the root groups
    far better than a single bounding circle when the degree is large.
    """
    d = row.size - 1
    ys = np.log(np.maximum(np.abs(row), 1e-300))
    hull = [0]
    for i in range(1, d + 1):
        while len(hull) >= 2:
            i1, i2 = hull[-2], hull[-1]
            if (i2 - i1) * (ys[i] - ys[i1]) >= (ys[i2] - ys[i1]) * (i - i1):
                hull.pop()
            else:
                break
        hull.append(i)
    z0 = np.empty(d, dtype=complex)
    for q, (a, b) in enumerate(zip(hull[:-1], hull[1:])):
        g = b - a
        r = np.exp((ys[a] - ys[b]) / g)
        ang = 2 * np.pi * (np.arange(g) + 0.35) / g + 0.61 * q
        z0[a:b] = r * np.exp(1j * ang)
    return z0


def _pair_conjugates(roots, rel_tol=1e-11):
    """Symmetrize the root multiset of a real polynomial.

    Greedily pairs each root with the nearest conjugate partner and
    replaces the pair by an exactly conjugate pair (their symmetrized
    mean); near-real leftovers are snapped onto the axis.  Returns the
    input unchanged when a consistent pairing does not exist.
    """
    d = roots.size
    scale = 1.0 + np.max(np.abs(roots)) if d else 1.0
    tol = rel_tol * scale
    used = np.zeros(d, dtype=bool)
    out = roots.copy()
    idx = np.lexsort((roots.imag, roots.real))
    for i in idx:
        if used[i]:
            continue
        target = np.conj(roots[i])
        cand = np.where(~used)[0]
        j = cand[np.argmin(np.abs(roots[cand] - target))]
        if abs(roots[j] - target) > 2 * tol:
            return roots
        used[i] = used[j] = True
        if i == j:
            out[i] = roots[i].real
        else:
            w = 0.5 * (roots[i] + np.conj(roots[j]))
            out[i], out[j] = w, np.conj(w)
    return out


def roots_many(coeff_rows, tols=DEFAULT_TOLS):
    """All roots of a batch of same-degree polynomials.

    Parameters
    ----------
    coeff_rows : (B, d+1) complex array, ascending coefficients, nonzero
        leading column.
    tols : Tolerances.

    Returns a (B, d) complex array.  Simultaneous (Ehrlich-style) updates
    from a deterministically jittered circle start, finished with a few
    Newton steps; rows with real coefficients get exactly conjugate-paired
    output.  Raises :class:`RootFindingError` when some row fails both the
    step-size and relative backward-error criteria within the budget.
    """
    rows = np.atleast_2d(np.asarray(coeff_rows, dtype=complex))
    B, width = rows.shape
    d = width - 1
    if d < 1:
        raise ValueError("degree must be at least 1")
    lead = rows[:, -1]
    if np.any(lead == 0):
        raise ValueError("leading coefficient must be nonzero in every row")
    rows = rows / lead[:, None]
    rows_rev = rows[:, ::-1].copy()

    # start points: small degrees get one jittered bounding circle per row
    # (vectorized; batches here can be huge); large degrees get per-group
    # radii from the coefficient hull, or the single circle never reaches
    # the inner roots within the iteration budget
    rng = np.random.default_rng(tols.seed + 7919 * d)
    jitter = rng.uniform(-0.5, 0.5, size=(B, d)) * (np.pi / (2 * d))
    if d <= 32:
        radius = 1.0 + np.max(np.abs(rows[:, :-1]), axis=1)
        ang = 2 * np.pi * (np.arange(d)[None, :] + 0.35) / d + jitter
        z = radius[:, None] * np.exp(1j * ang)
    else:
        z = np.stack([_hull_start(rows[b]) for b in range(B)])
        z = z * np.exp(1j * jitter)

    eps = np.finfo(float).eps
    frozen = np.zeros((B, d), dtype=bool)
    for _ in range(tols.root_maxiter):
        w_nr, resid = _newton_ratio(rows, rows_rev, z)
        small = resid <= 8 * eps
        w_nr = np.where(small, 0.0, w_nr)
        diff = z[:, :, None] - z[:, None, :]
        np.einsum("bii->bi", diff)[:] = 1.0
        s_sum = np.sum(1.0 / diff, axis=2) - 1.0
        denom = 1.0 - w_nr * s_sum
        denom = np.where(denom == 0, 1.0, denom)
        step = np.where(frozen, 0.0, w_nr / denom)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        frozen |= small | (np.abs(step) <= 1e-14 * (1.0 + np.abs(z)))
        if frozen.all():
            break

    # guarded Newton polish: keep a step only where it lowers the
    # backward error, so noisy coefficient landscapes cannot throw an
    # already-converged point away
    w_nr, resid = _newton_ratio(rows, rows_rev, z)
    for _ in range(3):
        z_try = z - w_nr
        w_try, resid_try = _newton_ratio(rows, rows_rev, z_try)
        better = resid_try < resid
        z = np.where(better, z_try, z)
        w_nr = np.where(better, w_try, 0.0)
        resid = np.where(better, resid_try, resid)

    tol_final = max(1e-11, 200 * d * eps)
    if np.any(resid > tol_final):
        raise RootFindingError(
            f"simultaneous iteration left {int(np.sum(resid > tol_final))} "
            f"of {B * d} roots above backward error {tol_final:.1e} "
            f"(worst {float(np.max(resid)):.3e})",
            residuals=resid,
        )

    real_rows = np.all(np.abs(rows.imag) == 0.0, axis=1)
    for b in np.where(real_rows)[0]:
        z[b] = _pair_conjugates(z[b])
    return z


def roots_univariate(p, tols=DEFAULT_TOLS):
    """Roots (with multiplicity, as a flat array) of one polynomial.

    Accepts a :class:`UniPoly` or an ascending coefficient sequence.
    Exact zero constant terms are deflated into roots at the origin before
    iterating.
    """
    if not isinstance(p, UniPoly):
        p = UniPoly(p)
    if p.is_zero():
        raise ValueError("the zero polynomial has no well-defined roots")
    if p.degree == 0:
        return np.zeros(0, dtype=complex)
    coeffs = p.coeffs
    n_origin = 0
    while coeffs[0] == 0:
        coeffs = coeffs[1:]
        n_origin += 1
    if coeffs.size == 1:
        return np.zeros(n_origin, dtype=complex)
    found = roots_many(coeffs[None, :], tols)[0]
    if n_origin:
        found = np.concatenate([np.zeros(n_origin, dtype=complex), found])
    return _sorted_roots(found)


def _sorted_roots(roots):
    order = np.lexsort((np.angle(roots), np.round(np.abs(roots), 14)))
    return roots[order]


def cluster_points(points, tol_cluster):
    """Greedy union of points within ``tol_cluster * (1 + max|coord|)``.

    ``points`` is (N, dim) complex (or (N,) treated as dim 1).  Returns a
    list of ``(center, count, member_indices)`` sorted deterministically by
    center coordinates.  Distance is the Euclidean norm over all complex
    coordinates.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if n == 0:
        return []
    scale = 1.0 + float(np.max(np.abs(pts)))
    thr = tol_cluster * scale
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    # Pairwise distances in row blocks so memory stays O(block * n) even for
    # tens of thousands of candidate points.
    block = max(1, min(n, 8_000_000 // max(n, 1) + 1))
    thr2 = thr * thr
    for start in range(0, n, block):
        stop = min(n, start + block)
        d2 = np.zeros((stop - start, n))
        for axis in range(pts.shape[1]):
            diff = pts[start:stop, axis, None] - pts[None, :, axis]
            d2 += diff.real**2 + diff.imag**2
        rows, cols = np.nonzero(d2 <= thr2)
        for i, j in zip(rows + start, cols):
            if j <= i:
                continue
            ri, rj = find(int(i)), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        center = pts[members].mean(axis=0)
        out.append((center, len(members), sorted(members)))
    out.sort(key=lambda g: tuple((c.real, c.imag) for c in g[0]))
    return out


# ---------------------------------------------------------------------------
# elementary symmetric functions and resultants
# ---------------------------------------------------------------------------


def elementary_symmetric(values, j):
    """e_j of the given values via the stable triangle recurrence."""
    vals = np.asarray(values, dtype=complex).ravel()
    n = vals.size
    if j < 0 or j > n:
        raise ValueError(f"e_{j} undefined for {n} values")
    e = np.zeros(j + 1, dtype=complex)
    e[0] = 1.0
    for v in vals:
        top = min(j, n)
        for i in range(top, 0, -1):
            e[i] = e[i] + v * e[i - 1]
    return complex(e[j])


def sylvester_matrix(p, q):
    """Sylvester matrix of two nonzero polynomials (descending rows)."""
    if not isinstance(p, UniPoly):
        p = UniPoly(p)
    if not isinstance(q, UniPoly):
        q = UniPoly(q)
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    dp, dq = p.degree, q.degree
    size = dp + dq
    mat = np.zeros((size, size), dtype=complex)
    pc = p.coeffs[::-1]
    qc = q.coeffs[::-1]
    for r in range(dq):
        mat[r, r : r + dp + 1] = pc
    for r in range(dp):
        mat[dq + r, r : r + dq + 1] = qc
    return mat


def resultant_univariate(p, q):
    """Sylvester-determinant resultant (pivoted elimination).

    Convention: ``Res(p, q) = lc(p)^deg(q) * lc(q)^deg(p) * prod (a_i - b_j)``
    over roots ``a_i`` of ``p`` and ``b_j`` of ``q``.  Degree-zero inputs
    follow the same convention (``Res(a, q) = a^deg(q)``; two constants
    give 1).
    """
    if not isinstance(p, UniPoly):
        p = UniPoly(p)
    if not isinstance(q, UniPoly):
        q = UniPoly(q)
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    if p.degree == 0 and q.degree == 0:
        return 1.0 + 0.0j
    if p.degree == 0:
        return complex(p.coeffs[0] ** q.degree)
    if q.degree == 0:
        return complex(q.coeffs[0] ** p.degree)
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant(p):
    """``(-1)^(d(d-1)/2) Res(p, p') / lc(p)`` for degree ``d >= 1``."""
    if not isinstance(p, UniPoly):
        p = UniPoly(p)
    d = p.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1.0 + 0.0j
    sign = -1.0 if (d * (d - 1) // 2) % 2 else 1.0
    return complex(
        sign * resultant_univariate(p, p.derivative()) / p.coeffs[-1]
    )
