"""Symbolic minors of the leading block and their basis structure.

For a band with variables x_0..x_n, the first m rows of the matrix see
only the first m + n columns.  Choosing m of those columns (an index
set I) gives an m x m submatrix whose determinant is a polynomial
P^I(x) of total degree exactly m.  The family of all binom(m+n, m)
such determinants is triangular with respect to the pairing

    I = (i_1 < ... < i_m)   <->   monomial  prod_j x_{i_j - j}

(0-based variable subscripts), which makes it a linear basis of the
degree-<=-m polynomials and turns "all minors vanish" into a usable
finite rank test.  Everything here is built in exact division-free
arithmetic: the degree-m coefficients are signed sums of products of
ones, so the triangularity pattern comes out as literal 0.0 / 1.0
entries rather than tiny floats.
"""

from itertools import combinations

import numpy as np

from .band_symbol import BandSymbol
from .polycore import DEFAULT_TOLS, MultiPoly

__all__ = [
    "MinorBasis",
    "build_basis",
    "build_minor",
    "eigenlocus_bruteforce",
    "index_sets",
    "leading_monomial_exponents",
    "triangularity_report",
    "BASIS_SIZE_BUDGET",
]

# beyond this the subset DP and the term counts stop being interactive
BASIS_SIZE_BUDGET = 14


def index_sets(m, n):
    """All strictly increasing m-tuples from 1..m+n, ascending lex."""
    return list(combinations(range(1, m + n + 1), m))


def leading_monomial_exponents(I, n):
    """Exponent vector of the leading monomial prod_j x_{i_j - j}."""
    e = [0] * (n + 1)
    for j, i in enumerate(I, start=1):
        e[i - j] += 1
    return tuple(e)


def _check_index_set(I, m, n):
    I = tuple(int(i) for i in I)
    if len(I) != m:
        raise ValueError(f"index set must have {m} entries, got {len(I)}")
    if any(b <= a for a, b in zip(I, I[1:])):
        raise ValueError("index set must be strictly increasing")
    if I[0] < 1 or I[-1] > m + n:
        raise ValueError(f"index entries must lie in 1..{m + n}")
    return I


def _coerce_block(source, m):
    """Constant part of the m x (m+n) leading block, plus n.

    Accepts a BandSymbol (Toeplitz constants c_{col-row}) or an explicit
    complex matrix with at least m rows; in the latter case n is read
    off the shape.
    """
    if isinstance(source, BandSymbol):
        n = source.n
        block = np.zeros((m, m + n), dtype=complex)
        for r in range(m):
            for c in range(m + n):
                block[r, c] = source.coef(c - r)
        return block, n
    block = np.asarray(source, dtype=complex)
    if block.ndim != 2 or block.shape[0] < m or block.shape[1] < m:
        raise ValueError("explicit block must be a matrix with at least m rows")
    n = block.shape[1] - m
    return block[:m].copy(), n


def _entry(block, n, r, c):
    """Matrix entry as sparse (slot, coef) terms: slot None is the constant,
    slot s bumps the exponent of x_s.  Kept in this raw form because the
    determinant DP below works on plain dicts for speed."""
    terms = []
    if block[r, c] != 0:
        terms.append((None, complex(block[r, c])))
    s = c - r
    if 0 <= s <= n:
        terms.append((s, -1.0 + 0.0j))
    return terms


def build_minor(source, m, I):
    """det of rows 1..m, columns I, as an exact MultiPoly of degree m.

    Division-free expansion: columns of I are consumed left to right
    while a dict keyed by used-row bitmasks carries the partial
    determinants (a memoized Laplace expansion).  No polynomial
    division ever happens, so coefficients that are integer
    combinations stay exact.
    """
    block, n = _coerce_block(source, m)
    I = _check_index_set(I, m, n)
    return _minor_from_entries(
        [[_entry(block, n, r, i - 1) for r in range(m)] for i in I],
        m,
        n,
    )


def _minor_from_entries(cols, m, n):
    # memoized Laplace expansion: masks of used rows carry the partial
    # determinants as raw exponent-dict polynomials (MultiPoly wrapping
    # is deferred to the end; its per-term validation dominates otherwise)
    nv = n + 1
    state = {0: {(0,) * nv: 1.0 + 0.0j}}
    for col in cols:
        nxt = {}
        for mask, poly in state.items():
            for r in range(m):
                bit = 1 << r
                if mask & bit:
                    continue
                # parity of rows already used above r = inversions added
                sgn = -1.0 if (bin(mask >> (r + 1)).count("1") & 1) else 1.0
                ent = col[r]
                if not ent:
                    continue
                acc = nxt.setdefault(mask | bit, {})
                for expo, coef in poly.items():
                    for s, dcoef in ent:
                        c2 = sgn * dcoef * coef
                        if s is None:
                            e2 = expo
                        else:
                            e2 = expo[:s] + (expo[s] + 1,) + expo[s + 1 :]
                        acc[e2] = acc.get(e2, 0.0) + c2
        state = nxt
    out = MultiPoly(nv, state.get((1 << m) - 1, {}))
    if out.degree() != m:
        raise AssertionError("minor degree must equal m; bad block or index set")
    return out


class MinorBasis:
    """All minors of the leading block at a fixed m, keyed by index set."""

    __slots__ = ("m", "n", "entries")

    def __init__(self, m, n, entries):
        self.m = m
        self.n = n
        self.entries = dict(entries)
        want = len(index_sets(m, n))
        if len(self.entries) != want:
            raise ValueError(f"basis needs {want} minors, got {len(self.entries)}")

    def __getitem__(self, I):
        return self.entries[tuple(I)]

    def __iter__(self):
        return iter(sorted(self.entries))

    def __len__(self):
        return len(self.entries)

    def evaluate_all(self, x):
        """Values of every minor at x, in ascending-lex index-set order."""
        return np.array([self.entries[I].evaluate(x) for I in self])

    def scale_at(self, x):
        """Largest coefficient-mass bound max_I sum |coef| |x|^e."""
        return max(self.entries[I].evaluate_abs(x) for I in self)


def build_basis(source, m):
    """MinorBasis of all binom(m+n, m) minors at order m."""
    block, n = _coerce_block(source, m)
    if m + n > BASIS_SIZE_BUDGET:
        raise ValueError(
            f"m + n = {m + n} exceeds the symbolic budget {BASIS_SIZE_BUDGET}"
        )
    entries = {}
    cache_cols = {
        c: [_entry(block, n, r, c) for r in range(m)] for c in range(m + n)
    }
    for I in index_sets(m, n):
        entries[I] = _minor_from_entries([cache_cols[i - 1] for i in I], m, n)
    return MinorBasis(m, n, entries)


class TriangularityReport:
    """Leading-coefficient matrix and the structural verdict.

    rows: index sets ascending lex; columns: degree-m exponent vectors
    descending lex; matrix holds the (-1)^m-normalized coefficients of
    the leading homogeneous parts.  ``ok`` requires an exactly-unit
    diagonal and exact zeros above it.
    """

    __slots__ = ("index_sets", "monomials", "matrix", "unit_diagonal", "lower_triangular")

    def __init__(self, index_sets_, monomials, matrix):
        self.index_sets = index_sets_
        self.monomials = monomials
        self.matrix = matrix
        d = np.diagonal(matrix)
        self.unit_diagonal = bool(np.all(d == 1.0))
        above = np.triu(matrix, k=1)
        self.lower_triangular = bool(np.all(above == 0.0))

    @property
    def ok(self):
        return self.unit_diagonal and self.lower_triangular

    def __repr__(self):
        return (
            f"TriangularityReport(size={self.matrix.shape[0]}, "
            f"unit_diagonal={self.unit_diagonal}, "
            f"lower_triangular={self.lower_triangular})"
        )


def triangularity_report(basis):
    """Check the basis pairing I <-> prod x_{i_j - j} is unitriangular."""
    sets = sorted(basis.entries)
    monos = sorted(
        {leading_monomial_exponents(I, basis.n) for I in sets}, reverse=True
    )
    if len(monos) != len(sets):
        raise AssertionError("leading monomials are not distinct across index sets")
    col_of = {e: j for j, e in enumerate(monos)}
    sign = (-1.0) ** basis.m
    mat = np.zeros((len(sets), len(sets)), dtype=complex)
    for i, I in enumerate(sets):
        lead = basis.entries[I].leading_homogeneous_part()
        for expo, coef in lead.terms.items():
            mat[i, col_of[expo]] = sign * coef
    return TriangularityReport(sets, monos, mat)


def eigenlocus_bruteforce(source, m, candidates, tols=DEFAULT_TOLS):
    """Filter candidate points through *every* minor simultaneously.

    A point stays only if each P^I vanishes to tol_eval relative to the
    coefficient mass of the basis at that point.  This is the expensive
    exactness oracle used to validate the production solver at small m.
    Returns the kept points (original order preserved).
    """
    basis = source if isinstance(source, MinorBasis) else build_basis(source, m)
    pts = np.atleast_2d(np.asarray(candidates, dtype=complex))
    if pts.shape[1] != basis.n + 1:
        raise ValueError(f"candidates must have {basis.n + 1} coordinates")
    kept = []
    for x in pts:
        worst = max(abs(v) for v in basis.evaluate_all(x))
        if worst <= tols.tol_eval * max(basis.scale_at(x), 1.0):
            kept.append(x)
    return np.array(kept) if kept else np.empty((0, basis.n + 1), dtype=complex)
