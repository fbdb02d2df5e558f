"""The multivariate-Chebyshev band family and its star-shaped regions.

The band with c_{-1} = c_{n+1} = 1 (zeros between) is the one case
whose finite loci are known exactly: every point is the image of a
torus angle tuple under an elementary-symmetric map, so solver output
can be checked against closed-form geometry.  The d-indexed "star"
family (c_{-d} = c_{d+1} = 1, n = 1) generalizes the n = 1 member; its
limit region in the x_0 plane is bounded by a hypocycloid with 2d+1
cusps.

Two boundary parametrizations are deliberately kept side by side.
`hypocycloid` is a verbatim transcription of a published closed form
(with its reference values pinned in tests); `star_boundary` is the
curve that actually passes through the cusps of the scanned region and
is what the containment checks and figures use.  They disagree — the
transcription draws 2d+3 cusps and the wrong orientation — and keeping
both makes the discrepancy visible instead of silently patching it.
"""

import math
from itertools import product

import numpy as np

from .band_symbol import BandSymbol, alpha_roots
from .locus_solver import _rank_gap, _window_relres, expected_count
from .polycore import DEFAULT_TOLS, cluster_points, elementary_symmetric

__all__ = [
    "cheb_lattice_candidates",
    "cheb_membership_check",
    "cheb_point",
    "chebyshev_symbol",
    "hypocycloid",
    "hypocycloid_curve",
    "star_boundary",
    "star_curve",
    "star_symbol",
]


def chebyshev_symbol(n):
    """The band c_{-1} = c_{n+1} = 1 with n displacement slots."""
    c = np.zeros(n + 3)
    c[0] = 1.0
    c[-1] = 1.0
    return BandSymbol(k=1, h=n + 1, c=c, n=n)


def star_symbol(d):
    """The n = 1 band c_{-d} = c_{d+1} = 1 (d = 1 is Chebyshev)."""
    if d < 1:
        raise ValueError("star family needs d >= 1")
    c = np.zeros(2 * d + 2)
    c[0] = 1.0
    c[-1] = 1.0
    return BandSymbol(k=d, h=d + 1, c=c, n=1)


def cheb_point(thetas):
    """Torus-image point: x_j = -e_{j+1} of the n+2 unit roots.

    Takes the n+1 free angles; the last angle is pinned by the
    zero-sum constraint.  The image always lies in the limit region of
    the Chebyshev band (all symbol roots of modulus one, Vieta).
    """
    th = np.asarray(thetas, dtype=float).ravel()
    n = th.size - 1
    roots = np.exp(1j * np.append(th, -th.sum()))
    return np.array(
        [-elementary_symmetric(roots, j + 1) for j in range(n + 1)]
    )


def cheb_membership_check(x, tols=DEFAULT_TOLS):
    """True when every symbol root of the Chebyshev band at x has |.| ~ 1.

    The gate is 100x tol_c, matching classify_boundary: a mu-fold root
    is only resolvable to eps^(1/mu) in doubles, and the region's cusps
    are exactly such points ((-3, -3) carries a triple root, resolved
    to ~6e-6, which a bare tol_c gate would wrongly reject).
    """
    x = np.asarray(x, dtype=complex).ravel()
    sym = chebyshev_symbol(x.size - 1)
    mod = np.abs(alpha_roots(sym, x, tols).roots)
    return bool(np.max(np.abs(mod - 1.0)) <= 100 * tols.tol_c)


def cheb_lattice_candidates(n, m, denominators=None, tols=DEFAULT_TOLS):
    """Search regular angle lattices that carry the finite locus.

    The finite Chebyshev loci are torus images of angle tuples at
    rational multiples of pi on some regular lattice, but which lattice
    is not written down anywhere usable; this enumerates theta_j =
    2 pi l_j / N over candidate denominators N, validates each lattice
    point by the window-determinant residuals of the actual band, and
    reports, per N, how many distinct locus points the lattice explains
    versus binom(m+n, n+1).  A lattice validates when the distinct
    count matches exactly.  The default N range runs to (n+2)(m+n+1),
    the empirical rule found by this very search (n = 0 gives the
    classical 2(m+1), i.e. theta = p pi/(m+1); n = 1 validates at
    3(m+2) for every m tried); the rule stays an input default, not a
    hardcoded answer.

    Returns a dict report: {"expected", "candidates": [(N, hits)],
    "validated": smallest matching N or None, "points", "thetas"} with
    points/thetas from the validated lattice (empty when none match).
    Never guesses: an empty validation is a finding, not an error.
    """
    if n < 0 or n > 4:
        raise ValueError("lattice search supports 0 <= n <= 4")
    sym = chebyshev_symbol(n)
    want = expected_count(m, n)
    if denominators is None:
        denominators = range(2, (n + 2) * (m + n + 1) + 1)
    budget = 2_000_000
    report = {"n": n, "m": m, "expected": want, "candidates": [],
              "validated": None, "points": [], "thetas": []}
    for N in denominators:
        if N ** (n + 1) > budget:
            raise ValueError(
                f"lattice N={N} needs {N ** (n + 1)} tuples; over budget"
            )
        ls = np.array(list(product(range(N), repeat=n + 1)), dtype=float)
        th = 2.0 * math.pi * ls / N
        pts = np.array([cheb_point(t) for t in th])
        rel = _window_relres(sym, m, pts)
        hit = np.max(rel, axis=0) <= 1e-8
        # window zeros alone describe the superset system; a lattice can
        # carry its excess points too (m=2 puts (0,0) on every lattice
        # with thirds), so membership also requires the rank drop that
        # defines the locus proper
        for i in np.nonzero(hit)[0]:
            _smin, ratio = _rank_gap(sym, m, pts[i])
            if ratio > tols.tol_rank:
                hit[i] = False
        if not np.any(hit):
            report["candidates"].append((int(N), 0))
            continue
        clusters = cluster_points(pts[hit], tols.tol_cluster)
        hits = len(clusters)
        report["candidates"].append((int(N), hits))
        if hits == want and report["validated"] is None:
            report["validated"] = int(N)
            report["points"] = [c for c, _n, _m in clusters]
            keep = []
            seen = set()
            for t, p in zip(th[hit], pts[hit]):
                key = min(
                    range(len(clusters)),
                    key=lambda i: np.abs(clusters[i][0] - p).max(),
                )
                keep.append((key, tuple(t)))
                seen.add(key)
            report["thetas"] = [t for _key, t in sorted(keep)]
    return report


def hypocycloid(d, theta):
    """Closed-form boundary transcription, kept verbatim.

    x_0 = (-1)^d e^{-i(d+2)theta} ((d+2) e^{i(2d+3)theta} + d + 1).
    Vectorized over theta.  See the module docstring: this curve does
    not bound the d-star region (star_boundary does); its printed
    reference values are pinned in tests as transcribed.
    """
    if d < 1:
        raise ValueError("hypocycloid needs d >= 1")
    theta = np.asarray(theta, dtype=float)
    return (-1.0) ** d * np.exp(-1j * (d + 2) * theta) * (
        (d + 2) * np.exp(1j * (2 * d + 3) * theta) + d + 1
    )


def star_boundary(d, theta):
    """Boundary of the star-d region in the x_0 plane (2d+1 cusps).

    x_0 = (-1)^d ((d+1) e^{i d theta} + d e^{-i(d+1)theta}); passes
    through the scanned region's cusps (radius 2d+1, verified for
    d = 1, 2) and through the exact torus cusp -3 at d = 1.
    """
    if d < 1:
        raise ValueError("star boundary needs d >= 1")
    theta = np.asarray(theta, dtype=float)
    return (-1.0) ** d * (
        (d + 1) * np.exp(1j * d * theta) + d * np.exp(-1j * (d + 1) * theta)
    )


def _curve(fn, d, samples):
    th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    return fn(d, th)


def hypocycloid_curve(d, samples=2048):
    """The verbatim curve sampled on a uniform closed loop."""
    return _curve(hypocycloid, d, samples)


def star_curve(d, samples=2048):
    """The region-faithful boundary sampled on a uniform closed loop."""
    return _curve(star_boundary, d, samples)
