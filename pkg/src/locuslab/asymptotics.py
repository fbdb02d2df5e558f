"""Limit-behavior diagnostics: counting measures, distances, trend reports.

The finite loci are conjectured to accumulate on the equal-modulus
region, with root-counting measures mass multiplicity/binom(m+n, n+1).
Nothing here asserts the limit statements — desk-scale m cannot reach
them — but the trends are measurable: region residuals over the locus,
directed distances between the locus and a region sample cloud (both
directions: containment and fill), the conjugate-reversal symmetry
defect, and the gap between the window-system superset and the locus
proper.  conjecture_report packages those series with verdict strings
that are findings, never assertions.
"""

from dataclasses import dataclass, field

import numpy as np

from .band_symbol import (
    BandSymbol,
    c_residual_many,
    cauchy_bound,
    is_multihermitian,
)
from .cheb_family import cheb_point, chebyshev_symbol
from .locus_solver import (
    EigenLocus,
    expected_count,
    hausdorff_gap,
    rank_filter,
    solve_n0,
    solve_n1,
)
from .polycore import DEFAULT_TOLS

__all__ = [
    "ConvergenceReport",
    "RootCountingMeasure",
    "conjecture_report",
    "directed_distance",
    "measure_of",
    "region_cloud",
    "torus_cloud",
]


@dataclass
class RootCountingMeasure:
    """Discrete probability measure of a locus: atoms (point, mass)."""

    m: int
    atoms: list

    def total_mass(self):
        return float(sum(w for _p, w in self.atoms))

    def to_dict(self):
        return {
            "m": self.m,
            "atoms": [
                {
                    "coords": [[z.real, z.imag] for z in p.coords],
                    "multiplicity": p.multiplicity,
                    "mass": w,
                }
                for p, w in self.atoms
            ],
        }


def measure_of(locus):
    """Counting measure: mass multiplicity / binom(m+n, n+1) per point.

    The denominator is the structural count, not the observed total,
    so a defect-laden locus whose multiplicities do not reach it would
    yield masses that fail to sum to one; such input is refused rather
    than silently renormalized (the measure must stay a probability
    measure, and hiding a count defect inside it would be worse than
    an error).
    """
    if locus.kind != "full":
        raise ValueError("counting measure is defined for the locus proper")
    total = locus.total_multiplicity()
    if total == 0:
        raise ValueError("locus carries zero total multiplicity")
    n = len(locus.points[0].coords) - 1
    denom = expected_count(locus.m, n)
    if total != denom:
        raise ValueError(
            f"locus multiplicity {total} != expected {denom}; "
            "refusing to build a non-probability measure"
        )
    atoms = [(p, p.multiplicity / denom) for p in locus.points]
    return RootCountingMeasure(locus.m, atoms)


def torus_cloud(n, count, seed=None, tols=DEFAULT_TOLS):
    """Exact region samples for the Chebyshev band: torus images."""
    rng = np.random.default_rng(tols.seed if seed is None else seed)
    th = rng.uniform(0.0, 2.0 * np.pi, size=(count, n + 1))
    return np.array([cheb_point(t) for t in th])


def region_cloud(sym, count, seed=None, thickness=1e-3, tols=DEFAULT_TOLS):
    """Rejection-sampled region proxy, thickened to the given residual.

    The region has positive codimension in C^{n+1}, so raw rejection
    sampling never hits it exactly; the membership predicate is applied
    at the requested `thickness` instead, and reported distances
    saturate at that scale.  Sampling happens over the Cauchy-bound box
    in the slice the region is known to fill: n = 0 uses the x_0 plane
    directly, n = 1 requires the conjugate-reversal symmetry and
    samples the x_1 = conj(x_0) slice.
    """
    if sym.n not in (0, 1):
        raise ValueError("region sampling supports n = 0 and n = 1 only")
    if sym.n == 1 and not is_multihermitian(sym):
        raise ValueError(
            "n = 1 region sampling needs the conjugate-reversal symmetry"
        )
    rng = np.random.default_rng(tols.seed if seed is None else seed)
    R = cauchy_bound(sym)
    out = []
    have = 0
    for _round in range(200):
        z = rng.uniform(-R, R, size=(4 * count, 2)) @ np.array([1.0, 1.0j])
        xs = z[:, None] if sym.n == 0 else np.column_stack([z, np.conj(z)])
        res = c_residual_many(sym, xs, tols)
        hit = xs[res <= thickness]
        if hit.shape[0]:
            out.append(hit[: count - have])
            have += out[-1].shape[0]
        if have >= count:
            break
    if not out:
        raise ValueError(
            "no region sample found; widen thickness or check the symbol"
        )
    return np.vstack(out)


def _as_points(obj):
    pts = obj.coords() if isinstance(obj, EigenLocus) else np.asarray(
        obj, dtype=complex
    )
    pts = np.atleast_2d(pts)
    if pts.shape[0] and pts.shape[1] == 0:
        pts = pts.reshape(0, 0)
    return pts


def directed_distance(locus, region, tols=DEFAULT_TOLS):
    """One-sided distance from a point set to a region description.

    `region` given as a sample array (or EigenLocus) yields the
    geometric reading: sup over `locus` points of the Euclidean
    distance in C^{n+1} (as R^{2n+2}) to the nearest sample.  The
    direction matters and both are meaningful — locus against a region
    cloud measures containment, region samples against the locus
    measure how well the finite set fills the region — so either
    argument accepts a bare array.

    `region` given as a BandSymbol switches to the sampler-free
    alternative: the largest region-membership residual over the locus
    (no cloud, no resolution parameter, but a residual rather than a
    distance).
    """
    pts = _as_points(locus)
    if pts.size == 0:
        raise ValueError("empty locus has no directed distance")
    if isinstance(region, BandSymbol):
        return float(c_residual_many(region, pts, tols).max())
    ref = _as_points(region)
    if ref.size == 0:
        raise ValueError("region sample cloud is empty")
    best = np.full(pts.shape[0], np.inf)
    chunk = max(1, 8_000_000 // max(ref.shape[0], 1))
    for lo in range(0, pts.shape[0], chunk):
        hi = min(pts.shape[0], lo + chunk)
        d = np.linalg.norm(pts[lo:hi, None, :] - ref[None, :, :], axis=2)
        best[lo:hi] = d.min(axis=1)
    return float(best.max())


@dataclass
class ConvergenceReport:
    """Per-m diagnostic series plus conjecture verdict strings."""

    symbol: dict
    records: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "symbol": self.symbol,
            "records": self.records,
            "verdicts": self.verdicts,
        }


def _is_chebyshev(sym):
    ref = chebyshev_symbol(sym.n)
    return (
        sym.k == ref.k
        and sym.h == ref.h
        and np.array_equal(sym.c, ref.c)
    )


def _solve_full(sym, m, tols):
    if sym.n == 0:
        tilde = solve_n0(sym, m, tols)
    elif sym.n == 1:
        tilde = solve_n1(sym, m, tols)
    else:
        raise ValueError("solver supports n = 0 and n = 1 only")
    return tilde, rank_filter(sym, m, tilde, tols)


def conjecture_report(sym, ms, tols=DEFAULT_TOLS, cloud=2048, seed=None):
    """Run the solver across m and aggregate the trend series.

    Records (sorted by m): max/mean region residual over the locus, the
    two directed distances against a region cloud (locus-to-cloud for
    containment, cloud-to-locus for fill — the fill distance is the one
    expected to shrink as m grows), the conjugate-reversal symmetry
    defect max_j |x_j - conj(x_{n-j})|, and the superset-vs-locus gap.
    The cloud is the exact torus image for the Chebyshev band and a
    thickened rejection sample otherwise (None when unavailable); for
    symmetric n = 1 bands both distances are measured in the x_0 plane,
    matching the planar pictures such loci are drawn in.  Solver
    failures are recorded per m and the series continues.  Verdicts are
    strings; nothing raises on a violated trend.
    """
    mh = is_multihermitian(sym)
    planar = mh and sym.n == 1
    if _is_chebyshev(sym):
        ref = torus_cloud(sym.n, cloud, seed, tols)
    else:
        try:
            ref = region_cloud(sym, cloud, seed, tols=tols)
        except ValueError:
            ref = None
    ref_plane = ref[:, :1] if (ref is not None and planar) else ref
    report = ConvergenceReport(
        symbol={
            "k": sym.k,
            "h": sym.h,
            "n": sym.n,
            "c": [[z.real, z.imag] for z in sym.c],
            "is_multihermitian": bool(mh),
        }
    )
    for m in sorted(ms):
        rec = {"m": int(m)}
        try:
            tilde, full = _solve_full(sym, m, tols)
            pts = full.coords()
            if pts.size == 0:
                raise RuntimeError("rank filter kept no points")
            res = c_residual_many(sym, pts, tols)
            rec["max_c_residual"] = float(res.max())
            rec["mean_c_residual"] = float(res.mean())
            i = int(np.argmax(res))
            rec["worst_point"] = [[z.real, z.imag] for z in pts[i]]
            pl = pts[:, :1] if planar else pts
            rec["directed_hausdorff"] = (
                directed_distance(pl, ref_plane) if ref is not None else None
            )
            rec["region_fill"] = (
                directed_distance(ref_plane, pl) if ref is not None else None
            )
            rec["symmetry_defect"] = float(
                np.abs(pts - np.conj(pts[:, ::-1])).max()
            )
            rec["tilde_full_gap"] = hausdorff_gap(tilde, full)
            rec["points"] = int(full.total_multiplicity())
            rec["defects"] = sorted({d["kind"] for d in full.defects})
        except Exception as exc:  # keep the series alive per the contract
            rec["error"] = f"{type(exc).__name__}: {exc}"
        report.records.append(rec)

    good = [r for r in report.records if "error" not in r]
    failed = [r["m"] for r in report.records if "error" in r]
    if failed:
        report.verdicts["solver"] = f"failed at m={failed}"
    if not good:
        for key in ("region_containment", "region_fill", "conjugate_symmetry"):
            report.verdicts[key] = "no successful runs"
        return report

    series = [r["max_c_residual"] for r in good]
    tail = good[-1]
    nonincreasing = all(b <= a + 1e-12 for a, b in zip(series, series[1:]))
    if tail["max_c_residual"] <= 0.05 and nonincreasing:
        report.verdicts["region_containment"] = (
            f"supported (max region residual {tail['max_c_residual']:.3e} "
            f"at m={tail['m']}, non-increasing)"
        )
    else:
        bad = max(good, key=lambda r: r["max_c_residual"])
        report.verdicts["region_containment"] = (
            f"violated-at(m={bad['m']}, point={bad['worst_point']}, "
            f"c_residual={bad['max_c_residual']:.3e})"
        )

    fills = [(r["m"], r["region_fill"]) for r in good
             if r.get("region_fill") is not None]
    if len(fills) >= 2:
        if fills[-1][1] <= fills[0][1] + 1e-12:
            report.verdicts["region_fill"] = (
                f"supported (fill distance {fills[0][1]:.3e} at "
                f"m={fills[0][0]} down to {fills[-1][1]:.3e} at "
                f"m={fills[-1][0]})"
            )
        else:
            report.verdicts["region_fill"] = (
                f"violated-at(m={fills[-1][0]}, fill={fills[-1][1]:.3e} "
                f"vs {fills[0][1]:.3e} at m={fills[0][0]})"
            )
    else:
        report.verdicts["region_fill"] = "no region cloud available"

    sds = [(r["m"], r["symmetry_defect"]) for r in good]
    if not mh:
        worst = max(sds, key=lambda t: t[1])
        report.verdicts["conjugate_symmetry"] = (
            "not-applicable (is_multihermitian=false; defect "
            f"{worst[1]:.3e} at m={worst[0]})"
        )
    elif all(v <= 1e-7 for _m, v in sds):
        report.verdicts["conjugate_symmetry"] = (
            f"supported (max symmetry defect {max(v for _m, v in sds):.3e})"
        )
    else:
        bm, bv = max(sds, key=lambda t: t[1])
        report.verdicts["conjugate_symmetry"] = (
            f"violated-at(m={bm}, defect={bv:.3e})"
        )
    return report
