"""Numerical toolkit for displaced-band eigenvalue loci.

Core objects: band symbols with displacement slots (band_symbol),
structured minors indexed by column subsets (minor_basis), finite-m
locus solvers and window-determinant oracles (locus_solver), the
trigonometric model family (cheb_family), limit-set experiments
(asymptotics), deterministic figure output (svgout), and the command
line front end (cli).
"""

from .asymptotics import (
    ConvergenceReport,
    RootCountingMeasure,
    conjecture_report,
    directed_distance,
    measure_of,
    region_cloud,
    torus_cloud,
)
from .band_symbol import (
    AffineMap,
    AlphaSpectrum,
    BandSymbol,
    alpha_roots,
    c_region_scan,
    c_residual,
    cauchy_bound,
    classify_boundary,
    in_c,
    is_multihermitian,
    normalize,
    q_poly,
)
from .cheb_family import (
    cheb_lattice_candidates,
    cheb_membership_check,
    cheb_point,
    chebyshev_symbol,
    hypocycloid,
    hypocycloid_curve,
    star_boundary,
    star_curve,
    star_symbol,
)
from .cli import main, parse_config, run_command
from .locus_solver import (
    EigenLocus,
    LocusPoint,
    char_roots,
    det_window,
    det_window_scaled,
    expected_count,
    hausdorff_gap,
    leading_block,
    rank_filter,
    solve_n0,
    solve_n1,
    widom_eval,
    window_matrix,
)
from .minor_basis import (
    MinorBasis,
    TriangularityReport,
    build_basis,
    build_minor,
    eigenlocus_bruteforce,
    index_sets,
    triangularity_report,
)
from .polycore import DEFAULT_TOLS, MultiPoly, Tolerances, UniPoly
from .svgout import polyline_layer, render_svg, scatter_layer

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "AlphaSpectrum",
    "BandSymbol",
    "ConvergenceReport",
    "DEFAULT_TOLS",
    "EigenLocus",
    "LocusPoint",
    "MinorBasis",
    "MultiPoly",
    "RootCountingMeasure",
    "Tolerances",
    "TriangularityReport",
    "UniPoly",
    "alpha_roots",
    "build_basis",
    "build_minor",
    "c_region_scan",
    "c_residual",
    "cauchy_bound",
    "char_roots",
    "cheb_lattice_candidates",
    "cheb_membership_check",
    "cheb_point",
    "chebyshev_symbol",
    "classify_boundary",
    "conjecture_report",
    "det_window",
    "det_window_scaled",
    "directed_distance",
    "eigenlocus_bruteforce",
    "expected_count",
    "hausdorff_gap",
    "hypocycloid",
    "hypocycloid_curve",
    "in_c",
    "index_sets",
    "is_multihermitian",
    "leading_block",
    "main",
    "measure_of",
    "normalize",
    "parse_config",
    "polyline_layer",
    "q_poly",
    "rank_filter",
    "region_cloud",
    "render_svg",
    "run_command",
    "scatter_layer",
    "solve_n0",
    "solve_n1",
    "star_boundary",
    "star_curve",
    "star_symbol",
    "torus_cloud",
    "triangularity_report",
    "widom_eval",
    "window_matrix",
]
