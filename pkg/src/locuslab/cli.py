"""Command-line front end: config in, CSV/JSON/SVG artifacts out.

Commands: ``locus`` (solve and dump the point set), ``cregion`` (grid
scan of the limit region), ``basis`` (symbolic minor listing plus the
triangularity check), ``verify`` (convergence/conjecture report),
``hypocycloid`` (star boundary curve), ``measure`` (root-counting
measure atoms).  Exit status 0 means success, 1 means the run finished
but produced defect reports (count mismatches, solver failures), 2
means the input was unusable.  Every defect also lands in
``defects.json`` regardless of exit code.

Artifacts are regression-friendly: floats are serialized via repr
(shortest round-trip form, 17 significant digits suffice to re-read
them bit for bit), JSON keys are sorted, nothing embeds a timestamp,
and reruns of the same config are byte-identical.
"""

import argparse
import dataclasses
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .asymptotics import conjecture_report, measure_of
from .band_symbol import BandSymbol, c_region_scan
from .cheb_family import star_curve
from .locus_solver import rank_filter, solve_n0, solve_n1
from .minor_basis import build_basis, triangularity_report
from .polycore import DEFAULT_TOLS
from .svgout import polyline_layer, render_svg, scatter_layer

__all__ = ["ConfigError", "main", "parse_config", "run_command"]

ENV_OUTDIR = "LOCUSLAB_OUTDIR"

# defect kinds that flip the exit status to 1; everything else in
# defects.json is informational (e.g. discarded non-converged superset
# candidates on an otherwise exact run)
SEVERE_DEFECTS = {
    "count_mismatch",
    "solver_error",
    "triangularity_failure",
    "measure_error",
}


class ConfigError(Exception):
    """Unusable configuration file; message carries the line number."""


_UNUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_UNUM})(?:(?P<sign>[+-])(?P<im>{_UNUM})i)?$"
)
_CKEY_RE = re.compile(r"^c\[(-?\d+)\]$")

_INT_KEYS = {"n", "k", "h", "seed", "d", "grid_samples", "cloud", "samples"}
_TOL_FLOAT_KEYS = {"tol_cluster", "tol_c", "tol_disc", "tol_eval",
                   "tol_rank", "tol_sep"}
_TOL_INT_KEYS = {"root_maxiter", "newton_maxiter", "newton_backtracks"}


def _parse_complex(text, lineno):
    m = _COMPLEX_RE.match(text.replace(" ", ""))
    if not m:
        raise ConfigError(
            f"line {lineno}: malformed complex literal {text!r} "
            "(expected a, a+bi, or a-bi)"
        )
    re_part = float(m.group("re"))
    im_part = 0.0
    if m.group("im") is not None:
        im_part = float(m.group("im"))
        if m.group("sign") == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def _parse_int(text, key, lineno):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: key {key!r} needs an integer, "
                          f"got {text!r}") from None


def _parse_float(text, key, lineno):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: key {key!r} needs a number, "
                          f"got {text!r}") from None


def parse_config(path):
    """Read a line-based ``key = value`` config into a symbol + options.

    Keys: ``n``/``k``/``h`` (required band shape), ``c[j] = a+bi`` for
    the coefficients (unset slots default to 0; ``c[-k]`` and ``c[h]``
    must be present and nonzero), ``m = 2, 3, 4`` (order list),
    ``grid = re0, re1, im0, im1`` with ``grid_samples``, ``d`` (star
    index), ``seed``, ``cloud``, ``samples``, and any tolerance field
    by name (``tol_c = 1e-6``).  Blank lines and ``#`` comments are
    skipped; duplicate keys are an error.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None

    seen = {}
    ints = {}
    cvals = {}
    tol_over = {}
    opts = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} "
                f"(first set on line {seen[key]})"
            )
        seen[key] = lineno
        ckey = _CKEY_RE.match(key)
        if ckey:
            cvals[int(ckey.group(1))] = (_parse_complex(value, lineno),
                                         key, lineno)
        elif key in _INT_KEYS:
            ints[key] = _parse_int(value, key, lineno)
        elif key in _TOL_FLOAT_KEYS:
            tol_over[key] = _parse_float(value, key, lineno)
        elif key in _TOL_INT_KEYS:
            tol_over[key] = _parse_int(value, key, lineno)
        elif key == "m":
            try:
                opts["m"] = [int(tok) for tok in value.split(",")]
            except ValueError:
                raise ConfigError(f"line {lineno}: key 'm' needs a "
                                  f"comma-separated integer list, got "
                                  f"{value!r}") from None
            if not opts["m"] or any(mm < 1 for mm in opts["m"]):
                raise ConfigError(f"line {lineno}: orders in 'm' must be "
                                  ">= 1")
        elif key == "grid":
            toks = [t.strip() for t in value.split(",")]
            if len(toks) != 4:
                raise ConfigError(f"line {lineno}: key 'grid' needs four "
                                  "numbers re0, re1, im0, im1")
            g = [_parse_float(t, "grid", lineno) for t in toks]
            if not (g[0] < g[1] and g[2] < g[3]):
                raise ConfigError(f"line {lineno}: grid rectangle is empty")
            opts["grid"] = tuple(g)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    for need in ("n", "k", "h"):
        if need not in ints:
            raise ConfigError(f"missing required key {need!r}")
    n, k, h = ints["n"], ints["k"], ints["h"]
    if n < 0 or k < 1 or h < 1:
        raise ConfigError("band shape needs n >= 0, k >= 1, h >= 1")

    for j, (_v, key, lineno) in cvals.items():
        if not -k <= j <= h:
            raise ConfigError(
                f"line {lineno}: {key!r} is outside the band "
                f"range c[{-k}]..c[{h}]"
            )
    c = np.zeros(k + h + 1, dtype=complex)
    for j, (v, _key, _lineno) in cvals.items():
        c[j + k] = v
    if -k not in cvals or cvals[-k][0] == 0:
        raise ConfigError(f"key 'c[{-k}]' is missing or zero (the lowest "
                          "band coefficient must be nonzero)")
    if h not in cvals or cvals[h][0] == 0:
        raise ConfigError(f"key 'c[{h}]' is missing or zero (the highest "
                          "band coefficient must be nonzero)")
    sym = BandSymbol(k=k, h=h, c=c, n=n)

    if "seed" in ints:
        tol_over["seed"] = ints["seed"]
    tols = dataclasses.replace(DEFAULT_TOLS, **tol_over)
    opts["tols"] = tols
    opts["seed"] = tols.seed
    opts["grid_samples"] = ints.get("grid_samples", 201)
    opts["cloud"] = ints.get("cloud", 2048)
    opts["samples"] = ints.get("samples", 2048)
    if "d" in ints:
        if ints["d"] < 1:
            raise ConfigError("key 'd' must be >= 1")
        opts["d"] = ints["d"]
    return sym, opts


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _jsonable(obj):
    """Deep-convert numpy scalars and complex values for json.dump."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"im": float(obj.imag), "re": float(obj.real)}
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                repr(float(v)) if isinstance(v, (float, np.floating))
                else str(v)
                for v in row
            ) + "\n")


def _point_sort_key(p):
    return tuple(v for z in p.coords for v in (z.real, z.imag))


def _locus_json(locus):
    return {
        "m": locus.m,
        "kind": locus.kind,
        "points": [
            {
                "coords": [{"re": z.real, "im": z.imag} for z in p.coords],
                "multiplicity": p.multiplicity,
                "residuals": {str(k): _jsonable(v)
                              for k, v in sorted(p.residuals.items())},
            }
            for p in sorted(locus.points, key=_point_sort_key)
        ],
        "defects": sorted((_jsonable(d) for d in locus.defects),
                          key=lambda d: json.dumps(d, sort_keys=True)),
    }


def _locus_rows(locus, extra=()):
    rows = []
    for p in sorted(locus.points, key=_point_sort_key):
        row = []
        for z in p.coords:
            row.extend((z.real, z.imag))
        row.append(p.multiplicity)
        rows.append(row + [e(p) for e in extra])
    return rows


def _coord_header(n, extra=()):
    head = []
    for j in range(n + 1):
        head.extend((f"x{j}_re", f"x{j}_im"))
    return head + ["multiplicity"] + list(extra)


def _solve(sym, m, tols):
    if sym.n == 0:
        tilde = solve_n0(sym, m, tols)
    elif sym.n == 1:
        tilde = solve_n1(sym, m, tols)
    else:
        raise ValueError(
            f"the solver handles n = 0 and n = 1 bands; config has n={sym.n}"
        )
    return tilde, rank_filter(sym, m, tilde, tols)


def _solve_batch(sym, ms, tols, defects):
    """Solve each order on its own worker; assembly stays ordered by m."""
    results = {}

    def one(m):
        return _solve(sym, m, tols)

    with ThreadPoolExecutor(max_workers=min(4, len(ms))) as pool:
        futs = {m: pool.submit(one, m) for m in ms}
        for m in sorted(futs):
            try:
                results[m] = futs[m].result()
            except Exception as exc:
                defects.append({
                    "kind": "solver_error",
                    "m": m,
                    "message": f"{type(exc).__name__}: {exc}",
                })
    return results


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _require(opts, key, command):
    if key not in opts:
        raise ConfigError(f"command {command!r} needs the config key {key!r}")
    return opts[key]


def _cmd_locus(sym, opts, outdir, defects, artifacts):
    ms = _require(opts, "m", "locus")
    results = _solve_batch(sym, ms, opts["tols"], defects)
    for m in sorted(results):
        _tilde, full = results[m]
        for d in full.defects:
            defects.append({"m": m, **d})
        base = os.path.join(outdir, f"locus_m{m}")
        _write_json(base + ".json", _locus_json(full))
        _write_csv(base + ".csv", _coord_header(sym.n), _locus_rows(full))
        pts = full.coords()
        layers = [scatter_layer(pts[:, 0] if pts.size else pts)]
        render_svg(layers, base + ".svg",
                   title=f"locus m={m} ({full.total_multiplicity()} points)")
        artifacts.extend([base + ".json", base + ".csv", base + ".svg"])


def _cmd_cregion(sym, opts, outdir, defects, artifacts):
    grid = _require(opts, "grid", "cregion")
    scan = c_region_scan(
        sym, (grid[0], grid[1]), (grid[2], grid[3]),
        resolution=opts["grid_samples"], tols=opts["tols"],
    )
    rows = []
    for jj, im in enumerate(scan.im_axis):
        for ii, rre in enumerate(scan.re_axis):
            rows.append([float(rre), float(im),
                         float(scan.residuals[jj, ii])])
    base = os.path.join(outdir, "cregion")
    _write_csv(base + ".csv", ["x0_re", "x0_im", "c_residual"], rows)
    layers = [polyline_layer(b) for b in scan.boundary]
    if not layers:
        layers = [scatter_layer(scan.inside_points(), radius=1.5)]
    render_svg(layers, base + ".svg",
               title=f"region boundary at residual {scan.threshold:.3g}")
    artifacts.extend([base + ".csv", base + ".svg"])


def _cmd_basis(sym, opts, outdir, defects, artifacts):
    ms = _require(opts, "m", "basis")
    for m in sorted(set(ms)):
        basis = build_basis(sym, m)
        tri = triangularity_report(basis)
        if not tri.ok:
            defects.append({"kind": "triangularity_failure", "m": m})
        doc = {
            "m": m,
            "n": sym.n,
            "minors": [
                {
                    "index_set": list(I),
                    "terms": [
                        {"exponents": list(expo),
                         "re": coef.real, "im": coef.imag}
                        for expo, coef in basis[I].sorted_terms()
                    ],
                }
                for I in basis
            ],
            "triangularity": {
                "size": int(tri.matrix.shape[0]),
                "unit_diagonal": tri.unit_diagonal,
                "lower_triangular": tri.lower_triangular,
                "ok": tri.ok,
            },
        }
        path = os.path.join(outdir, f"basis_m{m}.json")
        _write_json(path, doc)
        artifacts.append(path)


def _cmd_verify(sym, opts, outdir, defects, artifacts):
    ms = _require(opts, "m", "verify")
    rep = conjecture_report(sym, ms, tols=opts["tols"],
                            cloud=opts["cloud"], seed=opts["seed"])
    for r in rep.records:
        if "error" in r:
            defects.append({"kind": "solver_error", "m": r["m"],
                            "message": r["error"]})
        for kind in r.get("defects", ()):
            defects.append({"kind": kind, "m": r["m"]})
    path = os.path.join(outdir, "verify.json")
    _write_json(path, rep.to_dict())
    artifacts.append(path)


def _cmd_hypocycloid(sym, opts, outdir, defects, artifacts):
    d = _require(opts, "d", "hypocycloid")
    ns = opts["samples"]
    thetas = np.linspace(0.0, 2.0 * np.pi, ns, endpoint=False)
    curve = star_curve(d, samples=ns)
    base = os.path.join(outdir, f"hypocycloid_d{d}")
    _write_csv(base + ".csv", ["theta", "re", "im"],
               [[float(t), float(z.real), float(z.imag)]
                for t, z in zip(thetas, curve)])
    render_svg([polyline_layer(curve, closed=True)], base + ".svg",
               title=f"star boundary d={d} ({2 * d + 1} cusps)")
    artifacts.extend([base + ".csv", base + ".svg"])


def _cmd_measure(sym, opts, outdir, defects, artifacts):
    ms = _require(opts, "m", "measure")
    results = _solve_batch(sym, ms, opts["tols"], defects)
    all_measures = []
    for m in sorted(results):
        _tilde, full = results[m]
        for d in full.defects:
            defects.append({"m": m, **d})
        try:
            mu = measure_of(full)
        except ValueError as exc:
            defects.append({"kind": "measure_error", "m": m,
                            "message": str(exc)})
            continue
        all_measures.append(mu.to_dict())
        rows = []
        for p, w in sorted(mu.atoms, key=lambda aw: _point_sort_key(aw[0])):
            row = []
            for z in p.coords:
                row.extend((z.real, z.imag))
            rows.append(row + [p.multiplicity, float(w)])
        path = os.path.join(outdir, f"measure_m{m}.csv")
        _write_csv(path, _coord_header(sym.n, ["mass"]), rows)
        artifacts.append(path)
    path = os.path.join(outdir, "measure.json")
    _write_json(path, {"measures": all_measures})
    artifacts.append(path)


_COMMANDS = {
    "locus": _cmd_locus,
    "cregion": _cmd_cregion,
    "basis": _cmd_basis,
    "verify": _cmd_verify,
    "hypocycloid": _cmd_hypocycloid,
    "measure": _cmd_measure,
}


def run_command(command, config_path, outdir=None):
    """Execute one CLI command; returns the process exit status.

    The output directory is resolved as: the LOCUSLAB_OUTDIR
    environment variable when set (it overrides everything), else the
    explicit argument, else ``locuslab-out`` under the working
    directory.
    """
    if command not in _COMMANDS:
        print(f"unknown command {command!r}; choose from "
              f"{sorted(_COMMANDS)}", file=sys.stderr)
        return 2
    outdir = os.environ.get(ENV_OUTDIR) or outdir or "locuslab-out"
    defects = []
    artifacts = []
    try:
        sym, opts = parse_config(config_path)
        os.makedirs(outdir, exist_ok=True)
        _COMMANDS[command](sym, opts, outdir, defects, artifacts)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    defects = [_jsonable(d) for d in defects]
    for d in defects:
        d["severe"] = d.get("kind") in SEVERE_DEFECTS
    defects.sort(key=lambda d: json.dumps(d, sort_keys=True))
    dpath = os.path.join(outdir, "defects.json")
    _write_json(dpath, {"command": command, "defects": defects})
    artifacts.append(dpath)
    for path in artifacts:
        print(f"wrote {path}")
    return 1 if any(d["severe"] for d in defects) else 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="locuslab",
        description="banded-pencil eigenvalue locus toolkit",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="path to a key = value config file")
    parser.add_argument("--outdir", default=None,
                        help=f"artifact directory (overridden by "
                             f"${ENV_OUTDIR} when set)")
    args = parser.parse_args(argv)
    return run_command(args.command, args.config, args.outdir)


if __name__ == "__main__":
    sys.exit(main())
