"""Deterministic SVG emission for plane figures: scatters and polylines.

The figures are regression artifacts, not interactive plots: two runs
on the same data must produce byte-identical files.  Everything is
formatted with fixed precision, nothing is timestamped, and no
plotting package is involved.  Coordinates are complex numbers (the
figures are x_0-plane projections); the viewport is fitted to the data
with the same scale on both axes so circles stay circles.
"""

import numpy as np

__all__ = ["polyline_layer", "render_svg", "scatter_layer"]


def scatter_layer(points, radius=3.0, fill="#1f4e79", opacity=1.0):
    """Dots at complex positions; later layers draw on top."""
    return {
        "kind": "scatter",
        "points": np.asarray(points, dtype=complex).ravel(),
        "radius": float(radius),
        "fill": str(fill),
        "opacity": float(opacity),
    }


def polyline_layer(vertices, stroke="#b03a2e", width=1.5, closed=False):
    """Open or closed polygonal path through complex vertices."""
    return {
        "kind": "polyline",
        "points": np.asarray(vertices, dtype=complex).ravel(),
        "stroke": str(stroke),
        "width": float(width),
        "closed": bool(closed),
    }


def _window(layers):
    pts = np.concatenate(
        [lay["points"] for lay in layers if lay["points"].size]
    )
    if pts.size == 0:
        raise ValueError("no coordinates to draw")
    re_lo, re_hi = float(pts.real.min()), float(pts.real.max())
    im_lo, im_hi = float(pts.imag.min()), float(pts.imag.max())
    half = 0.5 * max(re_hi - re_lo, im_hi - im_lo, 1e-9) * 1.08
    rc, ic = 0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)
    return rc - half, rc + half, ic - half, ic + half


def render_svg(layers, path=None, size=840, margin=56, title=None):
    """Compose layers into an SVG document string (optionally a file).

    A square data window is fitted around every layer's points, drawn
    with a frame, the real/imaginary axes where they cross the window,
    and corner range labels.  Pixel positions are written with two
    decimals, data labels with six significant digits, so the output
    is a pure function of the input.
    """
    re0, re1, im0, im1 = _window(layers)
    inner = size - 2 * margin
    scale = inner / (re1 - re0)

    def px(z):
        return (
            margin + (z.real - re0) * scale,
            size - margin - (z.imag - im0) * scale,
        )

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{margin}" y="{margin - 18}" '
            f'font-family="monospace" font-size="15">{title}</text>'
        )
    frame = size - margin
    out.append(
        f'<rect x="{margin}" y="{margin}" width="{inner}" height="{inner}" '
        'fill="none" stroke="#444444" stroke-width="1"/>'
    )
    for v, vert in ((0.0, True), (0.0, False)):
        lo, hi = (re0, re1) if vert else (im0, im1)
        if not lo < v < hi:
            continue
        if vert:
            x, _ = px(complex(v, im0))
            out.append(
                f'<line x1="{x:.2f}" y1="{margin}" x2="{x:.2f}" '
                f'y2="{frame}" stroke="#cccccc" stroke-width="1"/>'
            )
        else:
            _, y = px(complex(re0, v))
            out.append(
                f'<line x1="{margin}" y1="{y:.2f}" x2="{frame}" '
                f'y2="{y:.2f}" stroke="#cccccc" stroke-width="1"/>'
            )
    out.append(
        f'<text x="{margin}" y="{frame + 20}" font-family="monospace" '
        f'font-size="12">re [{re0:.6g}, {re1:.6g}]  im [{im0:.6g}, '
        f'{im1:.6g}]</text>'
    )
    for lay in layers:
        if lay["kind"] == "polyline":
            if lay["points"].size < 2:
                continue
            coords = " L ".join(
                "{:.2f} {:.2f}".format(*px(z)) for z in lay["points"]
            )
            tail = " Z" if lay["closed"] else ""
            out.append(
                f'<path d="M {coords}{tail}" fill="none" '
                f'stroke="{lay["stroke"]}" '
                f'stroke-width="{lay["width"]:.2f}"/>'
            )
        elif lay["kind"] == "scatter":
            for z in lay["points"]:
                x, y = px(z)
                out.append(
                    f'<circle cx="{x:.2f}" cy="{y:.2f}" '
                    f'r="{lay["radius"]:.2f}" fill="{lay["fill"]}" '
                    f'fill-opacity="{lay["opacity"]:.2f}"/>'
                )
        else:
            raise ValueError(f"unknown layer kind {lay['kind']!r}")
    out.append("</svg>")
    doc = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc)
    return doc
