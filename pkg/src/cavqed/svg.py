"""Minimal deterministic SVG line plots.

CSV files are the authoritative outputs of the command-line tools; these
plots are advisory, built from plain polylines with fixed-precision
coordinates so identical data produces identical bytes.
"""

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 860.0, 520.0
_ML, _MR, _MT, _MB = 70.0, 20.0, 40.0, 50.0


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span <= 0:
        span = 1.0
    return out_lo + (np.asarray(values, float) - lo) * (out_hi - out_lo) / span


def write_line_svg(path, x, series, title="", x_label="", y_label="", log_y=False):
    """Write one SVG with polylines for each (label, y-array) in `series`."""
    x = np.asarray(x, dtype=float)
    ys = [(label, np.asarray(y, dtype=float)) for label, y in series]
    if not ys or any(y.shape != x.shape for _, y in ys):
        raise ValueError("series must be nonempty and match the x grid")

    stacked = np.concatenate([y for _, y in ys])
    if log_y:
        positive = stacked[stacked > 0]
        floor = positive.min() if positive.size else 1.0
        stacked = np.log10(np.maximum(stacked, floor))
        ys = [(label, np.log10(np.maximum(y, floor))) for label, y in ys]
    y_lo, y_hi = float(stacked.min()), float(stacked.max())
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    x_lo, x_hi = float(x.min()), float(x.max())

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:.0f}" height="{_H:.0f}" '
        f'viewBox="0 0 {_W:.0f} {_H:.0f}">',
        f'<rect width="{_W:.0f}" height="{_H:.0f}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{_ML:.1f}" y1="{_H - _MB:.1f}" x2="{_W - _MR:.1f}" y2="{_H - _MB:.1f}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML:.1f}" y1="{_MT:.1f}" x2="{_ML:.1f}" y2="{_H - _MB:.1f}" '
        'stroke="black" stroke-width="1"/>',
        f'<text x="{_W / 2:.1f}" y="{_H - 12:.1f}" text-anchor="middle" font-size="13">{x_label}</text>',
        f'<text x="18" y="{_H / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {_H / 2:.1f})">{y_label}</text>',
    ]
    for tick in np.linspace(x_lo, x_hi, 5):
        px = float(_scale(tick, x_lo, x_hi, _ML, _W - _MR))
        lines.append(f'<text x="{px:.1f}" y="{_H - _MB + 18:.1f}" text-anchor="middle" '
                     f'font-size="11">{tick:.6g}</text>')
    for tick in np.linspace(y_lo, y_hi, 5):
        py = float(_scale(tick, y_lo, y_hi, _H - _MB, _MT))
        label = f"1e{tick:.2f}" if log_y else f"{tick:.6g}"
        lines.append(f'<text x="{_ML - 6:.1f}" y="{py + 4:.1f}" text-anchor="end" '
                     f'font-size="11">{label}</text>')

    for i, (label, y) in enumerate(ys):
        px = _scale(x, x_lo, x_hi, _ML, _W - _MR)
        py = _scale(y, y_lo, y_hi, _H - _MB, _MT)
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        color = _COLORS[i % len(_COLORS)]
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        lines.append(f'<text x="{_W - _MR - 8:.1f}" y="{_MT + 16 * (i + 1):.1f}" '
                     f'text-anchor="end" font-size="12" fill="{color}">{label}</text>')

    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
