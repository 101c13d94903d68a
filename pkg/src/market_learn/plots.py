"""Minimal deterministic SVG line charts for simulation output.

Hand-rolled rather than pulled from a plotting library so identical inputs
produce byte-identical files: coordinates are formatted with fixed precision
and nothing time- or version-dependent is embedded.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MissingResults

__all__ = ["svg_line_chart", "emit_plots"]

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

_WIDTH, _HEIGHT = 720, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 36, 44


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, count)


def svg_line_chart(series, path, title="", x_label="", y_label="") -> Path:
    """Write a line chart to ``path``.

    ``series`` is a list of (xs, ys) pairs; axes are shared and scaled to the
    union of the data.
    """
    if not series:
        raise MissingResults("no series to plot")

    xs_all = np.concatenate([np.asarray(xs, dtype=float) for xs, _ in series])
    ys_all = np.concatenate([np.asarray(ys, dtype=float) for _, ys in series])
    x_lo, x_hi = float(xs_all.min()), float(xs_all.max())
    y_lo, y_hi = float(ys_all.min()), float(ys_all.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return _MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]

    for tick in _ticks(y_lo + pad, y_hi - pad):
        y = py(tick)
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{_fmt(y)}" x2="{_WIDTH - _MARGIN_R}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:.3g}</text>'
        )
    for tick in _ticks(x_lo, x_hi):
        x = px(tick)
        parts.append(
            f'<text x="{_fmt(x)}" y="{_HEIGHT - _MARGIN_B + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tick:.4g}</text>'
        )

    parts.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )

    for idx, (xs, ys) in enumerate(series):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        color = _PALETTE[idx % len(_PALETTE)]
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )

    if x_label:
        parts.append(
            f'<text x="{_WIDTH / 2:.0f}" y="{_HEIGHT - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{_HEIGHT / 2:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 16 {_HEIGHT / 2:.0f})">{y_label}</text>'
        )

    parts.append("</svg>")
    out = Path(path)
    out.write_text("\n".join(parts) + "\n")
    return out


def emit_plots(results, out_dir, convergence_tol: float = 0.1, thin: int = 10, max_series: int = 50) -> dict:
    """Write the standard chart set for a batch of episode results.

    Produces a price-path overlay, the belief-on-the-true-state trajectories,
    and the learned fraction as a function of the horizon.  Paths are thinned
    to every ``thin``-th period and overlays capped at ``max_series``
    episodes to bound file sizes.
    """
    results = list(results)
    if not results:
        raise MissingResults("no episode results to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    thin = max(1, int(thin))

    horizon = len(results[0].price_path) - 1
    ts = np.arange(0, horizon + 1, thin)

    shown = results[:max_series]
    price_series = [(ts, r.price_path[::thin]) for r in shown]
    belief_series = [(ts, r.belief_path[::thin, r.true_state]) for r in shown]

    prices = np.stack([r.price_path for r in results])
    truths = np.array([r.true_value for r in results])
    learned_by_t = (np.abs(prices - truths[:, None]) < convergence_tol).mean(axis=0)
    learned_series = [(np.arange(horizon + 1), learned_by_t)]

    written = {
        "price_paths": svg_line_chart(
            price_series, out / "price_paths.svg",
            title=f"Transaction price paths ({len(shown)} of {len(results)} episodes)",
            x_label="period", y_label="price",
        ),
        "belief_on_truth": svg_line_chart(
            belief_series, out / "belief_on_truth.svg",
            title="Public belief on the true state",
            x_label="period", y_label="belief weight",
        ),
        "learned_fraction": svg_line_chart(
            learned_series, out / "learned_fraction.svg",
            title=f"Fraction of episodes with |price - true value| < {convergence_tol:g}",
            x_label="period", y_label="fraction",
        ),
    }
    return written
