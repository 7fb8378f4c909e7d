"""Deterministic portable-pixmap rendering of 1-d densities.

A measure renders as a width x height grayscale strip: one column per
re-binned cell, darker means more mass.  Output is binary P6, byte-stable
for identical inputs.
"""

from __future__ import annotations

import numpy as np

from .measures import GridMeasure


def _rebin(masses: np.ndarray, width: int) -> np.ndarray:
    """Exact proportional re-binning via the cumulative mass function."""
    n = masses.size
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    grid = np.linspace(0.0, n, width + 1)
    cdf = np.interp(grid, np.arange(n + 1), cum)
    return np.diff(cdf)


def density_strip(mu: GridMeasure, width: int = 1024, height: int = 64) -> bytes:
    cols = _rebin(np.asarray(mu.masses, dtype=float), width)
    peak = cols.max()
    if peak <= 0:
        shade = np.full(width, 255, dtype=np.uint8)
    else:
        shade = (255.0 * (1.0 - cols / peak)).round().astype(np.uint8)
    row = np.repeat(shade[:, None], 3, axis=1)  # gray RGB triplets
    image = np.tile(row, (height, 1))
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + image.tobytes()


def points_strip(
    points: np.ndarray,
    domain: tuple[float, float],
    width: int = 1024,
    height: int = 64,
) -> bytes:
    """Histogram strip of a point cloud (orbit tails)."""
    hist, _ = np.histogram(points, bins=width, range=domain)
    total = hist.sum()
    masses = hist / total if total else np.full(width, 1.0 / width)
    return density_strip(GridMeasure(domain, masses), width, height)
