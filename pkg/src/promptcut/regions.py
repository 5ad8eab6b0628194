"""Region statistics over watershed output: areas, convexity, centroids.

Convexity is area / hull area with the hull taken over the four corner
points of every member pixel.  The corner hull always contains the unit
squares of all member pixels, so the ratio lands in (0, 1] and the hull
area is never zero, even for collinear pixel sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import PointPrompt


@dataclass(frozen=True)
class RegionStats:
    label: int
    area: int
    hull_area: float
    convexity: float
    centroid_x: float
    centroid_y: float


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull of (N, 2) points, counter-clockwise, no
    duplicate endpoint."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if pts.shape[0] <= 2:
        return pts
    # np.unique sorts lexicographically by (x, y) already.
    def half(iterable):
        chain: list[np.ndarray] = []
        for p in iterable:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def shoelace_area(polygon: np.ndarray) -> float:
    if polygon.shape[0] < 3:
        return 0.0
    x = polygon[:, 0]
    y = polygon[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _corner_candidates(pixels: np.ndarray) -> np.ndarray:
    """Corner points of the per-row extreme pixels.

    Any pixel extreme in some direction is the min-x or max-x pixel of its
    row, so the hull over these corners equals the hull over all corners.
    """
    xs = pixels[:, 0]
    ys = pixels[:, 1]
    corners = []
    for y in np.unique(ys):
        row = xs[ys == y]
        for x in (int(row.min()), int(row.max())):
            corners.extend(
                [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
            )
    return np.array(corners, dtype=np.float64)


def convexity(pixels: np.ndarray) -> tuple[float, float]:
    """(hull_area, kappa) for a set of pixels given as (N, 2) integer
    (x, y) coordinates; pixel (x, y) covers the unit square
    [x, x+1] x [y, y+1]."""
    pixels = np.asarray(pixels, dtype=np.int64)
    if pixels.ndim != 2 or pixels.shape[1] != 2 or pixels.shape[0] == 0:
        raise ValueError("expected nonempty (N, 2) pixel coordinates")
    hull = convex_hull(_corner_candidates(pixels))
    hull_area = shoelace_area(hull)
    area = float(np.unique(pixels, axis=0).shape[0])
    return hull_area, area / hull_area


def connected_components(labels: np.ndarray) -> list[RegionStats]:
    """One RegionStats per distinct watershed label >= 1; boundary (-1)
    and background (0) pixels belong to no region."""
    labels = np.asarray(labels)
    stats: list[RegionStats] = []
    for label in np.unique(labels):
        if label < 1:
            continue
        ys, xs = np.nonzero(labels == label)
        pixels = np.stack([xs, ys], axis=1)
        hull_area, kappa = convexity(pixels)
        stats.append(
            RegionStats(
                label=int(label),
                area=int(pixels.shape[0]),
                hull_area=hull_area,
                convexity=kappa,
                centroid_x=float(xs.mean()),
                centroid_y=float(ys.mean()),
            )
        )
    return stats


def select_region(
    stats: list[RegionStats], area_threshold: float
) -> tuple[RegionStats | None, bool]:
    """Most convex region among those larger than the area threshold.

    Ties prefer the larger area, then the smaller label.  When nothing
    clears the threshold the largest region is returned with the fallback
    flag set; an empty list returns (None, True) and the caller falls back
    to the box center.
    """
    if not stats:
        return None, True
    surviving = [s for s in stats if s.area > area_threshold]
    if surviving:
        best = max(surviving, key=lambda s: (s.convexity, s.area, -s.label))
        return best, False
    best = max(stats, key=lambda s: (s.area, -s.label))
    return best, True


def centroid_point(region: RegionStats, fallback: bool = False) -> PointPrompt:
    """Geometric center of the region as a foreground point, ROI frame."""
    return PointPrompt(
        x=region.centroid_x, y=region.centroid_y, label=1, fallback=fallback
    )
