"""KMeans++ color clustering of ROI pixels and foreground binarization.

Colors live in unit space (float64 in [0, 1]).  Everything is seeded and
deterministic: fixed seed means a bit-identical model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError
from .raster import as_image, to_unit


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, 3)
    assignment: np.ndarray  # (N,) int32, nearest centroid, ties -> lowest index
    inertia: float
    n_iter: int = 0
    inertia_history: list[float] = field(default_factory=list)


def _check_pixels(pixels: np.ndarray, k: int) -> np.ndarray:
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim != 2:
        raise ValueError(f"expected (N, C) pixel matrix, got shape {pixels.shape}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if pixels.shape[0] < k:
        raise DegenerateInputError(f"{pixels.shape[0]} pixels < k={k}")
    return pixels


def _sq_dist_to_centroids(pixels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(N, k) squared Euclidean distances."""
    diff = pixels[:, np.newaxis, :] - centroids[np.newaxis, :, :]
    return np.einsum("nkc,nkc->nk", diff, diff)


def kmeans_pp_init(pixels: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """D^2-weighted seeding: the first centroid uniform at random, each
    next one drawn with probability proportional to its squared distance
    to the nearest centroid chosen so far."""
    pixels = _check_pixels(pixels, k)
    if np.unique(pixels, axis=0).shape[0] < k:
        raise DegenerateInputError(f"fewer than k={k} distinct pixels")
    rng = np.random.default_rng(seed)
    n = pixels.shape[0]
    centroids = np.empty((k, pixels.shape[1]), dtype=np.float64)
    centroids[0] = pixels[rng.integers(n)]
    d2 = np.sum((pixels - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        # Distinct-pixel precondition guarantees some positive weight left.
        idx = rng.choice(n, p=d2 / total)
        centroids[j] = pixels[idx]
        d2 = np.minimum(d2, np.sum((pixels - centroids[j]) ** 2, axis=1))
    return centroids


def kmeans_fit(
    pixels: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 50,
    tol: float = 1e-4,
) -> ClusterModel:
    """Lloyd iterations from the ++ init.

    Stops when the largest centroid movement falls below ``tol`` or after
    ``max_iter`` rounds.  A cluster that empties out is re-seeded at the
    point farthest from its assigned centroid.
    """
    pixels = _check_pixels(pixels, k)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    centroids = kmeans_pp_init(pixels, k, seed)

    history: list[float] = []
    assignment = np.zeros(pixels.shape[0], dtype=np.int32)
    inertia = 0.0
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _sq_dist_to_centroids(pixels, centroids)
        assignment = np.argmin(d2, axis=1).astype(np.int32)
        inertia = float(d2[np.arange(pixels.shape[0]), assignment].sum())
        history.append(inertia)

        new_centroids = centroids.copy()
        counts = np.bincount(assignment, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                new_centroids[j] = pixels[assignment == j].mean(axis=0)
            else:
                farthest = int(np.argmax(d2[np.arange(pixels.shape[0]), assignment]))
                new_centroids[j] = pixels[farthest]
        move = float(np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))))
        centroids = new_centroids
        if move < tol:
            break

    # Final assignment against the converged centroids.
    d2 = _sq_dist_to_centroids(pixels, centroids)
    assignment = np.argmin(d2, axis=1).astype(np.int32)
    inertia = float(d2[np.arange(pixels.shape[0]), assignment].sum())
    history.append(inertia)
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignment=assignment,
        inertia=inertia,
        n_iter=n_iter,
        inertia_history=history,
    )


def binarize_roi(roi: np.ndarray, model: ClusterModel) -> np.ndarray:
    """Turn a 2-cluster model into a tentative foreground map.

    The foreground cluster is the one whose members concentrate in the
    central half-size window of the ROI (the grounding box is assumed
    centered on the object).  Ties go to the smaller cluster, then to
    cluster 0.
    """
    roi = as_image(roi)
    h, w = roi.shape[0], roi.shape[1]
    if model.k != 2:
        raise ValueError(f"binarize_roi needs a 2-cluster model, got k={model.k}")
    if model.assignment.shape[0] != h * w:
        raise ValueError("model assignment does not cover the ROI")
    assign = model.assignment.reshape(h, w)

    y0, x0 = h // 4, w // 4
    y1, x1 = y0 + (h + 1) // 2, x0 + (w + 1) // 2
    window = assign[y0:y1, x0:x1]

    counts = np.bincount(assign.ravel(), minlength=2).astype(np.float64)
    in_window = np.bincount(window.ravel(), minlength=2).astype(np.float64)
    frac = np.where(counts > 0, in_window / np.maximum(counts, 1), 0.0)

    if frac[0] != frac[1]:
        fg = int(np.argmax(frac))
    elif counts[0] != counts[1]:
        fg = int(np.argmin(counts))
    else:
        fg = 0
    return assign == fg


def roi_pixels(roi: np.ndarray) -> np.ndarray:
    """Flatten a ROI into the (N, 3) unit-color feature matrix."""
    roi = as_image(roi)
    return to_unit(roi).reshape(-1, 3)
