"""Box-to-point pipeline: crop, cluster, clean up, split by watershed,
score convexity, emit the best region's centroid as a foreground point.

Every degenerate stage (uniform crop, empty markers, nothing above the
area threshold) resolves to a flagged fallback instead of an error, so a
batch run never crashes on a weird box.  The fallback point is the box
center (the centroid of the whole ROI treated as one region).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import clustering, regions, watershed
from .errors import DegenerateInputError, EmptyMarkersError, NoBackgroundError
from .morphology import StructuringElement, closing, opening
from .raster import BoundingBox, PointPrompt, as_image, crop_roi, roi_to_image


@dataclass(frozen=True)
class PointGenConfig:
    seed: int = 0
    tau: float = 0.5  # marker threshold as a fraction of the distance peak
    area_threshold_abs: float = 16.0
    area_threshold_rel: float = 0.005  # fraction of ROI area
    morph_radius: int = 1
    kmeans_max_iter: int = 50
    kmeans_tol: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.morph_radius < 1:
            raise ValueError("morph_radius must be >= 1")

    def area_threshold(self, roi_area: int) -> float:
        return max(self.area_threshold_abs, self.area_threshold_rel * roi_area)


def _box_center(box: BoundingBox) -> PointPrompt:
    """Centroid of the whole box region (pixel-center convention)."""
    return PointPrompt(
        x=box.x1 + (box.width - 1) / 2.0,
        y=box.y1 + (box.height - 1) / 2.0,
        label=1,
        fallback=True,
    )


def generate_point(
    image: np.ndarray, box: BoundingBox, cfg: PointGenConfig = PointGenConfig()
) -> PointPrompt:
    """Run the full pipeline; the returned point is in full-image
    coordinates and always lies strictly inside the box."""
    image = as_image(image)
    roi = crop_roi(image, box)
    pixels = clustering.roi_pixels(roi)

    try:
        model = clustering.kmeans_fit(
            pixels, k=2, seed=cfg.seed, max_iter=cfg.kmeans_max_iter, tol=cfg.kmeans_tol
        )
    except DegenerateInputError:
        return _box_center(box)

    binary = clustering.binarize_roi(roi, model)
    se = StructuringElement("square", cfg.morph_radius)
    binary = closing(opening(binary, se), se)

    try:
        field = watershed.distance_transform(binary)
        markers = watershed.extract_markers(field, binary, cfg.tau)
    except (NoBackgroundError, EmptyMarkersError):
        return _box_center(box)

    label_map = watershed.watershed(field, markers)
    stats = regions.connected_components(label_map)
    best, fallback = regions.select_region(
        stats, cfg.area_threshold(roi.shape[0] * roi.shape[1])
    )
    if best is None:
        return _box_center(box)
    point = regions.centroid_point(best, fallback=fallback)
    return roi_to_image(point, box)
