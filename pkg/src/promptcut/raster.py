"""Core raster types, ROI cropping and coordinate translation.

Images are plain ``uint8`` arrays of shape (H, W, 3); binary masks are
boolean arrays of shape (H, W).  Boxes are half-open ``[x1, x2) x [y1, y2)``
so that width is ``x2 - x1`` with no off-by-one ambiguity.  The x axis is
the column index, y the row index; a pixel's center sits at its integer
index, so sub-pixel coordinates like region centroids live on the same
grid as the indices themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CoordinateError, InvalidBoxError


def as_image(arr: np.ndarray) -> np.ndarray:
    """Validate and normalize an (H, W, 3) uint8 color image."""
    arr = np.asarray(arr)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image must be at least 1x1, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 image, got dtype {arr.dtype}")
    return arr


def as_mask(arr: np.ndarray) -> np.ndarray:
    """Validate and normalize an (H, W) boolean mask."""
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise ValueError(f"expected (H, W) mask, got shape {arr.shape}")
    if arr.dtype != np.bool_:
        arr = arr.astype(bool)
    return arr


def to_unit(image: np.ndarray) -> np.ndarray:
    """8-bit samples to float64 in [0, 1], the frame all pixel math uses."""
    return np.asarray(image, dtype=np.float64) / 255.0


@dataclass(frozen=True)
class BoundingBox:
    """Half-open pixel box: ``x1 <= x < x2`` and ``y1 <= y < y2``."""

    x1: int
    y1: int
    x2: int
    y2: int

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    def validate(self, image_shape: tuple[int, ...]) -> None:
        h, w = image_shape[0], image_shape[1]
        if not (0 <= self.x1 < self.x2 <= w and 0 <= self.y1 < self.y2 <= h):
            raise InvalidBoxError(
                f"box ({self.x1},{self.y1},{self.x2},{self.y2}) invalid for "
                f"{w}x{h} image"
            )


@dataclass(frozen=True)
class PointPrompt:
    """A labeled point prompt. ``label`` 1 means foreground; ``fallback``
    marks points produced by a degenerate-input fallback rather than the
    full pipeline."""

    x: float
    y: float
    label: int = 1
    fallback: bool = False


def crop_roi(image: np.ndarray, box: BoundingBox) -> np.ndarray:
    """Extract the region of interest as a fresh copy.

    Pixel (u, v) of the result equals image pixel (box.x1 + u, box.y1 + v).
    """
    image = as_image(image)
    box.validate(image.shape)
    return image[box.y1 : box.y2, box.x1 : box.x2].copy()


def roi_to_image(point: PointPrompt, box: BoundingBox) -> PointPrompt:
    """Translate a ROI-frame point back into full-image coordinates."""
    if not (0 <= point.x < box.width and 0 <= point.y < box.height):
        raise CoordinateError(
            f"point ({point.x},{point.y}) outside {box.width}x{box.height} ROI"
        )
    return replace(point, x=point.x + box.x1, y=point.y + box.y1)
