"""Binary morphology with square and disk structuring elements.

Border policy: pixels outside the frame are background.  Erosion therefore
shrinks masks at image edges and dilation never reaches outside.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import NUMBA_ENABLED, njit
from .raster import as_mask


@dataclass(frozen=True)
class StructuringElement:
    """``square`` of side 2r+1 or Euclidean ``disk`` of radius r."""

    shape: str = "square"
    radius: int = 1

    def __post_init__(self):
        if self.shape not in ("square", "disk"):
            raise ValueError(f"unknown element shape {self.shape!r}")
        if self.radius < 1:
            raise ValueError("element radius must be >= 1")

    def offsets(self) -> np.ndarray:
        """(K, 2) array of (dy, dx) offsets; always contains (0, 0)."""
        r = self.radius
        dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
        if self.shape == "disk":
            keep = dy * dy + dx * dx <= r * r
        else:
            keep = np.ones_like(dy, dtype=bool)
        return np.stack([dy[keep], dx[keep]], axis=1).astype(np.int64)


def _erode_kernel(mask, offs, out):
    h, w = mask.shape
    k = offs.shape[0]
    for y in range(h):
        for x in range(w):
            ok = True
            for i in range(k):
                yy = y + offs[i, 0]
                xx = x + offs[i, 1]
                if yy < 0 or yy >= h or xx < 0 or xx >= w or not mask[yy, xx]:
                    ok = False
                    break
            out[y, x] = ok


def _dilate_kernel(mask, offs, out):
    h, w = mask.shape
    k = offs.shape[0]
    for y in range(h):
        for x in range(w):
            hit = False
            for i in range(k):
                yy = y + offs[i, 0]
                xx = x + offs[i, 1]
                if 0 <= yy < h and 0 <= xx < w and mask[yy, xx]:
                    hit = True
                    break
            out[y, x] = hit


_erode_jit = njit(_erode_kernel)
_dilate_jit = njit(_dilate_kernel)


def _shifted(mask: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """mask translated by (-dy, -dx) with background fill, so that
    result[y, x] == mask[y + dy, x + dx] (False outside the frame)."""
    h, w = mask.shape
    out = np.zeros_like(mask)
    ys = slice(max(0, dy), min(h, h + dy))
    xs = slice(max(0, dx), min(w, w + dx))
    yd = slice(max(0, -dy), min(h, h - dy))
    xd = slice(max(0, -dx), min(w, w - dx))
    out[yd, xd] = mask[ys, xs]
    return out


def _erode_numpy(mask: np.ndarray, offs: np.ndarray) -> np.ndarray:
    out = np.ones_like(mask)
    for dy, dx in offs:
        out &= _shifted(mask, int(dy), int(dx))
    return out


def _dilate_numpy(mask: np.ndarray, offs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(mask)
    for dy, dx in offs:
        out |= _shifted(mask, int(dy), int(dx))
    return out


def erode(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    mask = as_mask(mask)
    offs = se.offsets()
    if NUMBA_ENABLED:
        out = np.empty_like(mask)
        _erode_jit(mask, offs, out)
        return out
    return _erode_numpy(mask, offs)


def dilate(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    mask = as_mask(mask)
    offs = se.offsets()
    if NUMBA_ENABLED:
        out = np.empty_like(mask)
        _dilate_jit(mask, offs, out)
        return out
    return _dilate_numpy(mask, offs)


def opening(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    return dilate(erode(mask, se), se)


def closing(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    return erode(dilate(mask, se), se)


_KINDS = {"erode": erode, "dilate": dilate, "open": opening, "close": closing}


def morph(kind: str, mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Dispatch on ``kind`` in {erode, dilate, open, close}."""
    try:
        fn = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown morphology kind {kind!r}") from None
    return fn(mask, se)
