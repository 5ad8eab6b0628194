"""Image and mask file handling (PNG, PGM, PPM) with atomic writes."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from .raster import as_image, as_mask


def read_image(path: str | Path) -> np.ndarray:
    """Color image as (H, W, 3) uint8; grayscale inputs are replicated."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return as_image(arr)


def read_mask(path: str | Path) -> np.ndarray:
    """Binary mask; any nonzero sample counts as foreground."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return arr > 0


def _atomic_save(im: Image.Image, path: str | Path, fmt: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=path.suffix)
    os.close(fd)
    try:
        im.save(tmp, format=fmt)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_for(path: Path, mode: str) -> str:
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        return "PPM"  # Pillow picks the right PNM subformat from the mode
    return "PNG"


def write_image(path: str | Path, image: np.ndarray) -> None:
    path = Path(path)
    _atomic_save(Image.fromarray(as_image(image), mode="RGB"), path, _format_for(path, "RGB"))


def write_mask(path: str | Path, mask: np.ndarray) -> None:
    """Masks serialize strictly as {0, 255} single-channel images."""
    path = Path(path)
    data = np.where(as_mask(mask), 255, 0).astype(np.uint8)
    _atomic_save(Image.fromarray(data, mode="L"), path, _format_for(path, "L"))


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=path.suffix)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
