"""Deterministic synthetic scene generator for desk-scale benchmarks.

Scenes imitate an overhead view: a compact object of a distinct color on
a noisy (optionally graded) background, optional distractors such as thin
bright bands and small patches, and a jittered version of the object's
tight box standing in for an imprecise upstream localizer.  Ground-truth
masks come from an exact center-in test on the analytic shape, never from
anti-aliased rendering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SceneSpecError
from .raster import BoundingBox

SHAPES = ("rectangle", "rotated_rectangle", "ellipse", "l_shape")


@dataclass(frozen=True)
class SceneSpec:
    width: int = 128
    height: int = 128
    shape: str = "ellipse"
    object_size: tuple[int, int] = (30, 60)  # min/max extent in pixels
    object_color: tuple[float, float, float] = (0.75, 0.72, 0.65)
    object_noise: float = 0.04
    background_color: tuple[float, float, float] = (0.25, 0.30, 0.28)
    background_noise: float = 0.05
    gradient: float = 0.08  # linear shading amplitude across the canvas
    distractors: int = 2
    jitter: float = 0.15  # per-edge box displacement, fraction of box size
    seed: int = 0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise SceneSpecError(f"unknown shape {self.shape!r}")
        if not 0.0 <= self.jitter <= 0.3:
            raise SceneSpecError("jitter fraction must lie in [0, 0.3]")
        lo, hi = self.object_size
        if lo < 4 or hi < lo:
            raise SceneSpecError("object size range invalid")
        if hi >= min(self.width, self.height):
            raise SceneSpecError("object does not fit the canvas")


@dataclass
class Scene:
    image: np.ndarray  # (H, W, 3) uint8
    gt_mask: np.ndarray  # (H, W) bool
    gt_box: BoundingBox
    jittered_box: BoundingBox


def _object_mask(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    h, w = spec.height, spec.width
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    lo, hi = spec.object_size
    ew = float(rng.uniform(lo, hi))
    eh = float(rng.uniform(lo, hi))
    cx = float(rng.uniform(ew / 2 + 2, w - ew / 2 - 2))
    cy = float(rng.uniform(eh / 2 + 2, h - eh / 2 - 2))

    if spec.shape == "ellipse":
        mask = ((xs - cx) / (ew / 2)) ** 2 + ((ys - cy) / (eh / 2)) ** 2 <= 1.0
    elif spec.shape == "rectangle":
        mask = (np.abs(xs - cx) <= ew / 2) & (np.abs(ys - cy) <= eh / 2)
    elif spec.shape == "rotated_rectangle":
        theta = float(rng.uniform(0, np.pi))
        u = (xs - cx) * np.cos(theta) + (ys - cy) * np.sin(theta)
        v = -(xs - cx) * np.sin(theta) + (ys - cy) * np.cos(theta)
        mask = (np.abs(u) <= ew / 2) & (np.abs(v) <= eh / 2)
    else:  # l_shape: rectangle minus one corner quadrant
        mask = (np.abs(xs - cx) <= ew / 2) & (np.abs(ys - cy) <= eh / 2)
        notch_w = ew * float(rng.uniform(0.35, 0.55))
        notch_h = eh * float(rng.uniform(0.35, 0.55))
        corner = int(rng.integers(4))
        if corner in (0, 1):
            notch_x = xs >= cx + ew / 2 - notch_w
        else:
            notch_x = xs <= cx - ew / 2 + notch_w
        if corner in (0, 2):
            notch_y = ys >= cy + eh / 2 - notch_h
        else:
            notch_y = ys <= cy - eh / 2 + notch_h
        mask &= ~(notch_x & notch_y)
    return mask


def _tight_box(mask: np.ndarray) -> BoundingBox:
    ys, xs = np.nonzero(mask)
    return BoundingBox(
        x1=int(xs.min()), y1=int(ys.min()), x2=int(xs.max()) + 1, y2=int(ys.max()) + 1
    )


def _jitter_box(
    box: BoundingBox, mask: np.ndarray, jitter: float, rng: np.random.Generator
) -> BoundingBox:
    h, w = mask.shape
    bw, bh = box.width, box.height
    x1 = box.x1 + rng.uniform(-jitter, jitter) * bw
    x2 = box.x2 + rng.uniform(-jitter, jitter) * bw
    y1 = box.y1 + rng.uniform(-jitter, jitter) * bh
    y2 = box.y2 + rng.uniform(-jitter, jitter) * bh
    x1 = int(np.clip(round(x1), 0, w - 1))
    x2 = int(np.clip(round(x2), x1 + 1, w))
    y1 = int(np.clip(round(y1), 0, h - 1))
    y2 = int(np.clip(round(y2), y1 + 1, h))
    jittered = BoundingBox(x1, y1, x2, y2)
    if not mask[jittered.y1 : jittered.y2, jittered.x1 : jittered.x2].any():
        return box  # jitter drifted clear of the object: keep the tight box
    return jittered


def _paint_distractors(
    canvas: np.ndarray, gt_mask: np.ndarray, spec: SceneSpec, rng: np.random.Generator
) -> None:
    h, w = spec.height, spec.width
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    bright = np.array(spec.object_color) + 0.12
    for _ in range(spec.distractors):
        kind = int(rng.integers(2))
        if kind == 0:
            # Thin band across the canvas: high contrast, low convexity.
            theta = float(rng.uniform(0, np.pi))
            offset = float(rng.uniform(-0.3, 0.3)) * min(h, w)
            width = float(rng.uniform(1.5, 3.0))
            dist = np.abs(
                (xs - w / 2) * np.sin(theta) - (ys - h / 2) * np.cos(theta) - offset
            )
            sel = dist <= width
        else:
            # Small off-object patch.
            pw = float(rng.uniform(4, 10))
            px = float(rng.uniform(pw, w - pw))
            py = float(rng.uniform(pw, h - pw))
            sel = (np.abs(xs - px) <= pw / 2) & (np.abs(ys - py) <= pw / 2)
        sel &= ~gt_mask
        canvas[sel] = bright


def generate(spec: SceneSpec) -> Scene:
    """Render one scene, deterministic in the spec (seed included)."""
    rng = np.random.default_rng(spec.seed)
    h, w = spec.height, spec.width

    gt_mask = _object_mask(spec, rng)
    if not gt_mask.any():
        raise SceneSpecError("object rendered empty; widen the size range")

    canvas = np.empty((h, w, 3), dtype=np.float64)
    canvas[:] = spec.background_color
    if spec.gradient > 0:
        ramp = np.linspace(-spec.gradient, spec.gradient, w)[np.newaxis, :, np.newaxis]
        canvas += ramp
    _paint_distractors(canvas, gt_mask, spec, rng)
    canvas += rng.normal(0.0, spec.background_noise, size=canvas.shape)

    obj = np.array(spec.object_color) + rng.normal(
        0.0, spec.object_noise, size=(h, w, 3)
    )
    canvas[gt_mask] = obj[gt_mask]

    image = np.clip(canvas * 255.0, 0, 255).round().astype(np.uint8)
    gt_box = _tight_box(gt_mask)
    jittered = _jitter_box(gt_box, gt_mask, spec.jitter, rng)
    return Scene(image=image, gt_mask=gt_mask, gt_box=gt_box, jittered_box=jittered)


def benchmark_specs(
    count: int,
    seed: int = 0,
    jitter: float = 0.15,
    distractors: int = 2,
    base: SceneSpec | None = None,
) -> list[SceneSpec]:
    """Scene specs cycling through the shape catalogue with per-scene
    sub-seeds derived from (seed, index)."""
    from dataclasses import replace

    root = np.random.default_rng(seed)
    base = base if base is not None else SceneSpec()
    specs = []
    for i in range(count):
        specs.append(
            replace(
                base,
                shape=SHAPES[i % len(SHAPES)],
                jitter=jitter,
                distractors=distractors,
                seed=int(root.integers(0, 2**31 - 1)),
            )
        )
    return specs
