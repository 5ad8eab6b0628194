"""Erosion-seeded iterative mask refinement.

The initial mask is shrunk to a hard-foreground seed and expanded to a
hard-background frontier; the band in between is relabeled by alternating
color-mixture fits and min-cut labelings until the labeling stops moving.
Only the band can change, so the output always sits between the eroded
and dilated input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gmm, graphcut
from .graphcut import TRIMAP_BG, TRIMAP_FG, TRIMAP_FREE, EnergyParams
from .morphology import StructuringElement, dilate, erode
from .raster import as_image, as_mask, to_unit


@dataclass(frozen=True)
class RefineConfig:
    components: int = 5  # mixture size per side
    seed: int = 0
    max_outer_iters: int = 5
    epsilon: float = 0.001  # stop when the changed-pixel fraction drops below
    erosion_scale: float = 0.02  # seed radius as a fraction of the mask bbox
    band_scale: float = 3.0  # background frontier radius = band_scale * seed radius
    gmm_max_iter: int = 20
    gmm_tol: float = 1e-5
    gmm_reg_eps: float = 1e-4
    energy: EnergyParams = EnergyParams()

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")


@dataclass
class IterationRecord:
    index: int
    energy: float
    changed: int


@dataclass
class RefineLog:
    iterations: list[IterationRecord] = field(default_factory=list)
    degenerate: bool = False
    erosion_radius: int = 0
    band_radius: int = 0


def seed_radius(mask: np.ndarray, scale: float = 0.02) -> int:
    """Erosion radius relative to the mask's bounding box, floored at 1 so
    seeds stay inside thin objects."""
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return 1
    bbox_h = int(ys.max() - ys.min() + 1)
    bbox_w = int(xs.max() - xs.min() + 1)
    return max(1, int(scale * min(bbox_w, bbox_h)))


def build_trimap(mask: np.ndarray, r_seed: int, r_band: int) -> np.ndarray:
    """Hard foreground = eroded mask, hard background = beyond the dilated
    mask, free band in between."""
    trimap = np.full(mask.shape, TRIMAP_FREE, dtype=np.int8)
    trimap[erode(mask, StructuringElement("disk", r_seed))] = TRIMAP_FG
    trimap[~dilate(mask, StructuringElement("disk", r_band))] = TRIMAP_BG
    return trimap


def labeling_energy(
    image: np.ndarray,
    mask: np.ndarray,
    fg: gmm.GmmModel,
    bg: gmm.GmmModel,
    params: EnergyParams = EnergyParams(),
    trimap: np.ndarray | None = None,
) -> float:
    """Data cost of the labeling plus the weighted smoothness cost over cut
    8-neighbor edges.  Pixels pinned by the trimap carry no data cost."""
    image = as_image(image)
    mask = as_mask(mask)
    colors = to_unit(image)
    flat = colors.reshape(-1, 3)
    data_fg = -gmm.log_prob(fg, flat).reshape(mask.shape)
    data_bg = -gmm.log_prob(bg, flat).reshape(mask.shape)
    if trimap is None:
        free = np.ones(mask.shape, dtype=bool)
    else:
        free = np.asarray(trimap) == TRIMAP_FREE
    data = float(np.where(mask, data_fg, data_bg)[free].sum())

    beta = graphcut.contrast_scale(image)
    smooth = 0.0
    h, w = mask.shape
    for (dy, dx, dist), d2 in zip(
        graphcut._OFFSETS, graphcut._pair_sq_diffs(colors)
    ):
        if dx >= 0:
            a = mask[: h - dy, : w - dx]
            b = mask[dy:, dx:]
        else:
            a = mask[: h - dy, -dx:]
            b = mask[dy:, : w + dx]
        cut = a != b
        smooth += float(
            (params.gamma / dist * np.exp(-beta * d2))[cut].sum()
        )
    return data + params.lam * smooth


def refine_mask(
    image: np.ndarray,
    initial: np.ndarray,
    cfg: RefineConfig = RefineConfig(),
) -> tuple[np.ndarray, RefineLog]:
    """Refine a coarse mask; returns the new mask plus the per-iteration
    energy/change log.

    Degenerate inputs (empty mask, full-frame mask, or a seed that erodes
    away entirely) return the input unchanged with the log flagged.
    """
    image = as_image(image)
    initial = as_mask(initial)
    if initial.shape != image.shape[:2]:
        raise ValueError("mask shape does not match image")
    log = RefineLog()

    if not initial.any() or initial.all():
        log.degenerate = True
        return initial.copy(), log

    r_seed = seed_radius(initial, cfg.erosion_scale)
    r_band = max(r_seed + 1, int(round(cfg.band_scale * r_seed)))
    trimap = build_trimap(initial, r_seed, r_band)
    log.erosion_radius = r_seed
    log.band_radius = r_band
    if not (trimap == TRIMAP_FG).any():
        log.degenerate = True
        return initial.copy(), log

    colors = to_unit(image).reshape(-1, 3)
    current = initial.copy()
    fg_model: gmm.GmmModel | None = None
    bg_model: gmm.GmmModel | None = None
    total = current.size

    def fit_side(samples: np.ndarray, warm: gmm.GmmModel | None) -> gmm.GmmModel:
        k = min(cfg.components, samples.shape[0])
        if warm is not None and warm.k != k:
            warm = None
        return gmm.fit(
            samples,
            k,
            seed=cfg.seed,
            max_iter=cfg.gmm_max_iter,
            tol=cfg.gmm_tol,
            reg_eps=cfg.gmm_reg_eps,
            init_model=warm,
        )

    for index in range(1, cfg.max_outer_iters + 1):
        fg_model = fit_side(colors[current.ravel()], fg_model)
        bg_model = fit_side(colors[~current.ravel()], bg_model)
        new = graphcut.segment(image, fg_model, bg_model, trimap, cfg.energy)
        changed = int(np.count_nonzero(new != current))
        energy = labeling_energy(
            image, new, fg_model, bg_model, cfg.energy, trimap=trimap
        )
        log.iterations.append(IterationRecord(index=index, energy=energy, changed=changed))
        current = new
        if changed / total < cfg.epsilon:
            break
    return current, log
