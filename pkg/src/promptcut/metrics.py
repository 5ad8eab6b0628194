"""Segmentation evaluation: IoU, pooled overall IoU, mean IoU and
precision at IoU thresholds.

Both-empty masks count as perfect agreement (IoU 1.0); Pr@X uses a strict
inequality ("exceeds the threshold").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, ShapeMismatchError
from .raster import as_mask

DEFAULT_THRESHOLDS = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class EvalRecord:
    sample_id: str
    intersection: int
    union: int
    category: str | None = None

    @property
    def iou(self) -> float:
        return 1.0 if self.union == 0 else self.intersection / self.union


@dataclass
class MetricsReport:
    oiou: float
    miou: float
    precision: dict[float, float]  # threshold -> fraction of samples above
    n_samples: int
    per_category: dict[str, float] | None = None
    category_miou: float | None = None

    def to_dict(self) -> dict:
        out = {
            "oiou": self.oiou,
            "miou": self.miou,
            "pr": {f"{t:g}": v for t, v in sorted(self.precision.items())},
            "n_samples": self.n_samples,
        }
        if self.per_category is not None:
            out["per_category_miou"] = dict(sorted(self.per_category.items()))
            out["category_miou"] = self.category_miou
        return out


def iou(
    pred: np.ndarray, gt: np.ndarray, sample_id: str = "", category: str | None = None
) -> EvalRecord:
    pred = as_mask(pred)
    gt = as_mask(gt)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"mask shapes differ: {pred.shape} vs {gt.shape}")
    inter = int(np.count_nonzero(pred & gt))
    union = int(np.count_nonzero(pred | gt))
    return EvalRecord(sample_id=sample_id, intersection=inter, union=union, category=category)


def aggregate(
    records: list[EvalRecord],
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS,
) -> MetricsReport:
    """Pool intersections/unions for oIoU, average per-sample IoUs for
    mIoU, and count strict threshold exceedances for Pr@X.  A per-category
    table is added when every record carries a category."""
    if not records:
        raise EmptyInputError("no evaluation records")
    total_i = sum(r.intersection for r in records)
    total_u = sum(r.union for r in records)
    ious = np.array([r.iou for r in records], dtype=np.float64)
    oiou = 1.0 if total_u == 0 else total_i / total_u
    precision = {
        float(t): float(np.count_nonzero(ious > t)) / len(records) for t in thresholds
    }

    per_category = None
    category_miou = None
    if all(r.category is not None for r in records):
        per_category = {}
        for r in records:
            per_category.setdefault(r.category, []).append(r.iou)
        per_category = {c: float(np.mean(v)) for c, v in per_category.items()}
        category_miou = float(np.mean(list(per_category.values())))

    return MetricsReport(
        oiou=float(oiou),
        miou=float(ious.mean()),
        precision=precision,
        n_samples=len(records),
        per_category=per_category,
        category_miou=category_miou,
    )
