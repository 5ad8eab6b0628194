"""promptcut: training-free point-prompt generation and mask refinement
for promptable segmentation models.

Two engines built from classic pixel machinery:

* box -> point: crop the box, split its colors into two clusters, clean
  the tentative foreground with morphology, separate touching regions by
  a distance-transform watershed, keep the most convex region and emit
  its centroid as a foreground point prompt.
* mask refinement: erode the mask into a trusted seed, model foreground
  and background colors with Gaussian mixtures, and relabel the uncertain
  band by exact min-cut energy minimization, iterating to convergence.
"""

from .clustering import ClusterModel, binarize_roi, kmeans_fit, kmeans_pp_init
from .gmm import GmmModel, fit as fit_gmm, log_prob, posterior
from .graphcut import EnergyParams, FlowNetwork, GridGraph, build_graph, max_flow, segment
from .metrics import EvalRecord, MetricsReport, aggregate, iou
from .morphology import StructuringElement, morph
from .pointgen import PointGenConfig, generate_point
from .raster import BoundingBox, PointPrompt, crop_roi, roi_to_image
from .refine import RefineConfig, RefineLog, labeling_energy, refine_mask
from .regions import RegionStats, connected_components, convexity, select_region
from .synth import Scene, SceneSpec, generate
from .watershed import distance_transform, extract_markers
from . import watershed  # noqa: F401  (flood lives at promptcut.watershed.watershed)

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "ClusterModel",
    "EnergyParams",
    "EvalRecord",
    "FlowNetwork",
    "GmmModel",
    "GridGraph",
    "MetricsReport",
    "PointGenConfig",
    "PointPrompt",
    "RefineConfig",
    "RefineLog",
    "RegionStats",
    "Scene",
    "SceneSpec",
    "StructuringElement",
    "aggregate",
    "binarize_roi",
    "build_graph",
    "connected_components",
    "convexity",
    "crop_roi",
    "distance_transform",
    "extract_markers",
    "fit_gmm",
    "generate",
    "generate_point",
    "iou",
    "kmeans_fit",
    "kmeans_pp_init",
    "labeling_energy",
    "log_prob",
    "max_flow",
    "morph",
    "posterior",
    "refine_mask",
    "roi_to_image",
    "segment",
    "select_region",
    "__version__",
]
