"""Command-line surface: point prompts, mask refinement, evaluation and
synthetic scene generation.

All commands are deterministic given (inputs, config, seed) and stamp the
config hash into their outputs.  Failures emit one machine-readable JSON
object ``{"kind", "message", "path"}`` on stderr with a stable exit code:
2 io/usage, 3 dimension mismatch, 4 unmatched eval files, 5 bad scene spec.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, imageio, metrics, synth
from .config import ToolConfig, load_config
from .errors import (
    InvalidBoxError,
    PromptcutError,
    SceneSpecError,
    ShapeMismatchError,
)
from .pointgen import generate_point
from .raster import BoundingBox
from .refine import refine_mask


class _CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, path: str = ""):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.path = path


def _fail(code: int, kind: str, message: str, path: str = "") -> _CliError:
    return _CliError(code, kind, message, path)


def _parse_box(text: str) -> BoundingBox:
    try:
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError
    except ValueError:
        raise _fail(2, "usage", f"box must be 'x1,y1,x2,y2', got {text!r}") from None
    return BoundingBox(*parts)


def _load_image(path: str) -> np.ndarray:
    try:
        return imageio.read_image(path)
    except (FileNotFoundError, OSError) as exc:
        raise _fail(2, "io", f"cannot read image: {exc}", path) from None


def _load_mask(path: str) -> np.ndarray:
    try:
        return imageio.read_mask(path)
    except (FileNotFoundError, OSError) as exc:
        raise _fail(2, "io", f"cannot read mask: {exc}", path) from None


def _load_tool_config(path: str | None) -> ToolConfig:
    if path is None:
        return ToolConfig()
    try:
        return load_config(path)
    except FileNotFoundError as exc:
        raise _fail(2, "io", f"cannot read config: {exc}", path) from None
    except (ValueError, TypeError) as exc:
        raise _fail(2, "usage", f"bad config: {exc}", path) from None


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        imageio.write_text(path, text)


def cmd_point(args) -> int:
    cfg = _load_tool_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    image = _load_image(args.image)
    box = _parse_box(args.box)
    try:
        point = generate_point(image, box, cfg.pointgen())
    except InvalidBoxError as exc:
        raise _fail(2, "usage", str(exc), args.image) from None
    record = {
        "image": args.image,
        "box": [box.x1, box.y1, box.x2, box.y2],
        "points": [
            {"x": point.x, "y": point.y, "label": point.label, "fallback": point.fallback}
        ],
        "tool_version": __version__,
        "config_hash": cfg.hash(),
    }
    _dump_json(record, args.output)
    return 0


def cmd_refine(args) -> int:
    cfg = _load_tool_config(args.config)
    image = _load_image(args.image)
    mask = _load_mask(args.mask)
    if mask.shape != image.shape[:2]:
        raise _fail(
            3,
            "shape",
            f"mask {mask.shape[1]}x{mask.shape[0]} does not match image "
            f"{image.shape[1]}x{image.shape[0]}",
            args.mask,
        )
    refined, log = refine_mask(image, mask, cfg.refine())
    imageio.write_mask(args.output, refined)
    log_path = args.log if args.log else args.output + ".log.json"
    _dump_json(
        {
            "iterations": [
                {"index": r.index, "energy": r.energy, "changed": r.changed}
                for r in log.iterations
            ],
            "degenerate": log.degenerate,
            "erosion_radius": log.erosion_radius,
            "band_radius": log.band_radius,
            "tool_version": __version__,
            "config_hash": cfg.hash(),
        },
        log_path,
    )
    return 0


_MASK_SUFFIXES = (".png", ".pgm", ".ppm", ".pnm")


def cmd_eval(args) -> int:
    pred_dir, gt_dir = Path(args.pred), Path(args.gt)
    for d in (pred_dir, gt_dir):
        if not d.is_dir():
            raise _fail(2, "io", "not a directory", str(d))
    categories = {}
    if args.categories:
        try:
            categories = json.loads(Path(args.categories).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _fail(2, "io", f"cannot read category map: {exc}", args.categories) from None

    def listing(d: Path) -> dict[str, Path]:
        return {p.name: p for p in d.iterdir() if p.suffix.lower() in _MASK_SUFFIXES}

    preds, gts = listing(pred_dir), listing(gt_dir)
    matched = sorted(preds.keys() & gts.keys())
    skipped = sorted(preds.keys() ^ gts.keys())

    records = []
    for name in matched:
        pred = _load_mask(str(preds[name]))
        gt = _load_mask(str(gts[name]))
        if pred.shape != gt.shape:
            raise _fail(3, "shape", f"mask shapes differ for {name}", str(preds[name]))
        category = categories.get(name, categories.get(Path(name).stem))
        records.append(metrics.iou(pred, gt, sample_id=name, category=category))

    if not records:
        raise _fail(4, "eval", "no matching mask files between directories", args.pred)
    report = metrics.aggregate(records)
    payload = report.to_dict()
    payload["skipped"] = skipped
    payload["tool_version"] = __version__
    _dump_json(payload, args.output)
    return 4 if skipped else 0


def cmd_synth(args) -> int:
    base = synth.SceneSpec()
    if args.spec:
        try:
            raw = json.loads(Path(args.spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _fail(2, "io", f"cannot read scene spec: {exc}", args.spec) from None
        try:
            if "object_size" in raw:
                raw["object_size"] = tuple(raw["object_size"])
            for key in ("object_color", "background_color"):
                if key in raw:
                    raw[key] = tuple(raw[key])
            base = dataclasses.replace(base, **raw)
        except (TypeError, SceneSpecError) as exc:
            raise _fail(5, "spec", str(exc), args.spec) from None

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise _fail(2, "io", f"cannot create output dir: {exc}", args.out) from None

    try:
        specs = synth.benchmark_specs(
            args.count, seed=args.seed, jitter=base.jitter,
            distractors=base.distractors, base=base,
        )
        for i, spec in enumerate(specs):
            scene = synth.generate(spec)
            stem = f"scene_{i:04d}"
            imageio.write_image(out / f"{stem}.png", scene.image)
            imageio.write_mask(out / f"{stem}_mask.png", scene.gt_mask)
            boxes = {
                "gt_box": [scene.gt_box.x1, scene.gt_box.y1, scene.gt_box.x2, scene.gt_box.y2],
                "jittered_box": [
                    scene.jittered_box.x1,
                    scene.jittered_box.y1,
                    scene.jittered_box.x2,
                    scene.jittered_box.y2,
                ],
                "seed": args.seed,
                "index": i,
                "tool_version": __version__,
            }
            _dump_json(boxes, str(out / f"{stem}_boxes.json"))
    except SceneSpecError as exc:
        raise _fail(5, "spec", str(exc), args.spec or "") from None
    except OSError as exc:
        raise _fail(2, "io", str(exc), args.out) from None
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promptcut",
        description="Point-prompt generation and mask refinement for promptable segmenters",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="turn a bounding box into a foreground point prompt")
    p.add_argument("--image", required=True, help="input image (PNG/PGM/PPM)")
    p.add_argument("--box", required=True, help="bounding box as 'x1,y1,x2,y2'")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, help="override the RNG seed")
    p.add_argument("--output", "-o", help="prompt JSON path (default: stdout)")
    p.set_defaults(fn=cmd_point)

    p = sub.add_parser("refine", help="refine a coarse mask against its image")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True, help="mask image, 0=background nonzero=foreground")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--output", "-o", required=True, help="refined mask path")
    p.add_argument("--log", help="iteration log JSON (default: <output>.log.json)")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("eval", help="score predicted masks against ground truth")
    p.add_argument("--pred", required=True, help="directory of predicted masks")
    p.add_argument("--gt", required=True, help="directory of ground-truth masks")
    p.add_argument("--categories", help="JSON map of file name to category")
    p.add_argument("--output", "-o", help="report JSON path (default: stdout)")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("synth", help="generate synthetic benchmark scenes")
    p.add_argument("--spec", help="scene spec JSON overriding the defaults")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _CliError as exc:
        sys.stderr.write(
            json.dumps({"kind": exc.kind, "message": str(exc), "path": exc.path}) + "\n"
        )
        return exc.code
    except ShapeMismatchError as exc:
        sys.stderr.write(json.dumps({"kind": "shape", "message": str(exc), "path": ""}) + "\n")
        return 3
    except SceneSpecError as exc:
        sys.stderr.write(json.dumps({"kind": "spec", "message": str(exc), "path": ""}) + "\n")
        return 5
    except PromptcutError as exc:
        sys.stderr.write(json.dumps({"kind": "domain", "message": str(exc), "path": ""}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
