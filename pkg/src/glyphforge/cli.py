"""Command-line surface for batch dataset work.

Subcommands: synth (write a synthetic dataset), solve (anneal layouts
for a dataset or single annotation), eval (score layouts and print a
metric table), validate (check a layout record file against a sample),
and features (inspect patch features of one mask).

Exit codes are stable for scripting: 0 success, 2 I/O failure,
3 unrecognized constraint text, 4 dataset errors, 5 schema violations.
GLYPHFORGE_THREADS caps worker threads for batch commands.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .baselines import layout_rule_a, layout_rule_b
from .constraints import check_constraint, parse_constraint
from .compositor import compose, render_png
from .core import GlyphElement, Layout, LogoInstance
from .errors import (
    DatasetError,
    MaskCountMismatchError,
    MissingFileError,
    SchemaError,
    UnrecognizedConstraintError,
)
from .featpipe import adaptive_avg_pool, patch_features
from .metrics import evaluate
from .schema import (
    load_dataset,
    load_mask_png,
    parse_annotation,
    parse_layout_record,
    record_from_layout,
    record_to_layout,
    serialize_layout_record,
)
from .solver import SolverConfig, describe_layout, solve
from .synth import synthesize_dataset


def _worker_count() -> int:
    env = os.environ.get("GLYPHFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return min(8, os.cpu_count() or 1)


def _derived_seed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _load_solver_config(args) -> SolverConfig:
    cfg = SolverConfig()
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        cfg = SolverConfig.from_dict(data)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_synth(args) -> int:
    manifest = synthesize_dataset(
        args.count, args.seed or 0, args.out, workers=_worker_count()
    )
    n = len(manifest.samples)
    total = sum(len(s.text) for s in manifest.samples)
    print(f"wrote {n} samples, {total} glyphs, {total / n:.2f} glyphs/image -> {args.out}")
    return 0


def _single_annotation_instance(path: Path) -> tuple[str, LogoInstance]:
    """Build an instance from one annotation.json plus sibling glyph PNGs."""
    ann = parse_annotation(path.read_text(encoding="utf-8"))
    mask_files = sorted(
        path.parent.glob("glyph_*.png"),
        key=lambda p: int(p.stem.split("_")[1]),
    )
    if len(mask_files) != len(ann.text):
        raise MaskCountMismatchError(
            f"{len(mask_files)} glyph masks beside {path.name} for text {ann.text!r}"
        )
    glyphs = tuple(
        GlyphElement(char=ann.text[k], raster=load_mask_png(f), index=k)
        for k, f in enumerate(mask_files)
    )
    constraint = parse_constraint(ann.constraint_text) if ann.constraint_text else None
    instance = LogoInstance(
        text=ann.text,
        glyphs=glyphs,
        canvas_w=ann.canvas_w,
        canvas_h=ann.canvas_h,
        constraint=constraint,
    )
    return path.parent.name or "sample", instance


def _solve_one(sample_id: str, instance: LogoInstance, args, cfg: SolverConfig,
               out_root: Path) -> None:
    constraint = instance.constraint
    if args.constraint:
        constraint = parse_constraint(args.constraint)
    sample_cfg = replace(cfg, seed=_derived_seed(cfg.seed, sample_id))
    layout, _ = solve(instance, constraint, sample_cfg)
    details, _ = describe_layout(layout, instance.glyphs)
    record = record_from_layout(list(instance.text), layout, details=list(details))
    sample_dir = out_root / sample_id
    sample_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write_text(sample_dir / "layout.json", serialize_layout_record(record) + "\n")
    if args.render:
        occ = compose(instance, layout)
        tmp = sample_dir / "render.png.tmp"
        render_png(occ, tmp)
        os.replace(tmp, sample_dir / "render.png")


def cmd_solve(args) -> int:
    if args.constraint:
        parse_constraint(args.constraint)  # fail fast before any work
    cfg = _load_solver_config(args)
    src = Path(args.input)
    if src.is_file():
        pairs = [_single_annotation_instance(src)]
    else:
        manifest, instances = load_dataset(src)
        pairs = [(s.sample_id, inst) for s, inst in zip(manifest.samples, instances)]
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)

    workers = _worker_count()
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(
                lambda p: _solve_one(p[0], p[1], args, cfg, out_root), pairs
            ))
    else:
        for sample_id, inst in pairs:
            _solve_one(sample_id, inst, args, cfg, out_root)
    print(f"solved {len(pairs)} sample(s) -> {out_root}")
    return 0


def _layouts_for_source(args, manifest, instances) -> list[Layout]:
    source = args.source
    layouts = []
    for s, inst in zip(manifest.samples, instances):
        if source == "gt":
            layouts.append(inst.layout)
        elif source == "rule-a":
            layouts.append(layout_rule_a(inst.glyphs, inst.canvas_w, inst.canvas_h))
        elif source == "rule-b":
            layouts.append(layout_rule_b(
                inst.glyphs, inst.canvas_w, inst.canvas_h,
                seed=_derived_seed(args.seed or 0, s.sample_id),
            ))
        else:
            record_path = Path(source) / s.sample_id / "layout.json"
            if not record_path.is_file():
                raise MissingFileError(f"no layout.json for sample {s.sample_id} under {source}")
            record = parse_layout_record(
                record_path.read_text(encoding="utf-8"), expected_words=list(s.text)
            )
            layouts.append(record_to_layout(record))
    return layouts


def cmd_eval(args) -> int:
    manifest, instances = load_dataset(args.dataset)
    layouts = _layouts_for_source(args, manifest, instances)

    rows = []
    any_constraint = False
    for s, inst, layout in zip(manifest.samples, instances, layouts):
        report = evaluate(inst, layout)
        violated = None
        if inst.constraint is not None:
            any_constraint = True
            violated = not check_constraint(layout, inst.constraint).satisfied
        rows.append({
            "id": s.sample_id,
            "iou": report.overlap_iou,
            "visual_balance": report.visual_balance,
            "ratio": report.ratio_consistency,
            "violated": violated,
        })

    n = len(rows)
    mean = {
        "iou": sum(r["iou"] for r in rows) / n,
        "visual_balance": sum(r["visual_balance"] for r in rows) / n,
        "ratio": sum(r["ratio"] for r in rows) / n,
    }
    vio = None
    if any_constraint:
        flagged = [r for r in rows if r["violated"] is not None]
        vio = sum(1 for r in flagged if r["violated"]) / len(flagged)

    header = f"{'Sample':<10} {'IoU':>8} {'V.B':>8} {'Ratio':>8}"
    if any_constraint:
        header += f" {'ViO':>5}"
    print(header)
    for r in rows:
        line = f"{r['id']:<10} {r['iou']:>8.2f} {r['visual_balance']:>8.2f} {r['ratio']:>8.2f}"
        if any_constraint:
            mark = "-" if r["violated"] is None else ("yes" if r["violated"] else "no")
            line += f" {mark:>5}"
        print(line)
    mean_line = f"{'mean':<10} {mean['iou']:>8.2f} {mean['visual_balance']:>8.2f} {mean['ratio']:>8.2f}"
    if any_constraint:
        mean_line += f" {vio:>5.2f}"
    print(mean_line)

    if args.report:
        payload = {
            "report_version": 1,
            "source": args.source,
            "samples": rows,
            "mean": mean,
            "vio": vio,
        }
        _atomic_write_text(Path(args.report), json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_validate(args) -> int:
    manifest, _ = load_dataset(args.dataset)
    if args.sample:
        matches = [s for s in manifest.samples if s.sample_id == args.sample]
        if not matches:
            raise MissingFileError(f"no sample {args.sample!r} in {args.dataset}")
        sample = matches[0]
    else:
        sample = manifest.samples[0]
    text = Path(args.record).read_text(encoding="utf-8")
    parse_layout_record(text, expected_words=list(sample.text))
    print(f"valid layout record for sample {sample.sample_id} ({sample.text!r})")
    return 0


def _pool_shape(spec: str) -> tuple[int, int]:
    try:
        r, c = (int(v) for v in spec.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {spec!r}")
    if r < 1 or c < 1:
        raise argparse.ArgumentTypeError("pool dims must be >= 1")
    return r, c


def cmd_features(args) -> int:
    raster = load_mask_png(Path(args.mask))
    grid = patch_features(raster, args.grid)
    print(f"patch features: {grid.rows}x{grid.cols}x{grid.dim} "
          f"(mean {float(grid.data.mean()):.4f})")
    if args.pool:
        r, c = args.pool
        pooled = adaptive_avg_pool(grid, r, c)
        print(f"pooled to {pooled.rows}x{pooled.cols}x{pooled.dim} "
              f"(mean {float(pooled.data.mean()):.4f})")
        for ch, name in enumerate(("mean", "h-edge", "v-edge", "fill")):
            block = pooled.data[:, :, ch]
            body = "; ".join(
                " ".join(f"{v:.3f}" for v in row) for row in block
            )
            print(f"  {name:>7}: {body}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glyphforge",
        description="Dataset and layout tooling for glyph-based text logos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("solve", help="anneal layouts for a dataset or annotation")
    p.add_argument("input", help="dataset directory or single annotation.json")
    p.add_argument("--constraint", help="constraint text overriding the dataset's")
    p.add_argument("--config", help="solver config JSON file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="solved")
    p.add_argument("--render", action="store_true", help="also write render.png")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="score layouts against a dataset")
    p.add_argument("dataset")
    p.add_argument("--source", default="gt",
                   help="gt, rule-a, rule-b, or a solve output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write report JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("validate", help="check a layout record against a sample")
    p.add_argument("record", help="layout record JSON file")
    p.add_argument("dataset")
    p.add_argument("--sample", help="sample id (default: first)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("features", help="inspect patch features of a mask PNG")
    p.add_argument("mask")
    p.add_argument("--grid", type=int, default=24)
    p.add_argument("--pool", type=_pool_shape, help="pooled shape, e.g. 4x4")
    p.set_defaults(func=cmd_features)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnrecognizedConstraintError as exc:
        print(f"constraint error: {exc}", file=sys.stderr)
        return 3
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return 4
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
