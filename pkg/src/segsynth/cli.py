"""Command line: generate, validate, stats, preview."""

import argparse
import json
import logging
import sys
import time

from segsynth.config import PRESETS, GenerationConfig, PerturbSpec, preset
from segsynth.dataset import dataset_stats, generate_dataset, preview, validate_dataset, write_config
from segsynth.errors import ConfigError, DatasetError


def _range(text: str) -> tuple[int, int]:
    for sep in ("-", ",", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return int(lo), int(hi)
    k = int(text)
    return k, k


def _canvas(text: str) -> tuple[int, int]:
    if "x" in text.lower():
        w, h = text.lower().split("x", 1)
        return int(w), int(h)
    return int(text), int(text)


def _u64(text: str) -> int:
    return int(text, 0)


# flag -> (config field, parser)
OVERRIDES = {
    "num_images": ("num_images", int),
    "instances": ("instances_per_image", int),
    "mask_type": ("mask_type", str),
    "color": ("color_mode", str),
    "occlusion_radius": ("occlusion_radius", int),
    "polygons": ("polygons_range", _range),
    "line_width": ("line_width", int),
    "categories": ("num_categories", int),
    "canvas": ("canvas", _canvas),
    "seed": ("master_seed", _u64),
    "taxonomy_seed": ("taxonomy_seed", _u64),
}


def resolve_config(args) -> GenerationConfig:
    changes = {}
    for flag, (name, _) in OVERRIDES.items():
        value = getattr(args, flag)
        if value is not None:
            changes[name] = value
    if args.perturb_shift is not None:
        changes["perturb"] = PerturbSpec("shift", args.perturb_shift)
    elif args.perturb_inflate is not None:
        changes["perturb"] = PerturbSpec("inflation", args.perturb_inflate)
    base = preset(args.preset)
    return base.replace(**changes)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="segsynth", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a dataset")
    g.add_argument("--preset", choices=sorted(PRESETS), default="baseline")
    g.add_argument("--num-images", type=int)
    g.add_argument("--instances", type=int)
    g.add_argument("--mask-type", choices=["m1", "m2", "m3"])
    g.add_argument("--color", choices=["gray", "random-rgb"])
    g.add_argument("--occlusion-radius", type=int)
    g.add_argument("--polygons", type=_range, help="K range, e.g. 1-25")
    g.add_argument("--line-width", type=int, choices=[1, 2, 3])
    g.add_argument("--categories", type=int)
    g.add_argument("--canvas", type=_canvas, help="WxH or a single size")
    g.add_argument("--seed", type=_u64)
    g.add_argument("--taxonomy-seed", type=_u64)
    perturb = g.add_mutually_exclusive_group()
    perturb.add_argument("--perturb-shift", type=int, metavar="PX")
    perturb.add_argument("--perturb-inflate", type=int, metavar="PX")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--resume", action="store_true")
    g.add_argument("--dry-run", action="store_true", help="write config.json and taxonomy.txt only")
    g.add_argument("--out", required=True)

    v = sub.add_parser("validate", help="check a dataset directory")
    v.add_argument("path")
    v.add_argument("--sample", type=int, default=16, help="entries to regenerate and compare")
    v.add_argument("--json", action="store_true")

    s = sub.add_parser("stats", help="dataset statistics")
    s.add_argument("path")
    s.add_argument("--overlap-sample", type=int)
    s.add_argument("--json", action="store_true", help="print the full report as JSON")

    pv = sub.add_parser("preview", help="tile image/mask pairs into one PNG")
    pv.add_argument("path")
    pv.add_argument("--grid", type=int, default=4)
    pv.add_argument("--cell", type=int)
    pv.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DatasetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def cmd_generate(args) -> int:
    config = resolve_config(args)
    if args.dry_run:
        write_config(config, args.out)
        print(config.to_json(), end="")
        return 0
    t0 = time.perf_counter()
    manifest = generate_dataset(config, args.out, workers=args.workers, resume=args.resume)
    dt = time.perf_counter() - t0
    print(f"wrote {len(manifest)} images to {args.out} in {dt:.1f}s")
    return 0


def cmd_validate(args) -> int:
    report = validate_dataset(args.path, sample=args.sample)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for v in report.violations:
            print(f"{v.kind:14s} index={v.index} {v.detail}")
        print(
            f"{report.num_entries} entries, {len(report.regenerated)} regenerated, "
            f"{len(report.violations)} violations"
        )
    return 0 if report.ok else 1


def cmd_stats(args) -> int:
    report = dataset_stats(args.path, overlap_sample=args.overlap_sample)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
        return 0
    fg = report.foreground_ratio
    print(f"images              {report.num_images}")
    print(f"categories present  {report.categories_present} / {report.num_categories}")
    if fg:
        print(f"foreground ratio    mean {fg['mean']:.4f}  p05 {fg['p05']:.4f}  p95 {fg['p95']:.4f}")
    print(f"overlap rate        {report.overlap_rate:.4f} ({report.overlap_images} images)")
    print(f"max chroma          {report.max_chroma}")
    return 0


def cmd_preview(args) -> int:
    preview(args.path, args.out, grid=args.grid, cell=args.cell)
    print(f"wrote {args.out}")
    return 0


COMMANDS = {"generate": cmd_generate, "validate": cmd_validate, "stats": cmd_stats, "preview": cmd_preview}


if __name__ == "__main__":
    sys.exit(main())
