"""On-disk datasets: parallel generation, validation, statistics, previews.

Layout of a dataset directory::

    config.json         resolved GenerationConfig
    taxonomy.txt        one category spec per line
    manifest.jsonl      one record per image, in index order
    images/00000000.png RGB image
    masks/00000000.png  label mask, 8-bit if C <= 255 else 16-bit

Every byte is a function of config.json alone; worker count and scheduling
do not matter.
"""

import json
import logging
import multiprocessing as mp
import os
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from segsynth.config import GenerationConfig
from segsynth.errors import ConfigError, DatasetError
from segsynth.maskio import decode_image, decode_mask, encode_image, encode_mask, png_header, write_bytes_atomic
from segsynth.raster import paint
from segsynth.scene import SceneRecord, build_scene, instances_from_record, render_record
from segsynth.seeding import derive_image_seed
from segsynth.taxonomy import CategoryTable, build_taxonomy

log = logging.getLogger(__name__)

CONFIG_FILE = "config.json"
TAXONOMY_FILE = "taxonomy.txt"
MANIFEST_FILE = "manifest.jsonl"
PARTIAL_DIR = ".partial"
CHUNK = 32


def image_relpath(index: int) -> str:
    return f"images/{index:08d}.png"


def mask_relpath(index: int) -> str:
    return f"masks/{index:08d}.png"


def table_for(config: GenerationConfig) -> CategoryTable:
    return build_taxonomy(
        config.num_categories, config.taxonomy_seed, min(config.canvas), config.taxonomy_ranges
    )


def manifest_line(record: SceneRecord) -> str:
    i = record.image_index
    entry = {
        "index": i,
        "image_seed": record.image_seed,
        "image": image_relpath(i),
        "mask": mask_relpath(i),
        "instances": [r.to_dict() for r in record.instances],
    }
    return json.dumps(entry, separators=(",", ":")) + "\n"


def record_from_entry(entry: dict) -> SceneRecord:
    return SceneRecord.from_dict(
        {"image_index": entry["index"], "image_seed": entry["image_seed"], "instances": entry["instances"]}
    )


@dataclass
class Manifest:
    config: GenerationConfig
    entries: list[dict]

    def __len__(self):
        return len(self.entries)


# ---------------------------------------------------------------- generation

_worker = {}


def _init_worker(config_json: str, root: str):
    config = GenerationConfig.from_json(config_json)
    _worker.update(config=config, table=table_for(config), root=Path(root))


def _render_chunk(indices: list[int]) -> list[str]:
    config, table, root = _worker["config"], _worker["table"], _worker["root"]
    lines = []
    shard = root / PARTIAL_DIR / f"{indices[0]:08d}.{os.getpid()}.jsonl"
    with open(shard, "a", encoding="utf-8") as out:
        for i in indices:
            image, labels, record = build_scene(config, table, i)
            write_bytes_atomic(root / image_relpath(i), encode_image(image))
            write_bytes_atomic(root / mask_relpath(i), encode_mask(labels, config.num_categories))
            line = manifest_line(record)
            out.write(line)
            out.flush()
            lines.append(line)
    return lines


def _entry_is_valid(root: Path, config: GenerationConfig, entry: dict) -> bool:
    i = entry.get("index")
    if not isinstance(i, int) or not 0 <= i < config.num_images:
        return False
    if entry.get("image_seed") != derive_image_seed(config.master_seed, i):
        return False
    W, H = config.canvas
    for rel in (image_relpath(i), mask_relpath(i)):
        try:
            hdr = png_header(root / rel)
        except (OSError, ValueError):
            return False
        if (hdr["width"], hdr["height"]) != (W, H):
            return False
    return True


def _load_done(root: Path, config: GenerationConfig) -> dict[int, str]:
    """Entries from a previous run that can be kept as they are."""
    done = {}
    sources = sorted((root / PARTIAL_DIR).glob("*.jsonl")) if (root / PARTIAL_DIR).is_dir() else []
    if (root / MANIFEST_FILE).is_file():
        sources.insert(0, root / MANIFEST_FILE)
    for src in sources:
        for line in src.read_text(encoding="utf-8").splitlines():
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn write at interruption
            if _entry_is_valid(root, config, entry):
                done[entry["index"]] = line + "\n"
    return done


def _prepare_output(root: Path, config: GenerationConfig, resume: bool) -> None:
    cfg_path = root / CONFIG_FILE
    if cfg_path.exists():
        if not resume:
            raise DatasetError(f"{root} already holds a dataset; pass resume=True to continue it")
        try:
            existing = GenerationConfig.from_json(cfg_path.read_text(encoding="utf-8"))
        except (ValueError, TypeError, KeyError) as e:
            raise DatasetError(f"cannot read existing {cfg_path}: {e}") from e
        if existing != config:
            raise DatasetError("existing config.json differs from the requested configuration")
    for sub in ("images", "masks", PARTIAL_DIR):
        (root / sub).mkdir(parents=True, exist_ok=True)
    write_bytes_atomic(cfg_path, config.to_json().encode())


def write_config(config: GenerationConfig, out_dir, table: CategoryTable | None = None) -> None:
    """Write config.json and taxonomy.txt only."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    write_bytes_atomic(root / CONFIG_FILE, config.to_json().encode())
    table = table or table_for(config)
    write_bytes_atomic(root / TAXONOMY_FILE, table.to_text().encode())


def generate_dataset(config: GenerationConfig, out_dir, workers: int = 1, resume: bool = False) -> Manifest:
    config.validate()
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    root = Path(out_dir)
    table = table_for(config)
    try:
        _prepare_output(root, config, resume)
        write_bytes_atomic(root / TAXONOMY_FILE, table.to_text().encode())
    except OSError as e:
        raise DatasetError(f"cannot write to {root}: {e}") from e

    done = _load_done(root, config) if resume else {}
    todo = [i for i in range(config.num_images) if i not in done]
    chunks = [todo[s:s + CHUNK] for s in range(0, len(todo), CHUNK)]
    log.info("generating %d images (%d already present) with %d workers", len(todo), len(done), workers)

    lines = dict(done)
    try:
        if workers == 1 or len(chunks) <= 1:
            _init_worker(config.to_json(), str(root))
            results = map(_render_chunk, chunks)
            for chunk_lines in results:
                _collect(lines, chunk_lines)
        else:
            ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
            with ProcessPoolExecutor(
                max_workers=workers, mp_context=ctx, initializer=_init_worker,
                initargs=(config.to_json(), str(root)),
            ) as pool:
                for chunk_lines in pool.map(_render_chunk, chunks):
                    _collect(lines, chunk_lines)
    except OSError as e:
        raise DatasetError(
            f"I/O failure after {len(lines)} of {config.num_images} images: {e}; "
            f"rerun with resume to continue"
        ) from e

    with open(root / (MANIFEST_FILE + ".tmp"), "w", encoding="utf-8", newline="\n") as f:
        for i in range(config.num_images):
            f.write(lines[i])
    (root / (MANIFEST_FILE + ".tmp")).replace(root / MANIFEST_FILE)
    shutil.rmtree(root / PARTIAL_DIR, ignore_errors=True)
    return Manifest(config, [json.loads(lines[i]) for i in range(config.num_images)])


def _collect(lines: dict, chunk_lines: list[str]) -> None:
    for line in chunk_lines:
        lines[json.loads(line)["index"]] = line


# ---------------------------------------------------------------- reading


def load_dataset(path) -> tuple[GenerationConfig, list[dict]]:
    root = Path(path)
    try:
        config = GenerationConfig.from_json((root / CONFIG_FILE).read_text(encoding="utf-8"))
    except (OSError, ValueError, TypeError) as e:
        raise DatasetError(f"cannot read {root / CONFIG_FILE}: {e}") from e
    try:
        text = (root / MANIFEST_FILE).read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"cannot read {root / MANIFEST_FILE}: {e}") from e
    entries = []
    for n, line in enumerate(text.splitlines(), start=1):
        try:
            entries.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise DatasetError(f"manifest line {n} is not valid JSON: {e}") from e
    return config, entries


# ---------------------------------------------------------------- validation


@dataclass
class Violation:
    kind: str
    index: int | None
    detail: str

    def to_dict(self):
        return {"kind": self.kind, "index": self.index, "detail": self.detail}


@dataclass
class ValidationReport:
    path: str
    num_entries: int = 0
    regenerated: list[int] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, kind: str) -> int:
        return sum(v.kind == kind for v in self.violations)

    def add(self, kind, index, detail):
        self.violations.append(Violation(kind, index, detail))

    def to_dict(self):
        return {
            "path": self.path,
            "num_entries": self.num_entries,
            "regenerated": self.regenerated,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
        }


def _sample_indices(n: int, sample: int) -> list[int]:
    if sample <= 0 or n == 0:
        return []
    if sample >= n:
        return list(range(n))
    return sorted({int(round(x)) for x in np.linspace(0, n - 1, sample)})


def validate_dataset(path, sample: int = 16) -> ValidationReport:
    """Check every manifest entry; regenerate ``sample`` evenly spaced ones bit-for-bit."""
    root = Path(path)
    config, entries = load_dataset(root)
    report = ValidationReport(str(root), len(entries))
    table = table_for(config)

    tax_path = root / TAXONOMY_FILE
    if not tax_path.is_file():
        report.add("taxonomy", None, "taxonomy.txt missing")
    elif tax_path.read_text(encoding="utf-8") != table.to_text():
        report.add("taxonomy", None, "taxonomy.txt does not match the configured taxonomy")

    seen = set()
    by_index = {}
    for pos, entry in enumerate(entries):
        i = entry.get("index")
        if i != pos:
            report.add("index", i, f"entry {pos} carries index {i}")
        if not isinstance(i, int):
            continue
        if i in seen:
            report.add("index", i, "duplicate index")
        seen.add(i)
        by_index[i] = entry
        if entry.get("image_seed") != derive_image_seed(config.master_seed, i):
            report.add("seed", i, "image seed does not match the master seed")
        if entry.get("image") != image_relpath(i) or entry.get("mask") != mask_relpath(i):
            report.add("path", i, "unexpected file path in manifest")
        _check_files(root, config, entry, report)
    missing = set(range(config.num_images)) - seen
    if missing:
        report.add("missing-entry", min(missing), f"{len(missing)} indices absent from the manifest")
    if len(entries) != config.num_images:
        report.add("count", None, f"manifest has {len(entries)} entries, expected {config.num_images}")

    for i in _sample_indices(config.num_images, sample):
        entry = by_index.get(i)
        if entry is None:
            continue
        report.regenerated.append(i)
        try:
            image, labels, _ = render_record(config, table, record_from_entry(entry))
        except (KeyError, ValueError, TypeError, IndexError) as e:
            report.add("record", i, f"scene record unusable: {e}")
            continue
        try:
            stored_image = decode_image(root / entry["image"])
            stored_mask = decode_mask(root / entry["mask"])
        except (OSError, ValueError):
            continue  # already reported by _check_files
        if stored_image.shape != image.shape or not np.array_equal(stored_image, image):
            report.add("regeneration", i, "image differs from its regenerated scene")
        if stored_mask.shape != labels.shape or not np.array_equal(stored_mask, labels):
            report.add("regeneration", i, "mask differs from its regenerated scene")
    return report


def _check_files(root: Path, config: GenerationConfig, entry: dict, report: ValidationReport) -> None:
    i = entry["index"]
    W, H = config.canvas
    C = config.num_categories
    image_path = root / image_relpath(i)
    mask_path = root / mask_relpath(i)
    for p in (image_path, mask_path):
        if not p.is_file():
            report.add("missing-file", i, f"{p.relative_to(root)} does not exist")
    if image_path.is_file():
        try:
            hdr = png_header(image_path)
            if (hdr["width"], hdr["height"]) != (W, H):
                report.add("dimensions", i, f"image is {hdr['width']}x{hdr['height']}, expected {W}x{H}")
            if (hdr["bit_depth"], hdr["color_type"]) != (8, 2):
                report.add("image-format", i, "image is not 8-bit RGB")
        except (OSError, ValueError) as e:
            report.add("unreadable", i, f"image: {e}")
    if not mask_path.is_file():
        return
    try:
        hdr = png_header(mask_path)
        labels = decode_mask(mask_path)
    except (OSError, ValueError) as e:
        report.add("unreadable", i, f"mask: {e}")
        return
    if (hdr["width"], hdr["height"]) != (W, H):
        report.add("dimensions", i, f"mask is {hdr['width']}x{hdr['height']}, expected {W}x{H}")
    if hdr["color_type"] != 0 or hdr["bit_depth"] != config.mask_bit_depth:
        report.add(
            "bit-depth", i,
            f"mask is {hdr['bit_depth']}-bit (color type {hdr['color_type']}), "
            f"expected {config.mask_bit_depth}-bit grayscale",
        )
    bad = int(np.count_nonzero(labels > C))
    if bad:
        report.add("label-domain", i, f"{bad} pixels carry labels above {C}")


# ---------------------------------------------------------------- statistics


def instance_coverage(config: GenerationConfig, table: CategoryTable, record: SceneRecord) -> np.ndarray:
    """Per pixel, how many instances' mask supports cover it."""
    W, H = config.canvas
    owner = np.zeros((H, W), dtype=np.int32)
    count = np.zeros((H, W), dtype=np.int32)
    for slot, inst in enumerate(instances_from_record(config, table, record), start=1):
        paint(owner, slot, inst.label_contour, inst.position, config.mask_type, config.line_width)
        count += owner == slot
    return count


def _summary(values) -> dict:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return {}
    q = np.percentile(v, [5, 25, 50, 75, 95])
    return {
        "mean": float(v.mean()), "std": float(v.std()), "min": float(v.min()),
        "p05": float(q[0]), "p25": float(q[1]), "p50": float(q[2]),
        "p75": float(q[3]), "p95": float(q[4]), "max": float(v.max()),
    }


@dataclass
class StatsReport:
    num_images: int
    num_categories: int
    category_pixels: list[int]  # index 0 is background
    category_instances: list[int]  # index 0 unused
    foreground_ratio: dict
    overlap_rate: float
    overlap_images: int
    max_chroma: int

    @property
    def categories_present(self) -> int:
        return sum(1 for n in self.category_instances[1:] if n > 0)

    def to_dict(self):
        return {
            "num_images": self.num_images,
            "num_categories": self.num_categories,
            "categories_present": self.categories_present,
            "foreground_ratio": self.foreground_ratio,
            "overlap_rate": self.overlap_rate,
            "overlap_images": self.overlap_images,
            "max_chroma": self.max_chroma,
            "category_pixels": self.category_pixels,
            "category_instances": self.category_instances,
        }


def dataset_stats(path, overlap_sample: int | None = None) -> StatsReport:
    """Frequencies, foreground ratios, chroma and instance overlap.

    The overlap rate is the fraction of covered pixels that lie under two or
    more instance supports, pooled over the images it is computed on
    (``overlap_sample`` evenly spaced ones, or all).
    """
    root = Path(path)
    config, entries = load_dataset(root)
    C = config.num_categories
    table = table_for(config)
    pix = np.zeros(C + 1, dtype=np.int64)
    inst = np.zeros(C + 1, dtype=np.int64)
    ratios = []
    max_chroma = 0
    for entry in entries:
        try:
            labels = decode_mask(root / entry["mask"])
            image = decode_image(root / entry["image"]).astype(np.int16)
        except (OSError, ValueError) as e:
            raise DatasetError(f"cannot read files of entry {entry.get('index')}: {e}") from e
        pix += np.bincount(np.minimum(labels.ravel().astype(np.int64), C + 1), minlength=C + 2)[: C + 1]
        ratios.append(float(np.count_nonzero(labels)) / labels.size)
        chroma = max(
            int(np.abs(image[..., 0] - image[..., 1]).max()),
            int(np.abs(image[..., 1] - image[..., 2]).max()),
        )
        max_chroma = max(max_chroma, chroma)
        for r in entry["instances"]:
            if 1 <= r["category_id"] <= C:
                inst[r["category_id"]] += 1

    picks = range(len(entries)) if overlap_sample is None else _sample_indices(len(entries), overlap_sample)
    covered = multi = 0
    n_overlap = 0
    for k in picks:
        cov = instance_coverage(config, table, record_from_entry(entries[k]))
        covered += int(np.count_nonzero(cov >= 1))
        multi += int(np.count_nonzero(cov >= 2))
        n_overlap += 1
    return StatsReport(
        num_images=len(entries),
        num_categories=C,
        category_pixels=pix.tolist(),
        category_instances=inst.tolist(),
        foreground_ratio=_summary(ratios),
        overlap_rate=multi / covered if covered else 0.0,
        overlap_images=n_overlap,
        max_chroma=max_chroma,
    )


# ---------------------------------------------------------------- preview


def label_palette(n: int) -> np.ndarray:
    """Fixed, well-spread colors for labels 0..n-1; label 0 is black."""
    labels = np.arange(n, dtype=np.uint64)
    h = labels * np.uint64(0x9E3779B1)
    pal = np.stack([(h >> np.uint64(s)) & np.uint64(0xFF) for s in (0, 8, 16)], axis=1).astype(np.uint8)
    pal = pal | np.uint8(0x40)
    pal[0] = 0
    return pal


def preview(path, out_file, grid: int = 4, cell: int | None = None) -> np.ndarray:
    """Tile the first grid*grid (image, colorized mask) pairs into one PNG."""
    from PIL import Image

    root = Path(path)
    config, entries = load_dataset(root)
    W, H = config.canvas
    cw, ch = (W, H) if cell is None else (cell, cell)
    pal = label_palette(config.num_categories + 1)
    sheet = np.zeros((grid * ch, grid * 2 * cw, 3), dtype=np.uint8)
    for n, entry in enumerate(entries[: grid * grid]):
        r, c = divmod(n, grid)
        image = decode_image(root / entry["image"])
        mask = pal[decode_mask(root / entry["mask"]).astype(np.int64)]
        for k, tile in enumerate((image, mask)):
            if (cw, ch) != (W, H):
                tile = np.asarray(Image.fromarray(tile).resize((cw, ch), Image.NEAREST))
            x0 = (2 * c + k) * cw
            sheet[r * ch:(r + 1) * ch, x0:x0 + cw] = tile
    Image.fromarray(sheet).save(out_file)
    return sheet
