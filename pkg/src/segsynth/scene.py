"""Scene sampling and frontmost-wins composition of images and label masks."""

import math
from dataclasses import dataclass, field

import numpy as np

from segsynth.config import GenerationConfig
from segsynth.contour import RadialContour, instance_contour
from segsynth.errors import ConfigError
from segsynth.perturb import perturb_contour
from segsynth.raster import _check_canvas, _check_mask_type, _check_width, paint
from segsynth.seeding import TAG_INSTANCE, TAG_SHIFT, derive_image_seed, derive_seed, make_rng
from segsynth.taxonomy import CategoryTable, lookup

WHITE = (255, 255, 255)


@dataclass(eq=False)
class Instance:
    contour: RadialContour
    position: tuple[int, int]
    category: int
    depth: int
    color: tuple[int, int, int] = WHITE
    mask_contour: RadialContour | None = None  # perturbed copy for the label mask

    def __post_init__(self):
        if self.category < 1:
            raise ConfigError("instance category must be >= 1")

    @property
    def label_contour(self) -> RadialContour:
        return self.contour if self.mask_contour is None else self.mask_contour


@dataclass(frozen=True)
class InstanceRecord:
    depth: int
    category_id: int
    position: tuple[int, int]
    K: int
    resize: float
    color: tuple[int, int, int]
    seed: int

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "category_id": self.category_id,
            "position": list(self.position),
            "K": self.K,
            "resize": self.resize,
            "color": list(self.color),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InstanceRecord":
        return cls(
            depth=d["depth"],
            category_id=d["category_id"],
            position=tuple(d["position"]),
            K=d["K"],
            resize=d["resize"],
            color=tuple(d["color"]),
            seed=d["seed"],
        )


@dataclass(frozen=True)
class SceneRecord:
    image_index: int
    image_seed: int
    instances: tuple[InstanceRecord, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "image_index": self.image_index,
            "image_seed": self.image_seed,
            "instances": [r.to_dict() for r in self.instances],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneRecord":
        return cls(d["image_index"], d["image_seed"], tuple(InstanceRecord.from_dict(r) for r in d["instances"]))


def placement_bounds(r: float, canvas) -> tuple[tuple[int, int], tuple[int, int]]:
    """Half-open integer ranges for x and y: a centered square of side r, clipped."""
    W, H = _check_canvas(canvas)
    if not r > 0:
        raise ConfigError("occlusion radius must be positive")
    bounds = []
    for size in (W, H):
        center = size / 2.0
        lo = max(0, math.ceil(center - r / 2.0))
        hi = min(size, math.ceil(center + r / 2.0))
        if hi <= lo:
            raise ConfigError(f"occlusion radius {r} leaves no pixel to place instances on")
        bounds.append((lo, hi))
    return bounds[0], bounds[1]


def sample_placements(M: int, r: float, canvas, rng: np.random.Generator) -> np.ndarray:
    """(M, 2) integer centers, uniform over the placement square; row order is depth order."""
    if M < 1:
        raise ConfigError("need at least one instance")
    (x0, x1), (y0, y1) = placement_bounds(r, canvas)
    return rng.integers([x0, y0], [x1, y1], size=(M, 2))


def assign_colors(M: int, color_mode: str, rng: np.random.Generator) -> np.ndarray:
    if color_mode == "gray":
        return np.full((M, 3), 255, dtype=np.int64)
    if color_mode == "random-rgb":
        return rng.integers(0, 256, size=(M, 3))
    raise ConfigError(f"unknown color mode {color_mode!r}")


def compose_scene(instances, mask_type: str, canvas, d: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Render ``instances`` (backmost first) into an RGB image and a label grid.

    Each pixel takes the label of the deepest-index instance whose mask covers
    it, or 0. The image shows every instance's skeleton strokes in its color
    with the same rule, whatever ``mask_type`` is.
    """
    W, H = _check_canvas(canvas)
    _check_width(d)
    _check_mask_type(mask_type)
    M = len(instances)
    labels_of = np.zeros(M + 1, dtype=np.uint16)
    colors_of = np.zeros((M + 1, 3), dtype=np.uint8)
    image_owner = np.zeros((H, W), dtype=np.int32)
    mask_owner = image_owner if mask_type == "m1" else np.zeros((H, W), dtype=np.int32)
    separate = any(inst.mask_contour is not None for inst in instances)
    if separate and mask_owner is image_owner:
        mask_owner = np.zeros((H, W), dtype=np.int32)

    for slot, inst in enumerate(sorted(instances, key=lambda i: i.depth), start=1):
        labels_of[slot] = inst.category
        colors_of[slot] = inst.color
        paint(image_owner, slot, inst.contour, inst.position, "m1", d)
        if mask_owner is not image_owner:
            paint(mask_owner, slot, inst.label_contour, inst.position, mask_type, d)
    return colors_of[image_owner], labels_of[mask_owner]


def plan_scene(config: GenerationConfig, index: int) -> SceneRecord:
    """Draw every per-instance random choice for one image, without rendering."""
    if not 0 <= index < config.num_images:
        raise ConfigError(f"image index {index} outside 0..{config.num_images - 1}")
    image_seed = derive_image_seed(config.master_seed, index)
    rng = make_rng(image_seed)
    M = config.instances_per_image
    k_lo, k_hi = config.polygons_range
    categories = rng.integers(1, config.num_categories + 1, size=M)
    Ks = rng.integers(k_lo, k_hi + 1, size=M)
    positions = sample_placements(M, config.occlusion_radius, config.canvas, rng)
    colors = assign_colors(M, config.color_mode, rng)
    records = []
    for j in range(M):
        records.append(
            InstanceRecord(
                depth=j + 1,
                category_id=int(categories[j]),
                position=(int(positions[j, 0]), int(positions[j, 1])),
                K=int(Ks[j]),
                resize=0.0,  # filled in once the contour is drawn
                color=tuple(int(v) for v in colors[j]),
                seed=derive_seed(image_seed, TAG_INSTANCE, j),
            )
        )
    return SceneRecord(index, image_seed, tuple(records))


def instances_from_record(config: GenerationConfig, table: CategoryTable, record: SceneRecord) -> list[Instance]:
    out = []
    for r in record.instances:
        contour = instance_contour(lookup(table, r.category_id), r.K, r.seed)
        mask_contour = None
        if config.perturb.active:
            mask_contour = perturb_contour(
                contour, config.perturb, lambda s=r.seed: make_rng(derive_seed(s, TAG_SHIFT))
            )
        out.append(Instance(contour, r.position, r.category_id, r.depth, r.color, mask_contour))
    return out


def render_record(config: GenerationConfig, table: CategoryTable, record: SceneRecord):
    instances = instances_from_record(config, table, record)
    image, labels = compose_scene(instances, config.mask_type, config.canvas, config.line_width)
    return image, labels, instances


def build_scene(config: GenerationConfig, table: CategoryTable, image_index: int):
    """Return (image HxWx3 uint8, labels HxW uint16, SceneRecord) for one index."""
    planned = plan_scene(config, image_index)
    image, labels, instances = render_record(config, table, planned)
    filled = tuple(
        InstanceRecord(r.depth, r.category_id, r.position, r.K, inst.contour.resize, r.color, r.seed)
        for r, inst in zip(planned.instances, instances)
    )
    return image, labels, SceneRecord(planned.image_index, planned.image_seed, filled)
