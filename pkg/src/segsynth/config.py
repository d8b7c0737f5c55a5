"""Generation parameters, presets and their JSON record."""

import json
from dataclasses import asdict, dataclass, field, fields, replace

from segsynth.contour import MAX_POLYGONS
from segsynth.errors import ConfigError
from segsynth.raster import LINE_WIDTHS, MASK_TYPES
from segsynth.taxonomy import DEFAULT_RANGES, MAX_CATEGORIES, TaxonomyRanges

COLOR_MODES = ("gray", "random-rgb")
PERTURB_MODES = ("none", "shift", "inflation")


@dataclass(frozen=True)
class PerturbSpec:
    mode: str = "none"
    magnitude: int = 0

    def __post_init__(self):
        if self.mode not in PERTURB_MODES:
            raise ConfigError(f"perturbation mode must be one of {PERTURB_MODES}, got {self.mode!r}")
        if self.magnitude < 0:
            raise ConfigError("perturbation magnitude must be non-negative")

    @property
    def active(self) -> bool:
        return self.mode != "none" and self.magnitude > 0


@dataclass(frozen=True)
class GenerationConfig:
    num_images: int = 20000
    instances_per_image: int = 1
    mask_type: str = "m1"
    color_mode: str = "gray"
    occlusion_radius: int = 512
    polygons_range: tuple[int, int] = (1, 50)
    line_width: int = 1
    num_categories: int = 255
    canvas: tuple[int, int] = (512, 512)
    master_seed: int = 0
    taxonomy_seed: int = 0
    perturb: PerturbSpec = field(default_factory=PerturbSpec)
    taxonomy_ranges: TaxonomyRanges = DEFAULT_RANGES

    def __post_init__(self):
        # normalise JSON lists back to tuples
        object.__setattr__(self, "polygons_range", tuple(self.polygons_range))
        object.__setattr__(self, "canvas", tuple(self.canvas))
        self.validate()

    def validate(self):
        k_lo, k_hi = self.polygons_range
        W, H = self.canvas
        checks = [
            (self.num_images >= 1, f"num_images must be >= 1, got {self.num_images}"),
            (self.instances_per_image >= 1, f"instances_per_image must be >= 1, got {self.instances_per_image}"),
            (self.mask_type in MASK_TYPES, f"mask_type must be one of {MASK_TYPES}"),
            (self.color_mode in COLOR_MODES, f"color_mode must be one of {COLOR_MODES}"),
            (self.occlusion_radius > 0, "occlusion_radius must be positive"),
            (1 <= k_lo <= k_hi <= MAX_POLYGONS, f"polygons_range must satisfy 1 <= lo <= hi <= {MAX_POLYGONS}"),
            (self.line_width in LINE_WIDTHS, f"line_width must be one of {LINE_WIDTHS}"),
            (1 <= self.num_categories <= MAX_CATEGORIES, f"num_categories must be in [1, {MAX_CATEGORIES}]"),
            (W > 0 and H > 0, "canvas must have positive area"),
            (self.instances_per_image <= 65535, "at most 65535 instances per image"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        for name in ("master_seed", "taxonomy_seed"):
            if not 0 <= getattr(self, name) < 2**64:
                raise ConfigError(f"{name} must be an unsigned 64-bit integer")

    @property
    def mask_bit_depth(self) -> int:
        return 8 if self.num_categories <= 255 else 16

    def to_dict(self) -> dict:
        d = asdict(self)
        d["polygons_range"] = list(self.polygons_range)
        d["canvas"] = list(self.canvas)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "perturb" in d:
            d["perturb"] = PerturbSpec(**d["perturb"])
        if "taxonomy_ranges" in d:
            d["taxonomy_ranges"] = TaxonomyRanges(**d["taxonomy_ranges"])
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "GenerationConfig":
        return cls.from_dict(json.loads(text))

    def replace(self, **changes) -> "GenerationConfig":
        return replace(self, **changes)


# Baseline: Table 1 of the investigation plus M=1 and m1 from the
# base-line column of the parameter comparison table.
BASELINE = GenerationConfig(
    num_images=20000,
    instances_per_image=1,
    mask_type="m1",
    color_mode="gray",
    occlusion_radius=512,
    polygons_range=(1, 50),
    line_width=1,
    num_categories=255,
)

# Best combination found by the factor study, at the 118k image scale.
BEST = GenerationConfig(
    num_images=118000,
    instances_per_image=32,
    mask_type="m1",
    color_mode="gray",
    occlusion_radius=400,
    polygons_range=(1, 25),
    line_width=1,
    num_categories=255,
)

PRESETS = {"baseline": BASELINE, "best": BEST}


def preset(name: str) -> GenerationConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
