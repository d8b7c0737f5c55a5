"""Category taxonomy: label id -> shape parameters.

Each category's parameters are drawn from its own counter-derived stream,
so the spec for label ``c`` never depends on how many categories the table
holds (the table for C=64 is a prefix of the one for C=255).
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from segsynth.errors import ConfigError, OutOfRangeError
from segsynth.seeding import TAG_TAXONOMY, derive_seed, make_rng

MAX_CATEGORIES = 65535
REFERENCE_CANVAS = 512


@dataclass(frozen=True)
class TaxonomyRanges:
    """Finite parameter grids that categories are drawn from.

    Radii are in pixels of a 512-px canvas and are scaled to the actual
    canvas when the table is built.
    """

    vertex_min: int = 3
    vertex_max: int = 32
    radius_min: float = 16.0
    radius_max: float = 96.0
    radius_step: float = 1.0
    resize_lo: float = 0.75
    resize_hi: float = 1.5
    noise_amp_max: float = 0.4
    noise_amp_step: float = 0.02
    noise_freq_max: int = 8

    def __post_init__(self):
        if self.vertex_min < 3 or self.vertex_max < self.vertex_min:
            raise ConfigError(f"bad vertex range [{self.vertex_min}, {self.vertex_max}]")
        if not 0 < self.radius_min <= self.radius_max or self.radius_step <= 0:
            raise ConfigError("bad radius grid")
        if not 0 < self.resize_lo <= self.resize_hi:
            raise ConfigError("resize interval must satisfy 0 < lo <= hi")
        if not 0 <= self.noise_amp_max < 1 or self.noise_amp_step <= 0:
            # amplitude >= 1 could produce non-positive radii
            raise ConfigError("noise amplitude must lie in [0, 1)")
        if self.noise_freq_max < 1:
            raise ConfigError("noise frequency must be >= 1")

    @property
    def n_radius(self) -> int:
        return int(round((self.radius_max - self.radius_min) / self.radius_step)) + 1

    @property
    def n_amp(self) -> int:
        return int(round(self.noise_amp_max / self.noise_amp_step)) + 1

    @property
    def grid_size(self) -> int:
        n_vert = self.vertex_max - self.vertex_min + 1
        return n_vert * self.n_radius * self.n_amp * self.noise_freq_max

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_RANGES = TaxonomyRanges()


@dataclass(frozen=True)
class CategorySpec:
    category_id: int
    vertex_count: int
    base_radius: float
    resize_factor_range: tuple[float, float]
    noise_amplitude: float
    noise_frequency: int

    def shape_key(self) -> tuple:
        return (
            self.vertex_count,
            self.base_radius,
            self.resize_factor_range,
            self.noise_amplitude,
            self.noise_frequency,
        )

    def to_line(self) -> str:
        lo, hi = self.resize_factor_range
        return (
            f"{self.category_id} {self.vertex_count} {self.base_radius!r} "
            f"{lo!r} {hi!r} {self.noise_amplitude!r} {self.noise_frequency}"
        )

    @classmethod
    def from_line(cls, line: str) -> "CategorySpec":
        c, v, r, lo, hi, amp, freq = line.split()
        return cls(int(c), int(v), float(r), (float(lo), float(hi)), float(amp), int(freq))


@dataclass(frozen=True)
class CategoryTable:
    taxonomy_seed: int
    num_categories: int
    specs: tuple[CategorySpec, ...] = field(repr=False)

    def __len__(self):
        return self.num_categories

    def __getitem__(self, c: int) -> CategorySpec:
        return lookup(self, c)

    def to_text(self) -> str:
        """One spec per line: id vertices radius resize_lo resize_hi amplitude frequency."""
        return "".join(s.to_line() + "\n" for s in self.specs)

    @classmethod
    def from_text(cls, text: str, taxonomy_seed: int) -> "CategoryTable":
        specs = tuple(CategorySpec.from_line(ln) for ln in text.splitlines() if ln.strip())
        return cls(taxonomy_seed, len(specs), specs)


def _draw_grid_point(rng: np.random.Generator, ranges: TaxonomyRanges) -> tuple[int, int, int, int]:
    v = int(rng.integers(ranges.vertex_min, ranges.vertex_max + 1))
    ri = int(rng.integers(0, ranges.n_radius))
    ai = int(rng.integers(0, ranges.n_amp))
    f = int(rng.integers(1, ranges.noise_freq_max + 1))
    return v, ri, ai, f


def build_taxonomy(
    num_categories: int,
    taxonomy_seed: int,
    canvas_size: int = REFERENCE_CANVAS,
    ranges: TaxonomyRanges = DEFAULT_RANGES,
) -> CategoryTable:
    """Build the table for labels 1..num_categories.

    A grid point already taken by a lower label is re-drawn from the next
    sub-counter of the same label, which keeps the table prefix-stable.
    """
    if not 1 <= num_categories <= MAX_CATEGORIES:
        raise ConfigError(f"number of categories must be in [1, {MAX_CATEGORIES}], got {num_categories}")
    if num_categories > ranges.grid_size:
        raise ConfigError(f"parameter grid holds only {ranges.grid_size} distinct categories")
    if canvas_size <= 0:
        raise ConfigError("canvas size must be positive")

    scale = canvas_size / REFERENCE_CANVAS
    taken = set()
    specs = []
    for c in range(1, num_categories + 1):
        attempt = 0
        while True:
            rng = make_rng(derive_seed(taxonomy_seed, TAG_TAXONOMY, c, attempt))
            point = _draw_grid_point(rng, ranges)
            if point not in taken:
                break
            attempt += 1
        taken.add(point)
        v, ri, ai, f = point
        specs.append(
            CategorySpec(
                category_id=c,
                vertex_count=v,
                base_radius=(ranges.radius_min + ri * ranges.radius_step) * scale,
                resize_factor_range=(ranges.resize_lo, ranges.resize_hi),
                noise_amplitude=ai * ranges.noise_amp_step,
                noise_frequency=f,
            )
        )
    return CategoryTable(taxonomy_seed, num_categories, tuple(specs))


def lookup(table: CategoryTable, c: int) -> CategorySpec:
    if not 1 <= c <= table.num_categories:
        raise OutOfRangeError(f"category {c} outside 1..{table.num_categories}")
    return table.specs[c - 1]
