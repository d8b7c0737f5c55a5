"""Radial contours: K concentric scalings of one noisy base polygon."""

from dataclasses import dataclass, replace

import numpy as np

from segsynth.errors import ConfigError
from segsynth.seeding import make_rng
from segsynth.taxonomy import CategorySpec

MAX_POLYGONS = 50

# A polygon is a (V, 2) float64 array of (x, y) vertices in the
# instance-local frame, origin at the contour center.
Polygon = np.ndarray


def _fade(t):
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


class PeriodicNoise:
    """1-D gradient noise over the circle with an integer number of cells.

    Output lies in [-1, 1] and wraps seamlessly at one full turn.
    """

    def __init__(self, frequency: int, rng: np.random.Generator):
        self.frequency = int(frequency)
        self.gradients = rng.uniform(-1.0, 1.0, self.frequency)
        self.phase = float(rng.uniform(0.0, 1.0))

    def at_turns(self, turns):
        """Evaluate at positions given in fractions of a full revolution."""
        u = (np.asarray(turns, dtype=np.float64) + self.phase) * self.frequency
        cell = np.floor(u)
        f = u - cell
        i0 = cell.astype(np.int64) % self.frequency
        i1 = (i0 + 1) % self.frequency
        s = _fade(f)
        n = self.gradients[i0] * f * (1.0 - s) + self.gradients[i1] * (f - 1.0) * s
        # plain 1-D Perlin peaks at |0.5|
        return 2.0 * n

    def __call__(self, theta):
        return self.at_turns(np.asarray(theta, dtype=np.float64) / (2.0 * np.pi))


def sample_base_polygon(spec: CategorySpec, rng: np.random.Generator) -> tuple[Polygon, float]:
    """Draw the outermost polygon of an instance; returns (vertices, resize)."""
    lo, hi = spec.resize_factor_range
    resize = float(rng.uniform(lo, hi))
    noise = PeriodicNoise(spec.noise_frequency, rng)
    v = np.arange(spec.vertex_count)
    turns = v / spec.vertex_count
    theta = 2.0 * np.pi * turns
    radius = spec.base_radius * resize * (1.0 + spec.noise_amplitude * noise.at_turns(turns))
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1), resize


@dataclass(frozen=True, eq=False)
class RadialContour:
    polygons: np.ndarray  # (K, V, 2), innermost first
    base_shape_seed: int
    spec: CategorySpec
    resize: float

    @property
    def K(self) -> int:
        return self.polygons.shape[0]

    @property
    def outer(self) -> Polygon:
        return self.polygons[-1]

    @property
    def inner(self) -> Polygon:
        return self.polygons[0]

    def with_polygons(self, polygons: np.ndarray) -> "RadialContour":
        return replace(self, polygons=polygons)

    def same_geometry(self, other: "RadialContour") -> bool:
        return self.polygons.shape == other.polygons.shape and bool(
            np.array_equal(self.polygons, other.polygons)
        )


def ring_scales(K: int) -> np.ndarray:
    return np.arange(1, K + 1, dtype=np.float64) / K


def scale_rings(base: Polygon, K: int) -> np.ndarray:
    """Stack k/K * base for k = 1..K; the last ring is ``base`` itself."""
    return ring_scales(K)[:, None, None] * base[None, :, :]


def build_radial_contour(spec: CategorySpec, K: int, rng: np.random.Generator, seed: int = 0) -> RadialContour:
    if not 1 <= K <= MAX_POLYGONS:
        raise ConfigError(f"polygon count K must be in [1, {MAX_POLYGONS}], got {K}")
    base, resize = sample_base_polygon(spec, rng)
    return RadialContour(scale_rings(base, K), seed, spec, resize)


def instance_contour(spec: CategorySpec, K: int, instance_seed: int) -> RadialContour:
    """Contour for one instance, regenerable from its recorded seed."""
    return build_radial_contour(spec, K, make_rng(instance_seed), seed=instance_seed)
