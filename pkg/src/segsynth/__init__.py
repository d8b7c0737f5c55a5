"""Deterministic synthetic segmentation datasets built from radial contours."""

from segsynth.config import GenerationConfig, PerturbSpec, preset
from segsynth.taxonomy import CategorySpec, CategoryTable, build_taxonomy, lookup
from segsynth.contour import Polygon, RadialContour, build_radial_contour, sample_base_polygon
from segsynth.scene import Instance, build_scene, compose_scene
from segsynth.seeding import derive_image_seed, derive_seed

__all__ = [
    "CategorySpec",
    "CategoryTable",
    "GenerationConfig",
    "Instance",
    "PerturbSpec",
    "Polygon",
    "RadialContour",
    "build_radial_contour",
    "build_scene",
    "build_taxonomy",
    "compose_scene",
    "derive_image_seed",
    "derive_seed",
    "lookup",
    "preset",
    "sample_base_polygon",
]

__version__ = "0.1.0"
