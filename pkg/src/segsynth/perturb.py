"""Annotation corruption: vertex shift and radial inflation.

Both act on a copy of the contour used only for the label mask; the
rendered image always comes from the clean contour.
"""

import numpy as np

from segsynth.contour import RadialContour, scale_rings


def shift_vertices(contour: RadialContour, magnitude: float, rng: np.random.Generator) -> RadialContour:
    """Jitter each base-shape vertex uniformly in [-m, m]^2, then rebuild the rings.

    Inner rings move by k/K of the base displacement, so every vertex stays
    within L-infinity distance ``magnitude`` of where it was.
    """
    if magnitude == 0:
        return contour
    base = contour.outer
    jitter = rng.uniform(-magnitude, magnitude, size=base.shape)
    return contour.with_polygons(scale_rings(base + jitter, contour.K))


def inflate_region(contour: RadialContour, magnitude: float) -> RadialContour:
    """Push every vertex of every ring ``magnitude`` pixels away from the center."""
    if magnitude == 0:
        return contour
    polys = contour.polygons
    r = np.hypot(polys[..., 0], polys[..., 1])[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(r > 0, polys / r, 0.0) * magnitude
    return contour.with_polygons(polys + step)


def perturb_contour(contour: RadialContour, spec, rng_factory) -> RadialContour:
    """Apply a PerturbSpec; ``rng_factory`` is only called for shift."""
    if not spec.active:
        return contour
    if spec.mode == "shift":
        return shift_vertices(contour, spec.magnitude, rng_factory())
    return inflate_region(contour, spec.magnitude)
