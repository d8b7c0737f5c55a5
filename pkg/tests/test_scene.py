import numpy as np
import pytest

from conftest import random_contour, square
from segsynth.config import BEST, BASELINE
from segsynth.contour import RadialContour
from segsynth.errors import ConfigError
from segsynth.raster import oracle_rasterize, rasterize
from segsynth.scene import (
    Instance, assign_colors, build_scene, compose_scene, placement_bounds, plan_scene, sample_placements,
)
from segsynth.seeding import make_rng
from segsynth.taxonomy import CategorySpec, build_taxonomy

SPEC = CategorySpec(1, 4, 5.0, (1.0, 1.0), 0.0, 1)


def square_contour(half):
    return RadialContour(square(half)[None], 0, SPEC, 1.0)


def test_full_canvas_placement():
    assert placement_bounds(512, (512, 512)) == ((0, 512), (0, 512))
    pos = sample_placements(20000, 512, (512, 512), make_rng(0))
    assert pos.min() == 0 and pos.max() == 511


def test_small_radius_concentrates():
    pos = sample_placements(32, 100, (512, 512), make_rng(1))
    assert pos.min() >= 206 and pos.max() < 306
    assert placement_bounds(400, (512, 512)) == ((56, 456), (56, 456))


def test_radius_larger_than_canvas_clips():
    assert placement_bounds(400, (128, 128)) == ((0, 128), (0, 128))


def test_empty_placement_region():
    with pytest.raises(ConfigError):
        placement_bounds(0.5, (5, 5))
    with pytest.raises(ConfigError):
        sample_placements(3, 0, (64, 64), make_rng(0))


def test_single_placement():
    assert sample_placements(1, 10, (64, 64), make_rng(2)).shape == (1, 2)


def test_colors():
    assert assign_colors(3, "gray", make_rng(0)).tolist() == [[255, 255, 255]] * 3
    a = assign_colors(1, "random-rgb", make_rng(9))
    assert a.tolist() == assign_colors(1, "random-rgb", make_rng(9)).tolist()
    draws = assign_colors(10_000, "random-rgb", make_rng(4))
    assert draws.min() == 0 and draws.max() == 255
    assert np.all(np.abs(draws.mean(axis=0) - 127.5) < 3)


def test_frontmost_wins():
    back = Instance(square_contour(6.0), (12, 12), 7, 1)
    front = Instance(square_contour(6.0), (18, 18), 9, 2)
    _, labels = compose_scene([back, front], "m3", (32, 32))
    b1 = rasterize(back.contour, back.position, "m3", (32, 32))
    b2 = rasterize(front.contour, front.position, "m3", (32, 32))
    assert (b1 & b2).any()
    assert np.all(labels[b1 & b2] == 9)
    assert np.all(labels[b1 & ~b2] == 7)
    # listing order does not matter, depth does
    _, again = compose_scene([front, back], "m3", (32, 32))
    np.testing.assert_array_equal(labels, again)


def test_empty_scene():
    image, labels = compose_scene([], "m2", (16, 8))
    assert image.shape == (8, 16, 3) and not image.any()
    assert labels.shape == (8, 16) and not labels.any()


def eq1_oracle(instances, mask_type, canvas, d):
    W, H = canvas
    masks = [oracle_rasterize(i.label_contour, i.position, mask_type, canvas, d) for i in instances]
    strokes = [oracle_rasterize(i.contour, i.position, "m1", canvas, d) for i in instances]
    labels = np.zeros((H, W), dtype=np.uint16)
    image = np.zeros((H, W, 3), dtype=np.uint8)
    for q in range(H):
        for p in range(W):
            covering = [i.depth for i, b in zip(instances, masks) if b[q, p]]
            if covering:
                labels[q, p] = next(i.category for i in instances if i.depth == max(covering))
            painted = [i.depth for i, b in zip(instances, strokes) if b[q, p]]
            if painted:
                image[q, p] = next(i.color for i in instances if i.depth == max(painted))
    return image, labels


@pytest.mark.parametrize("mask_type", ["m1", "m2", "m3"])
def test_compose_matches_eq1(table64, mask_type):
    rng = np.random.default_rng(5)
    for _ in range(3):
        inst = [
            Instance(random_contour(rng, table64), tuple(rng.integers(0, 64, 2)), int(rng.integers(1, 256)),
                     j + 1, tuple(int(v) for v in rng.integers(0, 256, 3)))
            for j in range(4)
        ]
        image, labels = compose_scene(inst, mask_type, (64, 64), 2)
        want_image, want_labels = eq1_oracle(inst, mask_type, (64, 64), 2)
        np.testing.assert_array_equal(labels, want_labels)
        np.testing.assert_array_equal(image, want_image)


def test_depth_swap_only_changes_intersection(table64):
    rng = np.random.default_rng(6)
    for _ in range(10):
        inst = [Instance(random_contour(rng, table64), tuple(rng.integers(16, 48, 2)), j + 10, j + 1)
                for j in range(4)]
        _, before = compose_scene(inst, "m3", (64, 64))
        a, b = inst[1], inst[2]
        a.depth, b.depth = b.depth, a.depth
        _, after = compose_scene(inst, "m3", (64, 64))
        both = rasterize(a.contour, a.position, "m3", (64, 64)) & rasterize(b.contour, b.position, "m3", (64, 64))
        assert not (before != after)[~both].any()


@pytest.fixture(scope="module")
def small_best():
    cfg = BEST.replace(canvas=(128, 128), num_images=50)
    return cfg, build_taxonomy(255, cfg.taxonomy_seed, 128)


def test_best_preset_scene(small_best):
    cfg, table = small_best
    image, labels, rec = build_scene(cfg, table, 3)
    assert len(rec.instances) == 32
    assert all(1 <= r.K <= 25 for r in rec.instances)
    assert [r.depth for r in rec.instances] == list(range(1, 33))
    assert all(r.color == (255, 255, 255) for r in rec.instances)
    assert labels.max() <= 255


def test_build_scene_deterministic(small_best):
    cfg, table = small_best
    a = build_scene(cfg, table, 7)
    b = build_scene(cfg, table, 7)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    assert a[2] == b[2]


def test_image_mask_consistency_gray_m1(small_best):
    cfg, table = small_best
    for i in range(10):
        image, labels, _ = build_scene(cfg, table, i)
        np.testing.assert_array_equal(image.any(axis=2), labels > 0)


def test_index_out_of_range(small_best):
    cfg, table = small_best
    with pytest.raises(ConfigError):
        build_scene(cfg, table, 50)


def test_single_category_everything_is_label_one():
    cfg = BASELINE.replace(num_categories=1, canvas=(64, 64), instances_per_image=5, num_images=3)
    table = build_taxonomy(1, 0, 64)
    for i in range(3):
        _, labels, rec = build_scene(cfg, table, i)
        assert set(np.unique(labels)) <= {0, 1}
        assert all(r.category_id == 1 for r in rec.instances)


def test_uniform_category_sampling():
    # 20k images x 32 instances over 255 labels: every count within 20% of the mean
    cfg = BEST.replace(num_images=20000)
    counts = np.zeros(256, dtype=np.int64)
    for i in range(cfg.num_images):
        for r in plan_scene(cfg, i).instances:
            counts[r.category_id] += 1
    mean = 20000 * 32 / 255
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] - mean) <= 0.2 * mean)
