"""Counter-based seed derivation.

Every random stream in the generator is keyed by a chain of integers
(master seed, domain tag, index, ...) folded through a SplitMix64 finalizer.
Nothing depends on call order, so any subset of images can be produced by
any worker in any order.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# domain tags keep the taxonomy, image and perturbation streams apart
TAG_TAXONOMY = 0x7461786F
TAG_IMAGE = 0x696D6167
TAG_INSTANCE = 0x696E7374
TAG_SHIFT = 0x73686674


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *counters: int) -> int:
    """Fold counters into seed one at a time.

    For a fixed prefix the map from the last counter to the result is
    injective over all 64-bit counters: the additive step uses an odd
    multiplier and ``mix64`` is a bijection.
    """
    s = seed & MASK64
    for c in counters:
        s = mix64((s + ((c & MASK64) + 1) * GOLDEN) & MASK64)
    return s


def derive_image_seed(master_seed: int, index: int) -> int:
    return derive_seed(master_seed, TAG_IMAGE, index)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
