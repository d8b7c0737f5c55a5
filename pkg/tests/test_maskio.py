import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from segsynth.maskio import decode_image, decode_mask, encode_image, encode_mask, png_header


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 24), st.integers(1, 24))))
def test_8bit_round_trip(labels):
    data = encode_mask(labels, 255)
    assert png_header(data)["bit_depth"] == 8
    out = decode_mask(data)
    assert out.dtype == np.uint8
    np.testing.assert_array_equal(out, labels)
    assert encode_mask(out, 255) == data


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint16, st.tuples(st.integers(1, 24), st.integers(1, 24)), elements=st.integers(0, 65535)))
def test_16bit_round_trip(labels):
    data = encode_mask(labels, 65535)
    hdr = png_header(data)
    assert (hdr["bit_depth"], hdr["color_type"]) == (16, 0)
    out = decode_mask(data)
    np.testing.assert_array_equal(out, labels)
    assert encode_mask(out, 65535) == data


@pytest.mark.parametrize("C,depth", [(1, 8), (255, 8), (256, 16), (500, 16)])
def test_depth_follows_category_count(C, depth):
    assert png_header(encode_mask(np.zeros((4, 4), np.uint16), C))["bit_depth"] == depth


def test_label_too_large_for_depth():
    with pytest.raises(ValueError):
        encode_mask(np.full((2, 2), 300, np.uint16), 255)


def test_image_round_trip():
    img = np.random.default_rng(0).integers(0, 256, (7, 9, 3)).astype(np.uint8)
    data = encode_image(img)
    hdr = png_header(data)
    assert (hdr["width"], hdr["height"], hdr["bit_depth"], hdr["color_type"]) == (9, 7, 8, 2)
    np.testing.assert_array_equal(decode_image(data), img)


def test_not_png():
    with pytest.raises(ValueError):
        png_header(b"GIF89a" + b"\0" * 40)
