"""PNG encoding for images and single-channel label masks."""

import io
import struct
from pathlib import Path

import numpy as np
from PIL import Image

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
# level 3 encodes about twice as fast as the default 6 for ~18% more bytes
COMPRESS_LEVEL = 3


def mask_dtype(num_categories: int):
    return np.uint8 if num_categories <= 255 else np.uint16


def encode_mask(labels: np.ndarray, num_categories: int) -> bytes:
    """Grayscale PNG: 8-bit when C <= 255, 16-bit otherwise."""
    dtype = mask_dtype(num_categories)
    if labels.size and int(labels.max()) > np.iinfo(dtype).max:
        raise ValueError("label value does not fit the mask bit depth")
    arr = np.ascontiguousarray(labels, dtype=dtype)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG", compress_level=COMPRESS_LEVEL)
    return buf.getvalue()


def encode_image(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(buf, format="PNG", compress_level=COMPRESS_LEVEL)
    return buf.getvalue()


def decode_png(source) -> np.ndarray:
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    with Image.open(source) as im:
        arr = np.array(im)
    if arr.dtype.kind == "i":
        # some Pillow versions hand back 16-bit grayscale as int32
        arr = arr.astype(np.uint16)
    return arr


decode_mask = decode_png
decode_image = decode_png


def png_header(source) -> dict:
    """Width, height, bit depth and color type from the IHDR chunk."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as f:
            head = f.read(33)
    else:
        head = bytes(source[:33])
    if len(head) < 33 or head[:8] != PNG_SIGNATURE or head[12:16] != b"IHDR":
        raise ValueError("not a PNG file")
    width, height, bit_depth, color_type = struct.unpack(">IIBB", head[16:26])
    return {"width": width, "height": height, "bit_depth": bit_depth, "color_type": color_type}


def write_bytes_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)
