"""Binary rasterization of positioned radial contours.

Sampling rules shared by the fast kernels and the per-pixel oracle:

* pixel (px, py) is sampled at its center; in the instance frame that is
  ``(px + 0.5 - X, py + 0.5 - Y)`` for an integer position ``(X, Y)``;
* a pixel is on a stroke of width d iff the squared distance from its
  center to some polygon edge is <= (d/2)**2 (round caps and joins);
* interiority is the even-odd crossing rule, ``x < x_cross`` per edge.

Both paths evaluate the same floating-point expressions in the same order,
which is what makes the bit-for-bit equivalence checks meaningful.

Mask types:

* ``m1``  union of the strokes of every ring;
* ``m2``  interior of the outer ring minus interior of the inner ring,
  plus the strokes of the inner and outer rings (K=1 gives the stroke);
* ``m3``  interior of the outer ring plus its stroke.

Including the boundary strokes makes m1 <= m2 <= m3 hold for any width.
"""

import math

import numpy as np
from numba import njit

from segsynth.contour import RadialContour
from segsynth.errors import ConfigError

MASK_TYPES = ("m1", "m2", "m3")
LINE_WIDTHS = (1, 2, 3)


def _check_canvas(canvas):
    W, H = canvas
    if W <= 0 or H <= 0:
        raise ConfigError(f"canvas must have positive area, got {W}x{H}")
    return int(W), int(H)


def _check_width(d):
    if d not in LINE_WIDTHS:
        raise ConfigError(f"line width must be one of {LINE_WIDTHS}, got {d}")


def _check_mask_type(mask_type):
    if mask_type not in MASK_TYPES:
        raise ConfigError(f"mask type must be one of {MASK_TYPES}, got {mask_type!r}")


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _paint_segment(owner, value, ax, ay, bx, by, X, Y, hw, hw2):
    H, W = owner.shape
    dx = bx - ax
    dy = by - ay
    L2 = dx * dx + dy * dy
    y0 = min(ay, by) - hw
    y1 = max(ay, by) + hw
    row_lo = max(0, int(math.floor(y0 + Y - 0.5)) - 1)
    row_hi = min(H - 1, int(math.ceil(y1 + Y - 0.5)) + 1)
    for py in range(row_lo, row_hi + 1):
        cy = py + 0.5 - Y
        # x extent of the segment part within hw of this row, padded by hw
        if dy == 0.0:
            xa = min(ax, bx)
            xb = max(ax, bx)
        else:
            t0 = (cy - hw - ay) / dy
            t1 = (cy + hw - ay) / dy
            if t0 > t1:
                t0, t1 = t1, t0
            t0 = max(t0, 0.0)
            t1 = min(t1, 1.0)
            if t0 > t1:
                continue
            xa = min(ax + t0 * dx, ax + t1 * dx)
            xb = max(ax + t0 * dx, ax + t1 * dx)
        col_lo = max(0, int(math.floor(xa - hw + X - 0.5)) - 1)
        col_hi = min(W - 1, int(math.ceil(xb + hw + X - 0.5)) + 1)
        for px in range(col_lo, col_hi + 1):
            cx = px + 0.5 - X
            if L2 > 0.0:
                t = ((cx - ax) * dx + (cy - ay) * dy) / L2
                t = min(max(t, 0.0), 1.0)
            else:
                t = 0.0
            ex = cx - (ax + t * dx)
            ey = cy - (ay + t * dy)
            if ex * ex + ey * ey <= hw2:
                owner[py, px] = value


@njit(cache=True)
def _paint_strokes(owner, value, polys, X, Y, hw, hw2):
    K, V, _ = polys.shape
    for k in range(K):
        for i in range(V):
            j = (i + 1) % V
            _paint_segment(owner, value, polys[k, i, 0], polys[k, i, 1],
                           polys[k, j, 0], polys[k, j, 1], X, Y, hw, hw2)


@njit(cache=True)
def _row_crossings(poly, cy, out):
    """Sorted even-odd crossing abscissae of the row at local height cy."""
    V = poly.shape[0]
    n = 0
    for i in range(V):
        j = (i + 1) % V
        yi = poly[i, 1]
        yj = poly[j, 1]
        if (yi > cy) != (yj > cy):
            xi = poly[i, 0]
            xj = poly[j, 0]
            out[n] = (xj - xi) * (cy - yi) / (yj - yi) + xi
            n += 1
    out[:n].sort()
    return n


@njit(cache=True)
def _inside_sorted(xs, n, cx):
    # odd number of crossings strictly right of cx
    for i in range(0, n, 2):
        if xs[i] <= cx and cx < xs[i + 1]:
            return True
    return False


@njit(cache=True)
def _paint_interior(owner, value, outer, inner, use_inner, X, Y):
    """Paint pixels inside ``outer`` and, if use_inner, not inside ``inner``."""
    H, W = owner.shape
    ys = outer[:, 1]
    row_lo = max(0, int(math.floor(ys.min() + Y - 0.5)) - 1)
    row_hi = min(H - 1, int(math.ceil(ys.max() + Y - 0.5)) + 1)
    xs_out = np.empty(outer.shape[0], dtype=np.float64)
    xs_in = np.empty(inner.shape[0], dtype=np.float64)
    for py in range(row_lo, row_hi + 1):
        cy = py + 0.5 - Y
        n = _row_crossings(outer, cy, xs_out)
        m = 0
        if use_inner:
            m = _row_crossings(inner, cy, xs_in)
        for p in range(0, n, 2):
            a = xs_out[p]
            b = xs_out[p + 1]
            col_lo = max(0, int(math.floor(a + X - 0.5)) - 1)
            col_hi = min(W - 1, int(math.ceil(b + X - 0.5)) + 1)
            for px in range(col_lo, col_hi + 1):
                cx = px + 0.5 - X
                if a <= cx and cx < b:
                    if use_inner and _inside_sorted(xs_in, m, cx):
                        continue
                    owner[py, px] = value


@njit(cache=True)
def _paint_instance(owner, value, polys, X, Y, mask_code, hw, hw2):
    K = polys.shape[0]
    if mask_code == 1:
        _paint_strokes(owner, value, polys, X, Y, hw, hw2)
    elif mask_code == 2:
        _paint_interior(owner, value, polys[K - 1], polys[0], True, X, Y)
        _paint_strokes(owner, value, polys[0:1], X, Y, hw, hw2)
        if K > 1:
            _paint_strokes(owner, value, polys[K - 1:K], X, Y, hw, hw2)
    else:
        _paint_interior(owner, value, polys[K - 1], polys[K - 1], False, X, Y)
        _paint_strokes(owner, value, polys[K - 1:K], X, Y, hw, hw2)


# ---------------------------------------------------------------- fast path


def _as_polys(contour) -> np.ndarray:
    polys = contour.polygons if isinstance(contour, RadialContour) else contour
    polys = np.ascontiguousarray(polys, dtype=np.float64)
    if polys.ndim == 2:
        polys = polys[None]
    return polys


def paint(owner: np.ndarray, value: int, contour, position, mask_type: str, d: int) -> None:
    """Write ``value`` into ``owner`` (int32, H x W) over the instance support."""
    hw = d / 2.0
    X, Y = int(position[0]), int(position[1])
    _paint_instance(owner, value, _as_polys(contour), X, Y, int(mask_type[1]), hw, hw * hw)


def _rasterize(contour, position, mask_type, d, canvas):
    W, H = _check_canvas(canvas)
    _check_width(d)
    _check_mask_type(mask_type)
    owner = np.zeros((H, W), dtype=np.int32)
    paint(owner, 1, contour, position, mask_type, d)
    return owner.astype(bool)


def raster_skeleton(contour, position, d, canvas) -> np.ndarray:
    """m1 support: pixels within d/2 of any ring edge. Returns bool (H, W)."""
    return _rasterize(contour, position, "m1", d, canvas)


def raster_ring(contour, position, canvas, d: int = 1) -> np.ndarray:
    return _rasterize(contour, position, "m2", d, canvas)


def raster_fill(contour, position, canvas, d: int = 1) -> np.ndarray:
    return _rasterize(contour, position, "m3", d, canvas)


def rasterize(contour, position, mask_type, canvas, d: int = 1) -> np.ndarray:
    return _rasterize(contour, position, mask_type, d, canvas)


# ---------------------------------------------------------------- oracle


def _pixel_centers(canvas, position):
    W, H = canvas
    X, Y = int(position[0]), int(position[1])
    py, px = np.mgrid[0:H, 0:W]
    return px + 0.5 - X, py + 0.5 - Y


def _oracle_stroke(poly, cx, cy, hw2):
    on = np.zeros(cx.shape, dtype=bool)
    V = len(poly)
    for i in range(V):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % V]
        dx = bx - ax
        dy = by - ay
        L2 = dx * dx + dy * dy
        if L2 > 0.0:
            t = ((cx - ax) * dx + (cy - ay) * dy) / L2
            t = np.minimum(np.maximum(t, 0.0), 1.0)
        else:
            t = np.zeros_like(cx)
        ex = cx - (ax + t * dx)
        ey = cy - (ay + t * dy)
        on |= ex * ex + ey * ey <= hw2
    return on


def _oracle_evenodd(poly, cx, cy):
    inside = np.zeros(cx.shape, dtype=bool)
    V = len(poly)
    for i in range(V):
        xi, yi = poly[i]
        xj, yj = poly[(i + 1) % V]
        straddle = (yi > cy) != (yj > cy)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = (xj - xi) * (cy - yi) / (yj - yi) + xi
        inside ^= straddle & (cx < x_cross)
    return inside


def oracle_rasterize(contour, position, mask_type, canvas, d: int = 1) -> np.ndarray:
    """Exhaustive per-pixel evaluation straight from the vertex lists.

    O(W*H*K*V); meant for canvases up to about 128 x 128.
    """
    W, H = _check_canvas(canvas)
    _check_width(d)
    _check_mask_type(mask_type)
    polys = _as_polys(contour)
    hw = d / 2.0
    hw2 = hw * hw
    cx, cy = _pixel_centers((W, H), position)
    outer, inner = polys[-1], polys[0]
    if mask_type == "m1":
        out = np.zeros((H, W), dtype=bool)
        for poly in polys:
            out |= _oracle_stroke(poly, cx, cy, hw2)
        return out
    if mask_type == "m2":
        band = _oracle_evenodd(outer, cx, cy) & ~_oracle_evenodd(inner, cx, cy)
        return band | _oracle_stroke(inner, cx, cy, hw2) | _oracle_stroke(outer, cx, cy, hw2)
    return _oracle_evenodd(outer, cx, cy) | _oracle_stroke(outer, cx, cy, hw2)
