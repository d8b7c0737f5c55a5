"""Small brute-force geometry helpers, independent of the package code."""

import math


def winding_number(pt, poly):
    x, y = pt
    wn = 0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        cross = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0)
        if y0 <= y < y1 and cross > 0:
            wn += 1
        elif y1 <= y < y0 and cross < 0:
            wn -= 1
    return wn


def seg_distance(pt, a, b):
    px, py = pt
    ax, ay = a
    bx, by = b
    vx, vy = bx - ax, by - ay
    ll = vx * vx + vy * vy
    t = 0.0 if ll == 0 else max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / ll))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def boundary_distance(pt, poly):
    n = len(poly)
    return min(seg_distance(pt, poly[i], poly[(i + 1) % n]) for i in range(n))


def strictly_inside(pt, poly):
    return winding_number(pt, poly) != 0 and boundary_distance(pt, poly) > 1e-9
