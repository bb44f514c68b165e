#!/usr/bin/env python3
"""Regenerates the bitmap and chain fixtures in fixtures/.

Foreground pixels are written black (0) in binary PGM (P5, maxval 255).
"""
import argparse
import math
from pathlib import Path

import numpy as np
from scipy import ndimage


def disk(r):
    y, x = np.mgrid[-r : r + 1, -r : r + 1]
    return x * x + y * y <= r * r


def polygon_mask(n, poly):
    """Even-odd fill of a polygon sampled at pixel centres."""
    y, x = np.mgrid[0:n, 0:n].astype(float)
    inside = np.zeros((n, n), dtype=bool)
    m = len(poly)
    for k in range(m):
        (x0, y0), (x1, y1) = poly[k], poly[(k + 1) % m]
        if y0 == y1:
            continue
        crosses = (y0 > y) != (y1 > y)
        xs = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= crosses & (x < xs)
    return inside


def star(n, hole=False):
    s = n / 200.0
    c = n / 2.0
    r_out, r_in = 85 * s, 38 * s
    pts = []
    for k in range(10):
        r = r_out if k % 2 == 0 else r_in
        a = math.pi / 2 + k * math.pi / 5
        pts.append((c + r * math.cos(a), c - r * math.sin(a)))
    m = polygon_mask(n, pts)
    # round the tips
    m = ndimage.binary_opening(m, structure=disk(max(2, round(6 * s))))
    if hole:
        y, x = np.mgrid[0:n, 0:n]
        m &= (x - c) ** 2 + (y - c) ** 2 > (15 * s) ** 2
    return m


def droplet(n):
    # superellipse body with a rounded tail on top
    y, x = np.mgrid[0:n, 0:n].astype(float)
    c = n / 2.0
    u, v = (x - c) / 70.0, (y - (c + 20)) / 60.0
    body = np.abs(u) ** 2.5 + np.abs(v) ** 2.5 <= 1.0
    tail = polygon_mask(n, [(c - 45, c), (c, c - 85), (c + 45, c)])
    return ndimage.binary_opening(body | tail, structure=disk(8))


def capsule(n, p, q, w):
    y, x = np.mgrid[0:n, 0:n].astype(float)
    px, py = p
    dx, dy = q[0] - px, q[1] - py
    t = np.clip(((x - px) * dx + (y - py) * dy) / (dx * dx + dy * dy), 0, 1)
    return (x - px - t * dx) ** 2 + (y - py - t * dy) ** 2 <= w * w


def yglyph(n):
    c = n / 2.0
    m = capsule(n, (c, c + 10), (c, c + 80), 16)
    m |= capsule(n, (c, c + 10), (c - 60, c - 70), 16)
    m |= capsule(n, (c, c + 10), (c + 60, c - 70), 16)
    # soften the notches between the arms
    return ndimage.binary_closing(m, structure=disk(6))


def write_pgm(path, mask):
    img = np.where(mask, 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def write_hexagon(path):
    # pointy-top hexagon whose corners are vertices of the lattice with origin
    # (0, 0) and edge e; every side runs through lattice vertices and edge
    # midpoints, so the remeshed domain is symmetric about x = 75 e
    e = math.sqrt(0.45)
    h = e * math.sqrt(3) / 2
    i0, j0, k = 75, 86, 10
    pts = [(i0, j0 - 2 * k), (i0 - 1.5 * k, j0 - k), (i0 - 1.5 * k, j0 + k),
           (i0, j0 + 2 * k), (i0 + 1.5 * k, j0 + k), (i0 + 1.5 * k, j0 - k)]
    with open(path, "w") as f:
        f.write("closed\n")
        for i, j in pts:
            f.write("%.17g %.17g\n" % (i * e, j * h))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_pgm(out / "star.pgm", star(200))
    write_pgm(out / "droplet.pgm", droplet(200))
    write_pgm(out / "yglyph.pgm", yglyph(200))
    write_pgm(out / "star100.pgm", star(100))
    write_pgm(out / "star400.pgm", star(400))
    write_pgm(out / "star_hole.pgm", star(200, hole=True))
    write_hexagon(out / "hexagon.chain")


if __name__ == "__main__":
    main()
