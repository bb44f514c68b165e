#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Writes tests/oracles/expected.json. Nothing here imports project code:
closed forms are evaluated with mpmath, fixture pixel counts come from a raw
byte scan, and catalog tilings are checked with shapely.
"""
import json
import math
from pathlib import Path

import mpmath as mp
from shapely.geometry import Polygon
from shapely.ops import unary_union

ROOT = Path(__file__).resolve().parents[2]
mp.mp.dps = 40


def bounds(a, b, c, e):
    th1 = mp.atan(b / (e + a - mp.sqrt(a * a - b * b)))
    th2 = mp.atan(c / (e + a))
    return float(mp.degrees(min(th1, th2))), float(mp.mpf(b) * c / 2)


def pgm_foreground(path):
    data = path.read_bytes()
    # header: magic, width, height, maxval, one whitespace byte
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1
    w, h = int(fields[1]), int(fields[2])
    pixels = data[pos : pos + w * h]
    return w, h, sum(1 for byte in pixels if byte < 128)


def parse_catalog(text):
    entries, cur = [], None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, _, rest = line.partition(" ")
        rest = rest.strip()
        if tag == "case":
            cur = {"name": rest, "apex": None, "bind": {}, "traces": []}
            entries.append(cur)
        elif tag == "cycle":
            cur["cycle"] = rest.split()
        elif tag == "apex":
            cur["apex"] = rest
        elif tag == "trace":
            cur["traces"].append(rest.split())
        elif tag == "faces":
            cur["faces"] = None if rest == "noop" else [f.split() for f in rest.split(";")]
        elif tag == "bind":
            cur["bind"] = dict(kv.split("=") for kv in rest.split())
    return entries


def realize(entry):
    corners = {"A": (0.0, 0.0), "B": (1.0, 0.0), "C": (0.5, math.sqrt(3) / 2)}
    cyc = entry["cycle"]
    idx = [cyc.index(v) for v in "ABC"]
    pos = {}
    for k in range(3):
        start = idx[k]
        end = idx[k + 1] if k < 2 else len(cyc)
        p0, p1 = corners["ABC"[k]], corners["ABC"[(k + 1) % 3]]
        inner = cyc[start + 1 : end]
        pos[cyc[start]] = p0
        for j, lab in enumerate(inner):
            t = (j + 1) / (len(inner) + 1)
            pos[lab] = (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))
    if entry["apex"]:
        pos[entry["apex"]] = (0.5, math.sqrt(3) / 6)
    return pos


def check_entry(entry):
    tri = Polygon([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
    if entry["faces"] is None:
        return {"noop": True, "faces": 0, "tiles": True, "all_ccw": True}
    pos = realize(entry)
    polys, ccw = [], True
    for f in entry["faces"]:
        pts = [pos[entry["bind"].get(l, l)] for l in f]
        (x0, y0), (x1, y1), (x2, y2) = pts
        area2 = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        ccw &= area2 > 1e-12
        polys.append(Polygon(pts))
    union = unary_union(polys)
    total = sum(p.area for p in polys)
    tiles = abs(total - tri.area) <= 1e-9 * tri.area and union.symmetric_difference(tri).area <= 1e-9 * tri.area
    return {"noop": False, "faces": len(polys), "tiles": bool(tiles), "all_ccw": bool(ccw)}


def main():
    out = {}
    th, area = bounds(0.26, 0.125, 0.183, math.sqrt(0.45))
    out["bounds_default"] = {"theta_deg": th, "area": area}
    out["recommended_edge"] = {"pi": float(mp.mpf("1.86") / mp.pi), "half_pi": float(mp.mpf("1.86") / (mp.pi / 2))}
    out["equilateral_ar"] = float(2 / mp.sqrt(3))
    out["right_345"] = {"min_angle_deg": float(mp.degrees(mp.atan(mp.mpf(3) / 4))), "ar": float(mp.mpf(5) / mp.mpf("2.4"))}
    out["cot_equilateral"] = float(1 / mp.sqrt(3))
    out["fixtures"] = {}
    for p in sorted((ROOT / "fixtures").glob("*.pgm")):
        w, h, n = pgm_foreground(p)
        out["fixtures"][p.name] = {"width": w, "height": h, "foreground": n}
    text = (ROOT / "src" / "catalog.txt").read_text()
    out["catalog"] = {e["name"]: check_entry(e) for e in parse_catalog(text)}
    dest = Path(__file__).resolve().parent / "expected.json"
    dest.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
