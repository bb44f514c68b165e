#!/usr/bin/env python3
"""Recomputes mesh statistics from an OFF file with numpy and compares them
with the CSVs written by `sbmt quality` and `sbmt hist`."""
import csv
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np


def read_off(path):
    tokens = Path(path).read_text().split()
    assert tokens[0] == "OFF"
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    v = np.array(tokens[pos : pos + 3 * nv], dtype=float).reshape(nv, 3)[:, :2]
    pos += 3 * nv
    f = np.array(tokens[pos : pos + 4 * nf], dtype=int).reshape(nf, 4)
    assert (f[:, 0] == 3).all()
    return v, f[:, 1:]


def stats(v, f):
    p = v[f]  # (F, 3, 2)
    e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
    L = np.linalg.norm(e, axis=2)
    area = 0.5 * (e[:, 0, 0] * (-e[:, 2, 1]) - e[:, 0, 1] * (-e[:, 2, 0]))
    # angle at vertex k is between the edges leaving it
    ang = []
    for k in range(3):
        a, b = -e[:, (k + 2) % 3], e[:, k]
        cosv = (a * b).sum(1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        ang.append(np.degrees(np.arccos(np.clip(cosv, -1, 1))))
    ang = np.stack(ang, 1)
    minang = ang.min(1)
    ar = L.max(1) ** 2 / (2 * area)
    equi = (L.max(1) - L.min(1)) <= 1e-6 * L.max(1)
    hist = np.bincount(np.minimum(np.floor((minang + 1e-9) / 2).astype(int), 30), minlength=31)
    return {
        "triangle_count": len(f),
        "min_angle_deg": minang.min(),
        "min_area": area.min(),
        "sliver_count": int((minang < 5).sum()),
        "equilateral_ratio": equi.mean(),
        "ar_median": np.median(ar),
        "ar_max": ar.max(),
    }, hist


def main():
    cli, bitmap = sys.argv[1], sys.argv[2]
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        subprocess.run([cli, "mesh", "--input", bitmap, "--out", str(d / "m.off")], check=True)
        subprocess.run([cli, "quality", str(d / "m.off"), "--csv", str(d / "q.csv")], check=True)
        subprocess.run([cli, "hist", str(d / "m.off"), "--csv", str(d / "h.csv")], check=True)
        v, f = read_off(d / "m.off")
        ours, hist = stats(v, f)
        with open(d / "q.csv") as fh:
            theirs = {r["metric"]: float(r["value"]) for r in csv.DictReader(fh)}
        with open(d / "h.csv") as fh:
            raw = [int(float(r["raw"])) for r in csv.DictReader(fh)]
    failures = []
    for k, val in ours.items():
        tol = 1e-6 * max(1.0, abs(val))
        if abs(theirs[k] - val) > tol:
            failures.append(f"{k}: cli {theirs[k]} vs oracle {val}")
    if raw != hist.tolist():
        failures.append(f"histogram differs: cli {raw} vs oracle {hist.tolist()}")
    for line in failures:
        print("MISMATCH", line)
    print(f"{len(ours)} statistics and 31 histogram bins compared, {len(failures)} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
