#!/usr/bin/env python3
"""Generate a clipped Voronoi polygon mesh on (-1,1)x(0,1) whose cells are
aligned with the line x=0 (seeds are mirrored across it), and write it in the
plain-text mesh format read by `polydg`.

    python3 tools/gen_voronoi_mesh.py --cells 100 -o data/meshes/tc1_voronoi_100.txt
"""
import argparse

import numpy as np
from scipy.spatial import Voronoi

X0, X1, Y0, Y1 = -1.0, 1.0, 0.0, 1.0


def reflect(seeds):
    out = [seeds]
    out.append(np.column_stack([2 * X0 - seeds[:, 0], seeds[:, 1]]))
    out.append(np.column_stack([2 * X1 - seeds[:, 0], seeds[:, 1]]))
    out.append(np.column_stack([seeds[:, 0], 2 * Y0 - seeds[:, 1]]))
    out.append(np.column_stack([seeds[:, 0], 2 * Y1 - seeds[:, 1]]))
    return np.vstack(out)


def mirrored(left):
    right = np.column_stack([-left[:, 0], left[:, 1]])
    return np.vstack([left, right])


def cells(seeds):
    vor = Voronoi(reflect(seeds))
    polys = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        pts = vor.vertices[region]
        c = pts.mean(axis=0)
        order = np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]))
        polys.append(pts[order])
    return polys


def centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = cr.sum() / 2
    return np.array([((x + xn) * cr).sum() / (6 * a), ((y + yn) * cr).sum() / (6 * a)])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=100)
    ap.add_argument("--lloyd", type=int, default=60)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    half = args.cells // 2
    left = np.column_stack([rng.uniform(X0, 0.0, half), rng.uniform(Y0, Y1, half)])
    for _ in range(args.lloyd):
        polys = cells(mirrored(left))
        left = np.array([centroid(p) for p in polys[:half]])
        left[:, 0] = np.clip(left[:, 0], X0 + 1e-6, -1e-6)

    polys = cells(mirrored(left))
    tol = 1e-9
    verts, loops = [], []
    lookup = {}
    for poly in polys:
        loop = []
        for p in poly:
            p = np.where(np.abs(p) < 1e-13, 0.0, p)
            key = (round(p[0] / tol), round(p[1] / tol))
            if key not in lookup:
                lookup[key] = len(verts)
                verts.append(p)
            idx = lookup[key]
            if not loop or loop[-1] != idx:
                loop.append(idx)
        if loop[0] == loop[-1]:
            loop.pop()
        loops.append(loop)

    with open(args.output, "w") as f:
        f.write(f"# clipped Voronoi mesh, {len(loops)} cells, interface x=0\n")
        f.write(f"{len(verts)} {len(loops)}\n")
        for v in verts:
            f.write(f"{v[0]:.17g} {v[1]:.17g}\n")
        for loop, poly in zip(loops, polys):
            region = "p" if centroid(poly)[0] < 0 else "a"
            f.write(region + " " + str(len(loop)) + " " + " ".join(map(str, loop)) + "\n")


if __name__ == "__main__":
    main()
