#!/usr/bin/env python3
"""Generate the skewed Jacobi tiled PRDG fixtures.

Point (t, x) with 0 <= t < T and 1 <= x_d <= N computes step t+1 from step t.
Coordinates are skewed to s_d = t + x_d and tiled with cubic tiles of size b;
T = T_b*b and N = (N_b - 1)*b.  The tile domain is then
0 <= t_b <= T_b - 1, t_b <= s_b <= t_b + N_b - 1 (for b >= 3).

Edges are region classes: t_b = 0 or t_b >= 1, crossed with, per spatial
dimension, left (s_b = t_b), interior, or right (s_b = t_b + N_b - 1).  A tile
offset (dt, ds...) applies in a class when dt = -1 needs t_b >= 1, ds = -1
needs s_b >= t_b + 1, and ds = 0 with dt = -1 needs s_b <= t_b + N_b - 2.

--check compares the rule against a brute-force projection of point
dependences before writing anything.
"""

import argparse
import itertools
import json
import os
import sys

SPACE = ["s_b", "r_b"]


def point_tile_deps(d, b, tb, nb):
    T, N = tb * b, (nb - 1) * b
    deps = set()
    tiles = set()
    for t in range(T):
        for x in itertools.product(range(1, N + 1), repeat=d):
            cons = (t // b,) + tuple((t + xi) // b for xi in x)
            tiles.add(cons)
            if t == 0:
                continue
            nbrs = [x]
            for k in range(d):
                for e in (-1, 1):
                    y = list(x)
                    y[k] += e
                    nbrs.append(tuple(y))
            for y in nbrs:
                if not all(1 <= yi <= N for yi in y):
                    continue
                prod = ((t - 1) // b,) + tuple((t - 1 + yi) // b for yi in y)
                if prod != cons:
                    deps.add((cons, tuple(p - c for p, c in zip(prod, cons))))
    return tiles, deps


def offset_applies(off, tile, nb):
    dt, ds = off[0], off[1:]
    t = tile[0]
    if all(o == 0 for o in off):
        return False
    if dt == -1 and t < 1:
        return False
    for o, x in zip(ds, tile[1:]):
        if o == -1 and x < t + 1:
            return False
        if o == 0 and dt == -1 and x > t + nb - 2:
            return False
    return True


def offsets(d):
    return [o for o in itertools.product((0, -1), repeat=d + 1) if any(o)]


def rule_tile_deps(d, tb, nb):
    tiles, deps = set(), set()
    for t in range(tb):
        for xs in itertools.product(range(t, t + nb), repeat=d):
            tile = (t,) + xs
            tiles.add(tile)
            for off in offsets(d):
                if offset_applies(off, tile, nb):
                    deps.add((tile, off))
    return tiles, deps


def check():
    for d in (1, 2):
        for b in (3, 4):
            for tb in (1, 2, 3):
                for nb in (2, 3, 4, 5):
                    if d == 2 and (b > 3 or nb > 4):
                        continue
                    got = point_tile_deps(d, b, tb, nb)
                    want = rule_tile_deps(d, tb, nb)
                    if got != want:
                        print(f"mismatch d={d} b={b} T_b={tb} N_b={nb}", file=sys.stderr)
                        print("  tiles only in projection:", sorted(got[0] - want[0])[:5], file=sys.stderr)
                        print("  tiles only in rule:", sorted(want[0] - got[0])[:5], file=sys.stderr)
                        print("  deps only in projection:", sorted(got[1] - want[1])[:5], file=sys.stderr)
                        print("  deps only in rule:", sorted(want[1] - got[1])[:5], file=sys.stderr)
                        return False
    return True


def class_constraints(tclass, xclasses, names):
    rows = ["t_b == 0" if tclass == 0 else "t_b >= 1"]
    for c, x in zip(xclasses, names):
        if c == "L":
            rows.append(f"{x} == t_b")
        elif c == "I":
            rows.append(f"{x} >= t_b + 1")
            rows.append(f"{x} <= t_b + N_b - 2")
        else:
            rows.append(f"{x} == t_b + N_b - 1")
    return rows


def class_applies(off, tclass, xclasses):
    dt, ds = off[0], off[1:]
    if dt == -1 and tclass == 0:
        return False
    for o, c in zip(ds, xclasses):
        if o == -1 and c == "L":
            return False
        if o == 0 and dt == -1 and c == "R":
            return False
    return True


def prdg(d):
    names = SPACE[:d]
    dims = ["t_b"] + names
    domain = ["0 <= t_b <= T_b - 1"] + [f"t_b <= {x} <= t_b + N_b - 1" for x in names]
    edges = []
    for tclass in (0, 1):
        for xclasses in itertools.product("LIR", repeat=d):
            deps = []
            for off in offsets(d):
                if class_applies(off, tclass, xclasses):
                    m = [f"t_b - 1" if off[0] else "t_b"]
                    m += [f"{x} - 1" if o else x for o, x in zip(off[1:], names)]
                    deps.append({"dst": "S", "map": m})
            if not deps:
                continue
            tag = ("t0" if tclass == 0 else "t") + "".join(xclasses)
            edges.append({"name": tag, "src": "S", "domain": class_constraints(tclass, xclasses, names), "deps": deps})
    return {"params": ["T_b", "N_b"], "nodes": [{"name": "S", "dims": dims, "domain": domain}], "edges": edges}


def schedules(d):
    if d == 1:
        return {"jacobi1d.sched.json": {"n": 2, "k": 1, "maps": {"S": {"rows": ["t_b", "2*t_b + s_b"]}}}}
    rows = ["t_b", "2*t_b + s_b", "2*t_b + r_b"]
    return {
        "jacobi2d_m1.sched.json": {"n": 3, "k": 1, "maps": {"S": {"rows": rows}}},
        "jacobi2d_m2.sched.json": {
            "n": 3,
            "k": 2,
            "comment": "second mapping as listed in the benchmark table, which repeats the skew of the first; "
            "only the space/time split differs (the j/k names in that row look like a typo for i/j)",
            "maps": {"S": {"rows": rows}},
        },
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    if args.check and not check():
        return 1
    for d in (1, 2):
        files = {f"jacobi{d}d.prdg.json": prdg(d)}
        files.update(schedules(d))
        for name, content in files.items():
            with open(os.path.join(args.out, name), "w") as f:
                json.dump(content, f, indent=2)
                f.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
