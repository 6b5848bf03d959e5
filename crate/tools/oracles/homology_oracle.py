"""Exact Betti numbers of the shipped .cx files and cylinder spectral gaps.

Ranks use sympy over the rationals; the gaps use numpy's dense symmetric
eigensolver on Laplacians assembled here from scratch.
"""
from itertools import combinations
from pathlib import Path
import sys

import numpy as np
import sympy

DATA = Path(__file__).resolve().parents[2] / "crates" / "core" / "data"

def closure(facets):
    cells = set()
    for f in facets:
        f = tuple(sorted(f))
        for k in range(1, len(f) + 1):
            cells.update(combinations(f, k))
    by_dim = {}
    for c in sorted(cells):
        by_dim.setdefault(len(c) - 1, []).append(c)
    return by_dim

def boundary(by_dim, q):
    """Matrix of C_{q+1} -> C_q."""
    rows = {c: i for i, c in enumerate(by_dim.get(q, []))}
    cols = by_dim.get(q + 1, [])
    m = np.zeros((len(rows), len(cols)))
    for j, s in enumerate(cols):
        for i in range(len(s)):
            m[rows[s[:i] + s[i + 1:]], j] = (-1) ** i
    return m

def betti(facets):
    by_dim = closure(facets)
    n = max(by_dim)
    ranks = [sympy.Matrix(boundary(by_dim, q).astype(int)).rank() if q < n else 0 for q in range(n + 1)]
    return [len(by_dim[q]) - ranks[q] - (ranks[q - 1] if q > 0 else 0) for q in range(n + 1)]

def read_cx(path):
    return [list(map(int, l.split()[1:])) for l in path.read_text().splitlines() if l.startswith("simplex")]

def cylinder(m, n):
    v = lambda i, j: j * m + (i % m)
    f = []
    for j in range(n):
        for i in range(m):
            f.append([v(i, j), v(i + 1, j), v(i + 1, j + 1)])
            f.append([v(i, j), v(i, j + 1), v(i + 1, j + 1)])
    return f

def gap(facets, q, tol=1e-8):
    by_dim = closure(facets)
    down = boundary(by_dim, q - 1) if q > 0 else np.zeros((0, len(by_dim[q])))
    up = boundary(by_dim, q)
    lap = down.T @ down + up @ up.T
    ev = np.linalg.eigvalsh(lap)
    scale = max(abs(ev).max(), 1.0)
    return min(e for e in ev if e > tol * scale)

if __name__ == "__main__":
    for name in ["circle3", "octahedron", "torus", "rp2", "cp2"]:
        print(name, betti(read_cx(DATA / f"{name}.cx")))
    for n in (4, 8, 16):
        print(f"cylinder 6x{n} q=1 gap {float(gap(cylinder(6, n), 1))!r}")
    sys.exit(0)
