"""Enumeration oracle for the metric acceptance corpus.

d_GH of finite spaces is half the least distortion over all correspondences;
every relation R in X x Y is enumerated. d_L and d_L,top enumerate all maps
and bijections. Prints Rust literals for the frozen test tables.
"""
from fractions import Fraction as F
from itertools import permutations, product
import math

def sp(*rows):
    return [[F(x) for x in r] for r in rows]

P1 = sp([0])
def two(a): return sp([0, a], [a, 0])
def three(a, b, c):  # d01=a, d02=b, d12=c
    return sp([0, a, b], [a, 0, c], [b, c, 0])

GH_CORPUS = [
    (P1, P1), (P1, two(1)), (P1, two("5/2")), (P1, three(3, 4, 5)),
    (two(1), two(3)), (two(1), two(1)), (two(2), two("1/2")),
    (two(1), three(1, 1, 1)), (two(2), three(1, 1, 1)), (two(1), three(1, 2, 1)),
    (two(4), three(1, 2, 3)), (three(1, 1, 1), three(1, 1, 1)), (three(1, 1, 1), three(2, 2, 2)),
    (three(1, 2, 1), three(1, 1, 1)), (three(3, 4, 5), three(1, 1, 1)), (three(3, 4, 5), three(5, 4, 3)),
    (three(1, 2, 3), three(2, 3, 4)), (two(3), three(3, 4, 5)), (three(1, "3/2", 2), two(2)),
    (three(2, 2, 3), three(1, 3, 3)),
]

def gh(x, y):
    n, m = len(x), len(y)
    cells = [(i, j) for i in range(n) for j in range(m)]
    best = None
    for mask in range(1, 1 << len(cells)):
        r = [cells[k] for k in range(len(cells)) if mask >> k & 1]
        if {i for i, _ in r} != set(range(n)) or {j for _, j in r} != set(range(m)):
            continue
        dis = max(abs(x[a][b] - y[c][d]) for a, c in r for b, d in r)
        best = dis if best is None or dis < best else best
    return best / 2

def dil(src, dst, f):
    n = len(src)
    if n < 2:
        return F(0)
    return max(dst[f[i]][f[j]] / src[i][j] for i in range(n) for j in range(n) if i != j)

def log_plus(t):
    v = float(t)
    return 0.0 if v <= 1.0 else math.log(v)

def d_l(x, y):
    n, m = len(x), len(y)
    phis = list(product(range(m), repeat=n))
    psis = list(product(range(n), repeat=m))
    best = math.inf
    for phi in phis:
        lp = log_plus(dil(x, y, phi))
        for psi in psis:
            disp = max(x[psi[phi[p]]][p] for p in range(n)) + max(y[phi[psi[q]]][q] for q in range(m))
            best = min(best, lp + log_plus(dil(y, x, psi)) + float(disp))
    return best

def d_ltop(x, y):
    if len(x) != len(y):
        return math.inf
    best = math.inf
    for p in permutations(range(len(x))):
        inv = [0] * len(p)
        for i, j in enumerate(p):
            inv[j] = i
        best = min(best, log_plus(dil(x, y, p)) + log_plus(dil(y, x, inv)))
    return best

def four(*d):  # d01 d02 d03 d12 d13 d23
    a, b, c, e, f, g = d
    return sp([0, a, b, c], [a, 0, e, f], [b, e, 0, g], [c, f, g, 0])

DL_CORPUS = [
    (P1, P1), (P1, two(2)), (two(1), two(2)), (two(1), two(3)), (P1, three(1, 1, 1)),
    (two(1), three(1, 1, 1)), (three(1, 1, 1), three(1, 2, 1)), (three(3, 4, 5), three(1, 1, 1)),
    (three(1, 2, 3), three(2, 3, 4)), (two(2), four(1, 2, 3, 1, 2, 1)), (P1, four(1, 1, 1, 1, 1, 1)),
    (four(1, 2, 3, 1, 2, 1), four(1, 1, 1, 1, 1, 1)), (four(1, 1, 2, 2, 1, 1), four(2, 2, 2, 2, 2, 2)),
]

def rust_space(s):
    rows = ", ".join("&[" + ", ".join(f'"{v}"' for v in r) + "]" for r in s)
    return f"&[{rows}]"

def rust_f64(v):
    return "f64::INFINITY" if math.isinf(v) else repr(v)

if __name__ == "__main__":
    print("const GH_CASES: &[(Space, Space, &str)] = &[")
    for x, y in GH_CORPUS:
        print(f'    ({rust_space(x)}, {rust_space(y)}, "{gh(x, y)}"),')
    print("];")
    print("const DL_CASES: &[(Space, Space, f64, f64)] = &[")
    for x, y in DL_CORPUS:
        print(f"    ({rust_space(x)}, {rust_space(y)}, {rust_f64(d_l(x, y))}, {rust_f64(d_ltop(x, y))}),")
    print("];")
