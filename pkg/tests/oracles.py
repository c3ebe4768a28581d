"""Independent reference computations used by several test files."""
import math

import numpy as np


def gf2_rank(M) -> int:
    M = np.array(M, dtype=np.uint8) % 2
    rank = 0
    rows, cols = M.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r, c]), None)
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        for r in range(rows):
            if r != rank and M[r, c]:
                M[r] ^= M[rank]
        rank += 1
    return rank


def gf2_cycle_space_dim(X) -> int:
    """E - rank of the vertex-edge incidence matrix over GF(2)."""
    if X.E == 0:
        return 0
    idx = {v: i for i, v in enumerate(X.vertices)}
    M = np.zeros((X.V, X.E), dtype=np.uint8)
    for k, (u, v) in enumerate(X.edges):
        M[idx[u], k] ^= 1
        M[idx[v], k] ^= 1
    return X.E - gf2_rank(M)


def fuss_catalan(n: int) -> int:
    """Ternary-tree count C(4n, n) / (3n + 1)."""
    return math.comb(4 * n, n) // (3 * n + 1)


def brute_noncrossing(m: int) -> int:
    """Count noncrossing perfect matchings on 2m points by filtering all matchings."""
    def matchings(pts):
        if not pts:
            yield []
            return
        a = pts[0]
        for i in range(1, len(pts)):
            rest = pts[1:i] + pts[i + 1:]
            for mm in matchings(rest):
                yield [(a, pts[i])] + mm

    def crossing(p, q):
        (a, b), (c, d) = sorted(p), sorted(q)
        return a < c < b < d or c < a < d < b

    return sum(1 for mm in matchings(list(range(2 * m)))
               if not any(crossing(p, q) for i, p in enumerate(mm) for q in mm[i + 1:]))


def bisect(f, a, b, tol=1e-14):
    fa = f(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
        if b - a < tol:
            break
    return 0.5 * (a + b)
