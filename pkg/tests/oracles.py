"""Independent brute-force references used by the tests.

Each function here is written from the model definitions directly, with plain
loops, and shares no code with the package solvers.
"""

import math
from functools import lru_cache
from itertools import combinations, product


def tp_integer_enum(supplies, demands, costs):
    """Minimum cost over all integer flows (integer data only).

    Columns are filled one at a time; the memo key is the vector of remaining
    capacities, so the search is a small DP rather than a blind product.
    """
    q = tuple(int(v) for v in supplies)
    d = tuple(int(v) for v in demands)
    n, m = len(q), len(d)
    c = [[float(costs[i][j]) for j in range(m)] for i in range(n)]

    def splits(total, caps):
        if len(caps) == 1:
            if total <= caps[0]:
                yield (total,)
            return
        for x in range(min(total, caps[0]) + 1):
            for rest in splits(total - x, caps[1:]):
                yield (x,) + rest

    @lru_cache(maxsize=None)
    def best(j, caps):
        if j == m:
            return 0.0
        out = math.inf
        for col in splits(d[j], caps):
            cost = sum(c[i][j] * col[i] for i in range(n))
            rem = tuple(caps[i] - col[i] for i in range(n))
            out = min(out, cost + best(j + 1, rem))
        return out

    return best(0, q)


def stratified_objective(dist, strata, P):
    """Sum over strata of weight times the largest nearest-open distance."""
    total = 0.0
    for members, weight in strata:
        worst = 0.0
        for i in members:
            near = min(dist[i][j] for j in P)
            worst = max(worst, near)
        total += weight * worst
    return total


def pcenter_enum(dist, p):
    """Classical p-center value: minimise the largest allocation distance."""
    m, n = len(dist), len(dist[0])
    best = math.inf
    for P in combinations(range(n), p):
        r = max(min(dist[i][j] for j in P) for i in range(m))
        best = min(best, r)
    return best


def plex_objective(W, dist, r, gamma, phi, alpha, K, S, alloc):
    """Profit of facilities S with allocation alloc (None = uncovered)."""
    tot = sum(W)
    z = -phi * K
    for k in S:
        rev, ent = 0.0, 0.0
        for i, a in enumerate(alloc):
            if a == k:
                rev += (r - gamma * dist[i][k]) * W[i]
                wi = W[i] / tot
                ent += wi * math.log2(1 / wi)
        z += rev * (1 - alpha * ent)
    return z


def plex_best_allocation(W, dist, r, gamma, phi, alpha, K, S, allow_uncovered=True):
    """Best allocation for a fixed facility set by full enumeration."""
    labels = list(S) + ([None] if allow_uncovered else [])
    best = -math.inf
    for alloc in product(labels, repeat=len(W)):
        z = plex_objective(W, dist, r, gamma, phi, alpha, K, S, alloc)
        tot = sum(W)
        ok = True
        for k in S:
            ent = sum((W[i] / tot) * math.log2(tot / W[i]) for i, a in enumerate(alloc) if a == k)
            ok &= alpha * ent < 1
        if ok:
            best = max(best, z)
    return best


def ev_step(p, i, w, u, m):
    """One period of the vehicle equations, written out term by term."""
    k = m.R / m.Tr
    i1 = i + m.delta * (m.S * u - m.I * i - m.Q * w) / m.L
    v = k * w
    w1 = w + m.delta * m.J * (m.Q * i - k * (m.M * m.G * m.Fr + m.C * v * v))
    if w1 < 0:
        w1 = 0.0
    p1 = p + m.delta * (k * w1)
    return p1, i1, w1


def ev_energy(controls, m):
    p = i = w = 0.0
    total = 0.0
    for u in controls:
        p, i, w = ev_step(p, i, w, u, m)
        total += m.S * u * i + m.B * (u * i) ** 2
    return total, p
