"""Transportation problem and interval transportation problem (ITP).

``solve_tp`` is a primal transportation simplex (north-west corner start,
Bland's rule on entering and leaving cells) on the problem balanced with a
zero-cost dummy demand column that absorbs spare capacity.

For the ITP, ``U* = max z(d, q)`` over the region
``R = {(d, q) in D x Q : sum(q) >= sum(d)}``. Since ``z`` is convex in the
right-hand side the maximum sits on a vertex of ``R``; ``itp_oracle``
enumerates those vertices. ``itp_bisection`` reproduces the control flow of a
bisection search on the attainable value: for each candidate ``u0`` a local
search over vertices of ``R`` tries to exhibit ``z >= u0``. Its subproblems
are heuristic, so only the oracle is certified exact.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .instances import IntervalTransportInstance, TransportInstance

EPS = 1e-9


class InfeasibleBalance(ValueError):
    pass


class SizeCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class TpSolution:
    flows: np.ndarray
    objective: float
    supply_duals: np.ndarray
    demand_duals: np.ndarray
    pivots: int = 0

    def dual_value(self, supplies, demands) -> float:
        return float(np.dot(supplies, self.supply_duals) + np.dot(demands, self.demand_duals))


def _northwest_corner(s, d):
    n, m = len(s), len(d)
    s, d = s.copy(), d.copy()
    x = np.zeros((n, m))
    basis = []
    i = j = 0
    while True:
        basis.append((i, j))
        if i == n - 1 and j == m - 1:
            x[i, j] = max(s[i], 0.0)
            break
        if s[i] <= d[j]:
            x[i, j] = s[i]
            d[j] -= s[i]
            s[i] = 0.0
            if i < n - 1:
                i += 1
            else:
                j += 1
        else:
            x[i, j] = d[j]
            s[i] -= d[j]
            d[j] = 0.0
            j += 1
    return x, basis


def _duals(c, basis, n, m):
    """Solve u_i + v_j = c_ij on the basis tree with u_0 = 0."""
    adj = [[] for _ in range(n + m)]
    for i, j in basis:
        adj[i].append(n + j)
        adj[n + j].append(i)
    pot = np.full(n + m, np.nan)
    pot[0] = 0.0
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if np.isnan(pot[b]):
                if a < n:
                    pot[b] = c[a, b - n] - pot[a]
                else:
                    pot[b] = c[b, a - n] - pot[a]
                queue.append(b)
    return pot[:n], pot[n:], adj


def _tree_path(adj, src, dst):
    """Node path from ``src`` to ``dst`` in the basis tree."""
    prev = {src: None}
    queue = deque([src])
    while queue:
        a = queue.popleft()
        if a == dst:
            break
        for b in adj[a]:
            if b not in prev:
                prev[b] = a
                queue.append(b)
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _simplex(c, s, d, max_pivots=100_000):
    n, m = c.shape
    x, basis = _northwest_corner(s, d)
    basis_set = set(basis)
    scale = max(1.0, float(np.abs(c).max()))
    pivots = 0
    while True:
        u, v, adj = _duals(c, basis, n, m)
        red = c - u[:, None] - v[None, :]
        entering = None
        for i in range(n):  # Bland: lowest-index improving cell
            for j in range(m):
                if (i, j) not in basis_set and red[i, j] < -EPS * scale:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            return x, u, v, pivots
        if pivots >= max_pivots:
            raise RuntimeError("transportation simplex did not converge")
        i0, j0 = entering
        path = _tree_path(adj, i0, n + j0)
        cells = []
        for a, b in zip(path[:-1], path[1:]):
            cells.append((a, b - n) if a < n else (b, a - n))
        minus = cells[0::2]
        plus = cells[1::2]
        theta = min(x[cell] for cell in minus)
        leaving = min(cell for cell in minus if x[cell] <= theta + EPS * max(1.0, theta))
        for cell in minus:
            x[cell] -= theta
        for cell in plus:
            x[cell] += theta
        x[entering] = theta
        x[leaving] = 0.0
        basis.remove(leaving)
        basis_set.discard(leaving)
        basis.append(entering)
        basis_set.add(entering)
        pivots += 1


def solve_tp(inst: TransportInstance) -> TpSolution:
    """Optimal flows, cost and duals of a transportation problem.

    Supply duals are <= 0 (capacity rows are inequalities); primal and dual
    objectives coincide at optimality.
    """
    q = np.asarray(inst.supplies, dtype=float)
    dem = np.asarray(inst.demands, dtype=float)
    c = np.asarray(inst.costs, dtype=float)
    slack = q.sum() - dem.sum()
    if slack < -EPS * max(1.0, dem.sum()):
        raise InfeasibleBalance(f"total supply {q.sum():g} < total demand {dem.sum():g}")
    slack = max(slack, 0.0)
    n, m = c.shape
    cb = np.hstack([c, np.zeros((n, 1))])
    db = np.append(dem, slack)
    x, u, v, pivots = _simplex(cb, q.copy(), db)
    # shift so the dummy column's dual is zero; supply duals become <= 0
    vd = v[-1]
    flows = x[:, :m]
    flows[np.abs(flows) < 1e-12] = 0.0
    z = float(np.sum(c * flows))
    return TpSolution(flows, z, u + vd, v[:m] - vd, pivots)


def tp_value(costs, d, q) -> float:
    """Optimal TP cost z(d, q) for the given cost matrix."""
    return solve_tp(TransportInstance(q, d, costs)).objective


# ------------------------------------------------------------------ ITP

@dataclass(frozen=True)
class ItpResult:
    value: float
    d: np.ndarray
    q: np.ndarray
    method: str
    iterations: int
    certified: bool
    evaluated: int = 0
    upper_bound: float = float("nan")

    def to_dict(self) -> dict:
        return {"value": self.value, "d": self.d.tolist(), "q": self.q.tolist(),
                "method": self.method, "iterations": self.iterations,
                "certified": self.certified}


class _ValueCache:
    """Memoized z over points of R, keyed by the (d, q) tuple."""

    def __init__(self, inst: IntervalTransportInstance):
        self.costs = np.asarray(inst.costs, dtype=float)
        self.m = inst.shape[1]
        self.table: dict[tuple, float] = {}

    def __call__(self, point: tuple) -> float:
        val = self.table.get(point)
        if val is None:
            d, q = np.array(point[:self.m]), np.array(point[self.m:])
            val = tp_value(self.costs, d, q)
            self.table[point] = val
        return val


def _bounds(inst):
    lo = np.concatenate([inst.demand_lo, inst.cap_lo]).astype(float)
    hi = np.concatenate([inst.demand_hi, inst.cap_hi]).astype(float)
    return lo, hi


def _balance(point, m):
    return sum(point[m:]) - sum(point[:m])


def _tol(lo, hi):
    return EPS * max(1.0, float(np.abs(hi).max()), float(np.abs(lo).max()))


def _vertex(lo, hi, m, bits, free, tol):
    """Point of R with coordinates at bounds per ``bits``; coordinate ``free``
    (if any) solved from sum(q) == sum(d). None if outside R."""
    pt = [hi[k] if b else lo[k] for k, b in enumerate(bits)]
    if free is None:
        return tuple(pt) if _balance(pt, m) >= -tol else None
    pt[free] = 0.0
    rest = _balance(pt, m)
    val = rest if free < m else -rest
    if val < lo[free] - tol or val > hi[free] + tol:
        return None
    pt[free] = min(max(val, lo[free]), hi[free])
    return tuple(pt) if abs(_balance(pt, m)) <= tol else None


def region_vertices(inst: IntervalTransportInstance) -> list[tuple]:
    """Candidate vertex set of R, sorted lexicographically and deduplicated."""
    lo, hi = _bounds(inst)
    m, dim = inst.shape[1], len(lo)
    tol = _tol(lo, hi)
    out = set()
    for bits in itertools.product((0, 1), repeat=dim):
        v = _vertex(lo, hi, m, bits, None, tol)
        if v is not None:
            out.add(v)
    for free in range(dim):
        for rest in itertools.product((0, 1), repeat=dim - 1):
            bits = rest[:free] + (0,) + rest[free:]
            v = _vertex(lo, hi, m, bits, free, tol)
            if v is not None:
                out.add(v)
    return sorted(out)


def itp_oracle(inst: IntervalTransportInstance, cap: int = 16) -> ItpResult:
    """Exact U* by evaluating z on every vertex of R."""
    n, m = inst.shape
    if n + m > cap:
        raise SizeCapExceeded(f"n + m = {n + m} exceeds oracle cap {cap}")
    if not inst.region_nonempty():
        raise InfeasibleBalance("empty region R")
    z = _ValueCache(inst)
    best, best_pt = -np.inf, None
    verts = region_vertices(inst)
    for v in verts:
        val = z(v)
        if val > best:
            best, best_pt = val, v
    return ItpResult(best, np.array(best_pt[:m]), np.array(best_pt[m:]), "oracle",
                     len(verts), True, len(verts), best)


class _VertexGraph:
    """Vertices of R encoded as (bits, free) with one-coordinate neighbourhoods."""

    def __init__(self, inst):
        self.lo, self.hi = _bounds(inst)
        self.m = inst.shape[1]
        self.dim = len(self.lo)
        self.tol = _tol(self.lo, self.hi)

    def point(self, key):
        return _vertex(self.lo, self.hi, self.m, key[0], key[1], self.tol)

    def neighbours(self, key):
        """Flip one coordinate to its other bound, or move the balance-solved
        coordinate; each candidate must remain inside R."""
        bits, free = key
        out = []
        for k in range(self.dim):
            if k == free or self.lo[k] == self.hi[k]:
                continue
            nb = bits[:k] + (1 - bits[k],) + bits[k + 1:]
            out.append((nb, free))
            # a flip that breaks the balance is repaired on the hyperplane
            out.append((nb, k))
        for f in [None, *range(self.dim)]:
            if f != free:
                out.append((bits, f))
        pts = []
        for nb, f in out:
            if f is not None:
                nb = nb[:f] + (0,) + nb[f + 1:]
            nk = (nb, f)
            pt = self.point(nk)
            if pt is not None:
                pts.append((nk, pt))
        return pts


def itp_bisection(inst: IntervalTransportInstance, variant: str = "A",
                  tol: float = 1e-6, max_iter: int = 200) -> ItpResult:
    """Bisection on the attainable value with vertex local search subproblems.

    ``variant="A"`` keeps one visited set for the whole run: every vertex is
    expanded at most once, and the best-first frontier of unexpanded
    neighbours carries over from one candidate value to the next.
    ``variant="B"`` clears the visited set for every candidate and restarts a
    walk from the incumbent.
    """
    if variant not in ("A", "B"):
        raise ValueError("variant must be 'A' or 'B'")
    if not inst.region_nonempty():
        raise InfeasibleBalance("empty region R")
    n, m = inst.shape
    z = _ValueCache(inst)
    graph = _VertexGraph(inst)
    start = (tuple([0] * m + [1] * n), None)  # d at lower, q at upper bounds
    incumbent = start
    lo_val = z(graph.point(start))
    cmax = max(float(np.max(inst.costs)), 0.0)
    hi_val = float(np.sum(inst.demand_hi)) * cmax
    if np.all(graph.lo == graph.hi):
        hi_val = lo_val
    visited = {graph.point(start)}
    frontier = []
    best_seen = [lo_val, start]
    _push_neighbours(graph, z, start, visited, frontier)
    iters = 0
    while hi_val - lo_val > tol and iters < max_iter:
        iters += 1
        u0 = 0.5 * (lo_val + hi_val)
        if variant == "A":
            found = _attain_frontier(graph, z, u0, visited, frontier, best_seen)
        else:
            visited = {graph.point(incumbent)}
            found = _attain(graph, z, incumbent, u0, visited)
        if found is None:
            hi_val = u0
        else:
            incumbent = found
            lo_val = z(graph.point(found))
    pt = graph.point(incumbent)
    return ItpResult(lo_val, np.array(pt[:m]), np.array(pt[m:]), f"bisection-{variant}",
                     iters, False, len(z.table), max(hi_val, lo_val))


def _push_neighbours(graph, z, key, visited, frontier):
    for nk, pt in graph.neighbours(key):
        if pt not in visited:
            heapq.heappush(frontier, (-z(pt), pt, len(frontier) + len(visited), nk))


def _attain_frontier(graph, z, u0, visited, frontier, best_seen):
    """Expand the best frontier vertex until one reaches z >= u0.

    ``best_seen`` holds the best expanded vertex as [value, key]; a vertex
    expanded while failing an earlier, higher candidate still counts.
    """
    if best_seen[0] >= u0 - EPS:
        return best_seen[1]
    while frontier:
        neg, pt, _, key = heapq.heappop(frontier)
        if pt in visited:
            continue
        visited.add(pt)
        _push_neighbours(graph, z, key, visited, frontier)
        if -neg > best_seen[0]:
            best_seen[:] = [-neg, key]
        if -neg >= u0 - EPS:
            return key
    return None


def _attain(graph, z, start, u0, visited):
    """Walk from ``start`` over unvisited vertices, always to the best-valued
    one (even if worse), until some vertex reaches z >= u0 or the walk is
    boxed in by visited vertices."""
    cur = start
    cur_val = z(graph.point(cur))
    while cur_val < u0 - EPS:
        best = None
        for key, pt in graph.neighbours(cur):
            if pt in visited:
                continue
            val = z(pt)
            if best is None or val > best[0] or (val == best[0] and pt < best[2]):
                best = (val, key, pt)
        if best is None:
            return None
        cur_val, cur = best[0], best[1]
        visited.add(best[2])
    return cur
