"""Stratified p-center: open p sites minimising the weighted sum over strata of
each stratum's largest allocation distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .instances import SpcpInstance

__all__ = ["SpcpSolution", "evaluate", "solve_enum", "solve_bnb", "solve_interchange"]


@dataclass(frozen=True)
class SpcpSolution:
    P: tuple[int, ...]
    radii: tuple[float, ...]
    objective: float
    exact: bool
    nodes: int = 0

    def to_dict(self) -> dict:
        return {"P": list(self.P), "per_stratum_radii": list(self.radii),
                "objective": self.objective, "exact": self.exact}


class _Strata:
    """Per-stratum member index arrays and weights, precomputed once."""

    def __init__(self, inst: SpcpInstance):
        self.members = [np.asarray(s.members, dtype=int) for s in inst.strata]
        self.weights = [s.weight for s in inst.strata]
        self.dist = np.asarray(inst.dist)

    def radii(self, cols) -> list[float]:
        alloc = self.dist[:, list(cols)].min(axis=1)
        return [float(alloc[mem].max()) for mem in self.members]

    def objective(self, cols) -> float:
        return _weighted(self.weights, self.radii(cols))


def _weighted(weights, radii) -> float:
    total = 0.0
    for w, r in zip(weights, radii):
        total += w * r
    return total


def evaluate(inst: SpcpInstance, P) -> tuple[float, list[float]]:
    """Objective and per-stratum radii of the open set ``P``."""
    P = tuple(sorted(int(j) for j in P))
    if len(set(P)) != inst.p:
        raise ValueError(f"|P| = {len(set(P))}, expected p = {inst.p}")
    if P[0] < 0 or P[-1] >= inst.n:
        raise ValueError("P contains an unknown site")
    st = _Strata(inst)
    radii = st.radii(P)
    return _weighted(st.weights, radii), radii


def _solution(inst, P, exact, nodes=0) -> SpcpSolution:
    obj, radii = evaluate(inst, P)
    return SpcpSolution(tuple(sorted(P)), tuple(radii), obj, exact, nodes)


def solve_enum(inst: SpcpInstance, cap: int = 10 ** 6) -> SpcpSolution:
    """Exhaustive search over p-subsets; lexicographically smallest optimum."""
    if math.comb(inst.n, inst.p) > cap:
        raise ValueError(f"C({inst.n}, {inst.p}) exceeds enumeration cap {cap}")
    st = _Strata(inst)
    best, best_P = math.inf, None
    for P in combinations(range(inst.n), inst.p):
        val = st.objective(P)
        if val < best:
            best, best_P = val, P
    return _solution(inst, best_P, True, math.comb(inst.n, inst.p))


def solve_bnb(inst: SpcpInstance, incumbent: SpcpSolution | None = None) -> SpcpSolution:
    """Depth-first include/exclude branching over sites in index order.

    The bound at a node assumes every still-undecided site is open, which can
    only shrink allocation distances; nodes whose bound reaches the incumbent
    are pruned.
    """
    st = _Strata(inst)
    n, p = inst.n, inst.p
    if incumbent is None:
        incumbent = solve_interchange(inst)
    best, best_P = incumbent.objective, incumbent.P
    nodes = 0
    stack = [((), 0)]
    while stack:
        chosen, k = stack.pop()
        nodes += 1
        free = n - k
        if len(chosen) + free == p:
            leaf = chosen + tuple(range(k, n))
        elif len(chosen) == p:
            leaf = chosen
        else:
            leaf = None
        if leaf is not None:
            val = st.objective(leaf)
            if val < best:
                best, best_P = val, leaf
            continue
        bound = st.objective(chosen + tuple(range(k, n)))
        if bound >= best:
            continue
        # exclude pushed first so include is explored first
        stack.append((chosen, k + 1))
        stack.append((chosen + (k,), k + 1))
    return _solution(inst, best_P, True, nodes)


def _interchange(st, P, n):
    cur = st.objective(P)
    while True:
        move = None
        for a in P:
            for b in range(n):
                if b in P:
                    continue
                cand = tuple(sorted(set(P) - {a} | {b}))
                val = st.objective(cand)
                if val < cur and (move is None or val < move[0]):
                    move = (val, cand)
        if move is None:
            return P, cur
        cur, P = move


def _greedy(st, n, p, first=None):
    P = [] if first is None else [first]
    while len(P) < p:
        cand = [j for j in range(n) if j not in P]
        vals = [st.objective(P + [j]) for j in cand]
        P.append(cand[int(np.argmin(vals))])
    return tuple(sorted(P))


def solve_interchange(inst: SpcpInstance, restarts: int = 1, seed: int = 0) -> SpcpSolution:
    """Greedy construction then best-improvement 1-interchange.

    The first restart is the plain greedy; later ones fix a random first site.
    Returns the best local optimum (objective, then lexicographic P).
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    st = _Strata(inst)
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        first = None if r == 0 else int(rng.integers(inst.n))
        P, val = _interchange(st, _greedy(st, inst.n, inst.p, first), inst.n)
        if best is None or (val, P) < best:
            best = (val, P)
    return _solution(inst, best[1], False)
