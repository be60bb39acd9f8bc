"""K-MedianPlex: profit-maximising K-median with an entropy complexity penalty.

For open facilities S and allocation sets N_k the profit is

    Z = sum_k R_k * (1 - alpha * C_k) - phi * K
    R_k = sum_{i in N_k} (r - gamma * d_ik) * W_i
    C_k = sum_{i in N_k} w_i * log2(1 / w_i),   w = W / sum(W) over all nodes

and every open facility must satisfy alpha * C_k < 1. Nodes may be left
uncovered, in which case they contribute to no facility.

The heuristic pipeline is ``solve_kmedian`` -> ``improve`` -> ``uncover``
(which re-runs ``improve`` after every dropped node).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .instances import MedianPlexInstance

__all__ = [
    "AlphaViolation", "MedianPlexSolution", "entropy_complexity", "revenue",
    "objective", "build_solution", "solve_kmedian", "improve", "uncover",
    "solve", "brute_force", "UNCOVERED",
]

UNCOVERED = -1
IMPROVE_TOL = 1e-9


class AlphaViolation(ValueError):
    pass


@dataclass(frozen=True)
class MedianPlexSolution:
    S: tuple[int, ...]
    allocation: np.ndarray  # node -> facility node, or UNCOVERED
    R: dict
    C: dict
    Z: float
    trace: tuple[float, ...] = field(default=(), repr=False)

    @property
    def covered(self) -> np.ndarray:
        return np.flatnonzero(self.allocation != UNCOVERED)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.allocation == k)

    def to_dict(self) -> dict:
        return {
            "S": list(self.S),
            "allocation": {str(i): (None if a == UNCOVERED else int(a))
                           for i, a in enumerate(self.allocation)},
            "Z": self.Z,
            "per_facility": {str(k): {"R": self.R[k], "C": self.C[k]} for k in self.S},
        }


def entropy_complexity(members, w) -> float:
    """Sum of w_i * log2(1 / w_i) over ``members``; 0 for the empty set."""
    w = np.asarray(w, dtype=float)
    total = 0.0
    for i in members:
        wi = w[i]
        total += wi * math.log2(1.0 / wi)
    return total


def revenue(k: int, members, inst: MedianPlexInstance) -> float:
    total = 0.0
    for i in members:
        total += (inst.r - inst.gamma * inst.dist[i, k]) * inst.weights[i]
    return total


def _check_allocation(inst, S, allocation):
    S = tuple(int(k) for k in S)
    if len(set(S)) != inst.K:
        raise ValueError(f"|S| = {len(set(S))}, expected K = {inst.K}")
    alloc = np.asarray(allocation, dtype=int)
    if alloc.shape != (inst.n,):
        raise ValueError("allocation must map every node")
    bad = [i for i, a in enumerate(alloc) if a != UNCOVERED and a not in S]
    if bad:
        raise ValueError(f"nodes {bad} allocated to closed facilities")
    return tuple(sorted(S)), alloc


def _facility_terms(inst, S, alloc):
    w = inst.normalized_weights
    R, C = {}, {}
    for k in S:
        mem = np.flatnonzero(alloc == k)
        R[k] = float(revenue(k, mem, inst))
        C[k] = float(entropy_complexity(mem, w))
    return R, C


def _profit(inst, S, R, C) -> float:
    for k in S:
        if inst.alpha * C[k] >= 1.0:
            raise AlphaViolation(
                f"alpha * C = {inst.alpha * C[k]:.6g} >= 1 at facility {k}")
    total = 0.0
    for k in S:
        total += R[k] * (1.0 - inst.alpha * C[k])
    return float(total - inst.phi * inst.K)


def objective(inst: MedianPlexInstance, S, allocation) -> float:
    """Profit Z of facilities ``S`` with the given allocation (UNCOVERED = -1)."""
    S, alloc = _check_allocation(inst, S, allocation)
    R, C = _facility_terms(inst, S, alloc)
    return _profit(inst, S, R, C)


def build_solution(inst, S, allocation, trace=()) -> MedianPlexSolution:
    S, alloc = _check_allocation(inst, S, allocation)
    R, C = _facility_terms(inst, S, alloc)
    Z = _profit(inst, S, R, C)
    alloc = alloc.copy()
    alloc.setflags(write=False)
    return MedianPlexSolution(S, alloc, R, C, Z, tuple(trace) + (Z,))


# ------------------------------------------------------------ K-median start

def _median_cost(inst, S):
    return float(np.dot(inst.weights, inst.dist[:, list(S)].min(axis=1)))


def _nearest(inst, S):
    S = list(S)
    return np.array([S[int(np.argmin(inst.dist[i, S]))] for i in range(inst.n)])


def solve_kmedian(inst: MedianPlexInstance, method: str = "auto",
                  cap: int = 10 ** 5) -> MedianPlexSolution:
    """Classical weighted K-median start with nearest allocation.

    ``method`` is ``exact`` (enumeration), ``interchange`` (greedy plus
    vertex substitution) or ``auto`` (exact when C(n, K) <= cap).
    """
    n, K = inst.n, inst.K
    if method == "auto":
        method = "exact" if math.comb(n, K) <= cap else "interchange"
    if method == "exact":
        best, S = math.inf, None
        for cand in combinations(range(n), K):
            c = _median_cost(inst, cand)
            if c < best:
                best, S = c, cand
    elif method == "interchange":
        S = _kmedian_interchange(inst)
    else:
        raise ValueError(f"unknown K-median method {method!r}")
    return build_solution(inst, S, _nearest(inst, S))


def _kmedian_interchange(inst):
    n, K = inst.n, inst.K
    S: list[int] = []
    while len(S) < K:
        cand = [j for j in range(n) if j not in S]
        S.append(cand[int(np.argmin([_median_cost(inst, S + [j]) for j in cand]))])
    S = tuple(sorted(S))
    cur = _median_cost(inst, S)
    while True:
        move = None
        for a in S:
            for b in range(n):
                if b in S:
                    continue
                cand = tuple(sorted(set(S) - {a} | {b}))
                c = _median_cost(inst, cand)
                if c < cur - 1e-12 and (move is None or c < move[0]):
                    move = (c, cand)
        if move is None:
            return S
        cur, S = move


# ------------------------------------------------------------ improvement

class _State:
    """Mutable working copy with per-facility R and C kept incrementally."""

    def __init__(self, inst, sol: MedianPlexSolution):
        self.inst = inst
        self.S = list(sol.S)
        self.alloc = np.array(sol.allocation)
        self.R = dict(sol.R)
        self.C = dict(sol.C)
        self.Z = sol.Z
        self.trace = list(sol.trace) or [sol.Z]
        w = inst.normalized_weights
        self.h = w * np.log2(1.0 / w)

    def margin(self, i, k):
        inst = self.inst
        return (inst.r - inst.gamma * inst.dist[i, k]) * inst.weights[i]

    def term(self, R, C):
        return R * (1.0 - self.inst.alpha * C)

    def feasible(self, C):
        return self.inst.alpha * C < 1.0

    def accept(self):
        """Recompute Z from scratch and record it; the caller has checked the gain."""
        sol = build_solution(self.inst, self.S, self.alloc)
        if not sol.Z > self.Z:
            return False
        self.R, self.C, self.Z = dict(sol.R), dict(sol.C), sol.Z
        self.trace.append(sol.Z)
        return True

    def solution(self):
        sol = build_solution(self.inst, self.S, self.alloc)
        return MedianPlexSolution(sol.S, sol.allocation, sol.R, sol.C, sol.Z, tuple(self.trace))


def _best_reassignment(st: _State):
    best = None
    for i in range(st.inst.n):
        a = st.alloc[i]
        if a == UNCOVERED:
            continue
        Ra, Ca = st.R[a] - st.margin(i, a), st.C[a] - st.h[i]
        base = st.term(st.R[a], st.C[a])
        for b in st.S:
            if b == a:
                continue
            Cb = st.C[b] + st.h[i]
            if not st.feasible(Cb):
                continue
            Rb = st.R[b] + st.margin(i, b)
            gain = (st.term(Ra, Ca) + st.term(Rb, Cb)) - (base + st.term(st.R[b], st.C[b]))
            if gain > IMPROVE_TOL and (best is None or gain > best[0]):
                best = (gain, i, b)
    return best


def _best_relocation(st: _State, k):
    mem = np.flatnonzero(st.alloc == k)
    best = None
    for m in mem:
        if m in st.S:
            continue
        R_new = 0.0
        for i in mem:
            R_new += st.margin(i, m)
        gain = st.term(R_new, st.C[k]) - st.term(st.R[k], st.C[k])
        if gain > IMPROVE_TOL and (best is None or gain > best[0]):
            best = (gain, int(m))
    return best


def _improve_state(st: _State) -> bool:
    changed_any = False
    while True:
        changed = False
        while True:
            mv = _best_reassignment(st)
            if mv is None:
                break
            _, i, b = mv
            old = st.alloc[i]
            st.alloc[i] = b
            if st.accept():
                changed = True
            else:
                st.alloc[i] = old
                break
        for k in list(st.S):
            mv = _best_relocation(st, k)
            if mv is None:
                continue
            _, m = mv
            old_S, old_alloc = list(st.S), st.alloc.copy()
            st.alloc[st.alloc == k] = m
            st.S = sorted(set(st.S) - {k} | {m})
            if st.accept():
                changed = True
            else:
                st.S, st.alloc = old_S, old_alloc
        if not changed:
            return changed_any
        changed_any = True


def improve(inst: MedianPlexInstance, sol: MedianPlexSolution) -> MedianPlexSolution:
    """Node reassignment and local 1-median relocation until neither improves Z.

    Reassignment moves one covered node to another open facility, taking the
    best strict gain (ties: smallest node). Relocation moves a facility to one
    of its own allocated nodes if that strictly raises Z.
    """
    st = _State(inst, build_solution(inst, sol.S, sol.allocation, sol.trace[:-1]))
    _improve_state(st)
    return st.solution()


def uncover(inst: MedianPlexInstance, sol: MedianPlexSolution) -> MedianPlexSolution:
    """Drop the covered node whose removal raises Z most, re-improve, repeat."""
    st = _State(inst, build_solution(inst, sol.S, sol.allocation, sol.trace[:-1]))
    while True:
        best = None
        for i in range(inst.n):
            a = st.alloc[i]
            if a == UNCOVERED:
                continue
            gain = (st.term(st.R[a] - st.margin(i, a), st.C[a] - st.h[i])
                    - st.term(st.R[a], st.C[a]))
            if gain > IMPROVE_TOL and (best is None or gain > best[0]):
                best = (gain, i)
        if best is None:
            break
        i = best[1]
        old = st.alloc[i]
        st.alloc[i] = UNCOVERED
        if not st.accept():
            st.alloc[i] = old
            break
        _improve_state(st)
    return st.solution()


def solve(inst: MedianPlexInstance, restarts: int = 1, seed: int = 0,
          kmedian_method: str = "auto") -> MedianPlexSolution:
    """Full heuristic: K-median start, improvement, then uncovering.

    Extra restarts begin from random facility sets with nearest allocation.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        if r == 0:
            start = solve_kmedian(inst, kmedian_method)
        else:
            S = tuple(sorted(rng.choice(inst.n, size=inst.K, replace=False).tolist()))
            start = build_solution(inst, S, _nearest(inst, S))
        sol = uncover(inst, improve(inst, start))
        if best is None or sol.Z > best.Z:
            best = sol
    return best


# ------------------------------------------------------------ oracle

def brute_force(inst: MedianPlexInstance, allow_uncovered: bool = True,
                cap: int = 2_000_000):
    """Global optimum over every facility set and every allocation.

    Returns ``(Z, S, allocation)``. Allocations violating alpha * C < 1 are
    skipped. Vectorised over allocations for each facility set.
    """
    n, K = inst.n, inst.K
    labels = K + 1 if allow_uncovered else K
    total = math.comb(n, K) * labels ** n
    if total > cap:
        raise ValueError(f"{total} (S, allocation) pairs exceed cap {cap}")
    A = np.array(list(product(range(labels), repeat=n)), dtype=np.int8)
    W = np.asarray(inst.weights, dtype=float)
    w = W / W.sum()
    h = w * np.log2(1.0 / w)
    best = (-math.inf, None, None)
    for S in combinations(range(n), K):
        Z = np.full(len(A), -inst.phi * K)
        ok = np.ones(len(A), dtype=bool)
        for slot, k in enumerate(S):
            mask = (A == slot).astype(float)
            R = mask @ ((inst.r - inst.gamma * inst.dist[:, k]) * W)
            C = mask @ h
            ok &= inst.alpha * C < 1.0
            Z += R * (1.0 - inst.alpha * C)
        Z[~ok] = -math.inf
        j = int(np.argmax(Z))
        if Z[j] > best[0]:
            alloc = np.array([S[a] if a < K else UNCOVERED for a in A[j]])
            best = (float(Z[j]), S, alloc)
    return best
