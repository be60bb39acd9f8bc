"""Planar single-facility location and polyellipse covering.

``distsum`` is the weighted Weber objective; ``weiszfeld`` minimises it with
the classical fixed-point iteration plus the optimality test at demand points.
A polyellipse with foci U and radius r is the level set ``distsum_U(x) = r``;
the smallest r whose polyellipse encloses every demand point is the largest
distsum over those points, so fixed-foci covering is closed form and foci
selection reduces to a subset search.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .instances import PlanarDemandSet

__all__ = [
    "AtDemandPoint", "WeberResult", "PolyellipseCover", "ContourGrid",
    "distsum", "distsum_gradient", "weiszfeld", "covering_radius",
    "select_foci", "contour_grid", "bounding_box",
]

COINCIDE_TOL = 1e-12


class AtDemandPoint(ValueError):
    """Gradient requested at a point where distsum is not differentiable."""


@dataclass(frozen=True)
class WeberResult:
    x: np.ndarray
    objective: float
    iterations: int
    reason: str  # gradient-tol | demand-point-optimal | max-iter
    history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "objective": self.objective,
                "iterations": self.iterations, "reason": self.reason}


@dataclass(frozen=True)
class PolyellipseCover:
    foci: PlanarDemandSet
    radius: float
    attaining: int
    foci_index: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        out = {"foci": self.foci.points.tolist(), "weights": self.foci.weights.tolist(),
               "radius": self.radius, "attaining": self.attaining}
        if self.foci_index is not None:
            out["foci_index"] = list(self.foci_index)
        return out


def distsum(dset: PlanarDemandSet, x) -> float:
    """Weighted sum of Euclidean distances from ``x`` to the demand points."""
    x = np.asarray(x, dtype=float)
    return float(np.dot(dset.weights, np.linalg.norm(dset.points - x, axis=1)))


def _coincident(dset, x):
    diff = np.linalg.norm(dset.points - x, axis=1)
    scale = max(1.0, float(np.abs(dset.points).max()))
    return np.flatnonzero(diff <= COINCIDE_TOL * scale), diff


def distsum_gradient(dset: PlanarDemandSet, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    hit, diff = _coincident(dset, x)
    if hit.size:
        raise AtDemandPoint(f"x coincides with demand point {int(hit[0])}")
    return ((x - dset.points) * (dset.weights / diff)[:, None]).sum(axis=0)


def _demand_point_test(dset, k):
    """Resultant pull at demand point k; optimal there iff its norm <= weight."""
    u = dset.points[k]
    diff = u - dset.points
    dist = np.linalg.norm(diff, axis=1)
    same = dist <= COINCIDE_TOL * max(1.0, float(np.abs(dset.points).max()))
    w_here = dset.weights[same].sum()
    other = ~same
    pull = ((diff[other] / dist[other, None]) * dset.weights[other, None]).sum(axis=0)
    inv = (dset.weights[other] / dist[other]).sum()
    return pull, w_here, inv


def weiszfeld(dset: PlanarDemandSet, tol: float = 1e-9, max_iter: int = 100_000,
              x0=None) -> WeberResult:
    """Minimise distsum by Weiszfeld iteration.

    Starts from the weighted centroid unless ``x0`` is given. When an iterate
    lands on a demand point, that point is declared optimal if the pull of the
    other points does not exceed its weight; otherwise the iterate steps off
    along the descent direction with the usual step length.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, pts = dset.weights, dset.points
    x = np.average(pts, axis=0, weights=w) if x0 is None else np.asarray(x0, dtype=float)
    f = distsum(dset, x)
    hist = [f]
    reason = "max-iter"
    it = 0
    while it < max_iter:
        it += 1
        hit, diff = _coincident(dset, x)
        if hit.size:
            k = int(hit[0])
            x = pts[k].copy()
            pull, w_here, inv = _demand_point_test(dset, k)
            norm = float(np.linalg.norm(pull))
            if norm <= w_here or inv == 0.0:
                f = distsum(dset, x)
                hist.append(f)
                reason = "demand-point-optimal"
                break
            step = -pull / norm * (norm - w_here) / inv
        else:
            coef = w / diff
            step = (coef[:, None] * pts).sum(axis=0) / coef.sum() - x
        x_new = x + step
        f_new = distsum(dset, x_new)
        # guard against round-off ascent
        halvings = 0
        while f_new > f and halvings < 60:
            step = 0.5 * step
            x_new = x + step
            f_new = distsum(dset, x_new)
            halvings += 1
        if f_new > f:
            x_new, f_new = x, f
        x, f = x_new, f_new
        hist.append(f)
        if np.linalg.norm(step) <= tol:
            reason = "gradient-tol"
            break
    # an anchor can never beat the optimum; fall back if round-off says otherwise
    anchor = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2) @ w
    k = int(np.argmin(anchor))
    if anchor[k] < f:
        x, f = pts[k].copy(), float(anchor[k])
        hist.append(f)
    x = np.array(x, dtype=float)
    # report the value of the returned array itself (SIMD paths can differ by an ulp)
    return WeberResult(x, distsum(dset, x), it, reason, tuple(hist))


def covering_radius(foci: PlanarDemandSet, demand: PlanarDemandSet) -> PolyellipseCover:
    """Smallest radius whose polyellipse with the given foci encloses every demand point."""
    d = np.linalg.norm(demand.points[:, None, :] - foci.points[None, :, :], axis=2)
    phi = d @ foci.weights
    k = int(np.argmax(phi))
    return PolyellipseCover(foci, float(phi[k]), k)


def _subset_radius(D, subset):
    return float(D[:, list(subset)].sum(axis=1).max())


def select_foci(demand: PlanarDemandSet, k: int, mode: str = "exact",
                cap: int = 10 ** 6) -> PolyellipseCover:
    """Choose k demand points as unit-weight foci minimising the covering radius.

    ``mode="exact"`` enumerates every k-subset (lexicographically first on
    ties). ``mode="swap"`` seeds one greedy subset per possible first focus,
    improves each by best-improvement single swaps and keeps the best.
    """
    N = len(demand)
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, {N}]")
    D = np.linalg.norm(demand.points[:, None, :] - demand.points[None, :, :], axis=2)
    if mode == "exact":
        if math.comb(N, k) > cap:
            raise ValueError(f"C({N}, {k}) exceeds the enumeration cap {cap}")
        best, best_set = math.inf, None
        for sub in itertools.combinations(range(N), k):
            r = _subset_radius(D, sub)
            if r < best:
                best, best_set = r, sub
    elif mode == "swap":
        best, best_set = math.inf, None
        for first in range(N):
            sub = _swap_descent(D, _greedy_foci(D, k, first))
            r = _subset_radius(D, sub)
            if r < best - 1e-12 or (abs(r - best) <= 1e-12 and sub < best_set):
                best, best_set = r, sub
    else:
        raise ValueError("mode must be 'exact' or 'swap'")
    foci = PlanarDemandSet.unit(demand.points[list(best_set)])
    cover = covering_radius(foci, demand)
    return PolyellipseCover(foci, cover.radius, cover.attaining, tuple(best_set))


def _greedy_foci(D, k, first):
    chosen = [first]
    acc = D[:, first].copy()
    while len(chosen) < k:
        cand = [j for j in range(D.shape[0]) if j not in chosen]
        radii = [(acc + D[:, j]).max() for j in cand]
        j = cand[int(np.argmin(radii))]
        chosen.append(j)
        acc = acc + D[:, j]
    return tuple(sorted(chosen))


def _swap_descent(D, sub):
    best = _subset_radius(D, sub)
    while True:
        move = None
        for a in sub:
            for b in range(D.shape[0]):
                if b in sub:
                    continue
                cand = tuple(sorted(set(sub) - {a} | {b}))
                r = _subset_radius(D, cand)
                if r < best - 1e-12 and (move is None or r < move[0]):
                    move = (r, cand)
        if move is None:
            return sub
        best, sub = move


# ---------------------------------------------------------------- plot data

@dataclass(frozen=True)
class ContourGrid:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # shape (ny, nx); row r holds y[r]

    def rows(self):
        """(x, y, value) triples, row-major with y as the outer index."""
        for r, yv in enumerate(self.y):
            for c, xv in enumerate(self.x):
                yield float(xv), float(yv), float(self.values[r, c])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["x", "y", "value"])
            for row in self.rows():
                out.writerow([repr(v) for v in row])


def bounding_box(dset: PlanarDemandSet, margin: float = 0.1):
    lo, hi = dset.points.min(axis=0), dset.points.max(axis=0)
    pad = margin * np.maximum(hi - lo, 1.0)
    return (float(lo[0] - pad[0]), float(hi[0] + pad[0]),
            float(lo[1] - pad[1]), float(hi[1] + pad[1]))


def contour_grid(dset: PlanarDemandSet, bbox, nx: int, ny: int) -> ContourGrid:
    """distsum on an nx-by-ny lattice spanning ``bbox = (xmin, xmax, ymin, ymax)``."""
    xmin, xmax, ymin, ymax = map(float, bbox)
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be at least 2")
    if not (xmax > xmin and ymax > ymin) or not all(map(math.isfinite, bbox)):
        raise ValueError(f"degenerate bounding box {bbox}")
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    gx, gy = np.meshgrid(xs, ys)
    vals = np.zeros_like(gx)
    for (px, py), w in zip(dset.points, dset.weights):
        vals += w * np.hypot(gx - px, gy - py)
    return ContourGrid(xs, ys, vals)


def write_points_csv(dset: PlanarDemandSet, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "y", "weight"])
        for (px, py), w in zip(dset.points, dset.weights):
            out.writerow([repr(float(px)), repr(float(py)), repr(float(w))])
