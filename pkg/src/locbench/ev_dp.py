"""Energy-minimal control of an electric vehicle by dynamic programming.

State (p, i, omega): position [m], motor induction (current) and radial speed.
One period of length delta under control u in [-1, 1]:

    i'     = i + delta * (S*u - I*i - Q*omega) / L
    omega' = max(0, omega + delta * J * (Q*i - (R/Tr) * (M*G*Fr + C*v**2)))
    p'     = p + delta * v'                    with v = (R/Tr) * omega  [m/s]

and the period costs S*u*i' + B*(u*i')**2. Controls are restricted per state
so that |i'| <= i_max. The target is reached when p_T >= P.

Conventions held fixed throughout (and by every oracle in the tests): speed
in m/s for the position update (km/h only for reporting), omega clamped at
zero, stage energy evaluated at the post-step induction.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .instances import EvModel, EvState

__all__ = [
    "InadmissibleControl", "TargetUnreachable", "ControlTrajectory",
    "control_bounds", "step", "stage_energy", "simulate", "simulate_policy",
    "dp_solve", "enumerate_controls", "DpTables",
]

ADMISSIBLE_TOL = 1e-12
KMH = 3.6
# Stored in value tables in place of +inf so that a cell straddling the
# feasibility frontier interpolates to a large but finite cost.
INFEASIBLE = 1e12


class InadmissibleControl(ValueError):
    def __init__(self, msg, index=None):
        super().__init__(msg if index is None else f"period {index}: {msg}")
        self.index = index


class TargetUnreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class ControlTrajectory:
    controls: tuple[float, ...]
    states: tuple[EvState, ...]  # initial state first, T + 1 entries
    stage_energies: tuple[float, ...]
    energy: float

    @property
    def final(self) -> EvState:
        return self.states[-1]

    def to_dict(self) -> dict:
        f = self.final
        return {"controls": list(self.controls), "energy": self.energy,
                "final": {"t": f.t, "p": f.p, "i": f.i, "omega": f.omega}}

    def write_csv(self, path, model: EvModel) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["t", "u", "p", "v_kmh", "i", "omega", "stage_energy", "cumulative_E"])
            cum = 0.0
            for t, (u, e) in enumerate(zip(self.controls, self.stage_energies)):
                s = self.states[t + 1]
                cum += e
                v = KMH * model.speed_factor * s.omega
                out.writerow([s.t, repr(u), repr(s.p), repr(v), repr(s.i),
                              repr(s.omega), repr(e), repr(cum)])


def _delta_bounds(i, omega, m: EvModel):
    """Unclipped control limits keeping the next induction inside +-i_max."""
    common = (m.delta * m.I - m.L) * i + m.delta * m.Q * omega
    den = m.delta * m.S
    return (-m.i_max * m.L + common) / den, (m.i_max * m.L + common) / den


def control_bounds(state: EvState, model: EvModel) -> tuple[float, float]:
    lo, hi = _delta_bounds(state.i, state.omega, model)
    return max(-1.0, lo), min(1.0, hi)


def _snap(i_new, i_max):
    # round-off guard: the limit control lands on +-i_max up to a few ulps
    if abs(i_new) > i_max and abs(i_new) - i_max <= 1e-9 * i_max:
        return np.copysign(i_max, i_new)
    return i_new


def _advance(p, i, omega, u, m: EvModel):
    """One period of the difference equations; works on scalars and arrays."""
    k = m.speed_factor
    i_new = i + m.delta * (m.S * u - m.I * i - m.Q * omega) / m.L
    v = k * omega
    w_new = omega + m.delta * m.J * (m.Q * i - k * (m.M * m.G * m.Fr + m.C * v * v))
    w_new = np.maximum(0.0, w_new)
    p_new = p + m.delta * (k * w_new)
    return p_new, i_new, w_new


def step(state: EvState, u: float, model: EvModel, check: bool = True) -> EvState:
    if check:
        lo, hi = control_bounds(state, model)
        if not (lo - ADMISSIBLE_TOL <= u <= hi + ADMISSIBLE_TOL):
            raise InadmissibleControl(f"u = {u!r} outside admissible [{lo!r}, {hi!r}]")
    p, i, w = _advance(state.p, state.i, state.omega, u, model)
    return EvState(state.t + 1, float(p), float(_snap(i, model.i_max)), float(w))


def stage_energy(u: float, i: float, model: EvModel) -> float:
    """Energy of one period at control u and (post-step) induction i."""
    return model.S * u * i + model.B * u * u * i * i


def simulate(model: EvModel, controls, state0: EvState | None = None) -> ControlTrajectory:
    controls = [float(u) for u in controls]
    if len(controls) != model.T:
        raise ValueError(f"expected {model.T} controls, got {len(controls)}")
    state = state0 or EvState()
    states, energies = [state], []
    total = 0.0
    for t, u in enumerate(controls):
        try:
            state = step(state, u, model)
        except InadmissibleControl as e:
            raise InadmissibleControl(str(e), t) from None
        e = stage_energy(u, state.i, model)
        total += e
        states.append(state)
        energies.append(e)
    return ControlTrajectory(tuple(controls), tuple(states), tuple(energies), total)


def simulate_policy(model: EvModel, policy, state0: EvState | None = None) -> ControlTrajectory:
    """Roll out ``policy(state, u_lo, u_hi) -> u`` for T periods."""
    state = state0 or EvState()
    controls = []
    for _ in range(model.T):
        lo, hi = control_bounds(state, model)
        if lo > hi:
            break
        u = float(policy(state, lo, hi))
        controls.append(u)
        state = step(state, u, model)
    controls += [0.0] * (model.T - len(controls))
    return simulate(model, controls, state0)


# ------------------------------------------------------------ dynamic program

def _interp(V, grids, p, i, w):
    """Multilinear interpolation of V on the tensor grid; points outside are
    clamped. Infinite corners with positive weight make the result infinite."""
    idx, frac = [], []
    for g, x in zip(grids, (p, i, w)):
        if len(g) == 1:
            idx.append(np.zeros(x.shape, dtype=int))
            frac.append(np.zeros(x.shape))
            continue
        x = np.clip(x, g[0], g[-1])
        k = np.clip(np.searchsorted(g, x, side="right") - 1, 0, len(g) - 2)
        idx.append(k)
        frac.append((x - g[k]) / (g[k + 1] - g[k]))
    out = np.zeros(p.shape)
    dead = np.zeros(p.shape, dtype=bool)
    for corner in itertools.product((0, 1), repeat=3):
        wt = np.ones(p.shape)
        ix = []
        for d, c in enumerate(corner):
            f = frac[d]
            wt = wt * (f if c else 1.0 - f)
            ix.append(np.minimum(idx[d] + c, len(grids[d]) - 1))
        val = V[ix[0], ix[1], ix[2]]
        bad = np.isinf(val)
        dead |= bad & (wt > 0)
        out = out + wt * np.where(bad, 0.0, val)
    out[dead] = np.inf
    return out


@dataclass
class DpTables:
    grids: tuple[np.ndarray, np.ndarray, np.ndarray]
    levels: np.ndarray
    values: list = field(repr=False)  # values[t] on the grid, t = 0..T-1

    def value(self, t, p, i, w, model):
        if t >= len(self.values):
            return np.where(np.atleast_1d(p) >= model.P, 0.0, np.inf)
        return _interp(self.values[t], self.grids, np.atleast_1d(p), np.atleast_1d(i),
                       np.atleast_1d(w))


def _omega_cap(model):
    traj = simulate_policy(model, lambda s, lo, hi: hi)
    top = max(s.omega for s in traj.states)
    return max(1.25 * top, 1.0)


def _candidates(levels, i, omega, model):
    """Per-state clipped control levels, shape (len(levels), *state.shape)."""
    lo, hi = _delta_bounds(i, omega, model)
    lo, hi = np.maximum(-1.0, lo), np.minimum(1.0, hi)
    U = np.clip(levels.reshape((-1,) + (1,) * np.ndim(i)), lo, hi)
    return U, lo <= hi


def dp_solve(model: EvModel, grid=(61, 41, 41), controls=21, omega_cap=None,
             margin: float = 0.1, return_tables: bool = False):
    """Backward value iteration on a (p, i, omega) grid, then a greedy rollout.

    ``controls`` is either a number of equispaced levels in [-1, 1] or an
    explicit array of levels; each level is clipped to the admissible interval
    of the state it is applied in. The last stage uses the exact terminal
    condition p_T >= P instead of interpolation.
    """
    if np.ndim(controls) == 0:
        levels = np.linspace(-1.0, 1.0, int(controls))
    else:
        levels = np.asarray(controls, dtype=float)
    if np.any(np.abs(levels) > 1):
        raise ValueError("control levels must lie in [-1, 1]")
    npg, nig, nwg = grid
    if omega_cap is None:
        omega_cap = _omega_cap(model)
    pg = np.array([0.0]) if model.P == 0 else np.linspace(0.0, model.P * (1 + margin), npg)
    ig = np.linspace(-model.i_max, model.i_max, nig)
    wg = np.linspace(0.0, omega_cap, nwg)
    tables = DpTables((pg, ig, wg), levels, [None] * model.T)
    Pm, Im, Wm = np.meshgrid(pg, ig, wg, indexing="ij")
    for t in range(model.T - 1, -1, -1):
        U, ok = _candidates(levels, Im, Wm, model)
        p1, i1, w1 = _advance(Pm[None], Im[None], Wm[None], U, model)
        p1, w1 = np.broadcast_to(p1, U.shape), np.broadcast_to(w1, U.shape)
        i1 = np.clip(i1, -model.i_max, model.i_max)
        cost = model.S * U * i1 + model.B * U * U * i1 * i1
        nxt = np.stack([tables.value(t + 1, p1[k], i1[k], w1[k], model).reshape(Pm.shape)
                        for k in range(len(levels))])
        V = np.min(cost + nxt, axis=0)
        V[~ok] = np.inf
        tables.values[t] = np.minimum(V, INFEASIBLE)
    traj = _rollout(model, tables)
    return (traj, tables) if return_tables else traj


def _rollout(model, tables):
    state = EvState()
    controls = []
    for t in range(model.T):
        lo, hi = control_bounds(state, model)
        if lo > hi:
            raise TargetUnreachable(f"no admissible control at period {t}")
        best = None
        for u in np.unique(np.clip(tables.levels, lo, hi)):
            nxt = step(state, float(u), model, check=False)
            q = stage_energy(float(u), nxt.i, model) + float(
                tables.value(t + 1, nxt.p, nxt.i, nxt.omega, model)[0])
            if best is None or q < best[0]:
                best = (q, float(u), nxt)
        if not best[0] < INFEASIBLE / 2:
            raise TargetUnreachable(f"target P = {model.P} unreachable from period {t}")
        controls.append(best[1])
        state = best[2]
    return simulate(model, controls)


def enumerate_controls(model: EvModel, levels, max_sequences: int = 2_000_000):
    """Exhaustive search over control sequences drawn from ``levels``, each
    clipped to the state's admissible interval exactly as ``dp_solve`` does.

    Returns the minimum-energy trajectory reaching p_T >= P (None if none).
    """
    levels = np.asarray(levels, dtype=float)
    if len(levels) ** model.T > max_sequences:
        raise ValueError("too many control sequences to enumerate")
    best = [np.inf, None]

    def dfs(state, energy, prefix):
        if state.t == model.T:
            if state.p >= model.P and energy < best[0]:
                best[0], best[1] = energy, list(prefix)
            return
        lo, hi = control_bounds(state, model)
        if lo > hi:
            return
        for u in np.unique(np.clip(levels, lo, hi)):
            nxt = step(state, float(u), model, check=False)
            prefix.append(float(u))
            dfs(nxt, energy + stage_energy(float(u), nxt.i, model), prefix)
            prefix.pop()

    dfs(EvState(), 0.0, [])
    return None if best[1] is None else simulate(model, best[1])
