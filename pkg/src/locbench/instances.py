"""Problem instances: data model, validation, seeded generation and JSON I/O.

All instance kinds share one JSON envelope::

    {"type": "tp" | "itp" | "planar" | "spcp" | "medianplex" | "evdp",
     "payload": {...}}

Instances are frozen dataclasses holding read-only numpy arrays, so they can be
shared freely. Constructors only coerce types; use :func:`validate` (or
:func:`read_instance`, which validates) to check invariants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import jsonschema
import numpy as np

__all__ = [
    "InstanceError", "ParseError", "SchemaError", "InvariantError",
    "TransportInstance", "IntervalTransportInstance", "PlanarDemandSet",
    "Stratum", "SpcpInstance", "MedianPlexInstance", "EvModel", "EvState",
    "ValidationReport", "validate", "generate", "read_instance",
    "write_instance", "to_envelope", "from_envelope", "KINDS",
]


class InstanceError(ValueError):
    """Base class for anything wrong with an instance or instance file."""


class ParseError(InstanceError):
    pass


class SchemaError(InstanceError):
    pass


class InvariantError(InstanceError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(f"{p}: {m}" for p, m in report.issues))


def _ro(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


class _Instance:
    """Structural equality over dataclass fields (arrays compared elementwise)."""

    kind: str = ""

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if np.shape(a) != np.shape(b) or not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TransportInstance(_Instance):
    """Classical transportation problem: ship ``demands`` from capacitated sources."""

    supplies: np.ndarray
    demands: np.ndarray
    costs: np.ndarray
    kind = "tp"

    def __post_init__(self):
        object.__setattr__(self, "supplies", _ro(self.supplies))
        object.__setattr__(self, "demands", _ro(self.demands))
        object.__setattr__(self, "costs", _ro(self.costs))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.supplies), len(self.demands)

    def is_balanced_feasible(self) -> bool:
        return float(self.supplies.sum()) >= float(self.demands.sum())


@dataclass(frozen=True, eq=False)
class IntervalTransportInstance(_Instance):
    costs: np.ndarray
    demand_lo: np.ndarray
    demand_hi: np.ndarray
    cap_lo: np.ndarray
    cap_hi: np.ndarray
    kind = "itp"

    def __post_init__(self):
        for name in ("costs", "demand_lo", "demand_hi", "cap_lo", "cap_hi"):
            object.__setattr__(self, name, _ro(getattr(self, name)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.cap_lo), len(self.demand_lo)

    def region_nonempty(self) -> bool:
        return float(self.cap_hi.sum()) >= float(self.demand_lo.sum())


@dataclass(frozen=True, eq=False)
class PlanarDemandSet(_Instance):
    points: np.ndarray
    weights: np.ndarray
    kind = "planar"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1 and pts.size == 2:
            pts = pts.reshape(1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", _ro(self.weights))

    def __len__(self):
        return len(self.weights)

    @classmethod
    def unit(cls, points) -> "PlanarDemandSet":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return cls(pts, np.ones(len(pts)))


@dataclass(frozen=True, eq=False)
class Stratum(_Instance):
    members: tuple[int, ...]
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(int(i) for i in self.members))
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True, eq=False)
class SpcpInstance(_Instance):
    """Stratified p-center. ``dist[i, j]``: demand site ``i`` to candidate site ``j``."""

    dist: np.ndarray
    strata: tuple[Stratum, ...]
    p: int
    kind = "spcp"

    def __post_init__(self):
        object.__setattr__(self, "dist", _ro(self.dist))
        object.__setattr__(self, "strata", tuple(
            s if isinstance(s, Stratum) else Stratum(**s) for s in self.strata))
        object.__setattr__(self, "p", int(self.p))

    @property
    def n(self) -> int:
        return self.dist.shape[1]

    @property
    def m(self) -> int:
        return self.dist.shape[0]


@dataclass(frozen=True, eq=False)
class MedianPlexInstance(_Instance):
    weights: np.ndarray
    dist: np.ndarray
    r: float
    gamma: float
    phi: float
    alpha: float
    K: int
    kind = "medianplex"

    def __post_init__(self):
        object.__setattr__(self, "weights", _ro(self.weights))
        object.__setattr__(self, "dist", _ro(self.dist))
        for name in ("r", "gamma", "phi", "alpha"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "K", int(self.K))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.weights.sum()


_EV_FLOATS = ("delta", "F", "P", "R", "B", "S", "Tr", "C", "L", "I", "Q",
              "M", "G", "Fr", "J", "i_max")


@dataclass(frozen=True, eq=False)
class EvModel(_Instance):
    """Physical constants of the EV energy model (SI units, position in metres).

    ``J`` is taken verbatim; nothing is derived from the other constants.
    """

    delta: float
    F: float
    P: float
    R: float
    B: float
    S: float
    Tr: float
    C: float
    L: float
    I: float
    Q: float
    M: float
    G: float
    Fr: float
    J: float
    i_max: float = 150.0
    kind = "evdp"

    def __post_init__(self):
        for name in _EV_FLOATS:
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def T(self) -> int:
        return int(round(self.F / self.delta))

    @property
    def speed_factor(self) -> float:
        """m/s per rad/s of wheel-side radial speed."""
        return self.R / self.Tr

    @classmethod
    def with_reference_constants(cls, *, F: float, P: float, R: float,
                                 J: float | None = None, delta: float = 0.1,
                                 i_max: float = 150.0) -> "EvModel":
        """Model with the published motor/vehicle constants; ``F``, ``P``, ``R`` supplied.

        If ``J`` is omitted it defaults to ``Tr**2 / (M * R**2)``.
        """
        Tr, M = 10.0, 250.0
        if J is None:
            J = Tr ** 2 / (M * R ** 2)
        return cls(delta=delta, F=F, P=P, R=R, B=0.05, S=150.0, Tr=Tr, C=0.517,
                   L=0.05, I=0.03, Q=0.27, M=M, G=9.81, Fr=0.03, J=J, i_max=i_max)


@dataclass(frozen=True)
class EvState:
    t: int = 0
    p: float = 0.0
    i: float = 0.0
    omega: float = 0.0


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    issues: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, path: str, msg: str) -> None:
        self.issues.append((path, msg))

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "pass"
        return "\n".join(f"{p}: {m}" for p, m in self.issues)


def _check_finite(rep, path, arr):
    if not np.all(np.isfinite(arr)):
        rep.add(path, "non-finite value")
        return False
    return True


def _validate_tp(x: TransportInstance, rep):
    n, m = x.supplies.shape[0], x.demands.shape[0]
    if x.supplies.ndim != 1 or n < 1:
        rep.add("payload.supplies", "need at least one supply")
    if x.demands.ndim != 1 or m < 1:
        rep.add("payload.demands", "need at least one demand")
    if x.costs.shape != (n, m):
        rep.add("payload.costs", f"shape {x.costs.shape} != ({n}, {m})")
    ok = all(_check_finite(rep, f"payload.{k}", getattr(x, k))
             for k in ("supplies", "demands", "costs"))
    if not ok:
        return
    if np.any(x.demands <= 0):
        rep.add("payload.demands", "demands must be > 0")
    if np.any(x.supplies < 0):
        rep.add("payload.supplies", "supplies must be >= 0")
    if rep.ok and not x.is_balanced_feasible():
        rep.add("payload", "infeasible balance: sum(supplies) < sum(demands)")


def _validate_itp(x: IntervalTransportInstance, rep):
    n, m = x.shape
    if n < 1 or m < 1:
        rep.add("payload", "need at least one source and one sink")
    if x.cap_hi.shape != (n,):
        rep.add("payload.cap_hi", "length differs from cap_lo")
    if x.demand_hi.shape != (m,):
        rep.add("payload.demand_hi", "length differs from demand_lo")
    if x.costs.shape != (n, m):
        rep.add("payload.costs", f"shape {x.costs.shape} != ({n}, {m})")
    if not rep.ok:
        return
    if not all(_check_finite(rep, f"payload.{k}", getattr(x, k))
               for k in ("costs", "demand_lo", "demand_hi", "cap_lo", "cap_hi")):
        return
    for j in np.flatnonzero(x.demand_lo > x.demand_hi):
        rep.add(f"payload.demand_lo[{j}]", "inverted interval")
    for i in np.flatnonzero(x.cap_lo > x.cap_hi):
        rep.add(f"payload.cap_lo[{i}]", "inverted interval")
    if np.any(x.demand_lo <= 0):
        rep.add("payload.demand_lo", "lower demands must be > 0")
    if np.any(x.cap_lo < 0):
        rep.add("payload.cap_lo", "capacities must be >= 0")
    if not x.region_nonempty():
        rep.add("payload", "empty region: sum(cap_hi) < sum(demand_lo)")


def _validate_planar(x: PlanarDemandSet, rep):
    if x.points.ndim != 2 or x.points.shape[1] != 2:
        rep.add("payload.points", "points must be [x, y] pairs")
        return
    if len(x.points) < 1:
        rep.add("payload.points", "need at least one point")
    if x.weights.shape != (len(x.points),):
        rep.add("payload.weights", "one weight per point required")
        return
    _check_finite(rep, "payload.points", x.points)
    if _check_finite(rep, "payload.weights", x.weights) and np.any(x.weights <= 0):
        rep.add("payload.weights", "weights must be > 0")


def _validate_spcp(x: SpcpInstance, rep):
    if x.dist.ndim != 2 or x.dist.size == 0:
        rep.add("payload.dist", "need a non-empty m x n matrix")
        return
    m, n = x.dist.shape
    if _check_finite(rep, "payload.dist", x.dist) and np.any(x.dist < 0):
        rep.add("payload.dist", "distances must be >= 0")
    if not x.strata:
        rep.add("payload.strata", "need at least one stratum")
    for s, st in enumerate(x.strata):
        if not st.members:
            rep.add(f"payload.strata[{s}].members", "empty stratum")
        bad = [i for i in st.members if not 0 <= i < m]
        if bad:
            rep.add(f"payload.strata[{s}].members", f"unknown demand sites {bad}")
        if not (math.isfinite(st.weight) and st.weight > 0):
            rep.add(f"payload.strata[{s}].weight", "weight must be > 0")
    if not 1 <= x.p <= n:
        rep.add("payload.p", f"p must lie in [1, {n}]")


def _validate_medianplex(x: MedianPlexInstance, rep):
    n = len(x.weights)
    if n < 1:
        rep.add("payload.weights", "need at least one node")
        return
    if x.dist.shape != (n, n):
        rep.add("payload.dist", f"shape {x.dist.shape} != ({n}, {n})")
        return
    if _check_finite(rep, "payload.weights", x.weights) and np.any(x.weights <= 0):
        rep.add("payload.weights", "weights must be > 0")
    if _check_finite(rep, "payload.dist", x.dist):
        if np.any(np.diag(x.dist) != 0):
            rep.add("payload.dist", "diagonal must be zero")
        if not np.allclose(x.dist, x.dist.T, rtol=0, atol=1e-12):
            rep.add("payload.dist", "matrix must be symmetric")
        if np.any(x.dist < 0):
            rep.add("payload.dist", "distances must be >= 0")
    for name in ("r", "gamma", "phi", "alpha"):
        if not math.isfinite(getattr(x, name)):
            rep.add(f"payload.{name}", "non-finite value")
    if x.alpha < 0:
        rep.add("payload.alpha", "alpha must be >= 0")
    if not 1 <= x.K <= n:
        rep.add("payload.K", f"K must lie in [1, {n}]")
    if rep.ok and abs(x.normalized_weights.sum() - 1.0) > 1e-12:
        rep.add("payload.weights", "normalized weights do not sum to 1")


def _validate_evdp(x: EvModel, rep):
    for name in _EV_FLOATS:
        if not math.isfinite(getattr(x, name)):
            rep.add(f"payload.{name}", "non-finite value")
    if not rep.ok:
        return
    if x.delta <= 0:
        rep.add("payload.delta", "step must be > 0")
        return
    periods = x.F / x.delta
    if round(periods) < 1 or abs(periods - round(periods)) > 1e-9 * max(1.0, periods):
        rep.add("payload.F", "F / delta must be a positive integer")
    for name in ("R", "B", "S", "Tr", "C", "L", "I", "Q", "M", "G", "Fr", "J", "i_max"):
        if getattr(x, name) <= 0:
            rep.add(f"payload.{name}", "must be > 0")
    if x.P < 0:
        rep.add("payload.P", "target position must be >= 0")


_VALIDATORS = {
    TransportInstance: _validate_tp,
    IntervalTransportInstance: _validate_itp,
    PlanarDemandSet: _validate_planar,
    SpcpInstance: _validate_spcp,
    MedianPlexInstance: _validate_medianplex,
    EvModel: _validate_evdp,
}


def validate(instance) -> ValidationReport:
    """Check every invariant of ``instance``; never raises for bad data."""
    rep = ValidationReport()
    try:
        check = _VALIDATORS[type(instance)]
    except KeyError:
        rep.add("type", f"unsupported instance type {type(instance).__name__}")
        return rep
    check(instance, rep)
    return rep


# ---------------------------------------------------------------- generation

KINDS = ("tp", "itp", "planar", "spcp", "medianplex", "evdp")


def _positive_ints(**params):
    for k, v in params.items():
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise ValueError(f"size parameter {k} must be a positive integer, got {v!r}")


def _gen_tp(rng, n=3, m=3, max_demand=9, max_cost=20):
    _positive_ints(n=n, m=m, max_demand=max_demand, max_cost=max_cost)
    d = rng.integers(1, max_demand + 1, size=m)
    costs = rng.integers(1, max_cost + 1, size=(n, m))
    q = rng.multinomial(int(d.sum()), np.full(n, 1.0 / n))
    q = q + rng.integers(0, max_demand + 1, size=n)
    return TransportInstance(q.astype(float), d.astype(float), costs.astype(float))


def _gen_itp(rng, n=2, m=2, max_demand=9, max_cost=20, spread=3):
    _positive_ints(n=n, m=m, max_demand=max_demand, max_cost=max_cost)
    center = _gen_tp(rng, n, m, max_demand, max_cost)
    d0, q0 = center.demands, center.supplies
    d_lo = np.maximum(1, d0 - rng.integers(0, spread + 1, size=m))
    d_hi = d0 + rng.integers(0, spread + 1, size=m)
    q_lo = np.maximum(0, q0 - rng.integers(0, 2 * spread + 1, size=n))
    q_hi = q0 + rng.integers(0, spread + 1, size=n)
    # the center (d0, q0) lies in the box and is balanced, so R is nonempty
    return IntervalTransportInstance(center.costs, d_lo, d_hi, q_lo, q_hi)


def _gen_planar(rng, k=10, box=10.0, max_weight=5):
    _positive_ints(k=k, max_weight=max_weight)
    pts = rng.uniform(0.0, box, size=(k, 2))
    w = rng.integers(1, max_weight + 1, size=k).astype(float)
    return PlanarDemandSet(pts, w)


def _gen_spcp(rng, n=8, m=10, strata=3, p=3, box=10.0):
    _positive_ints(n=n, m=m, strata=strata, p=p)
    if p > n:
        raise ValueError("p must not exceed n")
    sites = rng.uniform(0.0, box, size=(n, 2))
    demand = rng.uniform(0.0, box, size=(m, 2))
    dist = np.linalg.norm(demand[:, None, :] - sites[None, :, :], axis=2)
    out = []
    for _ in range(strata):
        size = int(rng.integers(1, m + 1))
        members = np.sort(rng.choice(m, size=size, replace=False))
        out.append(Stratum(tuple(members.tolist()), float(rng.integers(1, 6))))
    return SpcpInstance(dist, tuple(out), p)


def _gen_medianplex(rng, n=8, K=2, r=10.0, gamma=1.0, phi=5.0, alpha=0.1,
                    box=10.0, max_weight=10):
    _positive_ints(n=n, K=K, max_weight=max_weight)
    if K > n:
        raise ValueError("K must not exceed n")
    pts = rng.uniform(0.0, box, size=(n, 2))
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    W = rng.integers(1, max_weight + 1, size=n).astype(float)
    return MedianPlexInstance(W, dist, r, gamma, phi, alpha, K)


def _gen_evdp(rng, F=2.0, delta=0.1, R=None, P=None, J=None):
    if not (F > 0 and delta > 0):
        raise ValueError("F and delta must be positive")
    if R is None:
        R = float(np.round(rng.uniform(0.25, 0.35), 3))
    if P is None:
        # a fraction of the distance covered under full acceleration
        P = float(np.round(rng.uniform(0.2, 0.6) * _full_throttle_distance(F, delta, R, J), 2))
    return EvModel.with_reference_constants(F=F, P=P, R=R, J=J, delta=delta)


def _full_throttle_distance(F, delta, R, J):
    from .ev_dp import simulate_policy
    model = EvModel.with_reference_constants(F=F, P=0.0, R=R, J=J, delta=delta)
    traj = simulate_policy(model, lambda state, lo, hi: hi)
    return traj.final.p


_GENERATORS = {
    "tp": _gen_tp, "itp": _gen_itp, "planar": _gen_planar,
    "spcp": _gen_spcp, "medianplex": _gen_medianplex, "evdp": _gen_evdp,
}


def generate(kind: str, seed: int = 0, **params):
    """Seeded random instance of ``kind``; pure in ``(kind, params, seed)``.

    Size parameters per kind (defaults in brackets):

    * ``tp``: n [3], m [3], max_demand [9], max_cost [20] - integer data
    * ``itp``: n [2], m [2], max_demand, max_cost, spread [3]
    * ``planar``: k [10], box [10.0], max_weight [5]
    * ``spcp``: n [8], m [10], strata [3], p [3]
    * ``medianplex``: n [8], K [2], r, gamma, phi, alpha
    * ``evdp``: F [2.0], delta [0.1], R, P, J
    """
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown problem kind {kind!r}") from None
    if not 0 <= int(seed) < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    rng = np.random.default_rng(int(seed))
    inst = gen(rng, **params)
    rep = validate(inst)
    assert rep.ok, str(rep)
    return inst


# ---------------------------------------------------------------- JSON I/O

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM}
_MAT = {"type": "array", "items": _VEC}


def _obj(props: dict, extra_optional=()) -> dict:
    return {
        "type": "object",
        "properties": {**props, **{k: _NUM for k in extra_optional}},
        "required": list(props),
        "additionalProperties": False,
    }


PAYLOAD_SCHEMAS = {
    "tp": _obj({"supplies": _VEC, "demands": _VEC, "costs": _MAT}),
    "itp": _obj({"costs": _MAT, "demand_lo": _VEC, "demand_hi": _VEC,
                 "cap_lo": _VEC, "cap_hi": _VEC}),
    "planar": _obj({"points": {"type": "array", "items": {
        "type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
        "weights": _VEC}),
    "spcp": _obj({"dist": _MAT, "strata": {"type": "array", "items": _obj({
        "members": {"type": "array", "items": {"type": "integer"}},
        "weight": _NUM})}, "p": {"type": "integer"}}),
    "medianplex": _obj({"weights": _VEC, "dist": _MAT, "r": _NUM, "gamma": _NUM,
                        "phi": _NUM, "alpha": _NUM, "K": {"type": "integer"}}),
    "evdp": _obj({k: _NUM for k in _EV_FLOATS if k != "i_max"}, extra_optional=("i_max",)),
}

ENVELOPE_SCHEMA = {
    "type": "object",
    "properties": {"type": {"enum": list(KINDS)}, "payload": {"type": "object"}},
    "required": ["type", "payload"],
    "additionalProperties": False,
}


def _num(v: float):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2 ** 53 else v


def _list(a: np.ndarray):
    return [_list(x) for x in a] if a.ndim > 1 else [_num(v) for v in a]


def to_envelope(instance) -> dict:
    kind = instance.kind
    if kind == "tp":
        payload = {"supplies": _list(instance.supplies), "demands": _list(instance.demands),
                   "costs": _list(instance.costs)}
    elif kind == "itp":
        payload = {k: _list(getattr(instance, k))
                   for k in ("costs", "demand_lo", "demand_hi", "cap_lo", "cap_hi")}
    elif kind == "planar":
        payload = {"points": _list(instance.points), "weights": _list(instance.weights)}
    elif kind == "spcp":
        payload = {"dist": _list(instance.dist), "p": instance.p,
                   "strata": [{"members": list(s.members), "weight": _num(s.weight)}
                              for s in instance.strata]}
    elif kind == "medianplex":
        payload = {"weights": _list(instance.weights), "dist": _list(instance.dist),
                   "r": _num(instance.r), "gamma": _num(instance.gamma),
                   "phi": _num(instance.phi), "alpha": _num(instance.alpha),
                   "K": instance.K}
    elif kind == "evdp":
        payload = {k: _num(getattr(instance, k)) for k in _EV_FLOATS}
    else:
        raise TypeError(f"not an instance: {instance!r}")
    return {"type": kind, "payload": payload}


def _schema_check(doc):
    try:
        jsonschema.validate(doc, ENVELOPE_SCHEMA)
        jsonschema.validate(doc["payload"], PAYLOAD_SCHEMAS[doc["type"]])
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path)
        base = "" if e.instance is doc or e.schema is ENVELOPE_SCHEMA else "payload"
        path = "/".join(x for x in (base, where) if x) or "<root>"
        raise SchemaError(f"schema violation at {path}: {e.message}") from None


def _ragged(rows, path):
    lens = {len(r) for r in rows}
    if len(lens) > 1:
        raise SchemaError(f"schema violation at payload/{path}: ragged matrix")


def from_envelope(doc: dict, check: bool = True):
    """Build an instance from a decoded envelope; schema-checked, and invariant-checked if ``check``."""
    _schema_check(doc)
    kind, pl = doc["type"], doc["payload"]
    for key in ("costs", "dist"):
        if key in pl:
            _ragged(pl[key], key)
    if kind == "tp":
        inst = TransportInstance(pl["supplies"], pl["demands"], pl["costs"])
    elif kind == "itp":
        inst = IntervalTransportInstance(pl["costs"], pl["demand_lo"], pl["demand_hi"],
                                         pl["cap_lo"], pl["cap_hi"])
    elif kind == "planar":
        inst = PlanarDemandSet(np.array(pl["points"], dtype=float).reshape(-1, 2), pl["weights"])
    elif kind == "spcp":
        inst = SpcpInstance(pl["dist"], tuple(Stratum(**s) for s in pl["strata"]), pl["p"])
    elif kind == "medianplex":
        inst = MedianPlexInstance(pl["weights"], pl["dist"], pl["r"], pl["gamma"],
                                  pl["phi"], pl["alpha"], pl["K"])
    else:
        inst = EvModel(**pl)
    if check:
        rep = validate(inst)
        if not rep.ok:
            raise InvariantError(rep)
    return inst


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_instance(instance, path) -> None:
    Path(path).write_text(dumps(to_envelope(instance)))


def read_instance(path, check: bool = True):
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return from_envelope(doc, check=check)
