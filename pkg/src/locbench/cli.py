"""Command-line entry point: ``locbench {gen,validate,solve,check,plotdata}``.

Exit codes: 0 success, 2 instance/schema error, 3 solver error. Errors go to
stderr prefixed ``ERR:<exit code>:``.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import ev_dp, medianplex, planar, stratified_pcenter, transport
from .instances import (InstanceError, InvariantError, dumps, generate, read_instance,
                        to_envelope, validate, write_instance)

EXIT_INSTANCE = 2
EXIT_SOLVER = 3

DEFAULT_METHOD = {
    "tp": "simplex", "itp": "oracle", "planar": "weiszfeld",
    "spcp": "bnb", "medianplex": "heuristic", "evdp": "dp",
}
METHODS = {
    "tp": ("simplex",),
    "itp": ("oracle", "bisection", "bisection-A", "bisection-B"),
    "planar": ("weiszfeld", "foci-exact", "foci-swap"),
    "spcp": ("bnb", "enum", "interchange"),
    "medianplex": ("heuristic", "kmedian", "brute"),
    "evdp": ("dp", "enum"),
}


class CliError(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _pair(text, n):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers") from None
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers")
    return vals


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locbench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-timing", action="store_true",
                        help="report wall_ms as null so output is byte-stable")

    g = sub.add_parser("gen", parents=[common], help="write a seeded random instance")
    g.add_argument("--type", required=True, choices=list(DEFAULT_METHOD))
    g.add_argument("--n", type=int, help="sources / sites / points / nodes")
    g.add_argument("--m", type=int, help="sinks / demand sites")
    g.add_argument("--strata", type=int)
    g.add_argument("--p", type=int, help="facilities to open (spcp p, medianplex K)")
    g.add_argument("--F", type=float, help="evdp horizon [s]")
    g.add_argument("--P", type=float, help="evdp target position [m]")
    g.add_argument("--R", type=float, help="evdp wheel radius [m]")

    v = sub.add_parser("validate", help="check an instance file")
    v.add_argument("--in", dest="inp", required=True)

    solver_opts = argparse.ArgumentParser(add_help=False)
    solver_opts.add_argument("--in", dest="inp", required=True)
    solver_opts.add_argument("--method")
    solver_opts.add_argument("--tol", type=_positive)
    solver_opts.add_argument("--format", choices=("json", "csv"), default="json")
    solver_opts.add_argument("--variant", choices=("A", "B"), default="A")
    solver_opts.add_argument("--k", type=int, help="number of foci (planar)")
    solver_opts.add_argument("--grid", type=lambda t: _pair(t, 3),
                             help="evdp state grid p,i,omega")
    solver_opts.add_argument("--controls", type=int, help="evdp number of control levels")
    solver_opts.add_argument("--restarts", type=int, default=None)

    sub.add_parser("solve", parents=[common, solver_opts], help="run one solver")
    sub.add_parser("check", parents=[common, solver_opts],
                   help="cross-check heuristics against exact oracles")

    pd = sub.add_parser("plotdata", parents=[common], help="contour grid CSV for a planar instance")
    pd.add_argument("--in", dest="inp", required=True)
    pd.add_argument("--grid", type=lambda t: _pair(t, 2), default=(50, 50))
    pd.add_argument("--points-out", help="points CSV (default: <out stem>_points.csv)")
    return ap


# ------------------------------------------------------------------ helpers

# Balance violations are left to the solvers, which report them as solver errors.
_BALANCE_ISSUES = ("infeasible balance", "empty region")


def _load(path, check=True):
    try:
        inst = read_instance(path, check=False)
    except FileNotFoundError:
        raise CliError(EXIT_INSTANCE, f"no such file: {path}") from None
    except InstanceError as e:
        raise CliError(EXIT_INSTANCE, str(e)) from None
    if check:
        rep = validate(inst)
        if not all(msg.startswith(_BALANCE_ISSUES) for _, msg in rep.issues):
            raise CliError(EXIT_INSTANCE, str(InvariantError(rep)))
    return inst


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _method(args, kind):
    m = args.method or DEFAULT_METHOD[kind]
    if m not in METHODS[kind]:
        raise CliError(EXIT_INSTANCE, f"method {m!r} not valid for {kind}; choose from {METHODS[kind]}")
    if m == "bisection":
        m = f"bisection-{args.variant}"
    return m


def _solve(inst, method, args):
    """Returns (objective, solution dict, raw result)."""
    kind = inst.kind
    if kind == "tp":
        sol = transport.solve_tp(inst)
        gap = abs(sol.objective - sol.dual_value(inst.supplies, inst.demands))
        return sol.objective, {"flows": sol.flows, "supply_duals": sol.supply_duals,
                               "demand_duals": sol.demand_duals, "duality_gap": gap}, sol
    if kind == "itp":
        if method == "oracle":
            res = transport.itp_oracle(inst)
        else:
            res = transport.itp_bisection(inst, method[-1], tol=args.tol or 1e-6)
        return res.value, res.to_dict(), res
    if kind == "planar":
        if method == "weiszfeld":
            res = planar.weiszfeld(inst, tol=args.tol or 1e-9)
            return res.objective, res.to_dict(), res
        k = args.k or min(3, len(inst))
        res = planar.select_foci(inst, k, method.split("-")[1])
        return res.radius, res.to_dict(), res
    if kind == "spcp":
        if method == "enum":
            res = stratified_pcenter.solve_enum(inst)
        elif method == "bnb":
            res = stratified_pcenter.solve_bnb(inst)
        else:
            res = stratified_pcenter.solve_interchange(inst, args.restarts or 20, args.seed)
        return res.objective, res.to_dict(), res
    if kind == "medianplex":
        if method == "kmedian":
            res = medianplex.solve_kmedian(inst)
        elif method == "heuristic":
            res = medianplex.solve(inst, args.restarts or 1, args.seed)
        else:
            Z, S, alloc = medianplex.brute_force(inst)
            res = medianplex.build_solution(inst, S, alloc)
        return res.Z, res.to_dict(), res
    if kind == "evdp":
        if method == "dp":
            res = ev_dp.dp_solve(inst, grid=args.grid or (61, 41, 41),
                                 controls=args.controls or 21)
        else:
            levels = np.linspace(-1, 1, args.controls or 3)
            res = ev_dp.enumerate_controls(inst, levels)
            if res is None:
                raise ev_dp.TargetUnreachable("no enumerated control sequence reaches P")
        return res.energy, res.to_dict(), res
    raise CliError(EXIT_INSTANCE, f"unsupported instance kind {kind}")


def _record(kind, method, objective, payload, wall, args):
    return {"problem": kind, "method": method, "objective": objective,
            "wall_ms": None if args.no_timing else round(wall * 1000.0, 3),
            "seed": args.seed, "solution": payload}


# ------------------------------------------------------------------ commands

def cmd_gen(args):
    params = {}
    kind = args.type
    if kind in ("tp", "itp", "spcp"):
        params.update({k: getattr(args, k) for k in ("n", "m") if getattr(args, k)})
    if kind == "spcp":
        if args.strata:
            params["strata"] = args.strata
        if args.p:
            params["p"] = args.p
    if kind == "planar" and args.n:
        params["k"] = args.n
    if kind == "medianplex":
        if args.n:
            params["n"] = args.n
        if args.p:
            params["K"] = args.p
    if kind == "evdp":
        params.update({k: getattr(args, k) for k in ("F", "P", "R") if getattr(args, k) is not None})
    try:
        inst = generate(kind, args.seed, **params)
    except (ValueError, TypeError) as e:
        raise CliError(EXIT_INSTANCE, str(e)) from None
    if args.out:
        write_instance(inst, args.out)
    else:
        sys.stdout.write(dumps(to_envelope(inst)))
    return 0


def cmd_validate(args):
    rep = validate(_load(args.inp, check=False))
    print(rep)
    return 0 if rep.ok else EXIT_INSTANCE


def cmd_solve(args):
    inst = _load(args.inp)
    method = _method(args, inst.kind)
    t0 = time.perf_counter()
    obj, payload, raw = _solve(inst, method, args)
    wall = time.perf_counter() - t0
    if args.format == "csv":
        if inst.kind != "evdp":
            raise CliError(EXIT_INSTANCE, "csv output is only available for evdp trajectories")
        if not args.out:
            raise CliError(EXIT_INSTANCE, "--format csv needs --out")
        raw.write_csv(args.out, inst)
        return 0
    _emit(dumps(_jsonable(_record(inst.kind, method, obj, payload, wall, args))), args.out)
    return 0


def _gap_entry(name, reference, candidate, sense):
    """sense=+1: candidate may not exceed reference (maximisation oracle);
    sense=-1: candidate may not undercut it (minimisation oracle)."""
    gap = sense * (reference - candidate)
    scale = max(1.0, abs(reference))
    return {"name": name, "reference": reference, "candidate": candidate,
            "gap": gap, "ok": gap >= -1e-9 * scale}


def _checks(inst, args):
    kind = inst.kind
    if kind == "tp":
        from scipy.optimize import linprog
        sol = transport.solve_tp(inst)
        n, m = inst.shape
        A_ub = np.kron(np.eye(n), np.ones((1, m)))
        A_eq = np.kron(np.ones((1, n)), np.eye(m))
        lp = linprog(inst.costs.ravel(), A_ub=A_ub, b_ub=inst.supplies, A_eq=A_eq,
                     b_eq=inst.demands, bounds=(0, None), method="highs")
        dual = sol.dual_value(inst.supplies, inst.demands)
        return lp.fun, [
            {"name": "simplex-vs-highs", "reference": lp.fun, "candidate": sol.objective,
             "gap": abs(lp.fun - sol.objective), "ok": abs(lp.fun - sol.objective) <= 1e-7 * max(1, abs(lp.fun))},
            {"name": "strong-duality", "reference": sol.objective, "candidate": dual,
             "gap": abs(dual - sol.objective), "ok": abs(dual - sol.objective) <= 1e-7},
        ]
    if kind == "itp":
        ref = transport.itp_oracle(inst).value
        out = []
        for v in ("A", "B"):
            b = transport.itp_bisection(inst, v, tol=args.tol or 1e-6)
            out.append(_gap_entry(f"bisection-{v}", ref, b.value, +1))
        return ref, out
    if kind == "planar":
        w = planar.weiszfeld(inst)
        grid = planar.contour_grid(inst, planar.bounding_box(inst, 0.0), 200, 200)
        out = [_gap_entry("weiszfeld-vs-grid", float(grid.values.min()), w.objective, +1)]
        k = args.k or min(3, len(inst))
        if math.comb(len(inst), k) <= 10 ** 6:
            ex = planar.select_foci(inst, k, "exact").radius
            sw = planar.select_foci(inst, k, "swap").radius
            out.append(_gap_entry("foci-swap", ex, sw, -1))
        return w.objective, out
    if kind == "spcp":
        ref = stratified_pcenter.solve_enum(inst).objective
        bnb = stratified_pcenter.solve_bnb(inst).objective
        heur = stratified_pcenter.solve_interchange(inst, args.restarts or 20, args.seed).objective
        bnb_entry = _gap_entry("bnb", ref, bnb, -1)
        bnb_entry["ok"] = bnb == ref
        return ref, [bnb_entry, _gap_entry("interchange", ref, heur, -1)]
    if kind == "medianplex":
        ref = medianplex.brute_force(inst)[0]
        start = medianplex.solve_kmedian(inst)
        heur = medianplex.solve(inst, args.restarts or 1, args.seed)
        out = [_gap_entry("heuristic", ref, heur.Z, +1)]
        out.append({"name": "monotone", "reference": start.Z, "candidate": heur.Z,
                    "gap": heur.Z - start.Z, "ok": heur.Z >= start.Z})
        return ref, out
    if kind == "evdp":
        levels = np.linspace(-1, 1, args.controls or 3)
        ref = ev_dp.enumerate_controls(inst, levels)
        if ref is None:
            raise ev_dp.TargetUnreachable("no enumerated control sequence reaches P")
        dp = ev_dp.dp_solve(inst, grid=args.grid or (61, 41, 41), controls=levels)
        return ref.energy, [_gap_entry("dp", ref.energy, dp.energy, -1)]
    raise CliError(EXIT_INSTANCE, f"unsupported instance kind {kind}")


def cmd_check(args):
    inst = _load(args.inp)
    t0 = time.perf_counter()
    ref, checks = _checks(inst, args)
    wall = time.perf_counter() - t0
    rec = _record(inst.kind, "check", ref, {"checks": checks,
                                            "all_ok": all(c["ok"] for c in checks)}, wall, args)
    _emit(dumps(_jsonable(rec)), args.out)
    return 0


def cmd_plotdata(args):
    inst = _load(args.inp)
    if inst.kind != "planar":
        raise CliError(EXIT_INSTANCE, f"plotdata needs a planar instance, got {inst.kind}")
    if not args.out:
        raise CliError(EXIT_INSTANCE, "plotdata needs --out")
    nx, ny = args.grid
    grid = planar.contour_grid(inst, planar.bounding_box(inst), nx, ny)
    grid.to_csv(args.out)
    out = Path(args.out)
    pts = args.points_out or str(out.with_name(out.stem + "_points.csv"))
    planar.write_points_csv(inst, pts)
    return 0


SOLVER_ERRORS = (transport.InfeasibleBalance, transport.SizeCapExceeded,
                 medianplex.AlphaViolation, ev_dp.TargetUnreachable,
                 ev_dp.InadmissibleControl, ValueError, RuntimeError)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"gen": cmd_gen, "validate": cmd_validate, "solve": cmd_solve,
               "check": cmd_check, "plotdata": cmd_plotdata}[args.command]
    try:
        return handler(args)
    except CliError as e:
        code, msg = e.code, str(e)
    except InstanceError as e:
        code, msg = EXIT_INSTANCE, str(e)
    except SOLVER_ERRORS as e:
        code, msg = EXIT_SOLVER, f"{type(e).__name__}: {e}"
    sys.stderr.write(f"ERR:{code}:{msg}\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
