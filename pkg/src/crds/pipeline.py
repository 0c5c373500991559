"""Run manifest steps and assemble deterministic JSON reports."""

from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .corpus import CORPUS, Kind, classify, euler_rhs, euler_system, make_pair, pair_trunc, segre_system, segre_trunc
from .exceptional import (BlowUpConfig, ParameterExpansion, adapt_coordinates, blow_up_hypersurface, blow_up_map,
                          cauchy_reconstruct_k, check_map_factorization, order_11, parameter_blow_up)
from .hypersurface import ComplexDefiningSeries, complex_from_real, invariants, pure_order, real_series
from .jet import extract_zeta_identities, g23_closed_form, prolong, tangency_residual, transported_ode
from .manifest import HypersurfaceSpec, Manifest, MapSpec, SeriesSpec, Step, parse_terms
from .maps import ZW, FormalMap, random_invertible_map
from .reduction import (MapComponentExpansion, build_y_system, cauchy_reconstruct, solve_formal_y,
                        verify_basic_identity, y_vector)
from .resummation import (FormalSeries1D, SummationProblem, borel_transform, default_degrees, gevrey_fit,
                          k_sum, ode_residual, pade_continue, select_sectors, verify_gevrey_asymptotics)
from .segre_ode import (SecondOrderODE, associate_high_order, associate_nondegenerate, associate_nonminimal,
                        default_samples, verify_segre_solutions)
from .series import INF, Gaussian, SeriesError, TruncatedSeries, format_gaussian

DEFAULT_TRUNC = 8


def _val(s: TruncatedSeries):
    v = s.valuation()
    return "inf" if v == INF else int(v)


def _num(x: float) -> float:
    return float(f"{x:.10g}")


def _cnum(z: complex) -> List[float]:
    return [_num(z.real), _num(z.imag)]


@dataclass
class Context:
    manifest: Manifest
    trunc: int
    seed: int
    _theta: Dict[Tuple[str, int], ComplexDefiningSeries] = field(default_factory=dict)
    _kind: Dict[str, Kind] = field(default_factory=dict)

    def terms(self, name: str) -> dict:
        spec: HypersurfaceSpec = self.manifest.hypersurfaces[name]
        if spec.corpus:
            return dict(CORPUS[spec.corpus].terms)
        return dict(spec.terms)

    def theta(self, name: str, t: int) -> ComplexDefiningSeries:
        key = (name, t)
        if key not in self._theta:
            self._theta[key] = complex_from_real(real_series(self.terms(name), t))
        return self._theta[key]

    def kind(self, name: str) -> Kind:
        if name not in self._kind:
            self._kind[name] = classify(self.theta(name, max(self.trunc, 8) + 2))
        return self._kind[name]

    def map(self, name: str, t: int) -> FormalMap:
        spec: MapSpec = self.manifest.maps[name]
        if spec.random is not None:
            return random_invertible_map(random.Random(spec.random), t, degree=spec.degree)
        return FormalMap.from_dicts(dict(spec.F), dict(spec.G), spec.trunc)

    def perturb(self, name: str, H: FormalMap) -> FormalMap:
        spec: MapSpec = self.manifest.maps[name]
        F, G = H.F, H.G
        for comp, e, c in spec.perturb:
            d = ZW.from_dict({e: c}, H.trunc)
            if comp == "F":
                F = F + d
            else:
                G = G + d
        return FormalMap(F, G)


def _kind_dict(k: Kind) -> dict:
    return {"kind": k.kind, "m": k.m, "k": k.k}


# ---------------------------------------------------------------------------
# steps


def step_invariants(ctx: Context, st: Step) -> dict:
    T = ctx.theta(st.get("hypersurface"), ctx.trunc)
    inv = invariants(T)
    return {"pass": True, "invariants": inv.as_dict(), "pure_order": pure_order(T),
            "kind": _kind_dict(ctx.kind(st.get("hypersurface")))}


def _perturb_phi(sysm, text: str):
    ((e, c),) = parse_terms(text.replace("->", " -> "), len(sysm.Phi.vars))
    d = sysm.Phi.ring.from_dict({e: c}, sysm.Phi.trunc)
    return dataclasses.replace(sysm, Phi=sysm.Phi + d)


def step_associate(ctx: Context, st: Step) -> dict:
    name = st.get("hypersurface")
    kind = ctx.kind(name)
    T = ctx.theta(name, segre_trunc(kind, ctx.trunc))
    sysm, data = segre_system(T, kind, ctx.seed)
    if st.get("perturb"):
        sysm = _perturb_phi(sysm, st.get("perturb"))
    count = int(st.get("samples", 10))
    rep = verify_segre_solutions(sysm, data, default_samples(count, ctx.seed))
    d = rep.as_dict()
    d["pass"] = rep.passed and rep.trunc >= ctx.trunc
    d["kind"] = _kind_dict(kind)
    d["system"] = sysm.Phi.truncate(ctx.trunc).to_text()
    return d


def step_prolong(ctx: Context, st: Step) -> dict:
    order = int(st.get("order", 2))
    H = ctx.map(st.get("map"), ctx.trunc)
    P = prolong(H, order)
    N1, N2 = g23_closed_form(H)
    P2 = prolong(H, 2)
    checks = [(N1 - P2.numerators[0]).is_zero(), (N2 - P2.numerators[1]).is_zero()]
    return {"pass": all(checks), "order": order, "closed_form_match": checks,
            "DF": P.DF.to_text(), "numerators": [n.to_text() for n in P.numerators]}


def _systems(pair, kind: Kind):
    if kind.kind == "nonminimal":
        return associate_nonminimal(pair.source, kind.m), associate_nonminimal(pair.target, kind.m)
    if kind.kind == "high_order":
        return associate_high_order(pair.source, kind.k, kind.m), associate_high_order(pair.target, kind.k, kind.m)
    if kind.kind == "nondegenerate":
        return associate_nondegenerate(pair.source), associate_nondegenerate(pair.target)
    return None, None


def _pair(ctx: Context, st: Step):
    src = st.get("source")
    kind = ctx.kind(src)
    t = pair_trunc(kind, ctx.trunc)
    T = ctx.theta(src, t)
    H = ctx.map(st.get("map"), t)
    if st.get("target"):
        from .corpus import EquivalentPair
        pair = EquivalentPair(T, ctx.theta(st.get("target"), t), H, kind)
    else:
        pair = make_pair(T, H, kind)
    return dataclasses.replace(pair, H=ctx.perturb(st.get("map"), pair.H)), kind


def step_verify_equivalence(ctx: Context, st: Step) -> dict:
    pair, kind = _pair(ctx, st)
    basic = verify_basic_identity(pair.H, pair.source, pair.target)
    out = {"kind": _kind_dict(kind), "basic_identity": {"valuation": _val(basic), "trunc": basic.trunc}}
    ok = basic.is_zero()
    S, St = _systems(pair, kind)
    if isinstance(S, SecondOrderODE):
        diff = transported_ode(pair.H, St).Phi - S.Phi
        out["transported_ode"] = {"valuation": _val(diff), "trunc": diff.trunc}
        ok = ok and diff.is_zero()
    elif S is not None:
        rep = tangency_residual(pair.H, S, St)
        out["tangency"] = rep.as_dict()
        ok = ok and rep.passed
    else:
        out["tangency"] = None
    out["pass"] = ok
    return out


def step_reduce(ctx: Context, st: Step) -> dict:
    pair, kind = _pair(ctx, st)
    N = ctx.trunc
    S, St = _systems(pair, kind)
    out = {"kind": _kind_dict(kind)}
    if kind.kind == "nonminimal":
        m = kind.m
        Y = y_vector(pair.H, m)
        sysm = build_y_system(S, St)
        res = sysm.residual(Y)
        out["y_residual"] = {"valuations": [_val(r) for r in res], "trunc": min(r.trunc for r in res)}
        solve = int(st.get("solve", min(N, 4)))
        sol = solve_formal_y(sysm, solve, hint=[y.truncate(solve) for y in Y])
        agrees = all((a.truncate(solve) - b.truncate(solve)).is_zero() for a, b in zip(sol.Y, Y))
        out["formal_solution"] = {"trunc": solve, "residual_zero": sol.passed, "matches_map": agrees,
                                  "hinted_degrees": list(sol.hinted_degrees)}
        R = cauchy_reconstruct(S, St, MapComponentExpansion.of(pair.H, m, 1), N)
        ok = all(r.is_zero() for r in res) and min(r.trunc for r in res) >= N and sol.passed and agrees
    elif kind.kind == "high_order":
        zi = extract_zeta_identities(pair.H, S, St)
        out["zeta_identities"] = {"zero": zi.passed, "lead_g": format_gaussian(zi.lead_g),
                                  "lead_f": format_gaussian(zi.lead_f)}
        fact = check_map_factorization(pair.H, kind.k)
        out["factorization"] = fact
        R = cauchy_reconstruct_k(S, St, ParameterExpansion.of(pair.H, kind.k, kind.m), N)
        ok = zi.passed and fact and zi.lead_g == Gaussian(1)
    else:
        raise SeriesError(f"reduce needs a generic nonminimal or high-order pair, got {kind.kind}")
    H = pair.H.truncate(N)
    dF, dG = R.F - H.F, R.G - H.G
    out["reconstruction"] = {"trunc": N, "F_diff_valuation": _val(dF), "G_diff_valuation": _val(dG)}
    out["pass"] = bool(ok and dF.is_zero() and dG.is_zero())
    return out


def step_blowup(ctx: Context, st: Step) -> dict:
    name = st.get("hypersurface")
    kind = ctx.kind(name)
    t = ctx.trunc + 2
    T = ctx.theta(name, t)
    out = {"kind": _kind_dict(kind)}
    ok = True
    m2 = order_11(T)
    s = int(st.get("s", max(2, (m2 or 0) + 1)))
    cfg = BlowUpConfig(s)
    if m2 is not None:
        B = blow_up_hypersurface(T, cfg)
        out["hypersurface"] = B.as_dict()
        ok = ok and B.membership.is_zero() and B.admissible
    else:
        out["hypersurface"] = None
    base = T
    if kind.kind == "exceptional":
        base = adapt_coordinates(ctx.theta(name, segre_trunc(kind, ctx.trunc)), seed=ctx.seed).result.T
    pb = parameter_blow_up(base)
    out["parameter"] = {"p": pb.p, "b_valuation": pb.valuation if pb.valuation != INF else "inf",
                        "divisible": pb.divisible}
    ok = ok and pb.divisible
    if st.get("map"):
        H = ctx.perturb(st.get("map"), ctx.map(st.get("map"), t))
        bm = blow_up_map(H, cfg)
        out["map"] = {"connecting": [_val(r) for r in bm.connecting], "holds": bm.connecting_holds}
        ok = ok and bm.connecting_holds
    out["pass"] = ok
    return out


def step_adapt(ctx: Context, st: Step) -> dict:
    name = st.get("hypersurface")
    kind = ctx.kind(name)
    T = ctx.theta(name, segre_trunc(kind, ctx.trunc))
    rep = adapt_coordinates(T, seed=int(st.get("seed", ctx.seed)))
    d = rep.as_dict()
    d["pure_order_before"] = pure_order(T)
    d["pass"] = rep.result.adapted and d["p"] == d["pure_order_before"]
    return d


def parse_direction(text: str) -> float:
    t = text.strip().replace("π", "pi")
    if "pi" in t:
        num, _, den = t.partition("/")
        coef = num.replace("pi", "").replace("*", "").strip()
        c = -1.0 if coef == "-" else 1.0 if coef in ("", "+") else float(coef)
        return c * math.pi / (float(den) if den else 1.0)
    return float(t)


def parse_grid(text: str) -> List[complex]:
    if text.startswith("lin:"):
        a, b, n = text[4:].split(":")
        return [complex(x) for x in np.linspace(float(a), float(b), int(n))]
    return [complex(x.replace("i", "j")) for x in text.split(",") if x]


def build_series(spec: SeriesSpec) -> Tuple[FormalSeries1D, Optional[Callable]]:
    if spec.kind == "euler":
        return FormalSeries1D.euler(spec.count), None
    if spec.kind == "geometric":
        return FormalSeries1D([Gaussian(1)] * spec.count), None
    if spec.kind == "coefficients":
        return FormalSeries1D(spec.coeffs), None
    sol = solve_formal_y(euler_system(spec.count + 2), spec.count - 1)
    if not sol.passed:
        raise SeriesError("formal solution of the scalar ODE has a nonzero residual")
    return FormalSeries1D.from_series(sol.Y[0]), euler_rhs


def step_sum(ctx: Context, st: Step) -> dict:
    series, rhs = build_series(ctx.manifest.series[st.get("series")])
    k = float(st.get("k", 1))
    q = int(st.get("q", 1))
    d = parse_direction(st.get("direction", "0"))
    grid = parse_grid(st.get("grid", "0.05,0.1,0.2"))
    pade = tuple(int(x) for x in st.get("pade").split(",")) if st.get("pade") else None
    out = {}
    try:
        g = gevrey_fit(series)
        out["gevrey"] = {"s": _num(g.s), "A": _num(g.A), "B": _num(g.B), "rms": _num(g.rms)}
    except ValueError as e:
        out["gevrey"] = {"error": str(e)}
    B = borel_transform(series, k * q)
    L, M = pade or default_degrees(len(B))
    approx = pade_continue(B, L, M)
    dirs = approx.pole_directions()
    sec = select_sectors(dirs, [k], q)
    out["sectors"] = {"tau_plus": _num(sec.tau_plus), "tau_minus": _num(sec.tau_minus),
                      "eps": [_num(e) for e in sec.eps],
                      "plus": [x.as_dict() for x in sec.plus], "minus": [x.as_dict() for x in sec.minus]}
    ssum = k_sum(SummationProblem(series, (k,), q, d, pade=pade), grid, derivative=rhs is not None)
    out["sum"] = {
        "pade": list(ssum.pade),
        "poles": [_cnum(p) for p in ssum.poles],
        "points": [{"z": _cnum(z), "value": _cnum(v), "error": float(f"{e:.2e}")}
                   for z, v, e in zip(ssum.z, ssum.values, ssum.errors)],
        "notes": ssum.notes,
    }
    against = series
    if st.get("against"):
        against, _ = build_series(ctx.manifest.series[st.get("against")])
    rep = verify_gevrey_asymptotics(ssum, against, 1.0 / k, nmax=min(15, len(against) - 1))
    out["asymptotics"] = {"pass": rep.passed, "C": _num(rep.C) if math.isfinite(rep.C) else None,
                          "poincare": rep.poincare, "nmax": rep.nmax}
    ok = rep.passed
    if rhs is not None:
        res = ode_residual(ssum, 2, rhs)
        out["ode_residual"] = float(f"{float(np.max(res)):.2e}")
        ok = ok and float(np.max(res)) < 1e-6
    out["pass"] = bool(ok)
    return out


STEPS = {
    "invariants": step_invariants,
    "associate": step_associate,
    "prolong": step_prolong,
    "verify-equivalence": step_verify_equivalence,
    "reduce": step_reduce,
    "blowup": step_blowup,
    "adapt": step_adapt,
    "sum": step_sum,
}


def run_step(ctx: Context, st: Step) -> dict:
    try:
        body = STEPS[st.command](ctx, st)
        status = "pass" if body.pop("pass") else "fail"
    except (SeriesError, ValueError, ArithmeticError) as e:
        body, status = {"error": f"{type(e).__name__}: {e}"}, "error"
    return {"command": st.command, "args": dict(st.args), "status": status, **body}


def run_pipeline(m: Manifest, steps: Optional[List[Step]] = None, trunc: Optional[int] = None,
                 seed: Optional[int] = None) -> dict:
    N = trunc if trunc is not None else (m.trunc if m.trunc is not None else DEFAULT_TRUNC)
    sd = seed if seed is not None else (m.seed if m.seed is not None else 0)
    ctx = Context(m, N, sd)
    results = []
    for i, st in enumerate(m.steps if steps is None else steps):
        r = run_step(ctx, st)
        results.append({"step": i, **r})
    failed = [f"{r['step']}:{r['command']}" for r in results if r["status"] != "pass"]
    return {"crds_version": __version__, "seed": sd, "trunc": N, "passed": not failed, "failed_steps": failed,
            "steps": results}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
