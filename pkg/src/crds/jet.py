"""Jet prolongation of formal maps and the identities it produces.

Jet variables ``w1, w2, ...`` carry weight 0 in the jet rings, so the
truncation counts only the (z, w)-degree and components stay polynomial in
the jets.  The j-th component of a prolonged map is kept as a fraction
``N_j / DF^(2j-1)`` with ``DF = F_z + w1 F_w``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from .maps import ZW, FormalMap, MapError
from .segre_ode import JET2, ZWZ, HighOrderSystem, SecondOrderODE, SingularODE, high_order_from_singular
from .series import (
    DivisionObstruction, Gaussian, SeriesError, SeriesRing, TruncatedSeries, _pad, compose,
)

MAX_JET_ORDER = 6


class JetError(SeriesError):
    pass


@lru_cache(maxsize=None)
def jet_ring(order: int) -> SeriesRing:
    names = ["z", "w"] + [f"w{j}" for j in range(1, order + 1)]
    return SeriesRing(names, [1, 1] + [0] * order)


@lru_cache(maxsize=None)
def flat_jet_ring(order: int) -> SeriesRing:
    return SeriesRing(["z", "w"] + [f"w{j}" for j in range(1, order + 1)])


def jet_order(ring: SeriesRing) -> int:
    return len(ring.vars) - 2


def _lift(s: TruncatedSeries, order: int) -> TruncatedSeries:
    R = jet_ring(order)
    return s if s.ring == R else s.embed(R)


def total_derivative(expr: TruncatedSeries, order: Optional[int] = None) -> TruncatedSeries:
    """D = ∂_z + w1 ∂_w + Σ w_{j+1} ∂_{w_j}; the result lives one jet order higher."""
    k = jet_order(expr.ring) if expr.ring.vars[:2] == ("z", "w") else 0
    if order is not None:
        k = max(k, order)
    R = jet_ring(k + 1)
    e = _lift(expr, k + 1)
    t = e.trunc
    out = e.diff("z") + R.var("w1", t - 1) * e.diff("w")
    for j in range(1, k + 1):
        out = out + (R.var(f"w{j + 1}", t - 1) * e.diff(f"w{j}")).truncate(t - 1)
    return out


# ---------------------------------------------------------------------------
# prolongation


@dataclass(frozen=True)
class ProlongedMap:
    """G^(j) = numerators[j-1] / DF^(2j-1) for j = 1..order."""

    H: FormalMap
    order: int
    DF: TruncatedSeries
    numerators: Tuple[TruncatedSeries, ...]

    def component(self, j: int) -> Tuple[TruncatedSeries, int]:
        return self.numerators[j - 1], 2 * j - 1

    def expand(self, j: int) -> TruncatedSeries:
        """G^(j) as a series in the flat ring (z, w, w1..wj); needs DF(0) != 0."""
        N, p = self.component(j)
        R = flat_jet_ring(self.order)
        num = R.from_dict(N.to_dict(), N.trunc)
        den = R.from_dict(self.DF.to_dict(), N.trunc)
        if den.constant_term().is_zero():
            raise JetError("DF vanishes at the origin of jet space; expansion is not a power series")
        return (num * den.invert_unit() ** p)

    def at_zero_jets(self, j: int) -> TruncatedSeries:
        """G^(j)(z, w, 0, ..., 0) as a series in (z, w)."""
        N, p = self.component(j)
        n0 = N.restrict(ZW)
        d0 = self.DF.restrict(ZW).truncate(n0.trunc)
        return n0 * d0.invert_unit() ** p


def prolong(H: FormalMap, order: int) -> ProlongedMap:
    if order < 1 or order > MAX_JET_ORDER:
        raise JetError(f"jet order must be in 1..{MAX_JET_ORDER}")
    if not H.is_invertible():
        raise MapError("prolongation needs an invertible map")
    if H.trunc < order + 1:
        raise JetError(f"truncation {H.trunc} too low for jet order {order}")
    R = jet_ring(order)
    F, G = H.F.embed(R), H.G.embed(R)
    DF = _D(F, R)
    nums = [_D(G, R)]
    if order >= 2:
        dDF = _D(DF, R)
        for j in range(1, order):
            Nj = nums[-1]
            DN = _D(Nj, R)
            t = min(DN.trunc, dDF.trunc)
            nums.append(DF.mul_trunc(DN, t) - Nj.mul_trunc(dDF, t).scale(2 * j - 1))
    return ProlongedMap(H, order, DF, tuple(nums))


def _D(e: TruncatedSeries, R: SeriesRing) -> TruncatedSeries:
    """Total derivative kept in R (callers guarantee no jet beyond R appears)."""
    return total_derivative(e).restrict(R)


def g23_closed_form(H: FormalMap) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """Numerators of G^(1), G^(2) written out in partial derivatives of F and G."""
    R = jet_ring(2)
    t = H.trunc
    F, G = H.F.embed(R), H.G.embed(R)
    w1, w2 = R.var("w1", t), R.var("w2", t)
    Fz, Fw, Gz, Gw = F.diff("z"), F.diff("w"), G.diff("z"), G.diff("w")
    DF = Fz + w1 * Fw
    DG = Gz + w1 * Gw
    DDG = G.diff("z").diff("z") + (w1 * G.diff("z").diff("w")).scale(2) + w1 * w1 * G.diff("w").diff("w") + w2 * Gw
    DDF = F.diff("z").diff("z") + (w1 * F.diff("z").diff("w")).scale(2) + w1 * w1 * F.diff("w").diff("w") + w2 * Fw
    return DG, DF * DDG - DG * DDF


def _by_jets(N: TruncatedSeries, order: int) -> Dict[Tuple[int, ...], TruncatedSeries]:
    """Split a jet-ring series into (z, w)-series coefficients of jet monomials."""
    groups: Dict[Tuple[int, ...], dict] = {}
    for e, c in N.to_dict().items():
        groups.setdefault(tuple(e[2:]), {})[(e[0], e[1])] = c
    return {k: ZW.from_dict(v, N.trunc) for k, v in groups.items()}


def functoriality_residuals(H1: FormalMap, H2: FormalMap, order: int) -> List[TruncatedSeries]:
    """Cross-multiplied difference between prolong(H1∘H2) and prolong(H1)∘prolong(H2).

    With G2^(i) = N2_i/D2^(2i-1), substituting into N1_j gives P_j/D2^E and
    DF1 becomes Q/D2; all components are compared without division.
    """
    P1, P2, P12 = prolong(H1, order), prolong(H2, order), prolong(H1.after(H2), order)
    R = jet_ring(order)
    D2 = P2.DF
    t = min(P1.H.trunc, P2.H.trunc)
    F2, G2 = H2.F.embed(R), H2.G.embed(R)
    inner = [F2, G2]
    F1 = H1.F
    Q = compose(F1.diff("z"), inner) * D2 + compose(F1.diff("w"), inner) * P2.numerators[0]
    out = []
    pow_cache: Dict[Tuple[int, int], TruncatedSeries] = {}

    def pw(s_idx: int, e: int) -> TruncatedSeries:
        key = (s_idx, e)
        if key not in pow_cache:
            base = D2 if s_idx == 0 else P2.numerators[s_idx - 1]
            pow_cache[key] = base ** e if e else R.one(t)
        return pow_cache[key]

    for j in range(1, order + 1):
        N1 = P1.numerators[j - 1]
        groups = _by_jets(N1, order)
        E = max(sum(ei * (2 * i + 1) for i, ei in enumerate(k)) for k in groups)
        P = R.zero(N1.trunc)
        for k, c in groups.items():
            term = compose(c, inner)
            for i, ei in enumerate(k):
                if ei:
                    term = term * pw(i + 1, ei)
            used = sum(ei * (2 * i + 1) for i, ei in enumerate(k))
            P = P + term * pw(0, E - used)
        lhs = P12.numerators[j - 1] * Q ** (2 * j - 1) * pw(0, E)
        rhs = P * pw(0, 2 * j - 1) * P12.DF ** (2 * j - 1)
        out.append(lhs - rhs)
    return out


def constant_term_scheme(H: FormalMap, order: int) -> List[TruncatedSeries]:
    """c_1 = G_z/F_z, c_j = ∂_z c_{j-1} / F_z: the jet components at w1 = ... = 0."""
    Fz = H.F.diff("z")
    inv = Fz.invert_unit()
    c = H.G.diff("z") * inv
    out = [c]
    for _ in range(1, order):
        c = c.diff("z") * inv.truncate(c.trunc - 1)
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# second-order transformation rule


def _second_partials(s: TruncatedSeries):
    sz, sw = s.diff("z"), s.diff("w")
    return sz, sw, sz.diff("z"), sz.diff("w"), sw.diff("w")


def transformation_coefficients(H: FormalMap, ring: SeriesRing) -> dict:
    """J, DF-ingredients and I0..I3 of the second-order rule, embedded in ``ring``."""
    Fz, Fw, Fzz, Fzw, Fww = (x.embed(ring) for x in _second_partials(H.F))
    Gz, Gw, Gzz, Gzw, Gww = (x.embed(ring) for x in _second_partials(H.G))
    return {
        "Fz": Fz, "Fw": Fw, "Gz": Gz, "Gw": Gw,
        "J": Fz * Gw - Fw * Gz,
        "I0": Gz * Fzz - Fz * Gzz,
        "I1": Gw * Fzz - Fw * Gzz - (Fz * Gzw).scale(2) + (Gz * Fzw).scale(2),
        "I2": Gz * Fww - Fz * Gww - (Fw * Gzw).scale(2) + (Gw * Fzw).scale(2),
        "I3": Gw * Fww - Fw * Gww,
    }


def transported_ode(H: FormalMap, target: SecondOrderODE) -> SecondOrderODE:
    """Ψ with H mapping {w'' = Ψ} onto {w'' = Ψ*}."""
    R = JET2
    c = transformation_coefficients(H, R)
    t = min(c["I0"].trunc, target.trunc)
    w1 = R.var("w1", t)
    J = c["J"].truncate(t)
    if J.constant_term().is_zero():
        raise JetError("Jacobian of H vanishes at the origin")
    DF = c["Fz"] + w1 * c["Fw"]
    G1 = (c["Gz"] + w1 * c["Gw"]) * DF.invert_unit()
    if not G1.constant_term().is_zero():
        raise JetError("H moves the zero 1-jet (G_z(0) != 0); Ψ* would be evaluated off its expansion point")
    F, G = H.F.embed(R).truncate(t), H.G.embed(R).truncate(t)
    star = compose(target.Phi, [F, G, G1])
    rhs = DF ** 3 * star + c["I0"] + c["I1"] * w1 + c["I2"] * w1 ** 2 + c["I3"] * w1 ** 3
    return SecondOrderODE(rhs.truncate(t) * J.invert_unit())


# ---------------------------------------------------------------------------
# singular second-order equations: identities in scaled jets


@dataclass(frozen=True)
class ScaledJets:
    """Jets of F = z + f, G = w(1 + g0) + w^m g in scaled form.

    phw = w^m f_w, phzw = w^m f_zw, phww = w^(2m) f_ww, likewise gaw, gazw,
    gaww for g; dl = w g0', ps2 = w^(m+1) g0''.  With these, the transformation
    rule divided by w^m needs no division by w.
    """

    z: TruncatedSeries
    w: TruncatedSeries
    zeta: TruncatedSeries
    m: int
    f: TruncatedSeries
    fz: TruncatedSeries
    fzz: TruncatedSeries
    phw: TruncatedSeries
    phzw: TruncatedSeries
    phww: TruncatedSeries
    g: TruncatedSeries
    gz: TruncatedSeries
    gzz: TruncatedSeries
    gaw: TruncatedSeries
    gazw: TruncatedSeries
    gaww: TruncatedSeries
    g0: TruncatedSeries
    dl: TruncatedSeries
    ps2: TruncatedSeries


def split_normalized(H: FormalMap, m: int) -> Tuple[TruncatedSeries, TruncatedSeries, TruncatedSeries]:
    """(f, g, g0) with F = z + f and G = w(1 + g0(w)) + w^m g(z, w)."""
    t = H.trunc
    z, w = ZW.gens(t)
    f = H.F - z
    G0 = H.G.slice({"z": 0})
    try:
        g0 = G0.divide_by_power("w", 1) - SeriesRing(["w"]).one(t - 1)
        rest = H.G - compose(G0, [w])
        g = rest.divide_by_power("w", m)
    except DivisionObstruction as e:
        raise DivisionObstruction(f"map is not of the form G = w(1 + g0) + w^m g: {e}") from e
    return f, g, g0


def jets_of(f: TruncatedSeries, g: TruncatedSeries, g0: TruncatedSeries, m: int,
            ring: SeriesRing = ZWZ) -> ScaledJets:
    t = min(f.trunc, g.trunc)
    R = ring
    fz, fw, fzz, fzw, fww = (x.embed(R) for x in _second_partials(f))
    gz, gw, gzz, gzw, gww = (x.embed(R) for x in _second_partials(g))
    g0R = g0.embed(R)
    dg0 = g0R.diff("w")
    mp = lambda s, k: s.multiply_by_power("w", k)
    return ScaledJets(
        R.var("z", t), R.var("w", t), R.var("zeta", t), m,
        f.embed(R), fz, fzz, mp(fw, m), mp(fzw, m), mp(fww, 2 * m),
        g.embed(R), gz, gzz, mp(gw, m), mp(gzw, m), mp(gww, 2 * m),
        g0R, mp(dg0, 1), mp(dg0.diff("w"), m + 1),
    )


def scaled_identity(j: ScaledJets, Phi: TruncatedSeries, Phi_star: TruncatedSeries,
                    pad: Optional[int] = None) -> TruncatedSeries:
    """(J Ψ − DF^3 Ψ*(F, G, G^(1)) − Σ I_k (w')^k)/w^m with w' = w^m ζ.

    ``pad`` extends Φ and Φ* with zeros to that truncation; callers using it
    must track the true precision themselves.
    """
    m = j.m
    w, z, zeta = j.w, j.z, j.zeta
    wm1 = w ** (m - 1) if m > 1 else None

    def times_wm1(s):
        return s if wm1 is None else s * wm1

    one = 1
    Fz = j.fz + one
    Ghat = j.g0 + one + times_wm1(j.g)
    F = z + j.f
    G = w * Ghat
    Gw = j.g0 + one + j.dl + times_wm1(j.g).scale(m) + j.gaw
    Gzw = times_wm1(j.gz).scale(m) + j.gazw
    wmGww = (times_wm1(j.dl).scale(2) + j.ps2 + j.gaww + times_wm1(j.gaw).scale(2 * m))
    if m >= 2:
        wmGww = wmGww + (j.g * w ** (2 * m - 2)).scale(m * (m - 1))
    J = Fz * Gw - j.phw * j.gz
    I0 = j.gz * j.fzz - Fz * j.gzz
    I1 = Gw * j.fzz - j.phw * j.gzz - (Fz * Gzw).scale(2) + (j.gz * j.phzw).scale(2)
    wmI2 = j.gz * j.phww - Fz * wmGww - (j.phw * Gzw).scale(2) + (Gw * j.phzw).scale(2)
    w2mI3 = Gw * j.phww - j.phw * wmGww
    DF = Fz + zeta * j.phw
    den = DF * Ghat ** m
    zstar = (j.gz + zeta * Gw) * den.invert_unit()
    phi, phis = Phi, Phi_star
    if pad is not None:
        phi, phis = _pad(Phi, pad), _pad(Phi_star, pad)
    src = _subst(phi, [z, w, zeta])
    tgt = _subst(phis, [F, G, zstar])
    return (J * src - DF ** 3 * Ghat ** m * tgt - I0 - zeta * I1
            - zeta ** 2 * wmI2 - zeta ** 3 * w2mI3)


def _subst(outer: TruncatedSeries, inner: list):
    if isinstance(inner[0], TruncatedSeries):
        return compose(outer, inner)
    return inner[0].substitute(outer, inner)


@dataclass
class WPrimeIdentities:
    identities: List[TruncatedSeries]  # coefficients of ζ^0..ζ^3, in (z, w)
    full: TruncatedSeries

    @property
    def passed(self) -> bool:
        return self.full.is_zero()

    @property
    def trunc(self) -> int:
        return self.full.trunc

    def valuations(self) -> List[object]:
        return [s.valuation() for s in self.identities]


def _check_pair(source: SingularODE, target: SingularODE) -> int:
    if source.m != target.m:
        raise JetError(f"nonminimality orders differ: {source.m} vs {target.m}")
    return source.m


def extract_wprime_identities(H: FormalMap, source: SingularODE, target: SingularODE) -> WPrimeIdentities:
    m = _check_pair(source, target)
    f, g, g0 = split_normalized(H, m)
    E = scaled_identity(jets_of(f, g, g0, m), source.Phi, target.Phi)
    ids = [E.slice({"zeta": k}) for k in range(4)]
    return WPrimeIdentities(ids, E)


def direct_transformation_residual(F: TruncatedSeries, G: TruncatedSeries, m: int, Phi: TruncatedSeries,
                                   Phi_star: TruncatedSeries,
                                   overrides: Optional[Dict[str, TruncatedSeries]] = None) -> TruncatedSeries:
    """Unscaled J w^m Φ − DF^3 G^m Φ*(F, G, ζ*) − Σ I_k ζ^k w^(km), then divided by w^m.

    Series F, G live in a ring containing z, w, zeta (and possibly more);
    ``overrides`` replaces named partial derivatives (e.g. "Fww") by other
    series, which lets a test treat them as independent symbols.
    """
    R = F.ring
    d = dict(zip(["Fz", "Fw", "Fzz", "Fzw", "Fww"], _second_partials(F)))
    d.update(zip(["Gz", "Gw", "Gzz", "Gzw", "Gww"], _second_partials(G)))
    d.update(overrides or {})
    t = min(v.trunc for v in d.values())
    w, z, zeta = R.var("w", t), R.var("z", t), R.var("zeta", t)
    wm = w ** m
    J = d["Fz"] * d["Gw"] - d["Fw"] * d["Gz"]
    I0 = d["Gz"] * d["Fzz"] - d["Fz"] * d["Gzz"]
    I1 = d["Gw"] * d["Fzz"] - d["Fw"] * d["Gzz"] - (d["Fz"] * d["Gzw"]).scale(2) + (d["Gz"] * d["Fzw"]).scale(2)
    I2 = d["Gz"] * d["Fww"] - d["Fz"] * d["Gww"] - (d["Fw"] * d["Gzw"]).scale(2) + (d["Gw"] * d["Fzw"]).scale(2)
    I3 = d["Gw"] * d["Fww"] - d["Fw"] * d["Gww"]
    DF = d["Fz"] + zeta * wm * d["Fw"]
    Ghat = G.divide_by_power("w", 1)
    num = (d["Gz"] + zeta * wm * d["Gw"]).divide_by_power("w", m)
    zstar = num * (DF * Ghat ** m).invert_unit()
    src = compose(Phi, [z, w, zeta])
    tgt = compose(Phi_star, [F.truncate(t), G.truncate(t), zstar])
    E = (J * wm * src - DF ** 3 * wm * Ghat ** m * tgt - I0 - zeta * wm * I1
         - zeta ** 2 * wm ** 2 * I2 - zeta ** 3 * wm ** 3 * I3)
    return E.divide_by_power("w", m)


# ---------------------------------------------------------------------------
# tangency identity for high-order systems


@dataclass
class TangencyReport:
    residuals: List[TruncatedSeries]
    orders: List[int]

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residuals)

    @property
    def trunc(self) -> int:
        return min(r.trunc for r in self.residuals)

    def as_dict(self) -> dict:
        from .series import INF
        return {
            "pass": self.passed,
            "certified_trunc": self.trunc,
            "residual_valuations": {
                str(j): ("inf" if r.valuation() == INF else int(r.valuation()))
                for j, r in zip(self.orders, self.residuals)
            },
        }


def _as_high_order(s: Union[HighOrderSystem, SingularODE]) -> HighOrderSystem:
    return high_order_from_singular(s) if isinstance(s, SingularODE) else s


def restriction_args(sysm: HighOrderSystem, t: int) -> List[TruncatedSeries]:
    """Substitutions z, w, w_j = Φ_j (j < k), w_k = w^mu ζ, w_{k+1} = Φ."""
    R = ZWZ
    z, w, zeta = R.gens(t)
    args = [z, w] + [p.truncate(t) for p in sysm.Phi_list]
    args.append(zeta * w ** sysm.mu)
    args.append(sysm.Phi.truncate(t))
    return args


def _tangency_parts(H: FormalMap, source: HighOrderSystem, target: HighOrderSystem):
    if (source.k, source.mu) != (target.k, target.mu):
        raise JetError(f"system orders differ: (k, mu) = {(source.k, source.mu)} vs {(target.k, target.mu)}")
    k, mu = source.k, source.mu
    P = prolong(H, k + 1)
    t = min(source.trunc, P.numerators[-1].trunc)
    args = restriction_args(source, t)
    sig = lambda s: compose(s, args)
    sDF = sig(P.DF)
    if sDF.constant_term().is_zero():
        raise JetError("DF vanishes at the origin after restriction")
    inv = sDF.invert_unit()
    lhs = {j: sig(P.numerators[j - 1]) * inv ** (2 * j - 1) for j in range(1, k + 2)}
    try:
        Ghat = H.G.divide_by_power("w", 1).embed(ZWZ)
        numk = sig(P.numerators[k - 1]).divide_by_power("w", mu)
    except DivisionObstruction as e:
        raise DivisionObstruction(f"restricted k-th jet numerator not divisible by w^{mu}: {e}") from e
    if Ghat.constant_term().is_zero():
        raise JetError("G_w vanishes at the origin")
    zstar = numk * (inv ** (2 * k - 1)).truncate(numk.trunc) * (Ghat ** mu).invert_unit()
    F, G = H.F.embed(ZWZ), H.G.embed(ZWZ)
    return k, mu, lhs, zstar, F, G


def tangency_residual(H: FormalMap, source: Union[HighOrderSystem, SingularODE],
                      target: Union[HighOrderSystem, SingularODE]) -> TangencyReport:
    """Residuals of G^(j) = Φ*_j(F, G, G^(k)/G^mu) on the restricted jet space."""
    src, tgt = _as_high_order(source), _as_high_order(target)
    k, mu, lhs, zstar, F, G = _tangency_parts(H, src, tgt)
    if not zstar.constant_term().is_zero():
        raise JetError("ζ* has a constant term; H does not respect the singular locus")
    res, orders = [], []
    for j, phi in tgt.entries():
        t = min(lhs[j].trunc, zstar.trunc, phi.trunc)
        rhs = compose(phi, [F.truncate(t), G.truncate(t), zstar.truncate(t)])
        res.append((lhs[j].truncate(t) - rhs))
        orders.append(j)
    return TangencyReport(res, orders)


@dataclass
class ZetaIdentities:
    """ζ^0 and ζ^k slices of the (k+1)-th tangency residual, divided by w^mu."""

    k: int
    mu: int
    zeta0: TruncatedSeries
    zetak: TruncatedSeries
    lead_g: Gaussian  # constant term of the coefficient of ∂_z^{k+1} g in zeta0
    lead_f: Gaussian  # constant term of the coefficient of ∂_z^{k+1} f in zetak

    @property
    def passed(self) -> bool:
        return self.zeta0.is_zero() and self.zetak.is_zero()


def _zeta_slices(H: FormalMap, src: HighOrderSystem, tgt: HighOrderSystem) -> Tuple[TruncatedSeries, TruncatedSeries]:
    rep = tangency_residual(H, src, tgt)
    last = rep.residuals[-1]
    k, mu = src.k, src.mu
    try:
        a = last.slice({"zeta": 0}).divide_by_power("w", mu)
        b = last.slice({"zeta": k}).divide_by_power("w", mu)
    except DivisionObstruction as e:
        raise DivisionObstruction(f"ζ-slices of the last tangency residual not divisible by w^{mu}: {e}") from e
    return a, b


def extract_zeta_identities(H: FormalMap, source: Union[HighOrderSystem, SingularODE],
                            target: Union[HighOrderSystem, SingularODE]) -> ZetaIdentities:
    src, tgt = _as_high_order(source), _as_high_order(target)
    k, mu = src.k, src.mu
    a, b = _zeta_slices(H, src, tgt)
    t = H.trunc
    z, w = ZW.gens(t)
    zk = z ** (k + 1)
    fact = 1
    for i in range(2, k + 2):
        fact *= i
    Hg = FormalMap(H.F, H.G + zk * w ** mu)
    Hf = FormalMap(H.F + zk, H.G)
    ag, _ = _zeta_slices(Hg, src, tgt)
    _, bf = _zeta_slices(Hf, src, tgt)
    lead_g = (ag - a).slice({"z": 0}).constant_term() / fact
    lead_f = (bf - b).slice({"z": 0}).constant_term() / fact
    if lead_g.is_zero() or lead_f.is_zero():
        raise JetError("leading coefficient of the ζ-identities vanishes (Property (*) fails)")
    return ZetaIdentities(k, mu, a, b, lead_g, lead_f)
