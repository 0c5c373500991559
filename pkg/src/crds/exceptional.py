"""Exceptional nonminimal points: blow-ups, coordinate adaptation and the
order-(k+1) Cauchy reconstruction.

The blow-down map is B(ξ, η) = (ξ η^s, η).  Blown-up objects are returned in
the usual variable names ((z, w) for maps, (z, chi, tau) for defining
series), with z, w playing the roles of ξ, η.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .hypersurface import (
    THETA_RING, ComplexDefiningSeries, HypersurfaceError, invariants, normalize_coordinates,
    pure_order, transport,
)
from .jet import JetError, _as_high_order, _zeta_slices, split_normalized
from .maps import ZW, FormalMap, MapError
from .reduction import _cramer_series
from .segre_ode import FAMILY_RING, HighOrderSystem, SegreFamily, SingularODE
from .series import (
    INF, DivisionObstruction, Gaussian, SeriesError, SeriesRing, TruncatedSeries, _pad, compose,
    solve_implicit,
)

W_RING = SeriesRing(["w"])


class BlowUpError(SeriesError):
    pass


class AdaptationError(HypersurfaceError):
    pass


# ---------------------------------------------------------------------------
# blow-ups in the space


@dataclass(frozen=True)
class BlowUpConfig:
    s: int = 2

    def __post_init__(self):
        if self.s < 2:
            raise BlowUpError("blow-up exponent s must be at least 2")


def order_11(T: ComplexDefiningSeries) -> Optional[int]:
    """m(2) = ord Θ_11, None if Θ_11 vanishes to truncation."""
    v = T.slice(1, 1).valuation()
    return None if v == INF else int(v)


def check_blow_up_exponent(T: ComplexDefiningSeries, cfg: BlowUpConfig) -> int:
    m2 = order_11(T)
    if m2 is None:
        raise BlowUpError("Θ_11 vanishes to truncation; blow-up needs Θ_11 ≢ 0")
    if cfg.s <= m2:
        raise BlowUpError(f"s = {cfg.s} must exceed ord Θ_11 = {m2}")
    return m2


@dataclass(frozen=True)
class BlownUpHypersurface:
    T: ComplexDefiningSeries
    s: int
    m2: int
    membership: TruncatedSeries  # Θ_B − Θ(z Θ_B^s, χ τ^s, τ)

    @property
    def admissible(self) -> bool:
        return invariants(self.T).generic_nonminimal

    def as_dict(self) -> dict:
        inv = invariants(self.T)
        return {
            "s": self.s,
            "ord_theta11": self.m2,
            "membership_zero": self.membership.is_zero(),
            "admissible": inv.generic_nonminimal,
            "invariants": inv.as_dict(),
        }


def blow_up_hypersurface(T: ComplexDefiningSeries, cfg: BlowUpConfig) -> BlownUpHypersurface:
    """M_B = B^{-1}(M): solve η = Θ(ξ η^s, χ τ^s, τ) for η."""
    m2 = check_blow_up_exponent(T, cfg)
    s = cfg.s
    t = T.trunc
    R = SeriesRing(["z", "chi", "tau", "eta"])
    z, chi, tau, eta = R.gens(t)
    eq = eta - compose(T.Theta, [z * eta ** s, chi * tau ** s, tau])
    (theta,) = solve_implicit([eq], 1)
    z3, chi3, tau3 = THETA_RING.gens(t)
    membership = theta - compose(T.Theta, [z3 * theta ** s, chi3 * tau3 ** s, tau3])
    return BlownUpHypersurface(ComplexDefiningSeries(theta), s, m2, membership)


@dataclass(frozen=True)
class BlownUpMap:
    H: FormalMap
    s: int
    connecting: Tuple[TruncatedSeries, ...]  # G^B_j − η^{sj} G_j, j = 0..

    @property
    def connecting_holds(self) -> bool:
        return all(r.is_zero() for r in self.connecting)


def blow_up_map(H: FormalMap, cfg: BlowUpConfig, orders: int = 4) -> BlownUpMap:
    """H_B = B^{-1} ∘ H ∘ B, i.e. G_B = G(ξη^s, η) and F_B = F(ξη^s, η)/G_B^s."""
    s = cfg.s
    if H.ring != ZW:
        raise MapError("blow_up_map expects a map in (z, w)")
    F0 = H.F.slice({"z": 0})
    if F0.valuation() < s + 1:
        raise BlowUpError(f"ord F(0, w) = {F0.valuation()} < s + 1 = {s + 1}: F_B is not a map germ at 0")
    if H.G.slice({"w": 0}).valuation() != INF:
        raise BlowUpError("G is not O(w)")
    t = H.trunc
    z, w = ZW.gens(t)
    args = [z * w ** s, w]
    GB = compose(H.G, args)
    FB = compose(H.F, args)
    try:
        Ghat = GB.divide_by_power("w", 1)
        FB = FB.divide_by_power("w", s)
    except DivisionObstruction as e:
        raise BlowUpError(str(e)) from e
    FB = FB * (Ghat ** s).truncate(FB.trunc).invert_unit()
    tB = min(FB.trunc, GB.trunc)
    HB = FormalMap(FB.truncate(tB), GB.truncate(tB))
    conn = []
    for j in range(orders + 1):
        gb = GB.slice({"z": j})
        g = H.G.slice({"z": j}).multiply_by_power("w", s * j)
        tt = min(gb.trunc, g.trunc)
        conn.append(gb.truncate(tt) - g.truncate(tt))
    return BlownUpMap(HB, s, tuple(conn))


# ---------------------------------------------------------------------------
# blow-up in the Segre parameters


@dataclass(frozen=True)
class ParameterBlowUp:
    family: SegreFamily
    p: int
    valuation: int  # ord_b of W − b

    @property
    def divisible(self) -> bool:
        return self.valuation >= self.p + 1


def parameter_blow_up(T: ComplexDefiningSeries, p: Optional[int] = None) -> ParameterBlowUp:
    """W(z, a, b) = Θ(z, a b, b); all of W − b is divisible by b^(p+1)."""
    if p is None:
        p = pure_order(T)
    t = T.trunc
    z, a, b = FAMILY_RING.gens(t)
    W = compose(T.Theta, [z, a * b, b])
    v = (W - b).valuation("b")
    v = t + 1 if v == INF else int(v)
    if v < p + 1:
        raise BlowUpError(f"W − b has b-order {v} < p + 1 = {p + 1}: coordinates not adapted")
    return ParameterBlowUp(SegreFamily(W, p + 1, "parameter-blow-up"), p, v)


# ---------------------------------------------------------------------------
# adapted coordinates


def adapted_index(T: ComplexDefiningSeries) -> Optional[int]:
    """Least k >= 1 with ord Θ_k1 = p, or None."""
    p = pure_order(T)
    ks = [k for (k, l, c) in T.nontrivial_part().to_dict() if l == 1 and c == p]
    return min(ks) if ks else None


@dataclass(frozen=True)
class Straightened:
    T: ComplexDefiningSeries
    H: FormalMap  # from the old to the new coordinates
    alpha: Gaussian
    k: Optional[int]
    p: int

    @property
    def adapted(self) -> bool:
        return self.k is not None and order_11(self.T) is not None


def straighten_curve(T: ComplexDefiningSeries, alpha) -> Straightened:
    """Shear z -> z − α w, then return to normal coordinates."""
    alpha = Gaussian.of(alpha)
    t = T.trunc
    z, w = ZW.gens(t)
    shear = FormalMap(z - w.scale(alpha), w)
    T1 = transport(T, shear)
    T2, N = normalize_coordinates(T1)
    return Straightened(T2, N.after(shear), alpha, adapted_index(T2), pure_order(T2))


@dataclass(frozen=True)
class AdaptReport:
    result: Straightened
    seed: int
    tried: Tuple[Gaussian, ...]

    def as_dict(self) -> dict:
        r = self.result
        return {
            "seed": self.seed,
            "alpha": str(r.alpha),
            "attempts": len(self.tried),
            "p": r.p,
            "k": r.k,
            "ord_theta11": order_11(r.T),
        }


def generic_alphas(seed: int):
    rng = random.Random(seed)
    while True:
        re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        im = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if re or im:
            yield Gaussian(re, im)


def adapt_coordinates(T: ComplexDefiningSeries, seed: int = 0, attempts: int = 6) -> AdaptReport:
    """straighten_curve with seeded pseudo-random α until ord Θ_k1 = p for some k."""
    p0 = pure_order(T)
    tried = []
    for alpha in generic_alphas(seed):
        if len(tried) >= attempts:
            break
        tried.append(alpha)
        r = straighten_curve(T, alpha)
        if r.p != p0:
            raise AdaptationError(f"pure order changed under a coordinate change: {p0} -> {r.p}")
        if r.adapted:
            return AdaptReport(r, seed, tuple(tried))
    raise AdaptationError(f"no adapted coordinates after {attempts} choices of α (seed {seed})")


# ---------------------------------------------------------------------------
# factorization of maps


def check_map_factorization(H: FormalMap, p: int) -> bool:
    """F_z(0) != 0, G_w(0) != 0, G = O(w) and G_z = O(w^(p+1))."""
    (a, _b), (_c, d) = H.linear_part()
    if a.is_zero() or d.is_zero():
        return False
    if H.G.slice({"w": 0}).valuation() != INF:
        return False
    return H.G.diff("z").valuation("w") >= p + 1


# ---------------------------------------------------------------------------
# order-(k+1) Cauchy problem


def _taylor_split(s: TruncatedSeries, d: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
    low = {e: c for e, c in s.to_dict().items() if e[0] <= d}
    P = s.ring.from_dict(low, s.trunc)
    return P, s - P


def _derivs(s: TruncatedSeries, n: int) -> Tuple[TruncatedSeries, ...]:
    out = [s]
    for _ in range(n):
        out.append(out[-1].diff("w"))
    return tuple(out)


@dataclass(frozen=True)
class ParameterExpansion:
    """Initial z-components of F = z + f, G = w(1 + g0) + w^mu Σ_{j>=1} g_j z^j.

    Each component c_i (f_i for i <= k; g0 and g_i for i <= k on the g side)
    is split as a polynomial P_i of degree <= k + 1 plus a remainder r_i with
    ord r_i >= k + 2; ``alpha[i][j]`` and ``beta[i][j]`` hold the j-th
    derivatives of the remainders, j <= k + 1, so every entry vanishes at 0.
    ``beta[0]`` refers to g0.
    """

    k: int
    mu: int
    poly_f: Tuple[TruncatedSeries, ...]
    poly_g: Tuple[TruncatedSeries, ...]
    alpha: Tuple[Tuple[TruncatedSeries, ...], ...]
    beta: Tuple[Tuple[TruncatedSeries, ...], ...]

    def __post_init__(self):
        self.validate()

    def validate(self):
        k = self.k
        for name, tab in (("alpha", self.alpha), ("beta", self.beta)):
            if len(tab) != k + 1 or any(len(row) != k + 2 for row in tab):
                raise SeriesError(f"{name} must be a ({k + 1}) x ({k + 2}) table")
            for i, row in enumerate(tab):
                for j, x in enumerate(row):
                    if not x.constant_term().is_zero():
                        raise SeriesError(f"{name}[{i}][{j}] has a constant term")
                    if j + 1 < len(row):
                        d = x.diff("w")
                        t = min(d.trunc, row[j + 1].trunc)
                        if d.truncate(t) != row[j + 1].truncate(t):
                            raise SeriesError(f"{name}[{i}][{j + 1}] is not the derivative of {name}[{i}][{j}]")

    @classmethod
    def from_components(cls, k: int, mu: int, f: Sequence[TruncatedSeries], g: Sequence[TruncatedSeries]) -> "ParameterExpansion":
        """f = (f_0..f_k), g = (g0, g_1..g_k), all series in w."""
        pf, pg, al, be = [], [], [], []
        for src, P, tab in ((f, pf, al), (g, pg, be)):
            if len(src) != k + 1:
                raise SeriesError(f"need {k + 1} components")
            for c in src:
                p, r = _taylor_split(c, k + 1)
                P.append(p)
                tab.append(_derivs(r, k + 1))
        return cls(k, mu, tuple(pf), tuple(pg), tuple(al), tuple(be))

    @classmethod
    def of(cls, H: FormalMap, k: int, mu: int) -> "ParameterExpansion":
        f, g, g0 = split_normalized(H, mu)
        fs = [f.slice({"z": i}) for i in range(k + 1)]
        gs = [g0] + [g.slice({"z": i}) for i in range(1, k + 1)]
        return cls.from_components(k, mu, fs, gs)

    @classmethod
    def zero(cls, k: int, mu: int, trunc: int) -> "ParameterExpansion":
        z = W_RING.zero(trunc)
        return cls.from_components(k, mu, [z] * (k + 1), [z] * (k + 1))

    def f(self, i: int) -> TruncatedSeries:
        return self.poly_f[i] + self.alpha[i][0]

    def g(self, i: int) -> TruncatedSeries:
        return self.poly_g[i] + self.beta[i][0]

    @property
    def trunc(self) -> int:
        return min(x.trunc for x in [self.f(i) for i in range(self.k + 1)] + [self.g(i) for i in range(self.k + 1)])


def cauchy_reconstruct_k(source: Union[HighOrderSystem, SingularODE], target: Union[HighOrderSystem, SingularODE],
                         params: ParameterExpansion, trunc: int, margin: Optional[int] = None) -> FormalMap:
    """Solve the ζ^0 and ζ^k identities order by order in z for f_{n+k+1}, g_{n+k+1}.

    The identities at z^n, w^a involve the component of z-order j only up to
    w-degree a + n + k + 1 − j, so components known to total degree ``trunc``
    determine everything needed.  The map is evaluated zero-padded to
    ``trunc + margin`` (the bookkeeping of prolongation and ζ-slicing is
    pessimistic) and only coefficients below the needed degree are kept.
    """
    src, tgt = _as_high_order(source), _as_high_order(target)
    k, mu = src.k, src.mu
    if (tgt.k, tgt.mu) != (k, mu) or (params.k, params.mu) != (k, mu):
        raise JetError("source, target and parameters disagree on (k, mu)")
    if params.trunc < trunc:
        raise JetError(f"parameters known to w^{params.trunc} only, need w^{trunc}")
    if margin is None:
        margin = 2 * k + mu + 2
    t = trunc + margin
    z, w = ZW.gens(t)
    lift = lambda s: _pad(compose(s.truncate(min(s.trunc, trunc)), [w]), t)
    f = sum((z ** i * lift(params.f(i)) for i in range(k + 1)), ZW.zero(t))
    g = sum((z ** i * lift(params.g(i)) for i in range(1, k + 1)), ZW.zero(t))
    G0 = w + w * lift(params.g(0))
    wmu = w ** mu
    one, zero = ZW.one(t), ZW.zero(t)
    for n in range(0, trunc - k):
        zn = z ** (n + k + 1)

        def ident(df, dg):
            H = FormalMap(z + f + zn * df, G0 + wmu * (g + zn * dg))
            a, b = _zeta_slices(H, src, tgt)
            return {0: a.slice({"z": n}), 1: b.slice({"z": n})}

        b0 = ident(zero, zero)
        need = trunc - (n + k + 1)
        tt = min(b0[0].trunc, b0[1].trunc)
        if tt < need:
            raise JetError(f"system truncation too low: identities at z^{n} known to w^{tt}, need w^{need}")
        p1 = ident(one, zero)
        p2 = ident(zero, one)
        try:
            fn, gn = _cramer_series(b0, p1, p2, [1, 0], need)
        except SeriesError as e:
            raise JetError(f"leading coefficients degenerate at z-order {n}: {e}") from e
        f = f + zn * lift(fn)
        g = g + zn * lift(gn)
    F = (z + f).truncate(trunc)
    G = (G0 + wmu * g).truncate(trunc)
    return FormalMap(F, G, normalized=True)
