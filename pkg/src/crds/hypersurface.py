"""Real-analytic hypersurfaces in C^2 through their defining series.

A hypersurface is ``v = F(z, z̄, u)`` with ``w = u + iv``; the complex
defining series ``w = Θ(z, χ, τ)`` is obtained by solving
``(w − τ)/(2i) = F(z, χ, (w + τ)/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .maps import FormalMap, ZW
from .series import (
    INF, Gaussian, I, SeriesError, SeriesRing, TruncatedSeries, compose, solve_implicit,
)

REAL_RING = SeriesRing(["z", "zbar", "u"])
THETA_RING = SeriesRing(["z", "chi", "tau"])


class HypersurfaceError(SeriesError):
    pass


class NotNormal(HypersurfaceError):
    pass


@dataclass(frozen=True)
class RealDefiningSeries:
    F: TruncatedSeries
    normal: bool = False

    def __post_init__(self):
        if self.F.ring != REAL_RING:
            raise HypersurfaceError(f"real defining series must live in {REAL_RING}")

    @property
    def trunc(self) -> int:
        return self.F.trunc

    def is_hermitian(self) -> bool:
        swapped = {(b, a, c): v.conjugate() for (a, b, c), v in self.F.to_dict().items()}
        return REAL_RING.from_dict(swapped, self.F.trunc) == self.F

    def is_normal(self) -> bool:
        d = self.F.to_dict()
        return all(a > 0 and b > 0 for (a, b, _c) in d)


@dataclass(frozen=True)
class ComplexDefiningSeries:
    Theta: TruncatedSeries

    def __post_init__(self):
        if self.Theta.ring != THETA_RING:
            raise HypersurfaceError(f"complex defining series must live in {THETA_RING}")

    @property
    def trunc(self) -> int:
        return self.Theta.trunc

    def slice(self, k: int, l: int) -> TruncatedSeries:
        """Θ_kl(τ), the coefficient of z^k χ^l."""
        return self.Theta.slice({"z": k, "chi": l})

    def truncate(self, t: int) -> "ComplexDefiningSeries":
        return ComplexDefiningSeries(self.Theta.truncate(t))

    def conjugate_series(self) -> TruncatedSeries:
        return self.Theta.conjugate()

    def is_normal(self) -> bool:
        tau = THETA_RING.var("tau", self.trunc)
        rest = self.Theta - tau
        return all(a > 0 and b > 0 for (a, b, _c) in rest.to_dict())

    def nontrivial_part(self) -> TruncatedSeries:
        return self.Theta - THETA_RING.var("tau", self.trunc)


@dataclass(frozen=True)
class HypersurfaceInvariants:
    trunc: int
    levi_nonflat: bool
    minimal: bool
    m: Optional[int]
    p: Optional[int]
    k: Optional[int]
    generic_nonminimal: bool
    levi_nondegenerate: bool

    def as_dict(self) -> dict:
        return {
            "trunc": self.trunc,
            "levi_nonflat": self.levi_nonflat,
            "m": "minimal" if self.minimal else self.m,
            "p": self.p,
            "k": self.k,
            "generic_nonminimal": self.generic_nonminimal,
            "levi_nondegenerate": self.levi_nondegenerate,
        }


def real_series(terms: Dict[Tuple[int, int, int], object], trunc: int) -> RealDefiningSeries:
    return RealDefiningSeries(REAL_RING.from_dict(terms, trunc))


def complex_from_real(F: RealDefiningSeries) -> ComplexDefiningSeries:
    """Solve (w − τ)/(2i) = F(z, χ, (w + τ)/2) for w = Θ(z, χ, τ)."""
    if not F.is_hermitian():
        raise HypersurfaceError("F is not Hermitian-symmetric (not real-valued)")
    for e, c in F.F.to_dict().items():
        if sum(e) < 2:
            raise HypersurfaceError(f"F must vanish to second order at 0; found term {e}")
    t = F.trunc
    big = SeriesRing(["z", "chi", "tau", "w"])
    z, chi, tau, w = big.gens(t)
    Fsub = compose(F.F, [z, chi, (w + tau).scale(Fraction(1, 2))])
    eq = w - tau - Fsub.scale(Gaussian(0, 2))
    (theta,) = solve_implicit([eq], 1)
    return ComplexDefiningSeries(theta)


def conj_swapped(T: ComplexDefiningSeries, ring: SeriesRing, z: str, chi: str, w: str) -> TruncatedSeries:
    """Θ̄(χ, z, w) as a series in ``ring``."""
    t = T.trunc
    return compose(T.Theta.conjugate(), [ring.var(chi, t), ring.var(z, t), ring.var(w, t)])


def reality_residual(T: ComplexDefiningSeries) -> TruncatedSeries:
    ring = SeriesRing(["z", "chi", "w"])
    t = T.trunc
    inner = conj_swapped(T, ring, "z", "chi", "w")
    lhs = compose(T.Theta, [ring.var("z", t), ring.var("chi", t), inner])
    return ring.var("w", t) - lhs


def check_reality(T: ComplexDefiningSeries) -> bool:
    return reality_residual(T).is_zero()


def _require_normal(T: ComplexDefiningSeries):
    if not T.is_normal():
        raise NotNormal("defining series is not in normal coordinates")


def nonminimality_order(T: ComplexDefiningSeries) -> Optional[int]:
    """m = min ord_τ Θ_kl; 0 means minimal, None means Levi-flat to truncation."""
    _require_normal(T)
    v = T.nontrivial_part().valuation("tau")
    return None if v == INF else int(v)


def pure_order(T: ComplexDefiningSeries) -> int:
    """p with p + 1 = min over k, l >= 1 of l + ord_τ Θ_kl."""
    _require_normal(T)
    terms = T.nontrivial_part().to_dict()
    if not terms:
        raise HypersurfaceError("Levi-flat to truncation: pure order undefined")
    return min(l + c for (_k, l, c) in terms) - 1


def k_nondegeneracy_index(T: ComplexDefiningSeries, m: int) -> Optional[int]:
    """Least k with ord_τ Θ_k1 = m."""
    _require_normal(T)
    ks = [k for (k, l, c) in T.nontrivial_part().to_dict() if l == 1 and c == m]
    return min(ks) if ks else None


def invariants(T: ComplexDefiningSeries) -> HypersurfaceInvariants:
    m = nonminimality_order(T)
    if m is None:
        return HypersurfaceInvariants(T.trunc, False, False, None, None, None, False, False)
    p = pure_order(T)
    k = k_nondegeneracy_index(T, m)
    minimal = m == 0
    nondeg = minimal and k == 1
    generic = (not minimal) and k == 1
    return HypersurfaceInvariants(T.trunc, True, minimal, None if minimal else m, p, k, generic, nondeg)


def segre_graphing_function(T: ComplexDefiningSeries, a: TruncatedSeries, b: TruncatedSeries,
                            z: str = "z") -> TruncatedSeries:
    """w(z; a, b) = Θ(z, a, b) in the ring of ``a`` and ``b`` (which must contain ``z``)."""
    ring = a.ring
    t = min(T.trunc, a.trunc, b.trunc)
    return compose(T.Theta, [ring.var(z, t), a, b])


# ---------------------------------------------------------------------------
# coordinate changes


def transport_by_inverse(T: ComplexDefiningSeries, P: TruncatedSeries, Q: TruncatedSeries) -> ComplexDefiningSeries:
    """Defining series of H(M) given H^{-1} = (P, Q) as series in (z, w).

    Solves Q(z, w) = Θ(P(z, w), P̄(χ, τ), Q̄(χ, τ)) for w = Θ*(z, χ, τ).
    """
    t = min(T.trunc, P.trunc, Q.trunc)
    big = SeriesRing(["z", "chi", "tau", "w"])
    z, chi, tau, w = big.gens(t)
    Pzw = compose(P, [z, w])
    Qzw = compose(Q, [z, w])
    Pb = compose(P.conjugate(), [chi, tau])
    Qb = compose(Q.conjugate(), [chi, tau])
    eq = Qzw - compose(T.Theta.truncate(t), [Pzw, Pb, Qb])
    (theta,) = solve_implicit([eq], 1)
    return ComplexDefiningSeries(theta)


def transport(T: ComplexDefiningSeries, H: FormalMap) -> ComplexDefiningSeries:
    """Defining series of H(M), in the coordinates given by H (not normalized)."""
    Hi = H.inverse()
    return transport_by_inverse(T, Hi.F, Hi.G)


def _real_curve_map(theta: TruncatedSeries) -> TruncatedSeries:
    """q(t) = t + i·h(t) with h real and θ(q̄(t)) = q(t)."""
    t = theta.trunc
    ring = SeriesRing(["t", "h"])
    tt, hh = ring.gens(t)
    ih = hh.scale(I)
    eq = tt + ih - compose(theta, [tt - ih])
    (h,) = solve_implicit([eq], 1)
    if not h.is_real():
        raise HypersurfaceError("real-curve normalization produced a non-real correction")
    one = SeriesRing(["t"])
    return one.var("t", t) + h.scale(I)


def normalize_coordinates(T: ComplexDefiningSeries) -> Tuple[ComplexDefiningSeries, FormalMap]:
    """Normal coordinates for T; returns (normal Θ, map N from old to new coordinates)."""
    t = T.trunc
    z, w = ZW.gens(t)
    theta0 = T.Theta.slice({"z": 0, "chi": 0})
    q = _real_curve_map(theta0)
    qzw = compose(q, [w])
    T1 = transport_by_inverse(T, z, qzw)
    psi = T1.Theta.slice({"chi": 0}).rename({"tau": "w"})
    psi = psi.embed(ZW) if psi.ring != ZW else psi
    T2 = transport_by_inverse(T1, z, psi)
    # H^{-1} = (z, q(ψ(z, w)))
    inv = FormalMap(z, compose(qzw, [z, psi]))
    N = inv.inverse()
    if not T2.is_normal():
        raise HypersurfaceError("normalization failed to reach normal coordinates")
    return T2, N


def transport_normal(T: ComplexDefiningSeries, H: FormalMap) -> Tuple[ComplexDefiningSeries, FormalMap]:
    """Normal-coordinate image of M under H, with the equivalence N∘H."""
    T1 = transport(T, H)
    T2, N = normalize_coordinates(T1)
    return T2, N.after(H)
