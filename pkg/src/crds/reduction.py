"""Reduction of a map between generic nonminimal hypersurfaces to the singular Y-system.

For a normalized map F = z + f, G = w(1 + g0) + w^m g the vector

    Y = (f0, g0, f1, g1, w^m f0', w g0', w^m f1', w^m g1')

solves w^m Y' = A(w, Y).  A is not materialized as a series in nine
variables (too large at useful truncations); it is an exact evaluator:
given Y as series, it solves the scaled identities for the second-order
unknowns by Cramer's rule on affine probes and returns A(w, Y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .hypersurface import ComplexDefiningSeries, invariants, transport
from .blocks import BlockPoly, Tangent, USeries
from .jet import ScaledJets, jets_of, scaled_identity, split_normalized
from .maps import ZW, FormalMap, MapError
from .segre_ode import SingularODE
from .series import (
    Gaussian, SeriesError, SeriesRing, TruncatedSeries, _gauss_solve, _pad, compose,
)

W_RING = SeriesRing(["w"])


class ReductionError(SeriesError):
    pass


class Resonance(ReductionError):
    def __init__(self, degree: int, msg: str = ""):
        super().__init__(msg or f"singular linear solve at degree {degree}")
        self.degree = degree


# ---------------------------------------------------------------------------
# normalization and the basic identity


def verify_basic_identity(H: FormalMap, source: ComplexDefiningSeries,
                          target: ComplexDefiningSeries) -> TruncatedSeries:
    """G(z, ρ) − ρ*(F(z, ρ), F̄(ξ, η), Ḡ(ξ, η)) with ρ = Θ(z, ξ, η), in (z, xi, eta)."""
    R = SeriesRing(["z", "xi", "eta"])
    t = min(H.trunc, source.trunc, target.trunc)
    z, xi, eta = R.gens(t)
    rho = compose(source.Theta.truncate(t), [z, xi, eta])
    F = compose(H.F, [z, rho])
    G = compose(H.G, [z, rho])
    Fb = compose(H.F.conjugate(), [xi, eta])
    Gb = compose(H.G.conjugate(), [xi, eta])
    return G - compose(target.Theta.truncate(t), [F, Fb, Gb])


@dataclass(frozen=True)
class NormalizedMap:
    H: FormalMap
    target: ComplexDefiningSeries
    scaling: FormalMap  # L with H = L ∘ H_original, target = L(M*)


def normalize_map(H: FormalMap, source: ComplexDefiningSeries, target: ComplexDefiningSeries,
                  m: Optional[int] = None) -> NormalizedMap:
    """Scale the target so that F_z(0) = G_w(0) = 1, after checking G = O(w), G_z = O(w^(m+1))."""
    if m is None:
        m = invariants(source).m
        if not m:
            raise ReductionError("source is not nonminimal")
    G = H.G
    if G.slice({"w": 0}).valuation() != float("inf"):
        raise MapError("G is not O(w): the map does not preserve the complex curve {w = 0}")
    Gz = G.diff("z")
    if Gz.valuation("w") < m + 1:
        raise MapError(f"G_z is not O(w^{m + 1}) (valuation {Gz.valuation('w')})")
    (a, _b), (_c, d) = H.linear_part()
    if a.is_zero() or d.is_zero():
        raise MapError("linear part is not triangular with invertible diagonal")
    if not d.im == 0:
        raise MapError("G_w(0) is not real")
    t = H.trunc
    z, w = ZW.gens(t)
    if a == Gaussian(1) and d == Gaussian(1):
        return NormalizedMap(H, target, FormalMap.identity(t))
    L = FormalMap(z.scale(a.inverse()), w.scale(d.inverse()))
    return NormalizedMap(L.after(H), transport(target, L), L)


# ---------------------------------------------------------------------------
# components of a normalized map


@dataclass(frozen=True)
class MapComponentExpansion:
    """f = Σ f_j z^j, g = Σ_{j>=1} g_j z^j, and g0, as series in w."""

    m: int
    f: Tuple[TruncatedSeries, ...]
    g: Tuple[TruncatedSeries, ...]  # g[0] is g_1
    g0: TruncatedSeries

    def __post_init__(self):
        for s in (self.f[0], self.f[1], self.g[0], self.g0):
            if not s.constant_term().is_zero():
                raise ReductionError("f0, f1, g1 and g0 must have zero constant term")

    @classmethod
    def of(cls, H: FormalMap, m: int, count: Optional[int] = None) -> "MapComponentExpansion":
        f, g, g0 = split_normalized(H, m)
        n = count if count is not None else f.trunc
        fs = tuple(f.slice({"z": j}) for j in range(0, n + 1))
        gs = tuple(g.slice({"z": j}) for j in range(1, max(n, 1) + 1))
        return cls(m, fs, gs, g0)

    @classmethod
    def initial(cls, m: int, f0, f1, g1, g0) -> "MapComponentExpansion":
        return cls(m, (f0, f1), (g1,), g0)


def y_vector(H: FormalMap, m: int) -> List[TruncatedSeries]:
    e = MapComponentExpansion.of(H, m, 1)
    f0, f1, g1, g0 = e.f[0], e.f[1], e.g[0], e.g0
    wm = lambda s: s.diff("w").multiply_by_power("w", m)
    return [f0, g0, f1, g1, wm(f0), g0.diff("w").multiply_by_power("w", 1), wm(f1), wm(g1)]


# ---------------------------------------------------------------------------
# the Y-system


@dataclass(frozen=True)
class YSystem:
    """w^m Y' = A(w, Y) with A given as an explicit series or as an exact evaluator.

    ``evaluator(Y)`` takes series in a ring whose first variable is w and
    returns A(w, Y) in the same ring.
    """

    m: int
    dim: int
    evaluator: Callable[[Sequence[TruncatedSeries]], List[TruncatedSeries]]
    A: Optional[Tuple[TruncatedSeries, ...]] = None
    label: str = ""

    @classmethod
    def explicit(cls, m: int, A: Sequence[TruncatedSeries], label: str = "") -> "YSystem":
        """A as series in (w, y1..yn)."""
        A = tuple(A)
        n = len(A[0].vars) - 1

        def ev(Y):
            R = Y[0].ring
            t = min(y.trunc for y in Y)
            args = [R.var("w", t)] + [y.truncate(t) for y in Y]
            return [compose(a, args) for a in A]

        return cls(m, n, ev, A, label)

    def __call__(self, Y: Sequence[TruncatedSeries]) -> List[TruncatedSeries]:
        if len(Y) != self.dim:
            raise ReductionError(f"expected {self.dim} components, got {len(Y)}")
        return self.evaluator(Y)

    def residual(self, Y: Sequence[TruncatedSeries]) -> List[TruncatedSeries]:
        """w^m Y' − A(w, Y)."""
        A = self(Y)
        out = []
        for y, a in zip(Y, A):
            lhs = y.diff("w").multiply_by_power("w", self.m)
            t = min(lhs.trunc, a.trunc)
            out.append(lhs.truncate(t) - a.truncate(t))
        return out

    def conjugate(self) -> "YSystem":
        """Ā(w, Z) = conj(A(w, conj Z)), the system solved by conjugated solutions."""
        ev = self.evaluator

        def cev(Z):
            return [a.conjugate() for a in ev([z.conjugate() for z in Z])]

        A = None if self.A is None else tuple(a.conjugate() for a in self.A)
        return YSystem(self.m, self.dim, cev, A, self.label + "-bar")

    def doubled(self) -> "YSystem":
        """The decoupled system for (Y, Z) with A and Ā on the diagonal."""
        c = self.conjugate()
        n = self.dim

        def dev(YZ):
            return self(YZ[:n]) + c(YZ[n:])

        return YSystem(self.m, 2 * n, dev, None, self.label + "-doubled")


def build_y_system(source: SingularODE, target: SingularODE) -> YSystem:
    if source.m != target.m:
        raise ReductionError(f"nonminimality orders differ: {source.m} vs {target.m}")
    ev = _YEvaluator(source.m, source.Phi, target.Phi)
    sysm = YSystem(source.m, 8, ev, None, "y-system")
    return sysm


class _YEvaluator:
    """A(w, Y) for the 8-dimensional system, computed exactly.

    Identities are evaluated as polynomials in z (degree <= 1) and ζ (degree
    <= 3) with univariate series coefficients.  The unknowns are found in
    three affine solves: (f2, g2) and (Z1, Z2) at z^0, then (W1, W2) at z^1;
    the latter need w^m f2' and w^m g2', obtained as tangent parts of the
    first solve along the vector field (w^m, A).
    """

    def __init__(self, m: int, Phi: TruncatedSeries, Phi_star: TruncatedSeries):
        self.m = m
        self.Phi = Phi
        self.Phi_star = Phi_star
        self.calls = 0

    def precision(self, t: int) -> int:
        return min(t, self.Phi.trunc - 4, self.Phi_star.trunc - 4)

    def _blocks(self, P: dict, wv, want):
        B = BlockPoly

        def two(p0, p1=None):
            d = {}
            if p0 is not None:
                d[(0, 0)] = p0
            if p1 is not None:
                d[(1, 0)] = p1
            return B(d, wv)

        j = ScaledJets(
            B.z(wv), B.scalar(wv), B.zeta(wv), self.m,
            two(P["f0"], P["f1"]), two(P["f1"], P["f2x2"]), two(P["f2x2"]),
            two(P["y5"], P["y7"]), two(P["y7"], P["U1x2"]), two(P["Z1"], P["W1"]),
            two(None, P["g1"]), two(P["g1"], P["g2x2"]), two(P["g2x2"]),
            two(None, P["y8"]), two(P["y8"], P["U2x2"]), two(None, P["W2"]),
            two(P["g0"]), two(P["y6"]), two(P["Z2"]),
        )
        self.calls += 1
        E = scaled_identity(j, self.Phi, self.Phi_star)
        return {k: E.block(*k) for k in want}

    @staticmethod
    def _parts(Y, proto):
        z = proto.zero()
        y1, y2, y3, y4, y5, y6, y7, y8 = Y
        return dict(f0=y1, g0=y2, f1=y3, g1=y4, y5=y5, y6=y6, y7=y7, y8=y8,
                    f2x2=z, g2x2=z, U1x2=z, U2x2=z, Z1=z, Z2=z, W1=z, W2=z)

    def _second_z0(self, Y, wv):
        """f2, g2 (ζ^0, ζ^1 at z^0) and Z1, Z2 (ζ^2, ζ^3 at z^0)."""
        one = wv.const(1)
        base = self._parts(Y, wv)
        want = [(0, 0), (0, 1), (0, 2), (0, 3)]
        b0 = self._blocks(base, wv, want)
        p1 = self._blocks(dict(base, f2x2=one.scale(2), Z1=one), wv, want)
        p2 = self._blocks(dict(base, g2x2=one.scale(2), Z2=one), wv, want)
        f2, g2 = _cramer(b0, p1, p2, [(0, 0), (0, 1)])
        Z1, Z2 = _cramer(b0, p1, p2, [(0, 2), (0, 3)])
        return f2, g2, Z1, Z2

    def __call__(self, Y: Sequence[TruncatedSeries]) -> List[TruncatedSeries]:
        m = self.m
        if any(len(y.vars) != 1 for y in Y):
            raise ReductionError("the Y-system evaluator takes series in w only")
        t = self.precision(min(y.trunc for y in Y))
        if t < 0:
            raise ReductionError("truncation too low to evaluate the Y-system")
        U = [USeries.of(y).cap(t) for y in Y]
        w = U[0].var()
        wm1 = w ** (m - 1)
        y1, y2, y3, y4, y5, y6, y7, y8 = U
        f2, g2, Z1, Z2 = self._second_z0(U, w)
        A = [y5, wm1 * y6, y7, y8, Z1 + (wm1 * y5).scale(m), Z2 + wm1 * y6]
        A7_0 = (wm1 * y7).scale(m)
        A8_0 = (wm1 * y8).scale(m)

        # tangents: e0 along (w^m, A) with A7, A8 at W = 0; e7, e8 along y7, y8
        vel = A + [A7_0, A8_0]
        Ux = [Tangent(u, [v, None, None]) for u, v in zip(U, vel)]
        Ux[6].tan[1] = w.const(1)
        Ux[7].tan[2] = w.const(1)
        wx = Tangent(w, [(w ** m).cap(t), None, None])
        f2x, g2x, _z1, _z2 = self._second_z0(Ux, wx)
        dF = [f2x.part(i) for i in range(3)]
        dG = [g2x.part(i) for i in range(3)]

        base = dict(self._parts(U, w), f2x2=f2.scale(2), g2x2=g2.scale(2), Z1=Z1, Z2=Z2)
        one, zero = w.const(1), w.zero()

        def probe(W1, W2):
            U1 = dF[0] + dF[1] * W1 + dF[2] * W2
            U2 = dG[0] + dG[1] * W1 + dG[2] * W2
            P = dict(base, W1=W1, W2=W2, U1x2=U1.scale(2), U2x2=U2.scale(2))
            return self._blocks(P, w, [(1, 2), (1, 3)])

        W1, W2 = _cramer(probe(zero, zero), probe(one, zero), probe(zero, one), [(1, 2), (1, 3)])
        A += [W1 + A7_0, W2 + A8_0]
        return [a.cap(t).to_series(W_RING) for a in A]


def _cramer(base, p1, p2, rows):
    """Solve the affine 2x2 system rows(x) = 0 from values at x = 0, e1, e2."""
    r0, r1 = rows
    a11 = p1[r0] - base[r0]
    a12 = p2[r0] - base[r0]
    a21 = p1[r1] - base[r1]
    a22 = p2[r1] - base[r1]
    det = a11 * a22 - a12 * a21
    if det.constant().is_zero():
        raise ReductionError("Cramer system degenerate at the origin")
    inv = det.inv()
    b1, b2 = -base[r0], -base[r1]
    return (b1 * a22 - a12 * b2) * inv, (a11 * b2 - a21 * b1) * inv


def _cramer_series(base, p1, p2, rows, t):
    r0, r1 = rows
    a11, a12 = p1[r0] - base[r0], p2[r0] - base[r0]
    a21, a22 = p1[r1] - base[r1], p2[r1] - base[r1]
    det = a11 * a22 - a12 * a21
    if det.constant_term().is_zero():
        raise ReductionError("Cramer system degenerate at the origin")
    inv = det.invert_unit()
    b1, b2 = -base[r0], -base[r1]
    return ((b1 * a22 - a12 * b2) * inv).truncate(t), ((a11 * b2 - a21 * b1) * inv).truncate(t)


# ---------------------------------------------------------------------------
# formal solutions


@dataclass
class FormalSolution:
    Y: List[TruncatedSeries]
    residual: List[TruncatedSeries] = field(default_factory=list)
    hinted_degrees: List[int] = field(default_factory=list)

    @property
    def trunc(self) -> int:
        return min(r.trunc for r in self.residual) if self.residual else min(y.trunc for y in self.Y)

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residual)


def linearization(sysm: YSystem) -> List[List[Gaussian]]:
    """L = ∂A/∂Y at (w, Y) = (0, 0), read off at degree 1 from A(w, w·e_j) − A(w, 0)."""
    n = sysm.dim
    zero = W_RING.zero(1)
    base = sysm([zero] * n)
    L = [[Gaussian(0)] * n for _ in range(n)]
    for j in range(n):
        A = sysm([W_RING.var("w", 1) if i == j else zero for i in range(n)])
        for i in range(n):
            L[i][j] = A[i].coefficient((1,)) - base[i].coefficient((1,))
    return L


def _coeffs(s: TruncatedSeries, n: int) -> Gaussian:
    return s.coefficient((n,))


def _solve_lin(M: List[List[Gaussian]], b: List[Gaussian]) -> Optional[List[Gaussian]]:
    try:
        inv = _gauss_solve(M)
    except SeriesError:
        return None
    return [sum((inv[i][j] * b[j] for j in range(len(b))), Gaussian(0)) for i in range(len(b))]


def solve_formal_y(sysm: YSystem, trunc: int, hint: Optional[Sequence[TruncatedSeries]] = None) -> FormalSolution:
    """Degree-by-degree solution of w^m Y' = A(w, Y) with Y(0) = 0.

    At degree n the unknown Y_n enters through the linear part L: (n − L)Y_n for
    m = 1, L Y_n for m >= 2.  A singular solve is a resonance; with ``hint``
    the hinted coefficients are used there after checking they satisfy the
    degree-n equation.
    """
    n_dim, m = sysm.dim, sysm.m
    L = linearization(sysm)
    coeffs = [[Gaussian(0)] * (trunc + 1) for _ in range(n_dim)]
    hinted = []

    def series(upto: int) -> List[TruncatedSeries]:
        return [W_RING.from_dict({(d,): c[d] for d in range(upto + 1) if c[d]}, upto) for c in coeffs]

    for n in range(1, trunc + 1):
        Y = series(n)
        A = sysm(Y)
        if A[0].trunc < n:
            raise ReductionError(f"system precision {A[0].trunc} below requested truncation {n}")
        a_n = [_coeffs(a, n) for a in A]
        if m == 1:
            M = [[(Gaussian(n) if i == j else Gaussian(0)) - L[i][j] for j in range(n_dim)] for i in range(n_dim)]
            rhs = a_n
        else:
            M = [row[:] for row in L]
            k = n - m + 1
            rhs = [(coeffs[i][k] * k if k >= 1 else Gaussian(0)) - a_n[i] for i in range(n_dim)]
        sol = _solve_lin(M, rhs)
        if sol is None:
            if hint is None:
                raise Resonance(n)
            sol = [_coeffs(h, n) if h.trunc >= n else Gaussian(0) for h in hint]
            lhs = [sum((M[i][j] * sol[j] for j in range(n_dim)), Gaussian(0)) for i in range(n_dim)]
            if lhs != rhs:
                raise Resonance(n, f"resonance at degree {n} and the hinted coefficients do not solve it")
            hinted.append(n)
        for i in range(n_dim):
            coeffs[i][n] = sol[i]
    Y = series(trunc)
    res = sysm.residual(Y)
    return FormalSolution(Y, res, hinted)


# ---------------------------------------------------------------------------
# reconstruction of the map from its initial components


def cauchy_reconstruct(source: SingularODE, target: SingularODE, params: MapComponentExpansion,
                       trunc: int) -> FormalMap:
    """Solve the ζ^0, ζ^1 identities order by order in z for f_{n+2}, g_{n+2}."""
    m = source.m
    if target.m != m or params.m != m:
        raise ReductionError("nonminimality orders differ")
    t = trunc + 2
    z, w = ZW.gens(t)
    lift = lambda s: _pad(compose(s, [w]), t)
    f = lift(params.f[0]) + z * lift(params.f[1])
    g = z * lift(params.g[0])
    g0 = _pad(params.g0, t)
    Zw = SeriesRing(["z", "w"])
    found_f, found_g = [], []
    for n in range(0, trunc - 1):
        zn2 = z ** (n + 2)

        def ident(df, dg):
            E = scaled_identity(jets_of(f + zn2 * df, g + zn2 * dg, g0, m), source.Phi, target.Phi)
            return {b: E.slice({"zeta": b}).slice({"z": n}) for b in (0, 1)}

        one, zero = Zw.one(t), Zw.zero(t)
        b0 = ident(zero, zero)
        if b0[0].trunc < trunc - n - 2:
            raise ReductionError("ODE truncation too low for the requested reconstruction")
        p1 = ident(one, zero)
        p2 = ident(zero, one)
        tt = min(b0[0].trunc, b0[1].trunc)
        fn, gn = _cramer_series(b0, p1, p2, [0, 1], tt)
        found_f.append(fn)
        found_g.append(gn)
        f = f + zn2 * lift(fn)
        g = g + zn2 * lift(gn)
    wv = ZW.var("w", trunc)
    F = (z + f).truncate(trunc)
    G = (w + w * compose(params.g0, [w]) + w ** m * g).truncate(trunc) if trunc >= 1 else wv
    return FormalMap(F, G, normalized=True)
