"""Elimination of Segre parameters: the ODE (systems) attached to a hypersurface.

The Segre family is ``w = W(z, a, b)``; for a hypersurface in normal
coordinates ``W = Θ(z, a, b)``.  Solving the first jets for ``(a, b)`` and
substituting into the next derivative gives the associated equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .hypersurface import ComplexDefiningSeries, invariants
from .series import (
    INF, DivisionObstruction, Gaussian, SeriesError, SeriesRing, SingularJacobian,
    TruncatedSeries, compose, solve_implicit,
)

FAMILY_RING = SeriesRing(["z", "a", "b"])
JET2 = SeriesRing(["z", "w", "w1"])
ZWZ = SeriesRing(["z", "w", "zeta"])
SAMPLE_RING = SeriesRing(["z", "s"])


class DegenerateElimination(SeriesError):
    pass


@dataclass(frozen=True)
class SegreFamily:
    """Graphing family w = W(z, a, b) with W − b divisible by b^mu."""

    W: TruncatedSeries
    mu: int = 0
    label: str = ""

    def __post_init__(self):
        if self.W.ring != FAMILY_RING:
            raise SeriesError(f"Segre family must live in {FAMILY_RING}")

    @property
    def trunc(self) -> int:
        return self.W.trunc

    @classmethod
    def of(cls, T: ComplexDefiningSeries, mu: Optional[int] = None) -> "SegreFamily":
        W = T.Theta.rename({"chi": "a", "tau": "b"})
        if mu is None:
            inv = invariants(T)
            mu = inv.m or 0
        return cls(W, mu, "theta")


def _family(src: Union[ComplexDefiningSeries, SegreFamily], mu: Optional[int] = None) -> SegreFamily:
    if isinstance(src, SegreFamily):
        return src
    return SegreFamily.of(src, mu)


@dataclass(frozen=True)
class SecondOrderODE:
    Phi: TruncatedSeries  # in (z, w, w1)

    @property
    def trunc(self) -> int:
        return self.Phi.trunc


@dataclass(frozen=True)
class SingularODE:
    m: int
    Phi: TruncatedSeries  # in (z, w, zeta); w'' = w^m Phi(z, w, w'/w^m)

    @property
    def trunc(self) -> int:
        return self.Phi.trunc


@dataclass(frozen=True)
class HighOrderSystem:
    """w^(j) = Phi_list[j-1](z, w, ζ) for j < k and w^(k+1) = Phi, with ζ = w^(k)/w^mu."""

    k: int
    mu: int
    Phi_list: Tuple[TruncatedSeries, ...]
    Phi: TruncatedSeries
    alpha: Gaussian = Gaussian(0)

    @property
    def trunc(self) -> int:
        return min([self.Phi.trunc] + [p.trunc for p in self.Phi_list])

    def entries(self) -> List[Tuple[int, TruncatedSeries]]:
        return [(j + 1, p) for j, p in enumerate(self.Phi_list)] + [(self.k + 1, self.Phi)]

    def property_star(self) -> Gaussian:
        """Coefficient of z^0 w^mu ζ^k in Φ_1 (Φ_1 = Φ when k = 1)."""
        phi1 = self.Phi_list[0] if self.k >= 2 else self.Phi
        if self.mu + self.k > phi1.trunc:
            raise SeriesError("truncation too low to read the Property (*) coefficient")
        return phi1.coefficient((0, self.mu, self.k))

    def factorization_holds(self) -> bool:
        try:
            for _j, p in self.entries():
                p.divide_by_power("w", self.mu).divide_by_power("zeta", 1)
        except DivisionObstruction:
            return False
        return True


# ---------------------------------------------------------------------------


def _dz(s: TruncatedSeries, k: int) -> TruncatedSeries:
    for _ in range(k):
        s = s.diff("z")
    return s


def associate_nondegenerate(T: Union[ComplexDefiningSeries, SegreFamily]) -> SecondOrderODE:
    """w'' = Φ(z, w, w') satisfied by every Segre graph of a Levi-nondegenerate M."""
    fam = _family(T, 0)
    W = fam.W
    t = W.trunc - 1
    big = SeriesRing(["z", "w", "w1", "a", "b"])
    z, w, w1, a, b = big.gens(t)
    args = [z, a, b]
    eqs = [w - compose(W.truncate(t), args), w1 - compose(W.diff("z"), args)]
    try:
        A, B = solve_implicit(eqs, 2)
    except SingularJacobian as e:
        raise DegenerateElimination("Levi-degenerate at 0: cannot solve for the Segre parameters") from e
    zz = JET2.var("z", A.trunc)
    Phi = compose(_dz(W, 2), [zz, A, B])
    return SecondOrderODE(Phi)


def _eliminate(fam: SegreFamily, k: int, mu: int):
    """Solve w = W, ζ·U^mu = K for (a, b), with K = ∂_z^k W / b^mu, U = W / b."""
    W = fam.W
    try:
        K = _dz(W, k).divide_by_power("b", mu)
        U = W.divide_by_power("b", 1)
    except DivisionObstruction as e:
        raise DivisionObstruction(f"Segre family does not factor with mu={mu}: {e}") from e
    alpha = K.coefficient((0, 1, 0))
    if alpha.is_zero():
        raise DegenerateElimination(f"coefficient of a·b^{mu} in the {k}-th z-derivative vanishes")
    t = K.trunc
    big = SeriesRing(["z", "w", "zeta", "a", "b"])
    z, w, zeta, a, b = big.gens(t)
    args = [z, a, b]
    Wab = compose(W.truncate(t), args)
    Kab = compose(K, args)
    Uab = compose(U.truncate(t), args)
    eqs = [w - Wab, zeta * Uab ** mu - Kab]
    A, B = solve_implicit(eqs, 2)
    return A, B, alpha


def associate_high_order(T: Union[ComplexDefiningSeries, SegreFamily], k: Optional[int] = None,
                         mu: Optional[int] = None, check: bool = True) -> HighOrderSystem:
    """High-order system w^(j) = Φ_j(z, w, w^(k)/w^mu), j = 1..k−1, k+1."""
    fam = _family(T, mu)
    if mu is None:
        mu = fam.mu
    if k is None:
        if isinstance(T, ComplexDefiningSeries):
            k = invariants(T).k
        if k is None:
            raise DegenerateElimination("k not given and not computable from the hypersurface")
    if mu < 1 or k < 1:
        raise SeriesError("need k >= 1 and mu >= 1")
    A, B, alpha = _eliminate(fam, k, mu)
    zz = ZWZ.var("z", A.trunc)
    W = fam.W
    phis = [compose(_dz(W, j), [zz, A, B]) for j in range(1, k)]
    Phi = compose(_dz(W, k + 1), [zz, A, B])
    sysm = HighOrderSystem(k, mu, tuple(phis), Phi, alpha)
    if check and not sysm.factorization_holds():
        raise DivisionObstruction("associated system entries are not O(w^mu ζ)")
    return sysm


def associate_nonminimal(T: Union[ComplexDefiningSeries, SegreFamily], m: Optional[int] = None) -> SingularODE:
    """w'' = w^m Φ(z, w, w'/w^m) for a generic m-nonminimal hypersurface."""
    if m is None:
        if isinstance(T, ComplexDefiningSeries):
            inv = invariants(T)
            if not inv.generic_nonminimal:
                raise DegenerateElimination("hypersurface is not generic nonminimal (ord Θ11 != m)")
            m = inv.m
        else:
            m = T.mu
    sysm = associate_high_order(T, 1, m)
    Phi = sysm.Phi.divide_by_power("w", m)
    if Phi.valuation("zeta") < 1:
        raise DivisionObstruction("Φ is not O(ζ)")
    return SingularODE(m, Phi)


def high_order_from_singular(ode: SingularODE) -> HighOrderSystem:
    return HighOrderSystem(1, ode.m, (), ode.Phi.multiply_by_power("w", ode.m))


# ---------------------------------------------------------------------------
# verification on sampled Segre graphs


@dataclass
class SampleResidual:
    a: Gaussian
    b: Gaussian
    residuals: List[TruncatedSeries]
    trunc: int

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals)

    def valuations(self) -> List[object]:
        return [r.valuation() for r in self.residuals]


@dataclass
class SegreReport:
    samples: List[SampleResidual] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.samples) and all(s.ok for s in self.samples)

    @property
    def trunc(self) -> int:
        return min(s.trunc for s in self.samples) if self.samples else -1

    def as_dict(self) -> dict:
        def val(v):
            return "inf" if v == INF else int(v)
        return {
            "pass": self.passed,
            "certified_trunc": self.trunc,
            "samples": [
                {"a": str(s.a), "b": str(s.b), "residual_valuations": [val(v) for v in s.valuations()]}
                for s in self.samples
            ],
        }


def sample_graph(fam: SegreFamily, a: Gaussian, b: Gaussian) -> TruncatedSeries:
    """w(z, s) = W(z, a·s, b·s)."""
    t = fam.trunc
    z, s = SAMPLE_RING.gens(t)
    return compose(fam.W, [z, s.scale(a), s.scale(b)])


def _zeta_of(w: TruncatedSeries, wk: TruncatedSeries, mu: int) -> TruncatedSeries:
    num = wk.divide_by_power("s", mu)
    den = w.divide_by_power("s", 1)
    return num * den.invert_unit() ** mu


def verify_segre_solutions(system, T: Union[ComplexDefiningSeries, SegreFamily],
                           samples: Sequence[Tuple[object, object]]) -> SegreReport:
    """Substitute sampled Segre graphs into the system; residuals are exact series in (z, s)."""
    if isinstance(system, SecondOrderODE):
        fam = _family(T, 0)
    elif isinstance(system, SingularODE):
        fam = _family(T, system.m)
    else:
        fam = _family(T, system.mu)
    report = SegreReport()
    for a, b in samples:
        a, b = Gaussian.of(a), Gaussian.of(b)
        w = sample_graph(fam, a, b)
        res: List[TruncatedSeries] = []
        if isinstance(system, SecondOrderODE):
            w1 = w.diff("z")
            rhs = compose(system.Phi, [SAMPLE_RING.var("z", w1.trunc), w.truncate(w1.trunc), w1])
            res.append(w1.diff("z") - rhs)
        else:
            if b.is_zero():
                raise SeriesError("singular systems need samples with b != 0")
            if isinstance(system, SingularODE):
                k, mu = 1, system.m
                entries = [(2, system.Phi.multiply_by_power("w", mu))]
            else:
                k, mu = system.k, system.mu
                entries = system.entries()
            wk = _dz(w, k)
            zeta = _zeta_of(w, wk, mu)
            t = zeta.trunc
            args = [SAMPLE_RING.var("z", t), w.truncate(t), zeta]
            for j, phi in entries:
                res.append(_dz(w, j) - compose(phi, args))
        tr = min(r.trunc for r in res)
        report.samples.append(SampleResidual(a, b, [r.truncate(tr) for r in res], tr))
    return report


def default_samples(count: int = 10, seed: int = 0) -> List[Tuple[Gaussian, Gaussian]]:
    import random
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a = Gaussian(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        b = Gaussian(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        if not b.is_zero() and (a, b) not in out:
            out.append((a, b))
    return out


def check_1k_symmetry(T: ComplexDefiningSeries, k: int) -> bool:
    """ord Θ_k1 = ord Θ_1k (a consequence of the reality condition)."""
    return T.slice(k, 1).valuation() == T.slice(1, k).valuation()
