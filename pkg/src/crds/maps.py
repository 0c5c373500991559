"""Formal holomorphic maps (F, G) of (C^2, 0)."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .series import Gaussian, SeriesError, SeriesRing, TruncatedSeries, compose, solve_implicit

ZW = SeriesRing(["z", "w"])


class MapError(SeriesError):
    pass


@dataclass(frozen=True)
class FormalMap:
    """H = (F, G) with F, G series in (z, w) vanishing at the origin."""

    F: TruncatedSeries
    G: TruncatedSeries
    normalized: bool = False

    def __post_init__(self):
        if self.F.ring != self.G.ring:
            raise MapError("F and G must share a ring")
        if not self.F.constant_term().is_zero() or not self.G.constant_term().is_zero():
            raise MapError("map must fix the origin")

    @property
    def ring(self) -> SeriesRing:
        return self.F.ring

    @property
    def trunc(self) -> int:
        return min(self.F.trunc, self.G.trunc)

    @classmethod
    def identity(cls, trunc: int, ring: SeriesRing = ZW) -> "FormalMap":
        z, w = ring.gens(trunc)
        return cls(z, w)

    @classmethod
    def from_dicts(cls, f: dict, g: dict, trunc: int, ring: SeriesRing = ZW) -> "FormalMap":
        return cls(ring.from_dict(f, trunc), ring.from_dict(g, trunc))

    def truncate(self, t: int) -> "FormalMap":
        return FormalMap(self.F.truncate(t), self.G.truncate(t), self.normalized)

    def linear_part(self) -> Tuple[Tuple[Gaussian, Gaussian], Tuple[Gaussian, Gaussian]]:
        n = len(self.ring.vars)
        e = lambda i: tuple(int(j == i) for j in range(n))
        return ((self.F.coefficient(e(0)), self.F.coefficient(e(1))),
                (self.G.coefficient(e(0)), self.G.coefficient(e(1))))

    def jacobian(self) -> TruncatedSeries:
        z, w = self.ring.vars
        return (self.F.diff(z) * self.G.diff(w) - self.F.diff(w) * self.G.diff(z))

    def is_invertible(self) -> bool:
        (a, b), (c, d) = self.linear_part()
        return not (a * d - b * c).is_zero()

    def after(self, inner: "FormalMap") -> "FormalMap":
        """The composition self ∘ inner."""
        args = [inner.F, inner.G]
        return FormalMap(compose(self.F, args), compose(self.G, args))

    def __matmul__(self, inner: "FormalMap") -> "FormalMap":
        return self.after(inner)

    def inverse(self) -> "FormalMap":
        if not self.is_invertible():
            raise MapError("linear part is singular")
        z, w = self.ring.vars
        big = SeriesRing([z, w, "_a", "_b"])
        t = self.trunc
        a, b = big.var("_a", t), big.var("_b", t)
        Fab = compose(self.F, [a, b])
        Gab = compose(self.G, [a, b])
        sol = solve_implicit([Fab - big.var(z, t), Gab - big.var(w, t)], 2)
        return FormalMap(sol[0], sol[1])

    def conjugate(self) -> "FormalMap":
        return FormalMap(self.F.conjugate(), self.G.conjugate(), self.normalized)

    def __eq__(self, o):
        return isinstance(o, FormalMap) and self.F == o.F and self.G == o.G

    def __hash__(self):
        return hash((self.F, self.G))

    def to_text(self) -> str:
        return "F:\n" + self.F.to_text() + "\nG:\n" + self.G.to_text()


def _small_rational(rng: random.Random, size: int = 3, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-size, size), rng.randint(1, den))


def random_gaussian(rng: random.Random, size: int = 3, den: int = 3, real: bool = False) -> Gaussian:
    re = _small_rational(rng, size, den)
    im = Fraction(0) if real else _small_rational(rng, size, den)
    return Gaussian(re, im)


def random_series(rng: random.Random, ring: SeriesRing, trunc: int, lo: int = 2, hi: Optional[int] = None,
                  density: float = 0.5, real: bool = False, size: int = 3, den: int = 3) -> TruncatedSeries:
    """Random sparse series with terms in degrees lo..hi."""
    hi = trunc if hi is None else min(hi, trunc)
    out = {}
    n = len(ring.vars)

    def exps(d, k):
        if k == 1:
            yield (d,)
            return
        for e in range(d, -1, -1):
            for rest in exps(d - e, k - 1):
                yield (e,) + rest

    for d in range(lo, hi + 1):
        for e in exps(d, n):
            if ring.grade(e) != d:
                continue
            if rng.random() < density:
                c = random_gaussian(rng, size, den, real)
                if not c.is_zero():
                    out[e] = c
    return ring.from_dict(out, trunc)


def random_invertible_map(rng: random.Random, trunc: int, degree: int = 3, tangent: bool = True,
                          density: float = 0.4) -> FormalMap:
    """Random polynomial map of (C^2, 0) with invertible linear part.

    With ``tangent`` the map preserves the tangent plane Im w = 0 at 0:
    G = r·w + O(2) with r real and nonzero, so transported hypersurfaces keep
    the form w = τ + O(2).
    """
    z, w = ZW.gens(trunc)
    a = random_gaussian(rng)
    while a.is_zero():
        a = random_gaussian(rng)
    r = _small_rational(rng)
    while r == 0:
        r = _small_rational(rng)
    b = random_gaussian(rng)
    F = z.scale(a) + w.scale(b) + random_series(rng, ZW, trunc, 2, degree, density)
    if tangent:
        G = w.scale(r) + random_series(rng, ZW, trunc, 2, degree, density)
    else:
        G = w.scale(random_gaussian(rng)) + z.scale(random_gaussian(rng)) + random_series(rng, ZW, trunc, 2, degree, density)
        if not FormalMap(F, G).is_invertible():
            return random_invertible_map(rng, trunc, degree, tangent, density)
    return FormalMap(F, G)
