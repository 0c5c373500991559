"""Named hypersurfaces, equivalent pairs and a scalar singular ODE used by
tests, scripts and the CLI."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .exceptional import adapt_coordinates, parameter_blow_up
from .hypersurface import (ComplexDefiningSeries, complex_from_real, invariants, real_series, transport,
                           transport_normal)
from .maps import ZW, FormalMap, random_invertible_map
from .reduction import YSystem, normalize_map
from .segre_ode import associate_high_order, associate_nondegenerate, associate_nonminimal
from .series import Gaussian, SeriesRing


@dataclass(frozen=True)
class Kind:
    kind: str  # nondegenerate | minimal | nonminimal | high_order | exceptional
    m: int = 0
    k: int = 1


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    terms: Dict[Tuple[int, int, int], object]
    kind: Kind

    def hypersurface(self, trunc: int) -> ComplexDefiningSeries:
        return complex_from_real(real_series(self.terms, trunc))


CORPUS: Dict[str, CorpusEntry] = {
    e.name: e
    for e in [
        CorpusEntry("heisenberg", {(1, 1, 0): 1}, Kind("nondegenerate")),
        CorpusEntry("generic_m1", {(1, 1, 1): 1}, Kind("nonminimal", 1)),
        CorpusEntry("generic_m2", {(1, 1, 2): 1}, Kind("nonminimal", 2)),
        CorpusEntry("generic_m3", {(1, 1, 3): 1}, Kind("nonminimal", 3)),
        CorpusEntry("exceptional_m1", {(2, 2, 1): 1}, Kind("exceptional", 1, 0)),
        CorpusEntry("exceptional_m2", {(2, 2, 2): 1}, Kind("exceptional", 2, 0)),
        CorpusEntry("mixed_m1", {(1, 1, 1): 1, (2, 1, 1): Fraction(1, 2), (1, 2, 1): Fraction(1, 2), (2, 2, 2): 3},
                    Kind("nonminimal", 1)),
        CorpusEntry("mixed_k2", {(2, 1, 2): 1, (1, 2, 2): 1, (1, 1, 3): 1}, Kind("high_order", 2, 2)),
    ]
}

# generic nonminimal entries with k = 1, used for the reduction
GENERIC = ("generic_m1", "generic_m2", "mixed_m1")


def classify(T: ComplexDefiningSeries) -> Kind:
    inv = invariants(T)
    if inv.levi_nondegenerate:
        return Kind("nondegenerate")
    if inv.minimal:
        return Kind("minimal")
    if inv.generic_nonminimal:
        return Kind("nonminimal", inv.m, 1)
    if inv.k is not None:
        return Kind("high_order", inv.m, inv.k)
    return Kind("exceptional", inv.m, 0)


def segre_trunc(kind: Kind, N: int) -> int:
    """Input truncation giving Segre verification to order N."""
    return {"nondegenerate": N + 2, "nonminimal": N + 1 + kind.m, "high_order": N + 4}.get(kind.kind, N + 6)


def pair_trunc(kind: Kind, N: int) -> int:
    """Input truncation for reduction and reconstruction to order N."""
    return N + 7 + kind.m if kind.k == 1 else N + 9


def segre_system(T: ComplexDefiningSeries, kind: Kind, seed: int = 0):
    """(system, Segre data) for verify_segre_solutions.

    Exceptional hypersurfaces go through adapted coordinates and the
    parameter blow-up, which turns them into a high-order family of index k.
    """
    if kind.kind == "nondegenerate":
        return associate_nondegenerate(T), T
    if kind.kind == "nonminimal":
        return associate_nonminimal(T, kind.m), T
    if kind.kind == "high_order":
        return associate_high_order(T, kind.k, kind.m), T
    if kind.kind == "minimal":
        raise ValueError("no associated system for a Levi-degenerate minimal hypersurface")
    rep = adapt_coordinates(T, seed=seed)
    pb = parameter_blow_up(rep.result.T)
    return associate_high_order(pb.family, rep.result.k, pb.p + 1), pb.family


def corpus_segre_system(name: str, N: int = 8, seed: int = 0):
    e = CORPUS[name]
    return segre_system(e.hypersurface(segre_trunc(e.kind, N)), e.kind, seed)


@dataclass(frozen=True)
class EquivalentPair:
    """source, target = H(source) and the map H between them."""

    source: ComplexDefiningSeries
    target: ComplexDefiningSeries
    H: FormalMap
    kind: Kind


def make_pair(T: ComplexDefiningSeries, H: FormalMap, kind: Kind) -> EquivalentPair:
    """Transport T through H into normal coordinates and normalize the map.

    Generic nonminimal pairs get the normal form used by the reduction;
    otherwise only the linear part of the map is scaled to the identity.
    """
    T2, H2 = transport_normal(T, H)
    if kind.kind == "nonminimal":
        nm = normalize_map(H2, T, T2)
        return EquivalentPair(T, nm.target, nm.H, kind)
    (a, _), (_, d) = H2.linear_part()
    z, w = ZW.gens(H2.trunc)
    L = FormalMap(z.scale(a.inverse()), w.scale(d.inverse()))
    return EquivalentPair(T, transport(T2, L), L.after(H2), kind)


def equivalent_pair(name: str, N: int = 10, seed: int = 3) -> EquivalentPair:
    """A corpus hypersurface transported through a seeded random map."""
    e = CORPUS[name]
    t = pair_trunc(e.kind, N)
    H = random_invertible_map(random.Random(seed), t, degree=2)
    return make_pair(e.hypersurface(t), H, e.kind)


# scalar singular ODE w^2 y' = w − y; its formal solution is the Euler series
SCALAR_RING = SeriesRing(["w", "y"])


def euler_system(trunc: int = 32) -> YSystem:
    A = SCALAR_RING.from_dict({(1, 0): Gaussian(1), (0, 1): Gaussian(-1)}, trunc)
    return YSystem.explicit(2, [A], "euler")


def euler_rhs(w: complex, y: complex) -> complex:
    return w - y
