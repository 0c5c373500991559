"""Borel–Padé–Laplace summation of the formal solution of w² y' = w − y.

Prints the Gevrey fit, the chosen sectors, the sum on a grid against the
optimally truncated series, the ODE residual and the asymptotic check.

    python3 scripts/euler_sum.py --terms 30
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from crds.corpus import euler_rhs, euler_system
from crds.reduction import solve_formal_y
from crds.resummation import (FormalSeries1D, SummationProblem, gevrey_fit, k_sum, ode_residual, select_sectors,
                              verify_gevrey_asymptotics)


@dataclass
class Config:
    terms: int = 30
    points: int = 10
    zmax: float = 0.2


def optimal_truncation(series: FormalSeries1D, z: complex) -> complex:
    c = series.numeric()
    t = np.abs(c * np.power(abs(z), np.arange(len(c))))
    n = int(np.argmin(t[1:])) + 1
    return series.partial_sum(z, n)


def run(cfg: Config) -> bool:
    sol = solve_formal_y(euler_system(cfg.terms), cfg.terms)
    series = FormalSeries1D.from_series(sol.Y[0])
    g = gevrey_fit(series)
    print(f"formal solution: {cfg.terms} exact coefficients, Gevrey s = {g.s:.3f} (B = {g.B:.3f})")
    sec = select_sectors([math.pi], [1.0])
    S = sec.plus[0]
    print(f"sector S+: direction {sec.tau_plus:.3f}, opening {S.opening:.3f}")
    grid = [cfg.zmax * (j + 1) / cfg.points for j in range(cfg.points)]
    out = k_sum(SummationProblem(series, direction=sec.tau_plus, intervals=(S,)), grid, derivative=True)
    res = ode_residual(out, 2, euler_rhs)
    print(f"{'z':>6} {'k-sum':>20} {'optimal truncation':>20} {'ODE residual':>13}")
    for z, v, r in zip(grid, out.values, res):
        print(f"{z:6.3f} {v.real:20.15f} {optimal_truncation(series, z).real:20.15f} {r:13.2e}")
    rep = verify_gevrey_asymptotics(out, series, 1.0)
    print(f"Gevrey asymptotics: pass = {rep.passed}, C = {rep.C:.4f}, Poincaré = {rep.poincare}")
    return rep.passed and float(np.max(res)) < 1e-6


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=Config.terms)
    ap.add_argument("--points", type=int, default=Config.points)
    ap.add_argument("--zmax", type=float, default=Config.zmax)
    a = ap.parse_args()
    raise SystemExit(0 if run(Config(a.terms, a.points, a.zmax)) else 1)
