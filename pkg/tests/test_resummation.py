import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad, solve_ivp
from scipy.special import exp1

from crds.corpus import euler_rhs, euler_system
from crds.reduction import solve_formal_y
from crds.resummation import (FormalSeries1D, PoleOnRay, ResummationError, Sector, SummationProblem,
                              borel_transform, default_degrees, gevrey_fit, gevrey_fit_multi, inverse_borel, k_sum, laplace_sum,
                              ode_residual, pade_continue, ramify, select_sectors, unramify,
                              verify_gevrey_asymptotics)
from crds.series import Gaussian


def quad_oracle(z):
    """∫_0^∞ e^{−t/z}/(1 + t) dt by adaptive quadrature."""
    return quad(lambda t: math.exp(-t / z) / (1 + t), 0, math.inf, epsabs=1e-15, epsrel=1e-13)[0]


def test_oracle_consistency():
    for z in (0.05, 0.1, 0.2):
        assert abs(quad_oracle(z) - math.exp(1 / z) * exp1(1 / z)) < 1e-12


def test_gevrey_fit_examples():
    assert abs(gevrey_fit(FormalSeries1D([1] * 30)).s) <= 0.05
    assert abs(gevrey_fit(FormalSeries1D.euler(30)).s - 1) <= 0.1
    sq = FormalSeries1D([math.factorial(n) ** 2 for n in range(30)])
    assert abs(gevrey_fit(sq).s - 2) <= 0.1
    with pytest.raises(ResummationError):
        gevrey_fit(FormalSeries1D([1, 2, 3]))


def test_gevrey_bound_holds():
    e = FormalSeries1D.euler(30)
    est = gevrey_fit(e)
    c = np.abs(e.numeric())
    assert all(c[n] <= est.bound(n) * (1 + 1e-9) for n in range(len(c)))


def test_gevrey_fit_two_variables():
    # (1, 2) multi Gevrey: n! m!^2 2^n 3^m, total degree <= 16
    c = {(n, m): math.factorial(n) * math.factorial(m) ** 2 * 2 ** n * 3 ** m
         for n in range(17) for m in range(17) if n + m <= 16}
    ex, ey = gevrey_fit_multi(c)
    assert abs(ex.s - 1) <= 0.1 and abs(ey.s - 2) <= 0.1
    for (n, m), v in c.items():
        assert v <= ex.A * ex.B ** n * math.gamma(1 + ex.s * n) * ey.B ** m * math.gamma(1 + ey.s * m) * (1 + 1e-9)
    # convergent in both variables
    ex, ey = gevrey_fit_multi({(n, m): 1 for n in range(10) for m in range(10)})
    assert ex.s <= 0.05 and ey.s <= 0.05
    with pytest.raises(ResummationError):
        gevrey_fit_multi({(0, 0): 1, (1, 0): 1})


def test_borel_euler():
    B = borel_transform(FormalSeries1D.euler(12))
    # coefficients (−1)^{n−1}/n: log(1 + ζ), whose derivative is Σ (−ζ)^{n−1} = 1/(1 + ζ)
    assert B.exact
    assert list(B.coeffs[1:]) == [Gaussian(Fraction((-1) ** (n - 1), n)) for n in range(1, 12)]
    deriv = [B.gaussian()[n] * n for n in range(1, 12)]
    assert deriv == [Gaussian((-1) ** (n - 1)) for n in range(1, 12)]


def test_borel_zero():
    assert all(c.is_zero() for c in borel_transform(FormalSeries1D([0] * 6)).gaussian())


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=15), st.sampled_from([1, 2, 3]))
def test_borel_round_trip(cs, k):
    s = FormalSeries1D(cs)
    back = inverse_borel(borel_transform(s, k), k)
    assert np.allclose(back.numeric(), s.numeric(), rtol=1e-12, atol=0)
    if k == 1:
        assert back.gaussian() == s.gaussian()


def test_pade_exact_rational():
    s = FormalSeries1D([(-1) ** n for n in range(12)])
    P = pade_continue(s, 5, 6)
    assert (P.L, P.M) == (0, 1) and P.reduced
    assert len(P.poles) == 1 and abs(P.poles[0] + 1) < 1e-14


def test_pade_entire():
    s = FormalSeries1D([Fraction(1, math.factorial(n)) for n in range(20)])
    P = pade_continue(s, *default_degrees(20))
    assert min(abs(p) for p in P.poles) > 5


def test_pade_polynomial():
    P = pade_continue(FormalSeries1D([1, 2, 3, 0, 0, 0, 0]), 3, 3)
    assert P.M == 0 and P.poles == ()


def test_pade_needs_coefficients():
    with pytest.raises(ResummationError):
        pade_continue(FormalSeries1D([1, 2]), 2, 2)


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 4))
def test_pade_recovers_rational(a, b, c):
    # 1/((1 − z/a)(1 + z/b)) + c
    r1, r2 = Fraction(1, a), Fraction(-1, b)
    coeffs = [sum(r1 ** i * r2 ** (n - i) for i in range(n + 1)) + (c if n == 0 else 0) for n in range(12)]
    P = pade_continue(FormalSeries1D(coeffs), 2, 2)
    assert sorted(round(p.real, 9) for p in P.poles) == sorted([float(a), float(-b)]) or a == -b
    f = P.function()
    for z in (0.1, 0.3j):
        want = 1 / ((1 - z / a) * (1 + z / b)) + c
        assert abs(f(z) - want) < 1e-12


def test_laplace_euler_values():
    B = borel_transform(FormalSeries1D.euler(30))
    P = pade_continue(B, *default_degrees(30))
    out = laplace_sum(P, 1, 0.0, [0.05, 0.1, 0.2])
    for z, v in zip(out.z, out.values):
        assert abs(v - quad_oracle(z.real)) < 1e-6
    assert abs(out.values[1] - 0.0915633) < 1e-6


def test_laplace_convergent():
    s = FormalSeries1D([Fraction(1, 2 ** n) for n in range(30)])  # 1/(1 − z/2)
    out = k_sum(SummationProblem(s), [0.1, 0.5, 0.2 - 0.3j, 0.3 + 0.2j])
    for z, v in zip(out.z, out.values):
        assert abs(v - 1 / (1 - z / 2)) < 1e-10


def test_pole_on_ray():
    B = borel_transform(FormalSeries1D.euler(30))
    P = pade_continue(B, *default_degrees(30))
    with pytest.raises(PoleOnRay):
        laplace_sum(P, 1, math.pi, [-0.1])


def test_select_sectors_examples():
    c = select_sectors([math.pi], [1.0])
    assert c.tau_plus == 0.0
    assert c.plus[0].contains_direction(0.0)
    assert c.plus[0].opening > math.pi
    c0 = select_sectors([0.0], [1.0])
    assert c0.tau_plus != 0.0
    assert c0.plus[0].contains_direction(0.0)
    assert abs(c0.tau_plus) >= c0.eps[0]
    free = select_sectors([], [1.0])
    assert free.tau_plus == 0.0 and abs(free.plus[0].opening - (math.pi + free.eps[0])) < 1e-12
    assert abs(free.eps[0] - 0.4) < 1e-12


@given(st.lists(st.floats(-math.pi, math.pi), max_size=4), st.sampled_from([(1.0,), (0.5, 1.0), (1.0, 2.0)]))
def test_select_sectors_properties(dirs, ks):
    c = select_sectors(dirs, ks)
    for sectors in (c.plus, c.minus):
        for I, k, e in zip(sectors, sorted(ks), c.eps):
            assert abs(I.opening - (math.pi / k + e)) < 1e-12
        for I, J in zip(sectors, sectors[1:]):
            assert I.a <= J.a + 1e-12 and J.b <= I.b + 1e-12
    assert c.plus[-1].contains_direction(0.0)
    assert c.minus[-1].contains_direction(math.pi)
    for th in dirs:
        d = (th - c.tau_plus) % (2 * math.pi)
        assert min(d, 2 * math.pi - d) >= c.eps[0] - 1e-12


def ode_oracle(z_end, z0=0.02):
    """Radau integration of z² y' = z − y from z0, started from the optimally truncated series."""
    e = FormalSeries1D.euler(60).numeric()
    terms = [e[n] * z0 ** n for n in range(60)]
    stop = int(np.argmin(np.abs(terms[1:]))) + 1
    y0 = sum(terms[:stop]).real
    sol = solve_ivp(lambda z, y: (z - y) / z ** 2, (z0, z_end), [y0], method="Radau", rtol=1e-12, atol=1e-14)
    return sol.y[0, -1]


def test_k_sum_euler_ode():
    sol = solve_formal_y(euler_system(30), 30)
    s = FormalSeries1D.from_series(sol.Y[0])
    assert s.gaussian() == FormalSeries1D.euler(31).gaussian()
    out = k_sum(SummationProblem(s), [0.05, 0.1, 0.2])
    for z, v in zip(out.z, out.values):
        assert abs(v.real - ode_oracle(z.real)) < 1e-6


def test_ode_residual_grid():
    grid = [0.02 * (j + 1) * np.exp(0.3j * (j - 4.5) / 4.5) for j in range(10)]
    out = k_sum(SummationProblem(FormalSeries1D.euler(30)), grid, derivative=True)
    assert np.max(ode_residual(out, 2, euler_rhs)) < 1e-6


def test_ramified_round_trip():
    e = FormalSeries1D.euler(12)
    assert unramify(ramify(e, 2), 2).gaussian() == e.gaussian()
    with pytest.raises(ResummationError):
        unramify(FormalSeries1D([0, 1, 0]), 2)
    grid = [0.05, 0.1]
    e30 = FormalSeries1D.euler(30)
    plain = k_sum(SummationProblem(e30), grid).values
    # Σ e_n x^{2n} with x = z^{1/2}: the same function of z
    ram = k_sum(SummationProblem(ramify(e30, 2), q=2), grid)
    assert np.max(np.abs(ram.values - plain)) < 1e-10
    # as a series in x it is 2-summable with sum f(x²)
    lvl2 = k_sum(SummationProblem(ramify(e30, 2), k_orders=(2.0,)), [z ** 0.5 for z in grid])
    assert np.max(np.abs(lvl2.values - plain)) < 1e-10


def test_composition_stability():
    e = FormalSeries1D.euler(30)
    grid = [0.05, 0.1, 0.15]
    one = k_sum(SummationProblem(e), grid).values
    sq = k_sum(SummationProblem(e.mul(e)), grid).values
    poly = k_sum(SummationProblem(FormalSeries1D([0] * 1 + [1] + [0] * 28).mul(e)), grid).values
    assert np.max(np.abs(sq - one ** 2)) < 1e-6
    assert np.max(np.abs(poly - np.array(grid) * one)) < 1e-6


def test_summation_problem_validation():
    e = FormalSeries1D.euler(10)
    with pytest.raises(ResummationError):
        SummationProblem(e, intervals=(Sector(-1.0, 1.0),))
    with pytest.raises(ResummationError):
        SummationProblem(e, k_orders=(2.0, 1.0))
    with pytest.raises(ResummationError):
        k_sum(SummationProblem(e, k_orders=(1.0, 2.0)), [0.1])
    with pytest.raises(ResummationError):
        SummationProblem(e, k_orders=(0.5, 1.0), intervals=(Sector(-2.0, 2.0), Sector(-2.5, 1.0)))


def test_two_level_with_decomposition():
    e = FormalSeries1D.euler(30)
    g = FormalSeries1D([Fraction(1, 3 ** n) for n in range(30)])
    grid = [0.05, 0.1]
    both = k_sum(SummationProblem(e, k_orders=(1.0, 2.0), decomposition=(e, g)), grid).values
    ref = k_sum(SummationProblem(e), grid).values + np.array([1 / (1 - z / 3) for z in grid])
    assert np.max(np.abs(both - ref)) < 1e-9


def test_verify_asymptotics():
    grid = [0.02 * (j + 1) for j in range(10)]
    e = FormalSeries1D.euler(30)
    ssum = k_sum(SummationProblem(e), grid)
    rep = verify_gevrey_asymptotics(ssum, e, 1.0)
    assert rep.passed and math.isfinite(rep.C) and rep.C < 10
    geo = FormalSeries1D([Fraction(1, 2 ** n) for n in range(30)])
    gsum = k_sum(SummationProblem(geo), grid)
    assert verify_gevrey_asymptotics(gsum, geo, 0.0).passed
    assert not verify_gevrey_asymptotics(ssum, geo, 1.0).passed
    other = FormalSeries1D([c * 2 for c in e.coeffs])
    assert not verify_gevrey_asymptotics(ssum, other, 1.0).passed
