from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from conftest import ZW2, gaussians, series_in, units_in
from crds.series import (INF, DivisionObstruction, Gaussian, SeriesError, SeriesRing, SingularJacobian,
                         TruncatedSeries, compose, parse_gaussian, solve_implicit)

Z = SeriesRing(["z"])
I = Gaussian(0, 1)


def test_add_examples():
    z = Z.var("z", 5)
    assert (z + (-z)).is_zero()
    one = Z.one(5)
    assert one + z + z * z == Z.from_dict({(0,): 1, (1,): 1, (2,): 1}, 5)


def test_mul_examples():
    z = Z.var("z", 6)
    assert (1 + z) * (1 - z) == 1 - z * z
    geo = Z.from_dict({(n,): 1 for n in range(7)}, 6)
    assert (1 - z) * geo == Z.one(6)
    z1, w1 = ZW2.gens(1)
    assert (z1 * w1).is_zero()


def test_truncation_is_min():
    a = ZW2.var("z", 5)
    b = ZW2.var("w", 3)
    assert (a + b).trunc == 3
    assert (a * b).trunc == 3


def test_variable_mismatch():
    with pytest.raises(SeriesError):
        Z.var("z", 3) + ZW2.var("z", 3)


def test_compose_examples():
    W = SeriesRing(["w"])
    z = Z.var("z", 4)
    out = compose(W.var("w", 4) ** 2, [z + z * z])
    assert out == Z.from_dict({(2,): 1, (3,): 2, (4,): 1}, 4)
    # exp(log(1+z)) = 1 + z
    N = 8
    log1p = Z.from_dict({(n,): Fraction((-1) ** (n + 1), n) for n in range(1, N + 1)}, N)
    exp = W.from_dict({(n,): Fraction(1, factorial(n)) for n in range(N + 1)}, N)
    assert compose(exp, [log1p]) == 1 + Z.var("z", N)


def test_compose_rejects_constant_inner():
    W = SeriesRing(["w"])
    with pytest.raises(SeriesError):
        compose(W.var("w", 3), [Z.one(3)])


@given(series_in(ZW2, 5))
def test_compose_identity(f):
    assert compose(f, ZW2.gens(5)) == f


@given(series_in(ZW2, 4), series_in(ZW2, 4, lo=1), series_in(ZW2, 4, lo=1), series_in(ZW2, 4, lo=1),
       series_in(ZW2, 4, lo=1))
def test_compose_associative(f, g1, g2, h1, h2):
    left = compose(compose(f, [g1, g2]), [h1, h2])
    right = compose(f, [compose(g1, [h1, h2]), compose(g2, [h1, h2])])
    assert left == right


def test_derivative_examples():
    z, w = ZW2.gens(5)
    assert (z ** 3).diff("z") == (z * z).scale(3).truncate(4)
    assert z.diff("w").is_zero()
    assert z.diff("z").trunc == 4
    with pytest.raises(Exception):
        z.diff("u")


@given(series_in(ZW2, 5), series_in(ZW2, 5))
def test_leibniz(a, b):
    assert (a * b).diff("z") == a.diff("z") * b.truncate(4) + b.diff("z") * a.truncate(4)


def test_valuation_examples():
    W = SeriesRing(["w"])
    w = W.var("w", 6)
    assert (w ** 3 + w ** 5).valuation() == 3
    assert W.zero(4).valuation() == INF
    z, w2 = ZW2.gens(6)
    assert (z * w2 ** 2 + w2 ** 4).valuation("w") == 2


@given(series_in(ZW2, 8, max_terms=4), series_in(ZW2, 8, max_terms=4))
def test_valuation_additive(f, g):
    vf, vg = f.valuation(), g.valuation()
    if vf == INF or vg == INF or vf + vg > 8:
        return
    assert (f * g).valuation() == vf + vg


def test_divide_by_power_examples():
    z, w = ZW2.gens(6)
    assert (w * w * z).divide_by_power("w", 2) == z.truncate(4)
    W = SeriesRing(["w"])
    ww = W.var("w", 6)
    assert (ww ** 3 + ww ** 4).divide_by_power("w", 3) == (1 + ww).truncate(3)
    with pytest.raises(DivisionObstruction):
        (z + w * w).divide_by_power("w", 1)


@given(series_in(ZW2, 6), st.integers(0, 3))
def test_divide_after_multiply(f, k):
    assert f.multiply_by_power("w", k).divide_by_power("w", k) == f


def test_invert_unit_examples():
    z = Z.var("z", 6)
    assert (1 - z).invert_unit() == Z.from_dict({(n,): 1 for n in range(7)}, 6)
    assert Z.const(2, 4).invert_unit() == Z.const(Fraction(1, 2), 4)
    with pytest.raises(SeriesError):
        z.invert_unit()


@given(units_in(ZW2, 6))
def test_invert_unit_property(a):
    assert (a * a.invert_unit()) == ZW2.one(6)


def test_solve_implicit_catalan():
    R = SeriesRing(["z", "y"])
    z, y = R.gens(8)
    (sol,) = solve_implicit([y - z - y * y], 1)
    catalan = [comb(2 * n, n) // (n + 1) for n in range(9)]
    assert sol == Z.from_dict({(n,): catalan[n - 1] for n in range(1, 9)}, 8)
    (lin,) = solve_implicit([y - z], 1)
    assert lin == Z.var("z", 8)


def test_solve_implicit_elimination():
    R = SeriesRing(["z", "w", "w1", "a", "b"])
    z, w, w1, a, b = R.gens(7)
    # bilinear pair: Jacobian in (a, b) vanishes at the origin
    with pytest.raises(SingularJacobian):
        solve_implicit([w - b - a * b * z, w1 - a * b], 2)
    # regular variant: back-substitution residual is exactly zero
    eqs = [w - b - a * z - a * b * z, w1 - a - a * b]
    A, B = solve_implicit(eqs, 2)
    x = SeriesRing(["z", "w", "w1"]).gens(7)
    assert all(compose(e, x + [A, B]).is_zero() for e in eqs)


def test_solve_implicit_singular():
    R = SeriesRing(["z", "y"])
    z, y = R.gens(5)
    with pytest.raises(SingularJacobian):
        solve_implicit([y * y - z * z], 1)


def test_conjugate_examples():
    z = Z.var("z", 3)
    assert z.scale(I).conjugate() == z.scale(-I)


@given(series_in(ZW2, 5), series_in(ZW2, 5))
def test_conjugate_properties(a, b):
    assert a.conjugate().conjugate() == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@given(series_in(ZW2, 5), series_in(ZW2, 5), series_in(ZW2, 5))
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) - b == a


@given(series_in(ZW2, 6))
def test_text_round_trip(a):
    assert TruncatedSeries.from_text(a.to_text()) == a


@given(gaussians)
def test_gaussian_text_round_trip(c):
    assert parse_gaussian(str(c)) == c


def test_no_stored_zero_and_truncation():
    s = ZW2.from_dict({(1, 0): 0, (3, 3): 1, (0, 1): 2}, 4)
    assert s.to_dict() == {(0, 1): Gaussian(2)}
