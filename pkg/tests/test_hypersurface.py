import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crds.hypersurface import (THETA_RING, ComplexDefiningSeries, HypersurfaceError, NotNormal, check_reality,
                               complex_from_real, invariants, k_nondegeneracy_index, nonminimality_order,
                               pure_order, real_series, reality_residual, segre_graphing_function,
                               transport_normal)
from crds.maps import random_invertible_map
from crds.series import Gaussian, SeriesRing, compose

I2 = Gaussian(0, 2)


def theta(terms, trunc):
    return ComplexDefiningSeries(THETA_RING.from_dict(terms, trunc))


def test_heisenberg_theta():
    T = complex_from_real(real_series({(1, 1, 0): 1}, 6))
    assert T == theta({(0, 0, 1): 1, (1, 1, 0): I2}, 6)
    assert check_reality(T)


def test_levi_flat():
    T = complex_from_real(real_series({}, 5))
    assert T == theta({(0, 0, 1): 1}, 5)
    assert check_reality(T)
    assert nonminimality_order(T) is None
    with pytest.raises(HypersurfaceError):
        pure_order(T)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_nonminimal_theta_leading_term(m):
    t = m + 6
    T = complex_from_real(real_series({(1, 1, m): 1}, t))
    assert check_reality(T)
    d = T.Theta.to_dict()
    assert d[(1, 1, m)] == I2
    # everything beyond τ and 2i τ^m zχ has total degree >= m + 3
    rest = {e for e in d if e not in {(0, 0, 1), (1, 1, m)}}
    assert all(sum(e) >= m + 3 for e in rest)


def test_non_hermitian_rejected():
    with pytest.raises(HypersurfaceError):
        complex_from_real(real_series({(2, 1, 0): 1}, 5))


def test_reality_negative():
    T = theta({(0, 0, 1): 1, (1, 1, 1): 1}, 6)
    assert not check_reality(T)
    res = reality_residual(T)
    assert res.valuation() == 3
    assert check_reality(theta({(0, 0, 1): 1}, 6))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_invariants_generic(m):
    T = complex_from_real(real_series({(1, 1, m): 1}, m + 5))
    assert nonminimality_order(T) == m
    assert pure_order(T) == m
    assert k_nondegeneracy_index(T, m) == 1
    assert invariants(T).generic_nonminimal


def test_invariants_nondegenerate():
    T = complex_from_real(real_series({(1, 1, 0): 1}, 6))
    inv = invariants(T)
    assert inv.minimal and inv.levi_nondegenerate and inv.p == 0
    assert inv.as_dict()["m"] == "minimal"


@pytest.mark.parametrize("m", [1, 2])
def test_invariants_exceptional(m):
    T = complex_from_real(real_series({(2, 2, m): 1}, m + 8))
    assert nonminimality_order(T) == m
    assert pure_order(T) == m + 1
    assert k_nondegeneracy_index(T, m) is None


def test_invariants_k2():
    m = 2
    T = complex_from_real(real_series({(2, 1, m): 1, (1, 2, m): 1}, m + 6))
    assert nonminimality_order(T) == m
    assert k_nondegeneracy_index(T, m) == 2
    assert not invariants(T).generic_nonminimal


def test_u2_z2zbar2_order():
    T = complex_from_real(real_series({(2, 2, 2): 1}, 10))
    assert nonminimality_order(T) == 2


def test_not_normal_rejected():
    T = theta({(0, 0, 1): 1, (1, 0, 1): 1}, 5)
    with pytest.raises(NotNormal):
        nonminimality_order(T)


R3 = SeriesRing(["z", "a", "b"])


def test_segre_graphing_heisenberg():
    T = complex_from_real(real_series({(1, 1, 0): 1}, 6))
    z, a, b = R3.gens(6)
    assert segre_graphing_function(T, a, b) == b + (a * z).scale(I2)
    assert segre_graphing_function(T, R3.zero(6), R3.zero(6)).is_zero()


@pytest.mark.parametrize("m", [1, 2])
def test_segre_graphing_nonminimal(m):
    t = m + 6
    T = complex_from_real(real_series({(1, 1, m): 1}, t))
    z, a, b = R3.gens(t)
    w = segre_graphing_function(T, a, b)
    lead = b + (a * b ** m * z).scale(I2)
    assert (w - lead).valuation() >= m + 3


@pytest.mark.parametrize("name_terms", [{(1, 1, 0): 1}, {(1, 1, 1): 1}, {(2, 2, 1): 1},
                                        {(1, 1, 1): 1, (2, 1, 1): Fraction(1, 2), (1, 2, 1): Fraction(1, 2)}])
def test_membership_symmetry(name_terms):
    # w = Θ(z, a, b)  ⇒  b = Θ̄(a, z, w)
    t = 8
    T = complex_from_real(real_series(name_terms, t))
    z, a, b = R3.gens(t)
    w = segre_graphing_function(T, a, b)
    back = compose(T.Theta.conjugate(), [a, z, w])
    assert (back - b).is_zero()


@given(st.integers(0, 10_000))
def test_complex_from_real_always_real(seed):
    rng = random.Random(seed)
    terms = {}
    for _ in range(3):
        j, k, c = rng.randint(1, 2), rng.randint(1, 2), rng.randint(0, 2)
        v = Gaussian(Fraction(rng.randint(-3, 3), rng.randint(1, 3)), Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        terms[(j, k, c)] = terms.get((j, k, c), Gaussian(0)) + v
        terms[(k, j, c)] = terms.get((k, j, c), Gaussian(0)) + v.conjugate()
    T = complex_from_real(real_series(terms, 6))
    assert check_reality(T)


@given(st.integers(0, 10_000))
def test_pure_order_invariant(seed):
    for terms, p in (({(1, 1, 1): 1}, 1), ({(2, 2, 1): 1}, 2), ({(1, 1, 0): 1}, 0)):
        T = complex_from_real(real_series(terms, 6))
        H = random_invertible_map(random.Random(seed), 6, degree=2)
        T2, _ = transport_normal(T, H)
        assert T2.is_normal() and check_reality(T2)
        assert pure_order(T2) == p
