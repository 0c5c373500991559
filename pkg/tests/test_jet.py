import random

import pytest
from hypothesis import given, strategies as st

from crds.corpus import CORPUS, equivalent_pair
from crds.jet import (JetError, constant_term_scheme, direct_transformation_residual, extract_wprime_identities,
                      extract_zeta_identities, flat_jet_ring, functoriality_residuals, g23_closed_form, jet_ring,
                      prolong, tangency_residual, total_derivative, transported_ode)
from crds.maps import ZW, FormalMap, random_invertible_map, random_series
from crds.segre_ode import (JET2, ZWZ, SecondOrderODE, associate_high_order,
                            associate_nonminimal)
from crds.series import Gaussian, SeriesRing, compose

from conftest import series_in


def test_total_derivative_examples():
    R = jet_ring(1)
    z, w, w1 = R.gens(6)
    assert total_derivative(w.restrict(SeriesRing(["z", "w"]))) == jet_ring(1).var("w1", 5)
    R2 = jet_ring(2)
    assert total_derivative(z * w1) == (R2.var("w1", 5) + R2.var("z", 5) * R2.var("w2", 5))


@given(series_in(jet_ring(1), 5), series_in(jet_ring(1), 5))
def test_total_derivative_leibniz(a, b):
    lhs = total_derivative(a * b)
    rhs = total_derivative(a) * b.embed(jet_ring(2)) + total_derivative(b) * a.embed(jet_ring(2))
    t = min(lhs.trunc, rhs.trunc)
    assert lhs.truncate(t) == rhs.truncate(t)


def test_prolong_identity():
    P = prolong(FormalMap.identity(7), 4)
    R = flat_jet_ring(4)
    for j in range(1, 5):
        e = P.expand(j)
        assert e == R.var(f"w{j}", e.trunc)


def test_prolong_hand_example():
    z, w = ZW.gens(6)
    P = prolong(FormalMap(z, w + w * w), 1)
    R = flat_jet_ring(1)
    e = P.expand(1)
    t = e.trunc
    assert e == (R.one(t) + R.var("w", t).scale(2)) * R.var("w1", t)


@given(st.integers(0, 10_000))
def test_prolong_g23(seed):
    H = random_invertible_map(random.Random(seed), 6, degree=3, tangent=False)
    P = prolong(H, 2)
    n1, n2 = g23_closed_form(H)
    for got, want in zip(P.numerators, (n1, n2)):
        t = min(got.trunc, want.trunc)
        assert got.truncate(t) == want.truncate(t)


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_prolong_functoriality(seed, k):
    rng = random.Random(seed)
    H1 = random_invertible_map(rng, k + 3, degree=2, tangent=False)
    H2 = random_invertible_map(rng, k + 3, degree=2, tangent=False)
    assert all(r.is_zero() for r in functoriality_residuals(H1, H2, k))


def test_prolong_rejects_singular_map():
    z, w = ZW.gens(5)
    with pytest.raises(Exception):
        prolong(FormalMap(z, z), 2)


@given(st.integers(0, 10_000))
def test_constant_term_scheme_matches_prolong(seed):
    H = random_invertible_map(random.Random(seed), 7, degree=3, tangent=False)
    P = prolong(H, 3)
    for j, c in enumerate(constant_term_scheme(H, 3), start=1):
        ref = P.at_zero_jets(j)
        t = min(c.trunc, ref.trunc)
        assert c.truncate(t) == ref.truncate(t)


def test_constant_term_identity():
    assert all(c.is_zero() for c in constant_term_scheme(FormalMap.identity(6), 3))


@pytest.mark.parametrize("m", [1, 2])
def test_constant_term_divisible(m):
    rng = random.Random(m)
    z, w = ZW.gens(9)
    h = random_series(rng, ZW, 9, 0, 3, 0.5) + ZW.one(9)
    H = FormalMap(z + (z * w).scale(Gaussian(1, 1)), w + z * w ** m * h)
    for c in constant_term_scheme(H, 3):
        assert c.valuation("w") >= m


def test_transported_identity():
    rng = random.Random(1)
    psi = SecondOrderODE(random_series(rng, JET2, 6, 0, 3, 0.5))
    out = transported_ode(FormalMap.identity(6), psi)
    assert out.trunc == 4
    assert out.Phi == psi.Phi.truncate(4)


def test_transported_hand_example():
    # solutions of w'' = 0 pulled back by (z, w + w²) solve w'' = −2 w'²/(1 + 2w)
    z, w = ZW.gens(8)
    out = transported_ode(FormalMap(z, w + w * w), SecondOrderODE(JET2.zero(8)))
    t = out.trunc
    _, ww, w1 = JET2.gens(t)
    want = (w1 * w1).scale(-2) * (JET2.one(t) + ww.scale(2)).invert_unit()
    assert out.Phi == want


@given(st.integers(0, 10_000))
def test_transported_round_trip(seed):
    rng = random.Random(seed)
    H = random_invertible_map(rng, 6, degree=2)
    psi = SecondOrderODE(random_series(rng, JET2, 6, 0, 2, 0.5))
    back = transported_ode(H.inverse(), transported_ode(H, psi))
    t = back.trunc
    assert back.Phi == psi.Phi.truncate(t)


def test_transported_functoriality():
    rng = random.Random(5)
    H1 = random_invertible_map(rng, 6, degree=2)
    H2 = random_invertible_map(rng, 6, degree=2)
    psi = SecondOrderODE(random_series(rng, JET2, 6, 0, 2, 0.5))
    # H2 carries {Ψ} to {Ψ'} and H1 carries {Ψ'} to {Ψ*}
    one = transported_ode(H1.after(H2), psi)
    two = transported_ode(H2, transported_ode(H1, psi))
    t = min(one.trunc, two.trunc)
    assert one.Phi.truncate(t) == two.Phi.truncate(t)


@pytest.fixture(scope="module")
def m1_pair():
    p = equivalent_pair("generic_m1", 6)
    return p, associate_nonminimal(p.source, 1), associate_nonminimal(p.target, 1)


def test_tangency_identity(m1_pair):
    _, src, _ = m1_pair
    rep = tangency_residual(FormalMap.identity(src.trunc), src, src)
    assert rep.passed and rep.as_dict()["pass"]


def test_tangency_equivalent_pair(m1_pair):
    p, src, tgt = m1_pair
    assert tangency_residual(p.H, src, tgt).passed


def test_tangency_perturbed(m1_pair):
    p, src, tgt = m1_pair
    z, w = ZW.gens(p.H.trunc)
    bad = FormalMap(p.H.F + (z * z * w).scale(Gaussian(1, 3)), p.H.G)
    assert not tangency_residual(bad, src, tgt).passed


def test_tangency_linear_scaling():
    # H = (λz, μw) maps {w'' = w Φ(z, w, w'/w)} to the rescaled system
    t = 8
    src = associate_nonminimal(CORPUS["generic_m1"].hypersurface(t), 1)
    lam, mu = Gaussian(2), Gaussian(3)
    z, w, zeta = ZWZ.gens(src.trunc)
    # w* = μ w(z*/λ): w*'' = μ/λ² w'',  ζ* = w*'/w* = ζ/λ
    phi_star = compose(src.Phi, [z.scale(lam.inverse()), w.scale(mu.inverse()), zeta.scale(lam)])
    from crds.segre_ode import SingularODE
    tgt = SingularODE(1, phi_star.scale((lam * lam).inverse() * mu / mu))
    zz, ww = ZW.gens(t)
    H = FormalMap(zz.scale(lam), ww.scale(mu))
    assert tangency_residual(H, src, tgt).passed


def test_tangency_order_mismatch(m1_pair):
    _, src, _ = m1_pair
    other = associate_nonminimal(CORPUS["generic_m2"].hypersurface(8), 2)
    with pytest.raises(JetError):
        tangency_residual(FormalMap.identity(6), src, other)


def test_wprime_identity(m1_pair):
    _, src, _ = m1_pair
    ids = extract_wprime_identities(FormalMap.identity(src.trunc), src, src)
    assert ids.passed and len(ids.identities) == 4


def test_wprime_pair_and_direct_oracle(m1_pair):
    p, src, tgt = m1_pair
    ids = extract_wprime_identities(p.H, src, tgt)
    assert ids.passed
    F, G = p.H.F.embed(ZWZ), p.H.G.embed(ZWZ)
    assert direct_transformation_residual(F, G, 1, src.Phi, tgt.Phi).is_zero()
    z, w = ZW.gens(p.H.trunc)
    bad = FormalMap(p.H.F + (z * w * w).scale(Gaussian(0, 1)), p.H.G)
    assert not extract_wprime_identities(bad, src, tgt).passed
    assert not direct_transformation_residual(bad.F.embed(ZWZ), bad.G.embed(ZWZ), 1, src.Phi, tgt.Phi).is_zero()


@pytest.mark.parametrize("m", [1, 2])
def test_wprime_observation_b(m):
    # f_ww and g_ww enter only with the factor w^(2m): replacing them by
    # arbitrary series changes the identity by a multiple of w^(2m) / w^m = w^m
    p = equivalent_pair(f"generic_m{m}", 5)
    src, tgt = associate_nonminimal(p.source, m), associate_nonminimal(p.target, m)
    F, G = p.H.F.embed(ZWZ), p.H.G.embed(ZWZ)
    base = direct_transformation_residual(F, G, m, src.Phi, tgt.Phi)
    rng = random.Random(m)
    junk = {"Fww": random_series(rng, ZWZ, F.trunc, 0, 3, 0.6),
            "Gww": random_series(rng, ZWZ, F.trunc, 0, 3, 0.6).multiply_by_power("w", m - 1)}
    alt = direct_transformation_residual(F, G, m, src.Phi, tgt.Phi, junk)
    t = min(base.trunc, alt.trunc)
    assert (alt.truncate(t) - base.truncate(t)).valuation("w") >= m


@pytest.fixture(scope="module")
def k2_pair():
    p = equivalent_pair("mixed_k2", 6)
    return p, associate_high_order(p.source, 2, 2), associate_high_order(p.target, 2, 2)


def test_zeta_identities_identity(k2_pair):
    _, src, _ = k2_pair
    z = extract_zeta_identities(FormalMap.identity(src.trunc), src, src)
    assert z.passed


def test_zeta_identities_structure(k2_pair):
    p, src, tgt = k2_pair
    z = extract_zeta_identities(p.H, src, tgt)
    assert z.passed
    assert z.lead_g == Gaussian(1)
    assert z.lead_f.re == 0 and z.lead_f.im != 0
    assert tangency_residual(p.H, src, tgt).passed
