import pytest

from crds.corpus import CORPUS, corpus_segre_system
from crds.hypersurface import complex_from_real, real_series
from crds.segre_ode import (DegenerateElimination, HighOrderSystem, SecondOrderODE,
                            associate_high_order, associate_nondegenerate, associate_nonminimal,
                            check_1k_symmetry, default_samples, verify_segre_solutions)
from crds.series import Gaussian, SingularJacobian


def T_of(terms, t):
    return complex_from_real(real_series(terms, t))


def test_heisenberg_phi_zero():
    T = T_of({(1, 1, 0): 1}, 7)
    ode = associate_nondegenerate(T)
    assert ode.Phi.is_zero()
    assert verify_segre_solutions(ode, T, default_samples(10)).passed


def test_quartic_nondegenerate():
    T = T_of({(1, 1, 0): 1, (2, 2, 0): 1}, 8)
    ode = associate_nondegenerate(T)
    assert not ode.Phi.is_zero()
    assert verify_segre_solutions(ode, T, default_samples(10, seed=1)).passed


def test_nondegenerate_truncation_monotone():
    lo = associate_nondegenerate(T_of({(1, 1, 0): 1, (2, 2, 0): 1}, 7))
    hi = associate_nondegenerate(T_of({(1, 1, 0): 1, (2, 2, 0): 1}, 9))
    assert hi.Phi.truncate(lo.trunc) == lo.Phi


def test_degenerate_rejected():
    with pytest.raises((SingularJacobian, DegenerateElimination)):
        associate_nondegenerate(T_of({(1, 1, 1): 1}, 6))


def test_perturbed_phi_detected():
    T = T_of({(1, 1, 0): 1}, 7)
    ode = associate_nondegenerate(T)
    bad = SecondOrderODE(ode.Phi + ode.Phi.ring.var("w1", ode.trunc) ** 2)
    rep = verify_segre_solutions(bad, T, default_samples(3))
    assert not rep.passed
    assert not rep.as_dict()["pass"]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_nonminimal(m):
    T = T_of({(1, 1, m): 1}, m + 8)
    ode = associate_nonminimal(T)
    assert ode.m == m
    assert ode.Phi.valuation("zeta") >= 1
    rep = verify_segre_solutions(ode, T, default_samples(10, seed=m))
    assert rep.passed
    assert all(v == "inf" for s in rep.as_dict()["samples"] for v in s["residual_valuations"])


def test_mu_grading_changes_output():
    one = associate_nonminimal(T_of({(1, 1, 1): 1}, 9))
    two = associate_nonminimal(T_of({(1, 1, 2): 1}, 10))
    assert one.Phi != two.Phi.truncate(one.trunc)
    # both start with the same leading coefficient in ζ
    assert one.Phi.coefficient((0, 0, 1)) == two.Phi.coefficient((0, 0, 1))


def test_k1_matches_nonminimal():
    T = T_of({(1, 1, 1): 1}, 9)
    hs = associate_high_order(T, 1, 1)
    ode = associate_nonminimal(T)
    assert hs.Phi.divide_by_power("w", 1) == ode.Phi


def test_high_order_k2():
    sysm, fam = corpus_segre_system("mixed_k2", 8)
    assert isinstance(sysm, HighOrderSystem) and sysm.k == 2 and sysm.mu == 2
    assert sysm.factorization_holds()
    assert not sysm.property_star().is_zero()
    assert verify_segre_solutions(sysm, fam, default_samples(10)).passed


def test_high_order_perturbed_fails():
    sysm, fam = corpus_segre_system("mixed_k2", 6)
    ring = sysm.Phi.ring
    bump = (ring.var("w", sysm.trunc) ** 2 * ring.var("zeta", sysm.trunc)).scale(Gaussian(1, 1))
    bad = HighOrderSystem(sysm.k, sysm.mu, sysm.Phi_list, sysm.Phi + bump, sysm.alpha)
    assert not verify_segre_solutions(bad, fam, default_samples(3)).passed


def test_singular_needs_nonzero_b():
    T = T_of({(1, 1, 1): 1}, 7)
    ode = associate_nonminimal(T)
    with pytest.raises(Exception):
        verify_segre_solutions(ode, T, [(Gaussian(1), Gaussian(0))])


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_segre(name):
    sysm, fam = corpus_segre_system(name, 8)
    rep = verify_segre_solutions(sysm, fam, default_samples(10, seed=7))
    assert rep.passed
    assert rep.trunc >= 8


@pytest.mark.parametrize("terms,k", [({(1, 1, 1): 1}, 1), ({(2, 1, 2): 1, (1, 2, 2): 1}, 2)])
def test_1k_symmetry(terms, k):
    T = T_of(terms, 8)
    assert check_1k_symmetry(T, k)


def test_exact_residual():
    sysm, fam = corpus_segre_system("generic_m1", 8)
    rep = verify_segre_solutions(sysm, fam, default_samples(2))
    assert all(r.is_zero() for s in rep.samples for r in s.residuals)
