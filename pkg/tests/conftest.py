from fractions import Fraction

from hypothesis import settings, strategies as st

from crds.series import Gaussian, SeriesRing

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

ZW2 = SeriesRing(["z", "w"])

small_q = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))
gaussians = st.builds(Gaussian, small_q, small_q)


def series_in(ring: SeriesRing, trunc: int, lo: int = 0, max_terms: int = 8):
    n = len(ring.vars)
    exps = st.tuples(*[st.integers(0, trunc) for _ in range(n)]).filter(lambda e: lo <= sum(e) <= trunc)
    return st.dictionaries(exps, gaussians, max_size=max_terms).map(lambda d: ring.from_dict(d, trunc))


def units_in(ring: SeriesRing, trunc: int):
    nonzero = gaussians.filter(lambda c: not c.is_zero())
    return st.tuples(nonzero, series_in(ring, trunc, lo=1)).map(lambda p: p[1] + ring.const(p[0], trunc))


# acceptance criteria record their outcome here; printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, desc = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}")
