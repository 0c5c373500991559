"""Gevrey estimates and Borel–Padé–Laplace k-summation of formal series.

Formal stages (Borel transform, Padé approximant) are exact over the
Gaussian rationals when the input is exact; the conversion to double
precision happens when the approximant is turned into a numeric rational
function (``RationalFunction``).  Quadrature is Gauss–Laguerre in the
variable u = (ζ/z)^k, so that

    S(z) = ∫_0^∞ e^{-u} B(z u^{1/k}) du,     B(ζ) = Σ f_n ζ^n / Γ(1 + n/k),

reproduces Σ f_n z^n termwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .series import Gaussian, SeriesError, TruncatedSeries, _gauss_solve


class ResummationError(ValueError):
    pass


class PoleOnRay(ResummationError):
    def __init__(self, direction: float, poles):
        super().__init__(f"approximant pole on the summation ray arg ζ = {direction:.6g}: {poles}")
        self.direction = direction
        self.poles = poles


# ---------------------------------------------------------------------------
# series


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction, Gaussian))


@dataclass(frozen=True)
class FormalSeries1D:
    coeffs: Tuple[object, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def from_series(cls, s: TruncatedSeries) -> "FormalSeries1D":
        if len(s.vars) != 1:
            raise ResummationError("expected a one-variable series")
        return cls(tuple(s.coefficient((n,)) for n in range(s.trunc + 1)))

    @classmethod
    def euler(cls, N: int) -> "FormalSeries1D":
        """Σ_{n>=1} (−1)^{n−1} (n−1)! z^n."""
        return cls((Gaussian(0),) + tuple(Gaussian((-1) ** (n - 1) * math.factorial(n - 1)) for n in range(1, N)))

    def __len__(self):
        return len(self.coeffs)

    @property
    def exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    def gaussian(self) -> List[Gaussian]:
        if not self.exact:
            raise ResummationError("series has inexact coefficients")
        return [Gaussian.of(c) for c in self.coeffs]

    def numeric(self) -> np.ndarray:
        return np.array([complex(Gaussian.of(c)) if _is_exact(c) else complex(c) for c in self.coeffs])

    def partial_sum(self, z, n: Optional[int] = None) -> complex:
        c = self.numeric()[: len(self) if n is None else n]
        return np.polyval(c[::-1], z) if len(c) else 0j

    def mul(self, o: "FormalSeries1D") -> "FormalSeries1D":
        n = min(len(self), len(o))
        a, b = self.coeffs[:n], o.coeffs[:n]
        exact = self.exact and o.exact
        zero = Gaussian(0) if exact else 0j
        out = []
        for k in range(n):
            s = zero
            for i in range(k + 1):
                x, y = (Gaussian.of(a[i]), Gaussian.of(b[k - i])) if exact else (complex(a[i]), complex(b[k - i]))
                s = s + x * y
            out.append(s)
        return FormalSeries1D(tuple(out))


def ramify(series: FormalSeries1D, q: int) -> FormalSeries1D:
    """f(z) as a series in x = z^(1/q): coefficients move from n to q n."""
    zero = Gaussian(0) if series.exact else 0j
    out = [zero] * ((len(series) - 1) * q + 1)
    for n, c in enumerate(series.coeffs):
        out[n * q] = c
    return FormalSeries1D(tuple(out))


def unramify(series: FormalSeries1D, q: int) -> FormalSeries1D:
    for n, c in enumerate(series.coeffs):
        if n % q and complex(Gaussian.of(c) if _is_exact(c) else c) != 0:
            raise ResummationError(f"coefficient {n} is not at a multiple of q = {q}")
    return FormalSeries1D(tuple(series.coeffs[::q]))


# ---------------------------------------------------------------------------
# Gevrey order


@dataclass(frozen=True)
class GevreyEstimate:
    s: float
    A: float
    B: float
    rms: float  # residual of the least-squares fit in log scale
    used: int

    def bound(self, n: int) -> float:
        return self.A * self.B ** n * math.gamma(1 + self.s * n)


def gevrey_fit(series: FormalSeries1D, min_terms: int = 8) -> GevreyEstimate:
    """Least squares for log|f_n| ≈ s log Γ(1+n) + β log(1+n) + n log B + log A.

    The polynomial factor (1+n)^β only steadies the estimate of s; for the
    reported bound it is absorbed into B (when β > 0), and A is then raised
    so that |f_n| <= A B^n Γ(1 + s n) for every used n.
    """
    c = np.abs(series.numeric())
    idx = [n for n in range(len(c)) if c[n] > 0]
    if len(idx) < min_terms:
        raise ResummationError(f"need at least {min_terms} nonzero coefficients, got {len(idx)}")
    ns = np.array(idx, dtype=float)
    y = np.log(c[idx])
    lg = np.array([math.lgamma(1 + n) for n in ns])
    X = np.column_stack([lg, np.log1p(ns), ns, np.ones_like(ns)])
    (s, beta, logB, logA), *_ = np.linalg.lstsq(X, y, rcond=None)
    rms = float(np.sqrt(np.mean((X @ np.array([s, beta, logB, logA]) - y) ** 2)))
    s = max(float(s), 0.0)
    logB = float(logB) + max(float(beta), 0.0)
    fit = np.array([math.lgamma(1 + s * n) for n in ns]) + ns * logB
    logA = float(np.max(y - fit))
    return GevreyEstimate(s, math.exp(logA), math.exp(logB), rms, len(ns))


def gevrey_fit_multi(coeffs: Mapping[Tuple[int, ...], object], min_terms: int = 12) -> Tuple[GevreyEstimate, ...]:
    """Per-variable Gevrey orders of a several-variable series.

    Fits log|f_e| ≈ Σ_i (s_i log Γ(1+e_i) + β_i log(1+e_i) + e_i log B_i) + log A
    jointly over the nonzero coefficients and returns one estimate per
    variable. A is shared, chosen so |f_e| <= A Π_i B_i^{e_i} Γ(1 + s_i e_i)
    for every used e.
    """
    items = [(tuple(e), abs(complex(c))) for e, c in coeffs.items()]
    items = [(e, a) for e, a in items if a > 0]
    if len(items) < min_terms:
        raise ResummationError(f"need at least {min_terms} nonzero coefficients, got {len(items)}")
    d = len(items[0][0])
    E = np.array([e for e, _ in items], dtype=float)
    y = np.log([a for _, a in items])
    cols = []
    for i in range(d):
        cols += [[math.lgamma(1 + x) for x in E[:, i]], np.log1p(E[:, i]), E[:, i]]
    X = np.column_stack(cols + [np.ones(len(items))])
    sol, *_ = np.linalg.lstsq(X, y, rcond=None)
    rms = float(np.sqrt(np.mean((X @ sol - y) ** 2)))
    s = [max(float(sol[3 * i]), 0.0) for i in range(d)]
    logB = [float(sol[3 * i + 2]) + max(float(sol[3 * i + 1]), 0.0) for i in range(d)]
    fit = sum(np.array([math.lgamma(1 + s[i] * x) for x in E[:, i]]) + E[:, i] * logB[i] for i in range(d))
    A = math.exp(float(np.max(y - fit)))
    return tuple(GevreyEstimate(s[i], A, math.exp(logB[i]), rms, len(items)) for i in range(d))


# ---------------------------------------------------------------------------
# Borel transform and Padé approximants


def borel_transform(series: FormalSeries1D, k: float = 1) -> FormalSeries1D:
    """f_n -> f_n / Γ(1 + n/k); exact when k = 1 and the input is exact."""
    if k <= 0:
        raise ResummationError("k must be positive")
    if series.exact and k == 1:
        return FormalSeries1D(tuple(Gaussian.of(c) * Gaussian(Fraction(1, math.factorial(n)))
                                    for n, c in enumerate(series.coeffs)))
    c = series.numeric()
    return FormalSeries1D(tuple(complex(x) / math.gamma(1 + n / k) for n, x in enumerate(c)))


def inverse_borel(series: FormalSeries1D, k: float = 1) -> FormalSeries1D:
    if series.exact and k == 1:
        return FormalSeries1D(tuple(Gaussian.of(c) * Gaussian(math.factorial(n))
                                    for n, c in enumerate(series.coeffs)))
    c = series.numeric()
    return FormalSeries1D(tuple(complex(x) * math.gamma(1 + n / k) for n, x in enumerate(c)))


@dataclass(frozen=True)
class RationalFunction:
    """P(ζ)/Q(ζ) with ascending double-precision coefficients."""

    p: np.ndarray
    q: np.ndarray

    def __call__(self, x):
        return np.polyval(self.p[::-1], x) / np.polyval(self.q[::-1], x)

    def derivative(self, x):
        P, Q = self.p[::-1], self.q[::-1]
        dP, dQ = np.polyder(P), np.polyder(Q)
        pv, qv = np.polyval(P, x), np.polyval(Q, x)
        dpv = np.polyval(dP, x) if len(dP) else 0 * x
        dqv = np.polyval(dQ, x) if len(dQ) else 0 * x
        return (dpv * qv - pv * dqv) / qv ** 2


@dataclass(frozen=True)
class PadeApproximant:
    L: int
    M: int
    requested: Tuple[int, int]
    num: Tuple[object, ...]  # exact (Gaussian) or complex, ascending
    den: Tuple[object, ...]
    poles: Tuple[complex, ...]

    @property
    def reduced(self) -> bool:
        return (self.L, self.M) != self.requested

    def function(self) -> RationalFunction:
        conv = lambda v: np.array([complex(x) for x in v], dtype=complex)
        return RationalFunction(conv(self.num), conv(self.den))

    def pole_directions(self) -> List[float]:
        return [cmath.phase(p) for p in self.poles]


def _pade_exact(c: List[Gaussian], L: int, M: int):
    get = lambda i: c[i] if 0 <= i < len(c) else Gaussian(0)
    # Σ_{j=1..M} q_j c_{L+i−j} = −c_{L+i}, i = 1..M
    mat = [[get(L + i - j) for j in range(1, M + 1)] for i in range(1, M + 1)]
    rhs = [-get(L + i) for i in range(1, M + 1)]
    inv = _gauss_solve(mat)
    q = [Gaussian(1)] + [sum((inv[i][j] * rhs[j] for j in range(M)), Gaussian(0)) for i in range(M)]
    p = [sum((q[j] * get(i - j) for j in range(0, min(i, M) + 1)), Gaussian(0)) for i in range(L + 1)]
    return p, q


def _pade_numeric(c: np.ndarray, L: int, M: int):
    get = lambda i: c[i] if 0 <= i < len(c) else 0j
    mat = np.array([[get(L + i - j) for j in range(1, M + 1)] for i in range(1, M + 1)], dtype=complex)
    rhs = -np.array([get(L + i) for i in range(1, M + 1)], dtype=complex)
    if M and np.linalg.matrix_rank(mat) < M:
        raise SeriesError("rank-deficient Toeplitz system")
    sol = np.linalg.solve(mat, rhs) if M else np.zeros(0, dtype=complex)
    q = np.concatenate([[1.0 + 0j], sol])
    p = np.array([sum(q[j] * get(i - j) for j in range(0, min(i, M) + 1)) for i in range(L + 1)])
    return list(p), list(q)


def _trim(v):
    v = list(v)
    while len(v) > 1 and complex(v[-1]) == 0:
        v.pop()
    return v


def pade_continue(series: FormalSeries1D, L: int, M: int) -> PadeApproximant:
    """[L/M] Padé approximant; M is lowered until the linear system is regular."""
    if len(series) < L + M + 1:
        raise ResummationError(f"[{L}/{M}] needs {L + M + 1} coefficients, have {len(series)}")
    exact = series.exact
    c = series.gaussian() if exact else series.numeric()
    for mm in range(M, -1, -1):
        try:
            p, q = _pade_exact(c, L, mm) if exact else _pade_numeric(c, L, mm)
            break
        except SeriesError:
            continue
    q = _trim(q)
    p = _trim(p)
    qd = np.array([complex(x) for x in q])
    poles = tuple(complex(r) for r in np.roots(qd[::-1])) if len(qd) > 1 else ()
    return PadeApproximant(len(p) - 1 if any(complex(x) for x in p) else 0, len(q) - 1, (L, M),
                           tuple(p), tuple(q), tuple(sorted(poles, key=lambda z: (abs(z), cmath.phase(z)))))


def default_degrees(n: int) -> Tuple[int, int]:
    M = (n - 1) // 2
    return n - 1 - M, M


# ---------------------------------------------------------------------------
# sectors


@dataclass(frozen=True)
class Sector:
    a: float
    b: float
    r: float = math.inf

    def __post_init__(self):
        if not self.a < self.b:
            raise ResummationError("sector needs a < b")

    @property
    def d(self) -> float:
        return (self.a + self.b) / 2

    @property
    def opening(self) -> float:
        return self.b - self.a

    def contains_direction(self, theta: float) -> bool:
        t = (theta - self.a) % (2 * math.pi)
        return 0 < t < self.opening

    def contains(self, z: complex) -> bool:
        return abs(z) < self.r and self.contains_direction(cmath.phase(z))

    def as_dict(self) -> dict:
        return {"a": round(self.a, 12), "b": round(self.b, 12), "d": round(self.d, 12),
                "r": None if math.isinf(self.r) else self.r}


def _angle_dist(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


@dataclass(frozen=True)
class SectorChoice:
    tau_plus: float
    tau_minus: float
    eps: Tuple[float, ...]
    plus: Tuple[Sector, ...]
    minus: Tuple[Sector, ...]


def _pick_tau(center: float, singular: Sequence[float], eps: Sequence[float], kmax: float,
              grid: int = 720) -> Optional[float]:
    bound = math.pi / (2 * kmax) + min(eps) / 4
    blocked = lambda t: any(_angle_dist(t, th) < e for th in singular for e in [max(eps)])
    cands = sorted((i * bound / grid for i in range(-grid + 1, grid)), key=lambda t: (abs(t), -t))
    for off in cands:
        if not blocked(center + off):
            return center + off
    return None


def select_sectors(singular_directions: Sequence[float], k_orders: Sequence[float], q: int = 1,
                   eps0: float = 0.4, min_eps: float = 1e-4) -> SectorChoice:
    """Directions τ± near R^± avoiding the guard bands |θ − arg λ| < ε, with the
    nested intervals I_j^± of opening π/k_j + ε_j bisected by τ±.

    ε is halved until admissible directions exist; τ− is searched near π in
    the same way.  With a ramification q the directions are divided by q.
    """
    ks = sorted(k_orders)
    if not ks or ks[0] <= 0:
        raise ResummationError("need positive levels")
    eps_val = eps0
    while eps_val >= min_eps:
        eps = tuple(eps_val for _ in ks)
        tp = _pick_tau(0.0, singular_directions, eps, ks[-1])
        tm = _pick_tau(math.pi, singular_directions, eps, ks[-1])
        if tp is not None and tm is not None:
            plus = tuple(Sector(tp / q - (math.pi / k + e) / (2 * q), tp / q + (math.pi / k + e) / (2 * q)) for k, e in zip(ks, eps))
            tmq = tp / q + math.pi / q if q > 1 else tm
            minus = tuple(Sector(tmq - (math.pi / k + e) / (2 * q), tmq + (math.pi / k + e) / (2 * q)) for k, e in zip(ks, eps))
            return SectorChoice(tp / q, tmq, eps, plus, minus)
        eps_val /= 2
    raise ResummationError(f"no admissible direction near R^±; blocking directions {list(singular_directions)}")


# ---------------------------------------------------------------------------
# Laplace integral


@dataclass
class SectorialSum:
    z: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    k: float
    direction: float
    sector: Optional[Sector] = None
    derivative: Optional[np.ndarray] = None
    poles: Tuple[complex, ...] = ()
    pade: Tuple[int, int] = (0, 0)
    notes: List[str] = field(default_factory=list)

    def as_dict(self, digits: int = 12) -> dict:
        r = lambda x: round(float(x), digits)
        return {
            "k": self.k,
            "direction": r(self.direction),
            "pade": list(self.pade),
            "poles": [[r(p.real), r(p.imag)] for p in self.poles],
            "sector": None if self.sector is None else self.sector.as_dict(),
            "points": [
                {"z": [r(z.real), r(z.imag)], "value": [r(v.real), r(v.imag)], "error": float(f"{e:.3e}")}
                for z, v, e in zip(self.z, self.values, self.errors)
            ],
            "notes": list(self.notes),
        }


_LAG = {}
# the kernel e^{-x} is below 1e-30 beyond this, so nodes and poles past it are ignored
X_CUT = 70.0
# numpy's Gauss–Laguerre weights overflow to inf/nan beyond about 180 nodes
LAG_MAX = 128


def _laguerre(n: int):
    if n not in _LAG:
        _LAG[n] = np.polynomial.laguerre.laggauss(n)
    return _LAG[n]


def _laplace_point(f: RationalFunction, z: complex, k: float, d: float, n0: int, nmax: int, tol: float,
                   want_derivative: bool):
    """∫ along arg ζ = d of the order-k Laplace kernel.

    k = 1 uses Gauss–Laguerre in x = |ζ|/|z|.  For other k the integrand in
    x = (|ζ|/|z|)^k carries fractional powers x^{n/k}, so the integral is
    taken in r = x^{1/k} (where it is smooth) with composite Gauss–Legendre
    panels on [0, (X_CUT / Re c)^{1/k}].
    """
    theta = cmath.phase(z)
    c = cmath.exp(1j * k * (d - theta))
    if c.real <= 0:
        raise ResummationError(f"z = {z} is not in the half-plane of convergence for direction {d}")
    rz = abs(z)
    ck = c ** (1.0 / k)
    prev = None
    n = n0
    while True:
        if k == 1:
            x, wts = _laguerre(n)
            keep = x * c.real <= X_CUT
            r, kern = x[keep], wts[keep] * np.exp(-x[keep] * (c - 1)) * c
        else:
            r, wts = _legendre_panels(n // 8, (X_CUT / c.real) ** (1.0 / k))
            kern = wts * c * k * r ** (k - 1) * np.exp(-c * r ** k)
        zeta = rz * np.exp(1j * d) * r
        val = np.sum(kern * f(zeta))
        der = None
        if want_derivative:
            # d/dz B(z u) = u B'(z u) with u = c^{1/k} r
            der = np.sum(kern * ck * r * f.derivative(zeta))
        if prev is not None:
            err = abs(val - prev[0])
            if err <= tol * max(1.0, abs(val)) or 2 * n > min(nmax, LAG_MAX):
                return val, err, der
        prev = (val, der)
        n *= 2


def _legendre_panels(panels: int, R: float, nodes: int = 16):
    x, w = np.polynomial.legendre.leggauss(nodes)
    h = R / panels
    left = np.arange(panels) * h
    r = (left[:, None] + (x[None, :] + 1) * h / 2).ravel()
    return r, np.tile(w * h / 2, panels)


def laplace_sum(approx: PadeApproximant, k: float, d: float, z_grid: Sequence[complex], guard: float = 1e-3,
                n0: int = 32, nmax: int = LAG_MAX, tol: float = 1e-13, derivative: bool = False) -> SectorialSum:
    """Order-k Laplace integral of the continued Borel transform along arg ζ = d."""
    zs = np.array([complex(z) for z in z_grid])
    radius = float(np.max(np.abs(zs))) * (X_CUT / min(cmath.exp(1j * k * (d - cmath.phase(z))).real
                                                      for z in zs)) ** (1.0 / k) if len(zs) else 0.0
    on_ray = [p for p in approx.poles if _angle_dist(cmath.phase(p), d) < guard and abs(p) <= 1.01 * radius]
    if on_ray:
        raise PoleOnRay(d, on_ray)
    f = approx.function()
    vals, errs, ders = [], [], []
    for z in zs:
        v, e, dv = _laplace_point(f, z, k, d, n0, nmax, tol, derivative)
        vals.append(v)
        errs.append(e)
        ders.append(dv)
    return SectorialSum(zs, np.array(vals), np.array(errs), k, d,
                        derivative=np.array(ders) if derivative else None,
                        poles=approx.poles, pade=(approx.L, approx.M))


# ---------------------------------------------------------------------------
# k-summation


@dataclass(frozen=True)
class SummationProblem:
    series: FormalSeries1D
    k_orders: Tuple[float, ...] = (1.0,)
    q: int = 1
    direction: float = 0.0
    intervals: Tuple[Sector, ...] = ()
    decomposition: Tuple[FormalSeries1D, ...] = ()
    pade: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        ks = tuple(self.k_orders)
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ResummationError("levels must be increasing")
        for I, k in zip(self.intervals, ks):
            if I.opening <= math.pi / k:
                raise ResummationError(f"interval opening {I.opening:.4g} not larger than π/{k}")
        for I, J in zip(self.intervals, self.intervals[1:]):
            if not (I.a <= J.a and J.b <= I.b):
                raise ResummationError("intervals must be nested")
        if self.decomposition and len(self.decomposition) != len(ks):
            raise ResummationError("decomposition needs one series per level")


def _single_level(series: FormalSeries1D, k: float, q: int, d: float, z_grid, pade, derivative: bool) -> SectorialSum:
    if q > 1:
        # series in x = z^(1/q) with level k q
        xs = [complex(z) ** (1.0 / q) if abs(cmath.phase(complex(z))) < math.pi else complex(z) ** (1.0 / q)
              for z in z_grid]
        inner = _single_level(series, k * q, 1, d / q, xs, pade, derivative)
        if derivative:
            xs_a = np.array(xs)
            inner.derivative = inner.derivative * xs_a / (q * np.array([complex(z) for z in z_grid]))
        inner.z = np.array([complex(z) for z in z_grid])
        inner.k, inner.direction = k, d
        inner.notes.append(f"ramified with q = {q}")
        return inner
    B = borel_transform(series, k)
    L, M = pade if pade is not None else default_degrees(len(B))
    approx = pade_continue(B, L, M)
    out = laplace_sum(approx, k, d, z_grid, derivative=derivative)
    if approx.reduced:
        out.notes.append(f"Padé degree reduced from {list(approx.requested)} to {[approx.L, approx.M]}")
    return out


def k_sum(problem: SummationProblem, z_grid: Sequence[complex], derivative: bool = False) -> SectorialSum:
    ks = problem.k_orders
    if len(ks) > 1 and not problem.decomposition:
        raise ResummationError("multisummation with several levels needs an explicit decomposition")
    parts = problem.decomposition or (problem.series,)
    sums = [_single_level(s, k, problem.q, problem.direction, z_grid, problem.pade, derivative)
            for s, k in zip(parts, ks)]
    out = sums[0]
    for s in sums[1:]:
        out.values = out.values + s.values
        out.errors = out.errors + s.errors
        if derivative:
            out.derivative = out.derivative + s.derivative
        out.poles = out.poles + s.poles
    if problem.intervals:
        out.sector = problem.intervals[-1]
    else:
        k = ks[-1]
        out.sector = Sector(problem.direction - math.pi / (2 * k), problem.direction + math.pi / (2 * k))
    out.notes.append("singular directions are Padé pole arguments (proxy)")
    return out


# ---------------------------------------------------------------------------
# asymptotic verification


@dataclass(frozen=True)
class GevreyReport:
    passed: bool
    C: float
    poincare: bool
    slopes: Tuple[Optional[float], ...]
    nmax: int

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "C": None if not math.isfinite(self.C) else round(self.C, 6),
            "poincare": self.poincare,
            "slopes": [None if s is None else round(s, 3) for s in self.slopes],
            "nmax": self.nmax,
        }


def verify_gevrey_asymptotics(ssum: SectorialSum, series: FormalSeries1D, s: float, nmax: int = 15,
                              C_max: float = 1e3, floor: float = 1e-13) -> GevreyReport:
    """Fit the least C with |S(z) − Σ_{j<n} f_j z^j| <= C^n Γ(1+sn) |z|^n on the grid,
    and check the Poincaré property: the remainder after n terms must decay
    like |z|^n, so its log-log slope must exceed n − 3/4 (a mismatch at
    index j < n gives slope about j)."""
    z = ssum.z
    absz = np.abs(z)
    C = 0.0
    slopes: List[Optional[float]] = []
    poincare = True
    scale = max(1.0, float(np.max(np.abs(ssum.values))))
    for n in range(1, min(nmax, len(series)) + 1):
        R = np.abs(ssum.values - np.array([series.partial_sum(zz, n) for zz in z]))
        noise = floor * scale + ssum.errors
        ok = R > 10 * noise
        bound = math.gamma(1 + s * n) * absz ** n
        with np.errstate(divide="ignore"):
            Cn = (np.max(R[ok] / bound[ok]) ** (1.0 / n)) if np.any(ok) else 0.0
        C = max(C, float(Cn))
        if np.sum(ok) >= 2 and np.ptp(np.log(absz[ok])) > 0.3:
            # local slope at the two smallest moduli carrying signal
            i, j = np.argsort(np.where(ok, absz, np.inf))[:2]
            slope = float(np.log(R[j] / R[i]) / np.log(absz[j] / absz[i]))
            slopes.append(slope)
            if slope < n - 0.75:
                poincare = False
        else:
            slopes.append(None)
    passed = poincare and math.isfinite(C) and C <= C_max
    return GevreyReport(passed, C, poincare, tuple(slopes), nmax)


# ---------------------------------------------------------------------------
# numeric evaluation of exact series and ODE residuals


def numeric_series(s: TruncatedSeries) -> Callable[..., complex]:
    """Evaluate a truncated series (as a polynomial) at complex points."""
    terms = [(e, complex(c)) for e, c in s.terms()]

    def f(*x):
        tot = 0j
        for e, c in terms:
            t = c
            for xi, ei in zip(x, e):
                if ei:
                    t = t * xi ** ei
            tot += t
        return tot

    return f


def ode_residual(ssum: SectorialSum, m: int, rhs: Callable[[complex, complex], complex]) -> np.ndarray:
    """|z^m S'(z) − rhs(z, S(z))| on the grid; needs a sum computed with derivative=True."""
    if ssum.derivative is None:
        raise ResummationError("sum was computed without derivatives")
    return np.array([abs(z ** m * dv - rhs(z, v)) for z, v, dv in zip(ssum.z, ssum.values, ssum.derivative)])
