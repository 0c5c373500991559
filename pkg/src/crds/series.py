"""Truncated multivariate power series over the Gaussian rationals.

A series is stored graded: component ``d`` holds the homogeneous part of
weighted degree ``d`` as a pair of flint ``fmpq_mpoly`` (real part, imaginary
part).  Variables carry integer weights (default 1); weight-0 variables are
polynomial directions, which is how jet coordinates are handled.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import flint

INF = float("inf")


class SeriesError(ValueError):
    pass


class DivisionObstruction(SeriesError):
    """Raised when a series is not divisible by the requested power."""


class SingularJacobian(SeriesError):
    pass


# ---------------------------------------------------------------------------
# coefficients


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def _fmpq(x: Fraction) -> flint.fmpq:
    return flint.fmpq(x.numerator, x.denominator)


class Gaussian:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("Gaussian is immutable")

    @classmethod
    def of(cls, x) -> "Gaussian":
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, tuple) and len(x) == 2:
            return cls(x[0], x[1])
        if isinstance(x, complex):
            raise TypeError("float complex values are not exact; pass a (re, im) pair")
        return cls(x, 0)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, o):
        o = Gaussian.of(o)
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __sub__(self, o):
        o = Gaussian.of(o)
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return Gaussian.of(o) - self

    def __mul__(self, o):
        o = Gaussian.of(o)
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "Gaussian":
        return Gaussian(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "Gaussian":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return Gaussian(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * Gaussian.of(o).inverse()

    def __rtruediv__(self, o):
        return Gaussian.of(o) * self.inverse()

    def __pow__(self, n: int):
        out = Gaussian(1)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, o):
        try:
            o = Gaussian.of(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        return format_gaussian(self)


I = Gaussian(0, 1)
CoeffField = Gaussian


def _fmt_q(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_gaussian(c: Gaussian) -> str:
    sign = "-" if c.im < 0 else "+"
    return f"{_fmt_q(c.re)} {sign} {_fmt_q(abs(c.im))}·i"


_RAT = r"[+-]?\d+(?:/\d+)?"
_GAUSS_RE = re.compile(rf"^\s*({_RAT})?\s*(?:([+-])\s*(\d+(?:/\d+)?)\s*(?:·|\*)?\s*i)?\s*$")


def parse_gaussian(text: str) -> Gaussian:
    """Parse ``re + im·i`` (also ``re``, ``re - im*i``, ``+ im i``)."""
    t = text.strip()
    m = _GAUSS_RE.match(t)
    if not m or t == "":
        # a lone imaginary part like "3/4i" or "-i"
        m2 = re.match(rf"^\s*({_RAT})?\s*(?:·|\*)?\s*i\s*$", t)
        if m2:
            s = m2.group(1)
            if s in (None, "+"):
                return Gaussian(0, 1)
            if s == "-":
                return Gaussian(0, -1)
            return Gaussian(0, Fraction(s))
        raise SeriesError(f"bad coefficient {text!r}")
    re_s, sign, im_s = m.groups()
    re_v = Fraction(re_s) if re_s else Fraction(0)
    im_v = Fraction(0)
    if im_s is not None:
        im_v = Fraction(im_s) * (-1 if sign == "-" else 1)
    return Gaussian(re_v, im_v)


# ---------------------------------------------------------------------------
# rings


@lru_cache(maxsize=None)
def _ctx(names: Tuple[str, ...]):
    return flint.fmpq_mpoly_ctx.get(names, "lex")


class SeriesRing:
    """Variables, weights and truncation shared by a family of series."""

    __slots__ = ("vars", "weights", "ctx", "_zero")

    def __init__(self, vars: Sequence[str], weights: Optional[Sequence[int]] = None):
        vars = tuple(vars)
        if not vars:
            raise SeriesError("a series ring needs at least one variable")
        if len(set(vars)) != len(vars):
            raise SeriesError(f"repeated variable names in {vars}")
        if weights is None:
            weights = (1,) * len(vars)
        weights = tuple(int(x) for x in weights)
        if len(weights) != len(vars) or any(x < 0 for x in weights):
            raise SeriesError("weights must be non-negative, one per variable")
        self.vars = vars
        self.weights = weights
        self.ctx = _ctx(vars)
        self._zero = self.ctx.from_dict({})

    def __eq__(self, o):
        return isinstance(o, SeriesRing) and self.vars == o.vars and self.weights == o.weights

    def __hash__(self):
        return hash((self.vars, self.weights))

    def __repr__(self):
        if all(x == 1 for x in self.weights):
            return f"SeriesRing({list(self.vars)})"
        return f"SeriesRing({list(self.vars)}, weights={list(self.weights)})"

    def index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise SeriesError(f"unknown variable {name!r} (have {self.vars})") from None

    def grade(self, exp: Sequence[int]) -> int:
        return sum(e * w for e, w in zip(exp, self.weights))

    def zero(self, trunc: int) -> "TruncatedSeries":
        return TruncatedSeries._make(self, trunc, [self._zero] * (trunc + 1), None)

    def one(self, trunc: int) -> "TruncatedSeries":
        return self.const(1, trunc)

    def const(self, c, trunc: int) -> "TruncatedSeries":
        return self.from_dict({(0,) * len(self.vars): c}, trunc)

    def var(self, name: str, trunc: int) -> "TruncatedSeries":
        exp = [0] * len(self.vars)
        exp[self.index(name)] = 1
        return self.from_dict({tuple(exp): 1}, trunc)

    def gens(self, trunc: int) -> List["TruncatedSeries"]:
        return [self.var(v, trunc) for v in self.vars]

    def from_dict(self, coeffs: Mapping[Tuple[int, ...], object], trunc: int) -> "TruncatedSeries":
        if trunc < 0:
            raise SeriesError("truncation must be non-negative")
        re_parts: List[Dict] = [dict() for _ in range(trunc + 1)]
        im_parts: List[Dict] = [dict() for _ in range(trunc + 1)]
        n = len(self.vars)
        for exp, c in coeffs.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise SeriesError(f"bad exponent {exp} for variables {self.vars}")
            d = self.grade(exp)
            if d > trunc:
                continue
            c = Gaussian.of(c)
            if c.re:
                re_parts[d][exp] = re_parts[d].get(exp, 0) + _fmpq(c.re)
            if c.im:
                im_parts[d][exp] = im_parts[d].get(exp, 0) + _fmpq(c.im)
        re_c = [self.ctx.from_dict(p) for p in re_parts]
        im_c = [self.ctx.from_dict(p) for p in im_parts]
        return TruncatedSeries._make(self, trunc, re_c, im_c)


# ---------------------------------------------------------------------------
# series


class TruncatedSeries:
    """Exact power series known modulo terms of weighted degree > ``trunc``."""

    __slots__ = ("ring", "trunc", "_re", "_im", "_hash")

    def __init__(self, *a, **k):
        raise TypeError("build series through SeriesRing or TruncatedSeries.from_dict")

    @classmethod
    def _make(cls, ring: SeriesRing, trunc: int, re_c, im_c) -> "TruncatedSeries":
        s = object.__new__(cls)
        s.ring = ring
        s.trunc = trunc
        s._re = list(re_c)
        if im_c is not None and all(p.is_zero() for p in im_c):
            im_c = None
        s._im = None if im_c is None else list(im_c)
        s._hash = None
        return s

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_dict(cls, vars, trunc, coeffs, weights=None) -> "TruncatedSeries":
        return SeriesRing(vars, weights).from_dict(coeffs, trunc)

    @property
    def vars(self) -> Tuple[str, ...]:
        return self.ring.vars

    @property
    def weights(self) -> Tuple[int, ...]:
        return self.ring.weights

    def is_real(self) -> bool:
        return self._im is None

    def component(self, d: int) -> "TruncatedSeries":
        """Homogeneous part of weighted degree ``d``."""
        z = self.ring._zero
        re_c = [z] * (self.trunc + 1)
        im_c = [z] * (self.trunc + 1)
        if 0 <= d <= self.trunc:
            re_c[d] = self._re[d]
            if self._im is not None:
                im_c[d] = self._im[d]
        return TruncatedSeries._make(self.ring, self.trunc, re_c, im_c)

    # -- inspection -----------------------------------------------------------

    def terms(self) -> Iterator[Tuple[Tuple[int, ...], Gaussian]]:
        """Nonzero terms in sorted multi-index order."""
        return iter(sorted(self.to_dict().items()))

    def to_dict(self) -> Dict[Tuple[int, ...], Gaussian]:
        out: Dict[Tuple[int, ...], Gaussian] = {}
        for d in range(self.trunc + 1):
            for exp, c in self._re[d].to_dict().items():
                out[tuple(map(int, exp))] = Gaussian(_frac(c), 0)
            if self._im is not None:
                for exp, c in self._im[d].to_dict().items():
                    exp = tuple(map(int, exp))
                    old = out.get(exp)
                    out[exp] = Gaussian(old.re if old else 0, _frac(c))
        return out

    def coefficient(self, exp: Sequence[int]) -> Gaussian:
        exp = tuple(exp)
        d = self.ring.grade(exp)
        if d > self.trunc:
            raise SeriesError(f"exponent {exp} lies beyond truncation {self.trunc}")
        if d < 0:
            return Gaussian(0)
        re_v = self._re[d][exp]
        im_v = 0 if self._im is None else self._im[d][exp]
        return Gaussian(_frac(re_v), _frac(im_v))

    def constant_term(self) -> Gaussian:
        return self.coefficient((0,) * len(self.vars))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self._re) and self._im is None

    def __bool__(self):
        return not self.is_zero()

    def __len__(self):
        return len(self.to_dict())

    def valuation(self, var: Optional[str] = None):
        """Least weighted degree (or least degree in ``var``) of a nonzero term."""
        if var is None:
            for d in range(self.trunc + 1):
                if not self._re[d].is_zero() or (self._im is not None and not self._im[d].is_zero()):
                    return d
            return INF
        i = self.ring.index(var)
        best = INF
        for exp in self.to_dict():
            if exp[i] < best:
                best = exp[i]
        return best

    def __eq__(self, o):
        if not isinstance(o, TruncatedSeries):
            return NotImplemented
        if self.ring != o.ring or self.trunc != o.trunc:
            return False
        if self._re != o._re:
            return False
        if (self._im is None) != (o._im is None):
            return False
        return self._im is None or self._im == o._im

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.trunc, tuple(self.terms())))
        return self._hash

    def equal_to(self, o: "TruncatedSeries") -> bool:
        """Equality after truncating both sides to the common truncation."""
        t = min(self.trunc, o.trunc)
        return self.truncate(t) == o.truncate(t)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, o: "TruncatedSeries"):
        if self.ring != o.ring:
            raise SeriesError(f"variable mismatch: {self.ring} vs {o.ring}")

    def _coerce(self, o) -> "TruncatedSeries":
        if isinstance(o, TruncatedSeries):
            self._check(o)
            return o
        return self.ring.const(o, self.trunc)

    def truncate(self, t: int) -> "TruncatedSeries":
        if t >= self.trunc:
            return self
        if t < 0:
            raise SeriesError("negative truncation")
        im = None if self._im is None else self._im[: t + 1]
        return TruncatedSeries._make(self.ring, t, self._re[: t + 1], im)

    def __add__(self, o):
        o = self._coerce(o)
        t = min(self.trunc, o.trunc)
        re_c = [self._re[d] + o._re[d] for d in range(t + 1)]
        if self._im is None and o._im is None:
            im_c = None
        elif self._im is None:
            im_c = o._im[: t + 1]
        elif o._im is None:
            im_c = self._im[: t + 1]
        else:
            im_c = [self._im[d] + o._im[d] for d in range(t + 1)]
        return TruncatedSeries._make(self.ring, t, re_c, im_c)

    __radd__ = __add__

    def __neg__(self):
        im = None if self._im is None else [-p for p in self._im]
        return TruncatedSeries._make(self.ring, self.trunc, [-p for p in self._re], im)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def scale(self, c) -> "TruncatedSeries":
        c = Gaussian.of(c)
        r, s = _fmpq(c.re), _fmpq(c.im)
        if self._im is None:
            re_c = [p * r for p in self._re]
            im_c = None if c.im == 0 else [p * s for p in self._re]
        else:
            re_c = [self._re[d] * r - self._im[d] * s for d in range(self.trunc + 1)]
            im_c = [self._re[d] * s + self._im[d] * r for d in range(self.trunc + 1)]
        return TruncatedSeries._make(self.ring, self.trunc, re_c, im_c)

    def mul_trunc(self, o: "TruncatedSeries", t: int) -> "TruncatedSeries":
        """Product known up to degree ``min(t, trunc_a, trunc_b)``."""
        self._check(o)
        t = min(t, self.trunc, o.trunc)
        z = self.ring._zero
        a_re, b_re = self._re, o._re
        a_im, b_im = self._im, o._im
        a_nz = [i for i in range(t + 1) if not a_re[i].is_zero() or (a_im is not None and not a_im[i].is_zero())]
        b_nz = [j for j in range(t + 1) if not b_re[j].is_zero() or (b_im is not None and not b_im[j].is_zero())]
        re_c = [z] * (t + 1)
        im_c = [z] * (t + 1) if (a_im is not None or b_im is not None) else None
        for i in a_nz:
            for j in b_nz:
                d = i + j
                if d > t:
                    break
                re_c[d] = re_c[d] + a_re[i] * b_re[j]
                if a_im is not None and b_im is not None:
                    re_c[d] = re_c[d] - a_im[i] * b_im[j]
                if im_c is not None:
                    if a_im is not None:
                        im_c[d] = im_c[d] + a_im[i] * b_re[j]
                    if b_im is not None:
                        im_c[d] = im_c[d] + a_re[i] * b_im[j]
        return TruncatedSeries._make(self.ring, t, re_c, im_c)

    def __mul__(self, o):
        if not isinstance(o, TruncatedSeries):
            return self.scale(o)
        return self.mul_trunc(o, min(self.trunc, o.trunc))

    def __rmul__(self, o):
        return self.scale(o)

    def __pow__(self, n: int):
        if n < 0:
            return self.invert_unit() ** (-n)
        out = self.ring.one(self.trunc)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __truediv__(self, o):
        if isinstance(o, TruncatedSeries):
            return self * o.invert_unit()
        return self.scale(Gaussian(1) / Gaussian.of(o))

    def conjugate(self) -> "TruncatedSeries":
        im = None if self._im is None else [-p for p in self._im]
        return TruncatedSeries._make(self.ring, self.trunc, self._re, im)

    def real_part(self) -> "TruncatedSeries":
        return TruncatedSeries._make(self.ring, self.trunc, self._re, None)

    def imag_part(self) -> "TruncatedSeries":
        im = self._im if self._im is not None else [self.ring._zero] * (self.trunc + 1)
        return TruncatedSeries._make(self.ring, self.trunc, im, None)

    def invert_unit(self) -> "TruncatedSeries":
        parts = [self._re[0]] + ([] if self._im is None else [self._im[0]])
        if any(p.total_degree() > 0 for p in parts):
            raise SeriesError("degree-0 part is not a constant; cannot invert")
        a0 = self.constant_term()
        if a0.is_zero():
            raise SeriesError("zero constant term: not a unit")
        b = self.ring.const(a0.inverse(), self.trunc)
        prec = 0
        while prec < self.trunc:
            prec = min(2 * prec + 1, self.trunc)
            b = _pad(b, prec)
            ab = self.mul_trunc(b, prec)
            b = b.mul_trunc(2 - ab, prec)
        return _pad(b, self.trunc)

    # -- calculus -------------------------------------------------------------

    def partial_derivative(self, var: str) -> "TruncatedSeries":
        i = self.ring.index(var)
        w = self.ring.weights[i]
        t = self.trunc - w
        if t < 0:
            raise SeriesError(f"truncation {self.trunc} too low to differentiate in {var}")
        z = self.ring._zero
        re_c = [z] * (t + 1)
        im_c = None if self._im is None else [z] * (t + 1)
        for d in range(w, self.trunc + 1):
            re_c[d - w] = self._re[d].derivative(i)
            if im_c is not None:
                im_c[d - w] = self._im[d].derivative(i)
        return TruncatedSeries._make(self.ring, t, re_c, im_c)

    diff = partial_derivative

    def divide_by_power(self, var: str, k: int) -> "TruncatedSeries":
        """Exact quotient by ``var**k``; raises DivisionObstruction otherwise."""
        if k == 0:
            return self
        i = self.ring.index(var)
        w = self.ring.weights[i]
        out = {}
        for exp, c in self.to_dict().items():
            if exp[i] < k:
                raise DivisionObstruction(
                    f"term {exp} has {var}-degree {exp[i]} < {k}")
            e = list(exp)
            e[i] -= k
            out[tuple(e)] = c
        t = self.trunc - k * w
        if t < 0:
            raise SeriesError(f"truncation {self.trunc} too low to divide by {var}^{k}")
        return self.ring.from_dict(out, t)

    def multiply_by_power(self, var: str, k: int) -> "TruncatedSeries":
        i = self.ring.index(var)
        out = {}
        for exp, c in self.to_dict().items():
            e = list(exp)
            e[i] += k
            out[tuple(e)] = c
        return self.ring.from_dict(out, self.trunc + k * self.ring.weights[i])

    # -- substitution ---------------------------------------------------------

    def compose(self, inner: Sequence["TruncatedSeries"]) -> "TruncatedSeries":
        """Substitute ``inner[i]`` for the i-th variable."""
        return compose(self, inner)

    def __call__(self, *inner: "TruncatedSeries") -> "TruncatedSeries":
        return compose(self, inner)

    def slice(self, fixed: Mapping[str, int]) -> "TruncatedSeries":
        """Coefficient of a monomial in some variables, as a series in the rest."""
        idx = {self.ring.index(v): e for v, e in fixed.items()}
        keep = [i for i in range(len(self.vars)) if i not in idx]
        if not keep:
            raise SeriesError("slice must leave at least one variable")
        ring = SeriesRing([self.vars[i] for i in keep], [self.weights[i] for i in keep])
        shift = sum(self.weights[i] * e for i, e in idx.items())
        out = {}
        for exp, c in self.to_dict().items():
            if all(exp[i] == e for i, e in idx.items()):
                out[tuple(exp[i] for i in keep)] = c
        t = self.trunc - shift
        if t < 0:
            return ring.zero(0)
        return ring.from_dict(out, t)

    def embed(self, ring: SeriesRing, trunc: Optional[int] = None) -> "TruncatedSeries":
        """Re-express in a ring whose variables include ours (matched by name)."""
        pos = [ring.index(v) for v in self.vars]
        for v, j in zip(self.vars, pos):
            if ring.weights[j] != self.weights[self.vars.index(v)]:
                raise SeriesError(f"weight of {v} differs between rings")
        n = len(ring.vars)
        out = {}
        for exp, c in self.to_dict().items():
            e = [0] * n
            for k, j in enumerate(pos):
                e[j] = exp[k]
            out[tuple(e)] = c
        return ring.from_dict(out, self.trunc if trunc is None else min(trunc, self.trunc))

    def restrict(self, ring: SeriesRing) -> "TruncatedSeries":
        """Set variables absent from ``ring`` to zero."""
        pos = {v: i for i, v in enumerate(self.vars)}
        for v in ring.vars:
            if v not in pos:
                raise SeriesError(f"{v} is not a variable of this series")
        drop = [i for i, v in enumerate(self.vars) if v not in ring.vars]
        out = {}
        for exp, c in self.to_dict().items():
            if any(exp[i] for i in drop):
                continue
            out[tuple(exp[pos[v]] for v in ring.vars)] = c
        return ring.from_dict(out, self.trunc)

    def rename(self, mapping: Mapping[str, str]) -> "TruncatedSeries":
        ring = SeriesRing([mapping.get(v, v) for v in self.vars], self.weights)
        return ring.from_dict(self.to_dict(), self.trunc)

    # -- text form ------------------------------------------------------------

    def to_text(self) -> str:
        head = f"vars: {', '.join(self.vars)}; trunc: {self.trunc}"
        if any(x != 1 for x in self.weights):
            head += f"; weights: {', '.join(map(str, self.weights))}"
        body = [f"[({', '.join(map(str, e))}) -> {format_gaussian(c)}]" for e, c in self.terms()]
        return "\n".join([head] + body)

    @classmethod
    def from_text(cls, text: str) -> "TruncatedSeries":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise SeriesError("empty series text")
        head = dict(part.split(":", 1) for part in lines[0].split(";"))
        head = {k.strip(): v.strip() for k, v in head.items()}
        vars = [v.strip() for v in head["vars"].split(",")]
        weights = None
        if "weights" in head:
            weights = [int(x) for x in head["weights"].split(",")]
        ring = SeriesRing(vars, weights)
        coeffs = {}
        for ln in lines[1:]:
            exp, c = parse_term(ln)
            coeffs[exp] = Gaussian.of(coeffs.get(exp, 0)) + c
        return ring.from_dict(coeffs, int(head["trunc"]))

    def __repr__(self):
        ts = list(self.terms())
        shown = " + ".join(f"({format_gaussian(c)})*{e}" for e, c in ts[:6])
        more = " + ..." if len(ts) > 6 else ""
        return f"<TruncatedSeries {list(self.vars)} trunc={self.trunc}: {shown or '0'}{more}>"


_TERM_RE = re.compile(r"^\[?\s*\(([^)]*)\)\s*->\s*(.*?)\s*\]?$")


def parse_term(text: str) -> Tuple[Tuple[int, ...], Gaussian]:
    m = _TERM_RE.match(text.strip())
    if not m:
        raise SeriesError(f"bad term {text!r}")
    exp = tuple(int(x) for x in m.group(1).replace(" ", "").split(",") if x != "")
    return exp, parse_gaussian(m.group(2))


# ---------------------------------------------------------------------------
# composition


def compose(outer: TruncatedSeries, inner: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """Substitute inner series for the variables of ``outer``.

    Inner series for positive-weight variables must have valuation at least the
    variable's weight (in particular no constant term).  Weight-0 variables
    accept arbitrary inner series.
    """
    inner = list(inner)
    n = len(outer.vars)
    if len(inner) != n:
        raise SeriesError(f"need {n} inner series, got {len(inner)}")
    ring = inner[0].ring
    for s in inner[1:]:
        if s.ring != ring:
            raise SeriesError("inner series must share one ring")
    vals = []
    for i, s in enumerate(inner):
        v = s.valuation()
        w = outer.weights[i]
        if w > 0 and v < w:
            raise SeriesError(
                f"inner series for {outer.vars[i]} has a nonzero constant term"
                if v == 0 else f"inner series for {outer.vars[i]} has valuation {v} < weight {w}")
        vals.append(min(v, outer.trunc + 1) if v != INF else outer.trunc + 1)
    T = min([outer.trunc] + [s.trunc for s in inner])
    items = [(e, c) for e, c in outer.to_dict().items() if outer.ring.grade(e) <= T]
    if not items:
        return ring.zero(T)

    powers: List[List[TruncatedSeries]] = [[ring.one(T)] for _ in range(n)]

    def power(i: int, e: int) -> TruncatedSeries:
        p = powers[i]
        while len(p) <= e:
            p.append(p[-1] * inner[i].truncate(T))
        return p[e]

    def rec(its, i: int, t: int) -> TruncatedSeries:
        if t < 0:
            return ring.zero(0)
        if i == n - 1:
            acc = ring.zero(t)
            for e, c in its:
                if e[i] * vals[i] > t:
                    continue
                acc = acc + power(i, e[i]).truncate(t).scale(c)
            return acc
        groups: Dict[int, list] = {}
        for e, c in its:
            groups.setdefault(e[i], []).append((e, c))
        acc = ring.zero(t)
        for k in sorted(groups):
            lo = k * vals[i]
            if lo > t:
                continue
            sub = rec(groups[k], i + 1, t - lo)
            if sub.is_zero():
                continue
            if k == 0:
                acc = acc + _pad(sub, t)
            else:
                acc = acc + power(i, k).mul_trunc(_pad(sub, t), t)
        return acc

    out = rec(items, 0, T)
    return _pad(out, T)


def _pad(s: TruncatedSeries, t: int) -> TruncatedSeries:
    """Pretend ``s`` (exact beyond its truncation by context) is known to ``t``."""
    if s.trunc >= t:
        return s.truncate(t)
    z = s.ring._zero
    re_c = list(s._re) + [z] * (t - s.trunc)
    im_c = None if s._im is None else list(s._im) + [z] * (t - s.trunc)
    return TruncatedSeries._make(s.ring, t, re_c, im_c)


# ---------------------------------------------------------------------------
# implicit functions


def _gauss_solve(mat: List[List[Gaussian]]) -> List[List[Gaussian]]:
    """Exact inverse of a square Gaussian-rational matrix."""
    n = len(mat)
    a = [list(row) + [Gaussian(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise SingularJacobian("Jacobian at the origin is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def matrix_inverse(mat: List[List[TruncatedSeries]]) -> List[List[TruncatedSeries]]:
    """Inverse of a square matrix of series whose value at 0 is invertible."""
    n = len(mat)
    ring = mat[0][0].ring
    t = min(x.trunc for row in mat for x in row)
    m0 = _gauss_solve([[x.constant_term() for x in row] for row in mat])
    inv = [[ring.const(m0[i][j], t) for j in range(n)] for i in range(n)]
    prec = 0
    while prec < t:
        prec = min(2 * prec + 1, t)
        inv = [[_pad(x, prec) for x in row] for row in inv]
        ai = _matmul(mat, inv, prec)
        corr = [[(2 if i == j else 0) - ai[i][j] for j in range(n)] for i in range(n)]
        inv = _matmul(inv, corr, prec)
    return inv


def _matmul(a, b, t):
    n, k, m = len(a), len(b), len(b[0])
    ring = a[0][0].ring
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ring.zero(t)
            for l in range(k):
                acc = acc + a[i][l].mul_trunc(b[l][j], t)
            row.append(acc)
        out.append(row)
    return out


def solve_implicit(system: Sequence[TruncatedSeries], y_count: int) -> List[TruncatedSeries]:
    """Solve ``system(x, y) = 0`` for ``y(x)`` with ``y(0) = 0`` by Newton iteration.

    The last ``y_count`` variables of the system ring are the unknowns; the
    result lives in the ring of the remaining (x) variables.
    """
    system = list(system)
    if len(system) != y_count:
        raise SeriesError("need as many equations as unknowns")
    ring = system[0].ring
    nx = len(ring.vars) - y_count
    if nx < 1:
        raise SeriesError("no independent variables left")
    if any(w != 1 for w in ring.weights):
        raise SeriesError("solve_implicit expects unit weights")
    for f in system:
        if f.ring != ring:
            raise SeriesError("equations must share one ring")
        if not f.constant_term().is_zero():
            raise SeriesError("system does not vanish at the origin")
    T = min(f.trunc for f in system)
    xring = SeriesRing(ring.vars[:nx])
    yvars = ring.vars[nx:]
    jac = [[f.partial_derivative(v) for v in yvars] for f in system]
    j0 = [[x.constant_term() for x in row] for row in jac]
    _gauss_solve(j0)  # raises on singular Jacobian

    xs = xring.gens(T)
    y = [xring.zero(T) for _ in range(y_count)]
    err = 1  # current y is correct modulo degree err
    while err <= T:
        t = min(T, 2 * err - 1 + 1)
        args = [x.truncate(t) for x in xs] + [yi.truncate(t) for yi in y]
        res = [compose(f.truncate(t), args) for f in system]
        if all(r.is_zero() for r in res) and t == T:
            break
        jt = min(t, t - err + 1)
        jargs = [a.truncate(jt) for a in args]
        jm = [[compose(d.truncate(jt), jargs) for d in row] for row in jac]
        jinv = matrix_inverse(jm)
        delta = [xring.zero(t) for _ in range(y_count)]
        for i in range(y_count):
            for j in range(y_count):
                delta[i] = delta[i] + _pad(jinv[i][j], t).mul_trunc(res[j], t)
        y = [_pad(yi, T) - _pad(di, T) for yi, di in zip(y, delta)]
        err = 2 * err
        if t == T and err > T:
            break
    y = [yi.truncate(T) for yi in y]
    args = xs + y
    for f in system:
        if not compose(f, args).is_zero():
            raise SeriesError("Newton iteration failed to converge")
    return y
