"""Small exact algebras used by the Y-system evaluator.

``USeries`` is a univariate Gaussian-rational series in w backed by
``fmpq_poly``; ``Tangent`` adds first-order tangent parts (dual numbers in
several directions); ``BlockPoly`` is a polynomial in z and ζ truncated to
z-degree 1 and ζ-degree 3 with coefficients in either of them.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import flint

from .series import Gaussian, SeriesError, SeriesRing, TruncatedSeries, _fmpq

W1 = SeriesRing(["w"])


def _q(p: Optional[flint.fmpq_poly]) -> flint.fmpq_poly:
    return p if p is not None else flint.fmpq_poly(0)


class USeries:
    __slots__ = ("re", "im", "t")

    def __init__(self, re: flint.fmpq_poly, im: Optional[flint.fmpq_poly], t: int):
        n = t + 1
        self.re = re.truncate(n) if re.length() > n else re
        if im is not None:
            im = im.truncate(n) if im.length() > n else im
            if im.is_zero():
                im = None
        self.im = im
        self.t = t

    @classmethod
    def of(cls, s: TruncatedSeries) -> "USeries":
        if len(s.vars) != 1:
            raise SeriesError("USeries needs a one-variable series")
        re = [flint.fmpq(0)] * (s.trunc + 1)
        im = [flint.fmpq(0)] * (s.trunc + 1)
        for (d,), c in s.to_dict().items():
            re[d] = _fmpq(c.re)
            im[d] = _fmpq(c.im)
        return cls(flint.fmpq_poly(re), flint.fmpq_poly(im), s.trunc)

    def to_series(self, ring: SeriesRing = W1) -> TruncatedSeries:
        out = {}
        for d in range(self.t + 1):
            re = self.re[d] if d < self.re.length() else 0
            im = self.im[d] if self.im is not None and d < self.im.length() else 0
            c = Gaussian(_frac(re), _frac(im))
            if not c.is_zero():
                out[(d,)] = c
        return ring.from_dict(out, self.t)

    def const(self, c, t: Optional[int] = None) -> "USeries":
        c = Gaussian.of(c)
        return USeries(flint.fmpq_poly([_fmpq(c.re)]), flint.fmpq_poly([_fmpq(c.im)]), self.t if t is None else t)

    def zero(self) -> "USeries":
        return USeries(flint.fmpq_poly(0), None, self.t)

    def var(self) -> "USeries":
        return USeries(flint.fmpq_poly([0, 1]), None, self.t)

    def cap(self, t: int) -> "USeries":
        return self if t >= self.t else USeries(self.re, self.im, t)

    def _co(self, o) -> "USeries":
        return o if isinstance(o, USeries) else self.const(o)

    def __add__(self, o):
        o = self._co(o)
        im = None if self.im is None and o.im is None else _q(self.im) + _q(o.im)
        return USeries(self.re + o.re, im, min(self.t, o.t))

    __radd__ = __add__

    def __neg__(self):
        return USeries(-self.re, None if self.im is None else -self.im, self.t)

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, USeries):
            return self.scale(o)
        t = min(self.t, o.t)
        n = t + 1
        re = self.re.mul_low(o.re, n)
        im = None
        if self.im is not None and o.im is not None:
            re = re - self.im.mul_low(o.im, n)
        if self.im is not None:
            im = self.im.mul_low(o.re, n)
        if o.im is not None:
            x = self.re.mul_low(o.im, n)
            im = x if im is None else im + x
        return USeries(re, im, t)

    __rmul__ = __mul__

    def scale(self, c) -> "USeries":
        c = Gaussian.of(c)
        a, b = _fmpq(c.re), _fmpq(c.im)
        re = self.re * a
        im = None
        if self.im is not None:
            re = re - self.im * b
            im = self.im * a
        if b != 0:
            x = self.re * b
            im = x if im is None else im + x
        return USeries(re, im, self.t)

    def shift(self, k: int) -> "USeries":
        """Multiply by w^k (exact, raises the truncation)."""
        return USeries(self.re.left_shift(k), None if self.im is None else self.im.left_shift(k), self.t + k)

    def conj(self) -> "USeries":
        return USeries(self.re, None if self.im is None else -self.im, self.t)

    def coeff(self, d: int) -> Gaussian:
        re = self.re[d] if d < self.re.length() else 0
        im = self.im[d] if self.im is not None and d < self.im.length() else 0
        return Gaussian(_frac(re), _frac(im))

    def constant(self) -> Gaussian:
        return self.coeff(0)

    def inv(self) -> "USeries":
        c = self.constant()
        if c.is_zero():
            raise SeriesError("not a unit")
        x = self.const(c.inverse(), 0)
        prec = 0
        two = self.const(2)
        while prec < self.t:
            prec = min(2 * prec + 1, self.t)
            x = USeries(x.re, x.im, prec)
            x = x * (two - self.cap(prec) * x)
        return x.cap(self.t)

    def __pow__(self, n: int):
        out = self.const(1)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im is None


def _frac(q):
    from fractions import Fraction
    return Fraction(int(q.p), int(q.q)) if hasattr(q, "p") else Fraction(q)


class Tangent:
    """base + Σ ε_i tan[i] with ε_i ε_j = 0."""

    __slots__ = ("base", "tan")

    def __init__(self, base: USeries, tan: Sequence[Optional[USeries]]):
        self.base = base
        self.tan = list(tan)

    @property
    def t(self) -> int:
        return self.base.t

    def _co(self, o) -> "Tangent":
        if isinstance(o, Tangent):
            return o
        if isinstance(o, USeries):
            return Tangent(o, [None] * len(self.tan))
        return Tangent(self.base.const(o), [None] * len(self.tan))

    def const(self, c, t=None):
        return Tangent(self.base.const(c, t), [None] * len(self.tan))

    def zero(self):
        return Tangent(self.base.zero(), [None] * len(self.tan))

    def cap(self, t):
        return Tangent(self.base.cap(t), [None if x is None else x.cap(t) for x in self.tan])

    def __add__(self, o):
        o = self._co(o)
        tan = [a if b is None else b if a is None else a + b for a, b in zip(self.tan, o.tan)]
        return Tangent(self.base + o.base, tan)

    __radd__ = __add__

    def __neg__(self):
        return Tangent(-self.base, [None if x is None else -x for x in self.tan])

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, (Tangent, USeries)):
            return self.scale(o)
        o = self._co(o)
        tan = []
        for a, b in zip(self.tan, o.tan):
            x = None
            if a is not None:
                x = a * o.base
            if b is not None:
                y = self.base * b
                x = y if x is None else x + y
            tan.append(x)
        return Tangent(self.base * o.base, tan)

    __rmul__ = __mul__

    def scale(self, c):
        return Tangent(self.base.scale(c), [None if x is None else x.scale(c) for x in self.tan])

    def shift(self, k):
        return Tangent(self.base.shift(k), [None if x is None else x.shift(k) for x in self.tan])

    def constant(self) -> Gaussian:
        return self.base.constant()

    def inv(self):
        b = self.base.inv()
        nb2 = -(b * b)
        return Tangent(b, [None if x is None else x * nb2 for x in self.tan])

    def __pow__(self, n: int):
        out = self.const(1)
        for _ in range(n):
            out = out * self
        return out

    def part(self, i: int) -> USeries:
        x = self.tan[i]
        return self.base.zero() if x is None else x


AMAX, BMAX = 1, 3


class BlockPoly:
    """Σ c_ab z^a ζ^b with a <= 1, b <= 3 and coefficients in USeries or Tangent."""

    __slots__ = ("b", "proto")

    def __init__(self, blocks: Dict[Tuple[int, int], object], proto):
        self.b = {k: v for k, v in blocks.items() if k[0] <= AMAX and k[1] <= BMAX}
        self.proto = proto

    @classmethod
    def scalar(cls, s) -> "BlockPoly":
        return cls({(0, 0): s}, s)

    @classmethod
    def z(cls, proto) -> "BlockPoly":
        return cls({(1, 0): proto.const(1)}, proto)

    @classmethod
    def zeta(cls, proto) -> "BlockPoly":
        return cls({(0, 1): proto.const(1)}, proto)

    def block(self, a: int, b: int):
        return self.b.get((a, b), self.proto.zero())

    def _co(self, o) -> "BlockPoly":
        if isinstance(o, BlockPoly):
            return o
        if isinstance(o, (USeries, Tangent)):
            return BlockPoly({(0, 0): o}, self.proto)
        return BlockPoly({(0, 0): self.proto.const(o)}, self.proto)

    def __add__(self, o):
        o = self._co(o)
        out = dict(self.b)
        for k, v in o.b.items():
            out[k] = out[k] + v if k in out else v
        return BlockPoly(out, self.proto)

    __radd__ = __add__

    def __neg__(self):
        return BlockPoly({k: -v for k, v in self.b.items()}, self.proto)

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, (BlockPoly, USeries, Tangent)):
            return self.scale(o)
        o = self._co(o)
        out: Dict[Tuple[int, int], object] = {}
        for (a1, b1), x in self.b.items():
            for (a2, b2), y in o.b.items():
                k = (a1 + a2, b1 + b2)
                if k[0] > AMAX or k[1] > BMAX:
                    continue
                p = x * y
                out[k] = out[k] + p if k in out else p
        return BlockPoly(out, self.proto)

    __rmul__ = __mul__

    def scale(self, c):
        return BlockPoly({k: v.scale(c) for k, v in self.b.items()}, self.proto)

    def __pow__(self, n: int):
        out = self._co(1)
        for _ in range(n):
            out = out * self
        return out

    def invert_unit(self) -> "BlockPoly":
        u = self.block(0, 0).inv()
        rest = BlockPoly({k: v for k, v in self.b.items() if k != (0, 0)}, self.proto)
        x = rest * u
        term = self._co(1)
        acc = self._co(1)
        for _ in range(AMAX + BMAX):
            term = -(term * x)
            acc = acc + term
        return acc * u

    def cap_blocks(self, N: int) -> "BlockPoly":
        """Cap block (a, b) at w-degree N − a − b."""
        return BlockPoly({k: v.cap(N - k[0] - k[1]) for k, v in self.b.items()}, self.proto)

    def substitute(self, outer: TruncatedSeries, inner: Sequence["BlockPoly"]) -> "BlockPoly":
        """outer(inner...) for outer in three weight-1 variables.

        Requires the (0, 0)-blocks of the inner values to vanish at w = 0; then
        unknown terms of outer beyond its truncation N only reach block (a, b)
        at w-degree > N − a − b, and the result is capped accordingly.
        """
        if len(inner) != 3:
            raise SeriesError("substitute expects three inner values")
        for x in inner:
            c = x.block(0, 0)
            parts = [c.base] + [y for y in c.tan if y is not None] if isinstance(c, Tangent) else [c]
            if any(not y.constant().is_zero() for y in parts):
                raise SeriesError("inner value has a constant term")
        N = outer.trunc
        terms = outer.to_dict()
        groups: Dict[Tuple[int, int], List[Tuple[int, Gaussian]]] = {}
        for (e0, e1, e2), c in terms.items():
            groups.setdefault((e0, e1), []).append((e2, c))
        pw = [[self._co(1)] for _ in range(3)]

        def power(i, e):
            p = pw[i]
            while len(p) <= e:
                p.append(p[-1] * inner[i])
            return p[e]

        acc = self._co(0)
        for (e0, e1), lst in sorted(groups.items()):
            s = self._co(0)
            for e2, c in lst:
                s = s + power(2, e2).scale(c)
            acc = acc + power(0, e0) * power(1, e1) * s
        return acc.cap_blocks(N)
