"""Exact multivariate rational functions over QQ.

Arithmetic is delegated to sympy's sparse fraction fields (gmpy2 ground
types when available); this module fixes the canonical form and the
variable-naming conventions used everywhere else (variables are x1..xn,
indices are 1-based).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from operator import add, mul, sub

from sympy import QQ
from sympy.polys.fields import FracElement, field
from sympy.polys.orderings import grlex

from ..errors import AmbientMismatchError, DivisionByZeroError, IndexOutOfRangeError

Polynomial = "sympy.polys.rings.PolyElement"


@lru_cache(maxsize=None)
def fraction_field(nvars: int):
    if nvars < 1:
        raise ValueError("need at least one variable")
    names = ",".join(f"x{i}" for i in range(1, nvars + 1))
    K, *_ = field(names, QQ, order=grlex)
    return K


def _to_qq(value):
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot use {value!r} as an exact rational")


class RatFunc:
    """Element of QQ(x1, ..., xn); immutable."""

    __slots__ = ("nvars", "_f")

    def __init__(self, nvars: int, elem: FracElement):
        self.nvars = nvars
        self._f = elem

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, nvars: int, value=0) -> "RatFunc":
        K = fraction_field(nvars)
        return cls(nvars, K(_to_qq(value)))

    @classmethod
    def var(cls, nvars: int, i: int) -> "RatFunc":
        if not 1 <= i <= nvars:
            raise IndexOutOfRangeError(f"variable x{i} out of range 1..{nvars}")
        K = fraction_field(nvars)
        return cls(nvars, K.gens[i - 1])

    @classmethod
    def gens(cls, nvars: int) -> tuple["RatFunc", ...]:
        return tuple(cls.var(nvars, i) for i in range(1, nvars + 1))

    def _coerce(self, other) -> FracElement:
        if isinstance(other, RatFunc):
            if other.nvars != self.nvars:
                raise AmbientMismatchError(
                    f"rational functions in {self.nvars} and {other.nvars} variables")
            return other._f
        return fraction_field(self.nvars)(_to_qq(other))

    # -- arithmetic ---------------------------------------------------
    def _poly_op(self, g, op):
        # both sides polynomial: skip the gcd-based normalisation
        f = self._f
        if f.denom == 1 and g.denom == 1:
            return RatFunc(self.nvars, f.field.raw_new(op(f.numer, g.numer), f.denom))
        return None

    def __add__(self, other):
        g = self._coerce(other)
        r = self._poly_op(g, add)
        return r if r is not None else RatFunc(self.nvars, self._f + g)

    __radd__ = __add__

    def __sub__(self, other):
        g = self._coerce(other)
        r = self._poly_op(g, sub)
        return r if r is not None else RatFunc(self.nvars, self._f - g)

    def __rsub__(self, other):
        return RatFunc(self.nvars, self._coerce(other) - self._f)

    def __mul__(self, other):
        g = self._coerce(other)
        r = self._poly_op(g, mul)
        return r if r is not None else RatFunc(self.nvars, self._f * g)

    __rmul__ = __mul__

    def __neg__(self):
        return RatFunc(self.nvars, -self._f)

    def __truediv__(self, other):
        d = self._coerce(other)
        if not d:
            raise DivisionByZeroError("division by the zero rational function")
        return RatFunc(self.nvars, self._f / d)

    def __rtruediv__(self, other):
        if not self._f:
            raise DivisionByZeroError("division by the zero rational function")
        return RatFunc(self.nvars, self._coerce(other) / self._f)

    def __pow__(self, k: int):
        if k < 0 and not self._f:
            raise DivisionByZeroError("negative power of zero")
        return RatFunc(self.nvars, self._f ** k)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.nvars == other.nvars and self._f == other._f
        try:
            return self._f == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, self._f))

    def __bool__(self):
        return bool(self._f)

    def is_zero(self) -> bool:
        return not self._f

    def is_constant(self) -> bool:
        return self._f.numer.is_ground and self._f.denom.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        n = self._f.numer.LC if self._f.numer else 0
        d = self._f.denom.LC
        return Fraction(int(n.numerator), int(n.denominator)) / Fraction(
            int(d.numerator), int(d.denominator))

    # -- calculus -----------------------------------------------------
    def partial(self, i: int) -> "RatFunc":
        if not 1 <= i <= self.nvars:
            raise IndexOutOfRangeError(f"no variable x{i} in {self.nvars} variables")
        K = fraction_field(self.nvars)
        return RatFunc(self.nvars, self._f.diff(K.gens[i - 1]))

    def subs(self, values) -> "RatFunc":
        """Substitute x_i -> values[i-1] (RatFuncs sharing one ambient)."""
        values = list(values)
        if len(values) != self.nvars:
            raise AmbientMismatchError("substitution needs one value per variable")
        target = values[0].nvars
        return _eval_poly(self._f.numer, values, target) / _eval_poly(
            self._f.denom, values, target)

    # -- canonical form -------------------------------------------------
    def numerator(self):
        lc = self._f.denom.LC
        return self._f.numer.quo_ground(lc)

    def denominator(self):
        lc = self._f.denom.LC
        return self._f.denom.quo_ground(lc)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        num, den = self.numerator(), self.denominator()
        if den == 1:
            return str(num)
        return f"({num})/({den})"


def _eval_poly(p, values, target_nvars) -> RatFunc:
    out = RatFunc.const(target_nvars, 0)
    for monom, coeff in p.terms():
        term = RatFunc.const(target_nvars, Fraction(int(coeff.numerator), int(coeff.denominator)))
        for v, e in zip(values, monom):
            if e:
                term = term * v ** e
        out = out + term
    return out


def ratfunc_normalize(numerator, denominator) -> RatFunc:
    """Reduce a raw fraction of polynomials (sympy PolyElements or RatFuncs)."""
    if isinstance(numerator, RatFunc) or isinstance(denominator, RatFunc):
        num = numerator if isinstance(numerator, RatFunc) else None
        den = denominator if isinstance(denominator, RatFunc) else None
        nvars = (num or den).nvars
        num = num if num is not None else RatFunc.const(nvars, numerator)
        den = den if den is not None else RatFunc.const(nvars, denominator)
        return num / den
    nvars = numerator.ring.ngens
    if not denominator:
        raise DivisionByZeroError("zero denominator")
    K = fraction_field(nvars)
    return RatFunc(nvars, K.new(numerator, denominator))


def partial(r: RatFunc, i: int) -> RatFunc:
    return r.partial(i)
