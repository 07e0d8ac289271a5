"""Truncated two-variable series in u = y^(1/2) and q.

A UQSeries holds exact rational coefficients of u^a q^b for 0 <= b <= N;
each q-level carries a finite Laurent polynomial in u.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import SeriesInversionError


class UQSeries:
    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Mapping[tuple[int, int], object] | None = None):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.order = order
        clean = {}
        for (a, b), c in (coeffs or {}).items():
            if b < 0:
                raise ValueError("negative q-exponent")
            if b > order:
                continue
            c = Fraction(c)
            if c:
                clean[(int(a), int(b))] = c
        self.coeffs = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, order: int, c=1) -> "UQSeries":
        return cls(order, {(0, 0): c})

    @classmethod
    def monomial(cls, order: int, c=1, u: int = 0, q: int = 0) -> "UQSeries":
        return cls(order, {(u, q): c})

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "UQSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, UQSeries):
            other = UQSeries.constant(self.order, other)
        n = self._check(other)
        out = defaultdict(Fraction, self.coeffs)
        for k, c in other.coeffs.items():
            out[k] += c
        return UQSeries(n, out)

    __radd__ = __add__

    def __neg__(self):
        return UQSeries(self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, UQSeries):
            other = UQSeries.constant(self.order, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UQSeries):
            c = Fraction(other)
            return UQSeries(self.order, {k: v * c for k, v in self.coeffs.items()})
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, UQSeries):
            return self * (1 / Fraction(other))
        return series_mul(self, series_invert(other))

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        out = UQSeries.constant(self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, UQSeries):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.order, frozenset(self.coeffs.items())))

    def equal_through(self, other: "UQSeries", n: int) -> bool:
        a = {k: v for k, v in self.coeffs.items() if k[1] <= n}
        b = {k: v for k, v in other.coeffs.items() if k[1] <= n}
        return a == b

    def truncate(self, n: int) -> "UQSeries":
        return UQSeries(min(n, self.order), self.coeffs)

    # -- views ----------------------------------------------------------
    def q_level(self, b: int) -> dict[int, Fraction]:
        return {a: c for (a, bb), c in self.coeffs.items() if bb == b}

    def at_u_equals_one(self) -> "UQSeries":
        out = defaultdict(Fraction)
        for (a, b), c in self.coeffs.items():
            out[(0, b)] += c
        return UQSeries(self.order, out)

    def substitute_u(self, sign: int) -> "UQSeries":
        """u -> sign*u (sign = +-1)."""
        return UQSeries(self.order, {(a, b): c * (sign ** (a % 2))
                                     for (a, b), c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> list[tuple[int, int, Fraction]]:
        """Sorted (q-exponent, u-exponent, coefficient) triples."""
        return sorted((b, a, c) for (a, b), c in self.coeffs.items())

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = [f"{c} * u^{a} * q^{b}" for b, a, c in self.terms()]
        return " + ".join(parts)

    def __repr__(self):
        return f"UQSeries(order={self.order}, {self.render()})"


def series_mul(s: UQSeries, t: UQSeries) -> UQSeries:
    n = min(s.order, t.order)
    out = defaultdict(Fraction)
    by_q = defaultdict(list)
    for (a, b), c in t.coeffs.items():
        by_q[b].append((a, c))
    for (a1, b1), c1 in s.coeffs.items():
        if b1 > n:
            continue
        for b2 in range(0, n - b1 + 1):
            for a2, c2 in by_q.get(b2, ()):
                out[(a1 + a2, b1 + b2)] += c1 * c2
    return UQSeries(n, out)


def series_invert(s: UQSeries) -> UQSeries:
    """Inverse through q^N; the q^0 part must be a single u-monomial."""
    head = s.q_level(0)
    if len(head) != 1:
        raise SeriesInversionError(
            "q^0 part must be a single nonzero u-monomial to invert formally")
    (a0, c0), = head.items()
    n = s.order
    lead_inv = UQSeries(n, {(-a0, 0): 1 / c0})
    # s = lead * (1 + r), r has only positive q-powers
    r = series_mul(lead_inv, s) - UQSeries.constant(n)
    out = UQSeries.constant(n)
    power = UQSeries.constant(n)
    for _ in range(n):
        power = series_mul(power, -r)
        out = out + power
    return series_mul(out, lead_inv)


def series_sum(items: Iterable[UQSeries], order: int) -> UQSeries:
    out = UQSeries(order)
    for s in items:
        out = out + s
    return out
