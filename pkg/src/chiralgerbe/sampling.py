"""Seeded random elements for identity checks.

Coefficients are polynomials of total degree <= 2 with small integer
coefficients; odd parts use monomials in at most two generators.  Every
generator returns homogeneous elements of the requested parity.
"""
from __future__ import annotations

import itertools
import random

from .kernel.ratfunc import RatFunc
from .supergeometry import (PolyForm, SuperCovector, SuperScalar, SuperVector,
                            basis_parity, basis_size)


class SamplePool:
    def __init__(self, ambient, seed: int = 0, bound: int = 3, max_terms: int = 2,
                 density: float = 0.6, degree: int = 2):
        self.ambient = tuple(ambient)
        self.degree = degree
        self.rng = random.Random(seed)
        self.bound = bound
        self.max_terms = max_terms
        self.density = density
        n, m = self.ambient
        subsets = [s for k in (0, 1, 2) for s in itertools.combinations(range(1, m + 1), k)]
        self._subsets = {p: [s for s in subsets if len(s) % 2 == p] for p in (0, 1)}

    def integer(self, nonzero=False) -> int:
        while True:
            c = self.rng.randint(-self.bound, self.bound)
            if c or not nonzero:
                return c

    def poly(self) -> RatFunc:
        n = self.ambient[0]
        out = RatFunc.const(n, 0)
        for _ in range(self.rng.randint(1, self.max_terms)):
            term = RatFunc.const(n, self.integer(nonzero=True))
            for _ in range(self.rng.randint(0, self.degree)):
                term = term * RatFunc.var(n, self.rng.randint(1, n))
            out = out + term
        return out

    def scalar(self, parity: int | None = None) -> SuperScalar:
        if parity is None:
            parity = self.rng.randint(0, 1)
        choices = self._subsets[parity]
        if not choices:
            return SuperScalar.zero(self.ambient)
        k = self.rng.randint(1, min(2, len(choices)))
        return SuperScalar(self.ambient, {s: self.poly() for s in self.rng.sample(choices, k)})

    def even_function(self) -> SuperScalar:
        """Element of A = QQ(x) (no odd part)."""
        return SuperScalar.const(self.ambient, self.poly())

    def _coeffs(self, parity):
        size = basis_size(self.ambient)
        forced = self.rng.randrange(size)
        out = []
        for k in range(size):
            if k == forced or self.rng.random() < self.density:
                out.append(self.scalar((parity + basis_parity(self.ambient, k)) % 2))
            else:
                out.append(SuperScalar.zero(self.ambient))
        return out

    def vector(self, parity: int | None = None) -> SuperVector:
        if parity is None:
            parity = self.rng.randint(0, 1)
        return SuperVector(self.ambient, self._coeffs(parity))

    def covector(self, parity: int | None = None) -> SuperCovector:
        if parity is None:
            parity = self.rng.randint(0, 1)
        return SuperCovector(self.ambient, self._coeffs(parity))

    def form(self, degree: int, parity: int | None = None) -> PolyForm:
        """Random graded-skew form of the given degree and parity."""
        if parity is None:
            parity = self.rng.randint(0, 1)
        if degree == 0:
            return PolyForm.from_scalar(self.scalar(parity))
        if degree == 1:
            return PolyForm.from_covector(self.covector(parity))
        amb = self.ambient
        raw: dict = {}

        def seed_value(t):
            if t not in raw:
                q = (parity + sum(basis_parity(amb, k) for k in t)) % 2
                raw[t] = (self.scalar(q) if self.rng.random() < 0.3
                          else SuperScalar.zero(amb))
            return raw[t]

        def skew(t):
            out = SuperScalar.zero(amb)
            for perm in itertools.permutations(range(degree)):
                s = tuple(t[i] for i in perm)
                v = seed_value(s)
                if v:
                    out = out + v if graded_perm_sign(amb, t, perm) > 0 else out - v
            return out

        return PolyForm.from_function(amb, degree, skew)


def graded_perm_sign(ambient, t, perm) -> int:
    """Sign relating h(t) to h(t permuted by perm) for a graded-skew h."""
    lst = list(perm)
    sign = 1
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                a, b = t[lst[j]], t[lst[j + 1]]
                if not (basis_parity(ambient, a) and basis_parity(ambient, b)):
                    sign = -sign
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
    return sign
