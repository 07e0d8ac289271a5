"""The free supercommutative algebra over QQ(x), its derivations and forms.

Ambient ``(n, m)``: n even coordinates x1..xn and m odd generators
phi_1..phi_m.  Basis directions of vector fields are numbered 0..n+m-1:
index i < n is tau_{i+1} = d/dx_{i+1} (even), index n+a-1 is psi_a
(odd, psi_a(phi_b) = delta_ab).  Covectors use the dual basis omega_i,
rho_a, and every coefficient sits to the left of its basis element.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

from .errors import AmbientMismatchError, WorkbenchError
from .kernel.ratfunc import RatFunc

Ambient = tuple  # (n, m)


def _merge_sign(s: tuple, t: tuple):
    """Sign and sorted union of phi_s * phi_t, or (0, None) if they overlap."""
    if set(s) & set(t):
        return 0, None
    inv = 0
    for a in s:
        for b in t:
            if a > b:
                inv += 1
    return (-1) ** inv, tuple(sorted(s + t))


class SuperScalar:
    """Element of Lambda E: a map from sorted odd monomials to RatFunc."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms: Mapping[tuple, RatFunc] | None = None):
        self.ambient = tuple(ambient)
        clean = {}
        if terms:
            for s, c in terms.items():
                if c:
                    clean[tuple(s)] = c
        self.terms = clean

    @classmethod
    def const(cls, ambient, value) -> "SuperScalar":
        if not isinstance(value, RatFunc):
            value = RatFunc.const(ambient[0], value)
        return cls(ambient, {(): value})

    @classmethod
    def zero(cls, ambient) -> "SuperScalar":
        return cls(ambient)

    @classmethod
    def phi(cls, ambient, a: int, coeff=1) -> "SuperScalar":
        if not 1 <= a <= ambient[1]:
            raise WorkbenchError(f"no odd generator phi_{a}")
        if not isinstance(coeff, RatFunc):
            coeff = RatFunc.const(ambient[0], coeff)
        return cls(ambient, {(a,): coeff})

    @classmethod
    def monomial(cls, ambient, subset: Sequence[int], coeff) -> "SuperScalar":
        """coeff * phi_{s1} phi_{s2} ... in the given (possibly unsorted) order."""
        out = cls.const(ambient, coeff)
        for a in subset:
            out = out * cls.phi(ambient, a)
        return out

    def _other(self, other) -> "SuperScalar":
        if isinstance(other, SuperScalar):
            if other.ambient != self.ambient:
                raise AmbientMismatchError(f"{self.ambient} vs {other.ambient}")
            return other
        return SuperScalar.const(self.ambient, other)

    def __add__(self, other):
        other = self._other(other)
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out[s] + c if s in out else c
        return SuperScalar(self.ambient, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperScalar(self.ambient, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if isinstance(other, (SuperVector, SuperCovector)):
            return other.__rmul__(self)
        other = self._other(other)
        out: dict = {}
        for s, c in self.terms.items():
            for t, d in other.terms.items():
                sign, u = _merge_sign(s, t)
                if sign:
                    v = c * d if sign > 0 else -(c * d)
                    out[u] = out[u] + v if u in out else v
        return SuperScalar(self.ambient, out)

    def __rmul__(self, other):
        return self._other(other) * self

    def __eq__(self, other):
        if isinstance(other, SuperScalar):
            return self.ambient == other.ambient and self.terms == other.terms
        if isinstance(other, (int, RatFunc)):
            return self == self._other(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ambient, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for s in sorted(self.terms, key=lambda s: (len(s), s)):
            mono = "".join(f"*phi{a}" for a in s)
            parts.append(f"({self.terms[s]}){mono}")
        return " + ".join(parts)

    # -- grading --------------------------------------------------------
    def parity(self):
        """0 or 1 for homogeneous elements, None for mixed; zero is even."""
        ps = {len(s) % 2 for s in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def parity_parts(self) -> dict[int, "SuperScalar"]:
        parts: dict[int, dict] = {}
        for s, c in self.terms.items():
            parts.setdefault(len(s) % 2, {})[s] = c
        return {p: SuperScalar(self.ambient, t) for p, t in parts.items()}

    def involution(self) -> "SuperScalar":
        """a -> (-1)^{p(a)} a, extended additively."""
        return SuperScalar(self.ambient, {s: (-c if len(s) % 2 else c)
                                          for s, c in self.terms.items()})

    def body(self) -> RatFunc:
        return self.terms.get((), RatFunc.const(self.ambient[0], 0))

    def map_coeffs(self, fn) -> "SuperScalar":
        return SuperScalar(self.ambient, {s: fn(c) for s, c in self.terms.items()})

    # -- derivations ----------------------------------------------------
    def d_even(self, i: int) -> "SuperScalar":
        """tau_i acting coefficientwise (1-based i)."""
        return SuperScalar(self.ambient, {s: c.partial(i) for s, c in self.terms.items()})

    def d_odd(self, a: int) -> "SuperScalar":
        """psi_a acting as an odd left derivation (1-based a)."""
        out = {}
        for s, c in self.terms.items():
            if a in s:
                pos = s.index(a)
                out[s[:pos] + s[pos + 1:]] = c if pos % 2 == 0 else -c
        return SuperScalar(self.ambient, out)

    def d_basis(self, k: int) -> "SuperScalar":
        n = self.ambient[0]
        return self.d_even(k + 1) if k < n else self.d_odd(k - n + 1)


def basis_parity(ambient, k: int) -> int:
    return 0 if k < ambient[0] else 1


def basis_size(ambient) -> int:
    return ambient[0] + ambient[1]


def _zero_list(ambient, size):
    return [SuperScalar.zero(ambient) for _ in range(size)]


class _Linear:
    """Shared machinery for SuperVector / SuperCovector (coefficient lists)."""

    __slots__ = ("ambient", "coeffs")

    def __init__(self, ambient, coeffs: Sequence[SuperScalar] | None = None):
        self.ambient = tuple(ambient)
        size = basis_size(self.ambient)
        if coeffs is None:
            coeffs = _zero_list(self.ambient, size)
        coeffs = tuple(coeffs)
        if len(coeffs) != size:
            raise AmbientMismatchError(f"expected {size} coefficients, got {len(coeffs)}")
        for c in coeffs:
            if c.ambient != self.ambient:
                raise AmbientMismatchError("coefficient ambient mismatch")
        self.coeffs = coeffs

    @classmethod
    def basis(cls, ambient, k: int, coeff=None):
        coeffs = _zero_list(ambient, basis_size(ambient))
        if coeff is None:
            coeff = SuperScalar.const(ambient, 1)
        elif not isinstance(coeff, SuperScalar):
            coeff = SuperScalar.const(ambient, coeff)
        coeffs[k] = coeff
        return cls(ambient, coeffs)

    @classmethod
    def zero(cls, ambient):
        return cls(ambient)

    def _check(self, other):
        if type(other) is not type(self) or other.ambient != self.ambient:
            raise AmbientMismatchError(f"cannot combine {type(self).__name__} with {other!r}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        return type(self)(self.ambient, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __radd__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return NotImplemented

    def __neg__(self):
        return type(self)(self.ambient, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        """Left multiplication by a scalar (SuperScalar, RatFunc or int)."""
        if not isinstance(scalar, SuperScalar):
            scalar = SuperScalar.const(self.ambient, scalar)
        return type(self)(self.ambient, [scalar * c for c in self.coeffs])

    def __eq__(self, other):
        return (type(other) is type(self) and other.ambient == self.ambient
                and other.coeffs == self.coeffs)

    def __hash__(self):
        return hash((type(self).__name__, self.ambient, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def term_parity(self, k: int, coeff_parity: int) -> int:
        return (coeff_parity + basis_parity(self.ambient, k)) % 2

    def parity_parts(self) -> dict:
        parts: dict[int, list] = {}
        for k, c in enumerate(self.coeffs):
            for p, piece in c.parity_parts().items():
                tp = self.term_parity(k, p)
                lst = parts.setdefault(tp, _zero_list(self.ambient, len(self.coeffs)))
                lst[k] = lst[k] + piece
        return {p: type(self)(self.ambient, lst) for p, lst in parts.items()}

    def parity(self):
        parts = self.parity_parts()
        if len(parts) > 1:
            return None
        return next(iter(parts)) if parts else 0

    def terms(self) -> Iterable[tuple[int, SuperScalar]]:
        """(basis index, homogeneous coefficient) pairs."""
        for k, c in enumerate(self.coeffs):
            for piece in c.parity_parts().values():
                yield k, piece

    def _names(self):
        raise NotImplementedError

    def __repr__(self):
        names = self._names()
        parts = [f"[{c}]*{names[k]}" for k, c in enumerate(self.coeffs) if c]
        return " + ".join(parts) if parts else "0"


class SuperVector(_Linear):
    """Element of T_{Lambda E} = sum c_k e_k, e_k in {tau_i; psi_a}."""

    __slots__ = ()

    def _names(self):
        n, m = self.ambient
        return [f"tau{i}" for i in range(1, n + 1)] + [f"psi{a}" for a in range(1, m + 1)]

    @classmethod
    def tau(cls, ambient, i: int, coeff=None):
        return cls.basis(ambient, i - 1, coeff)

    @classmethod
    def psi(cls, ambient, a: int, coeff=None):
        return cls.basis(ambient, ambient[0] + a - 1, coeff)

    def apply(self, f: SuperScalar) -> SuperScalar:
        if f.ambient != self.ambient:
            raise AmbientMismatchError("vector and scalar ambients differ")
        out = SuperScalar.zero(self.ambient)
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + c * f.d_basis(k)
        return out

    __call__ = apply


class SuperCovector(_Linear):
    """Element of Omega_{Lambda E} = sum c_k eps_k, eps_k in {omega_i; rho_a}."""

    __slots__ = ()

    def _names(self):
        n, m = self.ambient
        return [f"omega{i}" for i in range(1, n + 1)] + [f"rho{a}" for a in range(1, m + 1)]

    @classmethod
    def omega(cls, ambient, i: int, coeff=None):
        return cls.basis(ambient, i - 1, coeff)

    @classmethod
    def rho(cls, ambient, a: int, coeff=None):
        return cls.basis(ambient, ambient[0] + a - 1, coeff)


# -- basic operations ----------------------------------------------------

def super_mul(a: SuperScalar, b: SuperScalar) -> SuperScalar:
    return a * b


def apply_vector(v: SuperVector, a: SuperScalar) -> SuperScalar:
    return v.apply(a)


def dual_pairing(v: SuperVector, w: SuperCovector) -> SuperScalar:
    """<v, w> with <e_k, c eps_l> = (-1)^{p(c)p(e_k)} c delta_kl."""
    if v.ambient != w.ambient:
        raise AmbientMismatchError("pairing across ambients")
    out = SuperScalar.zero(v.ambient)
    n = v.ambient[0]
    for k, (a, c) in enumerate(zip(v.coeffs, w.coeffs)):
        if a and c:
            out = out + a * (c if k < n else c.involution())
    return out


def d_scalar(f: SuperScalar) -> SuperCovector:
    """The even derivation d: Lambda E -> Omega with <e_k, d f> = e_k(f)."""
    n, m = f.ambient
    coeffs = [f.d_even(i) for i in range(1, n + 1)]
    g = f.involution()
    coeffs += [-g.d_odd(a) for a in range(1, m + 1)]
    return SuperCovector(f.ambient, coeffs)


def bracket(x: SuperVector, y: SuperVector) -> SuperVector:
    """Supercommutator of vector fields (basis fields supercommute)."""
    out = SuperVector.zero(x.ambient)
    for px, xp in x.parity_parts().items():
        for py, yp in y.parity_parts().items():
            sign = -1 if px * py else 1
            coeffs = []
            for xc, yc in zip(xp.coeffs, yp.coeffs):
                term = xp.apply(yc)
                other = yp.apply(xc)
                coeffs.append(term - other if sign > 0 else term + other)
            out = out + SuperVector(x.ambient, coeffs)
    return out


def vector_on_covector(x: SuperVector, w: SuperCovector) -> SuperCovector:
    """T-module action x(w): basis fields kill basis forms, extended by Leibniz
    in the form and by (a e)(w) = a e(w) + (-1)^{p(a)p(<e,w>)} <e, w> d a."""
    amb = x.ambient
    out = SuperCovector.zero(amb)
    for k, c in x.terms():
        ek_w = SuperCovector(amb, [wc.d_basis(k) for wc in w.coeffs])
        out = out + c * ek_w
        pair = dual_pairing(SuperVector.basis(amb, k), w)
        for pp, piece in pair.parity_parts().items():
            # moving c past <e_k, w> costs a Koszul sign
            term = piece * d_scalar(c)
            out = out - term if c.parity() * pp else out + term
    return out


def covector_scale(a: SuperScalar, w: SuperCovector) -> SuperCovector:
    return a * w


# -- polyforms -----------------------------------------------------------

def _slot_sign(ambient, k, rest, c):
    # h(e_k, rest) against the eps_k coefficient of h(rest); self-inverse
    if basis_parity(ambient, k) and not sum(basis_parity(ambient, r) for r in rest) % 2:
        return -c
    return c


class PolyForm:
    """A form of degree k: Lambda E-polylinear map T^{k-1} -> Omega (k >= 1),
    stored by its values on basis tuples; degree 0 is a scalar."""

    MAX_DEGREE = 4

    __slots__ = ("ambient", "degree", "scalar", "values")

    def __init__(self, ambient, degree: int, values: Mapping[tuple, SuperCovector] | None = None,
                 scalar: SuperScalar | None = None):
        if not 0 <= degree <= self.MAX_DEGREE:
            raise WorkbenchError(f"form degree {degree} outside 0..{self.MAX_DEGREE}")
        self.ambient = tuple(ambient)
        self.degree = degree
        if degree == 0:
            self.scalar = scalar if scalar is not None else SuperScalar.zero(self.ambient)
            self.values = {}
        else:
            self.scalar = None
            self.values = {tuple(t): v for t, v in (values or {}).items() if v}

    @classmethod
    def from_scalar(cls, f: SuperScalar) -> "PolyForm":
        return cls(f.ambient, 0, scalar=f)

    @classmethod
    def from_covector(cls, w: SuperCovector) -> "PolyForm":
        return cls(w.ambient, 1, {(): w})

    @classmethod
    def zero(cls, ambient, degree) -> "PolyForm":
        return cls(ambient, degree)

    @classmethod
    def from_function(cls, ambient, degree: int, fn) -> "PolyForm":
        """Build from the scalar function G(e_1..e_k) = h(e_1, ..., e_k) on
        basis index tuples (G must be graded skew)."""
        if degree == 0:
            return cls(ambient, 0, scalar=fn(()))
        N = basis_size(ambient)
        values = {}
        for rest in itertools.product(range(N), repeat=degree - 1):
            coeffs = [_slot_sign(ambient, k, rest, fn((k,) + rest)) for k in range(N)]
            values[rest] = SuperCovector(ambient, coeffs)
        return cls(ambient, degree, values)

    def covector(self) -> SuperCovector:
        if self.degree != 1:
            raise WorkbenchError("not a 1-form")
        return self.values.get((), SuperCovector.zero(self.ambient))

    def value(self, t: tuple) -> SuperCovector:
        return self.values.get(tuple(t), SuperCovector.zero(self.ambient))

    def pairing_value(self, t: tuple) -> SuperScalar:
        """<e_{t1}, h(e_{t2}, ...)>."""
        return dual_pairing(SuperVector.basis(self.ambient, t[0]), self.value(t[1:]))

    def function_value(self, t: tuple) -> SuperScalar:
        """h(e_{t1}, ..., e_{tk}), the fully evaluated scalar."""
        if self.degree == 0:
            return self.scalar
        c = self.value(t[1:]).coeffs[t[0]]
        return _slot_sign(self.ambient, t[0], t[1:], c)

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if other.degree != self.degree or other.ambient != self.ambient:
            raise AmbientMismatchError("adding forms of different degree/ambient")
        if self.degree == 0:
            return PolyForm.from_scalar(self.scalar + other.scalar)
        vals = dict(self.values)
        for t, v in other.values.items():
            vals[t] = vals[t] + v if t in vals else v
        return PolyForm(self.ambient, self.degree, vals)

    def __neg__(self):
        if self.degree == 0:
            return PolyForm.from_scalar(-self.scalar)
        return PolyForm(self.ambient, self.degree, {t: -v for t, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, a):
        if self.degree == 0:
            return PolyForm.from_scalar(a * self.scalar)
        return PolyForm(self.ambient, self.degree, {t: a * v for t, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.degree != other.degree or self.ambient != other.ambient:
            return False
        if self.degree == 0:
            return self.scalar == other.scalar
        return self.values == other.values

    def __hash__(self):
        return hash((self.ambient, self.degree))

    def is_zero(self) -> bool:
        return (not self.scalar) if self.degree == 0 else not self.values

    def __repr__(self):
        if self.degree == 0:
            return f"PolyForm0({self.scalar})"
        body = ", ".join(f"{t}: {v}" for t, v in sorted(self.values.items()))
        return f"PolyForm{self.degree}({body})"

    def parity_parts(self) -> dict[int, "PolyForm"]:
        if self.degree == 0:
            return {p: PolyForm.from_scalar(s) for p, s in self.scalar.parity_parts().items()}
        out: dict[int, dict] = {}
        for t, v in self.values.items():
            shift = sum(basis_parity(self.ambient, k) for k in t)
            for p, piece in v.parity_parts().items():
                hp = (p + shift) % 2
                d = out.setdefault(hp, {})
                d[t] = d[t] + piece if t in d else piece
        return {p: PolyForm(self.ambient, self.degree, vals) for p, vals in out.items()}

    def parity(self):
        parts = self.parity_parts()
        if len(parts) > 1:
            return None
        return next(iter(parts)) if parts else 0

    def is_graded_skew(self) -> bool:
        if self.degree < 2:
            return True
        N = basis_size(self.ambient)
        for t in itertools.product(range(N), repeat=self.degree):
            f = self.function_value(t)
            for j in range(self.degree - 1):
                a, b = t[j], t[j + 1]
                s = t[:j] + (b, a) + t[j + 2:]
                sign = -1 if basis_parity(self.ambient, a) * basis_parity(self.ambient, b) == 0 else 1
                g = self.function_value(s)
                if f != (g if sign > 0 else -g):
                    return False
        return True


def evaluate(h: PolyForm, args: Sequence[SuperVector]) -> SuperCovector:
    """h(v_1, ..., v_{k-1}) for a homogeneous form and arbitrary vector args."""
    if h.degree < 1 or len(args) != h.degree - 1:
        raise WorkbenchError("wrong number of arguments for form")
    out = SuperCovector.zero(h.ambient)
    for ph, hp in h.parity_parts().items():
        for combo in itertools.product(*[list(v.terms()) for v in args]):
            sign = 1
            pre = ph
            coeff = SuperScalar.const(h.ambient, 1)
            idx = []
            for k, c in combo:
                pc = c.parity()
                if pc and pre % 2:
                    sign = -sign
                coeff = coeff * c
                pre += basis_parity(h.ambient, k)
                idx.append(k)
            val = hp.value(tuple(idx))
            if val and coeff:
                out = out + (coeff if sign > 0 else -coeff) * val
    return out


def pair_contract(v: SuperVector, h: PolyForm) -> PolyForm:
    """<v, h>, lowering the degree by one."""
    if h.degree == 0:
        raise WorkbenchError("cannot contract a degree-0 form")
    amb = h.ambient
    if h.degree == 1:
        return PolyForm.from_scalar(dual_pairing(v, h.covector()))
    N = basis_size(amb)
    out = PolyForm.zero(amb, h.degree - 1)
    for pv, vp in v.parity_parts().items():
        for ph, hp in h.parity_parts().items():
            sign = -1 if pv * ph else 1
            vals = {}
            for rest in itertools.product(range(N), repeat=h.degree - 2):
                args = [vp] + [SuperVector.basis(amb, k) for k in rest]
                val = evaluate(hp, args)
                vals[rest] = val if sign > 0 else -val
            out = out + PolyForm(amb, h.degree - 1, vals)
    return out


def lie_action(v: SuperVector, h: PolyForm) -> PolyForm:
    """Action of a homogeneous vector field on forms."""
    amb = h.ambient
    pv = v.parity()
    if pv is None:
        raise WorkbenchError("lie_action needs a homogeneous vector field")
    if h.degree == 0:
        return PolyForm.from_scalar(v.apply(h.scalar))
    if h.degree == 1:
        return PolyForm.from_covector(vector_on_covector(v, h.covector()))
    N = basis_size(amb)
    out = PolyForm.zero(amb, h.degree)
    for ph, hp in h.parity_parts().items():
        out = out + _lie_homogeneous(v, pv, hp, ph, N)
    return out


def _lie_homogeneous(v, pv, h, ph, N):
    amb = h.ambient
    vals = {}
    for rest in itertools.product(range(N), repeat=h.degree - 1):
        val = vector_on_covector(v, h.value(rest))
        pre = ph
        for j, k in enumerate(rest):
            br = bracket(v, SuperVector.basis(amb, k))
            if br:
                args = [SuperVector.basis(amb, r) for r in rest]
                args[j] = br
                term = evaluate(h, args)
                val = val - term if (pv * pre) % 2 == 0 else val + term
            pre += basis_parity(amb, k)
        vals[rest] = val
    return PolyForm(amb, h.degree, vals)


def de_rham_d(h: PolyForm) -> PolyForm:
    """de Rham-Chevalley differential on the frame basis (brackets vanish)."""
    amb = h.ambient
    if h.degree >= PolyForm.MAX_DEGREE:
        raise WorkbenchError(f"d of a degree-{h.degree} form exceeds the stored range")
    if h.degree == 0:
        return PolyForm.from_covector(-d_scalar(h.scalar))
    N = basis_size(amb)
    out = PolyForm.zero(amb, h.degree + 1)
    for ph, hp in h.parity_parts().items():
        vals = {}
        for t in itertools.product(range(N), repeat=h.degree):
            val = SuperCovector.zero(amb)
            pre = 0
            for j, k in enumerate(t):
                pk = basis_parity(amb, k)
                rest = t[:j] + t[j + 1:]
                inner = hp.value(rest)
                if inner:
                    term = vector_on_covector(SuperVector.basis(amb, k), inner)
                    exponent = j + pk * (pre + ph)
                    val = val + term if exponent % 2 == 0 else val - term
                pre += pk
            # -(-1)^{p(h)p(t_1)} d <t_1, h(t_2..)>
            first = hp.pairing_value(t)
            if first:
                dterm = d_scalar(first)
                val = val - dterm if (ph * basis_parity(amb, t[0])) % 2 == 0 else val + dterm
            vals[t] = val
        out = out + PolyForm(amb, h.degree + 1, vals)
    return out
