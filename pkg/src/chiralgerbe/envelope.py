"""Weight <= 2 normal forms of the vertex envelope for E = Omega.

Only the rewriting rules for (-1)-products of the shapes that occur in the
supersymmetry computations are implemented.  Every other shape raises
UnsupportedShapeError.  Rules are stated in the reference frame, so both
arguments must be written in reference coordinates.

A weight-2 element is a sum of
    omega_s(-1) u    rho_a(-1) u    psi_a(-1) u     (u of weight 1)
    omega_s(-2) f                                   (f in Lambda E)
    d u                                             (formal derivative)
plus a weight <= 1 part.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebroid import Frame, FrameChange, VertexAlgebroid
from .errors import ConsistencyError, UnsupportedShapeError, WorkbenchError
from .kernel import RatFunc, RatMatrix
from .supergeometry import (SuperCovector, SuperScalar, SuperVector, basis_parity, bracket,
                            d_scalar, dual_pairing, vector_on_covector)

HEADS = ("omega", "rho", "psi")


def _lift(amb, r: RatFunc) -> SuperScalar:
    return SuperScalar(amb, {(): r})


class W1Element:
    """scalar + vector + covector: the splitting Lambda E + T + Omega."""

    __slots__ = ("ambient", "scalar", "vector", "covector")

    def __init__(self, ambient, scalar=None, vector=None, covector=None):
        self.ambient = tuple(ambient)
        self.scalar = scalar if scalar is not None else SuperScalar.zero(ambient)
        self.vector = vector if vector is not None else SuperVector.zero(ambient)
        self.covector = covector if covector is not None else SuperCovector.zero(ambient)

    @classmethod
    def of(cls, x) -> "W1Element":
        if isinstance(x, W1Element):
            return x
        if isinstance(x, SuperScalar):
            return cls(x.ambient, scalar=x)
        if isinstance(x, SuperVector):
            return cls(x.ambient, vector=x)
        if isinstance(x, SuperCovector):
            return cls(x.ambient, covector=x)
        raise UnsupportedShapeError(f"not a weight <= 1 element: {x!r}")

    @classmethod
    def zero(cls, ambient):
        return cls(ambient)

    def _key(self):
        return (self.scalar, self.vector, self.covector)

    def __add__(self, other):
        if isinstance(other, W2Element):
            return other + self
        o = W1Element.of(other)
        return W1Element(self.ambient, self.scalar + o.scalar, self.vector + o.vector,
                         self.covector + o.covector)

    def __neg__(self):
        return W1Element(self.ambient, -self.scalar, -self.vector, -self.covector)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, a):
        if not isinstance(a, SuperScalar):
            a = SuperScalar.const(self.ambient, a)
        return W1Element(self.ambient, a * self.scalar, a * self.vector, a * self.covector)

    def __eq__(self, other):
        if isinstance(other, W2Element):
            return other == self
        try:
            o = W1Element.of(other)
        except UnsupportedShapeError:
            return NotImplemented
        return o.ambient == self.ambient and o._key() == self._key()

    def __hash__(self):
        return hash(self._key())

    def __bool__(self):
        return not self.is_zero()

    def is_zero(self) -> bool:
        return self.scalar.is_zero() and self.vector.is_zero() and self.covector.is_zero()

    def weight_one(self) -> "W1Element":
        return W1Element(self.ambient, None, self.vector, self.covector)

    def weights(self) -> set:
        out = set()
        if self.scalar:
            out.add(0)
        if self.vector or self.covector:
            out.add(1)
        return out

    def monomials(self):
        """(kind, basis index or None, coefficient monomial) with kind in
        scalar / vector / covector and coefficient a single Lambda E term."""
        amb = self.ambient
        for sub, r in self.scalar.terms.items():
            yield "scalar", None, SuperScalar(amb, {sub: r})
        for kind, lin in (("vector", self.vector), ("covector", self.covector)):
            for k, c in enumerate(lin.coeffs):
                for sub, r in c.terms.items():
                    yield kind, k, SuperScalar(amb, {sub: r})

    def __repr__(self):
        parts = [repr(p) for p in self._key() if p]
        return " + ".join(parts) if parts else "0"


@dataclass
class W2Element:
    """Weight-2 normal form; see the module docstring for the shapes."""

    ambient: tuple
    heads: dict = field(default_factory=dict)    # (kind, index) -> W1Element
    second: dict = field(default_factory=dict)   # s -> SuperScalar, omega_s(-2) f
    deriv: W1Element | None = None               # formal d of a weight-1 element
    low: W1Element | None = None

    def __post_init__(self):
        self.ambient = tuple(self.ambient)
        self.heads = {k: v for k, v in self.heads.items() if v}
        self.second = {k: v for k, v in self.second.items() if v}
        if self.deriv is None:
            self.deriv = W1Element.zero(self.ambient)
        if self.low is None:
            self.low = W1Element.zero(self.ambient)
        if self.deriv.scalar:
            raise UnsupportedShapeError("formal derivative of a weight-0 element; use d_scalar")

    @classmethod
    def head(cls, kind: str, index: int, payload) -> "W2Element":
        if kind not in HEADS:
            raise UnsupportedShapeError(f"no normal form with head {kind}")
        payload = W1Element.of(payload)
        return cls(payload.ambient, {(kind, index): payload})

    @classmethod
    def omega2(cls, s: int, f: SuperScalar) -> "W2Element":
        return cls(f.ambient, second={s: f})

    @classmethod
    def derivative(cls, u) -> "W2Element":
        u = W1Element.of(u)
        out = cls(u.ambient, deriv=u.weight_one())
        if u.scalar:
            out.low = W1Element.of(d_scalar(u.scalar))
        return out

    def __add__(self, other):
        if not isinstance(other, W2Element):
            other = W2Element(self.ambient, low=W1Element.of(other))
        heads = dict(self.heads)
        for k, v in other.heads.items():
            heads[k] = heads[k] + v if k in heads else v
        second = dict(self.second)
        for k, v in other.second.items():
            second[k] = second[k] + v if k in second else v
        return W2Element(self.ambient, heads, second, self.deriv + other.deriv,
                         self.low + other.low)

    __radd__ = __add__

    def __neg__(self):
        return W2Element(self.ambient, {k: -v for k, v in self.heads.items()},
                         {k: -v for k, v in self.second.items()}, -self.deriv, -self.low)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        """Multiplication by a constant (the (-1)-product is not Lambda E-linear)."""
        if isinstance(c, SuperScalar):
            if any(c.terms) or not c.body().is_constant():
                raise UnsupportedShapeError("only constants scale a weight-2 element")
        return W2Element(self.ambient, {k: c * v for k, v in self.heads.items()},
                         {k: c * v for k, v in self.second.items()}, c * self.deriv,
                         c * self.low)

    def __eq__(self, other):
        if not isinstance(other, W2Element):
            try:
                other = W2Element(self.ambient, low=W1Element.of(other))
            except UnsupportedShapeError:
                return NotImplemented
        return (self.ambient == other.ambient and self.heads == other.heads
                and self.second == other.second and self.deriv == other.deriv
                and self.low == other.low)

    def __hash__(self):
        return hash((tuple(sorted(self.heads)), tuple(sorted(self.second))))

    def __bool__(self):
        return not self.is_zero()

    def is_zero(self) -> bool:
        return not (self.heads or self.second or self.deriv or self.low)

    def weight_two(self) -> "W2Element":
        return W2Element(self.ambient, self.heads, self.second, self.deriv)

    def __repr__(self):
        n = self.ambient[0]
        parts = []
        for (kind, k), v in sorted(self.heads.items()):
            idx = k + 1 if kind == "omega" else k - n + 1
            parts.append(f"{kind}{idx}(-1)[{v!r}]")
        for s, f in sorted(self.second.items()):
            parts.append(f"omega{s + 1}(-2)[{f!r}]")
        if self.deriv:
            parts.append(f"d[{self.deriv!r}]")
        if self.low:
            parts.append(repr(self.low))
        return " + ".join(parts) if parts else "0"


def _is_reference(frame: Frame) -> bool:
    n, m = frame.ambient
    return frame.g == RatMatrix.identity(n, n) and (
        not m or frame.A == RatMatrix.identity(n, m))


def _coefficient_shape(c: SuperScalar):
    """A monomial coefficient as (a, gamma): a * phi_gamma, gamma None if even."""
    (sub, r), = c.terms.items()
    if len(sub) > 1:
        raise UnsupportedShapeError(f"coefficient {c!r} has more than one odd generator")
    return r, (sub[0] - 1 if sub else None)


def _tau(amb, p, r):
    return r * SuperVector.basis(amb, p)


def product_minus1(x, y, frame: Frame | None = None):
    """x_(-1) y for the tabulated shapes, in the reference frame."""
    if isinstance(x, W2Element) or isinstance(y, W2Element):
        raise UnsupportedShapeError("(-1)-products of weight-2 elements are out of range")
    x, y = W1Element.of(x), W1Element.of(y)
    amb = x.ambient
    if y.ambient != amb:
        raise WorkbenchError("ambient mismatch")
    if frame is not None and not _is_reference(frame):
        raise UnsupportedShapeError("the rewriting rules are implemented in the reference frame")
    V = VertexAlgebroid(Frame.reference(amb))
    out = W1Element.zero(amb)
    if x.scalar:
        # a_(-1) y = a y - gamma(a, y); the module structure on Omega is honest
        a = x.scalar
        out = out + W1Element(amb, a * y.scalar, a * y.vector,
                              a * y.covector - V.gamma(a, y.vector))
    if not (x.vector or x.covector):
        return out
    if y.scalar:
        raise UnsupportedShapeError("weight-1 (-1) weight-0 is not a tabulated shape")
    total = W2Element(amb, low=out)
    for xk, xi, xc in x.weight_one().monomials():
        for yk, yi, yc in y.monomials():
            total = total + _rule(amb, xk, xi, xc, yk, yi, yc)
    return total


def _rule(amb, xk, xi, xc, yk, yi, yc) -> W2Element:
    n = amb[0]
    a, ga = _coefficient_shape(xc)
    b, gb = _coefficient_shape(yc)
    A, B = _lift(amb, a), _lift(amb, b)
    x_even = xi < n
    y_even = yi < n
    if xk == "covector" and x_even and ga is None and yk == "vector":
        s = xi
        if y_even and gb is None:
            # (a w_s)(-1)(b t_p) = w_s(-1){ab t_p + t_p(a) db + t_p(b) da} - w_s(-2) b t_p(a)
            p = yi
            ta, tb = a.partial(p + 1), b.partial(p + 1)
            u = W1Element(amb, vector=_tau(amb, p, A * B),
                          covector=_lift(amb, ta) * d_scalar(B) + _lift(amb, tb) * d_scalar(A))
            return W2Element.head("omega", s, u) + W2Element.omega2(s, -_lift(amb, b * ta))
        if not y_even and gb is not None:
            # (a w_s)(-1)(b phi_al psi_be) = w_s(-1){ab phi_al psi_be - delta b da}
            beta = yi - n
            phi = SuperScalar.phi(amb, gb + 1)
            u = W1Element(amb, vector=(A * B * phi) * SuperVector.basis(amb, yi))
            if gb == beta:
                u = u - W1Element.of(B * d_scalar(A))
            return W2Element.head("omega", s, u)
    if xk == "covector" and not x_even and ga is None and yk == "vector" and not y_even \
            and gb is None:
        # (a rho_mu)(-1)(b psi_nu) = rho_mu(-1)(ab psi_nu)
        return W2Element.head("rho", xi, (A * B) * SuperVector.basis(amb, yi))
    if xk == "covector" and x_even and ga is not None and yk == "vector" and not y_even \
            and gb is None:
        # (a phi_ga w_i)(-1)(b psi_nu) = w_i(-1){ab phi_ga psi_nu - delta a db} + delta w_i(-2) ab
        i, nu = xi, yi - n
        phi = SuperScalar.phi(amb, ga + 1)
        u = W1Element(amb, vector=(A * B * phi) * SuperVector.basis(amb, yi))
        out = W2Element(amb)
        if ga == nu:
            u = u - W1Element.of(A * d_scalar(B))
            out = W2Element.omega2(i, A * B)
        return out + W2Element.head("omega", i, u)
    if xk == "vector" and not x_even and ga is None and yk == "covector" and y_even \
            and gb is None:
        # (a psi_q)(-1)(b w_s) = psi_q(-1)(ab w_s)
        return W2Element.head("psi", xi, (A * B) * SuperCovector.basis(amb, yi))
    raise UnsupportedShapeError(
        f"no rewriting rule for ({xc!r} e{xi} {xk})_(-1)({yc!r} e{yi} {yk})")


# -- the supersymmetric quadruple ----------------------------------------

@dataclass
class SusyQuadruple:
    Q: W1Element
    J: W1Element
    G: W2Element
    L: W2Element
    frame: str = "ref"


@dataclass
class SusyTransform:
    """Definitional new quadruple, its differences from the old one, and the
    closed-form differences they were checked against."""

    new: SusyQuadruple
    deltas: dict
    closed: dict


def _sum(items, zero):
    out = zero
    for it in items:
        out = out + it
    return out


def _require_cotangent(amb):
    n, m = amb
    if n != m:
        raise UnsupportedShapeError("the quadruple needs E = Omega (as many odd as even generators)")


def build_susy(frame: Frame) -> SusyQuadruple:
    amb = frame.ambient
    _require_cotangent(amb)
    if not _is_reference(frame):
        raise UnsupportedShapeError("build the quadruple in the reference frame")
    n = amb[0]
    phi = [SuperScalar.phi(amb, i + 1) for i in range(n)]
    tau = [SuperVector.tau(amb, i + 1) for i in range(n)]
    psi = [SuperVector.psi(amb, i + 1) for i in range(n)]
    om = [SuperCovector.omega(amb, i + 1) for i in range(n)]
    rho = [SuperCovector.rho(amb, i + 1) for i in range(n)]
    return _quadruple(amb, phi, tau, psi, om, rho, frame.name)


def _quadruple(amb, phi, tau, psi, om, rho, name) -> SusyQuadruple:
    n = amb[0]
    z1, z2 = W1Element.zero(amb), W2Element(amb)
    Q = _sum((product_minus1(phi[i], tau[i]) for i in range(n)), z1)
    J = _sum((product_minus1(phi[i], psi[i]) for i in range(n)), z1)
    G = _sum((product_minus1(psi[i], om[i]) for i in range(n)), z2)
    L = _sum((product_minus1(om[i], tau[i]) for i in range(n)), z2)
    L = _sum((product_minus1(rho[i], psi[i]) for i in range(n)), L)
    return SusyQuadruple(Q, J, G, L, name)


def _natural_cotangent(fc: FrameChange):
    from .kernel import matrix_invert
    if not (fc.holonomic and fc.source.holonomic):
        raise UnsupportedShapeError("the transformation laws need a holonomic change")
    _require_cotangent(fc.source.ambient)
    if not _is_reference(fc.source):
        raise UnsupportedShapeError("the rewriting rules are implemented in the reference frame")
    if fc.A != matrix_invert(fc.g).transpose():
        raise UnsupportedShapeError("not a natural frame of the cotangent bundle")


def trace_terms(fc: FrameChange) -> list[RatFunc]:
    """tr(g^-1 t_r(g)) for each even direction r."""
    g, gi = fc.g, fc.g_inv
    n = fc.source.ambient[0]
    return [(gi @ g.map(lambda e, r=r: fc.source.tau_bar(r, e))).trace() for r in range(n)]


def closed_deltas(fc: FrameChange) -> dict:
    amb = fc.source.ambient
    n = amb[0]
    tr = trace_terms(fc)
    q = _sum((_lift(amb, tr[r]) * SuperScalar.phi(amb, r + 1) for r in range(n)),
             SuperScalar.zero(amb))
    dq = W1Element.of(d_scalar(q))
    dj = W1Element.of(-_sum((SuperCovector.omega(amb, r + 1, _lift(amb, tr[r]))
                             for r in range(n)), SuperCovector.zero(amb)))
    return {"Q": dq, "J": dj, "G": W2Element(amb), "L": W2Element(amb)}


def lemma_gamma_sum(fc: FrameChange) -> tuple[SuperCovector, SuperCovector]:
    """sum_i gamma(phi'_i, tau'_i), definitional and closed."""
    amb = fc.source.ambient
    n = amb[0]
    V = VertexAlgebroid(fc.source)
    tgt = fc.target
    lhs = _sum((V.gamma(tgt.phis[i], tgt.vectors[i]) for i in range(n)),
               SuperCovector.zero(amb))
    return lhs, -closed_deltas(fc)["Q"].covector


def classical_q(frame: Frame) -> SuperVector:
    n = frame.ambient[0]
    return _sum((frame.phis[i] * frame.vectors[i] for i in range(n)),
                SuperVector.zero(frame.ambient))


def transform_susy(sq: SusyQuadruple, fc: FrameChange, check: bool = True) -> SusyTransform:
    """Quadruple of the new frame, computed from its generators by the
    rewriting rules, compared with the closed transformation laws."""
    _natural_cotangent(fc)
    from .cocycles import h_of_change
    if check and not h_of_change(fc).matrix.is_zero():
        raise ConsistencyError("h does not vanish on a natural cotangent change")
    amb = fc.source.ambient
    n = amb[0]
    t = fc.target
    new = _quadruple(amb, t.phis, t.vectors[:n], t.vectors[n:], t.covectors[:n],
                     t.covectors[n:], t.name)
    deltas = {"Q": new.Q - sq.Q, "J": new.J - sq.J, "G": new.G - sq.G, "L": new.L - sq.L}
    closed = closed_deltas(fc)
    if check:
        for k in "QJGL":
            if deltas[k] != closed[k]:
                raise ConsistencyError(f"{k}' - {k} = {deltas[k]!r}, expected {closed[k]!r}")
    return SusyTransform(new, deltas, closed)


# -- gradings --------------------------------------------------------------

def _basis_charge(amb, kind: str, k: int) -> int:
    # tau, omega carry 0; psi carries -1; rho carries +1
    if k < amb[0]:
        return 0
    return -1 if kind in ("vector", "psi") else 1


def _w1_parts(x: W1Element, key) -> dict:
    parts: dict = {}
    for kind, k, c in x.monomials():
        piece = W1Element.of(c if kind == "scalar" else
                             (SuperVector if kind == "vector" else SuperCovector).basis(
                                 x.ambient, k, c))
        val = key(kind, k, c)
        parts[val] = parts[val] + piece if val in parts else piece
    return parts


def _grade_parts(x, key, head_value) -> dict:
    """Split x into pieces graded additively: key(kind, k, coeff) on W1
    monomials, head_value(kind, k) for the leading generator of a W2 shape."""
    if not isinstance(x, W2Element):
        return _w1_parts(W1Element.of(x), key)
    amb = x.ambient
    parts: dict = {}

    def put(val, el):
        parts[val] = parts[val] + el if val in parts else el

    for (kind, k), payload in x.heads.items():
        for val, p in _w1_parts(payload, key).items():
            put(val + head_value(kind, k), W2Element.head(kind, k, p))
    for s, f in x.second.items():
        for val, p in _w1_parts(W1Element.of(f), key).items():
            put(val + head_value("omega2", s), W2Element.omega2(s, p.scalar))
    for val, p in _w1_parts(x.deriv, key).items():
        put(val + head_value("deriv", None), W2Element(amb, deriv=p))
    for val, p in _w1_parts(x.low, key).items():
        put(val, W2Element(amb, low=p))
    return parts


def charge_parts(x) -> dict:
    """Fermionic charge F: phi, rho count +1, psi counts -1, additive."""
    amb = x.ambient

    def key(kind, k, c):
        (sub, _), = c.terms.items()
        return len(sub) + (0 if kind == "scalar" else _basis_charge(amb, kind, k))

    def head(kind, k):
        return 0 if kind in ("omega", "omega2", "deriv") else _basis_charge(amb, kind, k)

    return _grade_parts(x, key, head)


def weight_parts(x) -> dict:
    """Conformal weight: Lambda E has weight 0, vectors and covectors 1."""
    def key(kind, k, c):
        return 0 if kind == "scalar" else 1

    def head(kind, k):
        return 2 if kind == "omega2" else 1

    return _grade_parts(x, key, head)


def parity_parts(x) -> dict:
    amb = x.ambient

    def key(kind, k, c):
        (sub, _), = c.terms.items()
        return (len(sub) + (0 if kind == "scalar" else basis_parity(amb, k))) % 2

    def head(kind, k):
        return 1 if kind in ("rho", "psi") else 0

    return {p % 2: v for p, v in _grade_parts(x, key, head).items()}


def _eigenvalue(parts: dict, what: str) -> int:
    if len(parts) > 1:
        from .errors import InhomogeneousError
        raise InhomogeneousError(f"element is not homogeneous in {what}: {sorted(parts)}")
    return next(iter(parts)) if parts else 0


def fermionic_charge(x) -> int:
    return _eigenvalue(charge_parts(x), "fermionic charge")


def conformal_weight(x) -> int:
    return _eigenvalue(weight_parts(x), "weight")


def _scale_parts(parts: dict):
    out = None
    for val, p in parts.items():
        term = val * p
        out = term if out is None else out + term
    return out


def j0(x):
    """J_0 extended from the generators as a derivation of the (-1)-product."""
    out = _scale_parts(charge_parts(x))
    return out if out is not None else x


def l0(x):
    """L_0 extended from the generators as a derivation of the (-1)-product."""
    out = _scale_parts(weight_parts(x))
    return out if out is not None else x


# -- modes of quadratic fields on generators --------------------------------
#
# For weight <= 1 arguments the n-th products (n >= 0) are the algebroid
# data.  A field sum u_(-1) v acts on a generator through
#   (u_(-1) v)_(n) x = sum_j u_(-1-j)(v_(n+j) x) + (-1)^{p(u)p(v)} sum_j v_(n-1-j)(u_(j) x),
# and only j <= 1 contributes at these weights.

def _homogeneous(x: W1Element):
    """(parity, piece) pairs of the scalar / vector / covector parts."""
    for part in (x.scalar, x.vector, x.covector):
        for p, piece in part.parity_parts().items():
            yield p, W1Element.of(piece)


def nprod(x, y, n: int) -> W1Element:
    """x_(n) y for n >= 0 and weight <= 1 arguments."""
    x, y = W1Element.of(x), W1Element.of(y)
    amb = x.ambient
    out = W1Element.zero(amb)
    if n >= 2:
        return out
    V = VertexAlgebroid(Frame.reference(amb))
    for px, a in _homogeneous(x):
        for py, b in _homogeneous(y):
            sign = -1 if px and py else 1
            if n == 0:
                if a.vector and b.scalar:
                    out = out + W1Element.of(a.vector.apply(b.scalar))
                elif a.scalar and b.vector:
                    out = out - sign * W1Element.of(b.vector.apply(a.scalar))
                elif a.vector and b.covector:
                    out = out + W1Element.of(vector_on_covector(a.vector, b.covector))
                elif a.covector and b.vector:
                    t = -vector_on_covector(b.vector, a.covector) \
                        + d_scalar(dual_pairing(b.vector, a.covector))
                    out = out + sign * W1Element.of(t)
                elif a.vector and b.vector:
                    out = out + W1Element(amb, vector=bracket(a.vector, b.vector),
                                          covector=V.c(a.vector, b.vector))
            else:
                if a.vector and b.covector:
                    out = out + W1Element.of(dual_pairing(a.vector, b.covector))
                elif a.covector and b.vector:
                    out = out + sign * W1Element.of(dual_pairing(b.vector, a.covector))
                elif a.vector and b.vector:
                    out = out + W1Element.of(V.pairing(a.vector, b.vector))
    return out


def _generator_kind(u: W1Element):
    """(kind, index) of a basis generator with unit coefficient."""
    amb = u.ambient
    one = SuperScalar.const(amb, 1)
    if u.scalar:
        return "scalar", None
    for kind, lin in (("vector", u.vector), ("covector", u.covector)):
        nz = [k for k, c in enumerate(lin.coeffs) if c]
        if nz:
            if len(nz) != 1 or lin.coeffs[nz[0]] != one or (u.vector and u.covector):
                raise UnsupportedShapeError(f"not a basis generator: {u!r}")
            k = nz[0]
            if kind == "vector":
                return ("tau" if k < amb[0] else "psi"), k
            return ("omega" if k < amb[0] else "rho"), k
    raise UnsupportedShapeError("zero is not a generator")


def _parity(x: W1Element) -> int:
    parts = parity_parts(x)
    return _eigenvalue(parts, "parity") if parts else 0


def _gen_minus(u: W1Element, z):
    """u_(-1) z for a generator u and a weight <= 1 element z."""
    amb = u.ambient
    z = W1Element.of(z)
    if z.is_zero():
        return W1Element.zero(amb)
    kind, k = _generator_kind(u)
    if kind == "scalar":
        return product_minus1(u, z)
    pu = _parity(u)
    out = W2Element(amb)
    for pf, f in z.scalar.parity_parts().items():
        # skew symmetry: u_(-1) f = (-1)^{p(u)p(f)} (f_(-1) u - d(f_(0) u))
        t = product_minus1(f, u) - W1Element.of(d_scalar(nprod(f, u, 0).scalar))
        out = out + (-1 if pu and pf else 1) * t
    rest = z.weight_one()
    if rest:
        if kind == "tau":
            raise UnsupportedShapeError("tau-headed weight-2 shapes are not normal forms")
        out = out + W2Element.head(kind, k, rest)
    return out


def partial_generator(u) -> W1Element | W2Element:
    """d u for a generator; d omega_s is written omega_s(-2) 1."""
    u = W1Element.of(u)
    amb = u.ambient
    if u.is_zero():
        return u
    kind, k = _generator_kind(u)
    if kind == "scalar":
        return W1Element.of(d_scalar(u.scalar))
    if kind == "omega":
        return W2Element.omega2(k, SuperScalar.const(amb, 1))
    return W2Element.derivative(u)


def _gen_minus2(u: W1Element, z):
    """u_(-2) c = c du for a constant c."""
    z = W1Element.of(z)
    if z.is_zero():
        return W1Element.zero(u.ambient)
    if z.vector or z.covector or any(z.scalar.terms) or not z.scalar.body().is_constant():
        raise UnsupportedShapeError("u_(-2) is implemented on constants only")
    return z.scalar.body().constant_value() * partial_generator(u)


def _gen_product(v: W1Element, m: int, z):
    if isinstance(z, W2Element):
        if z.is_zero():
            return W1Element.zero(v.ambient)
        raise UnsupportedShapeError("products with weight-2 arguments are out of range")
    if m >= 0:
        return nprod(v, z, m)
    if m == -1:
        return _gen_minus(v, z)
    if m == -2:
        return _gen_minus2(v, z)
    raise UnsupportedShapeError(f"({m})-product")


def field_terms(name: str, amb) -> list:
    """Generator pairs (u, v) with the field equal to sum u_(-1) v."""
    _require_cotangent(amb)
    n = amb[0]
    W = W1Element.of
    if name == "L":
        return ([(W(SuperCovector.omega(amb, i + 1)), W(SuperVector.tau(amb, i + 1)))
                 for i in range(n)]
                + [(W(SuperCovector.rho(amb, i + 1)), W(SuperVector.psi(amb, i + 1)))
                   for i in range(n)])
    if name == "J":
        return [(W(SuperScalar.phi(amb, i + 1)), W(SuperVector.psi(amb, i + 1)))
                for i in range(n)]
    raise UnsupportedShapeError(f"no field {name!r}")


def mode(terms, n: int, x):
    """(sum u_(-1) v)_(n) x for a generator x."""
    x = W1Element.of(x)
    out = W1Element.zero(x.ambient)
    for u, v in terms:
        sign = -1 if _parity(u) and _parity(v) else 1
        for j in range(2):
            out = out + _gen_product(u, -1 - j, nprod(v, x, n + j))
            out = out + sign * _gen_product(v, n - 1 - j, nprod(u, x, j))
    return out


def generators(amb, extra_scalars=()) -> list:
    """Named generators: a few functions a, and tau, omega, phi, psi, rho."""
    n, m = amb
    xs = RatFunc.gens(n)
    out = [(f"a={r}", W1Element.of(_lift(amb, r)))
           for r in [xs[0], xs[0] * xs[0] + 1, *extra_scalars]]
    for i in range(1, n + 1):
        out.append((f"tau{i}", W1Element.of(SuperVector.tau(amb, i))))
        out.append((f"omega{i}", W1Element.of(SuperCovector.omega(amb, i))))
    for a in range(1, m + 1):
        out.append((f"phi{a}", W1Element.of(SuperScalar.phi(amb, a))))
        out.append((f"psi{a}", W1Element.of(SuperVector.psi(amb, a))))
        out.append((f"rho{a}", W1Element.of(SuperCovector.rho(amb, a))))
    return out


@dataclass
class GeneratorClaim:
    name: str
    generator: str
    passed: bool
    detail: str = ""


def generator_claims(amb) -> list[GeneratorClaim]:
    """L_(1) = weight, L_(0) = d and J_(0) = charge on every generator."""
    L, J = field_terms("L", amb), field_terms("J", amb)
    out = []
    for name, x in generators(amb):
        w, f = conformal_weight(x), fermionic_charge(x)
        checks = [("L0 = weight", mode(L, 1, x), w * x),
                  ("L-1 = d", mode(L, 0, x), partial_generator(x)),
                  ("J0 = charge", mode(J, 0, x), f * x)]
        for label, got, want in checks:
            ok = got == want
            out.append(GeneratorClaim(label, name, ok, "" if ok else f"{got!r} vs {want!r}"))
    return out


def log_derivative_action(a: RatFunc, y) -> W1Element:
    """(a^-1 da)_(0) y."""
    amb = W1Element.of(y).ambient
    A = _lift(amb, a)
    w = _lift(amb, 1 / a) * d_scalar(A)
    return nprod(W1Element.of(w), y, 0)


def sample_monomial(pool) -> W1Element:
    """A random weight-1 monomial: one odd monomial times a basis field, or alone."""
    amb = pool.ambient
    n, m = amb
    r = pool.poly()
    while r.is_zero():
        r = pool.poly()
    odd = [a for a in range(1, m + 1) if pool.rng.random() < 0.5]
    c = SuperScalar.monomial(amb, odd, r)
    kind = pool.rng.choice(["scalar", "vector", "covector"])
    if kind == "scalar":
        return W1Element.of(c)
    k = pool.rng.randrange(n + m)
    cls = SuperVector if kind == "vector" else SuperCovector
    return W1Element.of(cls.basis(amb, k, c))
