"""Frames of (A, E), changes of frame and the vertex superalgebroid of a frame.

Everything is written in the coordinates of a fixed reference chart:
x1..xn with the coordinate fields, and the standard odd generators.  A
frame is a pair (g, A) relative to the reference one, with
tau-bar'_i = g^{ij} tau-bar_j and phi'_a = A^{ab} phi_b.

The structure (gamma, <,>, c) attached to a frame is fixed by requiring
gamma(f, e) = 0, <e, e'> = 0 and c(e, e') = 0 on frame basis fields and
extending through the rescaling axioms; the closed forms of the tables are
kept separately as literal evaluators.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (AmbientMismatchError, NonInvertibleChangeError, NonInvertibleError,
                     UnsupportedShapeError)
from .kernel.matrix import RatMatrix, matrix_invert
from .kernel.ratfunc import RatFunc
from .supergeometry import (SuperCovector, SuperScalar, SuperVector, basis_parity, basis_size,
                            bracket, d_scalar, dual_pairing, vector_on_covector)

HALF = Fraction(1, 2)


def lift(ambient, r) -> SuperScalar:
    """A RatFunc (or number) as a SuperScalar with no odd part."""
    return SuperScalar.const(ambient, r)


def _sgn(exponent: int) -> int:
    return -1 if exponent % 2 else 1


class Frame:
    """A frame (g, A) relative to the reference chart frame."""

    def __init__(self, ambient, g: RatMatrix | None = None, A: RatMatrix | None = None,
                 name: str = "ref", holonomic: bool = True):
        self.ambient = tuple(ambient)
        n, m = self.ambient
        self.name = name
        self.holonomic = holonomic
        self.g = g if g is not None else RatMatrix.identity(n, n)
        self.A = A if A is not None else (RatMatrix.identity(n, m) if m else None)
        if self.g.rows != n or self.g.cols != n:
            raise AmbientMismatchError("g must be n x n")
        if m and (self.A.rows != m or self.A.cols != m):
            raise AmbientMismatchError("A must be m x m")
        try:
            self.g_inv = matrix_invert(self.g)
            self.A_inv = matrix_invert(self.A) if m else None
        except NonInvertibleError as exc:
            raise NonInvertibleChangeError(f"frame {name}: {exc}") from None

    @classmethod
    def reference(cls, ambient) -> "Frame":
        return cls(ambient)

    def __repr__(self):
        return f"Frame({self.name}, ambient={self.ambient})"

    # -- derived data ---------------------------------------------------
    def lift(self, r) -> SuperScalar:
        return lift(self.ambient, r)

    @cached_property
    def mixed(self):
        """g^{i a c} = g^{iq} tau_q(A^{-1 a mu}) A^{mu c} (0-based indices)."""
        n, m = self.ambient
        out = {}
        for i in range(n):
            for a in range(m):
                for c in range(m):
                    acc = RatFunc.const(n, 0)
                    for q in range(n):
                        if not self.g[i, q]:
                            continue
                        for mu in range(m):
                            acc = acc + self.g[i, q] * self.A_inv[a, mu].partial(q + 1) * self.A[mu, c]
                    out[i, a, c] = acc
        return out

    def tau_bar(self, i: int, f: RatFunc) -> RatFunc:
        """The frame derivation tau-bar_i (0-based) on A."""
        n = self.ambient[0]
        acc = RatFunc.const(n, 0)
        for p in range(n):
            if self.g[i, p]:
                acc = acc + self.g[i, p] * f.partial(p + 1)
        return acc

    @cached_property
    def phis(self) -> list[SuperScalar]:
        n, m = self.ambient
        return [sum((self.lift(self.A[a, b]) * SuperScalar.phi(self.ambient, b + 1)
                     for b in range(m)), SuperScalar.zero(self.ambient)) for a in range(m)]

    @cached_property
    def vectors(self) -> list[SuperVector]:
        amb = self.ambient
        n, m = amb
        out = []
        for i in range(n):
            coeffs = [self.lift(self.g[i, p]) for p in range(n)]
            for a in range(m):
                acc = SuperScalar.zero(amb)
                for c in range(m):
                    if self.mixed[i, a, c]:
                        acc = acc + self.lift(self.mixed[i, a, c]) * SuperScalar.phi(amb, c + 1)
                coeffs.append(acc)
            out.append(SuperVector(amb, coeffs))
        for a in range(m):
            coeffs = [SuperScalar.zero(amb)] * n + [self.lift(self.A_inv[mu, a]) for mu in range(m)]
            out.append(SuperVector(amb, coeffs))
        return out

    @cached_property
    def covectors(self) -> list[SuperCovector]:
        amb = self.ambient
        n, m = amb
        out = []
        for i in range(n):
            out.append(SuperCovector(amb, [self.lift(self.g_inv[p, i]) for p in range(n)]
                                     + [SuperScalar.zero(amb)] * m))
        for a in range(m):
            coeffs = []
            for i in range(n):
                acc = SuperScalar.zero(amb)
                for c in range(m):
                    d = self.A[a, c].partial(i + 1)
                    if d:
                        acc = acc + self.lift(d) * SuperScalar.phi(amb, c + 1)
                coeffs.append(acc)
            coeffs += [self.lift(self.A[a, mu]) for mu in range(m)]
            out.append(SuperCovector(amb, coeffs))
        return out

    def parity(self, k: int) -> int:
        return basis_parity(self.ambient, k)

    def size(self) -> int:
        return basis_size(self.ambient)

    # -- coordinates relative to this frame -----------------------------
    def decompose_vector(self, v: SuperVector) -> list[SuperScalar]:
        return [dual_pairing(v, eps) for eps in self.covectors]

    def decompose_covector(self, w: SuperCovector) -> list[SuperScalar]:
        out = []
        for k, e in enumerate(self.vectors):
            p = dual_pairing(e, w)
            out.append(p.involution() if self.parity(k) else p)
        return out

    def compose_vector(self, coeffs) -> SuperVector:
        out = SuperVector.zero(self.ambient)
        for c, e in zip(coeffs, self.vectors):
            if c:
                out = out + c * e
        return out

    def compose_covector(self, coeffs) -> SuperCovector:
        out = SuperCovector.zero(self.ambient)
        for c, eps in zip(coeffs, self.covectors):
            if c:
                out = out + c * eps
        return out

    def to_reference(self, x):
        """Element given by coefficients on this frame's basis -> reference."""
        if isinstance(x, AlgebroidElement):
            return AlgebroidElement(self.to_reference(x.vector), self.to_reference(x.covector))
        if isinstance(x, SuperVector):
            return self.compose_vector(x.coeffs)
        if isinstance(x, SuperCovector):
            return self.compose_covector(x.coeffs)
        raise TypeError(f"cannot change frame of {x!r}")

    def from_reference(self, x):
        if isinstance(x, AlgebroidElement):
            return AlgebroidElement(self.from_reference(x.vector), self.from_reference(x.covector))
        if isinstance(x, SuperVector):
            return SuperVector(self.ambient, self.decompose_vector(x))
        if isinstance(x, SuperCovector):
            return SuperCovector(self.ambient, self.decompose_covector(x))
        raise TypeError(f"cannot change frame of {x!r}")

    def is_supercommuting(self) -> bool:
        N = self.size()
        return all(bracket(self.vectors[i], self.vectors[j]).is_zero()
                   for i in range(N) for j in range(i, N))


@dataclass(frozen=True)
class FrameChange:
    """The change from ``source`` to the frame with
    tau-bar'_i = g^{ij} tau-bar_j (source derivations) and phi' = A phi (source)."""

    source: Frame
    g: RatMatrix
    A: RatMatrix | None
    holonomic: bool = True
    name: str = "new"

    @cached_property
    def target(self) -> Frame:
        A = self.A @ self.source.A if self.source.ambient[1] else None
        return Frame(self.source.ambient, self.g @ self.source.g, A, self.name,
                     self.holonomic and self.source.holonomic)

    @cached_property
    def g_inv(self):
        return matrix_invert(self.g)

    @cached_property
    def A_inv(self):
        return matrix_invert(self.A)

    @cached_property
    def mixed(self):
        """g^{i a c} relative to the source frame."""
        src = self.source
        n, m = src.ambient
        out = {}
        for i in range(n):
            for a in range(m):
                for c in range(m):
                    acc = RatFunc.const(n, 0)
                    for q in range(n):
                        if self.g[i, q]:
                            for mu in range(m):
                                acc = acc + (self.g[i, q] * src.tau_bar(q, self.A_inv[a, mu])
                                             * self.A[mu, c])
                    out[i, a, c] = acc
        return out

    def forward_formulas(self):
        """New basis written in the source basis: coefficient lists for
        tau'_i, psi'_a (vectors) and omega'_i, rho'_a (covectors)."""
        src = self.source
        amb = src.ambient
        n, m = amb
        L = lambda r: lift(amb, r)
        phi = src.phis
        zero = SuperScalar.zero(amb)
        vecs, covs = [], []
        for i in range(n):
            row = [L(self.g[i, p]) for p in range(n)]
            for a in range(m):
                row.append(sum((L(self.mixed[i, a, c]) * phi[c] for c in range(m)), zero))
            vecs.append(SuperVector(amb, row))
        for a in range(m):
            vecs.append(SuperVector(amb, [zero] * n + [L(self.A_inv[mu, a]) for mu in range(m)]))
        for i in range(n):
            covs.append(SuperCovector(amb, [L(self.g_inv[p, i]) for p in range(n)] + [zero] * m))
        for a in range(m):
            row = [sum((L(src.tau_bar(i, self.A[a, c])) * phi[c] for c in range(m)), zero)
                   for i in range(n)]
            row += [L(self.A[a, mu]) for mu in range(m)]
            covs.append(SuperCovector(amb, row))
        return vecs, covs

    def inverse_formulas(self):
        """Source basis written in the new basis (coefficient lists)."""
        src = self.source
        amb = src.ambient
        n, m = amb
        L = lambda r: lift(amb, r)
        phi = src.phis
        zero = SuperScalar.zero(amb)
        vecs, covs = [], []
        for q in range(n):
            row = [L(self.g_inv[q, i]) for i in range(n)]
            for a in range(m):
                row.append(sum((L(src.tau_bar(q, self.A[a, c])) * phi[c] for c in range(m)), zero))
            vecs.append(SuperVector(amb, row))
        for b in range(m):
            vecs.append(SuperVector(amb, [zero] * n + [L(self.A[a, b]) for a in range(m)]))
        for j in range(n):
            covs.append(SuperCovector(amb, [L(self.g[p, j]) for p in range(n)] + [zero] * m))
        for b in range(m):
            row = [sum((L(self.mixed[p, b, c]) * phi[c] for c in range(m)), zero)
                   for p in range(n)]
            row += [L(self.A_inv[b, a]) for a in range(m)]
            covs.append(SuperCovector(amb, row))
        return vecs, covs


def change_frame(x, fc: FrameChange, direction: str = "forward"):
    """forward: coefficients on the new basis -> coefficients on the source basis;
    inverse: the other way round.  ``x`` may be a basis symbol such as
    "tau1", "psi2", "omega1" or "rho1" (a new-basis symbol for forward)."""
    if isinstance(x, str):
        x = basis_symbol(fc.source.ambient, x)
    src, tgt = fc.source, fc.target
    if direction == "forward":
        return src.from_reference(tgt.to_reference(x))
    if direction == "inverse":
        return tgt.from_reference(src.to_reference(x))
    raise ValueError("direction must be 'forward' or 'inverse'")


def basis_symbol(ambient, name: str):
    name = name.rstrip("'")
    n = ambient[0]
    for prefix, cls, offset in (("tau", SuperVector, 0), ("psi", SuperVector, n),
                                ("omega", SuperCovector, 0), ("rho", SuperCovector, n)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            k = int(name[len(prefix):]) - 1 + offset
            limit = n if offset == 0 else ambient[1]
            if not 0 <= k - offset < limit:
                raise UnsupportedShapeError(f"basis symbol {name} out of range")
            return cls.basis(ambient, k)
    raise UnsupportedShapeError(f"unknown basis symbol {name!r}")


class AlgebroidElement:
    """Element of T + Omega."""

    __slots__ = ("vector", "covector")

    def __init__(self, vector: SuperVector | None = None, covector: SuperCovector | None = None):
        if vector is None and covector is None:
            raise ValueError("need a vector or covector part")
        amb = (vector if vector is not None else covector).ambient
        self.vector = vector if vector is not None else SuperVector.zero(amb)
        self.covector = covector if covector is not None else SuperCovector.zero(amb)
        if self.vector.ambient != self.covector.ambient:
            raise AmbientMismatchError("vector and covector parts differ in ambient")

    @property
    def ambient(self):
        return self.vector.ambient

    @classmethod
    def of(cls, x) -> "AlgebroidElement":
        if isinstance(x, AlgebroidElement):
            return x
        if isinstance(x, SuperVector):
            return cls(x)
        if isinstance(x, SuperCovector):
            return cls(None, x)
        raise TypeError(f"not an algebroid element: {x!r}")

    def __add__(self, other):
        other = AlgebroidElement.of(other)
        return AlgebroidElement(self.vector + other.vector, self.covector + other.covector)

    def __neg__(self):
        return AlgebroidElement(-self.vector, -self.covector)

    def __sub__(self, other):
        return self + (-AlgebroidElement.of(other))

    def __rmul__(self, a):
        return AlgebroidElement(a * self.vector, a * self.covector)

    def __eq__(self, other):
        return (isinstance(other, AlgebroidElement) and self.vector == other.vector
                and self.covector == other.covector)

    def __hash__(self):
        return hash((self.vector, self.covector))

    def __repr__(self):
        return f"AlgebroidElement({self.vector!r} | {self.covector!r})"

    def parity_parts(self) -> dict:
        out: dict = {}
        for p, v in self.vector.parity_parts().items():
            out[p] = AlgebroidElement(v)
        for p, w in self.covector.parity_parts().items():
            out[p] = out[p] + AlgebroidElement(None, w) if p in out else AlgebroidElement(None, w)
        return out


class VertexAlgebroid:
    """(gamma, <,>, c) of the vertex superalgebroid attached to a frame."""

    def __init__(self, frame: Frame):
        self.frame = frame
        self.ambient = frame.ambient
        self._basis_pair: dict = {}

    def _terms(self, v: SuperVector):
        """(k, homogeneous coefficient) with v = sum c e'_k."""
        for k, c in enumerate(self.frame.decompose_vector(v)):
            for piece in c.parity_parts().values():
                yield k, piece

    # -- gamma ----------------------------------------------------------
    def gamma(self, f: SuperScalar, v: SuperVector) -> SuperCovector:
        F = self.frame
        out = SuperCovector.zero(self.ambient)
        for pf, fp in f.parity_parts().items():
            df = d_scalar(fp)
            for k, c in self._terms(v):
                e, pk, pc = F.vectors[k], F.parity(k), c.parity()
                ef = e.apply(fp)
                if ef:
                    out = out - _sgn(pk * (pf + pc)) * (ef * d_scalar(c))
                ec = e.apply(c)
                if ec:
                    out = out - _sgn(pf * pc + pk * pf + pk * pc) * (ec * df)
        return out

    # -- pairing --------------------------------------------------------
    def _basis_with(self, k: int, w: SuperVector) -> SuperScalar:
        """<e'_k, w> for a homogeneous w (through supersymmetry)."""
        F = self.frame
        pk = F.parity(k)
        out = SuperScalar.zero(self.ambient)
        ek = F.vectors[k]
        for j, d in self._terms(w):
            pd, pj = d.parity(), F.parity(j)
            # <d e_j, e_k> = -(-1)^{p(d)(p_j+p_k)} e_j(e_k(d))
            inner = F.vectors[j].apply(ek.apply(d))
            if inner:
                val = -_sgn(pd * (pj + pk)) * inner
                out = out + _sgn(pk * (pd + pj)) * val
        return out

    def pair_vectors(self, v: SuperVector, w: SuperVector) -> SuperScalar:
        F = self.frame
        out = SuperScalar.zero(self.ambient)
        for pw, wp in w.parity_parts().items():
            for k, c in self._terms(v):
                pc = c.parity()
                base = self._basis_with(k, wp)
                if base:
                    out = out + c * base
                inner = F.vectors[k].apply(wp.apply(c))
                if inner:
                    out = out - _sgn(pc * (F.parity(k) + pw)) * inner
        return out

    def pairing(self, x, y) -> SuperScalar:
        x, y = AlgebroidElement.of(x), AlgebroidElement.of(y)
        if x.ambient != y.ambient or x.ambient != self.ambient:
            raise AmbientMismatchError("pairing across ambients")
        out = self.pair_vectors(x.vector, y.vector)
        out = out + dual_pairing(x.vector, y.covector)
        for pw, wp in x.covector.parity_parts().items():
            for pv, vp in y.vector.parity_parts().items():
                out = out + _sgn(pw * pv) * dual_pairing(vp, wp)
        return out

    # -- c --------------------------------------------------------------
    def _c_with_basis(self, w: SuperVector, k: int) -> SuperCovector:
        """c(w, e'_k) for homogeneous w."""
        F = self.frame
        pk = F.parity(k)
        out = SuperCovector.zero(self.ambient)
        ek = F.vectors[k]
        for j, d in self._terms(w):
            inner = F.vectors[j].apply(ek.apply(d))
            if inner:
                out = out + _sgn(d.parity() * (F.parity(j) + pk)) * (HALF * d_scalar(inner))
        return out

    def c(self, x, y) -> SuperCovector:
        x, y = AlgebroidElement.of(x), AlgebroidElement.of(y)
        if not (x.covector.is_zero() and y.covector.is_zero()):
            raise UnsupportedShapeError("c is defined on T x T only")
        v, w = x.vector, y.vector
        F = self.frame
        out = SuperCovector.zero(self.ambient)
        for pw, wp in w.parity_parts().items():
            for k, a in self._terms(v):
                pa, pk = a.parity(), F.parity(k)
                ek = F.vectors[k]
                # a c(e_k, w) with c(e_k, w) = -(-1)^{p_k p_w} c(w, e_k)
                base = self._c_with_basis(wp, k)
                if base:
                    out = out - _sgn(pk * pw) * (a * base)
                br = bracket(ek, wp)
                if br:
                    out = out + self.gamma(a, br)
                s = _sgn(pa * (pk + pw))
                pair = self.pair_vectors(ek, wp)
                if pair:
                    out = out - s * (HALF * (pair * d_scalar(a)))
                inner = ek.apply(wp.apply(a))
                if inner:
                    out = out + s * (HALF * d_scalar(inner))
        return out


# -- literal tables (reference frame, arguments with a, b in A) -----------

def _shape_scalar(f: SuperScalar):
    """Return (a, r) for f = a (r = None) or f = a phi_r; else raise."""
    if len(f.terms) > 1:
        raise UnsupportedShapeError("scalar is not a single monomial")
    if not f.terms:
        return RatFunc.const(f.ambient[0], 0), None
    (s, a), = f.terms.items()
    if len(s) == 0:
        return a, None
    if len(s) == 1:
        return a, s[0]
    raise UnsupportedShapeError("scalar has more than one odd generator")


def _shape_vector(v: SuperVector):
    """Return (kind, k, b, s): b e_k with b = b0 (s None) or b0 phi_s."""
    nz = [(k, c) for k, c in enumerate(v.coeffs) if c]
    if len(nz) != 1:
        raise UnsupportedShapeError("vector is not a single basis term")
    k, c = nz[0]
    b, s = _shape_scalar(c)
    return k, b, s


def gamma_table(f: SuperScalar, v: SuperVector) -> SuperCovector:
    amb = f.ambient
    n = amb[0]
    a, r = _shape_scalar(f)
    k, b, s = _shape_vector(v)
    A_, B_ = lift(amb, a), lift(amb, b)
    da, db = d_scalar(A_), d_scalar(B_)
    zero = SuperCovector.zero(amb)
    if k < n:
        i = k + 1
        if s is not None:
            raise UnsupportedShapeError("odd coefficient on tau")
        if r is None:
            return -(lift(amb, a.partial(i)) * db) - lift(amb, b.partial(i)) * da
        aphi = A_ * SuperScalar.phi(amb, r)
        return (-(lift(amb, a.partial(i)) * SuperScalar.phi(amb, r) * db)
                - lift(amb, b.partial(i)) * d_scalar(aphi))
    mu = k - n + 1
    if r is None:
        if s is None:
            return zero
        return B_ * da if s == mu else zero
    if s is None:
        return A_ * db if r == mu else zero
    out = zero
    if r == mu:
        out = out - A_ * d_scalar(B_ * SuperScalar.phi(amb, s))
    if s == mu:
        out = out + B_ * d_scalar(A_ * SuperScalar.phi(amb, r))
    return out


def pairing_table(v: SuperVector, w: SuperVector) -> SuperScalar:
    amb = v.ambient
    n = amb[0]
    k1, a, s1 = _shape_vector(v)
    k2, b, s2 = _shape_vector(w)
    zero = SuperScalar.zero(amb)
    tau1, tau2 = k1 < n, k2 < n
    if (tau1 and s1 is not None) or (tau2 and s2 is not None):
        raise UnsupportedShapeError("odd coefficient on tau")
    if (not tau1 and s1 is None) or (not tau2 and s2 is None):
        return zero  # pairings with b psi vanish
    if tau1 and tau2:
        i, j = k1 + 1, k2 + 1
        return lift(amb, -b * a.partial(j).partial(i) - a * b.partial(i).partial(j)
                    - b.partial(i) * a.partial(j))
    if not tau1 and tau2:
        alpha, beta, i = s1, k1 - n + 1, k2 + 1
        return lift(amb, b * a.partial(i)) if alpha == beta else zero
    if tau1 and not tau2:
        return pairing_table(w, v)
    alpha, beta = s1, k1 - n + 1
    alpha2, beta2 = s2, k2 - n + 1
    return lift(amb, a * b) if (beta == alpha2 and beta2 == alpha) else zero


def c_table(v: SuperVector, w: SuperVector) -> SuperCovector:
    amb = v.ambient
    n = amb[0]
    k1, a, s1 = _shape_vector(v)
    k2, b, s2 = _shape_vector(w)
    zero = SuperCovector.zero(amb)
    L = lambda r: lift(amb, r)
    d = lambda r: d_scalar(L(r))
    tau1, tau2 = k1 < n, k2 < n
    if (tau1 and s1 is not None) or (tau2 and s2 is not None):
        raise UnsupportedShapeError("odd coefficient on tau")
    if (not tau1 and s1 is None) or (not tau2 and s2 is None):
        return zero
    if tau1 and tau2:
        i, j = k1 + 1, k2 + 1
        ti_b, tj_a = b.partial(i), a.partial(j)
        return (HALF * (L(ti_b) * d(tj_a) - L(tj_a) * d(ti_b))
                + HALF * d(b * tj_a.partial(i) - a * ti_b.partial(j)))
    if not tau1 and not tau2:
        alpha, mu, beta, nu = s1, k1 - n + 1, s2, k2 - n + 1
        if mu == beta and nu == alpha:
            return HALF * (L(a) * d(b) - L(b) * d(a))
        return zero
    if not tau1 and tau2:
        alpha, mu, i = s1, k1 - n + 1, k2 + 1
        return -HALF * d(b * a.partial(i)) if alpha == mu else zero
    # c(b tau, a phi psi) by skew-supersymmetry (both even)
    return -c_table(w, v)


# -- axiom residuals -------------------------------------------------------

def _p(x) -> int:
    p = x.parity()
    if p is None:
        raise ValueError("axiom residuals need homogeneous arguments")
    return p


def d_lie_bilinear(c, t1, t2, t3) -> SuperCovector:
    """d_Lie of an even T x T -> Omega map at (t1, t2, t3)."""
    args = [t1, t2, t3]
    ps = [_p(t) for t in args]
    out = SuperCovector.zero(t1.ambient)
    for j in range(3):
        rest = args[:j] + args[j + 1:]
        e = j + ps[j] * sum(ps[:j])
        out = out + _sgn(e) * vector_on_covector(args[j], c(*rest))
    for j in range(3):
        for l in range(j + 1, 3):
            other = [args[k] for k in range(3) if k not in (j, l)][0]
            e = (j + 1) + (l + 1) + ps[j] * sum(ps[:j]) + ps[l] * (sum(ps[:l]) - ps[j])
            out = out + _sgn(e) * c(bracket(args[j], args[l]), other)
    return out


def residual_2_1_1(V, a, t):
    return dual_pairing(t, d_scalar(a)) - t.apply(a)


def residual_2_1_2(V, a, t, w):
    lhs = vector_on_covector(t, a * w)
    return lhs - t.apply(a) * w - _sgn(_p(t) * _p(a)) * (a * vector_on_covector(t, w))


def residual_2_1_3(V, a, t, w):
    pair = dual_pairing(t, w)
    return (vector_on_covector(a * t, w) - a * vector_on_covector(t, w)
            - _sgn(_p(a) * (_p(t) + _p(w))) * (pair * d_scalar(a)))


def residual_2_1_4(V, t, nu, w):
    return (t.apply(dual_pairing(nu, w)) - dual_pairing(bracket(t, nu), w)
            - _sgn(_p(t) * _p(nu)) * dual_pairing(nu, vector_on_covector(t, w)))


def residual_d_equivariant(V, a, t):
    return vector_on_covector(t, d_scalar(a)) - d_scalar(t.apply(a))


def residual_A1(V, a, b, t):
    pa, pb, pt = _p(a), _p(b), _p(t)
    return (V.gamma(a, b * t) - V.gamma(a * b, t) + a * V.gamma(b, t)
            + _sgn(pt * (pa + pb)) * (t.apply(a) * d_scalar(b))
            + _sgn(pa * pb + pt * pa + pt * pb) * (t.apply(b) * d_scalar(a)))


def residual_A2(V, a, t1, t2):
    pa, p1, p2 = _p(a), _p(t1), _p(t2)
    return (V.pairing(a * t1, t2) - a * V.pairing(t1, t2) - V.pairing(V.gamma(a, t1), t2)
            + _sgn(pa * (p1 + p2)) * t1.apply(t2.apply(a)))


def residual_A3(V, a, t1, t2):
    pa, p1, p2 = _p(a), _p(t1), _p(t2)
    g1 = V.gamma(a, t1)
    s = _sgn(p2 * (p1 + pa))
    s2 = _sgn(pa * (p1 + p2))
    rhs = (a * V.c(t1, t2) + V.gamma(a, bracket(t1, t2))
           - s * V.gamma(t2.apply(a), t1) + s * vector_on_covector(t2, g1)
           - s2 * (HALF * (V.pairing(t1, t2) * d_scalar(a)))
           + s2 * (HALF * d_scalar(t1.apply(t2.apply(a))))
           - _sgn(p2 * (pa + p1)) * (HALF * d_scalar(V.pairing(t2, g1))))
    return V.c(a * t1, t2) - rhs


def residual_A4(V, t1, t2, t3):
    p1, p2, p3 = _p(t1), _p(t2), _p(t3)
    s12 = _sgn(p1 * p2)
    s3 = _sgn(p3 * (p1 + p2))
    lhs = V.pairing(bracket(t1, t2), t3) + s12 * V.pairing(t2, bracket(t1, t3))
    rhs = (t1.apply(V.pairing(t2, t3))
           - s12 * HALF * t2.apply(V.pairing(t1, t3))
           - s3 * HALF * t3.apply(V.pairing(t1, t2))
           + s12 * dual_pairing(t2, V.c(t1, t3))
           + s3 * dual_pairing(t3, V.c(t1, t2)))
    return lhs - rhs


def residual_A5(V, t1, t2, t3, c=None):
    c = c or V.c
    p1, p2, p3 = _p(t1), _p(t2), _p(t3)
    inner = (V.pairing(bracket(t1, t2), t3)
             + _sgn(p2 * p3) * V.pairing(bracket(t1, t3), t2)
             - _sgn(p1 * (p2 + p3)) * V.pairing(bracket(t2, t3), t1)
             - t1.apply(V.pairing(t2, t3))
             + _sgn(p1 * p2) * t2.apply(V.pairing(t1, t3))
             - _sgn(p3 * (p1 + p2)) * 2 * dual_pairing(t3, c(t1, t2)))
    return d_lie_bilinear(c, t1, t2, t3) + HALF * d_scalar(inner)


def residual_supersymmetry(V, x, y):
    return V.pairing(x, y) - _sgn(_p(x) * _p(y)) * V.pairing(y, x)


def residual_c_skew(V, t1, t2):
    return V.c(t1, t2) + _sgn(_p(t1) * _p(t2)) * V.c(t2, t1)


class CorruptedAlgebroid(VertexAlgebroid):
    """Negative control: c + (x^k y^l - x^l y^k) d(a) for even frame indices k < l."""

    def __init__(self, base: VertexAlgebroid, a: SuperScalar, k: int = 0, l: int = 1):
        super().__init__(base.frame)
        if not (k < l < self.ambient[0]):
            raise ValueError("corruption needs two distinct even directions")
        self.base = base
        self.da = d_scalar(a)
        self.k, self.l = k, l

    def c(self, x, y):
        base = self.base.c(x, y)
        x, y = AlgebroidElement.of(x), AlgebroidElement.of(y)
        cx = self.frame.decompose_vector(x.vector)
        cy = self.frame.decompose_vector(y.vector)
        coeff = cx[self.k] * cy[self.l] - cx[self.l] * cy[self.k]
        return base + coeff * self.da if coeff else base


# -- verification ------------------------------------------------------------

@dataclass
class AxiomResult:
    name: str
    passed: bool
    samples: int
    witness: dict | None = None

    def line(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {state} ({self.samples} samples)"


def _format(x) -> str:
    return repr(x)


# name -> (argument kinds, residual); kinds: s scalar, v vector, w covector
AXIOMS = {
    "2.1.1": ("sv", residual_2_1_1),
    "2.1.2": ("svw", residual_2_1_2),
    "2.1.3": ("svw", residual_2_1_3),
    "2.1.4": ("vvw", residual_2_1_4),
    "d-equivariant": ("sv", residual_d_equivariant),
    "A1": ("ssv", residual_A1),
    "A2": ("svv", residual_A2),
    "A3": ("svv", residual_A3),
    "A4": ("vvv", residual_A4),
    "A5": ("vvv", residual_A5),
    "supersymmetry": ("vv", residual_supersymmetry),
    "c-skew": ("vv", residual_c_skew),
}


def verify_axioms(structure: VertexAlgebroid, pool, which=None, samples: int = 10,
                  stop_on_failure: bool = True) -> list[AxiomResult]:
    """Evaluate each residual on seeded homogeneous samples."""
    names = list(which) if which else list(AXIOMS)
    out = []
    for name in names:
        kinds, fn = AXIOMS[name]
        witness = None
        done = 0
        for _ in range(samples):
            args = []
            for k in kinds:
                if k == "s":
                    args.append(pool.scalar())
                elif k == "v":
                    args.append(pool.vector())
                else:
                    args.append(pool.covector())
            res = fn(structure, *args)
            done += 1
            if not res.is_zero():
                witness = {"arguments": [_format(a) for a in args], "residual": _format(res)}
                if stop_on_failure:
                    break
        out.append(AxiomResult(name, witness is None, done, witness))
    return out


def frame_identity_residuals(frame: Frame) -> dict[str, list]:
    """Nonzero residuals of the Jacobian and trace identities for (g, A)."""
    n, m = frame.ambient
    g, A, Ai = frame.g, frame.A, frame.A_inv
    gi = frame.g_inv
    d = lambda f, p: f.partial(p + 1)
    mixed = frame.mixed
    trace_mixed = [sum((mixed[j, v, v] for v in range(m)), RatFunc.const(n, 0)) for j in range(n)]
    out = {k: [] for k in ("3.3.1", "3.3.2", "3.3.3", "3.3.4", "3.3.5")}
    zero = RatFunc.const(n, 0)
    for i in range(n):
        for j in range(n):
            for q in range(n):
                r = sum((g[i, p] * d(g[j, q], p) - g[j, p] * d(g[i, q], p) for p in range(n)), zero)
                if r:
                    out["3.3.1"].append(((i, j, q), r))
            r = sum((g[i, p] * d(d(g[j, q], p), q) - g[j, q] * d(d(g[i, p], q), p)
                     for p in range(n) for q in range(n)), zero)
            if r:
                out["3.3.2"].append(((i, j), r))
            r = sum((g[i, p] * d(trace_mixed[j], p) - g[j, p] * d(trace_mixed[i], p)
                     for p in range(n)), zero)
            if m and r:
                out["3.3.5"].append(((i, j), r))
    for p in range(n):
        for q in range(n):
            for r_ in range(n):
                r = d(gi[q, r_], p) - d(gi[p, r_], q)
                if r:
                    out["3.3.3"].append(((p, q, r_), r))
            if m:
                tpq = (A.map(lambda e: d(e, p)) @ Ai.map(lambda e: d(e, q))).trace()
                tqp = (A.map(lambda e: d(e, q)) @ Ai.map(lambda e: d(e, p))).trace()
                if tpq != tqp:
                    out["3.3.4"].append(((p, q), tpq - tqp))
    return out


def primed_closed_forms(frame: Frame):
    """Closed forms for the reference structure on the frame's basis fields.

    Returns (gamma_tau, gamma_odd, pair_tt, c_tt): gamma_tau(a, p) is
    gamma(a, tau'_p) for a in A, gamma_odd(a, mu, alpha) is
    gamma(a phi'_mu, psi'_alpha), pair_tt[i][j] = <tau'_i, tau'_j> and
    c_tt[i][j] = c(tau'_i, tau'_j).
    """
    amb = frame.ambient
    n, m = amb
    g, A, Ai, mixed = frame.g, frame.A, frame.A_inv, frame.mixed
    L = lambda r: lift(amb, r)
    D = lambda r: d_scalar(L(r))
    d = lambda f, p: f.partial(p + 1)
    zero_r = RatFunc.const(n, 0)
    tr_mixed = [sum((mixed[j, v, v] for v in range(m)), zero_r) for j in range(n)]

    def gamma_tau(a: RatFunc, p: int) -> SuperCovector:
        out = SuperCovector.zero(amb)
        for q in range(n):
            out = out - L(d(a, q)) * D(g[p, q]) - L(d(g[p, q], q)) * D(a)
        return out + L(tr_mixed[p]) * D(a)

    def gamma_odd(a: RatFunc, mu: int, alpha: int) -> SuperCovector:
        out = SuperCovector.zero(amb)
        for b in range(m):
            out = out + L(a * A[mu, b]) * D(Ai[b, alpha])
        return out

    pair_tt = [[None] * n for _ in range(n)]
    c_tt = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = zero_r
            for p in range(n):
                for q in range(n):
                    acc = acc - 2 * g[i, p] * d(d(g[j, q], p), q) - d(g[j, q], p) * d(g[i, p], q)
                acc = acc + 2 * g[i, p] * d(tr_mixed[j], p)
                for q in range(n):
                    for mu in range(m):
                        for b in range(m):
                            for c in range(m):
                                for s in range(m):
                                    acc = acc + (g[i, p] * g[j, q] * d(Ai[mu, b], p) * A[b, c]
                                                 * d(Ai[c, s], q) * A[s, mu])
            pair_tt[i][j] = L(acc)
            cc = SuperCovector.zero(amb)
            for p in range(n):
                for q in range(n):
                    cc = cc + HALF * (L(d(g[j, q], p)) * D(d(g[i, p], q))
                                      - L(d(g[i, p], q)) * D(d(g[j, q], p)))
            for mu in range(m):
                for nu in range(m):
                    cc = cc + HALF * (L(mixed[i, mu, nu]) * D(mixed[j, nu, mu])
                                      - L(mixed[j, nu, mu]) * D(mixed[i, mu, nu]))
            c_tt[i][j] = cc
    return gamma_tau, gamma_odd, pair_tt, c_tt
