"""h-maps, the Chern-Simons 3-form b and the Atiyah 2-form a.

Each quantity has a definitional path (evaluate the algebroid structure on
the new frame's basis) and a closed trace-formula path; the public entry
points compute both and raise ConsistencyError when they disagree.

Forms come back as PolyForms in reference coordinates.  They only have even
directions, so they are pulled back from the new frame's tau-basis by the
tau-coefficients of the reference basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .algebroid import Frame, FrameChange, VertexAlgebroid
from .charts import ChartSystem
from .errors import ConsistencyError, NonHolonomicError
from .kernel import RatFunc, RatMatrix
from .supergeometry import (PolyForm, SuperCovector, SuperScalar, SuperVector, de_rham_d,
                            vector_on_covector)

HALF = Fraction(1, 2)


def _require_holonomic(fc: FrameChange):
    if not (fc.holonomic and fc.source.holonomic):
        raise NonHolonomicError(f"frame change {fc.name} is not holonomic")


def _even_body(s: SuperScalar, what: str) -> RatFunc:
    if any(t for t in s.terms if t):
        raise ConsistencyError(f"{what} has odd-generator terms: {s!r}")
    return s.body()


def _dmat(frame: Frame, i: int, M: RatMatrix) -> RatMatrix:
    return M.map(lambda e: frame.tau_bar(i, e))


def _omega_combination(frame: Frame, coeffs) -> SuperCovector:
    out = SuperCovector.zero(frame.ambient)
    for r, c in enumerate(coeffs):
        if c:
            out = out + frame.lift(c) * frame.covectors[r]
    return out


# -- h --------------------------------------------------------------------

def h_matrix_definitional(fc: FrameChange) -> RatMatrix:
    """h^{ij} from <x', h(y')> = -1/2 <x', y'>, the pairing taken in the
    source structure and h(tau'_i) = h^{ij} omega_j (source covectors)."""
    src, tgt = fc.source, fc.target
    n = src.ambient[0]
    V = VertexAlgebroid(src)
    P = [[V.pairing(tgt.vectors[k], tgt.vectors[i]) for i in range(n)] for k in range(n)]
    rows = []
    for i in range(n):
        cov = SuperCovector.zero(src.ambient)
        for k in range(n):
            if P[k][i]:
                cov = cov + (-HALF * P[k][i]) * tgt.covectors[k]
        coeffs = src.decompose_covector(cov)
        if any(c for c in coeffs[n:]):
            raise ConsistencyError("h(tau') has rho components")
        rows.append([_even_body(c, "h coefficient") for c in coeffs[:n]])
    return RatMatrix(rows, n)


def h_parts_closed(fc: FrameChange) -> tuple[RatMatrix, RatMatrix]:
    """(h_Omega, h_E) from the trace-type closed formulas."""
    src = fc.source
    n, m = src.ambient
    g, gi, A, Ai, mixed = fc.g, fc.g_inv, fc.A, fc.A_inv, fc.mixed
    t = src.tau_bar
    zero = RatFunc.const(n, 0)
    h_om, h_e = [], []
    for i in range(n):
        row_om, row_e = [], []
        for j in range(n):
            acc = sum((t(p, t(j, g[i, p])) for p in range(n)), zero)
            for p, q, r in itertools.product(range(n), repeat=3):
                acc = acc + HALF * t(q, g[i, p]) * t(p, g[r, q]) * gi[j, r]
            row_om.append(acc)
            acc = sum((t(j, mixed[i, v, v]) for v in range(m)), zero)
            if m:
                tjAi = _dmat(src, j, Ai)
                for q in range(n):
                    if g[i, q]:
                        prod = tjAi @ A @ _dmat(src, q, Ai) @ A
                        acc = acc + HALF * g[i, q] * prod.trace()
            row_e.append(acc)
        h_om.append(row_om)
        h_e.append(row_e)
    return RatMatrix(h_om, n), RatMatrix(h_e, n)


def h_tangent_natural(fc: FrameChange) -> RatMatrix:
    """h^{ij} = 2 tau_p tau_j(g^{ip}), valid for natural frames of T."""
    t = fc.source.tau_bar
    n = fc.source.ambient[0]
    return RatMatrix([[sum((2 * t(p, t(j, fc.g[i, p])) for p in range(n)), RatFunc.const(n, 0))
                       for j in range(n)] for i in range(n)], n)


@dataclass
class HMap:
    """h: T -> Omega for a frame change, h(tau'_i) = h^{ij} omega_j, h(psi') = 0,
    extended by h(a x') = a h(x') - gamma(a, x')."""

    change: FrameChange
    matrix: RatMatrix
    h_omega: RatMatrix
    h_e: RatMatrix

    @cached_property
    def _structure(self):
        return VertexAlgebroid(self.change.source)

    def basis_value(self, k: int) -> SuperCovector:
        src = self.change.source
        n = src.ambient[0]
        if k >= n:
            return SuperCovector.zero(src.ambient)
        return _omega_combination(src, [self.matrix[k, j] for j in range(n)])

    def __call__(self, v) -> SuperCovector:
        tgt = self.change.target
        out = SuperCovector.zero(tgt.ambient)
        for k, c in enumerate(tgt.decompose_vector(v)):
            for piece in c.parity_parts().values():
                hv = self.basis_value(k)
                if hv:
                    out = out + piece * hv
                out = out - self._structure.gamma(piece, tgt.vectors[k])
        return out


def h_of_change(fc: FrameChange, check: bool = True) -> HMap:
    _require_holonomic(fc)
    h = h_matrix_definitional(fc)
    h_om, h_e = h_parts_closed(fc)
    if check and h != h_om - h_e:
        raise ConsistencyError(f"h for {fc.name}: definitional {h} vs closed {h_om - h_e}")
    return HMap(fc, h, h_om, h_e)


# -- b --------------------------------------------------------------------

def b_value(fc: FrameChange, hmap: HMap, x: int, y: int) -> SuperCovector:
    """b(x', y') = c(x', y') - x'(h(y')) + (-1)^{p(x')p(y')} y'(h(x')) on
    target basis indices x, y."""
    tgt = fc.target
    V = hmap._structure
    ex, ey = tgt.vectors[x], tgt.vectors[y]
    out = V.c(ex, ey) - vector_on_covector(ex, hmap.basis_value(y))
    sign = -1 if tgt.parity(x) and tgt.parity(y) else 1
    return out + sign * vector_on_covector(ey, hmap.basis_value(x))


def b_table_definitional(fc: FrameChange, hmap: HMap | None = None) -> dict:
    hmap = hmap or h_of_change(fc)
    N = fc.target.size()
    return {(i, j): b_value(fc, hmap, i, j) for i in range(N) for j in range(N)}


def _cube_traces(frame: Frame, M: RatMatrix, Mi: RatMatrix, i: int, j: int) -> list:
    n = frame.ambient[0]
    X = [Mi @ _dmat(frame, k, M) for k in range(n)]
    return [(X[i] @ X[j] @ X[r] - X[j] @ X[i] @ X[r]).trace() for r in range(n)]


def b_parts_closed(fc: FrameChange) -> tuple[dict, dict]:
    """(b_Omega, b_E) on tau'-pairs from the trace formulas."""
    tgt = fc.target
    n, m = tgt.ambient
    b_om, b_e = {}, {}
    for i in range(n):
        for j in range(n):
            tg = _cube_traces(tgt, fc.g, fc.g_inv, i, j)
            b_om[i, j] = _omega_combination(tgt, [-HALF * c for c in tg])
            if m:
                ta = _cube_traces(tgt, fc.A, fc.A_inv, i, j)
                b_e[i, j] = _omega_combination(tgt, [-HALF * c for c in ta])
            else:
                b_e[i, j] = SuperCovector.zero(tgt.ambient)
    return b_om, b_e


def form_from_table(frame: Frame, degree: int, table: dict) -> PolyForm:
    """Pull back a form known on the frame's even basis (values on tuples of
    tau'-indices of length degree - 1) to reference coordinates; odd
    reference directions are spanned by psi' and give zero."""
    n, m = frame.ambient
    amb = frame.ambient
    coeff = []
    for p in range(n):
        dec = frame.decompose_vector(SuperVector.basis(amb, p))
        coeff.append([_even_body(c, "frame coefficient") for c in dec[:n]])
    values = {}
    for rest in itertools.product(range(n), repeat=degree - 1):
        acc = SuperCovector.zero(amb)
        for prim in itertools.product(range(n), repeat=degree - 1):
            w = RatFunc.const(n, 1)
            for p, i in zip(rest, prim):
                w = w * coeff[p][i]
                if not w:
                    break
            if w and table.get(prim):
                acc = acc + frame.lift(w) * table[prim]
        values[rest] = acc
    return PolyForm(amb, degree, values)


@dataclass
class Cocycle:
    """A form with its definitional table, closed-form table and PolyForm."""

    name: str
    degree: int
    table: dict
    closed: dict
    form: PolyForm
    parts: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return self.form.is_zero()


def b_of_change(fc: FrameChange, check: bool = True, hmap: HMap | None = None) -> Cocycle:
    _require_holonomic(fc)
    hmap = hmap or h_of_change(fc, check)
    tgt = fc.target
    n = tgt.ambient[0]
    full = b_table_definitional(fc, hmap)
    b_om, b_e = b_parts_closed(fc)
    closed = {k: b_om[k] - b_e[k] for k in b_om}
    if check:
        for (i, j), v in full.items():
            if i >= n or j >= n:
                if v:
                    raise ConsistencyError(f"b({i},{j}) has a psi' argument but is {v!r}")
            elif v != closed[i, j]:
                raise ConsistencyError(f"b on tau'_{i + 1}, tau'_{j + 1}: {v!r} vs {closed[i, j]!r}")
    table = {(i, j): full[i, j] for i in range(n) for j in range(n)}
    form = form_from_table(tgt, 3, table)
    return Cocycle(f"b[{fc.source.name},{tgt.name}]", 3, table, closed, form,
                   {"omega": b_om, "E": b_e})


# -- a --------------------------------------------------------------------

def compose(fc1: FrameChange, fc2: FrameChange, name: str | None = None) -> FrameChange:
    t = fc1.target
    s = fc2.source
    if s.g != t.g or s.A != t.A:
        raise ConsistencyError("frame changes are not composable")
    A = fc2.A @ fc1.A if t.ambient[1] else None
    return FrameChange(fc1.source, fc2.g @ fc1.g, A, fc1.holonomic and fc2.holonomic,
                       name or fc2.name)


def a_table_definitional(fc1: FrameChange, fc2: FrameChange, check: bool = True,
                         hmaps=None):
    """a(e''_k) = h(e''_k) + h'(e''_k) - h''(e''_k) on every target basis vector."""
    if hmaps is None:
        fc3 = compose(fc1, fc2)
        hmaps = (h_of_change(fc1, check), h_of_change(fc2, check), h_of_change(fc3, check))
    h1, h2, h3 = hmaps
    tgt = fc2.target
    out = {}
    for k, e in enumerate(tgt.vectors):
        out[k] = h1(e) + h2(e) - h3(e)
    return out


def _pair_traces(frame: Frame, M1, M1i, M2, M2i, i: int) -> list:
    # tr{M2^-1 tau_i(M2) tau_r(M1) M1^-1 - M2^-1 tau_r(M2) tau_i(M1) M1^-1}
    n = frame.ambient[0]
    D2 = [M2i @ _dmat(frame, k, M2) for k in range(n)]
    D1 = [_dmat(frame, k, M1) @ M1i for k in range(n)]
    return [(D2[i] @ D1[r] - D2[r] @ D1[i]).trace() for r in range(n)]


def a_parts_closed(fc1: FrameChange, fc2: FrameChange) -> tuple[dict, dict]:
    tgt = fc2.target
    n, m = tgt.ambient
    a_om, a_e = {}, {}
    for i in range(n):
        tg = _pair_traces(tgt, fc1.g, fc1.g_inv, fc2.g, fc2.g_inv, i)
        a_om[i,] = _omega_combination(tgt, [HALF * c for c in tg])
        if m:
            ta = _pair_traces(tgt, fc1.A, fc1.A_inv, fc2.A, fc2.A_inv, i)
            a_e[i,] = _omega_combination(tgt, [HALF * c for c in ta])
        else:
            a_e[i,] = SuperCovector.zero(tgt.ambient)
    return a_om, a_e


def a_of_triple(fc1: FrameChange, fc2: FrameChange, check: bool = True,
                hmaps=None) -> Cocycle:
    """hmaps, if given, are the h-maps of fc1, fc2 and their composite."""
    _require_holonomic(fc1)
    _require_holonomic(fc2)
    tgt = fc2.target
    n = tgt.ambient[0]
    full = a_table_definitional(fc1, fc2, check, hmaps)
    a_om, a_e = a_parts_closed(fc1, fc2)
    closed = {k: a_om[k] - a_e[k] for k in a_om}
    if check:
        for k, v in full.items():
            if k >= n:
                if v:
                    raise ConsistencyError(f"a(psi''_{k - n + 1}) = {v!r}, expected 0")
            elif v != closed[k,]:
                raise ConsistencyError(f"a(tau''_{k + 1}): {v!r} vs {closed[k,]!r}")
    table = {(k,): full[k] for k in range(n)}
    form = form_from_table(tgt, 2, table)
    return Cocycle(f"a[{fc1.source.name},{fc1.target.name},{tgt.name}]", 2, table, closed, form,
                   {"omega": a_om, "E": a_e})


# -- chart-system level ---------------------------------------------------

class CocycleCache:
    """h-maps and cocycles of one chart system, computed once per chart pair."""

    def __init__(self, system: ChartSystem, check: bool = True):
        self.system = system
        self.check = check
        self._h: dict = {}
        self._b: dict = {}
        self._a: dict = {}

    def h(self, u: str, v: str) -> HMap:
        if (u, v) not in self._h:
            self._h[u, v] = h_of_change(self.system.change(u, v), self.check)
        return self._h[u, v]

    def b(self, u: str, v: str) -> Cocycle:
        if (u, v) not in self._b:
            self._b[u, v] = b_of_change(self.system.change(u, v), self.check, self.h(u, v))
        return self._b[u, v]

    def a(self, u: str, v: str, w: str) -> Cocycle:
        if (u, v, w) not in self._a:
            hm = (self.h(u, v), self.h(v, w), self.h(u, w))
            self._a[u, v, w] = a_of_triple(self.system.change(u, v), self.system.change(v, w),
                                           self.check, hm)
        return self._a[u, v, w]


def b_between(system: ChartSystem, u: str, v: str, check: bool = True) -> Cocycle:
    return b_of_change(system.change(u, v), check)


def a_between(system: ChartSystem, u: str, v: str, w: str, check: bool = True) -> Cocycle:
    return a_of_triple(system.change(u, v), system.change(v, w), check)


def trace_identity_cube(frame: Frame, A: RatMatrix, i: int, j: int, r: int) -> RatFunc:
    """tr{A^t t_i(A^-t) A^t t_j(A^-t) A^t t_r(A^-t)} + tr{A^-1 t_r(A) A^-1 t_j(A) A^-1 t_i(A)}."""
    At = A.transpose()
    Ati = At.inverse()
    Ai = A.inverse()
    d = lambda k, M: _dmat(frame, k, M)
    left = (At @ d(i, Ati) @ At @ d(j, Ati) @ At @ d(r, Ati)).trace()
    right = (Ai @ d(r, A) @ Ai @ d(j, A) @ Ai @ d(i, A)).trace()
    return left + right


def trace_identity_pair(frame: Frame, A: RatMatrix, B: RatMatrix, i: int, j: int) -> RatFunc:
    """tr{A^t t_i(A^-t) t_j(B^-t) B^t} - tr{A^-1 t_i(A) t_j(B) B^-1}."""
    At, Bt = A.transpose(), B.transpose()
    d = lambda k, M: _dmat(frame, k, M)
    left = (At @ d(i, At.inverse()) @ d(j, Bt.inverse()) @ Bt).trace()
    right = (A.inverse() @ d(i, A) @ d(j, B) @ B.inverse()).trace()
    return left - right


@dataclass
class DualReport:
    a_equal: bool
    b_equal: bool
    a_e_equal: bool
    b_e_equal: bool
    details: dict

    @property
    def passed(self) -> bool:
        return self.a_equal and self.b_equal and self.a_e_equal and self.b_e_equal


def dual_compare(system: ChartSystem, triple=None) -> DualReport:
    """Compare (a, b) and their E-parts for the bundle and its dual."""
    u, v, w = triple or system.triples[0]
    c1 = CocycleCache(system)
    c2 = CocycleCache(system.with_bundle(system.bundle.dual()))
    a1, a2 = c1.a(u, v, w), c2.a(u, v, w)
    b1, b2 = c1.b(u, v), c2.b(u, v)
    a_e = all(a1.parts["E"][k] == a2.parts["E"][k] for k in a1.parts["E"])
    b_e = all(b1.parts["E"][k] == b2.parts["E"][k] for k in b1.parts["E"])
    return DualReport(a1.form == a2.form, b1.form == b2.form, a_e, b_e,
                      {"a": (a1, a2), "b": (b1, b2)})


# sign pattern (s1, s2, s3) in d a_{uvw} = s1 b_{vw} + s2 b_{uw} + s3 b_{uv};
# determined on a general rank-3 bundle over P^3 and frozen
CECH_SIGNS = (-1, 1, -1)


def find_sign_patterns(da: PolyForm, b_vw: PolyForm, b_uw: PolyForm, b_uv: PolyForm) -> list:
    out = []
    for s in itertools.product((1, -1), repeat=3):
        if da == s[0] * b_vw + s[1] * b_uw + s[2] * b_uv:
            out.append(s)
    return out


@dataclass
class CechReport:
    closed: dict
    alternating_sum_zero: bool
    mixed: dict
    patterns: dict

    @property
    def passed(self) -> bool:
        return (all(self.closed.values()) and self.alternating_sum_zero
                and all(self.mixed.values()))


def cech_consistency(system: ChartSystem, charts=None) -> CechReport:
    charts = list(charts or system.charts)
    if len(charts) < 4:
        raise ValueError("need at least four charts")
    c1, c2, c3, c4 = charts[:4]
    cache = CocycleCache(system)
    bs = {}
    for u, v in itertools.combinations(charts[:4], 2):
        bs[u, v] = cache.b(u, v).form
    closed = {f"{u},{v}": de_rham_d(b).is_zero() for (u, v), b in bs.items()}
    triples = [(c1, c2, c3), (c1, c2, c4), (c1, c3, c4), (c2, c3, c4)]
    a = {t: cache.a(*t).form for t in triples}
    alt = a[triples[0]] - a[triples[1]] + a[triples[2]] - a[triples[3]]
    mixed, patterns = {}, {}
    s1, s2, s3 = CECH_SIGNS
    for (u, v, w) in triples:
        da = de_rham_d(a[u, v, w])
        key = f"{u},{v},{w}"
        mixed[key] = da == s1 * bs[v, w] + s2 * bs[u, w] + s3 * bs[u, v]
        patterns[key] = find_sign_patterns(da, bs[v, w], bs[u, w], bs[u, v])
    return CechReport(closed, alt.is_zero(), mixed, patterns)
