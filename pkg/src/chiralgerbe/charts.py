"""Chart systems: coordinate changes between affine charts plus a bundle.

Every chart's coordinates are stored as rational functions of the first
(reference) chart's coordinates, so all frames live over one field and
the per-chart matrices g, A are taken relative to the reference frame.

Text format (one item per line, ``#`` starts a comment)::

    name: P1
    variables: x
    charts: U0 U1
    overlap U0 -> U1: 1/x
    bundle: tangent              # or cotangent, or general
    rank: 1                      # general only
    matrix U0 -> U1: [[x]]       # general only, A on the overlap
    triple: U0 U1 ...            # optional frame designations

Overlap and matrix expressions are written in the source chart's own
coordinates, named by the declared variables.  Every chart must be reached
from the first one; overlaps closing a cycle are checked for consistency.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property

from .algebroid import Frame, FrameChange
from .errors import NonInvertibleChangeError, ParseError, SpecError
from .kernel import RatFunc, RatMatrix, jacobian_of_map, matrix_invert, parse_ratexpr

BUNDLE_KINDS = ("tangent", "cotangent", "general")


@dataclass(frozen=True)
class BundleSpec:
    """tangent: A = g; cotangent: A = (g^-1)^t; general: explicit per-chart A."""

    kind: str
    matrices: dict | None = None
    rank: int | None = None

    def __post_init__(self):
        if self.kind not in BUNDLE_KINDS:
            raise SpecError(f"unknown bundle kind {self.kind!r}")
        if self.kind == "general" and (self.matrices is None or self.rank is None):
            raise SpecError("a general bundle needs a rank and per-chart matrices")

    def rank_over(self, n: int) -> int:
        return n if self.kind != "general" else self.rank

    def matrix(self, system: "ChartSystem", chart: str) -> RatMatrix:
        g = system.g(chart)
        if self.kind == "tangent":
            return g
        if self.kind == "cotangent":
            return matrix_invert(g).transpose()
        if chart not in self.matrices:
            return RatMatrix.identity(system.n, self.rank)
        return self.matrices[chart]

    def dual(self) -> "BundleSpec":
        if self.kind == "tangent":
            return BundleSpec("cotangent")
        if self.kind == "cotangent":
            return BundleSpec("tangent")
        return BundleSpec("general", {c: matrix_invert(a).transpose()
                                      for c, a in self.matrices.items()}, self.rank)


@dataclass
class ChartSystem:
    name: str
    variables: tuple
    charts: tuple
    coords: dict
    bundle: BundleSpec
    triples: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def ambient(self) -> tuple:
        return (self.n, self.bundle.rank_over(self.n))

    @property
    def reference(self) -> str:
        return self.charts[0]

    def g(self, chart: str) -> RatMatrix:
        return self._jacobians[chart]

    @cached_property
    def _jacobians(self) -> dict:
        return {c: jacobian_of_map(self.coords[c]) for c in self.charts}

    def A(self, chart: str) -> RatMatrix:
        return self.bundle.matrix(self, chart)

    def frame(self, chart: str) -> Frame:
        if chart not in self.coords:
            raise SpecError(f"unknown chart {chart!r}")
        if chart == self.reference:
            return Frame.reference(self.ambient)
        return Frame(self.ambient, self.g(chart), self.A(chart), chart)

    def change(self, source: str, target: str) -> FrameChange:
        """The holonomic frame change between two charts' frames."""
        src = self.frame(source)
        g = self.g(target) @ src.g_inv
        A = self.A(target) @ src.A_inv if self.ambient[1] else None
        return FrameChange(src, g, A, True, target)

    def with_bundle(self, bundle: BundleSpec) -> "ChartSystem":
        return ChartSystem(self.name, self.variables, self.charts, self.coords, bundle,
                           list(self.triples))


# -- built-in systems -----------------------------------------------------

def _system(name, variables, charts, bundle="tangent"):
    n = len(variables)
    gens = RatFunc.gens(n)
    coords = {c: [parse_ratexpr(e, list(variables)) for e in exprs] if exprs else list(gens)
              for c, exprs in charts}
    return ChartSystem(name, tuple(variables), tuple(c for c, _ in charts), coords,
                       BundleSpec(bundle))


def projective_line(bundle="tangent") -> ChartSystem:
    return _system("P1", ["x"], [("U0", None), ("U1", ["1/x"])], bundle)


def projective_plane(bundle="tangent") -> ChartSystem:
    """Standard charts of P^2 plus the chart complementary to x + y + z = 0."""
    s = _system("P2", ["x1", "x2"], [
        ("U0", None), ("U1", ["1/x1", "x2/x1"]), ("U2", ["x1/x2", "1/x2"]),
        ("U3", ["x1/(1 + x1 + x2)", "x2/(1 + x1 + x2)"])], bundle)
    s.triples = [("U0", "U1", "U2"), ("U0", "U1", "U3")]
    return s


def projective_space3(bundle="tangent") -> ChartSystem:
    s = _system("P3", ["x1", "x2", "x3"], [
        ("U0", None), ("U1", ["1/x1", "x2/x1", "x3/x1"]), ("U2", ["x1/x2", "1/x2", "x3/x2"]),
        ("U3", ["x1/x3", "x2/x3", "1/x3"])], bundle)
    s.triples = [("U0", "U1", "U2")]
    return s


BUILTINS = {"p1": projective_line, "p2": projective_plane, "p3": projective_space3}


def random_bundle(system: ChartSystem, seed: int, rank: int | None = None,
                  bound: int = 2) -> BundleSpec:
    """General bundle with seeded invertible per-chart matrices of degree <= 1."""
    rng = random.Random(seed)
    n = system.n
    rank = rank or n
    gens = RatFunc.gens(n)
    matrices = {}
    for chart in system.charts[1:]:
        while True:
            rows = [[RatFunc.const(n, rng.randint(-bound, bound))
                     + sum((rng.randint(-1, 1) * v for v in gens), RatFunc.const(n, 0))
                     for _ in range(rank)] for _ in range(rank)]
            m = RatMatrix(rows, n)
            if not m.det().is_zero():
                matrices[chart] = m
                break
    return BundleSpec("general", matrices, rank)


def random_unimodular_bundle(system: ChartSystem, seed: int, rank: int | None = None,
                             factors: int = 3) -> BundleSpec:
    """General bundle whose per-chart matrices are products of elementary
    matrices with linear entries: polynomial, with polynomial inverses."""
    rng = random.Random(seed)
    n = system.n
    rank = rank or n
    gens = RatFunc.gens(n)
    matrices = {}
    for chart in system.charts[1:]:
        m = RatMatrix.identity(n, rank)
        for _ in range(factors):
            i, j = rng.sample(range(rank), 2)
            e = RatFunc.const(n, rng.choice((-1, 1))) * gens[rng.randrange(n)] \
                + rng.randint(-1, 1)
            rows = [[RatFunc.const(n, int(r == c)) for c in range(rank)] for r in range(rank)]
            rows[i][j] = e
            m = m @ RatMatrix(rows, n)
        matrices[chart] = m
    return BundleSpec("general", matrices, rank)


# -- text format ----------------------------------------------------------

_ITEM = re.compile(r"^(?P<key>name|variables|charts|overlap|bundle|rank|matrix|triple)\b(?P<rest>.*)$")
_ARROW = re.compile(r"^\s*(?P<src>\S+)\s*->\s*(?P<tgt>\S+?)\s*:(?P<body>.*)$")


def _split_top(text: str, line: int) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "(" or ch == "["
        depth -= ch == ")" or ch == "]"
        if depth < 0:
            raise ParseError("unbalanced brackets", line)
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _parse_matrix(text: str, names, line: int) -> RatMatrix:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError("matrix must be written [[..], ..]", line)
    rows = []
    for row in _split_top(text[1:-1], line):
        if not (row.startswith("[") and row.endswith("]")):
            raise ParseError("matrix row must be bracketed", line)
        rows.append([parse_ratexpr(e, names, line) for e in _split_top(row[1:-1], line)])
    if any(len(r) != len(rows) for r in rows):
        raise ParseError("matrix must be square", line)
    return RatMatrix(rows, len(names))


def parse_chart_spec(text: str) -> ChartSystem:
    name, variables, charts, kind, rank = "spec", None, None, None, None
    overlaps, matrices, triples = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ITEM.match(line)
        if not m:
            raise ParseError(f"unrecognised line {line!r}", lineno, 1)
        key, rest = m.group("key"), m.group("rest")
        if key in ("overlap", "matrix"):
            a = _ARROW.match(rest)
            if not a:
                raise ParseError(f"expected '{key} SRC -> TGT: ...'", lineno)
            (overlaps if key == "overlap" else matrices).append(
                (a.group("src"), a.group("tgt"), a.group("body"), lineno))
            continue
        if not rest.lstrip().startswith(":"):
            raise ParseError(f"expected ':' after {key}", lineno)
        value = rest.lstrip()[1:].strip()
        if key == "name":
            name = value
        elif key == "variables":
            variables = value.replace(",", " ").split()
        elif key == "charts":
            charts = value.replace(",", " ").split()
        elif key == "bundle":
            if value not in BUNDLE_KINDS:
                raise SpecError(f"unknown bundle kind {value!r} (line {lineno})")
            kind = value
        elif key == "rank":
            if not value.isdigit() or int(value) < 1:
                raise ParseError("rank must be a positive integer", lineno)
            rank = int(value)
        else:
            triples.append((tuple(value.replace(",", " ").split()), lineno))
    if not variables or not charts:
        raise SpecError("variables and charts must be declared")
    if len(set(charts)) != len(charts):
        raise SpecError("duplicate chart names")
    n = len(variables)
    for src, tgt, _, lineno in overlaps + matrices:
        for c in (src, tgt):
            if c not in charts:
                raise SpecError(f"line {lineno}: undeclared chart {c!r}")

    parsed = []
    for src, tgt, body, lineno in overlaps:
        exprs = [parse_ratexpr(e, variables, lineno) for e in _split_top(body, lineno)]
        if len(exprs) != n:
            raise SpecError(f"line {lineno}: expected {n} coordinate expressions")
        try:
            jacobian_of_map(exprs)
        except NonInvertibleChangeError:
            raise NonInvertibleChangeError(
                f"line {lineno}: singular Jacobian on overlap {src} -> {tgt}") from None
        parsed.append((src, tgt, exprs, lineno))

    # spread reference coordinates along the overlaps
    coords = {charts[0]: list(RatFunc.gens(n))}
    pending = list(parsed)
    while pending:
        progress = False
        for item in list(pending):
            src, tgt, exprs, lineno = item
            if src in coords:
                new = [e.subs(coords[src]) for e in exprs]
                if tgt in coords and coords[tgt] != new:
                    raise SpecError(f"line {lineno}: overlap {src} -> {tgt} disagrees with "
                                    "the coordinates reached by other overlaps")
                coords.setdefault(tgt, new)
                pending.remove(item)
                progress = True
        if not progress:
            break
    missing = [c for c in charts if c not in coords]
    if missing or pending:
        raise SpecError(f"charts not reachable from {charts[0]}: {missing or [p[1] for p in pending]}")

    if kind is None:
        raise SpecError("bundle kind must be declared")
    if kind == "general":
        if rank is None:
            raise SpecError("a general bundle needs 'rank:'")
        per_chart = {charts[0]: RatMatrix.identity(n, rank)}
        todo = list(matrices)
        while todo:
            progress = False
            for item in list(todo):
                src, tgt, body, lineno = item
                if src not in per_chart:
                    continue
                a = _parse_matrix(body, variables, lineno)
                if a.rows != rank:
                    raise SpecError(f"line {lineno}: matrix size differs from rank {rank}")
                if a.det().is_zero():
                    raise NonInvertibleChangeError(f"line {lineno}: singular matrix {src} -> {tgt}")
                new = a.subs(coords[src]) @ per_chart[src]
                if tgt in per_chart and per_chart[tgt] != new:
                    raise SpecError(f"line {lineno}: matrix {src} -> {tgt} is inconsistent")
                per_chart.setdefault(tgt, new)
                todo.remove(item)
                progress = True
            if not progress:
                break
        missing = [c for c in charts if c not in per_chart]
        if missing or todo:
            raise SpecError(f"no matrix reaches charts {missing or [t[1] for t in todo]}")
        bundle = BundleSpec("general", per_chart, rank)
    else:
        bundle = BundleSpec(kind)
    for tri, lineno in triples:
        if any(c not in charts for c in tri) or len(tri) != 3:
            raise SpecError(f"line {lineno}: a triple names three declared charts")
    return ChartSystem(name, tuple(variables), tuple(charts), coords, bundle,
                       [t for t, _ in triples])


BUILTIN_TEXT = {
    "p1": """\
name: P1
variables: x
charts: U0 U1
overlap U0 -> U1: 1/x
bundle: tangent
""",
    "p2": """\
name: P2
variables: x1 x2
charts: U0 U1 U2 U3
overlap U0 -> U1: 1/x1, x2/x1
overlap U1 -> U2: 1/x2, x1/x2
overlap U0 -> U3: x1/(1 + x1 + x2), x2/(1 + x1 + x2)
bundle: tangent
triple: U0 U1 U2
triple: U0 U1 U3
""",
}
