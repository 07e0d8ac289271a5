"""Characters, theta quotients and the equivariant genus at isolated fixed points.

Series live in UQSeries with u = y^(1/2).  Eigenvalues are nonzero rationals
different from 1, so every coefficient is an exact Fraction.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, ParseError, SimplicityViolationError, TruncationError
from .kernel import UQSeries, series_invert, series_mul


def _fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class FixedPointDatum:
    """Eigenvalues of g on the cotangent space at an isolated fixed point."""

    eigenvalues: tuple

    def __post_init__(self):
        vals = tuple(_fraction(v) for v in self.eigenvalues)
        for v in vals:
            if v == 0 or v == 1:
                raise SimplicityViolationError(
                    f"eigenvalue {v} at a fixed point; a simple automorphism needs det(1 - g_x) != 0"
                    if v == 1 else "eigenvalue 0 is not invertible")
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class GenusInput:
    dimension: int
    fixed_points: tuple
    order: int

    def __post_init__(self):
        pts = tuple(p if isinstance(p, FixedPointDatum) else FixedPointDatum(tuple(p))
                    for p in self.fixed_points)
        if not pts:
            raise ValueError("the fixed-point set is empty")
        if any(p.dimension != self.dimension for p in pts):
            raise ValueError("fixed points of different dimensions")
        if self.order < 0:
            raise ValueError("truncation order must be >= 0")
        object.__setattr__(self, "fixed_points", pts)


# -- characters -------------------------------------------------------------

def char_sym(eigenvalues, x: tuple, order: int) -> UQSeries:
    """prod_i (1 - l_i x)^-1 for x = c * u^a * q^b, b > 0, through q^order."""
    c, a, b = x
    if b <= 0:
        raise TruncationError("a symmetric algebra needs a positive q-weight to truncate")
    out = UQSeries.constant(order)
    for lam in eigenvalues:
        lx = _fraction(lam) * _fraction(c)
        geo = UQSeries(order, {(k * a, k * b): lx ** k for k in range(order // b + 1)})
        out = series_mul(out, geo)
    return out


def char_ext(eigenvalues, x: tuple, order: int) -> UQSeries:
    """prod_i (1 + l_i x) for x = c * u^a * q^b."""
    c, a, b = x
    out = UQSeries.constant(order)
    for lam in eigenvalues:
        out = series_mul(out, 1 + UQSeries.monomial(order, _fraction(lam) * _fraction(c), a, b))
    return out


# -- theta ------------------------------------------------------------------

def _theta_stripped(lam: Fraction, u_exp: int, order: int) -> UQSeries:
    """(z - 1) prod_n (1 - q^n)(1 - z q^n)(1 - z^-1 q^n) with z = lam * u^u_exp.
    This is theta(z, q) with the i^-1 q^(1/8) z^(-1/2) prefactor removed."""
    out = UQSeries.monomial(order, lam, u=u_exp) - 1
    for n in range(1, order + 1):
        for c, a in ((1, 0), (lam, u_exp), (1 / lam, -u_exp)):
            out = series_mul(out, UQSeries(order, {(0, 0): 1, (a, n): -c}))
    return out


def theta_quotient(lam, order: int) -> UQSeries:
    """theta(lam y, q) / theta(lam, q), as a series in u = y^(1/2)."""
    lam = FixedPointDatum((lam,)).eigenvalues[0]
    num = _theta_stripped(lam, 2, order)
    den = _theta_stripped(lam, 0, order)
    # z^(-1/2) factors: (lam u^2)^(-1/2) / lam^(-1/2) = u^-1
    return series_mul(series_mul(num, series_invert(den)), UQSeries.monomial(order, 1, u=-1))


def theta_f(eigenvalues, order: int) -> UQSeries:
    out = UQSeries.constant(order)
    for lam in eigenvalues:
        out = series_mul(out, theta_quotient(lam, order))
    return out


# -- fixed-point contributions ---------------------------------------------

def local_contribution(fp: FixedPointDatum, order: int) -> UQSeries:
    """Lefschetz contribution of one fixed point: the trace of g on the fibre
    of the character with y -> -y, over det(1 - g_x), times y^(-d/2)."""
    lam = fp.eigenvalues
    inv = [1 / v for v in lam]
    det = Fraction(1)
    for v in lam:
        det *= 1 - v
    out = series_mul(char_ext(lam, (-1, 2, 0), order),
                     UQSeries.monomial(order, 1 / det, u=-fp.dimension))
    for n in range(1, order + 1):
        out = series_mul(out, char_sym(inv, (1, 0, n), order))      # S_{q^n} Theta
        out = series_mul(out, char_sym(lam, (1, 0, n), order))      # S_{q^n} Omega
        out = series_mul(out, char_ext(inv, (-1, -2, n), order))    # Lambda_{-y^-1 q^n} Theta
        out = series_mul(out, char_ext(lam, (-1, 2, n), order))     # Lambda_{-y q^n} Omega
    return out


@dataclass
class GenusResult:
    series: UQSeries
    theta_side: UQSeries
    agree: bool


def genus_trace(data: GenusInput, check: bool = True) -> GenusResult:
    """Sum of fixed-point contributions, compared with the sum of theta quotients."""
    N = data.order
    local = UQSeries(N)
    theta = UQSeries(N)
    for fp in data.fixed_points:
        local = local + local_contribution(fp, N)
        theta = theta + theta_f(fp.eigenvalues, N)
    agree = local == theta
    if check and not agree:
        raise ConsistencyError("fixed-point sum and theta sum differ")
    return GenusResult(local, theta, agree)


def torus_fixed_points(weights) -> list[FixedPointDatum]:
    """P^n with the diagonal action t = (t_0..t_n): at the k-th coordinate point
    the cotangent eigenvalues are t_j / t_k, j != k."""
    t = [_fraction(w) for w in weights]
    if any(w == 0 for w in t):
        raise SimplicityViolationError("torus weights must be nonzero")
    return [FixedPointDatum(tuple(t[j] / t[k] for j in range(len(t)) if j != k))
            for k in range(len(t))]


EXAMPLES = {
    "p1": lambda lams: [1, *lams[:1]],
    "p2": lambda lams: [1, *lams[:2]],
}


def example_input(name: str, lambdas, order: int) -> GenusInput:
    """Built-in P^1 / P^2 with torus weights (1, lambda...)."""
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}")
    need = {"p1": 1, "p2": 2}[name]
    if len(lambdas) != need:
        raise ValueError(f"example {name} takes {need} lambda value(s)")
    pts = torus_fixed_points(EXAMPLES[name](list(lambdas)))
    return GenusInput(need, tuple(pts), order)


# -- PBW counts -------------------------------------------------------------

def _pbw_generators(d: int, cap: int):
    """(weight, charge, odd) for every generator of the chart's PBW basis."""
    gens = [(0, 1, True)] * d                      # phi
    for n in range(1, cap + 1):
        gens += [(n, 0, False)] * d                # tau_(n)
        gens += [(n, 0, False)] * d                # omega_(n)
        gens += [(n, -1, True)] * d                # psi_(n)
        gens += [(n, 1, True)] * d                 # rho_(n)
    return gens


def pbw_count(d: int, cap: int) -> Counter:
    """Number of PBW monomials by (weight, charge), weight <= cap."""
    if d > 2 or cap > 4:
        raise TruncationError("brute-force enumeration is limited to d <= 2, weight <= 4")
    gens = _pbw_generators(d, cap)
    table: Counter = Counter()

    def walk(start, weight, charge):
        table[weight, charge] += 1
        for i in range(start, len(gens)):
            w, c, odd = gens[i]
            if weight + w > cap:
                continue
            # odd generators appear at most once, even ones any number of times
            walk(i + 1 if odd else i, weight + w, charge + c)

    walk(0, 0, 0)
    return table


def character_series(d: int, order: int) -> UQSeries:
    """The character with all eigenvalues 1, in y = u^2 (no sign change)."""
    one = [1] * d
    out = char_ext(one, (1, 2, 0), order)
    for n in range(1, order + 1):
        for factor in (char_sym(one, (1, 0, n), order), char_sym(one, (1, 0, n), order),
                       char_ext(one, (1, -2, n), order), char_ext(one, (1, 2, n), order)):
            out = series_mul(out, factor)
    return out


def pbw_matches_character(d: int, cap: int) -> tuple[bool, dict, dict]:
    counts = pbw_count(d, cap)
    series = character_series(d, cap)
    expected = {(b, a // 2): int(c) for (a, b), c in series.coeffs.items()}
    got = {k: v for k, v in counts.items() if v}
    return got == expected, got, expected



# -- input files ------------------------------------------------------------

def parse_genus_input(text: str, order: int) -> GenusInput:
    """Line format: 'dimension: d' once, then 'point: l1, ..., ld' per fixed point.
    Blank lines and lines starting with '#' are ignored."""
    dimension = None
    points = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        if not sep or key.strip() not in ("dimension", "point"):
            raise ParseError(f"expected 'dimension:' or 'point:', got {line!r}", lineno, 1)
        col = raw.index(":") + 2
        if key.strip() == "dimension":
            try:
                dimension = int(rest)
            except ValueError:
                raise ParseError(f"bad dimension {rest.strip()!r}", lineno, col) from None
            continue
        vals = []
        pos = raw.index(":") + 1
        for tok in rest.split(","):
            start = pos + len(tok) - len(tok.lstrip())
            pos += len(tok) + 1
            try:
                vals.append(Fraction(tok.strip()))
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad eigenvalue {tok.strip()!r}", lineno, start + 1) from None
        points.append(FixedPointDatum(tuple(vals)))
    if dimension is None:
        raise ParseError("missing 'dimension:' line", 1, 1)
    return GenusInput(dimension, tuple(points), order)


def monomial_table(series: UQSeries) -> list[tuple[int, int, Fraction]]:
    """(q exponent, u exponent, coefficient), sorted, zero terms dropped."""
    return sorted((b, a, c) for (a, b), c in series.coeffs.items() if c)
