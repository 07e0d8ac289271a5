"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines appear even
without ``-s``.
"""
import time
from fractions import Fraction

import pytest

from chiralgerbe.algebroid import CorruptedAlgebroid, Frame, VertexAlgebroid, verify_axioms
from chiralgerbe.charts import parse_chart_spec, projective_line, projective_plane, random_bundle
from chiralgerbe.checks import SuiteOptions, emit_report, run_suite
from chiralgerbe.cocycles import (a_of_triple, b_of_change, dual_compare, h_of_change,
                                  h_tangent_natural)
from chiralgerbe.envelope import (W1Element, build_susy, fermionic_charge, generator_claims,
                                  log_derivative_action, parity_parts, sample_monomial,
                                  transform_susy)
from chiralgerbe.errors import NonInvertibleChangeError, SimplicityViolationError
from chiralgerbe.genus import (FixedPointDatum, example_input, genus_trace, local_contribution,
                               pbw_matches_character, character_series, theta_f)
from chiralgerbe.kernel import RatFunc, RatMatrix, UQSeries
from chiralgerbe.sampling import SamplePool
from chiralgerbe.supergeometry import SuperCovector, SuperScalar, d_scalar

P1, P2 = (1, 1), (2, 2)
LAMBDAS = [2, 3, 5, Fraction(1, 2), -2]


@pytest.fixture
def verdict(capsys):
    """verdict(n, ok, text): print the criterion line, then assert."""
    def _verdict(n, ok, text):
        with capsys.disabled():
            print(f"\ncriterion {n:2}: {'PASS' if ok else 'FAIL'}  {text}")
        assert ok, text
    return _verdict


@pytest.fixture(scope="module")
def p2_tangent():
    return projective_plane()


@pytest.fixture(scope="module")
def p2_general():
    s = projective_plane()
    return s.with_bundle(random_bundle(s, 7))


def test_criterion_01_axiom_suite(verdict):
    names = ["2.1.1", "2.1.2", "2.1.3", "2.1.4", "A1", "A2", "A3", "A4", "A5"]
    V = VertexAlgebroid(Frame.reference(P2))
    start = time.perf_counter()
    results = []
    for name in names:
        pool = SamplePool(P2, seed=f"acceptance:{name}", bound=3, degree=2)
        results += verify_axioms(V, pool, [name], samples=200)
    elapsed = time.perf_counter() - start
    failed = [r.name for r in results if not r.passed]
    ok = not failed and all(r.samples == 200 for r in results) and elapsed < 120
    verdict(1, ok, f"9 axioms x 200 samples on P^2, failed={failed}, {elapsed:.1f}s (< 120s)")


def _two_paths(system, pair, triple):
    b = b_of_change(system.change(*pair), check=False)
    a = a_of_triple(system.change(*triple[:2]), system.change(*triple[1:]), check=False)
    return b.table == b.closed and a.table == {k: a.closed[k] for k in a.table}


def test_criterion_02_cocycle_closed_forms(verdict, p2_tangent, p2_general):
    cases = [(p2_tangent, ("U0", "U1"), ("U0", "U1", "U2")),
             (p2_tangent, ("U0", "U3"), ("U0", "U1", "U3")),
             (p2_general, ("U0", "U1"), ("U0", "U1", "U2")),
             (p2_general, ("U1", "U3"), ("U0", "U1", "U3"))]
    ok = all(_two_paths(*c) for c in cases)
    nontrivial = not a_of_triple(p2_general.change("U0", "U1"),
                                 p2_general.change("U1", "U2")).is_zero()
    verdict(2, ok and nontrivial,
            "definitional b and a equal their closed forms (P^2 tangent, P^2 general)")


def test_criterion_03_duality(verdict, p2_tangent, p2_general):
    reports = [dual_compare(s, t) for s in (p2_tangent, p2_general)
               for t in (("U0", "U1", "U2"), ("U0", "U1", "U3"))]
    verdict(3, all(r.passed for r in reports), "(a, b) of E and of its dual agree on P^2 data")


def test_criterion_04_natural_frames(verdict):
    checks = []
    for system in (projective_line, projective_plane):
        cot, tan = system("cotangent"), system("tangent")
        for c in cot.charts[1:]:
            checks.append(h_of_change(cot.change(cot.reference, c)).matrix.is_zero())
            fc = tan.change(tan.reference, c)
            checks.append(h_of_change(fc).matrix == h_tangent_natural(fc))
        for s in (cot, tan):
            for c in s.charts[1:]:
                checks.append(b_of_change(s.change(s.reference, c)).is_zero())
            triples = s.triples or [("U0", "U1", "U0")]
            for u, v, w in triples:
                checks.append(a_of_triple(s.change(u, v), s.change(v, w)).is_zero())
    p1_value = h_of_change(projective_line().change("U0", "U1")).matrix == RatMatrix([[-4]], 1)
    verdict(4, all(checks) and p1_value,
            f"h = 0 (cotangent), tangent h formula, P^1 h11 = -4, a = b = 0 ({len(checks)} checks)")


def test_criterion_05_susy_transforms(verdict):
    ok = True
    for system in (projective_line, projective_plane):
        s = system("cotangent")
        sq = build_susy(s.frame(s.reference))
        for c in s.charts[1:]:
            tr = transform_susy(sq, s.change(s.reference, c), check=False)
            ok &= all(tr.deltas[k] == tr.closed[k] for k in "QJGL")
    s = projective_line("cotangent")
    tr = transform_susy(build_susy(s.frame("U0")), s.change("U0", "U1"))
    x = RatFunc.var(1, 1)
    two_over_x = SuperScalar.const(P1, 2 / x)
    phi = SuperScalar.phi(P1, 1)
    q_ok = tr.deltas["Q"] == W1Element.of(d_scalar(two_over_x * phi))
    j_ok = tr.deltas["J"] == W1Element.of(-1 * (two_over_x * SuperCovector.omega(P1, 1)))
    verdict(5, ok and q_ok and j_ok,
            "Q, J, G, L transforms match closed forms on P^1, P^2; P^1 dQ = d(2/x phi), dJ = -2/x omega")


def test_criterion_06_gradings(verdict):
    claims = [r for amb in (P1, P2) for r in generator_claims(amb)]
    claims_ok = all(r.passed for r in claims)
    pool = SamplePool(P1, seed="acceptance:log-derivative")
    x = RatFunc.var(1, 1)
    log_ok = True
    for _ in range(200):
        y = W1Element(P1, pool.scalar(), pool.vector(), pool.covector())
        log_ok &= all(log_derivative_action(a, y).is_zero() for a in (x, x * x, 1 + x))
    pool = SamplePool(P2, seed=2024)
    par_ok = True
    for _ in range(100):
        mono = sample_monomial(pool)
        (p,) = parity_parts(mono)
        par_ok &= fermionic_charge(mono) % 2 == p
    verdict(6, claims_ok and log_ok and par_ok,
            f"{len(claims)} generator claims; log-derivative trivial on 200 samples; "
            "charge = parity mod 2 on 100 monomials")


def test_criterion_07_local_identity(verdict):
    start = time.perf_counter()
    cases = [(lam,) for lam in LAMBDAS] + [(lam, mu) for lam in LAMBDAS for mu in LAMBDAS]
    bad = [e for e in cases
           if local_contribution(FixedPointDatum(e), 8) != theta_f(FixedPointDatum(e).eigenvalues, 8)]
    elapsed = time.perf_counter() - start
    verdict(7, not bad and elapsed < 30,
            f"local contribution = theta quotient through q^8, {len(cases)} eigenvalue sets, "
            f"mismatches={bad}, {elapsed:.1f}s (< 30s)")


def test_criterion_08_genus_at_y_one(verdict):
    ok = True
    for name, lams, count in (("p1", [2], 2), ("p2", [2, 3], 3)):
        res = genus_trace(example_input(name, lams, 8))
        ok &= res.agree and res.series.at_u_equals_one() == UQSeries.constant(8, count)
    verdict(8, ok, "T(y=1, q) = number of fixed points through q^8 (P^1: 2, P^2: 3)")


def test_criterion_09_pbw(verdict):
    ok1, got1, _ = pbw_matches_character(1, 3)
    ok2, _, _ = pbw_matches_character(2, 2)
    row = dict(character_series(1, 3).q_level(1))
    q1 = row == {-2: 1, 0: 3, 2: 3, 4: 1}
    verdict(9, ok1 and ok2 and q1,
            "PBW counts = character (d=1 to weight 3, d=2 to weight 2); q^1 row y^-1 + 3 + 3y + y^2")


SINGULAR = "name: bad\nvariables: x\ncharts: U0 U1\noverlap U0 -> U1: 1\nbundle: tangent\n"


def test_criterion_10_negative_controls(verdict):
    V = VertexAlgebroid(Frame.reference(P2))
    bad = CorruptedAlgebroid(V, SuperScalar.const(P2, RatFunc.var(2, 1)))
    (res,) = verify_axioms(bad, SamplePool(P2, seed=0), ["A5"], samples=50)
    corrupt_ok = not res.passed and bool(res.witness and res.witness["residual"])
    try:
        example_input("p1", [1], 4)
        lam_ok = False
    except SimplicityViolationError:
        lam_ok = True
    try:
        parse_chart_spec(SINGULAR)
        sing_ok = False
    except NonInvertibleChangeError:
        sing_ok = True
    opts = SuiteOptions(samples=10)
    reports = [emit_report(run_suite(projective_line(), seed=11, options=opts), fmt)
               for fmt in ("machine", "machine", "text", "text")]
    same = reports[0] == reports[1] and reports[2] == reports[3]
    verdict(10, corrupt_ok and lam_ok and sing_ok and same,
            f"corrupted c breaks A5 with witness={corrupt_ok}, lambda=1 rejected={lam_ok}, "
            f"singular transition rejected={sing_ok}, byte-identical reports={same}")
