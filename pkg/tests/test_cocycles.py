import pytest
from hypothesis import given, settings, strategies as st

from chiralgerbe.algebroid import Frame, FrameChange
from chiralgerbe.charts import (BundleSpec, projective_line, projective_plane, projective_space3,
                                random_bundle, random_unimodular_bundle)
from chiralgerbe.cocycles import (CECH_SIGNS, CocycleCache, a_of_triple, b_of_change,
                                  cech_consistency, dual_compare, h_of_change,
                                  h_tangent_natural, trace_identity_cube, trace_identity_pair)
from chiralgerbe.errors import NonHolonomicError
from chiralgerbe.kernel import RatFunc, RatMatrix

x1, x2 = RatFunc.gens(2)
P2 = (2, 2)


@pytest.fixture(scope="module")
def p2_general():
    s = projective_plane()
    return s.with_bundle(random_bundle(s, 7))


@pytest.fixture(scope="module")
def p3_b():
    s = projective_space3()
    s = s.with_bundle(random_unimodular_bundle(s, 1, factors=6))
    return CocycleCache(s).b("U0", "U1")


def test_identity_change_has_zero_h():
    fc = FrameChange(Frame.reference(P2), RatMatrix.identity(2, 2), RatMatrix.identity(2, 2))
    assert h_of_change(fc).matrix.is_zero()
    assert b_of_change(fc).is_zero()


def test_p1_tangent_h():
    h = h_of_change(projective_line().change("U0", "U1"))
    assert h.matrix == RatMatrix([[-4]], 1)


@pytest.mark.parametrize("system", [projective_line, projective_plane])
def test_cotangent_h_vanishes(system):
    s = system("cotangent")
    for c in s.charts[1:]:
        assert h_of_change(s.change(s.reference, c)).matrix.is_zero()


@pytest.mark.parametrize("pair", [("U0", "U1"), ("U0", "U3"), ("U1", "U2")])
def test_tangent_h_natural_formula(pair):
    fc = projective_plane().change(*pair)
    assert h_of_change(fc).matrix == h_tangent_natural(fc)


@pytest.mark.parametrize("bundle", ["tangent", "cotangent"])
@pytest.mark.parametrize("system", [projective_line, projective_plane])
def test_natural_frames_have_trivial_cocycles(system, bundle):
    s = system(bundle)
    cache = CocycleCache(s)
    for c in s.charts[1:]:
        assert cache.b(s.reference, c).is_zero()
    for tri in s.triples:
        assert cache.a(*tri).is_zero()
    if s.n == 1:
        # only two charts; go there and back
        assert cache.a("U0", "U1", "U0").is_zero()


def test_a_with_identity_second_change(p2_general):
    fc1 = p2_general.change("U0", "U1")
    t = fc1.target
    ident = FrameChange(t, RatMatrix.identity(2, 2), RatMatrix.identity(2, 2), name="same")
    assert a_of_triple(fc1, ident).is_zero()


@pytest.mark.parametrize("tri", [("U0", "U1", "U2"), ("U0", "U1", "U3")])
def test_two_paths_agree_p2_tangent(tri):
    cache = CocycleCache(projective_plane())
    a = cache.a(*tri)
    assert a.table == {k: a.closed[k] for k in a.table}
    b = cache.b(*tri[:2])
    assert b.table == b.closed


def test_two_paths_agree_p2_general(p2_general):
    cache = CocycleCache(p2_general)
    a = cache.a("U0", "U1", "U2")
    assert a.table == {k: a.closed[k] for k in a.table}
    assert not a.is_zero()
    # b is a 3-form on a surface
    assert cache.b("U0", "U1").is_zero()


def test_e_part_vanishes_for_trivial_bundle():
    s = projective_plane()
    trivial = s.with_bundle(BundleSpec("general", {c: RatMatrix.identity(2, 2)
                                                   for c in s.charts}, 2))
    a = CocycleCache(trivial).a("U0", "U1", "U2")
    assert all(v.is_zero() for v in a.parts["E"].values())


def test_duality(p2_general):
    report = dual_compare(p2_general)
    assert report.passed, report.details


def test_non_holonomic_rejected():
    fc = FrameChange(Frame.reference(P2), RatMatrix([[1, x2], [0, 1]]), None, holonomic=False)
    with pytest.raises(NonHolonomicError):
        h_of_change(fc)
    with pytest.raises(NonHolonomicError):
        b_of_change(fc)


def _matrix(entries):
    a, b, c, d, e, f = entries
    return RatMatrix([[x1 + a, b * x2 + 1], [c * x1 + e, x2 * x1 + d + f * x2]])


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=6, max_size=6),
       st.lists(st.integers(-2, 2), min_size=6, max_size=6))
def test_trace_identities(e1, e2):
    A, B = _matrix(e1), _matrix(e2)
    if A.det().is_zero() or B.det().is_zero():
        return
    F = Frame.reference(P2)
    for i in range(2):
        for j in range(2):
            assert trace_identity_pair(F, A, B, i, j).is_zero()
            for r in range(2):
                assert trace_identity_cube(F, A, i, j, r).is_zero()


def test_p3_b_nonzero_and_skew(p3_b):
    assert not p3_b.is_zero()
    for (i, j), v in p3_b.table.items():
        assert v == -p3_b.table[j, i]


def test_cech_p2_tangent():
    report = cech_consistency(projective_plane())
    assert report.passed


@pytest.mark.slow
def test_cech_p3_signs():
    s = projective_space3()
    s = s.with_bundle(random_unimodular_bundle(s, 1, factors=6))
    report = cech_consistency(s)
    assert report.passed
    assert all(p == [CECH_SIGNS] for p in report.patterns.values())


def test_forms_are_graded_skew(p2_general, p3_b):
    assert CocycleCache(p2_general).a("U0", "U1", "U2").form.is_graded_skew()
    assert p3_b.form.is_graded_skew()
