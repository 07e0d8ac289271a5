import pytest
from hypothesis import given, settings, strategies as st

from chiralgerbe.algebroid import Frame
from chiralgerbe.charts import projective_line, projective_plane
from chiralgerbe.envelope import (W1Element, W2Element, build_susy, classical_q,
                                  conformal_weight, fermionic_charge, generator_claims,
                                  j0, l0, lemma_gamma_sum, log_derivative_action, nprod,
                                  parity_parts, product_minus1, sample_monomial,
                                  transform_susy)
from chiralgerbe.errors import (ConsistencyError, InhomogeneousError, UnsupportedShapeError)
from chiralgerbe.kernel import RatFunc
from chiralgerbe.sampling import SamplePool
from chiralgerbe.supergeometry import SuperCovector, SuperScalar, SuperVector

P1 = (1, 1)
P2 = (2, 2)
x = RatFunc.var(1, 1)
seeds = st.integers(0, 2**32 - 1)


def S(amb, r):
    return SuperScalar(amb, {(): r if isinstance(r, RatFunc) else RatFunc.const(amb[0], r)})


def changes():
    for system in (projective_line, projective_plane):
        s = system("cotangent")
        for c in s.charts[1:]:
            yield s.name + ":" + c, s.change(s.reference, c)


CHANGES = dict(changes())


def test_rule_for_omega_times_tau():
    X = S(P1, x)
    got = product_minus1(X * SuperCovector.omega(P1, 1), SuperVector.tau(P1, 1))
    want = W2Element.head("omega", 0, X * SuperVector.tau(P1, 1)) \
        - W2Element.omega2(0, S(P1, 1))
    assert got == want


def test_scalar_times_psi_has_no_correction():
    X = S(P1, x * x + 1)
    assert product_minus1(X, SuperVector.psi(P1, 1)) == W1Element.of(X * SuperVector.psi(P1, 1))
    # but a function against tau picks up -gamma
    got = product_minus1(S(P1, x), S(P1, x) * SuperVector.tau(P1, 1))
    assert got.covector == 2 * SuperCovector.omega(P1, 1)


def test_rule_for_rho_times_psi():
    a, b = S(P2, RatFunc.gens(2)[0]), S(P2, RatFunc.gens(2)[1] + 2)
    got = product_minus1(a * SuperCovector.rho(P2, 2), b * SuperVector.psi(P2, 1))
    assert got == W2Element.head("rho", 3, (a * b) * SuperVector.psi(P2, 1))


def test_rule_for_phi_omega_times_psi():
    a, b = S(P1, x), S(P1, x * x)
    xo = (a * SuperScalar.phi(P1, 1)) * SuperCovector.omega(P1, 1)
    got = product_minus1(xo, b * SuperVector.psi(P1, 1))
    head = W1Element(P1, vector=(a * b * SuperScalar.phi(P1, 1)) * SuperVector.psi(P1, 1),
                     covector=-(a * S(P1, 2 * x)) * SuperCovector.omega(P1, 1))
    assert got == W2Element.head("omega", 0, head) + W2Element.omega2(0, a * b)


def test_unsupported_shapes_fail_loudly():
    tau, om = SuperVector.tau(P1, 1), SuperCovector.omega(P1, 1)
    with pytest.raises(UnsupportedShapeError):
        product_minus1(tau, tau)
    with pytest.raises(UnsupportedShapeError):
        product_minus1(om, S(P1, x))
    with pytest.raises(UnsupportedShapeError):
        product_minus1(om, om)
    phi12 = SuperScalar.phi(P2, 1) * SuperScalar.phi(P2, 2)
    with pytest.raises(UnsupportedShapeError):
        product_minus1(phi12 * SuperCovector.omega(P2, 1), SuperVector.psi(P2, 1))


def test_quadruple_in_reference_frame():
    sq = build_susy(Frame.reference(P1))
    phi = SuperScalar.phi(P1, 1)
    assert sq.Q == W1Element.of(phi * SuperVector.tau(P1, 1))
    assert sq.J == W1Element.of(phi * SuperVector.psi(P1, 1))
    assert not sq.L.low and not sq.L.second and not sq.L.deriv
    assert set(sq.L.heads) == {("omega", 0), ("rho", 1)}
    assert set(sq.G.heads) == {("psi", 1)}


def test_quadruple_gradings():
    sq = build_susy(Frame.reference(P2))
    assert [fermionic_charge(e) for e in (sq.Q, sq.J, sq.G, sq.L)] == [1, 0, -1, 0]
    assert [conformal_weight(e) for e in (sq.Q, sq.J, sq.G, sq.L)] == [1, 1, 2, 2]
    assert [set(parity_parts(e)) for e in (sq.Q, sq.J, sq.G, sq.L)] == [{1}, {0}, {1}, {0}]


def test_p1_transformation():
    fc = CHANGES["P1:U1"]
    tr = transform_susy(build_susy(fc.source), fc)
    phi, om = SuperScalar.phi(P1, 1), SuperCovector.omega(P1, 1)
    from chiralgerbe.supergeometry import d_scalar
    assert tr.deltas["Q"] == W1Element.of(d_scalar(S(P1, 2 / x) * phi))
    assert tr.deltas["J"] == W1Element.of(S(P1, -2 / x) * om)
    assert tr.new.G == build_susy(fc.source).G
    assert tr.new.L == build_susy(fc.source).L


@pytest.mark.parametrize("name", sorted(CHANGES))
def test_transformation_laws(name):
    fc = CHANGES[name]
    sq = build_susy(fc.source)
    tr = transform_susy(sq, fc)
    for k in "QJGL":
        assert tr.deltas[k] == tr.closed[k]
    assert not tr.deltas["Q"].scalar and not tr.deltas["Q"].vector


@pytest.mark.parametrize("name", sorted(CHANGES))
def test_gamma_sum_and_classical_q(name):
    fc = CHANGES[name]
    lhs, rhs = lemma_gamma_sum(fc)
    assert lhs == rhs
    assert classical_q(fc.target) == classical_q(fc.source)


def test_transform_rejects_wrong_frames():
    s = projective_plane("tangent")
    sq = build_susy(Frame.reference(P2))
    with pytest.raises(UnsupportedShapeError):
        transform_susy(sq, s.change("U0", "U1"))
    t = projective_plane("cotangent")
    with pytest.raises(UnsupportedShapeError):
        transform_susy(sq, t.change("U1", "U2"))
    with pytest.raises(UnsupportedShapeError):
        build_susy(Frame.reference((2, 1)))


def test_transform_detects_wrong_closed_form():
    fc = CHANGES["P1:U1"]
    sq = build_susy(fc.source)
    # a quadruple from the wrong frame gives the wrong differences
    other = transform_susy(sq, fc).new
    with pytest.raises(ConsistencyError):
        transform_susy(other, fc)


@pytest.mark.parametrize("amb", [P1, P2])
def test_generator_claims(amb):
    results = generator_claims(amb)
    assert len(results) == 3 * (2 + 2 * amb[0] + 3 * amb[1])
    failed = [r for r in results if not r.passed]
    assert not failed, failed


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_log_derivative_acts_trivially(seed):
    pool = SamplePool(P1, seed)
    y = W1Element(P1, pool.scalar(), pool.vector(), pool.covector())
    for a in (x, x * x, 1 + x):
        assert log_derivative_action(a, y).is_zero()


def test_non_closed_form_acts_nontrivially():
    w = W1Element.of(SuperScalar.phi(P1, 1) * SuperCovector.omega(P1, 1))
    assert not nprod(w, W1Element.of(SuperVector.psi(P1, 1)), 0).is_zero()


def test_charge_matches_parity_on_monomials():
    pool = SamplePool(P2, 2024)
    for _ in range(100):
        mono = sample_monomial(pool)
        (p,) = parity_parts(mono)
        assert fermionic_charge(mono) % 2 == p


def _shape_pairs(pool):
    amb = pool.ambient
    n = amb[0]
    a = S(amb, pool.poly() or 1)
    b = S(amb, pool.poly() or 1)
    i = pool.rng.randrange(n)
    al, be = pool.rng.randrange(amb[1]), pool.rng.randrange(amb[1])
    phi_a = SuperScalar.phi(amb, al + 1)
    om = SuperCovector.basis(amb, i)
    return [
        (a * om, b * SuperVector.basis(amb, pool.rng.randrange(n))),
        (a * om, (b * phi_a) * SuperVector.basis(amb, n + be)),
        (a * SuperCovector.basis(amb, n + al), b * SuperVector.basis(amb, n + be)),
        ((a * phi_a) * om, b * SuperVector.basis(amb, n + be)),
        (a * SuperVector.basis(amb, n + al), b * om),
        (a * phi_a, b * SuperVector.basis(amb, i)),
    ]


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_charge_additive_over_products(seed):
    pool = SamplePool(P2, seed)
    for xx, yy in _shape_pairs(pool):
        prod = product_minus1(xx, yy)
        if prod.is_zero():
            continue
        assert fermionic_charge(prod) == fermionic_charge(W1Element.of(xx)) \
            + fermionic_charge(W1Element.of(yy))


def test_eigenvalue_queries():
    phi, rho = SuperScalar.phi(P1, 1), SuperCovector.rho(P1, 1)
    m = W1Element.of(phi * rho)
    assert fermionic_charge(m) == 2 and j0(m) == 2 * m
    assert l0(W1Element.of(SuperCovector.omega(P1, 1))) == W1Element.of(SuperCovector.omega(P1, 1))
    assert l0(W1Element.of(S(P1, x))).is_zero()
    mixed = W1Element(P1, scalar=phi, vector=SuperVector.psi(P1, 1))
    with pytest.raises(InhomogeneousError):
        fermionic_charge(mixed)
    with pytest.raises(InhomogeneousError):
        conformal_weight(mixed)
    sq = build_susy(Frame.reference(P1))
    assert l0(sq.L) == 2 * sq.L and j0(sq.G) == -1 * sq.G
