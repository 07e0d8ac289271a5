import pytest
from hypothesis import given, settings, strategies as st

from chiralgerbe.errors import AmbientMismatchError, WorkbenchError
from chiralgerbe.kernel import RatFunc
from chiralgerbe.sampling import SamplePool
from chiralgerbe.supergeometry import (PolyForm, SuperCovector, SuperScalar, SuperVector,
                                       apply_vector, bracket, d_scalar, de_rham_d, dual_pairing,
                                       evaluate, lie_action, pair_contract, super_mul,
                                       vector_on_covector)

AMB = (2, 2)
x1, x2 = (SuperScalar.const(AMB, v) for v in RatFunc.gens(2))
phi1, phi2 = SuperScalar.phi(AMB, 1), SuperScalar.phi(AMB, 2)
tau1, tau2 = SuperVector.tau(AMB, 1), SuperVector.tau(AMB, 2)
psi1, psi2 = SuperVector.psi(AMB, 1), SuperVector.psi(AMB, 2)
om1 = SuperCovector.omega(AMB, 1)
seeds = st.integers(0, 2**32 - 1)


def test_super_mul_examples():
    assert super_mul(phi1, phi2) == SuperScalar(AMB, {(1, 2): RatFunc.const(2, 1)})
    assert super_mul(phi2, phi1) == -super_mul(phi1, phi2)
    assert super_mul(phi1, phi1).is_zero()
    assert super_mul(x1 + phi1 * phi2, phi1) == x1 * phi1
    with pytest.raises(AmbientMismatchError):
        phi1 * SuperScalar.phi((2, 3), 1)


def test_apply_vector_examples():
    assert apply_vector(psi1, x1 * phi1 + phi2) == x1
    assert apply_vector(psi1, x1).is_zero()
    assert apply_vector(tau1, x1 * x1 * phi1) == 2 * x1 * phi1


def test_pairing_examples():
    for i, t in enumerate((tau1, tau2), 1):
        for j in (1, 2):
            got = pair_contract(t, PolyForm.from_covector(SuperCovector.omega(AMB, j))).scalar
            assert got == (1 if i == j else 0)
    assert dual_pairing(psi1, om1).is_zero()
    assert dual_pairing(tau1, SuperCovector.rho(AMB, 1)).is_zero()
    assert dual_pairing(psi1, SuperCovector.rho(AMB, 1)) == 1


def test_contraction_sign_with_odd_arguments():
    # odd 2-form with h(tau1, psi1) = 1 = -h(psi1, tau1)
    one, zero = SuperScalar.const(AMB, 1), SuperScalar.zero(AMB)
    table = {(0, 2): one, (2, 0): -one}
    h = PolyForm.from_function(AMB, 2, lambda t: table.get(t, zero))
    assert h.is_graded_skew() and h.parity() == 1
    # <psi1, h> = (-1)^{1*1} h(psi1), and <tau1, h(psi1)> = h(tau1, psi1) = 1
    assert evaluate(h, [psi1]) == om1
    assert pair_contract(psi1, h).covector() == -om1
    assert pair_contract(tau1, h).covector() == SuperCovector.rho(AMB, 1)


def test_lie_action_examples():
    assert lie_action(tau1, PolyForm.from_covector(om1)).covector().is_zero()
    assert lie_action(tau1, PolyForm.from_covector(x1 * om1)).covector() == om1
    assert lie_action(psi1, PolyForm.zero(AMB, 2)).is_zero()
    with pytest.raises(WorkbenchError):
        lie_action(tau1 + psi1, PolyForm.from_covector(om1))


def test_de_rham_examples():
    assert de_rham_d(PolyForm.from_scalar(x1)).covector() == -om1
    assert de_rham_d(de_rham_d(PolyForm.from_scalar(x1 * x2))).is_zero()
    dw = de_rham_d(PolyForm.from_covector(x1 * om1))
    assert dw.value((0,)).is_zero()
    with pytest.raises(WorkbenchError):
        de_rham_d(PolyForm.zero(AMB, 4))
    with pytest.raises(WorkbenchError):
        pair_contract(tau1, PolyForm.from_scalar(x1))


def test_d_of_odd_generator():
    assert d_scalar(phi1) == SuperCovector.rho(AMB, 1)
    assert d_scalar(x1 * phi2) == SuperCovector(AMB, [phi2, SuperScalar.zero(AMB),
                                                      SuperScalar.zero(AMB), x1])


# -- properties ---------------------------------------------------------

def _sign(a, b):
    return -1 if a * b % 2 else 1


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(0, 1), st.integers(0, 1))
def test_super_leibniz(seed, pv, pa):
    pool = SamplePool(AMB, seed)
    v, a, b = pool.vector(pv), pool.scalar(pa), pool.scalar()
    lhs = v.apply(a * b)
    assert lhs == v.apply(a) * b + _sign(pv, pa) * (a * v.apply(b))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_bracket_acts_as_commutator(seed):
    pool = SamplePool(AMB, seed)
    px, py = pool.rng.randint(0, 1), pool.rng.randint(0, 1)
    X, Y, f = pool.vector(px), pool.vector(py), pool.scalar()
    assert bracket(X, Y).apply(f) == X.apply(Y.apply(f)) - _sign(px, py) * Y.apply(X.apply(f))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_action_on_forms_respects_pairing(seed):
    pool = SamplePool(AMB, seed)
    px, py = pool.rng.randint(0, 1), pool.rng.randint(0, 1)
    X, Y, w = pool.vector(px), pool.vector(py), pool.covector()
    lhs = X.apply(dual_pairing(Y, w))
    rhs = dual_pairing(bracket(X, Y), w) + _sign(px, py) * dual_pairing(Y, vector_on_covector(X, w))
    assert lhs == rhs


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(0, 1))
def test_rescaling_rule(seed, pa):
    pool = SamplePool(AMB, seed)
    a, w = pool.scalar(pa), pool.covector()
    k = pool.rng.randrange(4)
    e = SuperVector.basis(AMB, k)
    pair = dual_pairing(e, w)
    expected = a * vector_on_covector(e, w)
    for pp, piece in pair.parity_parts().items():
        expected = expected + _sign(pa, pp) * (piece * d_scalar(a))
    assert vector_on_covector(a * e, w) == expected


@settings(max_examples=12, deadline=None)
@given(seeds, st.integers(0, 2), st.integers(0, 1))
def test_d_squared_vanishes(seed, degree, parity):
    h = SamplePool(AMB, seed).form(degree, parity)
    assert de_rham_d(de_rham_d(h)).is_zero()


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(0, 1), st.integers(0, 1))
def test_cartan_degree_two(seed, pv, ph):
    pool = SamplePool(AMB, seed)
    h, v = pool.form(2, ph), pool.vector(pv)
    assert lie_action(v, h) == pair_contract(v, de_rham_d(h)) + de_rham_d(pair_contract(v, h))


@settings(max_examples=4, deadline=None)
@given(seeds, st.integers(0, 1), st.integers(0, 1))
def test_cartan_degree_three(seed, pv, ph):
    pool = SamplePool((1, 2), seed)
    h, v = pool.form(3, ph), pool.vector(pv)
    assert lie_action(v, h) == pair_contract(v, de_rham_d(h)) + de_rham_d(pair_contract(v, h))


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(0, 1), st.integers(0, 1))
def test_cartan_low_degree_sign(seed, pv, ph):
    # with d a = -da the identity in degree 1 reads v(h) = <v, dh> - d<v, h>
    pool = SamplePool(AMB, seed)
    h, v = pool.form(1, ph), pool.vector(pv)
    assert lie_action(v, h) == pair_contract(v, de_rham_d(h)) - de_rham_d(pair_contract(v, h))
    f = pool.scalar(ph)
    assert pair_contract(v, de_rham_d(PolyForm.from_scalar(f))).scalar == -v.apply(f)


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(0, 2), st.integers(0, 1))
def test_d_commutes_with_action(seed, degree, pv):
    pool = SamplePool(AMB, seed)
    h, v = pool.form(degree), pool.vector(pv)
    assert de_rham_d(lie_action(v, h)) == lie_action(v, de_rham_d(h))


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(0, 1))
def test_d_is_polylinear(seed, ph):
    pool = SamplePool(AMB, seed)
    h = pool.form(1, ph)
    dh = de_rham_d(h)
    a = pool.scalar()
    v = pool.vector()
    for pa, piece in a.parity_parts().items():
        scaled = evaluate(dh, [piece * v])
        assert scaled == _sign(pa, ph) * (piece * evaluate(dh, [v]))


@settings(max_examples=8, deadline=None)
@given(seeds, st.integers(1, 2), st.integers(0, 1))
def test_operations_preserve_skewness(seed, degree, pv):
    pool = SamplePool(AMB, seed)
    h, v = pool.form(degree), pool.vector(pv)
    assert h.is_graded_skew()
    assert de_rham_d(h).is_graded_skew()
    assert lie_action(v, h).is_graded_skew()
    if degree == 2:
        assert pair_contract(v, de_rham_d(h)).is_graded_skew()
