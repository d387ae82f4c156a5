"""Polynomial layer: arithmetic, calculus, homogeneity, text round-trips."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isoparam.fields import QQ, PrimeField, QuadraticField
from isoparam.poly import (
    PolyMatrix,
    Polynomial,
    default_names,
    euler_pairing,
    focal_names,
    inner_product_form,
    quadratic_form,
)

NAMES4 = ["u1", "v1", "w1", "t1"]


def parse(s, names=NAMES4, field=QQ):
    return Polynomial.parse(s, field, names)


def test_add_disjoint_supports():
    assert parse("u1^2") + parse("v1^2") == parse("u1^2 + v1^2")


def test_mul_by_zero_annihilates():
    p = parse("3*u1^2*v1 - w1")
    assert (p * Polynomial.zero(QQ, 4)).is_zero()


def test_difference_of_squares():
    left = parse("u1^2 - v1^2") * parse("u1^2 + v1^2")
    assert left == parse("u1^4 - v1^4")


def test_differentiate_examples():
    assert parse("u1^3").differentiate(0) == parse("3*u1^2")
    assert parse("v1^2").differentiate(0).is_zero()
    assert parse("u1*v1*w1").differentiate(1) == parse("u1*w1")
    with pytest.raises(IndexError):
        parse("u1").differentiate(7)


def test_evaluate_examples():
    p = parse("u1^2 - v1^2")
    assert p.evaluate([1, 1, 0, 0]) == 0
    assert p.evaluate([2, 1, 0, 0]) == 3
    q = parse("u1*v1 + 5")
    assert q.evaluate([0, 0, 0, 0]) == q.constant_term() == 5
    with pytest.raises(ValueError):
        p.evaluate([1, 2])


def test_homogeneity():
    assert parse("u1^2 - v1^2").homogeneous_degree() == 2
    p = parse("u1^2 + u1")
    assert not p.is_homogeneous()
    assert p.homogeneous_degree() is None
    zero = Polynomial.zero(QQ, 4)
    assert zero.is_homogeneous()
    assert zero.homogeneous_degree() is None


def test_multidegree():
    blocks = [[0], [1], [2, 3]]
    assert parse("u1*v1*w1").multidegree(blocks) == {(1, 1, 1)}
    assert parse("u1^2 - v1^2").multidegree(blocks) == {(2, 0, 0), (0, 2, 0)}
    with pytest.raises(ValueError):
        parse("u1").multidegree([[0], [1]])


def test_arity_field_mismatch():
    with pytest.raises(ValueError):
        parse("u1") + Polynomial.variable(QQ, 3, 0)
    with pytest.raises(ValueError):
        parse("u1") + Polynomial.variable(PrimeField(7), 4, 0)


def test_pow_and_scale():
    p = parse("u1 + v1")
    assert p**3 == p * p * p
    assert p.scale(Fraction(1, 2)) + p.scale(Fraction(1, 2)) == p
    with pytest.raises(ValueError):
        p**-1


def test_substitute_linear_change():
    p = parse("u1^2 - v1^2")
    images = [
        parse("u1 + v1"),
        parse("u1 - v1"),
        parse("w1"),
        parse("t1"),
    ]
    assert p.substitute(images) == parse("4*u1*v1")


def test_text_roundtrip_rational():
    p = parse("-3/2*u1^2*v1 + w1^4 - 7*t1 + 1/3")
    assert Polynomial.parse(p.to_str(NAMES4), QQ, NAMES4) == p


def test_text_roundtrip_quadratic_field():
    k = QuadraticField(2)
    names = ["x1", "x2"]
    p = Polynomial(
        k,
        2,
        {
            (2, 0): k.coerce((Fraction(1, 2), Fraction(-3, 4))),
            (1, 1): k.coerce((Fraction(0), Fraction(1))),
            (0, 0): k.coerce((Fraction(-2), Fraction(0))),
        },
    )
    assert Polynomial.parse(p.to_str(names), k, names) == p


def test_text_roundtrip_prime_field():
    f = PrimeField(65521)
    names = default_names(3)
    p = Polynomial.parse("3*x1^2*x3 + 65520*x2", f, names)
    assert Polynomial.parse(p.to_str(names), f, names) == p


def test_focal_names_layout():
    assert focal_names(1, 2) == ["u1", "u2", "v1", "v2", "w1"]


def test_deterministic_term_order():
    p = parse("u1*v1 + u1^2 + v1^2")
    exps = list(p.terms)
    assert exps == sorted(exps, key=lambda e: (sum(e), tuple(-x for x in reversed(e))), reverse=True)


small_polys = st.builds(
    lambda terms: Polynomial(QQ, 3, {e: Fraction(c) for e, c in terms}),
    st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)),
        st.integers(-9, 9).filter(bool),
        max_size=5,
    ).map(dict.items),
)


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_ring_axioms_random(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys)
def test_leibniz_rule_random(p, q):
    for i in range(3):
        lhs = (p * q).differentiate(i)
        rhs = p.differentiate(i) * q + p * q.differentiate(i)
        assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys, st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_evaluate_is_ring_morphism(p, q, pt):
    point = [Fraction(x) for x in pt]
    assert (p + q).evaluate(point) == p.evaluate(point) + q.evaluate(point)
    assert (p * q).evaluate(point) == p.evaluate(point) * q.evaluate(point)


@settings(max_examples=60, deadline=None)
@given(small_polys, st.integers(1, 4))
def test_euler_identity_homogeneous(p, deg):
    graded = Polynomial(QQ, 3, {e: c for e, c in p.terms.items() if sum(e) == deg})
    assert euler_pairing(graded) == graded.scale(deg)


def test_poly_matrix_determinant():
    names = ["x1", "x2"]
    m = PolyMatrix(
        [
            [parse("x1", names), parse("x2", names)],
            [parse("x2", names), parse("x1", names)],
        ]
    )
    assert m.determinant() == parse("x1^2 - x2^2", names)


def test_poly_matrix_jacobian_and_minors():
    names = ["x1", "x2", "x3"]
    ps = [parse("x1^2 + x2^2", names), parse("x2*x3", names)]
    jac = PolyMatrix.jacobian(ps)
    assert jac.rows == 2 and jac.cols == 3
    minors = jac.minors(2)
    assert len(minors) == 3
    assert minors[0] == parse("2*x1*x3", names)
    with pytest.raises(ValueError):
        jac.minors(2, cap=1)


def test_quadratic_and_inner_forms():
    mat = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(0)]]
    assert quadratic_form(mat) == Polynomial.parse("x1^2 + 4*x1*x2", QQ, ["x1", "x2"])
    assert inner_product_form(QQ, 2) == Polynomial.parse("x1^2 + x2^2", QQ, ["x1", "x2"])
