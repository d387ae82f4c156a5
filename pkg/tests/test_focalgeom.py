"""Focal frames, shape operators, and second/third fundamental forms."""

import random
from fractions import Fraction

import pytest

from isoparam import linalg
from isoparam.clifford import build_clifford_system, system_from_matrices
from isoparam.fields import QQ, QuadraticField
from isoparam.focalgeom import (
    FocalPointError,
    build_frame,
    find_focal_point,
    iter_focal_frames,
    iter_focal_points,
    membership_defect,
    second_forms,
    shape_operators,
    span_check,
    third_forms,
)
from isoparam.poly import Polynomial, focal_names


def test_two_support_point_rejected_when_paired_by_p1(sys14):
    # (e_1 + e_5)/sqrt(2) pairs the blocks that P_1 = antidiag(I, I) couples:
    # <P_1 x, x> = 1, so the point is off the focal manifold.
    z = [1, 0, 0, 0, 1, 0, 0, 0]
    assert membership_defect(sys14, [Fraction(x) for x in z])[1] == 2
    with pytest.raises(FocalPointError):
        build_frame(sys14, z)


def test_unit_but_nonmember_given_point(sys14):
    x = [Fraction(1)] + [Fraction(0)] * 7  # <P_0 x, x> = 1
    with pytest.raises(FocalPointError):
        find_focal_point(sys14, point=x)


def test_given_point_accepts_unnormalized(sys14):
    fr = find_focal_point(sys14, point=[1, -1, 0, 0, 1, 1, 0, 0])
    assert fr.field == QQ
    assert linalg.dot(fr.field, fr.x0, fr.x0) == fr.field.one


def test_frame_invariants(frame14, frame38):
    for fr in (frame14, frame38):
        f = fr.field
        basis = fr.tangent_basis()
        assert len(fr.tangent_u) == fr.m2
        assert len(fr.tangent_v) == fr.m2
        assert len(fr.tangent_w) == fr.m1
        vecs = [fr.x0] + fr.normals + basis
        for i, a in enumerate(vecs):
            for j, b in enumerate(vecs):
                want = f.one if i == j else f.zero
                assert f.is_zero(f.sub(linalg.dot(f, a, b), want))


def test_quadratic_extension_frame(sys14):
    fr = build_frame(sys14, [3, 4, 0, 0, -4, 3, 0, 0])
    assert fr.field == QuadraticField(2)
    forms = third_forms(fr)
    assert forms.product_identity_holds()
    assert forms.p[0] == _expected_p0(fr)


def _expected_p0(frame):
    f = frame.field
    n = frame.m1 + 2 * frame.m2
    half = f.div(f.one, f.coerce(2))
    terms = {}
    for i in range(frame.m2):
        e = [0] * n
        e[i] = 2
        terms[tuple(e)] = half
        e = [0] * n
        e[frame.m2 + i] = 2
        terms[tuple(e)] = f.neg(half)
    return Polynomial(f, n, terms)


def test_shape_operator_s0_is_diagonal(frame38):
    s0 = shape_operators(frame38)[0]
    f = frame38.field
    m1, m2 = frame38.m1, frame38.m2
    for i in range(m1 + 2 * m2):
        expect = f.one if i < m2 else (f.neg(f.one) if i < 2 * m2 else f.zero)
        assert s0[i][i] == expect


def test_shape_spectrum_14(frame14):
    # characteristic polynomial of S_{n_1} is t (t^2 - 1)^2
    s1 = shape_operators(frame14)[1]
    cp = linalg.charpoly(frame14.field, s1)
    t = Polynomial.variable(frame14.field, 1, 0)
    one = Polynomial.constant(frame14.field, 1, 1)
    assert cp == t * (t * t - one) ** 2


def test_real_unit_normal_kernel_dimension(frame14):
    # n = (n_0 + n_1)/sqrt(2): the kernel of S_n ignores the scale
    s = shape_operators(frame14)
    f = frame14.field
    mix = linalg.mat_add(f, s[0], s[1])
    n = frame14.tangent_dim
    assert n - linalg.rank(f, mix) == frame14.m1


def test_second_forms_structure(forms14, forms38, forms38_generic):
    for forms in (forms14, forms38, forms38_generic):
        m1, m2 = forms.m1, forms.m2
        n = m1 + 2 * m2
        assert forms.p[0] == _expected_p0(forms.frame)
        for pa in forms.p[1:]:
            assert pa.homogeneous_degree() == 2
            for exp in pa.terms:
                u = sum(exp[:m2])
                v = sum(exp[m2 : 2 * m2])
                w = sum(exp[2 * m2 :])
                assert sorted((u, v, w)) == [0, 1, 1]


def test_uv_coefficient_matches_shape_operator(forms38_generic):
    forms = forms38_generic
    mats = shape_operators(forms.frame)
    for a in range(1, forms.m1 + 1):
        for alpha in range(forms.m2):
            for mu in range(forms.m2):
                assert forms.s_uv(a, alpha, mu) == mats[a][alpha][forms.m2 + mu]


def test_third_forms_cubic_coefficients_vanish(forms14, forms38_generic):
    for forms in (forms14, forms38_generic):
        n = forms.m1 + 2 * forms.m2
        for qa in forms.q:
            assert qa.homogeneous_degree() in (3, None)
            for i in range(2 * forms.m2):  # no u^3, no v^3
                e = [0] * n
                e[i] = 3
                assert forms.field.is_zero(qa.coefficient(tuple(e)))


def test_product_identity(forms14, forms38, forms38_generic):
    for forms in (forms14, forms38, forms38_generic):
        assert forms.product_identity_holds()


def test_identity_at_three_points_each(sys14, sys38):
    for sys_ in (sys14, sys38):
        count = 0
        seen = set()
        for fr in iter_focal_frames(sys_):
            if fr.point_raw in seen:
                continue
            seen.add(fr.point_raw)
            assert third_forms(fr).product_identity_holds()
            count += 1
            if count == 3:
                break
        assert count == 3


def test_span_check(frame14, frame38):
    assert span_check(frame14).rank == 1
    assert span_check(frame38).rank == 3
    assert span_check(frame14).ok and span_check(frame38).ok


def test_span_check_requires_m1_less_m2():
    sys_ = build_clifford_system(2, 4)  # multiplicities (2, 1)
    fr = find_focal_point(sys_)
    with pytest.raises(ValueError):
        span_check(fr)


def test_normal_frame_covariance(sys38, frame38_generic):
    # rotating P_1..P_3 by an orthogonal R (fixing P_0) rotates the forms:
    # p'_a = sum_b R_ab p_b and q'_a = sum_b R_ab q_b, exactly.
    r3 = [
        [Fraction(3, 5), Fraction(4, 5), Fraction(0)],
        [Fraction(-4, 5), Fraction(3, 5), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(1)],
    ]
    rot = [[Fraction(1) if i == j else Fraction(0) for j in range(4)] for i in range(4)]
    for i in range(3):
        for j in range(3):
            rot[1 + i][1 + j] = r3[i][j]
    ps = sys38.matrix_list()
    mixed = []
    for a in range(4):
        acc = [[Fraction(0)] * 16 for _ in range(16)]
        for b in range(4):
            if rot[a][b]:
                acc = linalg.mat_add(QQ, acc, linalg.mat_scale(QQ, ps[b], rot[a][b]))
        mixed.append(acc)
    sys_rot = system_from_matrices(mixed)
    fr_rot = build_frame(sys_rot, list(frame38_generic.point_raw))
    forms = third_forms(frame38_generic)
    forms_rot = third_forms(fr_rot)
    assert fr_rot.tangent_basis() == frame38_generic.tangent_basis()
    for a in range(4):
        expect_p = Polynomial.zero(QQ, 11)
        expect_q = Polynomial.zero(QQ, 11)
        for b in range(4):
            if rot[a][b]:
                expect_p = expect_p + forms.p[b].scale(rot[a][b])
                expect_q = expect_q + forms.q[b].scale(rot[a][b])
        assert forms_rot.p[a] == expect_p
        assert forms_rot.q[a] == expect_q


def test_q0_multidegree_measurement(forms38_generic):
    # recorded, not asserted against a fixed expectation: each block degree
    # is observed and exported with the forms
    forms = forms38_generic
    m1, m2 = forms.m1, forms.m2
    blocks = [list(range(m2)), list(range(m2, 2 * m2)), list(range(2 * m2, 2 * m2 + m1))]
    degs = forms.q[0].multidegree(blocks)
    assert all(sum(t) == 3 for t in degs)
    assert all(all(x >= 0 for x in t) for t in degs)


def test_formset_export(forms14):
    payload = forms14.to_json_dict()
    assert payload["m1"] == 1 and payload["m2"] == 2
    assert payload["identity_ok"] is True
    assert len(payload["pa"]) == 2 and len(payload["qa"]) == 2
    names = focal_names(1, 2)
    assert Polynomial.parse(payload["pa"][0], QQ, names) == forms14.p[0]


def test_search_exhaustion_reports(sys14):
    from isoparam.focalgeom import FocalSearchError

    with pytest.raises(FocalSearchError):
        find_focal_point(sys14, budget=0)


def test_point_stream_deterministic(sys38):
    first = [tuple(int(x) for x in z) for z in _take(iter_focal_points(sys38), 5)]
    second = [tuple(int(x) for x in z) for z in _take(iter_focal_points(sys38), 5)]
    assert first == second


def _take(gen, k):
    out = []
    for item in gen:
        out.append(item)
        if len(out) == k:
            break
    return out
