"""Clifford systems, the FKM quartic, and the Cartan-Munzner identities."""

import json
import random
from fractions import Fraction

import pytest

from isoparam import linalg
from isoparam.clifford import (
    CliffordSystemError,
    build_clifford_system,
    builtin_catalog,
    clifford_generators,
    fkm_polynomial,
    load_instance,
    system_from_matrices,
    verify_cartan_munzner,
)
from isoparam.fields import QQ
from isoparam.poly import Polynomial


def test_build_1_4_block_shapes(sys14):
    p0 = sys14.matrix(0)
    p1 = sys14.matrix(1)
    ident4 = linalg.identity_matrix(QQ, 4)
    assert [row[:4] for row in p0[:4]] == ident4
    assert [row[4:] for row in p0[4:]] == [[-x for x in r] for r in ident4]
    assert [row[4:] for row in p1[:4]] == ident4
    assert (sys14.m1, sys14.m2) == (1, 2)


def test_build_3_8_multiplicities(sys38):
    assert (sys38.m1, sys38.m2) == (3, 4)
    assert len(sys38.matrices) == 4
    assert sys38.dim == 16


@pytest.mark.parametrize("m,l", [(2, 4), (4, 8), (5, 16), (8, 16)])
def test_higher_generators_self_verify(m, l):
    # the constructor re-checks symmetry, involutivity, anticommutation
    sys_ = build_clifford_system(m, l)
    assert sys_.m2 == l - m - 1


@pytest.mark.parametrize(
    "m,l",
    [(1, 2), (3, 7), (9, 16), (2, 3), (0, 4)],
)
def test_rejected_parameters(m, l):
    with pytest.raises(CliffordSystemError):
        build_clifford_system(m, l)


def test_generator_relations_octonion_level():
    gens = clifford_generators(7, 8)
    for i, e in enumerate(gens):
        assert linalg.transpose(e) == [[-x for x in row] for row in e]
        sq = linalg.mat_mul(QQ, e, e)
        assert sq == [[-x for x in row] for row in linalg.identity_matrix(QQ, 8)]
        for f in gens[i + 1 :]:
            anti = linalg.mat_add(
                QQ, linalg.mat_mul(QQ, e, f), linalg.mat_mul(QQ, f, e)
            )
            assert all(x == 0 for row in anti for x in row)


def test_unit_combination_is_involution(sys38):
    # (sum c_i P_i)^2 = I for rational unit vectors c, by polarization
    rng = random.Random(11)
    for _ in range(5):
        z = [Fraction(rng.randint(-3, 3)) for _ in range(sys38.m)]
        n2 = sum(x * x for x in z)
        c = [2 * x / (n2 + 1) for x in z] + [Fraction(n2 - 1, n2 + 1)]
        assert sum(x * x for x in c) == 1
        acc = [[Fraction(0)] * 16 for _ in range(16)]
        for ci, mat in zip(c, sys38.matrix_list()):
            acc = linalg.mat_add(QQ, acc, linalg.mat_scale(QQ, mat, ci))
        assert linalg.mat_mul(QQ, acc, acc) == linalg.identity_matrix(QQ, 16)


def test_fkm_quartic_basic(sys14):
    q = fkm_polynomial(sys14)
    assert q.polynomial.homogeneous_degree() == 4
    assert q.polynomial.arity == 8


def test_fkm_value_on_plus_eigenvector(sys14):
    # e_1 lies in the +1 eigenspace of P_0: F(e_1) = 1 - 2 <P_0 e, e>^2 = -1
    q = fkm_polynomial(sys14)
    point = [Fraction(1)] + [Fraction(0)] * 7
    assert q.polynomial.evaluate(point) == Fraction(-1)


def test_fkm_even(sys14):
    q = fkm_polynomial(sys14).polynomial
    flip = [Polynomial.variable(QQ, 8, i).scale(-1) for i in range(8)]
    assert q.substitute(flip) == q


@pytest.mark.parametrize(
    "m,l,c",
    [(1, 3, 0), (1, 4, 8), (2, 4, -8), (3, 8, 8), (4, 8, -8)],
)
def test_cartan_munzner_identities(m, l, c):
    rep = verify_cartan_munzner(fkm_polynomial(build_clifford_system(m, l)))
    assert rep.grad_ok and rep.laplace_ok
    assert rep.c_value == Fraction(c) == rep.c_expected


def test_perturbed_quartic_fails(sys14):
    q = fkm_polynomial(sys14)
    bad = q.polynomial + Polynomial.parse(
        "x1^4", QQ, [f"x{i+1}" for i in range(8)]
    )
    rep = verify_cartan_munzner(bad, multiplicities=(1, 2))
    assert not rep.grad_ok


def test_quartic_invariant_under_signed_permutation(sys14):
    # conjugating every P_i by a signed permutation M and changing
    # coordinates by the same M leaves F fixed
    rng = random.Random(5)
    perm = list(range(8))
    rng.shuffle(perm)
    signs = [rng.choice([1, -1]) for _ in range(8)]
    mat = [[Fraction(0)] * 8 for _ in range(8)]
    for i in range(8):
        mat[perm[i]][i] = Fraction(signs[i])
    mt = linalg.transpose(mat)
    conj = [
        linalg.mat_mul(QQ, mt, linalg.mat_mul(QQ, p, mat))
        for p in sys14.matrix_list()
    ]
    sys_conj = system_from_matrices(conj)
    f_conj = fkm_polynomial(sys_conj).polynomial
    # x_i maps to (M x)_i, read off row i of the change-of-coordinates matrix
    images = [
        Polynomial(
            QQ,
            8,
            {
                tuple(1 if c == j else 0 for c in range(8)): mat[i][j]
                for j in range(8)
                if mat[i][j]
            },
        )
        for i in range(8)
    ]
    assert f_conj == fkm_polynomial(sys14).polynomial.substitute(images)


def test_load_instance_family_and_matrices(tmp_path, sys14):
    spec = {"family": "fkm", "m": 1, "l": 4}
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(spec))
    loaded = load_instance(str(path))
    assert loaded.matrices == sys14.matrices
    explicit = {
        "matrices": [
            [[str(x) for x in row] for row in sys14.matrix(i)] for i in range(2)
        ]
    }
    loaded2 = load_instance(explicit)
    assert loaded2.matrices == sys14.matrices


def test_load_instance_rejects_broken_matrices():
    ident = [["1", "0"], ["0", "1"]]
    swap = [["0", "1"], ["1", "0"]]
    with pytest.raises(CliffordSystemError):
        load_instance({"matrices": [ident, swap]})  # do not anticommute
    with pytest.raises(CliffordSystemError):
        load_instance({"matrices": [[["1", "1"], ["0", "1"]]]})  # not symmetric


def test_catalog():
    rows = builtin_catalog()
    by_ml = {(r["m"], r["l"]): r for r in rows}
    assert by_ml[(1, 4)]["m1"] == 1 and by_ml[(1, 4)]["m2"] == 2
    assert (3, 8) in by_ml and by_ml[(3, 8)]["m2"] == 4
    assert (3, 7) not in by_ml  # 7 is not a multiple of delta(3) = 4
    assert all(r["m2"] >= 1 for r in rows)
