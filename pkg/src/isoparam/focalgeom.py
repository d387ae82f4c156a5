"""Focal-manifold geometry: adapted frames, shape operators, and the
second/third fundamental forms as exact polynomials.

The focal manifold of codimension m1+1 attached to a Clifford system is
realized as the Clifford-Stiefel variety

    M+ = { x in S^{2l-1} : <P_0 x, x> = ... = <P_m x, x> = 0 }.

At a point x0 the vectors n_a = P_a x0 form an orthonormal basis of the
normal space inside the sphere, and the shape operator in direction n_a is
the tangential compression of -P_a.  The operator for n_0 has eigenvalues
+1, -1, 0 with multiplicities m2, m2, m1; an orthonormal eigenbasis
X_alpha, Y_mu, Z_p supplies the coordinates (u, v, w) in which the
second-form components p_a and third-form components q_a live:

    p_a(X) = <S(X,X), n_a> / 2,      q_a(X) = <Q(X,X,X), n_a> / 3,
    Q(X,Y,Z) = (D^perp_X S)(Y,Z).

The covariant derivative is evaluated with ambient extensions: tangent
fields extend as Pi(x) V with the polynomial projector
Pi(x) = I - x x^T - sum_a (P_a x)(P_a x)^T, and the normal frame is chosen
with vanishing normal-connection form at x0 (projecting the frame at x0
along M+ achieves this), which collapses the derivative of the frame into
the single compensation term below.  Everything reduces to exact field
arithmetic at the point:

    Q^a(X,Y,Z) = - sum_d <P_d X, n_a><P_d Y, Z>
                 - <P_a (I-Pi)(d_X Pi) Y, Z> - <P_a Y, (I-Pi)(d_X Pi) Z>.

Frames are kept inside QQ whenever an orthonormal eigenbasis with rational
normalizers exists; otherwise a single square root is adjoined and the
whole computation runs in QQ(sqrt(d)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import linalg
from .clifford import CliffordSystem
from .fields import QQ, QuadraticField, split_square, squarefree_part
from .poly import Polynomial, focal_names

Vector = list


class FocalPointError(ValueError):
    """A candidate point does not lie on the focal manifold."""


class FrameFieldError(ValueError):
    """No orthonormal frame exists within a single quadratic extension."""


class FocalSearchError(RuntimeError):
    """Coordinate search exhausted; supply an explicit point instead."""


@dataclass
class FocalFrame:
    """A focal point with adapted normal frame and eigenspace splitting."""

    system: CliffordSystem
    field: object
    point_raw: tuple  # unnormalized integer representative of x0
    x0: Vector
    normals: list[Vector]  # n_a = P_a x0
    tangent_u: list[Vector]  # eigenvalue +1 of S_{n_0}
    tangent_v: list[Vector]  # eigenvalue -1
    tangent_w: list[Vector]  # eigenvalue 0

    @property
    def m1(self) -> int:
        return self.system.m1

    @property
    def m2(self) -> int:
        return self.system.m2

    @property
    def tangent_dim(self) -> int:
        return self.m1 + 2 * self.m2

    def tangent_basis(self) -> list[Vector]:
        return list(self.tangent_u) + list(self.tangent_v) + list(self.tangent_w)

    def variable_names(self) -> list[str]:
        return focal_names(self.m1, self.m2)


# ---------------------------------------------------------------------------
# point search and frame construction
# ---------------------------------------------------------------------------


def membership_defect(sys: CliffordSystem, z: Vector) -> list[Fraction]:
    """The values <P_i z, z>; all zero exactly when z/|z| lies on M+."""
    out = []
    for i in range(sys.m + 1):
        pz = linalg.mat_vec(QQ, sys.matrix(i), z)
        out.append(linalg.dot(QQ, pz, z))
    return out


def candidate_points(dim: int):
    """Deterministic stream of small-support integer candidate vectors.

    Four-support vectors come first because their norm 4 keeps the point
    rational; two-support vectors (norm 2) follow and may adjoin sqrt(2).
    """
    for support in combinations(range(dim), 4):
        for signs in range(8):  # first nonzero entry fixed at +1
            v = [Fraction(0)] * dim
            v[support[0]] = Fraction(1)
            for b, pos in enumerate(support[1:]):
                v[pos] = Fraction(1 if not (signs >> b) & 1 else -1)
            yield v
    for i, j in combinations(range(dim), 2):
        for s in (1, -1):
            v = [Fraction(0)] * dim
            v[i] = Fraction(1)
            v[j] = Fraction(s)
            yield v


def iter_focal_points(sys: CliffordSystem, budget: int = 200_000):
    """Yield unnormalized integer points of M+ found by coordinate search."""
    seen = 0
    for z in candidate_points(sys.dim):
        if seen >= budget:
            return
        seen += 1
        if all(x == 0 for x in membership_defect(sys, z)):
            yield z


def find_focal_point(
    sys: CliffordSystem, point=None, budget: int = 200_000
) -> FocalFrame:
    """Build an adapted frame at a focal point.

    With point=None, scans small-support candidates (coordinate_search);
    otherwise uses the given vector, normalizing it exactly.
    """
    if point is not None:
        z = [Fraction(x) for x in point]
        if all(x == 0 for x in z):
            raise FocalPointError("zero vector")
        defect = membership_defect(sys, z)
        if any(x != 0 for x in defect):
            raise FocalPointError(
                f"point violates the focal-manifold equations: <P_i x, x> = {defect}"
            )
        return build_frame(sys, z)
    last_error = None
    for z in iter_focal_points(sys, budget):
        try:
            return build_frame(sys, z)
        except FrameFieldError as err:
            last_error = err
    raise FocalSearchError(
        f"no usable focal point within budget {budget}"
        + (f" (last frame failure: {last_error})" if last_error else "")
        + "; pass an explicit point instead"
    )


def iter_focal_frames(sys: CliffordSystem, limit: int | None = None, budget: int = 200_000):
    """Yield frames at distinct focal points, skipping frame-field failures."""
    count = 0
    for z in iter_focal_points(sys, budget):
        try:
            frame = build_frame(sys, z)
        except FrameFieldError:
            continue
        yield frame
        count += 1
        if limit is not None and count >= limit:
            return


def _tangent_projector_rational(sys: CliffordSystem, z: Vector):
    """Pi = I - zz^T/s - sum (P_a z)(P_a z)^T / s, rational for integer z."""
    s = linalg.dot(QQ, z, z)
    n = sys.dim
    pi = linalg.identity_matrix(QQ, n)
    pieces = [z] + [linalg.mat_vec(QQ, sys.matrix(a), z) for a in range(sys.m + 1)]
    for vec in pieces:
        outer = linalg.outer(QQ, vec, vec)
        pi = linalg.mat_sub(QQ, pi, linalg.mat_scale(QQ, outer, QQ.div(QQ.one, s)))
    return pi


def _eigensplit_rational(sys: CliffordSystem, z: Vector):
    """Rational bases of the +1 / -1 / 0 eigenspaces of S_{n_0} at z/|z|."""
    pi = _tangent_projector_rational(sys, z)
    p0 = sys.matrix(0)
    s_amb = linalg.mat_scale(QQ, linalg.mat_mul(QQ, pi, linalg.mat_mul(QQ, p0, pi)), Fraction(-1))
    plus = linalg.eigenspace(QQ, s_amb, Fraction(1))
    minus = linalg.eigenspace(QQ, s_amb, Fraction(-1))
    # The 0-eigenspace of the ambient operator also contains x0 and the n_a;
    # cut those away by stacking the orthogonality constraints.
    rows = [list(row) for row in s_amb]
    rows.append(list(z))
    for a in range(sys.m + 1):
        rows.append(linalg.mat_vec(QQ, sys.matrix(a), z))
    zero = linalg.kernel_basis(QQ, rows)
    if len(plus) != sys.m2 or len(minus) != sys.m2 or len(zero) != sys.m1:
        raise FocalPointError(
            f"unexpected eigenspace dimensions {(len(plus), len(minus), len(zero))}"
        )
    return plus, minus, zero


def _orthogonal_primitive_block(vectors):
    """Gram-Schmidt a rational block, then pair equal-norm vectors whose
    square-free norm part is 2 so their sum/difference become rational units."""
    ortho = [
        linalg.primitive_rational_vector(v) for v in linalg.gram_schmidt(QQ, vectors)
    ]
    norms = [linalg.dot(QQ, v, v) for v in ortho]
    by_norm: dict[Fraction, list[int]] = {}
    for i, s in enumerate(norms):
        by_norm.setdefault(s, []).append(i)
    result: list[Vector | None] = list(ortho)
    for s, idxs in sorted(by_norm.items()):
        if squarefree_part(s.numerator * s.denominator) != 2:
            continue
        for a, b in zip(idxs[0::2], idxs[1::2]):
            va, vb = result[a], result[b]
            result[a] = linalg.primitive_rational_vector(linalg.vec_add(QQ, va, vb))
            result[b] = linalg.primitive_rational_vector(linalg.vec_sub(QQ, va, vb))
    return [v for v in result if v is not None]


def _normalize_block(vectors, field):
    """Divide primitive integer vectors by their exact norms inside field."""
    out = []
    for v in vectors:
        s = linalg.dot(QQ, v, v)
        r, d = split_square(s)
        if d == 1:
            inv = Fraction(1) / r
            unit = [x * inv for x in v]
        else:
            # 1 / (r sqrt(d)) = sqrt(d) / (r d)
            coef = (Fraction(0), Fraction(1) / (r * d))
            unit = [field.mul(field.coerce(x), coef) for x in v]
        out.append([field.coerce(x) for x in unit])
    return out


def build_frame(sys: CliffordSystem, z: Vector) -> FocalFrame:
    """Assemble the adapted orthonormal frame at the M+ point z/|z|."""
    z = [Fraction(x) for x in z]
    defect = membership_defect(sys, z)
    if any(x != 0 for x in defect):
        raise FocalPointError(f"not on the focal manifold: <P_i x, x> = {defect}")
    plus, minus, zero = _eigensplit_rational(sys, z)
    blocks = [_orthogonal_primitive_block(b) for b in (plus, minus, zero)]

    radicals = set()
    norms_needed = [linalg.dot(QQ, z, z)]
    for block in blocks:
        norms_needed.extend(linalg.dot(QQ, v, v) for v in block)
    for s in norms_needed:
        d = squarefree_part(s.numerator * s.denominator)
        if d != 1:
            radicals.add(d)
    if len(radicals) > 1:
        raise FrameFieldError(
            f"frame needs several radicals {sorted(radicals)}; "
            "no single quadratic extension suffices at this point"
        )
    field = QuadraticField(radicals.pop()) if radicals else QQ

    x0 = _normalize_block([linalg.primitive_rational_vector(z)], field)[0]
    tangent_u, tangent_v, tangent_w = (_normalize_block(b, field) for b in blocks)
    normals = [
        linalg.mat_vec(field, _lift_matrix(sys.matrix(a), field), x0)
        for a in range(sys.m + 1)
    ]
    frame = FocalFrame(
        system=sys,
        field=field,
        point_raw=tuple(linalg.primitive_rational_vector(z)),
        x0=x0,
        normals=normals,
        tangent_u=tangent_u,
        tangent_v=tangent_v,
        tangent_w=tangent_w,
    )
    _validate_frame(frame)
    return frame


def _lift_matrix(mat, field):
    if field == QQ:
        return mat
    return [[field.embed(x, QQ) for x in row] for row in mat]


def _validate_frame(frame: FocalFrame):
    f = frame.field
    vecs = [frame.x0] + frame.normals + frame.tangent_basis()
    if not f.is_zero(f.sub(linalg.dot(f, frame.x0, frame.x0), f.one)):
        raise FocalPointError("x0 is not a unit vector")
    for i, a in enumerate(vecs):
        for j in range(i + 1, len(vecs)):
            if not f.is_zero(linalg.dot(f, a, vecs[j])):
                raise FocalPointError("frame is not orthogonal")
    for t in frame.tangent_basis():
        if not f.is_zero(f.sub(linalg.dot(f, t, t), f.one)):
            raise FocalPointError("frame vector is not unit")
    s0 = shape_operators(frame)[0]
    m1, m2 = frame.m1, frame.m2
    for i in range(m1 + 2 * m2):
        expect = f.one if i < m2 else (f.neg(f.one) if i < 2 * m2 else f.zero)
        for j in range(m1 + 2 * m2):
            want = expect if i == j else f.zero
            if not f.is_zero(f.sub(s0[i][j], want)):
                raise FocalPointError("S_{n_0} is not diagonal (+1, -1, 0)")


# ---------------------------------------------------------------------------
# shape operators and fundamental forms
# ---------------------------------------------------------------------------


def shape_operators(frame: FocalFrame) -> list[list[list]]:
    """Matrices of S_{n_a} on the tangent frame: (S_a)_ij = -<P_a T_i, T_j>."""
    f = frame.field
    basis = frame.tangent_basis()
    out = []
    for a in range(frame.m1 + 1):
        p = _lift_matrix(frame.system.matrix(a), f)
        images = [linalg.mat_vec(f, p, t) for t in basis]
        out.append(
            [
                [f.neg(linalg.dot(f, images[i], basis[j])) for j in range(len(basis))]
                for i in range(len(basis))
            ]
        )
    return out


@dataclass
class FormSet:
    """Second forms p_0..p_m1 and (optionally) third forms q_0..q_m1."""

    frame: FocalFrame
    p: list[Polynomial]
    q: list[Polynomial] | None = None

    @property
    def m1(self) -> int:
        return self.frame.m1

    @property
    def m2(self) -> int:
        return self.frame.m2

    @property
    def field(self):
        return self.frame.field

    def u_index(self, alpha: int) -> int:
        return alpha

    def v_index(self, mu: int) -> int:
        return self.m2 + mu

    def w_index(self, p: int) -> int:
        return 2 * self.m2 + p

    def _pair_coefficient(self, poly: Polynomial, i: int, j: int):
        e = [0] * poly.arity
        e[i] += 1
        e[j] += 1
        return poly.coefficient(tuple(e))

    def s_uv(self, a: int, alpha: int, mu: int):
        """<S(X_alpha, Y_mu), n_a>, read off the u v coefficient of p_a."""
        return self._pair_coefficient(self.p[a], self.u_index(alpha), self.v_index(mu))

    def s_uw(self, a: int, alpha: int, p: int):
        return self._pair_coefficient(self.p[a], self.u_index(alpha), self.w_index(p))

    def s_vw(self, a: int, mu: int, p: int):
        return self._pair_coefficient(self.p[a], self.v_index(mu), self.w_index(p))

    def q_uvw(self, a: int, alpha: int, mu: int, p: int):
        e = [0] * self.q[a].arity
        e[self.u_index(alpha)] += 1
        e[self.v_index(mu)] += 1
        e[self.w_index(p)] += 1
        return self.q[a].coefficient(tuple(e))

    def product_identity_holds(self) -> bool:
        """sum_a p_a q_a == 0 as an exact polynomial identity."""
        if self.q is None:
            raise ValueError("third forms not computed")
        acc = Polynomial.zero(self.field, self.p[0].arity)
        for pa, qa in zip(self.p, self.q):
            acc = acc + pa * qa
        return acc.is_zero()

    def to_json_dict(self) -> dict:
        names = self.frame.variable_names()
        out = {
            "m1": self.m1,
            "m2": self.m2,
            "point": [str(x) for x in self.frame.point_raw],
            "pa": [poly.to_str(names) for poly in self.p],
        }
        if self.q is not None:
            out["qa"] = [poly.to_str(names) for poly in self.q]
            out["identity_ok"] = self.product_identity_holds()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def second_forms(frame: FocalFrame) -> FormSet:
    """p_a as degree-2 polynomials in the (u, v, w) coordinates."""
    f = frame.field
    n = frame.tangent_dim
    mats = shape_operators(frame)
    half = f.div(f.one, f.coerce(2))
    ps = []
    for s in mats:
        terms = {}
        for i in range(n):
            for j in range(i, n):
                coef = s[i][j] if i != j else f.mul(s[i][j], half)
                if f.is_zero(coef):
                    continue
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = coef
        ps.append(Polynomial(f, n, terms))
    return FormSet(frame=frame, p=ps)


def third_forms(frame: FocalFrame) -> FormSet:
    """p_a and q_a; the cubic coefficients come from the exact point-local
    formula for (D^perp S) described in the module docstring."""
    f = frame.field
    sys = frame.system
    basis = frame.tangent_basis()
    n = len(basis)
    nn = sys.dim
    pmats = [_lift_matrix(sys.matrix(a), f) for a in range(sys.m + 1)]
    p_images = [[linalg.mat_vec(f, p, t) for t in basis] for p in pmats]

    # <P_d T_i, n_a> and <P_d T_j, T_k>
    g = [
        [[linalg.dot(f, p_images[d][i], na) for na in frame.normals] for i in range(n)]
        for d in range(sys.m + 1)
    ]
    h = [
        [[linalg.dot(f, p_images[d][j], basis[k]) for k in range(n)] for j in range(n)]
        for d in range(sys.m + 1)
    ]

    # (I - Pi) at x0 projects onto span(x0, n_0..n_m).
    span_vecs = [frame.x0] + frame.normals

    def project_out(vec):
        out = [f.zero] * nn
        for s in span_vecs:
            c = linalg.dot(f, s, vec)
            out = [f.add(x, f.mul(c, y)) for x, y in zip(out, s)]
        return out

    # d_X Pi applied to a constant vector, X = T_i:
    #   (d_i Pi) Y = -(T_i <x0,Y> + x0 <T_i,Y>) - sum_d (P_d T_i <n_d,Y> + n_d <P_d T_i, Y>)
    def dpi_apply(i: int, y: Vector) -> Vector:
        out = [f.zero] * nn
        pairs = [(basis[i], frame.x0), (frame.x0, basis[i])]
        for d in range(sys.m + 1):
            pairs.append((p_images[d][i], frame.normals[d]))
            pairs.append((frame.normals[d], p_images[d][i]))
        for vec, form in pairs:
            c = linalg.dot(f, form, y)
            out = [f.sub(x, f.mul(c, v)) for x, v in zip(out, vec)]
        return out

    # V_ij = (I - Pi)(d_i Pi) T_j, then its P_a images paired with the basis.
    v_proj = [[project_out(dpi_apply(i, basis[j])) for j in range(n)] for i in range(n)]
    pa_v = [
        [[linalg.mat_vec(f, pmats[a], v_proj[i][j]) for j in range(n)] for i in range(n)]
        for a in range(sys.m + 1)
    ]

    third = [[[None] * n for _ in range(n)] for _ in range(n)]
    qs = []
    for a in range(sys.m + 1):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    acc = f.zero
                    for d in range(sys.m + 1):
                        acc = f.add(acc, f.mul(g[d][i][a], h[d][j][k]))
                    acc = f.neg(acc)
                    acc = f.sub(acc, linalg.dot(f, pa_v[a][i][j], basis[k]))
                    acc = f.sub(acc, linalg.dot(f, p_images[a][j], v_proj[i][k]))
                    third[i][j][k] = acc
        _assert_symmetric(f, third, n)
        qs.append(_cubic_from_tensor(f, third, n))
    forms = second_forms(frame)
    return FormSet(frame=frame, p=forms.p, q=qs)


def _assert_symmetric(f, t, n):
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a = t[i][j][k]
                for other in (t[j][i][k], t[i][k][j]):
                    if not f.is_zero(f.sub(a, other)):
                        raise AssertionError(
                            "third fundamental form tensor is not symmetric; "
                            "this indicates an internal error"
                        )


def _cubic_from_tensor(f, t, n) -> Polynomial:
    third = f.div(f.one, f.coerce(3))
    terms = {}
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                if i == j == k:
                    mult = 1
                elif i == j or j == k or i == k:
                    mult = 3
                else:
                    mult = 6
                coef = f.mul(f.mul(t[i][j][k], f.coerce(mult)), third)
                if f.is_zero(coef):
                    continue
                e = [0] * n
                e[i] += 1
                e[j] += 1
                e[k] += 1
                terms[tuple(e)] = coef
    return Polynomial(f, n, terms)


# ---------------------------------------------------------------------------
# span check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpanCheck:
    ok: bool
    rank: int

    def __bool__(self) -> bool:
        return self.ok


def span_check(frame: FocalFrame) -> SpanCheck:
    """Do the vectors (S^1_{alpha mu}, ..., S^{m1}_{alpha mu}) span R^{m1}?

    Requires m1 < m2; returns the achieved rank alongside the verdict.
    """
    if not frame.m1 < frame.m2:
        raise ValueError("span check requires m1 < m2")
    forms = second_forms(frame)
    f = frame.field
    rows = []
    for alpha in range(frame.m2):
        for mu in range(frame.m2):
            rows.append([forms.s_uv(a, alpha, mu) for a in range(1, frame.m1 + 1)])
    r = linalg.rank(f, rows)
    return SpanCheck(ok=r == frame.m1, rank=r)
