"""Matrix-pencil machinery for pairs of shape operators.

In the eigenbasis of S_{n_0} = diag(I, -I, 0) a second shape operator has
zero diagonal blocks and off-diagonal blocks A (u-v), B (u-w), C (v-w).
The simultaneous normal form brings the pair, by separate orthogonal
changes on the u-, v- and w-blocks (which leave S_{n_0} untouched), to

    B = C = [[0, 0], [0, sigma]],       A = [[I, 0], [0, Delta]],

with sigma a nonsingular diagonal r x r block (r = rank B) and Delta an
r x r skew matrix splitting as diag(0, Theta, Theta, ...) into 2x2 blocks

    Theta_i = [[0, f_i], [-f_i, 0]],        0 < f_i < 1.

The reduction follows the shape of the data: split the w-space along the
eigenvalues of B^T B, align C against B (feasible exactly for genuine
shape-operator pairs; infeasibility is reported, never approximated), and
put the leftover skew block of A into 2x2 canonical form.  The f_i are
reported sorted ascending with equal values grouped; that ordering is the
canonical one used throughout.

The exact path runs whenever the frame is rational and every eigenvalue
met along the way is rational, with all normalizers inside one quadratic
extension; all subspace geometry happens over QQ on unnormalized vectors
and a single lift at the end produces the orthogonal frames.  Otherwise
the same steps run in floating point with documented tolerances.  The
rank r is always exact.

The kernel of a complex combination sum_i c_i S_{n_i} has dimension m1
for generic coefficients; on the exceptional branch (pencil parameter
tau = +-i after rotating to a two-normal pencil) the dimension is
m1 + m2 - r.  The sampler estimates the generic fraction over uniform
points of CP^k, deliberately samples the exceptional branch, and checks
the dimension law sample by sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import numpy as np

from . import linalg
from .fields import GAUSSIAN, QQ, QuadraticField, split_square
from .focalgeom import FocalFrame, shape_operators

FLOAT_TOL = 1e-10
RANK_TOL = 1e-8


class PencilStructureError(ValueError):
    """Input violates the block structure or the normal form is infeasible."""


class _ExactPathUnavailable(Exception):
    """Irrational eigenvalues or too many radicals; fall back to floating."""


@dataclass
class PencilNormalForm:
    r: int
    sigma: list  # nonzero diagonal of the aligned B = C block
    f: list  # skew parameters, ascending, equal values grouped
    frames: tuple  # (U, V, W) orthogonal changes on the u, v, w blocks
    exact: bool
    field: object | None  # coefficient field on the exact path, else None
    m1: int
    m2: int
    _input_blocks: tuple = dataclass_field(default=(), repr=False)

    def f_floats(self) -> list[float]:
        if self.exact:
            return [self.field.to_float(x) for x in self.f]
        return list(self.f)

    def normal_blocks(self):
        """(A', B', C') in the rotated basis."""
        u, v, w = self.frames
        a, b, c = self._input_blocks
        if self.exact:
            fld = self.field
            ut, vt = linalg.transpose(u), linalg.transpose(v)
            return (
                linalg.mat_mul(fld, ut, linalg.mat_mul(fld, a, v)),
                linalg.mat_mul(fld, ut, linalg.mat_mul(fld, b, w)),
                linalg.mat_mul(fld, vt, linalg.mat_mul(fld, c, w)),
            )
        return (u.T @ a @ v, u.T @ b @ w, v.T @ c @ w)

    def reconstruction_residual(self) -> float:
        """Max abs deviation of the rotated-back blocks from the input."""
        a2, b2, c2 = self.normal_blocks()
        u, v, w = self.frames
        a, b, c = self._input_blocks
        if self.exact:
            fld = self.field
            worst = 0.0
            back = (
                linalg.mat_mul(fld, u, linalg.mat_mul(fld, a2, linalg.transpose(v))),
                linalg.mat_mul(fld, u, linalg.mat_mul(fld, b2, linalg.transpose(w))),
                linalg.mat_mul(fld, v, linalg.mat_mul(fld, c2, linalg.transpose(w))),
            )
            for orig, rot in zip((a, b, c), back):
                for r1, r2 in zip(orig, rot):
                    for x, y in zip(r1, r2):
                        worst = max(worst, abs(fld.to_float(fld.sub(x, y))))
            return worst
        worst = 0.0
        for orig, rot in ((a, u @ a2 @ v.T), (b, u @ b2 @ w.T), (c, v @ c2 @ w.T)):
            if np.asarray(orig).size:
                worst = max(worst, float(np.max(np.abs(orig - rot))))
        return worst

    def frames_orthogonal_defect(self) -> float:
        u, v, w = self.frames
        if self.exact:
            fld = self.field
            worst = 0.0
            for q in (u, v, w):
                gram = linalg.mat_mul(fld, linalg.transpose(q), q)
                for i, row in enumerate(gram):
                    for j, x in enumerate(row):
                        want = fld.one if i == j else fld.zero
                        worst = max(worst, abs(fld.to_float(fld.sub(x, want))))
            return worst
        return max(
            float(np.max(np.abs(q.T @ q - np.eye(q.shape[1])))) for q in (u, v, w)
        )


def split_blocks(s1, m1: int, m2: int, field=None):
    """Extract (A, B, C) and verify the zero diagonal blocks."""
    n = m1 + 2 * m2
    if len(s1) != n or any(len(row) != n for row in s1):
        raise PencilStructureError("operator has the wrong size")

    def nonzero(x):
        if field is None:
            return abs(x) > FLOAT_TOL
        return not field.is_zero(x)

    for i in range(m2):
        for j in range(m2):
            if nonzero(s1[i][j]) or nonzero(s1[m2 + i][m2 + j]):
                raise PencilStructureError("u-u or v-v block is not zero")
    for i in range(m1):
        for j in range(m1):
            if nonzero(s1[2 * m2 + i][2 * m2 + j]):
                raise PencilStructureError("w-w block is not zero")
    a = [[s1[i][m2 + j] for j in range(m2)] for i in range(m2)]
    b = [[s1[i][2 * m2 + j] for j in range(m1)] for i in range(m2)]
    c = [[s1[m2 + i][2 * m2 + j] for j in range(m1)] for i in range(m2)]
    return a, b, c


def _check_s0(s0, m1, m2, field):
    f = field
    n = m1 + 2 * m2
    for i in range(n):
        for j in range(n):
            want = f.zero
            if i == j:
                want = f.one if i < m2 else (f.neg(f.one) if i < 2 * m2 else f.zero)
            if not f.is_zero(f.sub(f.coerce(s0[i][j]), want)):
                raise PencilStructureError("S_0 is not diag(I, -I, 0) in this frame")


def lemma49_normal_form(s0, s1, frame: FocalFrame) -> PencilNormalForm:
    """Simultaneous normal form of a shape-operator pair in an adapted frame."""
    m1, m2 = frame.m1, frame.m2
    fld = frame.field
    _check_s0(s0, m1, m2, fld)
    a, b, c = split_blocks(s1, m1, m2, field=fld)
    if fld == QQ:
        try:
            return _exact_normal_form(a, b, c, m1, m2)
        except _ExactPathUnavailable:
            pass
    a_np, b_np, c_np = (
        np.array([[fld.to_float(x) for x in row] for row in m]).reshape(len(m), -1)
        for m in (a, b, c)
    )
    return _float_normal_form(a_np, b_np, c_np, m1, m2)


# ---------------------------------------------------------------------------
# exact path
# ---------------------------------------------------------------------------


def _rational_eigenvalues(g) -> list[Fraction] | None:
    """All eigenvalues of a rational matrix when rational (with multiplicity),
    else None."""
    from math import gcd

    n = len(g)
    cp = linalg.charpoly(QQ, g)
    coeffs = [Fraction(cp.coefficient((k,))) for k in range(n + 1)]
    roots = []
    work = coeffs
    while len(work) > 1:
        root = _one_rational_root(work)
        if root is None:
            return None
        roots.append(root)
        work = _deflate(work, root)
    return sorted(roots) if len(roots) == n else None


def _one_rational_root(coeffs) -> Fraction | None:
    from math import gcd

    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    if len(ints) <= 1:
        return None
    if ints[0] == 0:
        return Fraction(0)
    for p in _divisors(abs(ints[0])):
        for q in _divisors(abs(ints[-1])):
            for sign in (1, -1):
                cand = Fraction(sign * p, q)
                if _horner(coeffs, cand) == 0:
                    return cand
    return None


def _divisors(n: int):
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.update((d, n // d))
        d += 1
    return sorted(out)


def _horner(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, root):
    desc = list(reversed(coeffs))
    out = [desc[0]]
    for c in desc[1:-1]:
        out.append(c + root * out[-1])
    return list(reversed(out))


class _RadicalPool:
    """Collects square-free parts of required square roots; allows at most one."""

    def __init__(self):
        self.radical = 1

    def root(self, value: Fraction):
        if value <= 0:
            raise _ExactPathUnavailable()
        _, d = split_square(Fraction(value))
        if d != 1:
            if self.radical not in (1, d):
                raise _ExactPathUnavailable()
            self.radical = d

    def field(self):
        return QQ if self.radical == 1 else QuadraticField(self.radical)

    def sqrt_scalar(self, value: Fraction, fld):
        """sqrt(value) as a scalar of fld (must be registered beforehand)."""
        r, d = split_square(Fraction(value))
        if d == 1:
            return fld.coerce(r)
        return fld.coerce((Fraction(0), r))


def _gs_primitive(vectors):
    return [
        linalg.primitive_rational_vector(v) for v in linalg.gram_schmidt(QQ, vectors)
    ]


def _exact_normal_form(a, b, c, m1, m2) -> PencilNormalForm:
    a = [[Fraction(x) for x in row] for row in a]
    b = [[Fraction(x) for x in row] for row in b]
    c = [[Fraction(x) for x in row] for row in c]
    pool = _RadicalPool()
    gram = linalg.mat_mul(QQ, linalg.transpose(b), b)
    eigs = _rational_eigenvalues(gram)
    if eigs is None:
        raise _ExactPathUnavailable()

    # w-eigenbasis over QQ, zero eigenvalue first then ascending.
    w_raw: list[tuple[Fraction, list]] = []
    for lam in sorted(set(eigs)):
        for vec in _gs_primitive(linalg.eigenspace(QQ, gram, lam)):
            w_raw.append((lam, vec))
    r = sum(1 for lam, _ in w_raw if lam != 0)

    # Unnormalized range and null directions, all rational.
    pos = [(lam, vec) for lam, vec in w_raw if lam != 0]
    b_range = [linalg.mat_vec(QQ, b, vec) for _, vec in pos]
    c_range = [linalg.mat_vec(QQ, c, vec) for _, vec in pos]
    # <C w_i, C w_j> must match <B w_i, B w_j> = delta_ij lam_i |w_i|^2;
    # this is the alignment feasibility guaranteed for genuine pairs.
    for i in range(r):
        for j in range(i, r):
            want = (
                pos[i][0] * linalg.dot(QQ, pos[i][1], pos[i][1]) if i == j else Fraction(0)
            )
            if linalg.dot(QQ, c_range[i], c_range[j]) != want:
                raise PencilStructureError(
                    "B and C cannot be aligned to a common diagonal block"
                )
    if r:
        u_null_raw = _gs_primitive(linalg.kernel_basis(QQ, b_range))
    else:
        u_null_raw = [
            [Fraction(1) if i == j else Fraction(0) for j in range(m2)]
            for i in range(m2)
        ]
    v_null_raw = [linalg.mat_vec(QQ, linalg.transpose(a), u) for u in u_null_raw]
    for i in range(len(u_null_raw)):
        for j in range(i, len(u_null_raw)):
            want = linalg.dot(QQ, u_null_raw[i], u_null_raw[j]) if i == j else Fraction(0)
            if linalg.dot(QQ, v_null_raw[i], v_null_raw[j]) != want:
                raise PencilStructureError(
                    "the A-block does not act orthogonally on the null part"
                )
        for cr in c_range:
            if linalg.dot(QQ, v_null_raw[i], cr) != 0:
                raise PencilStructureError(
                    "null and range parts of the v-space are not orthogonal"
                )

    # Register all radicals: w and null-direction norms, range normalizers
    # lam |w|^2, the sigma values lam, and then lift everything at once.
    for _, vec in w_raw:
        pool.root(linalg.dot(QQ, vec, vec))
    for lam, vec in pos:
        pool.root(lam)
        pool.root(lam * linalg.dot(QQ, vec, vec))
    for u in u_null_raw:
        pool.root(linalg.dot(QQ, u, u))
    fld = pool.field()

    def unit(vec_qq, norm2):
        inv = fld.inv(pool.sqrt_scalar(norm2, fld))
        return [fld.mul(fld.coerce(x), inv) for x in vec_qq]

    w_cols = [unit(vec, linalg.dot(QQ, vec, vec)) for _, vec in w_raw]
    u_cols = [unit(u, linalg.dot(QQ, u, u)) for u in u_null_raw]
    v_cols = [unit(v, linalg.dot(QQ, v, v)) for v in v_null_raw]
    sigma = []
    for (lam, vec), br, cr in zip(pos, b_range, c_range):
        norm2 = lam * linalg.dot(QQ, vec, vec)
        u_cols.append(unit(br, norm2))
        v_cols.append(unit(cr, norm2))
        sigma.append(pool.sqrt_scalar(lam, fld))

    u_mat = _columns_to_matrix(u_cols)
    v_mat = _columns_to_matrix(v_cols)
    w_mat = _columns_to_matrix(w_cols)
    a_f = _lift(a, fld)
    a_rot = linalg.mat_mul(fld, linalg.transpose(u_mat), linalg.mat_mul(fld, a_f, v_mat))
    nr = m2 - r
    for i in range(m2):
        for j in range(m2):
            if i >= nr and j >= nr:
                continue
            want = fld.one if (i == j and i < nr) else fld.zero
            if not fld.is_zero(fld.sub(a_rot[i][j], want)):
                raise PencilStructureError("A does not split into diag(I, Delta)")
    delta = [[a_rot[nr + i][nr + j] for j in range(r)] for i in range(r)]
    for i in range(r):
        for j in range(r):
            if not fld.is_zero(fld.add(delta[i][j], delta[j][i])):
                raise PencilStructureError("residual A-block is not skew")

    f_params, rot = _skew_canonical_exact(fld, delta)
    if rot is not None:
        u_mat = _rotate_tail_columns(fld, u_mat, rot, nr)
        v_mat = _rotate_tail_columns(fld, v_mat, rot, nr)
        w_mat = _rotate_tail_columns(fld, w_mat, rot, m1 - r)
    for f_val in f_params:
        fl = fld.to_float(f_val)
        if not 0 < fl < 1:
            raise PencilStructureError(
                f"skew parameter {fl} lies outside (0, 1); "
                "not a genuine shape-operator pair"
            )
    form = PencilNormalForm(
        r=r,
        sigma=sigma,
        f=f_params,
        frames=(u_mat, v_mat, w_mat),
        exact=True,
        field=fld,
        m1=m1,
        m2=m2,
        _input_blocks=(a_f, _lift(b, fld), _lift(c, fld)),
    )
    return form


def _lift(mat, fld):
    if fld == QQ:
        return [[Fraction(x) for x in row] for row in mat]
    return [[fld.embed(Fraction(x), QQ) for x in row] for row in mat]


def _columns_to_matrix(cols):
    return [list(row) for row in zip(*cols)] if cols else []


def _rotate_tail_columns(fld, mat, rot, head):
    """Right-multiply the trailing columns of mat by the square matrix rot."""
    r = len(rot)
    if r == 0:
        return mat
    out = [list(row) for row in mat]
    for row in out:
        tail = row[head : head + r]
        for j in range(r):
            acc = fld.zero
            for k in range(r):
                acc = fld.add(acc, fld.mul(tail[k], rot[k][j]))
            row[head + j] = acc
    return out


def _skew_canonical_exact(fld, delta):
    """Pair a skew matrix into diag(0, Theta_{f_1}, Theta_{f_2}, ...) blocks.

    Returns (f parameters ascending, rotation matrix or None when empty).
    The pairing needs rational eigenvalues of Delta^T Delta and rational
    eigenvector geometry; anything else defers to the floating path.
    """
    r = len(delta)
    if r == 0:
        return [], None
    if fld != QQ:
        # Delta may live in a quadratic extension; only the rational case
        # keeps the eigenvalue search exact.
        if any(not fld.is_zero(fld.sub(x, fld.coerce(_rational_part(x)))) for row in delta for x in row):
            raise _ExactPathUnavailable()
        delta_q = [[Fraction(_rational_part(x)) for x in row] for row in delta]
    else:
        delta_q = [[Fraction(x) for x in row] for row in delta]
    gram = linalg.mat_mul(QQ, linalg.transpose(delta_q), delta_q)
    eigs = _rational_eigenvalues(gram)
    if eigs is None:
        raise _ExactPathUnavailable()
    cols: list[list] = []
    f_params = []
    for lam in sorted(set(eigs)):
        basis = _gs_primitive(linalg.eigenspace(QQ, gram, lam))
        if lam == 0:
            for vec in basis:
                cols.append(_unit_rational(fld, vec))
            continue
        f_r, f_d = split_square(Fraction(lam))
        # f = f_r sqrt(f_d); b2 = -Delta b1 / f must stay inside fld.
        if f_d != 1 and f_d != getattr(fld, "d", None):
            raise _ExactPathUnavailable()
        f_val = fld.coerce(f_r) if f_d == 1 else fld.mul(
            fld.coerce(f_r), fld.coerce((Fraction(0), Fraction(1)))
        )
        work = [[Fraction(x) for x in vec] for vec in basis]
        while work:
            b1_raw = work.pop(0)
            b1 = _unit_rational(fld, b1_raw)
            db1 = linalg.mat_vec(fld, _lift(delta_q, fld), b1)
            inv_f = fld.inv(f_val)
            b2 = [fld.neg(fld.mul(x, inv_f)) for x in db1]
            cols.append(b1)
            cols.append(b2)
            f_params.append(f_val)
            # project the remaining eigenspace off the chosen plane, exactly
            if f_d == 1:
                b2_q = [Fraction(_rational_part(x)) for x in b2] if fld != QQ else b2
                remaining = []
                for vec in work:
                    proj1 = linalg.dot(QQ, vec, b1_raw)
                    n1 = linalg.dot(QQ, b1_raw, b1_raw)
                    v1 = [x - proj1 * y / n1 for x, y in zip(vec, b1_raw)]
                    proj2 = sum(Fraction(x) * Fraction(y) for x, y in zip(v1, b2_q))
                    v2 = [x - proj2 * y for x, y in zip(v1, b2_q)]
                    v2 = linalg.primitive_rational_vector([Fraction(x) for x in v2])
                    if any(x != 0 for x in v2):
                        remaining.append(v2)
                work = remaining
            elif work:
                # irrational f with a multi-dimensional eigenspace: defer
                raise _ExactPathUnavailable()
    if len(cols) != r:
        raise _ExactPathUnavailable()
    return f_params, _columns_to_matrix(cols)


def _unit_rational(fld, vec_qq):
    norm2 = linalg.dot(QQ, [Fraction(x) for x in vec_qq], [Fraction(x) for x in vec_qq])
    r, d = split_square(Fraction(norm2))
    if d == 1:
        return [fld.coerce(Fraction(x) / r) for x in vec_qq]
    if d != getattr(fld, "d", None):
        raise _ExactPathUnavailable()
    inv = fld.inv(fld.coerce((Fraction(0), r)))
    return [fld.mul(fld.coerce(Fraction(x)), inv) for x in vec_qq]


def _rational_part(x):
    return x[0] if isinstance(x, tuple) else x


# ---------------------------------------------------------------------------
# floating path
# ---------------------------------------------------------------------------


def _float_normal_form(a, b, c, m1, m2) -> PencilNormalForm:
    a = a.reshape(m2, m2)
    b = b.reshape(m2, m1)
    c = c.reshape(m2, m1)
    u_b, s_b, wt_b = np.linalg.svd(b)
    r = int(np.sum(s_b > RANK_TOL))
    # w-columns: null part first, then singular values ascending.
    null_idx = list(range(m1 - 1, r - 1, -1))
    range_idx = list(range(r - 1, -1, -1))
    w_mat = wt_b.T[:, null_idx + range_idx]
    sigma = [float(s_b[i]) for i in range_idx]
    u_range = [b @ w_mat[:, m1 - r + j] / sigma[j] for j in range(r)]
    v_range = [c @ w_mat[:, m1 - r + j] / sigma[j] for j in range(r)]
    for colset in (u_range, v_range):
        for i in range(r):
            for j in range(i, r):
                want = 1.0 if i == j else 0.0
                if abs(float(np.dot(colset[i], colset[j])) - want) > 1e-7:
                    raise PencilStructureError(
                        "B and C cannot be aligned to a common diagonal block"
                    )
    u_null = _complement(np.column_stack(u_range) if r else None, m2)
    v_null = a.T @ u_null
    if v_null.size:
        gram = v_null.T @ v_null
        if np.max(np.abs(gram - np.eye(gram.shape[0]))) > 1e-7:
            raise PencilStructureError(
                "the A-block does not act orthogonally on the null part"
            )
    u_mat = np.column_stack([u_null] + u_range) if r else u_null
    v_mat = np.column_stack([v_null] + v_range) if r else v_null
    a_rot = u_mat.T @ a @ v_mat
    nr = m2 - r
    if nr and np.max(np.abs(a_rot[:nr, :nr] - np.eye(nr))) > 1e-7:
        raise PencilStructureError("A does not split into diag(I, Delta)")
    if nr and r:
        off = max(float(np.max(np.abs(a_rot[:nr, nr:]))), float(np.max(np.abs(a_rot[nr:, :nr]))))
        if off > 1e-7:
            raise PencilStructureError("A has off-diagonal coupling blocks")
    delta = a_rot[nr:, nr:]
    if r and np.max(np.abs(delta + delta.T)) > 1e-7:
        raise PencilStructureError("residual A-block is not skew")
    f_params, rot = _skew_canonical_float(delta)
    if rot is not None:
        u_mat = u_mat.copy()
        v_mat = v_mat.copy()
        w_mat = w_mat.copy()
        u_mat[:, nr:] = u_mat[:, nr:] @ rot
        v_mat[:, nr:] = v_mat[:, nr:] @ rot
        w_mat[:, m1 - r :] = w_mat[:, m1 - r :] @ rot
    for f_val in f_params:
        if not 0 < f_val < 1:
            raise PencilStructureError(
                f"skew parameter {f_val} lies outside (0, 1); "
                "not a genuine shape-operator pair"
            )
    return PencilNormalForm(
        r=r,
        sigma=sigma,
        f=f_params,
        frames=(u_mat, v_mat, w_mat),
        exact=False,
        field=None,
        m1=m1,
        m2=m2,
        _input_blocks=(a, b, c),
    )


def _complement(cols, dim):
    if cols is None or cols.size == 0:
        return np.eye(dim)
    q, _ = np.linalg.qr(cols, mode="complete")
    return q[:, cols.shape[1] :]


def _skew_canonical_float(delta):
    r = delta.shape[0]
    if r == 0:
        return [], None
    gram = delta.T @ delta
    eigvals, eigvecs = np.linalg.eigh(gram)
    cols = []
    f_params = []
    i = 0
    while i < r:
        lam = eigvals[i]
        if lam < RANK_TOL:
            vec = eigvecs[:, i]
            for u in cols:
                vec = vec - np.dot(vec, u) * u
            cols.append(vec / np.linalg.norm(vec))
            i += 1
            continue
        # gather the whole (numerically) equal-eigenvalue group
        j = i
        group = []
        while j < r and abs(eigvals[j] - lam) < 1e-8:
            group.append(eigvecs[:, j])
            j += 1
        f_val = float(np.sqrt(np.mean(eigvals[i:j])))
        while group:
            b1 = group.pop(0)
            for u in cols:
                b1 = b1 - np.dot(b1, u) * u
            norm = np.linalg.norm(b1)
            if norm < 1e-8:
                continue
            b1 /= norm
            b2 = -delta @ b1 / f_val
            cols.append(b1)
            cols.append(b2)
            f_params.append(f_val)
            group = [
                g - np.dot(g, b1) * b1 - np.dot(g, b2) * b2 for g in group
            ]
            group = [g for g in group if np.linalg.norm(g) > 1e-8]
        i = j
    if len(cols) != r:
        raise PencilStructureError("skew block pairing failed")
    return f_params, np.column_stack(cols)


# ---------------------------------------------------------------------------
# pencil kernels and the singular stratification
# ---------------------------------------------------------------------------


def pencil_kernel_dimension(frame: FocalFrame, coefficients) -> int:
    """Kernel dimension of sum_i c_i S_{n_i}.

    Exact over the Gaussian rationals when the frame is rational and every
    coefficient is exact (int, Fraction, or an (re, im) pair of them);
    otherwise floating SVD with rank tolerance 1e-8.
    """
    coeffs = list(coefficients)
    if not coeffs or len(coeffs) > frame.m1 + 1:
        raise ValueError("need between 1 and m1+1 coefficients")
    mats = shape_operators(frame)[: len(coeffs)]
    n = frame.tangent_dim
    if frame.field == QQ and all(_is_exact_scalar(c) for c in coeffs):
        g = GAUSSIAN
        cs = [_to_gaussian(c) for c in coeffs]
        if all(g.is_zero(x) for x in cs):
            raise ValueError("coefficient vector must be nonzero")
        acc = [[g.zero] * n for _ in range(n)]
        for cval, mat in zip(cs, mats):
            if g.is_zero(cval):
                continue
            for i in range(n):
                for j in range(n):
                    acc[i][j] = g.add(acc[i][j], g.mul(cval, (mat[i][j], Fraction(0))))
        return n - linalg.rank(g, acc)
    fld = frame.field
    acc = np.zeros((n, n), dtype=complex)
    for cval, mat in zip(coeffs, mats):
        acc += _to_complex_scalar(cval) * np.array(
            [[fld.to_float(x) for x in row] for row in mat]
        )
    if not np.any(np.abs(acc) > 0):
        raise ValueError("coefficient vector must be nonzero")
    s = np.linalg.svd(acc, compute_uv=False)
    return int(np.sum(s <= RANK_TOL))


def _is_exact_scalar(c):
    if isinstance(c, (int, Fraction)):
        return True
    return (
        isinstance(c, tuple)
        and len(c) == 2
        and all(isinstance(x, (int, Fraction)) for x in c)
    )


def _to_gaussian(c):
    if isinstance(c, tuple):
        return (Fraction(c[0]), Fraction(c[1]))
    return (Fraction(c), Fraction(0))


def _to_complex_scalar(c):
    if isinstance(c, tuple):
        return complex(float(Fraction(c[0])), float(Fraction(c[1])))
    return complex(c)


@dataclass
class StratificationReport:
    k: int
    samples: int
    generic_count: int
    nongeneric_samples: int
    r_histogram: dict
    violations: list

    @property
    def generic_fraction(self) -> float:
        return self.generic_count / self.samples if self.samples else 0.0

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "samples": self.samples,
            "generic_count": self.generic_count,
            "nongeneric_samples": self.nongeneric_samples,
            "r_histogram": {str(key): val for key, val in sorted(self.r_histogram.items())},
            "violations": self.violations,
        }


def sample_singular_stratification(
    frame: FocalFrame,
    k: int,
    samples: int,
    seed: int,
    nongeneric_samples: int | None = None,
) -> StratificationReport:
    """Sample the singular varieties of the pencil through k+1 normals.

    Uniform points of CP^k estimate the generic fraction (kernel dimension
    m1); the exceptional branch tau = +-i is sampled deliberately, recording
    the histogram of the rank invariant r, and every sampled kernel dimension
    is checked against {m1, m1 + m2 - r}.  Deterministic for a fixed seed.
    """
    if k > frame.m1:
        raise ValueError("stage k exceeds m1")
    if k < 0:
        raise ValueError("negative stage")
    if nongeneric_samples is None:
        nongeneric_samples = min(samples, 100)
    rng = np.random.default_rng(seed)
    m1, m2 = frame.m1, frame.m2
    fld = frame.field
    mats = [
        np.array([[fld.to_float(x) for x in row] for row in s])
        for s in shape_operators(frame)[: k + 1]
    ]
    generic = 0
    violations: list[dict] = []
    hist: dict[int, int] = {}
    for idx in range(samples):
        c = rng.normal(size=k + 1) + 1j * rng.normal(size=k + 1)
        c /= np.linalg.norm(c)
        dim = _kernel_dim_float(mats, c)
        if dim == m1:
            generic += 1
            continue
        ok, r = _dimension_law_check(mats, c, dim, m1, m2)
        if not ok:
            violations.append({"sample": idx, "dim": dim, "r": r})
    branch_count = nongeneric_samples if k >= 1 else 0
    for idx in range(branch_count):
        e0, e1 = _random_orthonormal_pair(rng, k + 1)
        c = e1 - 1j * e0  # the pencil S_{e1} - i S_{e0}
        dim = _kernel_dim_float(mats, c)
        r = _pair_rank(mats, e0, e1, m1, m2)
        hist[r] = hist.get(r, 0) + 1
        if dim not in (m1, m1 + m2 - r):
            violations.append({"branch_sample": idx, "dim": dim, "r": r})
    return StratificationReport(
        k=k,
        samples=samples,
        generic_count=generic,
        nongeneric_samples=branch_count,
        r_histogram=hist,
        violations=violations,
    )


def _kernel_dim_float(mats, c) -> int:
    acc = sum(ci * m for ci, m in zip(c, mats))
    s = np.linalg.svd(acc, compute_uv=False)
    return int(np.sum(s <= RANK_TOL))


def _random_orthonormal_pair(rng, dim):
    e0 = rng.normal(size=dim)
    e0 /= np.linalg.norm(e0)
    while True:
        e1 = rng.normal(size=dim)
        e1 -= np.dot(e1, e0) * e0
        norm = np.linalg.norm(e1)
        if norm > 1e-9:
            return e0, e1 / norm


def _pair_rank(mats, a_coeffs, b_coeffs, m1, m2) -> int:
    """Rank of the u-w block of S_b in the adapted eigenbasis of S_a."""
    s_a = sum(ci * m for ci, m in zip(a_coeffs, mats))
    s_b = sum(ci * m for ci, m in zip(b_coeffs, mats))
    eigvals, eigvecs = np.linalg.eigh(s_a)
    u_cols = [eigvecs[:, i] for i in range(len(eigvals)) if abs(eigvals[i] - 1) < 1e-6]
    w_cols = [eigvecs[:, i] for i in range(len(eigvals)) if abs(eigvals[i]) < 1e-6]
    if len(u_cols) != m2 or len(w_cols) != m1:
        raise PencilStructureError("rotated operator has unexpected spectrum")
    block = np.array([[u @ s_b @ w for w in w_cols] for u in u_cols])
    s = np.linalg.svd(block, compute_uv=False) if block.size else np.array([])
    return int(np.sum(s > RANK_TOL))


def _dimension_law_check(mats, c, dim, m1, m2):
    """For a sample with kernel dimension != m1, verify dim = m1 + m2 - r."""
    a = np.real(c)
    b = np.imag(c)
    if np.linalg.matrix_rank(np.array([a, b]), tol=1e-10) < 2:
        return dim == m1, None
    e0 = a / np.linalg.norm(a)
    e1 = b - np.dot(b, e0) * e0
    e1 /= np.linalg.norm(e1)
    r = _pair_rank(mats, e0, e1, m1, m2)
    return dim in (m1, m1 + m2 - r), r
