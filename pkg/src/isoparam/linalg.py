"""Exact dense linear algebra over the coefficient fields.

Matrices are plain list-of-list values of field scalars and vectors are
lists; every function takes the field explicitly.  All eliminations use
deterministic pivoting (first nonzero entry in row-major scan), so ranks,
kernels, and echelon forms are reproducible bit-for-bit.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .fields import QQ
from .poly import Polynomial


def coerce_matrix(field, rows):
    return [[field.coerce(x) for x in row] for row in rows]


def identity_matrix(field, n: int):
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def zero_matrix(field, rows: int, cols: int):
    return [[field.zero] * cols for _ in range(rows)]


def transpose(m):
    return [list(col) for col in zip(*m)]


def mat_mul(field, a, b):
    bt = transpose(b)
    return [[dot(field, row, col) for col in bt] for row in a]


def mat_vec(field, a, v):
    return [dot(field, row, v) for row in a]


def mat_add(field, a, b):
    return [[field.add(x, y) for x, y in zip(r1, r2)] for r1, r2 in zip(a, b)]

def mat_sub(field, a, b):
    return [[field.sub(x, y) for x, y in zip(r1, r2)] for r1, r2 in zip(a, b)]


def mat_scale(field, a, s):
    return [[field.mul(x, s) for x in row] for row in a]


def dot(field, u, v):
    acc = field.zero
    for x, y in zip(u, v):
        acc = field.add(acc, field.mul(x, y))
    return acc


def vec_add(field, u, v):
    return [field.add(x, y) for x, y in zip(u, v)]


def vec_sub(field, u, v):
    return [field.sub(x, y) for x, y in zip(u, v)]


def vec_scale(field, u, s):
    return [field.mul(x, s) for x in u]


def trace(field, a):
    acc = field.zero
    for i in range(len(a)):
        acc = field.add(acc, a[i][i])
    return acc


def outer(field, u, v):
    return [[field.mul(x, y) for y in v] for x in u]


def rref(field, m):
    """Reduced row echelon form. Returns (matrix, pivot_columns)."""
    m = [list(row) for row in m]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if not field.is_zero(m[i][c]):
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.mul(x, inv) for x in m[r]]
        for i in range(rows):
            if i != r and not field.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(field, m) -> int:
    if not m:
        return 0
    return len(rref(field, m)[1])


def kernel_basis(field, m):
    """Basis of the right kernel {v : M v = 0}, one vector per free column."""
    if not m:
        return []
    cols = len(m[0])
    red, pivots = rref(field, m)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [field.zero] * cols
        v[fc] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(red[r][fc])
        basis.append(v)
    return basis


def solve(field, a, b):
    """One solution of A x = b with free variables set to zero, or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    red, pivots = rref(field, aug)
    if cols in pivots:
        return None
    x = [field.zero] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def invert(field, a):
    n = len(a)
    aug = [list(a[i]) + identity_matrix(field, n)[i] for i in range(n)]
    red, pivots = rref(field, aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]


def charpoly(field, a) -> Polynomial:
    """Characteristic polynomial det(tI - A) via Faddeev-LeVerrier.

    Needs characteristic 0 or > n; returned as a univariate Polynomial in t.
    """
    n = len(a)
    if field.characteristic and field.characteristic <= n:
        raise ValueError("field characteristic too small for Faddeev-LeVerrier")
    coeffs = {(n,): field.one}
    m = identity_matrix(field, n)
    c = field.one
    for k in range(1, n + 1):
        am = mat_mul(field, a, m)
        c = field.neg(field.div(trace(field, am), field.coerce(k)))
        if not field.is_zero(c):
            coeffs[(n - k,)] = c
        m = mat_add(field, am, mat_scale(field, identity_matrix(field, n), c))
    return Polynomial(field, 1, coeffs)


def eigenspace(field, a, eigenvalue):
    lam = field.coerce(eigenvalue)
    shifted = [
        [field.sub(a[i][j], lam) if i == j else a[i][j] for j in range(len(a))]
        for i in range(len(a))
    ]
    return kernel_basis(field, shifted)


def gram_schmidt(field, vectors):
    """Orthogonalize (no normalization) against the standard inner product."""
    out = []
    for v in vectors:
        w = list(v)
        for u in out:
            uu = dot(field, u, u)
            uv = dot(field, u, w)
            if field.is_zero(uu):
                raise ZeroDivisionError("degenerate vector in gram_schmidt")
            coef = field.div(uv, uu)
            w = [field.sub(x, field.mul(coef, y)) for x, y in zip(w, u)]
        if any(not field.is_zero(x) for x in w):
            out.append(w)
    return out


def primitive_rational_vector(v: list[Fraction]) -> list[Fraction]:
    """Scale a rational vector to coprime integers with positive leading sign."""
    denoms = 1
    for x in v:
        denoms = denoms * x.denominator // gcd(denoms, x.denominator)
    ints = [int(x * denoms) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return [Fraction(0)] * len(v)
    ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return [Fraction(x) for x in ints]


def stack(matrices):
    out = []
    for m in matrices:
        out.extend(list(row) for row in m)
    return out


def to_float_matrix(field, a):
    return [[field.to_float(x) for x in row] for row in a]
