"""Clifford systems and the FKM Cartan-Munzner quartic.

A Clifford system is a tuple P_0, ..., P_m of symmetric involutions on
R^{2l} with P_i P_j + P_j P_i = 2 delta_ij I.  The builder realizes the
standard construction: pick skew-symmetric l x l matrices E_1, ..., E_{m-1}
with E_i E_j + E_j E_i = -2 delta_ij I and set

    P_0 = diag(I, -I),   P_1 = antidiag(I, I),   P_{1+i} = antidiag(E_i, -E_i).

The E_i come from left multiplication by imaginary basis units in the
Cayley-Dickson algebras (complex numbers, quaternions, octonions), computed
programmatically so every entry lands in {-1, 0, 1} and anticommutation is
exact by construction.  The constructor re-verifies all invariants anyway;
a failure there signals a genuine bug, not bad input.

The associated quartic is F(x) = <x,x>^2 - 2 sum_i <P_i x, x>^2, expanded to
canonical sparse form over the rationals.  For a valid system it satisfies
the two Cartan-Munzner equations for four principal curvatures:

    |grad F|^2 = 16 <x,x>^3        and        Lap F = 8 (m2 - m1) <x,x>,

with multiplicities (m1, m2) = (m, l - m - 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .fields import QQ
from .poly import Polynomial, inner_product_form, quadratic_form

# Dimension of the irreducible module for a system of m-1 anticommuting
# complex structures (index by m = number of generators + 1).
IRREDUCIBLE_DIMENSION = {1: 1, 2: 2, 3: 4, 4: 4, 5: 8, 6: 8, 7: 8, 8: 8}


def _cayley_dickson_product(a: list[int], b: list[int]) -> list[int]:
    """Multiply in the 2^k-dimensional Cayley-Dickson algebra over Z."""
    n = len(a)
    if n == 1:
        return [a[0] * b[0]]
    h = n // 2
    a1, a2 = a[:h], a[h:]
    b1, b2 = b[:h], b[h:]
    conj = _cayley_dickson_conj
    # (a1, a2)(b1, b2) = (a1 b1 - conj(b2) a2, b2 a1 + a2 conj(b1))
    p = _cayley_dickson_product
    left = [x - y for x, y in zip(p(a1, b1), p(conj(b2), a2))]
    right = [x + y for x, y in zip(p(b2, a1), p(a2, conj(b1)))]
    return left + right


def _cayley_dickson_conj(a: list[int]) -> list[int]:
    return [a[0]] + [-x for x in a[1:]]


def _left_multiplication_matrix(dim: int, unit_index: int) -> list[list[int]]:
    """Matrix of x -> e_unit * x in the Cayley-Dickson algebra of size dim."""
    cols = []
    e = [0] * dim
    e[unit_index] = 1
    for c in range(dim):
        basis = [0] * dim
        basis[c] = 1
        cols.append(_cayley_dickson_product(e, basis))
    return [[cols[c][r] for c in range(dim)] for r in range(dim)]


def clifford_generators(count: int, l: int) -> list[list[list[Fraction]]]:
    """count anticommuting skew complex structures on R^l, entries in {-1,0,1}.

    l must be a multiple of the minimal module dimension; generators act
    block-diagonally on each minimal block.
    """
    if count == 0:
        return []
    delta = next(
        d for d in (1, 2, 4, 8) if count <= {1: 0, 2: 1, 4: 3, 8: 7}[d]
    )
    if l % delta != 0:
        raise ValueError(f"l = {l} is not a multiple of the block size {delta}")
    blocks = l // delta
    gens = []
    for i in range(1, count + 1):
        small = _left_multiplication_matrix(delta, i)
        big = [[Fraction(0)] * l for _ in range(l)]
        for b in range(blocks):
            off = b * delta
            for r in range(delta):
                for c in range(delta):
                    big[off + r][off + c] = Fraction(small[r][c])
        gens.append(big)
    return gens


@dataclass(frozen=True)
class CliffordSystem:
    """Symmetric anticommuting involutions P_0..P_m on R^{2l}."""

    m: int
    l: int
    matrices: tuple  # tuple of 2l x 2l tuples of Fractions

    @property
    def m1(self) -> int:
        return self.m

    @property
    def m2(self) -> int:
        return self.l - self.m - 1

    @property
    def dim(self) -> int:
        return 2 * self.l

    def matrix(self, i: int) -> list[list[Fraction]]:
        return [list(row) for row in self.matrices[i]]

    def matrix_list(self) -> list[list[list[Fraction]]]:
        return [self.matrix(i) for i in range(self.m + 1)]


class CliffordSystemError(ValueError):
    pass


def _freeze(mat) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in mat)


def _check_system(matrices, dim: int):
    f = QQ
    ident = linalg.identity_matrix(f, dim)
    for i, p in enumerate(matrices):
        if len(p) != dim or any(len(row) != dim for row in p):
            raise CliffordSystemError(f"P_{i} is not {dim} x {dim}")
        if p != linalg.transpose(p):
            raise CliffordSystemError(f"P_{i} is not symmetric")
        if linalg.mat_mul(f, p, p) != ident:
            raise CliffordSystemError(f"P_{i} squared is not the identity")
    for i in range(len(matrices)):
        for j in range(i + 1, len(matrices)):
            anti = linalg.mat_add(
                f,
                linalg.mat_mul(f, matrices[i], matrices[j]),
                linalg.mat_mul(f, matrices[j], matrices[i]),
            )
            if any(any(x != 0 for x in row) for row in anti):
                raise CliffordSystemError(f"P_{i} and P_{j} do not anticommute")


def build_clifford_system(m: int, l: int) -> CliffordSystem:
    """Construct the standard Clifford system with multiplicities (m, l-m-1)."""
    if m not in IRREDUCIBLE_DIMENSION:
        raise CliffordSystemError(f"m = {m} is unsupported (need 1 <= m <= 8)")
    delta = IRREDUCIBLE_DIMENSION[m]
    if l <= 0 or l % delta != 0:
        raise CliffordSystemError(
            f"l = {l} must be a positive multiple of delta({m}) = {delta}"
        )
    if l - m - 1 <= 0:
        raise CliffordSystemError(
            f"(m, l) = ({m}, {l}) gives m2 = {l - m - 1} <= 0"
        )
    gens = clifford_generators(m - 1, l)
    zero = [[Fraction(0)] * l for _ in range(l)]
    ident = [[Fraction(1 if i == j else 0) for j in range(l)] for i in range(l)]
    neg_ident = [[-x for x in row] for row in ident]

    def blocks(tl, tr, bl, br):
        top = [tl[i] + tr[i] for i in range(l)]
        bottom = [bl[i] + br[i] for i in range(l)]
        return top + bottom

    mats = [blocks(ident, zero, zero, neg_ident), blocks(zero, ident, ident, zero)]
    for e in gens:
        neg_e = [[-x for x in row] for row in e]
        mats.append(blocks(zero, e, neg_e, zero))
    _check_system(mats, 2 * l)
    return CliffordSystem(m=m, l=l, matrices=tuple(_freeze(p) for p in mats))


def system_from_matrices(matrices) -> CliffordSystem:
    """Validate a user-supplied family of symmetric involutions."""
    if not matrices:
        raise CliffordSystemError("need at least one matrix")
    dim = len(matrices[0])
    if dim % 2 != 0:
        raise CliffordSystemError("ambient dimension must be even")
    coerced = [[[Fraction(x) for x in row] for row in p] for p in matrices]
    _check_system(coerced, dim)
    m = len(coerced) - 1
    l = dim // 2
    if l - m - 1 <= 0:
        raise CliffordSystemError(f"m2 = {l - m - 1} <= 0 for this family")
    return CliffordSystem(m=m, l=l, matrices=tuple(_freeze(p) for p in coerced))


def load_instance(source) -> CliffordSystem:
    """Instance definition: {"family":"fkm","m":..,"l":..} or {"matrices":[...]}.

    Matrix entries are exact rational literals given as strings like "3/4".
    Accepts a dict, a JSON string, or a path to a JSON file.
    """
    if isinstance(source, str):
        text = source
        if not text.lstrip().startswith("{"):
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        spec = json.loads(text)
    else:
        spec = source
    if "matrices" in spec:
        return system_from_matrices(spec["matrices"])
    if spec.get("family") == "fkm":
        return build_clifford_system(int(spec["m"]), int(spec["l"]))
    raise CliffordSystemError(f"unrecognized instance definition: {spec!r}")


@dataclass(frozen=True)
class CMQuartic:
    """A Cartan-Munzner candidate quartic plus the system it came from."""

    polynomial: Polynomial
    system: CliffordSystem


def fkm_polynomial(sys: CliffordSystem) -> CMQuartic:
    """F = <x,x>^2 - 2 sum_i <P_i x, x>^2 in 2l variables over QQ."""
    n = sys.dim
    r2 = inner_product_form(QQ, n)
    f = r2 * r2
    for i in range(sys.m + 1):
        qi = quadratic_form(sys.matrix(i), QQ)
        f = f - (qi * qi).scale(2)
    return CMQuartic(polynomial=f, system=sys)


@dataclass(frozen=True)
class CMReport:
    grad_ok: bool
    laplace_ok: bool
    c_value: Fraction | None
    c_expected: Fraction | None


def verify_cartan_munzner(q: CMQuartic | Polynomial, multiplicities=None) -> CMReport:
    """Check |grad F|^2 = 16 <x,x>^3 and Lap F = c <x,x> symbolically.

    c is recovered from the Laplacian when it is an exact multiple of <x,x>
    and compared against 8 (m2 - m1) when multiplicities are known.
    """
    if isinstance(q, CMQuartic):
        f = q.polynomial
        multiplicities = (q.system.m1, q.system.m2)
    else:
        f = q
    n = f.arity
    r2 = inner_product_form(QQ, n)
    grads = [f.differentiate(i) for i in range(n)]
    grad_sq = Polynomial.zero(QQ, n)
    for g in grads:
        grad_sq = grad_sq + g * g
    grad_ok = grad_sq == (r2 * r2 * r2).scale(16)

    lap = Polynomial.zero(QQ, n)
    for i, g in enumerate(grads):
        lap = lap + g.differentiate(i)
    c_value = None
    if lap.is_zero():
        c_value = Fraction(0)
        laplace_ok = True
    else:
        # Try c = ratio of matching coefficients, then verify exactly.
        lead = next(iter(r2.terms))
        c = lap.coefficient(lead)
        laplace_ok = c != 0 and lap == r2.scale(c)
        if laplace_ok:
            c_value = c
    c_expected = None
    if multiplicities is not None:
        m1, m2 = multiplicities
        c_expected = Fraction(8 * (m2 - m1))
        laplace_ok = laplace_ok and c_value == c_expected
    return CMReport(
        grad_ok=grad_ok, laplace_ok=laplace_ok, c_value=c_value, c_expected=c_expected
    )


def builtin_catalog() -> list[dict]:
    """Built-in (m, l) table with derived multiplicities."""
    out = []
    for m in range(1, 9):
        delta = IRREDUCIBLE_DIMENSION[m]
        l = delta
        while 2 * l <= 32:
            if l - m - 1 >= 1:
                out.append(
                    {
                        "family": "fkm",
                        "m": m,
                        "l": l,
                        "m1": m,
                        "m2": l - m - 1,
                        "delta": delta,
                        "ambient_dim": 2 * l,
                    }
                )
            l += delta
    return out
