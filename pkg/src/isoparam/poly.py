"""Sparse multivariate polynomials over the exact fields.

A polynomial is a map from dense exponent tuples (one entry per variable) to
nonzero field scalars.  The zero polynomial has an empty term map.  Terms are
kept sorted in descending degrevlex order so printing and iteration are
deterministic.  Polynomials are immutable values: every operation returns a
fresh object and nothing mutates shared state.

The textual format is `coeff*x1^e1*...*xn^en` terms joined by `+`/`-`, with a
configurable variable alphabet (focal-manifold computations use u1..u_m2,
v1..v_m2, w1..w_m1).  print and parse round-trip exactly.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .fields import QQ, PrimeField, QuadraticField, RationalField

Exponent = tuple[int, ...]


def degrevlex_key(exp: Exponent):
    """Sort key realizing degrevlex: larger key = larger monomial."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


def lex_key(exp: Exponent):
    return exp


MONOMIAL_ORDERS = {"degrevlex": degrevlex_key, "lex": lex_key}


def monomial_mul(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Exponent, b: Exponent) -> bool:
    """True when monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def monomial_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


class Polynomial:
    """Immutable sparse polynomial with exact coefficients."""

    __slots__ = ("field", "arity", "terms")

    def __init__(self, field, arity: int, terms: dict[Exponent, object]):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        clean = {e: c for e, c in terms.items() if not field.is_zero(c)}
        ordered = dict(
            sorted(clean.items(), key=lambda item: degrevlex_key(item[0]), reverse=True)
        )
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", ordered)

    def __setattr__(self, *_):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(field, arity: int) -> "Polynomial":
        return Polynomial(field, arity, {})

    @staticmethod
    def constant(field, arity: int, value) -> "Polynomial":
        return Polynomial(field, arity, {(0,) * arity: field.coerce(value)})

    @staticmethod
    def variable(field, arity: int, index: int) -> "Polynomial":
        if not 0 <= index < arity:
            raise IndexError(f"variable index {index} out of range for arity {arity}")
        exp = [0] * arity
        exp[index] = 1
        return Polynomial(field, arity, {tuple(exp): field.one})

    @staticmethod
    def monomial(field, arity: int, exp: Exponent, coeff=1) -> "Polynomial":
        if len(exp) != arity:
            raise ValueError("exponent length does not match arity")
        return Polynomial(field, arity, {tuple(exp): field.coerce(coeff)})

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def homogeneous_degree(self) -> int | None:
        """Common total degree of all terms, or None (zero poly is homogeneous
        of every degree and also reports None)."""
        degs = {sum(e) for e in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def coefficient(self, exp: Exponent):
        return self.terms.get(tuple(exp), self.field.zero)

    def constant_term(self):
        return self.terms.get((0,) * self.arity, self.field.zero)

    def support_variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, v in enumerate(e) if v > 0)
        return used

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other: "Polynomial"):
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        f = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = f.add(out.get(e, f.zero), c)
            if f.is_zero(acc):
                out.pop(e, None)
            else:
                out[e] = acc
        return Polynomial(f, self.arity, out)

    def __neg__(self) -> "Polynomial":
        f = self.field
        return Polynomial(f, self.arity, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        f = self.field
        out: dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = monomial_mul(e1, e2)
                acc = f.add(out.get(e, f.zero), f.mul(c1, c2))
                if f.is_zero(acc):
                    out.pop(e, None)
                else:
                    out[e] = acc
        return Polynomial(f, self.arity, out)

    def scale(self, scalar) -> "Polynomial":
        f = self.field
        s = f.coerce(scalar)
        if f.is_zero(s):
            return Polynomial.zero(f, self.arity)
        return Polynomial(f, self.arity, {e: f.mul(c, s) for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(self.field, self.arity, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.field == other.field
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field, self.arity, frozenset(self.terms.items())))

    # -- calculus and evaluation ----------------------------------------------

    def differentiate(self, var_index: int) -> "Polynomial":
        """Exact formal partial derivative with respect to one variable."""
        if not 0 <= var_index < self.arity:
            raise IndexError(f"variable index {var_index} out of range")
        f = self.field
        out: dict[Exponent, object] = {}
        for e, c in self.terms.items():
            k = e[var_index]
            if k == 0:
                continue
            e2 = list(e)
            e2[var_index] = k - 1
            out[tuple(e2)] = f.mul(c, f.coerce(k))
        return Polynomial(f, self.arity, out)

    def evaluate(self, point):
        """Exact value at a point given as a sequence of field scalars."""
        if len(point) != self.arity:
            raise ValueError(f"point length {len(point)} != arity {self.arity}")
        f = self.field
        pt = [f.coerce(x) for x in point]
        acc = f.zero
        for e, c in self.terms.items():
            val = c
            for i, k in enumerate(e):
                for _ in range(k):
                    val = f.mul(val, pt[i])
            acc = f.add(acc, val)
        return acc

    def substitute(self, images: list["Polynomial"]) -> "Polynomial":
        """Ring morphism sending variable i to images[i]."""
        if len(images) != self.arity:
            raise ValueError("need one image polynomial per variable")
        if not images:
            raise ValueError("substitute needs positive arity")
        f = images[0].field
        arity = images[0].arity
        for g in images:
            if g.field != f or g.arity != arity:
                raise ValueError("images must share field and arity")
        acc = Polynomial.zero(f, arity)
        # Cache powers of each image; degrees stay small in all uses here.
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, k: int) -> Polynomial:
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] ** k
            return powers[key]

        for e, c in self.terms.items():
            cc = c if f == self.field else f.embed(c, self.field)
            term = Polynomial.constant(f, arity, cc)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            acc = acc + term
        return acc

    def multidegree(self, blocks: list[list[int]]) -> set[tuple[int, ...]]:
        """Set of per-block degree tuples over the terms of the polynomial.

        blocks must partition range(arity).
        """
        seen = sorted(i for block in blocks for i in block)
        if seen != list(range(self.arity)):
            raise ValueError("blocks must partition the variable index set")
        out = set()
        for e in self.terms:
            out.add(tuple(sum(e[i] for i in block) for block in blocks))
        return out

    def map_coefficients(self, target_field):
        """Reinterpret the polynomial over another field via field.embed."""
        out = {}
        for e, c in self.terms.items():
            out[e] = target_field.embed(c, self.field)
        return Polynomial(target_field, self.arity, out)

    # -- printing and parsing --------------------------------------------------

    def to_str(self, names: list[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or default_names(self.arity)
        if len(names) != self.arity:
            raise ValueError("need one name per variable")
        f = self.field
        pieces = []
        for e, c in self.terms.items():
            mono = "*".join(
                f"{names[i]}^{k}" if k > 1 else names[i] for i, k in enumerate(e) if k
            )
            cs = f.to_str(c)
            neg = cs.startswith("-") and not cs.startswith("-(")
            mag = cs[1:] if neg else cs
            if mono:
                body = mono if mag == "1" else f"{mag}*{mono}"
            else:
                body = mag
            if not pieces:
                pieces.append(f"-{body}" if neg else body)
            else:
                pieces.append(f" - {body}" if neg else f" + {body}")
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({self.to_str()})"

    @staticmethod
    def parse(text: str, field, names: list[str]) -> "Polynomial":
        """Parse the textual polynomial format produced by to_str."""
        arity = len(names)
        index = {n: i for i, n in enumerate(names)}
        out: dict[Exponent, object] = {}
        for sign, chunk in _split_terms(text):
            exp = [0] * arity
            coeff = field.one
            saw_coeff = False
            for factor in _split_factors(chunk):
                base, _, pow_s = factor.partition("^")
                base = base.strip()
                if base in index:
                    exp[index[base]] += int(pow_s) if pow_s else 1
                else:
                    if saw_coeff:
                        coeff = field.mul(coeff, field.parse(factor))
                    else:
                        coeff = field.parse(factor)
                        saw_coeff = True
            if sign < 0:
                coeff = field.neg(coeff)
            e = tuple(exp)
            acc = field.add(out.get(e, field.zero), coeff)
            if field.is_zero(acc):
                out.pop(e, None)
            else:
                out[e] = acc
        return Polynomial(field, arity, out)


def _split_terms(text: str):
    """Yield (sign, chunk) for top-level +/- separated terms."""
    text = text.strip()
    if not text or text == "0":
        return
    chunks = []
    depth = 0
    sign = 1
    cur = []
    i = 0
    if text[0] == "+":
        i = 1
    elif text[0] == "-":
        sign = -1
        i = 1
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0:
            chunks.append((sign, "".join(cur).strip()))
            sign = 1 if ch == "+" else -1
            cur = []
        else:
            cur.append(ch)
        i += 1
    chunks.append((sign, "".join(cur).strip()))
    yield from chunks


def _split_factors(chunk: str):
    """Split a term on top-level '*' characters."""
    depth = 0
    cur = []
    out = []
    for ch in chunk:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur).strip())
    # Recombine pieces like 'sqrt(2)' that carry no variable: the scalar parser
    # sees them whole because parentheses kept the split at top level only.
    return [p for p in out if p]


def default_names(arity: int) -> list[str]:
    return [f"x{i + 1}" for i in range(arity)]


def focal_names(m1: int, m2: int) -> list[str]:
    """Variable alphabet u1..u_m2, v1..v_m2, w1..w_m1 used on focal manifolds."""
    return (
        [f"u{i + 1}" for i in range(m2)]
        + [f"v{i + 1}" for i in range(m2)]
        + [f"w{i + 1}" for i in range(m1)]
    )


def euler_pairing(p: Polynomial) -> Polynomial:
    """Sum_i x_i * dp/dx_i; equals deg(p) * p exactly for homogeneous p."""
    acc = Polynomial.zero(p.field, p.arity)
    for i in range(p.arity):
        acc = acc + Polynomial.variable(p.field, p.arity, i) * p.differentiate(i)
    return acc


class PolyMatrix:
    """Rectangular matrix of polynomials over a shared field and arity."""

    def __init__(self, entries: list[list[Polynomial]]):
        if not entries or not entries[0]:
            raise ValueError("PolyMatrix needs at least one entry")
        field = entries[0][0].field
        arity = entries[0][0].arity
        width = len(entries[0])
        for row in entries:
            if len(row) != width:
                raise ValueError("ragged rows")
            for p in row:
                if p.field != field or p.arity != arity:
                    raise ValueError("entries must share field and arity")
        self.entries = [list(row) for row in entries]
        self.field = field
        self.arity = arity
        self.rows = len(entries)
        self.cols = width

    @staticmethod
    def jacobian(polys: list[Polynomial]) -> "PolyMatrix":
        if not polys:
            raise ValueError("jacobian of an empty list")
        return PolyMatrix(
            [[p.differentiate(j) for j in range(p.arity)] for p in polys]
        )

    def determinant(self) -> Polynomial:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return self._det(tuple(range(self.rows)), tuple(range(self.cols)), {})

    def _det(self, rows, cols, cache) -> Polynomial:
        if len(rows) == 1:
            return self.entries[rows[0]][cols[0]]
        key = (rows, cols)
        if key in cache:
            return cache[key]
        acc = Polynomial.zero(self.field, self.arity)
        r0 = rows[0]
        rest = rows[1:]
        for k, c in enumerate(cols):
            entry = self.entries[r0][c]
            if entry.is_zero():
                continue
            sub = self._det(rest, cols[:k] + cols[k + 1 :], cache)
            term = entry * sub
            acc = acc + term if k % 2 == 0 else acc - term
        cache[key] = acc
        return acc

    def minors(self, size: int, cap: int | None = 100_000) -> list[Polynomial]:
        """All size x size minors, row-major over index combinations."""
        if size < 1 or size > min(self.rows, self.cols):
            raise ValueError(f"minor size {size} out of range")
        from math import comb

        count = comb(self.rows, size) * comb(self.cols, size)
        if cap is not None and count > cap:
            raise ValueError(
                f"{count} minors exceed the cap of {cap}; pass cap=None to override"
            )
        out = []
        for rs in combinations(range(self.rows), size):
            for cs in combinations(range(self.cols), size):
                sub = PolyMatrix([[self.entries[r][c] for c in cs] for r in rs])
                out.append(sub.determinant())
        return out


def inner_product_form(field, arity: int) -> Polynomial:
    """The quadratic form <x, x> = sum of squares in the given arity."""
    terms = {}
    for i in range(arity):
        e = [0] * arity
        e[i] = 2
        terms[tuple(e)] = field.one
    return Polynomial(field, arity, terms)


def quadratic_form(matrix, field=QQ) -> Polynomial:
    """<A x, x> as a polynomial, for a square matrix of field scalars."""
    n = len(matrix)
    terms: dict[Exponent, object] = {}
    for r in range(n):
        for c in range(n):
            a = field.coerce(matrix[r][c])
            if field.is_zero(a):
                continue
            e = [0] * n
            e[r] += 1
            e[c] += 1
            e = tuple(e)
            acc = field.add(terms.get(e, field.zero), a)
            if field.is_zero(acc):
                terms.pop(e, None)
            else:
                terms[e] = acc
    return Polynomial(field, n, terms)
