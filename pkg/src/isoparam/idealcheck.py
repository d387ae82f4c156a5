"""Groebner bases, ideal dimension, and the executable regular-sequence and
primeness-dimension criteria.

The engine is a plain Buchberger loop with the normal pair-selection
strategy (smallest lcm degree first, degrevlex tiebreak), the coprime-head
and chain criteria for pair pruning, and full interreduction at the end, so
the returned basis is the reduced Groebner basis and is deterministic for a
fixed generator list.

Krull dimension of R/I comes from the leading-term ideal: it is the largest
cardinality of a set S of variables such that no leading monomial is
supported entirely inside S (computed by branch-and-bound over the leading
supports).  For homogeneous inputs this turns the regular-sequence property
into a dimension count: p_0..p_k is regular precisely when every stage
drops the dimension by one, i.e. dim V_k = n - k - 1.

The primeness-dimension criterion: if p_0..p_k is a homogeneous regular
sequence, V its zero set, and J the subvariety of V where the Jacobian of
p_0..p_k has rank < k+1, then dim(J) <= dim(V) - 2 forces the ideal to be
prime.  It is sufficient only; a false return is inconclusive.  Chaining it
with the induction "prime + regular + one more independent form stays
regular" yields the certificate pipeline at the bottom.

Ideals over the rationals are expensive; by default dimensions are computed
modulo the two primes 32003 and 65521 and must agree (a disagreement aborts
with a bad-prime warning).  Exact rational runs sit behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import linalg
from .fields import QQ, PrimeField
from .poly import (
    MONOMIAL_ORDERS,
    PolyMatrix,
    Polynomial,
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
)

DEFAULT_PRIMES = (32003, 65521)
DEFAULT_REDUCTION_BUDGET = 10_000_000


class GroebnerBudgetError(RuntimeError):
    """The reduction-step budget was exhausted."""


class BadPrimeError(RuntimeError):
    """Modular dimension computations disagree between primes."""


class HypothesisError(ValueError):
    """A criterion was invoked with its hypothesis violated."""


def leading_term(p: Polynomial, key):
    exp = max(p.terms, key=key)
    return exp, p.terms[exp]


def make_monic(p: Polynomial, key) -> Polynomial:
    _, c = leading_term(p, key)
    return p.scale(p.field.inv(c))


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise GroebnerBudgetError(
                f"reduction budget of {self.limit} steps exhausted"
            )


def reduce_poly(p: Polynomial, basis: list[Polynomial], key, budget=None) -> Polynomial:
    """Normal form of p modulo the basis (full multivariate division)."""
    f = p.field
    work = dict(p.terms)
    remainder: dict[tuple, object] = {}
    heads = [(leading_term(g, key)[0], leading_term(g, key)[1], g) for g in basis]
    while work:
        exp = max(work, key=key)
        coef = work.pop(exp)
        for hexp, hcoef, g in heads:
            if monomial_divides(hexp, exp):
                if budget is not None:
                    budget.spend()
                shift = monomial_div(exp, hexp)
                factor = f.div(coef, hcoef)
                for gexp, gcoef in g.terms.items():
                    tgt = monomial_mul(gexp, shift)
                    if tgt == exp:
                        continue
                    acc = f.sub(work.get(tgt, f.zero), f.mul(factor, gcoef))
                    if f.is_zero(acc):
                        work.pop(tgt, None)
                    else:
                        work[tgt] = acc
                break
        else:
            remainder[exp] = coef
    return Polynomial(f, p.arity, remainder)


def s_polynomial(g1: Polynomial, g2: Polynomial, key) -> Polynomial:
    f = g1.field
    e1, c1 = leading_term(g1, key)
    e2, c2 = leading_term(g2, key)
    lcm = monomial_lcm(e1, e2)
    m1 = Polynomial.monomial(f, g1.arity, monomial_div(lcm, e1), f.inv(c1))
    m2 = Polynomial.monomial(f, g2.arity, monomial_div(lcm, e2), f.inv(c2))
    return m1 * g1 - m2 * g2


@dataclass
class GroebnerBasis:
    generators: list[Polynomial]
    order: str
    field: object

    def reduce(self, p: Polynomial) -> Polynomial:
        return reduce_poly(p, self.generators, MONOMIAL_ORDERS[self.order])

    def contains(self, p: Polynomial) -> bool:
        return self.reduce(p).is_zero()

    def leading_exponents(self) -> list[tuple]:
        key = MONOMIAL_ORDERS[self.order]
        return [leading_term(g, key)[0] for g in self.generators]

    def is_unit_ideal(self) -> bool:
        return any(g.total_degree() == 0 and not g.is_zero() for g in self.generators)


def groebner(
    gens: list[Polynomial],
    order: str = "degrevlex",
    budget: int = DEFAULT_REDUCTION_BUDGET,
) -> GroebnerBasis:
    """Reduced Groebner basis by Buchberger's algorithm."""
    if not gens:
        raise ValueError("need at least one generator")
    key = MONOMIAL_ORDERS[order]
    field = gens[0].field
    arity = gens[0].arity
    for g in gens:
        if g.field != field or g.arity != arity:
            raise ValueError("generators must share field and arity")
    basis = [make_monic(g, key) for g in gens if not g.is_zero()]
    if not basis:
        return GroebnerBasis([Polynomial.zero(field, arity)], order, field)
    meter = _Budget(budget)

    def lcm_of(i, j):
        return monomial_lcm(heads[i], heads[j])

    heads = [leading_term(g, key)[0] for g in basis]
    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    while pairs:
        i, j = min(
            pairs, key=lambda ij: (sum(lcm_of(*ij)), key(lcm_of(*ij)), ij)
        )
        pairs.discard((i, j))
        lcm = lcm_of(i, j)
        if lcm == monomial_mul(heads[i], heads[j]):
            continue  # coprime heads reduce to zero
        if _chain_criterion(i, j, lcm, heads, pairs):
            continue
        s = s_polynomial(basis[i], basis[j], key)
        rem = reduce_poly(s, basis, key, meter)
        if rem.is_zero():
            continue
        rem = make_monic(rem, key)
        new_index = len(basis)
        basis.append(rem)
        heads.append(leading_term(rem, key)[0])
        for k in range(new_index):
            pairs.add((k, new_index))
    return GroebnerBasis(_reduce_basis(basis, key), order, field)


def _chain_criterion(i, j, lcm, heads, pairs) -> bool:
    for k in range(len(heads)):
        if k in (i, j):
            continue
        if not monomial_divides(heads[k], lcm):
            continue
        pair_ik = (min(i, k), max(i, k))
        pair_jk = (min(j, k), max(j, k))
        if pair_ik not in pairs and pair_jk not in pairs:
            return True
    return False


def _reduce_basis(basis: list[Polynomial], key) -> list[Polynomial]:
    # Minimalize: drop elements whose head is divisible by another head.
    heads = [leading_term(g, key)[0] for g in basis]
    keep = []
    for idx, h in enumerate(heads):
        if any(
            other != idx
            and monomial_divides(heads[other], h)
            and (heads[other] != h or other < idx)
            for other in range(len(basis))
        ):
            continue
        keep.append(idx)
    minimal = [basis[i] for i in keep]
    # Interreduce tails.
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        r = reduce_poly(g, others, key) if others else g
        if not r.is_zero():
            reduced.append(make_monic(r, key))
    reduced.sort(key=lambda g: key(leading_term(g, key)[0]), reverse=True)
    return reduced


# ---------------------------------------------------------------------------
# dimension of the leading-term ideal
# ---------------------------------------------------------------------------


def ideal_dimension(gb: GroebnerBasis) -> int:
    """Krull dimension of R/I from maximal independent variable sets.

    Returns -1 for the unit ideal (empty variety).
    """
    if gb.is_unit_ideal():
        return -1
    if all(g.is_zero() for g in gb.generators):
        return gb.generators[0].arity
    n = gb.generators[0].arity
    supports = sorted(
        {frozenset(i for i, e in enumerate(exp) if e) for exp in gb.leading_exponents()}
    , key=sorted)
    best = [0]
    _independent_search(supports, frozenset(), n, best, {})
    return best[0]


def _independent_search(supports, excluded, n, best, memo):
    """Branch over vertex covers of the support hypergraph: a set S of
    variables is independent iff S avoids >= 1 variable of every support."""
    if excluded in memo:
        return
    memo[excluded] = True
    active = [s for s in supports if not (s & excluded)]
    if not active:
        best[0] = max(best[0], n - len(excluded))
        return
    if n - len(excluded) <= best[0]:
        return  # cannot beat the current best
    s = min(active, key=lambda t: (len(t), sorted(t)))
    for var in sorted(s):
        _independent_search(supports, excluded | {var}, n, best, memo)


# ---------------------------------------------------------------------------
# regular sequences via stagewise codimension
# ---------------------------------------------------------------------------


@dataclass
class IdealReport:
    k: int
    dim_v: int
    dim_expected: int
    regular_so_far: bool
    dim_j: int | None = None
    primeness_criterion_ok: bool | None = None


def _check_homogeneous(ps: list[Polynomial]):
    if not ps:
        raise ValueError("empty polynomial list")
    for p in ps:
        if p.is_zero() or not p.is_homogeneous() or p.homogeneous_degree() == 0:
            raise ValueError(
                "inputs must be nonzero homogeneous polynomials of positive degree"
            )


def _to_modular(ps: list[Polynomial], prime: int) -> list[Polynomial]:
    field = PrimeField(prime)
    return [p.map_coefficients(field) for p in ps]


def staged_dimensions(
    ps: list[Polynomial],
    use_rationals: bool = False,
    primes=DEFAULT_PRIMES,
    order: str = "degrevlex",
    budget: int = DEFAULT_REDUCTION_BUDGET,
) -> list[int]:
    """dim V(p_0..p_k) for each stage k, modular with cross-check by default."""
    if use_rationals or isinstance(ps[0].field, PrimeField):
        return [
            ideal_dimension(groebner(ps[: k + 1], order, budget))
            for k in range(len(ps))
        ]
    per_prime = []
    for prime in primes:
        mod = _to_modular(ps, prime)
        per_prime.append(
            [ideal_dimension(groebner(mod[: k + 1], order, budget)) for k in range(len(ps))]
        )
    for other in per_prime[1:]:
        if other != per_prime[0]:
            raise BadPrimeError(
                f"modular dimensions disagree across primes {primes}: "
                f"{per_prime}; rerun with other primes or use_rationals=True"
            )
    return per_prime[0]


def is_regular_sequence(
    ps: list[Polynomial],
    use_rationals: bool = False,
    primes=DEFAULT_PRIMES,
    order: str = "degrevlex",
    budget: int = DEFAULT_REDUCTION_BUDGET,
) -> list[IdealReport]:
    """Stagewise reports; the sequence is regular iff the last stage still
    has regular_so_far = True (equivalent to maximal codimension drop)."""
    _check_homogeneous(ps)
    n = ps[0].arity
    dims = staged_dimensions(ps, use_rationals, primes, order, budget)
    reports = []
    ok = True
    for k, dim_v in enumerate(dims):
        ok = ok and dim_v == n - k - 1
        reports.append(
            IdealReport(k=k, dim_v=dim_v, dim_expected=n - k - 1, regular_so_far=ok)
        )
    return reports


def sequence_is_regular(reports: list[IdealReport]) -> bool:
    return reports[-1].regular_so_far


# ---------------------------------------------------------------------------
# Jacobian loci and the primeness-dimension criterion
# ---------------------------------------------------------------------------


@dataclass
class JacobianLocus:
    generators: list[Polynomial]
    degenerate: bool  # all inputs vanish identically: the locus is everything


def jacobian_locus(ps: list[Polynomial], k: int, minor_cap: int = 100_000) -> JacobianLocus:
    """Generators of {p_0 = .. = p_k = 0, rank Jac(p_0..p_k) < k+1}:
    the stage polynomials plus all (k+1) x (k+1) Jacobian minors."""
    if k < 0 or k >= len(ps):
        raise ValueError(f"stage {k} out of range")
    head = list(ps[: k + 1])
    if all(p.is_zero() for p in head):
        return JacobianLocus(generators=[], degenerate=True)
    jac = PolyMatrix.jacobian(head)
    minors = jac.minors(k + 1, cap=minor_cap)
    gens = head + [m for m in minors if not m.is_zero()]
    return JacobianLocus(generators=gens, degenerate=False)


def primeness_criterion(
    ps: list[Polynomial],
    k: int,
    use_rationals: bool = False,
    primes=DEFAULT_PRIMES,
    budget: int = DEFAULT_REDUCTION_BUDGET,
    assume_regular: bool = False,
) -> bool:
    """dim(J_k) <= dim(V_k) - 2 for the stage-k ideal; sufficient for
    primeness, inconclusive when False.

    The hypothesis that p_0..p_k is a regular sequence is verified unless
    assume_regular is set (the certificate pipeline does its own induction).
    """
    _check_homogeneous(ps[: k + 1])
    if not assume_regular:
        reports = is_regular_sequence(ps[: k + 1], use_rationals, primes, budget=budget)
        if not sequence_is_regular(reports):
            bad = next(r.k for r in reports if not r.regular_so_far)
            raise HypothesisError(
                f"stage {bad} is not regular; the criterion does not apply"
            )
    dim_v, dim_j = stage_gap_dimensions(ps, k, use_rationals, primes, budget)
    return dim_j <= dim_v - 2


def stage_gap_dimensions(
    ps: list[Polynomial],
    k: int,
    use_rationals: bool = False,
    primes=DEFAULT_PRIMES,
    budget: int = DEFAULT_REDUCTION_BUDGET,
) -> tuple[int, int]:
    """(dim V_k, dim of the rank-drop locus inside V_k) at stage k."""
    locus = jacobian_locus(ps, k)
    if locus.degenerate:
        n = ps[0].arity
        return n, n
    head = list(ps[: k + 1])
    if use_rationals or isinstance(ps[0].field, PrimeField):
        dim_v = ideal_dimension(groebner(head, budget=budget))
        dim_j = ideal_dimension(groebner(locus.generators, budget=budget))
        return dim_v, dim_j
    vs, js = [], []
    for prime in primes:
        vs.append(ideal_dimension(groebner(_to_modular(head, prime), budget=budget)))
        js.append(
            ideal_dimension(groebner(_to_modular(locus.generators, prime), budget=budget))
        )
    if len(set(vs)) != 1 or len(set(js)) != 1:
        raise BadPrimeError(
            f"modular dimensions disagree across primes {primes}: V={vs}, J={js}"
        )
    return vs[0], js[0]


# ---------------------------------------------------------------------------
# the inductive certificate pipeline
# ---------------------------------------------------------------------------


@dataclass
class StageGap:
    k: int
    dim_v: int
    dim_wu: int
    gap_ok: bool


@dataclass
class CorollaryReport:
    stages: list[StageGap]
    certified_regular: bool
    cross_check_regular: bool
    consistent: bool
    otfkm_badge: bool | None = None

    @property
    def verdict(self) -> str:
        return "regular" if self.certified_regular else "inconclusive"


def linearly_independent(ps: list[Polynomial]) -> bool:
    monomials = sorted({e for p in ps for e in p.terms})
    idx = {e: i for i, e in enumerate(monomials)}
    field = ps[0].field
    rows = []
    for p in ps:
        row = [field.zero] * len(monomials)
        for e, c in p.terms.items():
            row[idx[e]] = c
        rows.append(row)
    return linalg.rank(field, rows) == len(ps)


def corollary1_pipeline(
    ps: list[Polynomial],
    use_rationals: bool = False,
    primes=DEFAULT_PRIMES,
    budget: int = DEFAULT_REDUCTION_BUDGET,
    multiplicities: tuple[int, int] | None = None,
) -> CorollaryReport:
    """Certify that p_0..p_k form a regular sequence from the dimension gaps
    dim(W_i cap U_i) <= dim(W_i) - 2 at stages i = 0..k-1, then cross-check
    against the stagewise-codimension verdict.

    With multiplicities (m1, m2) supplied and m1 < m2, a successful
    certificate additionally flags the instance as of OT-FKM type.
    """
    _check_homogeneous(ps)
    degrees = {p.homogeneous_degree() for p in ps}
    if len(degrees) != 1:
        raise ValueError("inputs must share a common degree")
    if not linearly_independent(ps):
        raise ValueError("inputs are linearly dependent")
    stages = []
    certified = True
    for k in range(len(ps) - 1):
        dim_v, dim_j = stage_gap_dimensions(ps, k, use_rationals, primes, budget)
        gap_ok = dim_j <= dim_v - 2
        certified = certified and gap_ok
        stages.append(StageGap(k=k, dim_v=dim_v, dim_wu=dim_j, gap_ok=gap_ok))
    cross = sequence_is_regular(
        is_regular_sequence(ps, use_rationals, primes, budget=budget)
    )
    consistent = (not certified) or cross
    badge = None
    if multiplicities is not None:
        m1, m2 = multiplicities
        badge = bool(certified and m1 < m2)
    return CorollaryReport(
        stages=stages,
        certified_regular=certified,
        cross_check_regular=cross,
        consistent=consistent,
        otfkm_badge=badge,
    )
