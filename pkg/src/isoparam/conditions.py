"""Ozeki-Takeuchi Conditions A and B on focal manifolds.

Condition A holds at a point when all shape operators S_{n_a} share the same
kernel; exactly then the common kernel has the maximal dimension m1.

Condition B asks for degree-1 forms r_ab with

    q_a = sum_b r_ab p_b        and        r_ab = -r_ba.

The solver matches every degree-3 monomial coefficient of q_a - sum r_ab p_b
to zero and solves the resulting exact linear system.  Skew-symmetry is NOT
imposed: it is solved freely and verified afterwards, because for a regular
sequence p_0..p_m1 the skewness is a theorem, not an assumption, and a
non-skew solution would be a counterexample artifact worth surfacing.

The w-basis normalization afterwards rescales the zero-eigenspace
coordinates so that the multiplier forms of q_0 become r_0b = 2 w'_b; in
that basis three coefficient symmetries tie the cubic q_0 to the quadrics
and make the mixed u-w and v-w blocks of the p_a skew across indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .clifford import CliffordSystem
from .focalgeom import (
    FocalFrame,
    FormSet,
    FrameFieldError,
    build_frame,
    candidate_points,
    membership_defect,
    shape_operators,
)
from .poly import Polynomial


def condition_a_at(frame: FocalFrame) -> bool:
    """True iff the shape operators share a common kernel of dimension m1."""
    return common_kernel_dimension(frame) == frame.m1


def common_kernel_dimension(frame: FocalFrame) -> int:
    stacked = linalg.stack(shape_operators(frame))
    n = frame.tangent_dim
    return n - linalg.rank(frame.field, stacked)


def find_condition_a_points(
    sys: CliffordSystem, budget: int = 20_000, max_points: int = 4
) -> list[tuple]:
    """Points of M+ satisfying Condition A, from the structured candidate scan.

    Returns unnormalized integer representatives; an empty list is a
    legitimate outcome within the budget, not an error.
    """
    found = []
    examined = 0
    for z in candidate_points(sys.dim):
        if examined >= budget or len(found) >= max_points:
            break
        examined += 1
        if any(x != 0 for x in membership_defect(sys, z)):
            continue
        try:
            frame = build_frame(sys, z)
        except FrameFieldError:
            continue
        if condition_a_at(frame):
            found.append(frame.point_raw)
    return found


# ---------------------------------------------------------------------------
# Condition B
# ---------------------------------------------------------------------------


@dataclass
class ConditionBWitness:
    """Multiplier forms r_ab with q_a = sum_b r_ab p_b, plus verification."""

    forms: FormSet
    r: list[list[Polynomial]]

    def t_coefficient(self, a: int, b: int, var: int):
        """Linear coefficient of variable var in r_ab."""
        e = [0] * self.r[a][b].arity
        e[var] = 1
        return self.r[a][b].coefficient(tuple(e))

    def f_matrix(self):
        """f_{pb} = (w_p-coefficient of r_0b) / 2 for p, b = 1..m1."""
        fld = self.forms.field
        half = fld.div(fld.one, fld.coerce(2))
        m1 = self.forms.m1
        return [
            [
                fld.mul(self.t_coefficient(0, b, self.forms.w_index(p)), half)
                for b in range(1, m1 + 1)
            ]
            for p in range(m1)
        ]

    def reconstruction_ok(self) -> bool:
        """q_a - sum_b r_ab p_b is the zero polynomial for every a."""
        for a, qa in enumerate(self.forms.q):
            acc = qa
            for b, pb in enumerate(self.forms.p):
                acc = acc - self.r[a][b] * pb
            if not acc.is_zero():
                return False
        return True

    def skew_ok(self) -> bool:
        m1 = self.forms.m1
        for a in range(m1 + 1):
            for b in range(m1 + 1):
                if not (self.r[a][b] + self.r[b][a]).is_zero():
                    return False
        return True

    def t_vanishing_ok(self) -> bool:
        """No u- or v-coefficients in r_a0 and r_0a for a >= 1."""
        forms = self.forms
        uv_vars = [forms.u_index(i) for i in range(forms.m2)] + [
            forms.v_index(i) for i in range(forms.m2)
        ]
        fld = forms.field
        for a in range(1, forms.m1 + 1):
            for var in uv_vars:
                if not fld.is_zero(self.t_coefficient(a, 0, var)):
                    return False
                if not fld.is_zero(self.t_coefficient(0, a, var)):
                    return False
        return True

    def to_json_dict(self, antisym_ok: bool | None = None) -> dict:
        names = self.forms.frame.variable_names()
        out = {
            "r": [[poly.to_str(names) for poly in row] for row in self.r],
            "skew_ok": self.skew_ok(),
            "T_vanish_ok": self.t_vanishing_ok(),
        }
        if antisym_ok is not None:
            out["antisym_ok"] = antisym_ok
        return out

    def to_json(self, antisym_ok: bool | None = None) -> str:
        return json.dumps(self.to_json_dict(antisym_ok), indent=2, sort_keys=True)


@dataclass
class ConditionBFailure:
    """The linear system admits no exact solution for some q_a."""

    a: int
    residual: Polynomial
    message: str

    def __bool__(self) -> bool:
        return False


def condition_b_solve(forms: FormSet):
    """Solve q_a = sum_b r_ab p_b exactly; skewness is verified, not imposed.

    Returns a ConditionBWitness on success, else a ConditionBFailure carrying
    the first residual polynomial that cannot be matched.
    """
    if forms.q is None:
        raise ValueError("condition B needs third forms; call third_forms first")
    fld = forms.field
    n = forms.p[0].arity
    m1 = forms.m1
    cols = [(b, var) for b in range(m1 + 1) for var in range(n)]
    col_index = {key: i for i, key in enumerate(cols)}
    r_all = []
    for a in range(m1 + 1):
        qa = forms.q[a]
        # Collect every monomial either present in q_a or reachable as
        # x_var * (monomial of p_b); each gives one linear equation.
        monomials: dict[tuple, int] = {}

        def row_of(mono):
            if mono not in monomials:
                monomials[mono] = len(monomials)
            return monomials[mono]

        entries: list[tuple[int, int, object]] = []
        for b, pb in enumerate(forms.p):
            for e, c in pb.terms.items():
                for var in range(n):
                    lifted = list(e)
                    lifted[var] += 1
                    entries.append((row_of(tuple(lifted)), col_index[(b, var)], c))
        for e in qa.terms:
            row_of(e)
        a_mat = [[fld.zero] * len(cols) for _ in range(len(monomials))]
        for r_i, c_i, c in entries:
            a_mat[r_i][c_i] = fld.add(a_mat[r_i][c_i], c)
        rhs = [fld.zero] * len(monomials)
        for e, c in qa.terms.items():
            rhs[monomials[e]] = c
        sol = linalg.solve(fld, a_mat, rhs)
        if sol is None:
            partial = _partial_solution(fld, a_mat, rhs)
            r_row = _rows_from_solution(fld, partial, forms, m1, n)
            residual = qa
            for b, pb in enumerate(forms.p):
                residual = residual - r_row[b] * pb
            return ConditionBFailure(
                a=a,
                residual=residual,
                message=(
                    f"q_{a} is not in the degree-1 span of the quadrics; "
                    f"residual has {len(residual.terms)} unmatched terms"
                ),
            )
        r_all.append(_rows_from_solution(fld, sol, forms, m1, n))
    return ConditionBWitness(forms=forms, r=r_all)


def _rows_from_solution(fld, sol, forms, m1, n):
    out = []
    for b in range(m1 + 1):
        terms = {}
        for var in range(n):
            c = sol[b * n + var]
            if not fld.is_zero(c):
                e = [0] * n
                e[var] = 1
                terms[tuple(e)] = c
        out.append(Polynomial(fld, n, terms))
    return out


def _partial_solution(fld, a_mat, rhs):
    """Best-effort solution ignoring inconsistent rows, for failure reports."""
    aug = [row + [r] for row, r in zip(a_mat, rhs)]
    red, pivots = linalg.rref(fld, aug)
    ncols = len(a_mat[0])
    x = [fld.zero] * ncols
    for r, pc in enumerate(pivots):
        if pc < ncols:
            x[pc] = red[r][ncols]
    return x


# ---------------------------------------------------------------------------
# w-basis normalization and the coefficient symmetries it exposes
# ---------------------------------------------------------------------------


@dataclass
class AntisymReport:
    singular_f: bool
    r0_normalized_ok: bool = False
    uvw_match_ok: bool = False
    uw_skew_ok: bool = False
    vw_skew_ok: bool = False
    change_matrix: list | None = None
    forms: FormSet | None = None
    r: list | None = None

    @property
    def all_ok(self) -> bool:
        return (
            not self.singular_f
            and self.r0_normalized_ok
            and self.uvw_match_ok
            and self.uw_skew_ok
            and self.vw_skew_ok
        )

    def __bool__(self) -> bool:
        return self.all_ok


def normalize_and_check_antisym(
    forms: FormSet, witness: ConditionBWitness
) -> AntisymReport:
    """Rescale the w-coordinates so r_0b = 2 w'_b, then verify the coefficient
    symmetries that normalization exposes.

    Requires m1 < m2.  A singular f-matrix means the frame does not admit the
    normalization; that outcome is reported, not raised.
    """
    if not forms.m1 < forms.m2:
        raise ValueError("normalization requires m1 < m2")
    fld = forms.field
    m1, m2 = forms.m1, forms.m2
    n = forms.p[0].arity
    f_mat = witness.f_matrix()
    f_inv_t = linalg.invert(fld, linalg.transpose(f_mat))
    if f_inv_t is None:
        return AntisymReport(singular_f=True)
    change = f_inv_t  # w_old[p] = sum_c change[p][c] w_new[c]

    images = [Polynomial.variable(fld, n, i) for i in range(2 * m2)]
    for p in range(m1):
        terms = {}
        for c in range(m1):
            if fld.is_zero(change[p][c]):
                continue
            e = [0] * n
            e[2 * m2 + c] = 1
            terms[tuple(e)] = change[p][c]
        images.append(Polynomial(fld, n, terms))

    new_p = [poly.substitute(images) for poly in forms.p]
    new_q = [poly.substitute(images) for poly in forms.q]
    new_r = [[poly.substitute(images) for poly in row] for row in witness.r]
    new_forms = FormSet(frame=forms.frame, p=new_p, q=new_q)
    new_witness = ConditionBWitness(forms=new_forms, r=new_r)

    # r'_00 = 0 and r'_0b = 2 w'_b exactly.
    ok_r0 = new_r[0][0].is_zero()
    for b in range(1, m1 + 1):
        e = [0] * n
        e[2 * m2 + (b - 1)] = 1
        target = Polynomial(fld, n, {tuple(e): fld.coerce(2)})
        ok_r0 = ok_r0 and new_r[0][b] == target

    # q_0 coefficient on u_alpha v_mu w'_c equals twice the u_alpha v_mu
    # coefficient of p_c.
    ok_uvw = True
    for alpha in range(m2):
        for mu in range(m2):
            for c in range(m1):
                lhs = new_forms.q_uvw(0, alpha, mu, c)
                rhs = fld.mul(fld.coerce(2), new_forms.s_uv(c + 1, alpha, mu))
                if not fld.is_zero(fld.sub(lhs, rhs)):
                    ok_uvw = False

    # Mixed u-w and v-w coefficients of the p_a are skew across (a, w-index).
    ok_uw = True
    ok_vw = True
    for a in range(1, m1 + 1):
        for c in range(1, m1 + 1):
            for alpha in range(m2):
                lhs = new_forms.s_uw(a, alpha, c - 1)
                rhs = fld.neg(new_forms.s_uw(c, alpha, a - 1))
                if not fld.is_zero(fld.sub(lhs, rhs)):
                    ok_uw = False
            for mu in range(m2):
                lhs = new_forms.s_vw(a, mu, c - 1)
                rhs = fld.neg(new_forms.s_vw(c, mu, a - 1))
                if not fld.is_zero(fld.sub(lhs, rhs)):
                    ok_vw = False

    return AntisymReport(
        singular_f=False,
        r0_normalized_ok=ok_r0,
        uvw_match_ok=ok_uvw,
        uw_skew_ok=ok_uw,
        vw_skew_ok=ok_vw,
        change_matrix=change,
        forms=new_forms,
        r=new_r,
    )
