"""Verification pipelines and the command-line interface.

Subcommands:

  isoparam verify     run a list of checks against an instance and emit a
                      machine-readable JSON report
  isoparam instances  print the built-in instance catalog
  isoparam report-diff A B   compare two reports ignoring timings

Checks and their dependencies (requesting a check pulls in what it needs):

  cm          Cartan-Munzner differential identities of the quartic
  forms       second/third fundamental forms and their support structure
  identity    sum_a p_a q_a = 0 exactly                      (needs forms)
  condA       search for Condition A points
  condB       exact solve of q_a = sum r_ab p_b              (needs forms)
  antisym     w-normalization and coefficient symmetries     (needs condB)
  regseq      stagewise regular-sequence verdict             (needs forms)
  corollary1  dimension-gap certificate + cross-check        (needs forms)
  pencil      simultaneous normal forms of operator pairs    (needs forms)
  stratify    seeded sampling of the singular stratification (needs forms)

Statuses follow a four-way taxonomy: pass (claim verified), fail (claim
violated), inconclusive (criterion insufficient to decide), measured (data
recorded, no expectation).  The process exits 0 iff nothing failed.

Reports are deterministic for a fixed plan and seed: artifacts are exact
rational strings or tagged floats, and timings live in a separate section
that fingerprinting and report-diff ignore.  The environment variable
ISOPARAM_PRIME overrides the leading Groebner prime.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from . import __version__
from .clifford import (
    CliffordSystemError,
    builtin_catalog,
    fkm_polynomial,
    load_instance,
    verify_cartan_munzner,
)
from .conditions import (
    condition_b_solve,
    find_condition_a_points,
    normalize_and_check_antisym,
)
from .fields import QQ, PrimeField, QuadraticField, is_prime
from .focalgeom import find_focal_point, shape_operators, span_check, third_forms
from .idealcheck import (
    BadPrimeError,
    DEFAULT_PRIMES,
    GroebnerBudgetError,
    corollary1_pipeline,
    is_regular_sequence,
    sequence_is_regular,
)
from .pencilform import (
    PencilStructureError,
    lemma49_normal_form,
    sample_singular_stratification,
)

CHECK_DEPENDENCIES = {
    "cm": (),
    "forms": (),
    "identity": ("forms",),
    "condA": (),
    "condB": ("forms",),
    "antisym": ("condB",),
    "regseq": ("forms",),
    "corollary1": ("forms",),
    "pencil": ("forms",),
    "stratify": ("forms",),
}

ALL_CHECKS = tuple(CHECK_DEPENDENCIES)


@dataclass
class VerificationPlan:
    instance: dict
    checks: list[str]
    point: list[str] | None = None
    seed: int = 0
    out: str | None = None
    primes: tuple[int, ...] = DEFAULT_PRIMES
    use_rationals: bool = False
    samples: int = 1000
    search_budget: int = 20_000

    def resolved_checks(self) -> list[str]:
        """Dependency closure of the requested checks, in execution order."""
        want: set[str] = set()

        def add(name):
            if name in want:
                return
            for dep in CHECK_DEPENDENCIES[name]:
                add(dep)
            want.add(name)

        for name in self.checks:
            if name not in CHECK_DEPENDENCIES:
                raise ValueError(
                    f"unknown check {name!r}; valid: {', '.join(ALL_CHECKS)}"
                )
            add(name)
        return [name for name in ALL_CHECKS if name in want]


def _fingerprint(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _tagged_float(value: float, tolerance: float) -> dict:
    return {"value": float(value), "tolerance": tolerance}


def choose_primes(field, preferred: tuple[int, ...]) -> tuple[int, ...]:
    """Primes usable for this coefficient field (quadratic frames need the
    radicand to be a square mod p)."""
    if isinstance(field, QuadraticField):
        usable = []
        candidates = list(preferred) + [32009, 65537, 131071, 104729]
        for p in candidates:
            if not is_prime(p):
                continue
            try:
                PrimeField(p).sqrt(field.d % p)
            except ValueError:
                continue
            usable.append(p)
            if len(usable) == 2:
                return tuple(usable)
        raise BadPrimeError(
            f"no usable primes for {field} among {candidates}"
        )
    return preferred


def run(plan: VerificationPlan) -> dict:
    """Execute the plan; independent checks keep running after failures."""
    order = plan.resolved_checks()
    system_error = None
    sys_ = None
    try:
        sys_ = load_instance(plan.instance)
    except (CliffordSystemError, ValueError, OSError) as err:
        system_error = f"instance validation failed: {err}"
    checks: dict[str, dict] = {}
    timings: dict[str, float] = {}
    state: dict[str, object] = {}
    for name in order:
        start = time.perf_counter()
        if system_error is not None:
            checks[name] = {"status": "error", "message": system_error}
            continue
        try:
            checks[name] = _CHECK_RUNNERS[name](sys_, plan, state)
        except GroebnerBudgetError as err:
            checks[name] = {"status": "error", "message": f"resource budget: {err}"}
        except (BadPrimeError, PencilStructureError, ValueError, RuntimeError) as err:
            checks[name] = {"status": "error", "message": str(err)}
        timings[name] = round(time.perf_counter() - start, 6)
    statuses = {info["status"] for info in checks.values()}
    all_passed = not statuses & {"fail", "error"}
    plan_payload = {
        "checks": list(plan.checks),
        "seed": plan.seed,
        "primes": list(plan.primes),
        "use_rationals": plan.use_rationals,
        "samples": plan.samples,
        "point": plan.point,
    }
    body = {
        "tool": {"name": "isoparam", "version": __version__},
        "instance": plan.instance,
        "plan": plan_payload,
        "order": order,
        "checks": checks,
        "all_passed": all_passed,
    }
    body["fingerprint"] = _fingerprint(body)
    body["timings"] = timings
    return body


def _get_frame(sys_, plan: VerificationPlan, state: dict):
    if "frame" not in state:
        point = None
        if plan.point is not None:
            point = [Fraction(x) for x in plan.point]
        state["frame"] = find_focal_point(sys_, point=point)
    return state["frame"]


def _get_forms(sys_, plan, state):
    if "forms" not in state:
        state["forms"] = third_forms(_get_frame(sys_, plan, state))
    return state["forms"]


def _check_cm(sys_, plan, state):
    quartic = fkm_polynomial(sys_)
    report = verify_cartan_munzner(quartic)
    ok = report.grad_ok and report.laplace_ok
    return {
        "status": "pass" if ok else "fail",
        "artifacts": {
            "grad_ok": report.grad_ok,
            "laplace_ok": report.laplace_ok,
            "c_value": str(report.c_value),
            "c_expected": str(report.c_expected),
        },
    }


def _check_forms(sys_, plan, state):
    forms = _get_forms(sys_, plan, state)
    fld = forms.field
    names = forms.frame.variable_names()
    m1, m2 = forms.m1, forms.m2
    n = m1 + 2 * m2
    # p_0 = (sum u^2 - sum v^2)/2 exactly.
    expect = {}
    half = fld.div(fld.one, fld.coerce(2))
    for i in range(m2):
        e = [0] * n
        e[i] = 2
        expect[tuple(e)] = half
        e = [0] * n
        e[m2 + i] = 2
        expect[tuple(e)] = fld.neg(half)
    from .poly import Polynomial

    p0_ok = forms.p[0] == Polynomial(fld, n, expect)
    # p_a (a >= 1) has support only on u*v, u*w, v*w monomials.
    support_ok = True
    for pa in forms.p[1:]:
        for exp in pa.terms:
            u_deg = sum(exp[:m2])
            v_deg = sum(exp[m2 : 2 * m2])
            w_deg = sum(exp[2 * m2 :])
            if sorted((u_deg, v_deg, w_deg)) != [0, 1, 1]:
                support_ok = False
    # q_a carries no u^3 or v^3 monomials.
    cubes_ok = True
    for qa in forms.q:
        for i in range(2 * m2):
            e = [0] * n
            e[i] = 3
            if not fld.is_zero(qa.coefficient(tuple(e))):
                cubes_ok = False
    blocks = [list(range(m2)), list(range(m2, 2 * m2)), list(range(2 * m2, n))]
    q0_multidegree = sorted(forms.q[0].multidegree(blocks))
    ok = p0_ok and support_ok and cubes_ok
    return {
        "status": "pass" if ok else "fail",
        "artifacts": {
            "field": fld.name,
            "point": [str(x) for x in forms.frame.point_raw],
            "p0_structure_ok": p0_ok,
            "mixed_support_ok": support_ok,
            "pure_cubes_vanish": cubes_ok,
            "q0_multidegree": [list(t) for t in q0_multidegree],
            "pa": [p.to_str(names) for p in forms.p],
            "qa": [q.to_str(names) for q in forms.q],
        },
    }


def _check_identity(sys_, plan, state):
    forms = _get_forms(sys_, plan, state)
    ok = forms.product_identity_holds()
    return {"status": "pass" if ok else "fail", "artifacts": {"identity_ok": ok}}


def _check_cond_a(sys_, plan, state):
    points = find_condition_a_points(sys_, budget=plan.search_budget)
    found = len(points)
    return {
        "status": "pass" if found else "measured",
        "artifacts": {
            "points_found": found,
            "points": [[str(x) for x in p] for p in points],
        },
    }


def _check_cond_b(sys_, plan, state):
    forms = _get_forms(sys_, plan, state)
    result = condition_b_solve(forms)
    if not result:
        return {
            "status": "fail",
            "artifacts": {
                "solved": False,
                "failing_component": result.a,
                "message": result.message,
                "residual_terms": len(result.residual.terms),
            },
        }
    state["witness"] = result
    ok = result.reconstruction_ok() and result.skew_ok() and result.t_vanishing_ok()
    names = forms.frame.variable_names()
    return {
        "status": "pass" if ok else "fail",
        "artifacts": {
            "solved": True,
            "skew_ok": result.skew_ok(),
            "T_vanish_ok": result.t_vanishing_ok(),
            "r": [[p.to_str(names) for p in row] for row in result.r],
        },
    }


def _check_antisym(sys_, plan, state):
    forms = _get_forms(sys_, plan, state)
    witness = state.get("witness")
    if witness is None:
        return {"status": "inconclusive", "message": "no Condition B witness"}
    if not forms.m1 < forms.m2:
        return {"status": "inconclusive", "message": "normalization needs m1 < m2"}
    report = normalize_and_check_antisym(forms, witness)
    if report.singular_f:
        return {
            "status": "inconclusive",
            "artifacts": {"singular_f": True},
            "message": "f-matrix is singular; the frame does not admit the normalization",
        }
    span = span_check(forms.frame)
    ok = report.all_ok and span.ok
    return {
        "status": "pass" if ok else "fail",
        "artifacts": {
            "r0_normalized_ok": report.r0_normalized_ok,
            "uvw_match_ok": report.uvw_match_ok,
            "uw_skew_ok": report.uw_skew_ok,
            "vw_skew_ok": report.vw_skew_ok,
            "span_rank": span.rank,
            "span_ok": span.ok,
        },
    }


def _check_regseq(sys_, plan, state):
    forms = _get_forms(sys_, plan, state)
    primes = choose_primes(forms.field, plan.primes)
    reports = is_regular_sequence(
        forms.p, use_rationals=plan.use_rationals, primes=primes
    )
    regular = sequence_is_regular(reports)
    m1, m2 = forms.m1, forms.m2
    claimed_regime = m2 >= 2 * m1 - 1
    if regular:
        status = "pass"
    else:
        status = "fail" if claimed_regime else "measured"
    return {
        "status": status,
        "artifacts": {
            "regular": regular,
            "claimed_regime": claimed_regime,
            "primes": list(primes),
            "stages": [
                {
                    "k": r.k,
                    "dim_V": r.dim_v,
                    "dim_expected": r.dim_expected,
                    "regular_so_far": r.regular_so_far,
                }
                for r in reports
            ],
        },
    }


def _check_corollary1(sys_, plan, state):
    forms = _get_forms(sys_, plan, state)
    primes = choose_primes(forms.field, plan.primes)
    report = corollary1_pipeline(
        forms.p,
        use_rationals=plan.use_rationals,
        primes=primes,
        multiplicities=(forms.m1, forms.m2),
    )
    if not report.consistent:
        status = "fail"  # certificate and cross-check disagree: a real bug
    elif report.certified_regular:
        status = "pass"
    else:
        status = "inconclusive"
    return {
        "status": status,
        "artifacts": {
            "verdict": report.verdict,
            "certified_regular": report.certified_regular,
            "cross_check_regular": report.cross_check_regular,
            "otfkm_badge": report.otfkm_badge,
            "stages": [
                {"k": s.k, "dim_V": s.dim_v, "dim_WU": s.dim_wu, "gap_ok": s.gap_ok}
                for s in report.stages
            ],
        },
    }


def _check_pencil(sys_, plan, state):
    frame = _get_frame(sys_, plan, state)
    mats = shape_operators(frame)
    rows = []
    ok = True
    for a in range(1, frame.m1 + 1):
        form = lemma49_normal_form(mats[0], mats[a], frame)
        resid = form.reconstruction_residual()
        orth = form.frames_orthogonal_defect()
        good = resid <= 1e-10 and orth <= 1e-10
        ok = ok and good
        rows.append(
            {
                "pair": [0, a],
                "r": form.r,
                "f": [round(x, 12) for x in form.f_floats()],
                "exact": form.exact,
                "reconstruction_residual": _tagged_float(resid, 1e-10),
                "orthogonality_defect": _tagged_float(orth, 1e-10),
            }
        )
    return {"status": "pass" if ok else "fail", "artifacts": {"pairs": rows}}


def _check_stratify(sys_, plan, state):
    frame = _get_frame(sys_, plan, state)
    report = sample_singular_stratification(
        frame, k=frame.m1, samples=plan.samples, seed=plan.seed
    )
    status = "measured" if not report.violations else "fail"
    payload = report.to_json_dict()
    payload["generic_fraction"] = _tagged_float(report.generic_fraction, 0.0)
    return {"status": status, "artifacts": payload}


_CHECK_RUNNERS = {
    "cm": _check_cm,
    "forms": _check_forms,
    "identity": _check_identity,
    "condA": _check_cond_a,
    "condB": _check_cond_b,
    "antisym": _check_antisym,
    "regseq": _check_regseq,
    "corollary1": _check_corollary1,
    "pencil": _check_pencil,
    "stratify": _check_stratify,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoparam",
        description="exact verification toolkit for isoparametric focal geometry",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ver = sub.add_parser("verify", help="run checks against an instance")
    ver.add_argument("--family", choices=["fkm"], help="built-in family name")
    ver.add_argument("--m", type=int, help="number of anticommuting involutions minus one")
    ver.add_argument("--l", type=int, help="half the ambient dimension")
    ver.add_argument("--instance", help="path to a JSON instance definition")
    ver.add_argument(
        "--checks",
        default="cm,forms,identity,condB,regseq",
        help=f"comma-separated subset of: {','.join(ALL_CHECKS)}",
    )
    ver.add_argument("--point", help="explicit focal point, comma-separated rationals")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", help="write the JSON report here")
    ver.add_argument("--prime", type=int, help="leading Groebner prime")
    ver.add_argument(
        "--use-rationals",
        action="store_true",
        help="run Groebner computations over QQ instead of two primes",
    )
    ver.add_argument("--samples", type=int, default=1000)
    ver.add_argument("--search-budget", type=int, default=20_000)

    sub.add_parser("instances", help="print the built-in instance catalog")

    diff = sub.add_parser("report-diff", help="compare two reports modulo timings")
    diff.add_argument("first")
    diff.add_argument("second")
    return parser


def _plan_from_args(args) -> VerificationPlan:
    if args.instance:
        with open(args.instance, "r", encoding="utf-8") as fh:
            instance = json.load(fh)
    elif args.family and args.m and args.l:
        instance = {"family": args.family, "m": args.m, "l": args.l}
    else:
        raise SystemExit("verify needs either --instance or --family/--m/--l")
    primes = list(DEFAULT_PRIMES)
    env_prime = os.environ.get("ISOPARAM_PRIME")
    if args.prime:
        primes = [args.prime] + [p for p in primes if p != args.prime]
    elif env_prime:
        p = int(env_prime)
        primes = [p] + [q for q in primes if q != p]
    if not is_prime(primes[0]):
        raise SystemExit(f"{primes[0]} is not prime")
    point = args.point.split(",") if args.point else None
    return VerificationPlan(
        instance=instance,
        checks=[c.strip() for c in args.checks.split(",") if c.strip()],
        point=point,
        seed=args.seed,
        out=args.out,
        primes=tuple(primes[:2]),
        use_rationals=args.use_rationals,
        samples=args.samples,
        search_budget=args.search_budget,
    )


def _cmd_verify(args) -> int:
    plan = _plan_from_args(args)
    report = run(plan)
    text = json.dumps(report, indent=2, sort_keys=True)
    if plan.out:
        with open(plan.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["all_passed"] else 1


def _cmd_instances(_args) -> int:
    rows = builtin_catalog()
    header = f"{'family':<8}{'m':>3}{'l':>4}{'m1':>4}{'m2':>4}{'delta':>7}{'ambient':>9}  note"
    print(header)
    print("-" * len(header))
    for row in rows:
        note = "anomalous multiplicity pair" if (row["m1"], row["m2"]) in {
            (3, 4),
            (7, 8),
            (6, 9),
        } else ""
        print(
            f"{row['family']:<8}{row['m']:>3}{row['l']:>4}{row['m1']:>4}"
            f"{row['m2']:>4}{row['delta']:>7}{row['ambient_dim']:>9}  {note}"
        )
    return 0


def _strip_volatile(report: dict) -> dict:
    out = dict(report)
    out.pop("timings", None)
    return out


def _cmd_report_diff(args) -> int:
    with open(args.first, "r", encoding="utf-8") as fh:
        first = json.load(fh)
    with open(args.second, "r", encoding="utf-8") as fh:
        second = json.load(fh)
    a, b = _strip_volatile(first), _strip_volatile(second)
    if a == b:
        print("reports agree (timings ignored)")
        return 0
    diffs = _diff_paths(a, b, "$")
    for path, left, right in diffs[:50]:
        print(f"{path}: {left!r} != {right!r}")
    print(f"{len(diffs)} differing paths")
    return 1


def _diff_paths(a, b, path):
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for key in sorted(set(a) | set(b)):
            out.extend(
                _diff_paths(a.get(key, "<missing>"), b.get(key, "<missing>"), f"{path}.{key}")
            )
        return out
    if isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        out = []
        for i, (x, y) in enumerate(zip(a, b)):
            out.extend(_diff_paths(x, y, f"{path}[{i}]"))
        return out
    if a != b:
        return [(path, a, b)]
    return []


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "instances":
        return _cmd_instances(args)
    if args.command == "report-diff":
        return _cmd_report_diff(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
