"""Verification suites and their machine-readable reports.

Every ``cmd_*`` function returns a :class:`VerificationReport`.  Precondition
problems (bad dimension, ``t = 0``, unknown kind) propagate as ``ValueError``;
a computed quantity that disagrees with its closed form or with the expected
theorem verdict is recorded as a failed check instead.
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import tensor_core
from .base_curvature import (
    NotEinsteinError,
    ansatz_signs,
    build_space_form,
    check_einstein,
    pin_ricci_sign,
    pqk_identity_report,
    ricci_two_forms,
)
from .bundle_geometry import (
    DEFAULT_ADJOINT_MODE,
    GRAY_CLASSES,
    ah1_critical_sc,
    build_bundle_model,
    bundle_ricci,
    bundle_star_ricci,
    einstein_critical_sc,
    general_blocks_crosscheck,
    gray_class_check,
    hermitian_ricci_check,
    is_einstein,
    is_star_einstein,
    star_einstein_critical_sc,
    vertical_signature,
)
from .pq_algebra import TAU
from .so21_mixed3 import (
    BRACKET_PAIRS,
    DISPLAYED_AD,
    DISPLAYED_BRACKETS,
    ad_matrix,
    bracket,
    canonical_hyperquadric,
    canonical_variation_ricci,
    check_mixed3_axioms,
    einstein_t_values,
    exp_generator,
    exp_series,
    gauss_curvature_tensor,
    hyperquadric_einstein_constant,
    mixed3_einstein_constant,
    sasakian_curvature_identity_check,
    so21_basis,
)
from .surd import QuadraticSurd, format_exact
from .tensor_core import VerificationError, is_zero, scalar, validate_curvature_symmetries

SCHEMA = 1

PASS, FAIL, INFO = "pass", "fail", "informational"

STANDARD_N = (2, 3)
STANDARD_T = ("1", "2", "1/2", "-1")
STANDARD_SC = ("-16", "-8", "0", "16/3", "8", "16")
BASE_SC = ("-16", "-8", "0", "16/3", "8", "16", "60")
VARIATION_N = (1, 2, 3)
MIXED_N = (1, 2, 3)
EXP_SAMPLES = (-1.0, -0.5, 0.25, 1.0)
EINSTEIN_CONVENTIONS = ("paper", "metric-weighted")


def jsonable(x):
    """Convert results to JSON values; exact scalars become ``p/q`` or ``a+b*sqrt(d)`` strings."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, QuadraticSurd):
        return format_exact(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, numbers.Rational):
        return format_exact(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in x]
    if hasattr(x, "as_dict"):
        return jsonable(x.as_dict())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _value(x):
    """A scalar as its exact string and a decimal approximation."""
    return {"exact": jsonable(x), "decimal": float(x)}


def _yes(flag) -> str:
    return "yes" if flag else "no"


def _contains(values, x) -> bool:
    return any(is_zero(v - x) for v in values)


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: object
    anchor: str

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": jsonable(self.value), "anchor": self.anchor}


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    checks: list[Check] = field(default_factory=list)
    conventions: dict = field(default_factory=dict)
    #: numeric ordering key used when reports are merged
    order: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def add(self, name: str, status: str, value, anchor: str) -> Check:
        if status not in (PASS, FAIL, INFO):
            raise ValueError(f"bad status {status!r}")
        if not anchor:
            raise ValueError("every check needs an anchor or the tag 'plumbing'")
        check = Check(name, status, value, anchor)
        self.checks.append(check)
        return check

    def expect(self, name: str, anchor: str, fn: Callable[[], tuple[bool, object]]) -> Check:
        """Run ``fn() -> (ok, value)``; a raised VerificationError is a failure."""
        try:
            ok, value = fn()
        except VerificationError as exc:
            return self.add(name, FAIL, {"error": str(exc)}, anchor)
        return self.add(name, PASS if ok else FAIL, value, anchor)

    def sort_key(self) -> tuple:
        return (self.suite, self.order)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "parameters": jsonable(self.parameters),
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "conventions": jsonable(self.conventions),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    def summary(self) -> str:
        lines = [f"{self.suite} {_format_params(self.parameters)}"]
        for c in self.checks:
            lines.append(f"  [{c.status}] {c.name}: {_short(c.value)}")
        lines.append(f"  => {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


@dataclass
class SuiteReport:
    """Several reports merged in a stable order."""

    suite: str
    reports: list[VerificationReport]
    conventions: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def as_dict(self) -> dict:
        ordered = sorted(self.reports, key=VerificationReport.sort_key)
        counts = {PASS: 0, FAIL: 0, INFO: 0}
        for r in ordered:
            for c in r.checks:
                counts[c.status] += 1
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "passed": self.passed,
            "counts": counts,
            "conventions": jsonable(self.conventions),
            "reports": [r.as_dict() for r in ordered],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    def summary(self) -> str:
        ordered = sorted(self.reports, key=VerificationReport.sort_key)
        lines = []
        for r in ordered:
            failed = [c.name for c in r.checks if c.status == FAIL]
            mark = "PASS" if not failed else "FAIL " + ", ".join(failed)
            lines.append(f"{r.suite} {_format_params(r.parameters)}: {mark}")
        counts = self.as_dict()["counts"]
        lines.append(
            f"{len(ordered)} reports, {counts[PASS]} checks passed, {counts[FAIL]} failed, "
            f"{counts[INFO]} informational => {'PASS' if self.passed else 'FAIL'}"
        )
        return "\n".join(lines)


def _order(*values) -> tuple:
    """Sort key: numbers by value (ties by their exact text), strings as is."""
    out = []
    for v in values:
        if isinstance(v, str):
            out.append((0.0, v))
        else:
            out.append((float(v), jsonable(v) if not isinstance(v, int) else str(v)))
    return tuple(out)


def _format_params(p: dict) -> str:
    return " ".join(f"{k}={jsonable(v)}" for k, v in sorted(p.items()) if v is not None)


def _short(value) -> str:
    text = json.dumps(jsonable(value), sort_keys=True)
    return text if len(text) <= 160 else text[:157] + "..."


def _scalar_param(x):
    return jsonable(scalar(x))


def conventions(n: int | None = None, kind: str | None = None, adjoint_mode: str | None = None,
                einstein_convention: str | None = None) -> dict:
    """Every pinned design decision that affects the numbers in a report."""
    out = {
        "scalar_mode": tensor_core.current_mode(),
        "curvature_tensor": "R(X,Y,Z,T) = g(R(X,Y)Z, T)",
        "ricci_sign": tensor_core.RICCI_SIGN,
        "ricci_contraction": "rho(X,Y) = sum_i eps_i R(E_i, X, E_i, Y)",
        "ricci_sign_hyperquadric": 1,
        "star_ricci": "rho*(X,Y) = sum_i eps_i R(E_i, X, S E_i, S Y)",
        "fundamental_form": "Omega(X,Y) = g(JX, Y)",
    }
    if n is not None and n >= 2:
        out["ansatz_signs"] = list(ansatz_signs(n))
    if kind is not None:
        out["adjoint_mode"] = adjoint_mode or DEFAULT_ADJOINT_MODE[kind]
    else:
        out["adjoint_mode"] = dict(DEFAULT_ADJOINT_MODE)
    if einstein_convention is not None:
        out["einstein_convention"] = einstein_convention
    return out


# ---------------------------------------------------------------------------
# base


def cmd_verify_base(n: int, Sc) -> VerificationReport:
    Sc = scalar(Sc)
    report = VerificationReport("verify-base", {"n": n, "Sc": jsonable(Sc)}, conventions=conventions(n),
                                order=_order(n, Sc))
    try:
        model = build_space_form(n, Sc)
    except VerificationError as exc:
        report.add("space-form assembly", FAIL, {"error": str(exc)}, "plumbing")
        return report
    report.add("space-form assembly", PASS, {"dim": model.dim, "signs": list(model.signs)}, "plumbing")
    report.expect(
        "reduced scalar curvature",
        "nu = Sc/(4n(n+2))",
        lambda: (is_zero(model.nu * 4 * n * (n + 2) - Sc), model.nu),
    )
    sym = validate_curvature_symmetries(model.R)
    report.add("curvature symmetries", PASS if not sym else FAIL, sym[:1], "algebraic curvature tensor symmetries")
    for name, bad in pqk_identity_report(model):
        report.add(name, PASS if bad is None else FAIL, bad, "paraquaternionic Kaehler curvature identities")

    def two_forms():
        ricci_two_forms(model)
        return True, [-TAU[a] * Sc / (4 * (n + 2)) for a in range(3)]

    report.expect("Ricci 2-forms rho_a = -tau_a Sc/(4(n+2)) g(., J_a .)", "Ricci 2-forms of a PQK manifold", two_forms)

    def einstein():
        try:
            lam = check_einstein(model)
        except NotEinsteinError as exc:
            return False, {"witness": list(exc.witness), "deviation": exc.deviation}
        return True, {"lambda": lam}

    report.expect("Einstein rho = (Sc/4n) g", "PQK manifolds are Einstein", einstein)
    report.expect("Ricci sign pinned by the space form", "plumbing", lambda: (pin_ricci_sign(n) == tensor_core.RICCI_SIGN, tensor_core.RICCI_SIGN))
    if is_zero(Sc):
        report.add("flat model", INFO, "Sc = 0: R vanishes identically and every identity holds trivially", "plumbing")
    return report


# ---------------------------------------------------------------------------
# bundles


def _bundle_params(kind, n, t, Sc, structures, adjoint_mode):
    return {
        "kind": kind,
        "n": n,
        "t": _scalar_param(t),
        "Sc": _scalar_param(Sc),
        "structures": list(structures),
        "adjoint_mode": adjoint_mode or DEFAULT_ADJOINT_MODE[kind],
    }


def cmd_verify_bundle(kind: str, n: int, t, Sc, structures: Iterable[int] = (1,),
                      adjoint_mode: str | None = None, crosscheck: bool = True) -> VerificationReport:
    structures = tuple(structures)
    for i in structures:
        if i not in (1, 2):
            raise ValueError(f"structure index must be 1 or 2, got {i}")
    if isinstance(Sc, str):
        Sc = scalar(Sc)
    report = VerificationReport(
        "verify-bundle",
        _bundle_params(kind, n, t, Sc, structures, adjoint_mode),
        conventions=conventions(n, kind, adjoint_mode),
        order=_order(kind, n, scalar(t), Sc, str(structures), adjoint_mode or ""),
    )
    try:
        model = build_bundle_model(kind, n, Sc, t, adjoint_mode)
    except VerificationError as exc:
        report.add("bundle assembly", FAIL, {"error": str(exc)}, "plumbing")
        return report
    t = model.t
    report.add(
        "bundle assembly and structure compatibility",
        PASS,
        {"dim": model.total_dim, "vertical_signature": list(vertical_signature(model))},
        "plumbing",
    )
    sym = validate_curvature_symmetries(model.K)
    report.add("curvature symmetries of K", PASS if not sym else FAIL, sym[:1], "algebraic curvature tensor symmetries")
    report.expect("Ricci closed form", f"Ricci of {kind} space", lambda: (True, list(bundle_ricci(model))))

    einstein_roots = einstein_critical_sc(kind, n, t, verify=False)
    verdict = is_einstein(model)
    expected = _contains(einstein_roots, model.Sc)
    report.add(
        "Einstein",
        PASS if verdict == expected else FAIL,
        {"verdict": _yes(verdict), "expected": _yes(expected)},
        f"Einstein condition for the {kind} space",
    )
    letter = "P" if model.para else "I"
    for i in structures:
        report.expect(
            f"*-Ricci closed form ({letter}{i})",
            f"*-Ricci of {kind} space",
            lambda i=i: (True, list(bundle_star_ricci(model, i))),
        )
        roots = star_einstein_critical_sc(kind, i, n, t, verify=False)
        verdict = is_star_einstein(model, i)
        expected = _contains(roots, model.Sc)
        report.add(
            f"*-Einstein ({letter}{i})",
            PASS if verdict == expected else FAIL,
            {"verdict": _yes(verdict), "expected": _yes(expected)},
            f"*-Einstein condition for the {kind} space",
        )
        ah1 = ah1_critical_sc(kind, i, n, t, verify=False)
        for cls in GRAY_CLASSES[kind]:
            res = gray_class_check(model, i, cls)
            expected = _contains(ah1, model.Sc) if cls.endswith("1") else True
            report.add(
                f"{cls} ({letter}{i})",
                PASS if res.holds == expected else FAIL,
                {"verdict": _yes(res.holds), "expected": _yes(expected), "witness": res.witness,
                 "worst_violation": res.worst_violation},
                f"Gray classes of the {kind} space",
            )
        report.add(
            f"Ricci and *-Ricci {'para-' if model.para else ''}Hermitian ({letter}{i})",
            PASS if hermitian_ricci_check(model, i) else FAIL,
            None,
            "plumbing",
        )
    if crosscheck:
        report.add(
            "general twistor-curvature formula vs explicit blocks",
            INFO,
            general_blocks_crosscheck(model),
            "general curvature of twistor spaces",
        )
    return report


def _solver_check(report, name, anchor, fn):
    def run():
        roots = fn()
        return True, [_value(r) for r in roots]

    return report.expect(name, anchor, run)


def _variation_checks(report: VerificationReport, n: int, convention: str) -> None:
    for conv in EINSTEIN_CONVENTIONS:
        primary = conv == convention

        def run(conv=conv):
            res = einstein_t_values(n, conv)
            return True, {"values": [_value(v) for v in res.values], "note": res.note}

        check = report.expect(f"canonical variation Einstein t ({conv})", "Einstein canonical variation g_t", run)
        if not primary and check.status == PASS:
            report.checks[-1] = Check(check.name, INFO, check.value, check.anchor)


def cmd_solve(kind: str, n: int, t, convention: str = "paper") -> VerificationReport:
    if convention not in EINSTEIN_CONVENTIONS:
        raise ValueError(f"convention must be one of {EINSTEIN_CONVENTIONS}, got {convention!r}")
    report = VerificationReport(
        "solve",
        {"kind": kind, "n": n, "t": _scalar_param(t)},
        conventions=conventions(n, kind, einstein_convention=convention),
        order=_order(kind, n, scalar(t)),
    )
    letter = "P" if kind == "reflector" else "I"
    _solver_check(report, "Einstein Sc", f"Einstein condition for the {kind} space",
                  lambda: einstein_critical_sc(kind, n, t))
    for i in (1, 2):
        _solver_check(report, f"*-Einstein Sc ({letter}{i})", f"*-Einstein condition for the {kind} space",
                      lambda i=i: star_einstein_critical_sc(kind, i, n, t))
    for i in (1, 2):
        _solver_check(report, f"{GRAY_CLASSES[kind][0]} Sc ({letter}{i})", f"Gray classes of the {kind} space",
                      lambda i=i: ah1_critical_sc(kind, i, n, t))
    _variation_checks(report, n, convention)
    return report


def cmd_solve_variation(n: int, convention: str = "paper") -> VerificationReport:
    if convention not in EINSTEIN_CONVENTIONS:
        raise ValueError(f"convention must be one of {EINSTEIN_CONVENTIONS}, got {convention!r}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    report = VerificationReport("solve-variation", {"n": n}, conventions=conventions(einstein_convention=convention),
                                order=_order(n))
    _variation_checks(report, n, convention)
    return report


# ---------------------------------------------------------------------------
# so(2,1) and mixed 3-structures


def _lie_algebra_checks(report: VerificationReport) -> None:
    for which in ("plus", "minus"):
        basis = so21_basis(which)

        def table(basis=basis, which=which):
            got = [list(bracket(basis[i - 1], basis[j - 1]).coords) for i, j in BRACKET_PAIRS]
            want = [list(w) for w in DISPLAYED_BRACKETS[which]]
            return all(is_zero(a - b) for g, w in zip(got, want) for a, b in zip(g, w)), got

        report.expect(f"so(2,1) brackets in B{'+' if which == 'plus' else '-'}", "so(2,1) bracket table", table)
        for i in (1, 2, 3):
            def ad(i=i, which=which):
                got = ad_matrix(i, which)
                return all(is_zero(a - b) for a, b in zip(got.ravel(), np.ravel(DISPLAYED_AD[which][i - 1]))), got

            sign = "" if which == "plus" else "-"
            report.expect(f"ad({sign}e{i})", "so(2,1) ad matrices", ad)
    for i in (1, 2, 3):
        dev = max(float(np.max(np.abs(exp_generator(s, i) - exp_series(s, i)))) for s in EXP_SAMPLES)
        report.add(f"exp(s e{i}) closed form vs 20-term series", PASS if dev < 1e-10 else FAIL,
                   {"max_deviation": dev, "samples": list(EXP_SAMPLES)}, "so(2,1) one-parameter subgroups")
    report.add(
        "exponential labels",
        INFO,
        "the third displayed exponential is labelled exp(te2) but is the rotation exp(te3)",
        "so(2,1) one-parameter subgroups",
    )


def cmd_verify_mixed(n: int, which: str, convention: str = "paper") -> VerificationReport:
    if convention not in EINSTEIN_CONVENTIONS:
        raise ValueError(f"convention must be one of {EINSTEIN_CONVENTIONS}, got {convention!r}")
    if which not in ("sphere", "hyperbolic"):
        raise ValueError(f"which must be 'sphere' or 'hyperbolic', got {which!r}")
    report = VerificationReport(
        "verify-mixed", {"n": n, "which": which}, conventions=conventions(einstein_convention=convention),
        order=_order(which, n),
    )
    _lie_algebra_checks(report)
    try:
        s = canonical_hyperquadric(n, which)
    except VerificationError as exc:
        report.add("mixed 3-structure axioms", FAIL, {"error": str(exc)}, "mixed 3-structure axioms")
        return report
    report.conventions["xi_signs"] = list(s.xi_signs)
    bad = check_mixed3_axioms(s)
    report.add("mixed 3-structure axioms", PASS if not bad else FAIL,
               {"violations": bad, "xi_signs": list(s.xi_signs)}, "mixed 3-structure axioms")
    expected_sign = "negative" if which == "sphere" else "positive"
    report.add("structure sign", PASS if s.sign == expected_sign else FAIL,
               {"sign": s.sign, "eps": list(s.eps)}, "canonical mixed 3-Sasakian examples")
    r = gauss_curvature_tensor(s)
    bad = sasakian_curvature_identity_check(r, s)
    report.add("R(E,F)xi_a = tau_a(eta_a(F)E - eta_a(E)F)", PASS if not bad else FAIL, bad[:1],
               "mixed 3-Sasakian curvature identity")
    eps = -1 if s.sign == "positive" else 1
    lam = mixed3_einstein_constant(n, s.sign or expected_sign)

    def einstein():
        got = hyperquadric_einstein_constant(s)
        return is_zero(got - lam), {"lambda": got, "closed_form": lam}

    report.expect("Einstein constant (4n+2) eps", "mixed 3-Sasakian manifolds are Einstein", einstein)

    def variation():
        v, h, m = canonical_variation_ricci(n, eps, 1)
        return is_zero(v - lam) and is_zero(h - lam) and is_zero(m), [v, h, m]

    report.expect("rho_t at t = 1", "Ricci of the canonical variation", variation)
    _variation_checks(report, n, convention)
    return report


# ---------------------------------------------------------------------------
# full suite


def _bundle_points(kind: str, n: int, t) -> list:
    """Standard scalar curvatures plus every solver root, in ascending order."""
    pts = [scalar(sc) for sc in STANDARD_SC]
    roots = list(einstein_critical_sc(kind, n, t, verify=False))
    for i in (1, 2):
        roots += star_einstein_critical_sc(kind, i, n, t, verify=False)
        roots += ah1_critical_sc(kind, i, n, t, verify=False)
    for r in roots:
        if not _contains(pts, r):
            pts.append(r)
    return sorted(pts, key=lambda v: (float(v), str(v)))


def full_suite(progress: Callable[[str], None] | None = None) -> SuiteReport:
    """Every command over the standard grid."""
    reports: list[VerificationReport] = []

    def run(rep):
        if progress:
            progress(f"{rep.suite} {_format_params(rep.parameters)}")
        reports.append(rep)

    for n in STANDARD_N:
        for sc in BASE_SC:
            run(cmd_verify_base(n, sc))
    for kind in ("twistor", "reflector"):
        for n in STANDARD_N:
            for t in STANDARD_T:
                run(cmd_solve(kind, n, t))
                for sc in _bundle_points(kind, n, scalar(t)):
                    run(cmd_verify_bundle(kind, n, t, sc, structures=(1, 2)))
    for n in VARIATION_N:
        run(cmd_solve_variation(n))
    for n in MIXED_N:
        for which in ("sphere", "hyperbolic"):
            run(cmd_verify_mixed(n, which))
    return SuiteReport("full-suite", reports, conventions=conventions())
