"""Pointwise curvature of a paraquaternionic Kaehler space form.

The only data known about R are three identities relating R to its
``J_alpha``-twisted copies.  The model takes the constant
paraquaternionic-sectional-curvature ansatz

    R = (nu/4) [ s0 (g(Y,Z)g(X,T) - g(X,Z)g(Y,T))
                 + sum_a s_a tau_a (g(J_aY,Z)g(J_aX,T) - g(J_aX,Z)g(J_aY,T)
                                    - 2 g(J_aX,Y)g(J_aZ,T)) ]

and searches the sixteen sign choices ``(s0, s1, s2, s3)`` for the one that
satisfies all three identities.  The search runs once per ``n`` at a probe
value of the scalar curvature and is cached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import tensor_core
from .pq_algebra import TAU, ParaHypercomplexTriple, standard_triple
from .tensor_core import (
    PseudoEuclideanSpace,
    Violation,
    VerificationError,
    all_zero,
    apply_endomorphism,
    is_zero,
    curvature_operator,
    first_nonzero,
    proportionality,
    ricci_contract,
    scalar,
    validate_curvature_symmetries,
    worst_entry,
)


class DimensionScopeError(ValueError):
    """The curvature identities are only stated in dimension greater than four."""


class NotEinsteinError(VerificationError):
    """Ricci is not proportional to the metric."""

    def __init__(self, message: str, witness, deviation):
        super().__init__(message)
        self.witness = witness
        self.deviation = deviation


@dataclass(frozen=True, eq=False)
class SpaceFormModel:
    n: int
    Sc: object
    nu: object
    R: np.ndarray
    space: PseudoEuclideanSpace
    triple: ParaHypercomplexTriple
    signs: tuple[int, int, int, int]

    @property
    def dim(self) -> int:
        return 4 * self.n


def _outer(a: np.ndarray, b: np.ndarray, spec: str) -> np.ndarray:
    return np.einsum(spec, a, b)


def _metric_term(g: np.ndarray) -> np.ndarray:
    # g(Y,Z) g(X,T) - g(X,Z) g(Y,T)
    return _outer(g, g, "yz,xt->xyzt") - _outer(g, g, "xz,yt->xyzt")


def _j_term(omega: np.ndarray) -> np.ndarray:
    """The bracket of one J-family, with ``omega[x, y] = g(JX, Y)``."""
    return (
        _outer(omega, omega, "yz,xt->xyzt")
        - _outer(omega, omega, "xz,yt->xyzt")
        - 2 * _outer(omega, omega, "xy,zt->xyzt")
    )


def _ansatz(triple: ParaHypercomplexTriple, nu, signs) -> np.ndarray:
    g = triple.space.metric
    r = signs[0] * _metric_term(g)
    for alpha in range(3):
        r = r + signs[alpha + 1] * TAU[alpha] * _j_term(triple.fundamental_form(alpha + 1))
    return (nu / 4) * r


def _identity_residuals(r: np.ndarray, triple: ParaHypercomplexTriple, nu) -> list[tuple[str, np.ndarray]]:
    """Left minus right side of the three identities, complex structure first."""
    g = triple.space.metric
    gj = [g @ j for j in triple.J]  # gj[a][x, y] = g(X, J_a Y)

    def twisted(j):
        return apply_endomorphism(apply_endomorphism(r, j, 2), j, 3)

    def pair(a):
        return np.multiply.outer(gj[a], gj[a])

    j1, j2, j3 = triple.J
    return [
        (
            "R(X,Y,J3Z,J3T) - R = nu{g(X,J2Y)g(Z,J2T) + g(X,J1Y)g(Z,J1T)}",
            twisted(j3) - r - nu * (pair(1) + pair(0)),
        ),
        (
            "R(X,Y,J1Z,J1T) + R = nu{g(X,J3Y)g(Z,J3T) - g(X,J2Y)g(Z,J2T)}",
            twisted(j1) + r - nu * (pair(2) - pair(1)),
        ),
        (
            "R(X,Y,J2Z,J2T) + R = nu{g(X,J3Y)g(Z,J3T) - g(X,J1Y)g(Z,J1T)}",
            twisted(j2) + r - nu * (pair(2) - pair(0)),
        ),
    ]


def _violations(residuals) -> list[Violation]:
    out = []
    for name, res in residuals:
        where = first_nonzero(res)
        if where is not None:
            out.append(Violation(name, where, res[where]))
    return out


def reduced_scalar_curvature(n: int, Sc):
    """``nu = Sc / (4n(n+2))``."""
    return scalar(Sc) / (4 * n * (n + 2))


@lru_cache(maxsize=None)
def _pinned_signs(n: int) -> tuple[int, int, int, int]:
    # probe nu = 4 keeps every entry a plain integer
    with tensor_core.use_mode("exact"):
        triple = standard_triple(n)
        return _search_signs(triple, 4)


def _search_signs(triple: ParaHypercomplexTriple, nu) -> tuple[int, int, int, int]:
    n = triple.n
    found = []
    for signs in itertools.product((1, -1), repeat=4):
        r = _ansatz(triple, nu, signs)
        if not _violations(_identity_residuals(r, triple, nu)):
            found.append(signs)
    if len(found) != 1:
        raise VerificationError(
            f"space-form sign search for n={n} found {len(found)} admissible sign choices: {found}"
        )
    return found[0]


def ansatz_signs(n: int) -> tuple[int, int, int, int]:
    """``(s0, s1, s2, s3)`` chosen by the search for this ``n``."""
    return _pinned_signs(n)


def _require_scope(n: int) -> None:
    if not isinstance(n, int) or n < 2:
        raise DimensionScopeError(
            f"n={n}: the paraquaternionic Kaehler curvature identities and the Einstein "
            "property are stated for dimension 4n > 4, so n >= 2 is required"
        )


@lru_cache(maxsize=None)
def _unit_tensor(n: int, mode: str) -> np.ndarray:
    """The ansatz at ``nu = 1``; its symmetries and identities are checked once."""
    triple = standard_triple(n)
    r = _ansatz(triple, scalar(1), ansatz_signs(n))
    bad = validate_curvature_symmetries(r) + _violations(_identity_residuals(r, triple, scalar(1)))
    if bad:
        raise VerificationError(f"unit space form for n={n} failed its own checks: {bad[0]}")
    r.setflags(write=False)
    return r


def build_space_form(n: int, Sc, verify: bool = True) -> SpaceFormModel:
    """The space-form curvature tensor on R^{4n} with scalar curvature ``Sc``.

    ``R = nu R_1`` with ``R_1`` the unit tensor.  The identities are linear in
    ``(R, nu)``, so they hold for every ``Sc`` once they hold for ``R_1``;
    ``verify=True`` re-checks them (and the Einstein property) at this ``Sc``.
    """
    _require_scope(n)
    Sc = scalar(Sc)
    nu = reduced_scalar_curvature(n, Sc)
    if not is_zero(nu * 4 * n * (n + 2) - Sc):
        raise VerificationError("reduced scalar curvature does not reproduce Sc")
    triple = standard_triple(n)
    r = nu * _unit_tensor(n, tensor_core.current_mode())
    model = SpaceFormModel(n=n, Sc=Sc, nu=nu, R=r, space=triple.space, triple=triple, signs=ansatz_signs(n))
    if verify:
        bad = validate_curvature_symmetries(r) + check_pqk_identities(model)
        if bad:
            raise VerificationError(f"space form failed its own checks: {bad}")
        check_einstein(model)
    return model


def check_pqk_identities(model: SpaceFormModel) -> list[Violation]:
    """Exhaustive scan of the three curvature identities; empty means all hold."""
    return _violations(_identity_residuals(model.R, model.triple, model.nu))


def pqk_identity_report(model: SpaceFormModel) -> list[tuple[str, Violation | None]]:
    """Each identity by name with its first violation, or ``None`` when it holds."""
    out = []
    for name, res in _identity_residuals(model.R, model.triple, model.nu):
        bad = _violations([(name, res)])
        out.append((name, bad[0] if bad else None))
    return out


def ricci_two_forms(model: SpaceFormModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``rho_a(X,Y) = -(tau_a/2) Trace(Z -> J_a R(X,Y) Z)``, checked against its closed form.

    The closed form is ``rho_a(X,Y) = -tau_a Sc/(4(n+2)) g(X, J_a Y)``.
    """
    op = curvature_operator(model.R, model.space)  # op[x, y, k, z]
    g, n = model.space.metric, model.n
    forms = []
    for alpha, j in enumerate(model.triple.J):
        # Trace(J op(X,Y)) = sum_{z,k} J[z, k] op[x, y, k, z]
        trace = np.tensordot(op, j, axes=([2, 3], [1, 0]))
        rho = -TAU[alpha] * trace / 2
        closed = -TAU[alpha] * model.Sc / (4 * (n + 2)) * (g @ j)
        if not all_zero(rho - closed):
            raise VerificationError(f"Ricci 2-form rho_{alpha + 1} disagrees with its closed form")
        forms.append(rho)
    return tuple(forms)


def check_einstein(model: SpaceFormModel):
    """Return ``lambda`` with ``rho = lambda g``; it must equal ``Sc/(4n)``."""
    rho = ricci_contract(model.R, model.space)
    g = model.space.metric
    lam = proportionality(rho, g)
    if lam is None:
        c = rho[0, 0] / g[0, 0]
        where, dev = worst_entry(rho - c * g)
        raise NotEinsteinError(f"Ricci tensor is not proportional to g (worst entry {where})", where, dev)
    expected = model.Sc / (4 * model.n)
    if lam != expected and not tensor_core.is_zero(lam - expected):
        raise VerificationError(f"Einstein constant {lam} differs from Sc/4n = {expected}")
    return lam


def pin_ricci_sign(n: int = 2) -> int:
    """Contraction sign that makes the space form satisfy ``rho = (Sc/4n) g``.

    The textbook contraction ``sum g^{ij} R(E_i,X,Y,E_j)`` is tried first; the
    answer must agree with :data:`tensor_core.RICCI_SIGN`.
    """
    _require_scope(n)
    Sc = scalar(4 * n * (n + 2))
    triple = standard_triple(n)
    r = _ansatz(triple, reduced_scalar_curvature(n, Sc), ansatz_signs(n))
    target = Sc / (4 * n) * triple.space.metric
    for sign in (1, -1):
        if all_zero(ricci_contract(r, triple.space, sign=sign) - target):
            if sign != tensor_core.RICCI_SIGN:
                raise VerificationError(f"pinned Ricci sign {sign} disagrees with RICCI_SIGN")
            return sign
    raise VerificationError("no contraction sign gives rho = (Sc/4n) g")
