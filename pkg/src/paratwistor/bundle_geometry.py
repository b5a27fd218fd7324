"""Pointwise models of the twistor space Z- and the reflector space Z+.

A tangent space of ``Z`` splits into a two-dimensional vertical part (the
subspace m3 = Span{J1, J2} for the twistor space, m1 = Span{J2, J3} for the
reflector space) and a horizontal copy of the base R^{4n}.  Coordinates put
the two vertical basis matrices first.  The metric is ``h_t = t (A, B)`` on
the vertical part and ``g`` on the horizontal part.

The curvature ``K`` is filled from the explicit paraquaternionic Kaehler block
formulas and closed under the curvature symmetries; a symmetry-derived entry
that disagrees with a formula-filled one is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from . import tensor_core
from .base_curvature import SpaceFormModel, _require_scope, build_space_form
from .pq_algebra import VerticalSubspace, vertical_subspace
from .surd import surd
from .tensor_core import (
    PseudoEuclideanSpace,
    VerificationError,
    all_zero,
    apply_endomorphism,
    as_array,
    block_sum,
    first_nonzero,
    identity,
    is_zero,
    nonzero_mask,
    pullback,
    ricci_contract,
    scalar,
    star_ricci_contract,
    validate_curvature_symmetries,
    worst_entry,
    zeros,
)

Kind = Literal["twistor", "reflector"]

#: default adjoint mode per kind; the reflector space has no anti-isometry
#: P1 for the frame-transpose inner product (that inner product is definite
#: on m1), so it uses the metric adjoint
DEFAULT_ADJOINT_MODE = {"twistor": "frame-transpose", "reflector": "metric-adjoint"}

GRAY_CLASSES = {"twistor": ("AH1", "AH2", "AH3"), "reflector": ("APH1", "APH2", "APH3")}

V = slice(0, 2)


class BlockConflictError(VerificationError):
    """A formula-filled curvature entry contradicts a symmetry-derived one."""


@dataclass(frozen=True, eq=False)
class BundleModel:
    kind: Kind
    n: int
    t: object
    Sc: object
    base: SpaceFormModel
    vertical: VerticalSubspace
    h: np.ndarray
    structures: tuple[np.ndarray, np.ndarray]
    adjoint_mode: str

    @property
    def total_dim(self) -> int:
        return 4 * self.n + 2

    @property
    def space(self) -> PseudoEuclideanSpace:
        return PseudoEuclideanSpace(self.h, label=f"Z{'-' if self.kind == 'twistor' else '+'}")

    @property
    def anchor(self) -> np.ndarray:
        """``J3`` (twistor) or ``J1`` (reflector): the structure on the horizontal part."""
        j1, _, j3 = self.base.triple.J
        return j3 if self.kind == "twistor" else j1

    @property
    def para(self) -> bool:
        return self.kind == "reflector"

    def structure(self, i: int) -> np.ndarray:
        if i not in (1, 2):
            raise ValueError(f"structure index must be 1 or 2, got {i}")
        return self.structures[i - 1]

    @cached_property
    def K(self) -> np.ndarray:
        return curvature_blocks(self)


# ---------------------------------------------------------------------------
# construction


def _check_kind(kind: str) -> None:
    if kind not in ("twistor", "reflector"):
        raise ValueError(f"kind must be 'twistor' or 'reflector', got {kind!r}")


def build_bundle_model(kind: str, n: int, Sc, t, adjoint_mode: str | None = None) -> BundleModel:
    """Assemble ``(Z, h_t, S_1, S_2)`` over the space form with scalar curvature ``Sc``."""
    _check_kind(kind)
    _require_scope(n)
    t = scalar(t)
    if is_zero(t):
        raise ValueError("t must be nonzero (h_t is defined for t != 0)")
    mode = adjoint_mode or DEFAULT_ADJOINT_MODE[kind]
    # the horizontal block is re-verified through the Ricci closed forms
    base = build_space_form(n, Sc, verify=False)
    vert = vertical_subspace(base.triple, kind, mode)
    h = block_sum(t * vert.gram, base.space.metric)

    j1, _, j3 = base.triple.J
    anchor = j3 if kind == "twistor" else j1
    # column b holds the coordinates of anchor @ A_b
    sv = as_array(np.stack([vert.coordinates(anchor @ b) for b in vert.basis], axis=1))
    structures = (block_sum(sv, anchor), block_sum(-sv, anchor))
    model = BundleModel(kind, n, t, base.Sc, base, vert, h, structures, mode)

    bad = structure_violations(model)
    if bad:
        hint = ""
        if kind == "reflector" and mode == "frame-transpose":
            hint = " (the frame-transpose inner product is definite on m1; use metric-adjoint)"
        raise ValueError(f"{kind} model in {mode} mode is inconsistent: {bad}{hint}")
    sym = validate_curvature_symmetries(model.K)
    if sym:
        raise VerificationError(f"assembled curvature violates {sym[0].identity} at {sym[0].witness}")
    return model


def structure_violations(model: BundleModel) -> list[str]:
    """Failed Hermitian / para-Hermitian compatibility relations of ``S_1``, ``S_2``."""
    d, h = model.total_dim, model.h
    ident = identity(d)
    bad = []
    for i, s in enumerate(model.structures, start=1):
        name = f"{'P' if model.para else 'I'}{i}"
        if model.para:
            if not all_zero(s @ s - ident):
                bad.append(f"{name}^2 = Id")
            if not is_zero(np.trace(s)):
                bad.append(f"{name} eigenspaces of equal dimension")
            if not all_zero(pullback(h, s) + h):
                bad.append(f"h({name}X, {name}Y) = -h(X,Y)")
        else:
            if not all_zero(s @ s + ident):
                bad.append(f"{name}^2 = -Id")
            if not all_zero(pullback(h, s) - h):
                bad.append(f"h({name}X, {name}Y) = h(X,Y)")
    return bad


def vertical_signature(model: BundleModel) -> tuple[int, int]:
    """``(minus, plus)`` count of ``h_t`` on the vertical part (diagonal gram)."""
    return PseudoEuclideanSpace(model.h[V, V]).signature


# ---------------------------------------------------------------------------
# curvature


def _coefficients(kind: str, n: int, Sc, t):
    c = Sc * Sc / (64 * n * (n + 2) ** 2)
    lin = t * Sc / (8 * n * (n + 2))
    if kind == "twistor":
        return -t * t * c + lin, t * t * c, c
    return -t * t * c - lin, -t * t * c, c


def mixed_coefficients(model: BundleModel):
    """``(c1, c2)`` in ``K(A,X,B,Y) = c1 (SA,B) g(SX,Y) + c2 (A,B) g(X,Y)``."""
    c1, c2, _ = _coefficients(model.kind, model.n, model.Sc, model.t)
    return c1, c2


def _horizontal_bracket(kind: str, forms) -> np.ndarray:
    """The ``{...}`` correction of the horizontal block; ``forms[a][x, y] = g(J_a X, Y)``."""

    def yz_xt(o):  # g(Y,JZ) g(X,JT)
        return np.einsum("zy,tx->xyzt", o, o)

    def xz_yt(o):  # g(X,JZ) g(Y,JT)
        return np.einsum("zx,ty->xyzt", o, o)

    def xy_zt(o):  # g(X,JY) g(Z,JT)
        return np.einsum("yx,tz->xyzt", o, o)

    o1, o2, o3 = forms
    if kind == "twistor":
        return sum(yz_xt(o) - xz_yt(o) - 2 * xy_zt(o) for o in (o1, o2))
    return (
        -yz_xt(o2) + yz_xt(o3)
        + xz_yt(o2) - xz_yt(o3)
        + 2 * xy_zt(o2) - 2 * xy_zt(o3)
    )


_GENERATORS = (((1, 0, 2, 3), -1), ((0, 1, 3, 2), -1), ((2, 3, 0, 1), 1))


class _BlockFiller:
    """Dense 4-tensor with a fill mask; refuses contradictory writes."""

    def __init__(self, d: int):
        self.k = zeros((d, d, d, d))
        self.mask = np.zeros((d, d, d, d), dtype=bool)
        self.h = slice(2, d)

    def fill(self, key, block, family: str) -> None:
        block = np.broadcast_to(np.asarray(block, dtype=self.k.dtype), self.k[key].shape)
        region, seen = self.k[key], self.mask[key]
        self._compare(region[seen], block[seen], family)
        region[...] = block
        seen[...] = True

    @staticmethod
    def _compare(old, new, family):
        diff = np.asarray(old) - np.asarray(new)
        if diff.size and nonzero_mask(diff).any():
            raise BlockConflictError(f"curvature block {family} contradicts an earlier entry")

    def close(self) -> np.ndarray:
        changed = True
        while changed:
            changed = False
            for perm, sign in _GENERATORS:
                img, imask = sign * self.k.transpose(perm), self.mask.transpose(perm)
                both = self.mask & imask
                where = first_nonzero(np.where(both, self.k - img, 0))
                if where is not None:
                    raise BlockConflictError(
                        f"symmetry {perm} (sign {sign}) contradicts a filled entry at {where}"
                    )
                new = imask & ~self.mask
                if new.any():
                    self.k[new] = img[new]
                    self.mask |= new
                    changed = True
        if not self.mask.all():
            raise VerificationError(f"curvature entry {tuple(np.argwhere(~self.mask)[0])} never filled")
        return self.k


def curvature_blocks(model: BundleModel) -> np.ndarray:
    """The curvature tensor ``K`` of ``(Z, h_t)`` on the ``4n+2`` coordinate frame."""
    kind, n, t, Sc = model.kind, model.n, model.t, model.Sc
    vert, base = model.vertical, model.base
    g, d = base.space.metric, model.total_dim
    s = model.anchor
    gram = vert.gram
    sa = as_array([[vert.inner(s @ a, b) for b in vert.basis] for a in vert.basis])  # (SA_a, A_b)
    gs = s.T @ g  # g(SX, Y)
    c1, c2, c = _coefficients(kind, n, Sc, t)

    f = _BlockFiller(d)
    H = f.h
    f.fill((V, V, V, V), (t / n) * np.multiply.outer(sa, sa), "vertical^4")
    f.fill((V, V, V, H), 0, "vertical^3 x horizontal")
    mixed = c1 * np.einsum("ab,xy->axby", sa, gs) + c2 * np.einsum("ab,xy->axby", gram, g)
    f.fill((V, H, V, H), mixed, "mixed")
    f.fill((H, H, H, V), 0, "horizontal^3 x vertical")
    forms = [base.triple.fundamental_form(a) for a in (1, 2, 3)]
    f.fill((H, H, H, H), base.R - t * c * _horizontal_bracket(kind, forms), "horizontal^4")
    # K(A,B,X,Y) is not displayed; first Bianchi gives K(A,X,B,Y) - K(B,X,A,Y)
    vvhh = (mixed - mixed.transpose(2, 1, 0, 3)).transpose(0, 2, 1, 3)
    f.fill((V, V, H, H), vvhh, "vertical^2 x horizontal^2 (Bianchi)")
    return f.close()


# ---------------------------------------------------------------------------
# Ricci and *-Ricci


def _block_coefficients(form: np.ndarray, h: np.ndarray, what: str):
    """``(cv, ch)`` with ``form = cv h`` on vertical, ``ch h`` on horizontal, 0 mixed."""
    H = slice(2, h.shape[0])
    if not all_zero(form[V, H]) or not all_zero(form[H, V]):
        raise VerificationError(f"{what}: mixed vertical-horizontal block is nonzero")
    cv = tensor_core.proportionality(form[V, V], h[V, V])
    ch = tensor_core.proportionality(form[H, H], h[H, H])
    if cv is None or ch is None:
        raise VerificationError(f"{what}: a diagonal block is not a multiple of h_t")
    return cv, ch


def ricci_closed_form(kind: str, n: int, Sc, t):
    """The displayed ``(vertical, horizontal)`` coefficients of Ricci against ``h_t``."""
    Sc, t = scalar(Sc), scalar(t)
    q = t * Sc * Sc / (16 * (n + 2) ** 2)
    if kind == "twistor":
        return q + 1 / (n * t), Sc / (4 * n) - q / n
    return -q - 1 / (n * t), Sc / (4 * n) + q / n


def star_ricci_closed_form(kind: str, i: int, n: int, Sc, t):
    """The displayed ``(vertical, horizontal)`` coefficients of *-Ricci for structure ``i``."""
    Sc, t = scalar(Sc), scalar(t)
    q = t * Sc * Sc / (16 * (n + 2) ** 2)
    lin = Sc / (2 * (n + 2))
    inv = 1 / (n * t)
    if kind == "twistor":
        if i == 1:
            return -q + lin + inv, Sc * (n + 1) / (4 * n * (n + 2))
        return q - lin + inv, q / n + Sc * (n - 1) / (4 * n * (n + 2))
    if i == 1:
        return -q - lin + inv, -Sc * (n + 1) / (4 * n * (n + 2))
    return q + lin + inv, q / n - Sc * (n - 1) / (4 * n * (n + 2))


def _agree(pair_a, pair_b) -> bool:
    return all(is_zero(a - b) for a, b in zip(pair_a, pair_b))


def bundle_ricci(model: BundleModel, K: np.ndarray | None = None):
    """Contract ``K``; return the block coefficients, checked against the closed form."""
    rho = ricci_contract(model.K if K is None else K, model.space)
    got = _block_coefficients(rho, model.h, "Ricci")
    want = ricci_closed_form(model.kind, model.n, model.Sc, model.t)
    if not _agree(got, want):
        raise VerificationError(f"Ricci coefficients {got} differ from closed form {want}")
    return got


def bundle_star_ricci(model: BundleModel, i: int, K: np.ndarray | None = None):
    """Contract ``K`` against structure ``i``; checked against the closed form."""
    rho = star_ricci_contract(model.K if K is None else K, model.structure(i), model.space)
    got = _block_coefficients(rho, model.h, f"*-Ricci ({i})")
    want = star_ricci_closed_form(model.kind, i, model.n, model.Sc, model.t)
    if not _agree(got, want):
        raise VerificationError(f"*-Ricci coefficients {got} differ from closed form {want}")
    return got


def is_einstein(model: BundleModel) -> bool:
    cv, ch = bundle_ricci(model)
    return is_zero(cv - ch)


def is_star_einstein(model: BundleModel, i: int) -> bool:
    cv, ch = bundle_star_ricci(model, i)
    return is_zero(cv - ch)


# ---------------------------------------------------------------------------
# Gray classes


@dataclass(frozen=True)
class GrayClassReport:
    gray_class: str
    holds: bool
    worst_violation: object
    witness: tuple[int, ...] | None

    def as_dict(self) -> dict:
        from .surd import format_exact

        return {
            "class": self.gray_class,
            "holds": self.holds,
            "worst_violation": format_exact(self.worst_violation)
            if tensor_core.is_exact()
            else float(self.worst_violation),
            "witness": list(self.witness) if self.witness is not None else None,
        }


def gray_residual(k: np.ndarray, s: np.ndarray, gray_class: str) -> np.ndarray:
    """``lhs - rhs`` of a Gray (AH) or para-Gray (APH) identity."""
    sign = -1 if gray_class.startswith("APH") else 1
    level = gray_class[-1]

    def j(arr, *axes):
        for ax in axes:
            arr = apply_endomorphism(arr, s, ax)
        return arr

    if level == "1":
        return k - sign * j(k, 2, 3)
    if level == "2":
        k0 = j(k, 0)
        return k - sign * (j(k0, 1) + j(k0, 2) + j(k0, 3))
    if level == "3":
        return k - j(k, 0, 1, 2, 3)
    raise ValueError(f"unknown Gray class {gray_class!r}")


def gray_class_check(model: BundleModel, i: int, gray_class: str, K: np.ndarray | None = None) -> GrayClassReport:
    """Exhaustive check of one Gray / para-Gray identity for structure ``i``."""
    if gray_class not in GRAY_CLASSES[model.kind]:
        raise ValueError(
            f"{gray_class} does not apply to the {model.kind} space; use one of {GRAY_CLASSES[model.kind]}"
        )
    res = gray_residual(model.K if K is None else K, model.structure(i), gray_class)
    where, value = worst_entry(res)
    if where is None:
        return GrayClassReport(gray_class, True, scalar(0), None)
    return GrayClassReport(gray_class, False, abs(value), where)


# ---------------------------------------------------------------------------
# critical scalar curvatures


def _sorted(values):
    return tuple(sorted(values, key=lambda v: (float(v), str(v))))


def _mirror(kind: str) -> int:
    return 1 if kind == "twistor" else -1


def _verify_roots(roots, predicate, n: int, t, kind: str, what: str) -> None:
    for sc in roots:
        if not predicate(build_bundle_model(kind, n, sc, t)):
            raise VerificationError(f"{what}: Sc = {sc} is not a root")
    probe = roots[0] + 1
    if predicate(build_bundle_model(kind, n, probe, t)):
        raise VerificationError(f"{what}: non-root Sc = {probe} also passes")


def einstein_critical_sc(kind: str, n: int, t, verify: bool = True):
    """Scalar curvatures at which ``(Z, h_t)`` is Einstein, ascending.

    Twistor: ``4(n+2)/t`` and ``4(n+2)/((n+1)t)``; the reflector values are negated.
    """
    _check_kind(kind)
    _require_scope(n)
    t = scalar(t)
    if is_zero(t):
        raise ValueError("t must be nonzero")
    m = _mirror(kind)
    roots = _sorted({m * 4 * (n + 2) / t, m * 4 * (n + 2) / ((n + 1) * t)})
    if verify:
        _verify_roots(roots, is_einstein, n, t, kind, "Einstein")
    return roots


def star_einstein_quadratic(kind: str, i: int, n: int):
    """Coefficients ``(a, b, c)`` of ``a s^2 + b s + c = 0`` in ``s = t Sc / (4(n+2))``.

    The left side is ``n t (vertical - horizontal)`` of the *-Ricci closed form.
    """
    m = _mirror(kind)
    if i == 1:
        return -n, m * (n - 1), 1
    return n - 1, -m * (3 * n - 1), 1


def star_einstein_critical_sc(kind: str, i: int, n: int, t, verify: bool = True):
    """Scalar curvatures at which ``(Z, S_i, h_t)`` is *-Einstein, ascending.

    For ``i = 2`` the roots live in Q(sqrt(9n^2 - 10n + 5)) and are returned
    as exact :class:`~paratwistor.surd.QuadraticSurd` values.
    """
    _check_kind(kind)
    if i not in (1, 2):
        raise ValueError(f"structure index must be 1 or 2, got {i}")
    if n < 2:
        raise ValueError(f"n={n}: the *-Einstein roots need n >= 2 (division by n - 1)")
    t = scalar(t)
    if is_zero(t):
        raise ValueError("t must be nonzero")
    m = _mirror(kind)
    scale = 4 * (n + 2) / t  # Sc = scale * s
    if i == 1:
        svals = [m * scalar(1), -m * scalar(1) / n]
    else:
        a, b, _ = star_einstein_quadratic(kind, 2, n)
        disc = b * b - 4 * a
        if tensor_core.is_exact():
            svals = [surd(scalar(-b) / (2 * a), sgn * scalar(1) / (2 * a), disc) for sgn in (1, -1)]
        else:
            svals = [(-b + sgn * math.sqrt(disc)) / (2 * a) for sgn in (1, -1)]
    for s in svals:
        a, b, c = star_einstein_quadratic(kind, i, n)
        if not is_zero(a * s * s + b * s + c):
            raise VerificationError(f"s = {s} does not solve the *-Einstein quadratic")
    roots = _sorted({scale * s for s in svals})
    if verify:
        _verify_roots(list(roots), lambda mdl: is_star_einstein(mdl, i), n, t, kind, f"*-Einstein ({i})")
    return roots


def ah1_critical_sc(kind: str, i: int, n: int, t, verify: bool = True):
    """Scalar curvatures at which the first Gray (para-Gray) identity holds, ascending.

    Structure 1: ``0`` and ``4(n+2)/t`` (negated for the reflector space);
    structure 2: ``0`` only.
    """
    _check_kind(kind)
    _require_scope(n)
    if i not in (1, 2):
        raise ValueError(f"structure index must be 1 or 2, got {i}")
    t = scalar(t)
    if is_zero(t):
        raise ValueError("t must be nonzero")
    if i == 2:
        roots = (scalar(0),)
    else:
        roots = _sorted({scalar(0), _mirror(kind) * 4 * (n + 2) / t})
    if verify:
        cls = GRAY_CLASSES[kind][0]
        _verify_roots(list(roots), lambda mdl: gray_class_check(mdl, i, cls).holds, n, t, kind, cls)
    return roots


# ---------------------------------------------------------------------------
# Hermitian Ricci


def hermitian_ricci_check(model: BundleModel, i: int, K: np.ndarray | None = None) -> bool:
    """Whether Ricci and *-Ricci satisfy ``rho(S.,S.) = sigma rho`` like ``h_t`` does.

    ``sigma`` is +1 for the twistor space and -1 for the reflector space.
    """
    k = model.K if K is None else K
    s = model.structure(i)
    sigma = -1 if model.para else 1
    for rho in (ricci_contract(k, model.space), star_ricci_contract(k, s, model.space)):
        if not all_zero(pullback(rho, s) - sigma * rho):
            return False
    return True


# ---------------------------------------------------------------------------
# general formula cross-check


def _factor(explicit: np.ndarray, general: np.ndarray):
    """``f`` with ``general = f * explicit``, ``None`` if not proportional."""
    where = first_nonzero(explicit)
    if where is None:
        return scalar(1) if all_zero(general) else None
    f = general[where] / explicit[where]
    return f if all_zero(general - f * explicit) else None


def general_blocks_crosscheck(model: BundleModel) -> dict:
    """Compare the explicit blocks with the general twistor-curvature formula.

    The general formula is evaluated with the inner product of the model and
    the curvature form ``Omega''_a(X,Y) = -tau_a Sc/(8n(n+2)) g(X, J_a Y)``
    projected on the vertical subspace.  Each block reports the factor ``f``
    with ``general = f * explicit``, or ``None`` when the two are not
    proportional.  Nothing here fails.
    """
    from .pq_algebra import TAU

    vert, base, t, n = model.vertical, model.base, model.t, model.n
    g, basis, gram = base.space.metric, vert.basis, vert.gram
    alphas = [next(a for a in range(3) if base.triple.J[a] is b) for b in basis]
    # w[k, x, y]: component of Omega_m(X, Y) along basis[k]
    w = np.stack([(-TAU[a] * model.Sc / (8 * n * (n + 2))) * (g @ base.triple.J[a]) for a in alphas])
    ip = np.einsum("ak,kxy->axy", gram, w)  # (A_a, Omega(X, Y))
    pair = np.einsum("kxy,kl,lzt->xyzt", w, gram, w)  # (Omega(X,Y), Omega(Z,T))

    def comm(a, b):
        return a @ b - b @ a

    brackets = [[comm(a, b) for b in basis] for a in basis]
    # vertical^4: -t([A,B],[C,D])
    gen_v = zeros((2, 2, 2, 2))
    for a, b, c, e in np.ndindex(2, 2, 2, 2):
        gen_v[a, b, c, e] = -t * vert.inner(brackets[a][b], brackets[c][e])
    # mixed: t/2 ([A,B], Omega(X,Y)) - t^2/4 sum_ij g^{ij} (B, Omega(X,E_i)) (A, Omega(Y,E_j))
    d4 = 4 * n
    gen_m = zeros((2, d4, 2, d4))
    for a, b in np.ndindex(2, 2):
        # [A,B] may leave the vertical span, so pair it with each basis direction of Omega
        br = [vert.inner(brackets[a][b], basis[k]) for k in range(2)]
        first = br[0] * w[0] + br[1] * w[1]
        second = ip[b] @ base.space.inverse @ ip[a].T
        gen_m[a, :, b, :] = (t / 2) * first - (t * t / 4) * second
    # horizontal^4: R - t/4 {(Om(Y,Z),Om(X,T)) - (Om(X,Z),Om(Y,T)) - 2 (Om(X,Y),Om(Z,T))}
    gen_h = base.R - (t / 4) * (
        np.einsum("yzxt->xyzt", pair) - np.einsum("xzyt->xyzt", pair) - 2 * pair
    )
    K, H = model.K, slice(2, model.total_dim)
    out = {}
    for name, explicit, general in (
        ("vertical^4", K[V, V, V, V], gen_v),
        ("mixed", K[V, H, V, H], gen_m),
        ("horizontal^4", K[H, H, H, H], gen_h),
    ):
        f = _factor(explicit, general)
        out[name] = {"agree": f is not None and is_zero(f - 1), "factor": f}
    return out
