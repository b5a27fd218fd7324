"""so(2,1) data and pointwise mixed 3-structures.

The Lie algebra part covers the two bases ``B+ = {e1, e2, e3}`` and
``B- = {-e1, -e2, -e3}``, brackets, ad matrices and the closed-form one
parameter subgroups.  The structure part checks the mixed 3-structure axioms
on a (4n+3)-dimensional space, builds the canonical structures induced on the
pseudo-sphere and pseudo-hyperbolic hyperquadrics of R^{4n+4}, and covers the
Einstein constants of mixed 3-Sasakian manifolds and of the canonical
variation ``g_t``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .pq_algebra import EVEN_PERMUTATIONS, TAU, standard_triple
from .tensor_core import (
    PseudoEuclideanSpace,
    VerificationError,
    Violation,
    all_zero,
    as_array,
    curvature_operator,
    first_nonzero,
    identity,
    is_zero,
    proportionality,
    ricci_contract,
    scalar,
)

Which = Literal["plus", "minus"]

_E = (
    ((0, 0, 0), (0, 0, 2), (0, 2, 0)),
    ((0, 0, 2), (0, 0, 0), (2, 0, 0)),
    ((0, -2, 0), (2, 0, 0), (0, 0, 0)),
)

#: displayed brackets ``[b_i, b_j]`` for (i, j) = (1, 2), (2, 3), (3, 1), as coordinates
DISPLAYED_BRACKETS = {
    "plus": ((0, 0, 2), (-2, 0, 0), (0, -2, 0)),
    "minus": ((0, 0, -2), (2, 0, 0), (0, 2, 0)),
}

#: displayed matrices of ``ad(b_1), ad(b_2), ad(b_3)`` in each basis
DISPLAYED_AD = {
    "plus": (
        ((0, 0, 0), (0, 0, 2), (0, 2, 0)),
        ((0, 0, -2), (0, 0, 0), (-2, 0, 0)),
        ((0, 2, 0), (-2, 0, 0), (0, 0, 0)),
    ),
    "minus": (
        ((0, 0, 0), (0, 0, -2), (0, -2, 0)),
        ((0, 0, 2), (0, 0, 0), (2, 0, 0)),
        ((0, -2, 0), (2, 0, 0), (0, 0, 0)),
    ),
}

BRACKET_PAIRS = ((1, 2), (2, 3), (3, 1))


def generator(i: int) -> np.ndarray:
    """The matrix ``e_i`` for ``i`` in 1..3."""
    if i not in (1, 2, 3):
        raise ValueError(f"generator index must be 1, 2 or 3, got {i}")
    return as_array(_E[i - 1])


def _basis_sign(which: Which) -> int:
    if which not in ("plus", "minus"):
        raise ValueError(f"basis must be 'plus' or 'minus', got {which!r}")
    return 1 if which == "plus" else -1


@dataclass(frozen=True, eq=False)
class So21Element:
    """``a b_1 + b b_2 + c b_3`` in the basis ``B+`` or ``B-``."""

    coords: tuple
    which: Which = "plus"

    @property
    def matrix(self) -> np.ndarray:
        sign = _basis_sign(self.which)
        out = sum(scalar(c) * generator(i + 1) for i, c in enumerate(self.coords))
        return sign * out

    def __eq__(self, other):
        return (
            isinstance(other, So21Element)
            and self.which == other.which
            and all(is_zero(scalar(a) - scalar(b)) for a, b in zip(self.coords, other.coords))
        )

    __hash__ = None


def so21_basis(which: Which = "plus") -> tuple[So21Element, So21Element, So21Element]:
    _basis_sign(which)
    return tuple(So21Element(tuple(int(i == k) for i in range(3)), which) for k in range(3))


def coordinates(m: np.ndarray, which: Which = "plus") -> tuple:
    """Coordinates of a matrix in the chosen basis; raises if it is not in so(2,1)."""
    sign = _basis_sign(which)
    m = as_array(m)
    coords = tuple(sign * scalar(v) / 2 for v in (m[1, 2], m[0, 2], m[1, 0]))
    if not all_zero(So21Element(coords, which).matrix - m):
        raise VerificationError("matrix is not in the span of the so(2,1) basis")
    return coords


def bracket(a: So21Element, b: So21Element) -> So21Element:
    """Matrix commutator, expressed in the basis of ``a``."""
    if a.which != b.which:
        raise ValueError("both elements must use the same basis")
    ma, mb = a.matrix, b.matrix
    return So21Element(coordinates(ma @ mb - mb @ ma, a.which), a.which)


def ad_matrix(i: int, which: Which = "plus") -> np.ndarray:
    """Matrix of ``ad(b_i)``: column ``j`` holds the coordinates of ``[b_i, b_j]``."""
    basis = so21_basis(which)
    cols = [bracket(basis[i - 1], bj).coords for bj in basis]
    return as_array([[cols[j][r] for j in range(3)] for r in range(3)])


def exp_generator(s: float, i: int) -> np.ndarray:
    """Closed form of ``exp(s e_i)`` in floating point.

    ``e1`` and ``e2`` give hyperbolic rotations by ``2s``; ``e3`` gives the
    Euclidean rotation by ``2s`` in the first two coordinates.
    """
    ch, sh = math.cosh(2 * s), math.sinh(2 * s)
    if i == 1:
        return np.array([[1, 0, 0], [0, ch, sh], [0, sh, ch]], dtype=float)
    if i == 2:
        return np.array([[ch, 0, sh], [0, 1, 0], [sh, 0, ch]], dtype=float)
    if i == 3:
        c, sn = math.cos(2 * s), math.sin(2 * s)
        return np.array([[c, -sn, 0], [sn, c, 0], [0, 0, 1]], dtype=float)
    raise ValueError(f"generator index must be 1, 2 or 3, got {i}")


def exp_series(s: float, i: int, terms: int = 20) -> np.ndarray:
    """Truncated power series ``sum_k (s e_i)^k / k!`` in floating point."""
    m = float(s) * np.array(_E[i - 1], dtype=float)
    out, term = np.eye(3), np.eye(3)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


# ---------------------------------------------------------------------------
# mixed 3-structures


@dataclass(frozen=True, eq=False)
class MixedThreeStructure:
    """Pointwise ``(phi_a, xi_a, eta_a, g)``; endomorphisms act on coordinate columns."""

    phi: tuple[np.ndarray, np.ndarray, np.ndarray]
    xi: tuple[np.ndarray, np.ndarray, np.ndarray]
    eta: tuple[np.ndarray, np.ndarray, np.ndarray]
    g: np.ndarray
    label: str = field(default="")
    xi_signs: tuple[int, int, int] | None = field(default=None)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def space(self) -> PseudoEuclideanSpace:
        return PseudoEuclideanSpace(self.g, self.label)

    @property
    def eps(self) -> tuple:
        return tuple(x @ self.g @ x for x in self.xi)

    @property
    def sign(self) -> str | None:
        """``positive`` if ``eps = (1, 1, -1)``, ``negative`` if ``(-1, -1, 1)``."""
        eps = self.eps
        for name, want in (("positive", (1, 1, -1)), ("negative", (-1, -1, 1))):
            if all(is_zero(e - w) for e, w in zip(eps, want)):
                return name
        return None


def _first(name: str, residual: np.ndarray, prefix: tuple[int, ...]) -> list[Violation]:
    residual = np.asarray(residual)
    where = first_nonzero(residual)
    if where is None:
        return []
    return [Violation(name, prefix + where, residual[where])]


def check_mixed3_axioms(s: MixedThreeStructure) -> list[Violation]:
    """Every axiom of a metric mixed 3-structure; empty means all hold.

    Witness tuples start with the zero-based structure indices involved,
    followed by the offending frame index (or indices).
    """
    ident = identity(s.dim)
    phi, xi, eta, g = s.phi, s.xi, s.eta, s.g
    report: list[Violation] = []

    for a in range(3):
        report += _first(
            f"phi{a + 1}^2 = tau{a + 1}(-Id + eta{a + 1} (x) xi{a + 1})",
            phi[a] @ phi[a] - TAU[a] * (-ident + np.multiply.outer(xi[a], eta[a])),
            (a,),
        )
        report += _first(f"eta{a + 1}(xi{a + 1}) = 1", [eta[a] @ xi[a] - 1], (a,))
    for a in range(3):
        for b in range(3):
            if a != b:
                report += _first(f"eta{a + 1}(xi{b + 1}) = 0", [eta[a] @ xi[b]], (a, b))
    for a, b, c in EVEN_PERMUTATIONS:
        report += _first(
            f"phi{a + 1}(xi{b + 1}) = tau{b + 1} xi{c + 1}", phi[a] @ xi[b] - TAU[b] * xi[c], (a, b)
        )
        report += _first(
            f"phi{b + 1}(xi{a + 1}) = -tau{a + 1} xi{c + 1}", phi[b] @ xi[a] + TAU[a] * xi[c], (b, a)
        )
    for a, b, c in EVEN_PERMUTATIONS:
        report += _first(
            f"eta{a + 1} o phi{b + 1} = tau{c + 1} eta{c + 1}", eta[a] @ phi[b] - TAU[c] * eta[c], (a, b)
        )
        report += _first(
            f"eta{b + 1} o phi{a + 1} = -tau{c + 1} eta{c + 1}", eta[b] @ phi[a] + TAU[c] * eta[c], (b, a)
        )
    for a, b, c in EVEN_PERMUTATIONS:
        report += _first(
            f"phi{a + 1}phi{b + 1} - tau{a + 1} eta{b + 1} (x) xi{a + 1} = tau{c + 1} phi{c + 1}",
            phi[a] @ phi[b] - TAU[a] * np.multiply.outer(xi[a], eta[b]) - TAU[c] * phi[c],
            (a, b),
        )
        report += _first(
            f"-phi{b + 1}phi{a + 1} + tau{b + 1} eta{a + 1} (x) xi{b + 1} = tau{c + 1} phi{c + 1}",
            -phi[b] @ phi[a] + TAU[b] * np.multiply.outer(xi[b], eta[a]) - TAU[c] * phi[c],
            (b, a),
        )
    eps = s.eps
    for a in range(3):
        if not (is_zero(eps[a] - 1) or is_zero(eps[a] + 1)):
            report.append(Violation(f"g(xi{a + 1}, xi{a + 1}) = +-1", (a,), eps[a]))
            continue
        report += _first(
            f"g(phi{a + 1}X, phi{a + 1}Y) = tau{a + 1}[g(X,Y) - eps{a + 1} eta{a + 1}(X) eta{a + 1}(Y)]",
            phi[a].T @ g @ phi[a] - TAU[a] * (g - eps[a] * np.multiply.outer(eta[a], eta[a])),
            (a,),
        )
    if not report and s.sign is None:
        report.append(Violation("eps1 = eps2 = -eps3", (), eps[0]))
    return report


def _point(ambient_dim: int, which: str, p) -> np.ndarray:
    if p is not None:
        return as_array(p)
    out = as_array([0] * ambient_dim)
    # index 2 is a +1 direction of diag(-1,-1,1,1), index 0 a -1 direction
    out[2 if which == "sphere" else 0] = 1
    return out


def canonical_hyperquadric(n: int, which: str = "sphere", p=None) -> MixedThreeStructure:
    """Structure induced at ``p`` on ``<x,x> = +1`` (sphere) or ``-1`` (hyperbolic) in R^{4n+4}.

    ``xi_a = sigma_a J_a p`` with the signs ``sigma`` searched over all eight
    choices (the first admissible one is kept), ``eta_a = eps_a <., xi_a>``
    with ``eps_a = tau_a <p,p>``, and ``phi_a`` is the tangential part of ``J_a``.
    Tangent coordinates are the ambient coordinates with one index dropped
    (the first index ``k`` with ``<e_k, p> != 0``).
    """
    if which not in ("sphere", "hyperbolic"):
        raise ValueError(f"which must be 'sphere' or 'hyperbolic', got {which!r}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    triple = standard_triple(n + 1)
    G = triple.space.metric
    d = G.shape[0]
    p = _point(d, which, p)
    if p.shape != (d,):
        raise ValueError(f"point must have {d} coordinates")
    c = scalar(p @ G @ p)
    if is_zero(c):
        raise ValueError("p is a null vector; the hyperquadric is degenerate there")
    want = 1 if which == "sphere" else -1
    if not is_zero(c - want):
        raise ValueError(f"<p,p> = {c}, expected {want} for the {which}")

    gp = G @ p
    k = next(i for i in range(d) if not is_zero(gp[i]))
    keep = [i for i in range(d) if i != k]
    # columns e_i - (<e_i,p>/<e_k,p>) e_k, i != k: a tangent basis in which a
    # tangent vector's coordinates are its ambient ones with index k dropped
    embed = identity(d)[:, keep]
    embed[k, :] = -gp[keep] / scalar(gp[k])
    g = embed.T @ G @ embed

    def project(v):
        # columns of v minus their normal components
        return v - np.multiply.outer(p, gp @ v) / c

    phi = tuple(project(j @ embed)[keep, :] for j in triple.J)
    eps = tuple(TAU[a] * c for a in range(3))
    label = f"{'S' if which == 'sphere' else 'H'}^{4 * n + 3}"
    for sigma in itertools.product((-1, 1), repeat=3):
        xi_amb = [sigma[a] * (triple.J[a] @ p) for a in range(3)]
        xi = tuple(x[keep] for x in xi_amb)
        eta = tuple(eps[a] * (xi_amb[a] @ G @ embed) for a in range(3))
        s = MixedThreeStructure(phi, xi, eta, g, label=label, xi_signs=sigma)
        if not check_mixed3_axioms(s):
            return s
    raise VerificationError(f"no signs in xi_a = +-J_a p give a mixed 3-structure on the {which}")


def gauss_curvature_tensor(s: MixedThreeStructure, c=None) -> np.ndarray:
    """``R(X,Y,Z,T) = c (g(Y,Z) g(X,T) - g(X,Z) g(Y,T))`` on the tangent space.

    With ``c = <p,p>`` this is the Gauss-equation curvature of the hyperquadric.
    By default ``c`` is read off from the causal character of ``xi_3``.
    """
    g = s.g
    if c is None:
        c = s.eps[2] * TAU[2]
    return c * (np.einsum("yz,xt->xyzt", g, g) - np.einsum("xz,yt->xyzt", g, g))


def sasakian_curvature_identity_check(r: np.ndarray, s: MixedThreeStructure) -> list[Violation]:
    """``R(E,F) xi_a = tau_a (eta_a(F) E - eta_a(E) F)`` for all frame pairs."""
    if any(d != s.dim for d in np.shape(r)):
        raise ValueError("curvature tensor and structure live on different spaces")
    op = curvature_operator(r, s.space)  # op[x, y, k, z]
    ident = identity(s.dim)
    report = []
    for a in range(3):
        lhs = np.tensordot(op, s.xi[a], axes=([3], [0]))  # [e, f, k]
        eta = s.eta[a]
        rhs = TAU[a] * (
            np.einsum("f,ek->efk", eta, ident) - np.einsum("e,fk->efk", eta, ident)
        )
        report += _first(
            f"R(E,F)xi{a + 1} = tau{a + 1}(eta{a + 1}(F)E - eta{a + 1}(E)F)", lhs - rhs, (a,)
        )
    return report


def hyperquadric_einstein_constant(s: MixedThreeStructure):
    """Einstein constant of the Gauss tensor, with the trace ``Ric(Y,Z) = tr(X -> R(X,Y)Z)``."""
    rho = ricci_contract(gauss_curvature_tensor(s), s.space, sign=1)
    lam = proportionality(rho, s.g)
    if lam is None:
        raise VerificationError("Gauss tensor is not Einstein")
    return lam


def _eps_of(sign: str) -> int:
    if sign == "positive":
        return -1
    if sign == "negative":
        return 1
    raise ValueError(f"sign must be 'positive' or 'negative', got {sign!r}")


def mixed3_einstein_constant(n: int, sign: str):
    """``(4n+2) eps`` with ``eps = -1`` (positive structure) or ``+1`` (negative)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return scalar((4 * n + 2) * _eps_of(sign))


def _check_eps(eps) -> None:
    if eps not in (1, -1):
        raise ValueError(f"eps must be +1 or -1, got {eps}")


def canonical_variation_ricci(n: int, eps: int, t):
    """``(vertical, horizontal, mixed)`` coefficients of ``rho_t`` against ``g`` (not ``g_t``)."""
    _check_eps(eps)
    t = scalar(t)
    if t <= 0:
        raise ValueError(f"the canonical variation needs t > 0, got {t}")
    vertical = -4 * n * eps * t * t + (8 * n * eps + 4 * eps) * t - 2 * eps
    horizontal = -6 * eps * t + 4 * n * eps + 8 * eps
    return vertical, horizontal, scalar(0)


@dataclass(frozen=True)
class EinsteinTValues:
    convention: str
    values: tuple
    note: str | None = None


def einstein_t_values(n: int, convention: str = "paper") -> EinsteinTValues:
    """Positive ``t`` for which ``g_t`` is Einstein.

    ``paper``: vertical and horizontal coefficients of ``rho_t`` against ``g``
    agree, ``2n t^2 - (4n+5) t + (2n+5) = 0``.  ``metric-weighted``:
    ``rho_t = lambda g_t``, i.e. vertical = ``t`` times horizontal,
    ``(2n-3) t^2 - (2n-2) t + 1 = 0``.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    one = scalar(1)
    note = None
    if convention == "paper":
        roots = {one, scalar(2 * n + 5) / (2 * n)}
    elif convention == "metric-weighted":
        a = 2 * n - 3
        # discriminant 4(n-2)^2; roots 1 and 1/(2n-3)
        roots = {one, one / a}
        if n == 2:
            note = "double root t = 1 (the second root 1/(2n-3) coincides with 1)"
        roots = {r for r in roots if r > 0}
        if n == 1:
            note = "the other root is t = -1, excluded by t > 0"
    else:
        raise ValueError(f"convention must be 'paper' or 'metric-weighted', got {convention!r}")
    values = tuple(sorted(roots))
    for t in values:
        v, h, _ = canonical_variation_ricci(n, 1, t)
        ok = is_zero(v - h) if convention == "paper" else is_zero(v - t * h)
        if not ok:
            raise VerificationError(f"t = {t} does not make g_t Einstein ({convention})")
    return EinsteinTValues(convention, values, note)


def submersion_base_ricci(n: int, eps: int):
    """Einstein constant ``4(n+2) eps`` of the base of the submersion."""
    _check_eps(eps)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return scalar(4 * (n + 2) * eps)
