"""Concrete paraquaternionic linear algebra on R^{4n}.

The structure triple is the ``n``-fold block sum of one fixed 4x4 model in
which ``J1`` and ``J2`` are symmetric matrices and ``J3 = J1 J2`` is
antisymmetric, all against the neutral metric diag(-1,-1,+1,+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .tensor_core import (
    PseudoEuclideanSpace,
    all_zero,
    as_array,
    block_sum,
    exact_inverse,
    identity,
    is_zero,
    make_neutral_space,
    pullback,
)

#: tau_alpha for alpha = 1, 2, 3: J1, J2 are product structures, J3 is complex.
TAU = (-1, -1, 1)

#: even permutations (alpha, beta, gamma) of (1, 2, 3), zero-based
EVEN_PERMUTATIONS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

AdjointMode = Literal["frame-transpose", "metric-adjoint"]
ADJOINT_MODES = ("frame-transpose", "metric-adjoint")

_J1 = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
_J2 = [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]


@dataclass(frozen=True, eq=False)
class ParaHypercomplexTriple:
    n: int
    J: tuple[np.ndarray, np.ndarray, np.ndarray]
    space: PseudoEuclideanSpace
    tau: tuple[int, int, int] = TAU

    @property
    def dim(self) -> int:
        return 4 * self.n

    def fundamental_form(self, alpha: int) -> np.ndarray:
        """``Omega_alpha(X, Y) = g(J_alpha X, Y)`` for ``alpha`` in 1..3."""
        j = self.J[alpha - 1]
        return j.T @ self.space.metric


def triple_violations(triple: ParaHypercomplexTriple) -> list[str]:
    """Names of the failed para-hypercomplex / compatibility relations."""
    J, tau, g = triple.J, triple.tau, triple.space.metric
    ident = identity(triple.dim)
    bad = []
    for a in range(3):
        if not all_zero(J[a] @ J[a] + tau[a] * ident):
            bad.append(f"J{a + 1}^2 = -tau{a + 1} Id")
        if not all_zero(pullback(g, J[a]) - tau[a] * g):
            bad.append(f"g(J{a + 1}X, J{a + 1}Y) = tau{a + 1} g(X,Y)")
    for a, b, c in EVEN_PERMUTATIONS:
        if not all_zero(J[a] @ J[b] - tau[c] * J[c]):
            bad.append(f"J{a + 1}J{b + 1} = tau{c + 1} J{c + 1}")
        if not all_zero(J[a] @ J[b] + J[b] @ J[a]):
            bad.append(f"J{a + 1}J{b + 1} = -J{b + 1}J{a + 1}")
    return bad


def standard_triple(n: int) -> ParaHypercomplexTriple:
    """The pinned triple on R^{4n}; fails loudly if any relation is broken."""
    space = make_neutral_space(n)
    j1 = block_sum(*[as_array(_J1)] * n)
    j2 = block_sum(*[as_array(_J2)] * n)
    triple = ParaHypercomplexTriple(n=n, J=(j1, j2, j1 @ j2), space=space)
    bad = triple_violations(triple)
    if bad:
        raise AssertionError(f"standard triple broken: {bad}")
    return triple


def adjoint(b: np.ndarray, mode: AdjointMode = "frame-transpose", metric: np.ndarray | None = None) -> np.ndarray:
    """``B^t`` in the chosen sense.

    ``frame-transpose`` is the matrix transpose; ``metric-adjoint`` solves
    ``g(Bx, y) = g(x, B^t y)``, i.e. ``B^t = G^{-1} B^T G``.
    """
    if mode == "frame-transpose":
        return b.T
    if mode == "metric-adjoint":
        if metric is None:
            raise ValueError("metric-adjoint mode needs the metric")
        return exact_inverse(metric) @ b.T @ metric
    raise ValueError(f"unknown adjoint mode {mode!r}")


def gl_inner(a: np.ndarray, b: np.ndarray, mode: AdjointMode = "frame-transpose", metric: np.ndarray | None = None):
    """``(A, B) = Trace(A B^t)`` on gl(4n, R)."""
    if np.shape(a) != np.shape(b) or np.shape(a)[0] != np.shape(a)[1]:
        raise ValueError(f"gl_inner needs equal square matrices, got {np.shape(a)} and {np.shape(b)}")
    return np.trace(a @ adjoint(b, mode, metric))


@dataclass(frozen=True, eq=False)
class VerticalSubspace:
    """m3 = Span{J1, J2} (twistor) or m1 = Span{J2, J3} (reflector)."""

    kind: Literal["twistor", "reflector"]
    basis: tuple[np.ndarray, np.ndarray]
    gram: np.ndarray
    mode: AdjointMode
    metric: np.ndarray

    def coordinates(self, m: np.ndarray) -> np.ndarray:
        """Coordinates of ``m`` in :attr:`basis`; raises if ``m`` leaves the span."""
        rhs = as_array([self.inner(m, b) for b in self.basis])
        coords = exact_inverse(self.gram) @ rhs
        if not all_zero(m - coords[0] * self.basis[0] - coords[1] * self.basis[1]):
            raise ValueError("matrix is not in the vertical subspace")
        return coords

    def inner(self, a, b):
        return gl_inner(a, b, self.mode, self.metric)


def vertical_subspace(triple: ParaHypercomplexTriple, kind: str, mode: AdjointMode = "frame-transpose") -> VerticalSubspace:
    j1, j2, j3 = triple.J
    if kind == "twistor":
        basis, anchor = (j1, j2), j3
    elif kind == "reflector":
        basis, anchor = (j2, j3), j1
    else:
        raise ValueError(f"kind must be 'twistor' or 'reflector', got {kind!r}")
    for b in basis:
        if not all_zero(b @ anchor + anchor @ b):
            raise AssertionError(f"{kind} basis element does not anticommute with its anchor")
    g = triple.space.metric
    gram = as_array([[gl_inner(a, b, mode, g) for b in basis] for a in basis])
    if is_zero(gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0]):
        raise AssertionError("degenerate vertical gram matrix")
    return VerticalSubspace(kind=kind, basis=basis, gram=gram, mode=mode, metric=g)
