"""Pointwise multilinear algebra over pseudo-Euclidean spaces.

Tensors are plain numpy arrays.  In exact mode (the default) they have
``dtype=object`` and hold Python ints, ``gmpy2.mpq`` rationals (any other
:class:`numbers.Rational` is accepted on input) or
:class:`~paratwistor.surd.QuadraticSurd`; in float mode they are float64 and
every zero test uses :data:`TOLERANCE`.

Curvature 4-tensors are indexed ``R[a, b, c, d] = R(E_a, E_b, E_c, E_d)`` with
``R(X,Y,Z,T) = g(R(X,Y)Z, T)``.  The sign of the Ricci contraction is
:data:`RICCI_SIGN`; it is pinned by the space-form model in
:mod:`paratwistor.base_curvature` (see :func:`~paratwistor.base_curvature.pin_ricci_sign`).
"""

from __future__ import annotations

import contextlib
import contextvars
import numbers
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np
from gmpy2 import mpq

from .surd import QuadraticSurd, to_rational

TOLERANCE = 1e-10

#: ``rho(X,Y) = RICCI_SIGN * sum_i eps_i R(E_i, X, Y, E_i)``.  With -1 this is
#: ``sum_i eps_i R(E_i, X, E_i, Y)``, the contraction under which the
#: paraquaternionic curvature identities give ``rho = (Sc/4n) g``.
RICCI_SIGN = -1

_MODE: contextvars.ContextVar[str] = contextvars.ContextVar(
    "paratwistor_mode", default=os.environ.get("PQK_MODE", "exact")
)


class VerificationError(AssertionError):
    """A computed quantity disagrees with its closed form."""


def current_mode() -> str:
    return _MODE.get()


@contextlib.contextmanager
def use_mode(mode: str) -> Iterator[None]:
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown scalar mode {mode!r}")
    token = _MODE.set(mode)
    try:
        yield
    finally:
        _MODE.reset(token)


def is_exact() -> bool:
    return current_mode() == "exact"


def scalar(x):
    """Convert ``x`` (int, str ``"p/q"``, Fraction, surd, float) to the active scalar type."""
    if is_exact():
        if isinstance(x, QuadraticSurd):
            return x
        if isinstance(x, float):
            raise TypeError("float input in exact mode; pass a Fraction or 'p/q' string")
        return to_rational(x)
    return float(Fraction(x)) if isinstance(x, str) else float(x)


def as_array(data) -> np.ndarray:
    """Array of active-mode scalars."""
    arr = np.asarray(data, dtype=object)
    if is_exact():
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = v if isinstance(v, (int, mpq, QuadraticSurd)) else scalar(v)
        return out
    return np.array([float(v) for v in arr.ravel()], dtype=float).reshape(arr.shape)


def zeros(shape) -> np.ndarray:
    if is_exact():
        out = np.empty(shape, dtype=object)
        out.fill(0)
        return out
    return np.zeros(shape)


def identity(dim: int) -> np.ndarray:
    out = zeros((dim, dim))
    for i in range(dim):
        out[i, i] = 1
    return out


def is_zero(x) -> bool:
    if is_exact():
        return x == 0
    return abs(x) <= TOLERANCE


def nonzero_mask(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object:
        return np.not_equal(arr, 0).astype(bool)
    return np.abs(arr) > TOLERANCE


def all_zero(arr: np.ndarray) -> bool:
    return not nonzero_mask(np.asarray(arr)).any()


def max_abs(arr: np.ndarray):
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0
    return max((abs(v) for v in arr.ravel()), default=0)


def first_nonzero(arr: np.ndarray) -> tuple[int, ...] | None:
    """Lexicographically first index of a nonzero entry."""
    idx = np.argwhere(nonzero_mask(np.asarray(arr)))
    if len(idx) == 0:
        return None
    return tuple(int(i) for i in idx[0])


def worst_entry(arr: np.ndarray):
    """``(index, value)`` of the entry of largest magnitude (first one on ties)."""
    arr = np.asarray(arr)
    best, where = 0, None
    for idx in np.argwhere(nonzero_mask(arr)):
        idx = tuple(int(i) for i in idx)
        a = abs(arr[idx])
        if a > best:
            best, where = a, idx
    return where, (arr[where] if where is not None else 0)


def exact_inverse(m: np.ndarray) -> np.ndarray:
    """Matrix inverse; Gauss-Jordan over the rationals in exact mode."""
    m = np.asarray(m)
    if m.dtype != object:
        return np.linalg.inv(m)
    n = m.shape[0]
    a = [[v if isinstance(v, QuadraticSurd) else to_rational(v) for v in row] for row in m]
    inv = [[mpq(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        inv[col] = [v / p for v in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return as_array([[_narrow(v) for v in row] for row in inv])


def _narrow(v):
    if isinstance(v, numbers.Rational) and v.denominator == 1:
        return int(v)
    return v


def block_sum(*blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal direct sum."""
    dim = sum(b.shape[0] for b in blocks)
    out = zeros((dim, dim))
    k = 0
    for b in blocks:
        d = b.shape[0]
        out[k:k + d, k:k + d] = b
        k += d
    return out


@dataclass(frozen=True, eq=False)
class PseudoEuclideanSpace:
    """A real vector space with a nondegenerate symmetric bilinear form.

    The frame is the coordinate basis; ``metric[i, j] = g(E_i, E_j)``.
    """

    metric: np.ndarray
    label: str = field(default="")

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    @cached_property
    def inverse(self) -> np.ndarray:
        return exact_inverse(self.metric)

    @property
    def is_diagonal(self) -> bool:
        off = self.metric - np.diag(np.diag(self.metric))
        return all_zero(off)

    @property
    def frame_signs(self) -> tuple[int, ...]:
        """Causal character of each frame vector (requires a diagonal metric)."""
        if not self.is_diagonal:
            raise ValueError("frame signs need a diagonal metric")
        return tuple(1 if v > 0 else -1 for v in np.diag(self.metric))

    @property
    def signature(self) -> tuple[int, int]:
        """``(number of minus signs, number of plus signs)``."""
        signs = self.frame_signs
        return signs.count(-1), signs.count(1)

    def inner(self, x, y):
        return np.asarray(x) @ self.metric @ np.asarray(y)


# ``NeutralSpace`` is the base model: a pseudo-Euclidean space of signature (2n, 2n).
NeutralSpace = PseudoEuclideanSpace


def make_neutral_space(n: int) -> PseudoEuclideanSpace:
    """R^{4n} with metric diag(-1,-1,+1,+1) repeated ``n`` times."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    block = as_array(np.diag([-1, -1, 1, 1]))
    space = PseudoEuclideanSpace(block_sum(*[block] * n), label=f"R^{4 * n}_{2 * n}")
    assert space.signature == (2 * n, 2 * n)
    return space


def apply_endomorphism(t: np.ndarray, s: np.ndarray, axis: int) -> np.ndarray:
    """Feed ``S X`` into slot ``axis``: ``T'(.., y, ..) = sum_a S[a, y] T(.., a, ..)``.

    ``S`` acts on coordinate columns.  Only the nonzero entries of each column
    are visited, so signed permutations cost one gather per slot, and unit
    coefficients are applied by negation instead of multiplication.
    """
    s = np.asarray(s)
    dim = s.shape[0]
    cols = [[(a, s[a, y]) for a in range(dim) if not is_zero(s[a, y])] for y in range(dim)]
    depth = max((len(c) for c in cols), default=0)
    moved = np.moveaxis(t, axis, -1)
    out = None
    for k in range(depth):
        rows = [c[k][0] if k < len(c) else 0 for c in cols]
        coef = [c[k][1] if k < len(c) else 0 for c in cols]
        term = moved[..., rows]
        if all(v == 1 or v == -1 for v in coef):
            neg = [y for y, v in enumerate(coef) if v == -1]
            if neg:
                term[..., neg] = -term[..., neg]
        else:
            term = term * as_array(coef)
        out = term if out is None else out + term
    if out is None:
        out = zeros(moved.shape)
    return np.moveaxis(out, -1, axis)


def pullback(form: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``(S^* b)(X, Y) = b(SX, SY)``."""
    return np.asarray(s).T @ form @ np.asarray(s)


@dataclass(frozen=True)
class Violation:
    """One failed identity, with the first index tuple where it fails."""

    identity: str
    witness: tuple[int, ...]
    residual: object

    def as_dict(self) -> dict:
        from .surd import format_exact

        return {
            "identity": self.identity,
            "witness": list(self.witness),
            "residual": format_exact(self.residual) if is_exact() else float(self.residual),
        }


def _residual_violation(name: str, residual: np.ndarray) -> list[Violation]:
    where = first_nonzero(residual)
    if where is None:
        return []
    return [Violation(name, where, residual[where])]


def validate_curvature_symmetries(r: np.ndarray) -> list[Violation]:
    """Scan every index tuple for the algebraic curvature identities.

    Returns one :class:`Violation` per failed family; empty means ``r`` is an
    algebraic curvature tensor.
    """
    r = np.asarray(r)
    report = []
    report += _residual_violation("R(a,b,c,d) = -R(b,a,c,d)", r + r.transpose(1, 0, 2, 3))
    report += _residual_violation("R(a,b,c,d) = -R(a,b,d,c)", r + r.transpose(0, 1, 3, 2))
    report += _residual_violation("R(a,b,c,d) = R(c,d,a,b)", r - r.transpose(2, 3, 0, 1))
    # R(b,c,a,d) as an array indexed [a,b,c,d] is r.transpose(2,0,1,3)
    report += _residual_violation(
        "first Bianchi", r + r.transpose(2, 0, 1, 3) + r.transpose(1, 2, 0, 3)
    )
    return report


def _check_dims(r: np.ndarray, space: PseudoEuclideanSpace) -> None:
    if any(d != space.dim for d in np.shape(r)):
        raise ValueError(f"tensor shape {np.shape(r)} does not match space of dim {space.dim}")


def ricci_contract(r: np.ndarray, space: PseudoEuclideanSpace, sign: int = RICCI_SIGN) -> np.ndarray:
    """``rho(X,Y) = sign * sum_ij g^{ij} R(E_i, X, Y, E_j)``.

    With an orthonormal frame this is ``sign * sum_i eps_i R(E_i, X, Y, E_i)``.
    """
    _check_dims(r, space)
    return sign * np.tensordot(space.inverse, r, axes=([0, 1], [0, 3]))


def curvature_operator(r: np.ndarray, space: PseudoEuclideanSpace) -> np.ndarray:
    """``op[x, y, k, z]``: component ``k`` of ``R(E_x, E_y) E_z``."""
    _check_dims(r, space)
    return np.tensordot(r, space.inverse, axes=([3], [1])).transpose(0, 1, 3, 2)


def scalar_curvature(rho: np.ndarray, space: PseudoEuclideanSpace):
    """Metric trace ``sum_ij g^{ij} rho(E_i, E_j)``."""
    _check_dims(rho, space)
    return np.sum(space.inverse * rho)


def star_ricci_contract(r: np.ndarray, j: np.ndarray, space: PseudoEuclideanSpace) -> np.ndarray:
    """``rho*(X,Y) = sum_ij g^{ij} R(X, E_i, JY, J E_j)``.

    Taken literally; on a Kaehler-type tensor it agrees with :func:`ricci_contract`
    under the pinned ``RICCI_SIGN``.
    """
    _check_dims(r, space)
    if np.shape(j) != (space.dim, space.dim):
        raise ValueError("endomorphism has the wrong dimension")
    rj = apply_endomorphism(apply_endomorphism(r, j, 2), j, 3)
    return np.tensordot(rj, space.inverse, axes=([1, 3], [0, 1]))


def proportionality(form: np.ndarray, metric: np.ndarray):
    """Return ``c`` with ``form == c * metric`` exactly, or ``None``."""
    diag = [(i, metric[i, i]) for i in range(metric.shape[0]) if not is_zero(metric[i, i])]
    if not diag:
        raise ValueError("metric has no nonzero diagonal entry")
    i, m = diag[0]
    c = form[i, i] / m
    return c if all_zero(form - c * metric) else None
