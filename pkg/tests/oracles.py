"""Independent reference computations for the test suite.

Everything here is plain Python loops over :class:`fractions.Fraction` and
never calls into the package's contraction or assembly code.  The 4x4
structure blocks are restated from their definition so that a transcription
slip in the package would show up as a mismatch.
"""

from __future__ import annotations

import math
from fractions import Fraction

TAU = (-1, -1, 1)

J1_BLOCK = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
J2_BLOCK = [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]
METRIC_BLOCK = [-1, -1, 1, 1]


def frac(x) -> Fraction:
    """Fraction from int, Fraction or gmpy2 mpq (via numerator/denominator)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(int(x.numerator), int(x.denominator)) if hasattr(x, "denominator") else Fraction(x)


def to_nested(arr):
    """Nested lists of Fractions from a numpy object array (any rank)."""
    if hasattr(arr, "tolist"):
        arr = arr.tolist()
    if isinstance(arr, list):
        return [to_nested(a) for a in arr]
    return frac(arr)


def matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def block_diag(blocks):
    size = sum(len(b) for b in blocks)
    out = [[Fraction(0)] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = Fraction(v)
        off += len(b)
    return out


def neutral_metric_diag(n: int) -> list[Fraction]:
    return [Fraction(v) for v in METRIC_BLOCK * n]


def triple(n: int):
    """(J1, J2, J3) as nested Fraction lists, J3 = J1 J2."""
    j1 = block_diag([J1_BLOCK] * n)
    j2 = block_diag([J2_BLOCK] * n)
    return j1, j2, matmul(j1, j2)


def omega(j, gdiag):
    """omega[x][y] = g(JX, Y) = sum_k J[k][x] g_kk delta_ky."""
    d = len(gdiag)
    return [[j[y][x] * gdiag[y] for y in range(d)] for x in range(d)]


def space_form(n: int, Sc, signs=(-1, -1, -1, -1)):
    """Entrywise constant paraquaternionic-sectional-curvature tensor."""
    Sc = Fraction(Sc)
    nu = Sc / (4 * n * (n + 2))
    g = neutral_metric_diag(n)
    d = 4 * n
    om = [omega(j, g) for j in triple(n)]

    def gg(a, b):
        return g[a] if a == b else 0

    r = [[[[Fraction(0)] * d for _ in range(d)] for _ in range(d)] for _ in range(d)]
    for x in range(d):
        for y in range(d):
            for z in range(d):
                for t in range(d):
                    v = signs[0] * (gg(y, z) * gg(x, t) - gg(x, z) * gg(y, t))
                    for a in range(3):
                        o = om[a]
                        v += signs[a + 1] * TAU[a] * (o[x][t] * o[y][z] - o[x][z] * o[y][t] - 2 * o[x][y] * o[z][t])
                    if v:
                        r[x][y][z][t] = nu / 4 * v
    return r


def columns(s):
    """Nonzero entries of each column: cols[y] = [(a, S[a][y]), ...]."""
    d = len(s)
    return [[(a, s[a][y]) for a in range(d) if s[a][y] != 0] for y in range(d)]


def pqk_identity_residuals(r, n: int, Sc):
    """Left minus right side of the three identities at every quadruple (J3, J1, J2 order)."""
    nu = Fraction(Sc) / (4 * n * (n + 2))
    g = neutral_metric_diag(n)
    d = 4 * n
    js = triple(n)
    cols = [columns(j) for j in js]
    # gj[a][x][y] = g(X, J_a Y)
    gj = [[[g[x] * js[a][x][y] for y in range(d)] for x in range(d)] for a in range(3)]
    signs = (-1, 1, 1)  # R(.,.,J3.,J3.) - R, R(.,.,J1.,J1.) + R, R(.,.,J2.,J2.) + R
    rhs_terms = (((1, 1), (0, 1)), ((2, 1), (1, -1)), ((2, 1), (0, -1)))
    order = (2, 0, 1)
    out = []
    for which, jidx in enumerate(order):
        c = cols[jidx]
        res = {}
        for x in range(d):
            for y in range(d):
                for z in range(d):
                    for t in range(d):
                        lhs = sum(va * vb * r[x][y][a][b] for a, va in c[z] for b, vb in c[t])
                        lhs += signs[which] * r[x][y][z][t]
                        rhs = nu * sum(s * gj[k][x][y] * gj[k][z][t] for k, s in rhs_terms[which])
                        if lhs != rhs:
                            res[(x, y, z, t)] = lhs - rhs
        out.append(res)
    return out


def ricci(r, gdiag):
    """rho(X,Y) = sum_i R(E_i, X, E_i, Y) / g_ii for a diagonal metric."""
    d = len(gdiag)
    return [[sum(frac(r[i][x][i][y]) / gdiag[i] for i in range(d)) for y in range(d)] for x in range(d)]


def star_ricci(r, s, gdiag):
    """rho*(X,Y) = sum_i R(X, E_i, S Y, S E_i) / g_ii for a diagonal metric."""
    d = len(gdiag)
    c = columns(s)
    return [
        [
            sum(
                frac(va) * frac(vb) * frac(r[x][i][a][b]) / gdiag[i]
                for i in range(d)
                for a, va in c[y]
                for b, vb in c[i]
            )
            for y in range(d)
        ]
        for x in range(d)
    ]


def block_coefficients(form, gdiag, nv: int = 2):
    """(vertical, horizontal) multiples of a block-diagonal metric; raises if not of that shape."""
    d = len(gdiag)
    cv = form[0][0] / gdiag[0]
    ch = form[nv][nv] / gdiag[nv]
    for x in range(d):
        for y in range(d):
            want = 0
            if x == y:
                want = (cv if x < nv else ch) * gdiag[x]
            if form[x][y] != want:
                raise AssertionError(f"form is not block scalar at {(x, y)}: {form[x][y]} vs {want}")
    return cv, ch


def ricci_display(kind: str, n: int, Sc, t):
    """Displayed Ricci coefficients against h_t, by direct substitution."""
    Sc, t = Fraction(Sc), Fraction(t)
    q = t * Sc**2 / (16 * (n + 2) ** 2)
    if kind == "twistor":
        return q + 1 / (n * t), Sc / (4 * n) - q / n
    return -q - 1 / (n * t), Sc / (4 * n) + q / n


def series_exp(m, s: float, terms: int = 20):
    """sum_k (s m)^k / k! with plain float lists."""
    d = len(m)
    a = [[s * float(v) for v in row] for row in m]
    out = [[float(i == j) for j in range(d)] for i in range(d)]
    term = [row[:] for row in out]
    for k in range(1, terms):
        term = [[sum(term[i][l] * a[l][j] for l in range(d)) / k for j in range(d)] for i in range(d)]
        out = [[out[i][j] + term[i][j] for j in range(d)] for i in range(d)]
    return out


def quadratic_roots(a, b, c):
    """Float roots of a x^2 + b x + c, ascending."""
    disc = math.sqrt(b * b - 4 * a * c)
    return sorted(((-b - disc) / (2 * a), (-b + disc) / (2 * a)))
