"""Exact matrices over Q read inside GL_k(Q_p)

Matrices are tuples of row tuples of Fractions. Helpers build w_k, z_k, the
involution g -> transpose(g)^-1, hat conjugation, embeddings and Smith forms.
"""

import logging
import threading
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, List, Tuple

from app.core.exceptions import AlgebraError, DimensionError, DomainError
from app.core.localfield import INFINITY, valuation

logger = logging.getLogger(__name__)

Row = Tuple[Fraction, ...]
Matrix = Tuple[Row, ...]
XPoly = Tuple[Fraction, ...]  # polynomial in the line variable x, lowest degree first

_F0 = Fraction(0)
_F1 = Fraction(1)


def mat(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(Fraction(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionError("ragged matrix rows")
    return out


def size(g: Matrix) -> int:
    if any(len(r) != len(g) for r in g):
        raise DimensionError("matrix is not square")
    return len(g)


def identity(k: int) -> Matrix:
    return tuple(tuple(_F1 if i == j else _F0 for j in range(k)) for i in range(k))


def diag(*entries) -> Matrix:
    k = len(entries)
    return tuple(tuple(Fraction(entries[i]) if i == j else _F0 for j in range(k)) for i in range(k))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple(tuple(_F0 for _ in range(cols)) for _ in range(rows))


def mat_mul(g: Matrix, h: Matrix) -> Matrix:
    if g and h and len(g[0]) != len(h):
        raise DimensionError(f"cannot multiply {len(g)}x{len(g[0])} by {len(h)}x{len(h[0])}")
    cols = list(zip(*h)) if h else []
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), _F0) for col in cols) for row in g)


def mat_add(g: Matrix, h: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(g, h))


def mat_scale(g: Matrix, c) -> Matrix:
    c = Fraction(c)
    return tuple(tuple(c * a for a in row) for row in g)


def transpose(g: Matrix) -> Matrix:
    return tuple(zip(*g)) if g else ()


def det(g: Matrix) -> Fraction:
    k = size(g)
    if k == 0:
        return _F1
    if k == 1:
        return g[0][0]
    if k == 2:
        return g[0][0] * g[1][1] - g[0][1] * g[1][0]
    rows = [list(r) for r in g]
    result = _F1
    for col in range(k):
        pivot = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if pivot is None:
            return _F0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = -result
        result *= rows[col][col]
        for r in range(col + 1, k):
            factor = rows[r][col] / rows[col][col]
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return result


def inverse(g: Matrix) -> Matrix:
    """Gauss-Jordan inverse.

    Raises:
        AlgebraError: g is singular
    """
    k = size(g)
    rows = [list(r) + [_F1 if i == j else _F0 for j in range(k)] for i, r in enumerate(g)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if pivot is None:
            raise AlgebraError("singular matrix")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [a * inv for a in rows[col]]
        for r in range(k):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return tuple(tuple(r[k:]) for r in rows)


def require_invertible(g: Matrix) -> Matrix:
    if det(g) == 0:
        raise AlgebraError("matrix is singular")
    return g


def block_diag(g: Matrix, h: Matrix) -> Matrix:
    a, b = len(g), len(h)
    top = tuple(tuple(row) + (_F0,) * b for row in g)
    bottom = tuple((_F0,) * a + tuple(row) for row in h)
    return top + bottom


def embed(h: Matrix) -> Matrix:
    """diag(h, 1): G_{k-1} inside G_k."""
    return block_diag(h, identity(1))


def e_row(k: int) -> Matrix:
    """The row vector [0, ..., 0, 1] in k^(1 x k)."""
    if k < 1:
        raise DomainError("e_k needs k >= 1")
    return (tuple(_F0 for _ in range(k - 1)) + (_F1,),)


def make_w(k: int) -> Matrix:
    if k < 0:
        raise DomainError(f"w_k needs k >= 0, got {k}")
    return tuple(tuple(_F1 if i + j == k - 1 else _F0 for j in range(k)) for i in range(k))


_z_lock = threading.Lock()


@lru_cache(maxsize=None)
def _make_z(k: int) -> Matrix:
    if k == 0:
        return ()
    if k == 1:
        return ((_F1,),)
    first, second, third = _recursion_factors(k)
    z = mat_mul(mat_mul(first, second), third)
    if any(x.denominator != 1 for row in z for x in row):
        raise AlgebraError(f"z_{k} has a non-integral entry")
    return z


def make_z(k: int) -> Matrix:
    """The recursively defined z_k; cached per k."""
    if k < 0:
        raise DomainError(f"z_k needs k >= 0, got {k}")
    with _z_lock:
        return _make_z(k)


def _recursion_factors(k: int) -> Tuple[Matrix, Matrix, Matrix]:
    z1 = _make_z(k - 1)
    w1 = make_w(k - 1)
    corner = mat_mul(mat_mul(transpose(z1), w1), z1)
    third = tuple(tuple(corner[i]) + (_F1 if i == k - 2 else _F0,) for i in range(k - 1))
    third += (tuple(_F0 for _ in range(k - 1)) + (_F1,),)
    second = block_diag(inverse(_make_z(k - 2)) if k > 2 else (), identity(2))
    return block_diag(w1, identity(1)), second, third


def iota(g: Matrix) -> Matrix:
    """transpose(g)^-1."""
    return inverse(transpose(g))


def hat_conj(g: Matrix) -> Matrix:
    """w_k g^iota w_k."""
    w = make_w(size(g))
    return mat_mul(mat_mul(w, iota(g)), w)


def is_integral(g: Matrix, p: int) -> bool:
    return all(x == 0 or valuation(x, p) >= 0 for row in g for x in row)


def in_maximal_compact(g: Matrix, p: int) -> bool:
    """g lies in GL_k(Z_p)."""
    return is_integral(g, p) and valuation(det(g), p) == 0


# ---------------------------------------------------------------------------
# Smith form over Z_(p)
# ---------------------------------------------------------------------------


def smith_form(g: Matrix, p: int) -> Tuple[Matrix, Matrix, Matrix]:
    """g = k1 * D * k2 with k1, k2 in GL_k(Z_p) and D diagonal of nondecreasing valuation."""
    k = size(g)
    require_invertible(g)
    a = [list(r) for r in g]
    left = [list(r) for r in identity(k)]
    right = [list(r) for r in identity(k)]
    for t in range(k):
        best, bi, bj = INFINITY, t, t
        for i in range(t, k):
            for j in range(t, k):
                v = valuation(a[i][j], p)
                if v < best:
                    best, bi, bj = v, i, j
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            for row in left:
                row[t], row[bi] = row[bi], row[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
            right[t], right[bj] = right[bj], right[t]
        pivot = a[t][t]
        for i in range(t + 1, k):
            c = a[i][t] / pivot
            if c:
                a[i] = [x - c * y for x, y in zip(a[i], a[t])]
                for row in left:
                    row[t] += c * row[i]
        for j in range(t + 1, k):
            c = a[t][j] / pivot
            if c:
                for row in a:
                    row[j] -= c * row[t]
                right[t] = [x + c * y for x, y in zip(right[t], right[j])]
    return mat(left), mat(a), mat(right)


def gamma0_coset_reps(e: int, p: int) -> List[Matrix]:
    """Representatives of K / Gamma_0(p^e), Gamma_0 = {k in K : k_21 in p^e O}."""
    if e < 0:
        raise DomainError("level must be nonnegative")
    if e == 0:
        return [identity(2)]
    reps = [mat([[1, 0], [c, 1]]) for c in range(p**e)]
    reps += [mat([[p * t, 1], [1, 0]]) for t in range(p ** (e - 1))]
    return reps


# ---------------------------------------------------------------------------
# Affine lines of matrices A + x B
# ---------------------------------------------------------------------------


def _xpoly_trim(c: List[Fraction]) -> XPoly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _xpoly_mul(f: XPoly, g: XPoly) -> XPoly:
    if not f or not g:
        return ()
    out = [_F0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return _xpoly_trim(out)


def _xpoly_add(f: XPoly, g: XPoly, sign: int = 1) -> XPoly:
    n = max(len(f), len(g))
    out = [(f[i] if i < len(f) else _F0) + sign * (g[i] if i < len(g) else _F0) for i in range(n)]
    return _xpoly_trim(out)


def affine_det(a: Matrix, b: Matrix) -> XPoly:
    """det(A + x B) as a polynomial in x."""
    k = len(a)
    if k == 0:
        return (_F1,)
    entries = [[_xpoly_trim([a[i][j], b[i][j]]) for j in range(k)] for i in range(k)]
    return _poly_det(entries)


def _poly_det(entries: List[List[XPoly]]) -> XPoly:
    k = len(entries)
    if k == 1:
        return entries[0][0]
    total: XPoly = ()
    for j in range(k):
        if not entries[0][j]:
            continue
        sub = [row[:j] + row[j + 1 :] for row in entries[1:]]
        term = _xpoly_mul(entries[0][j], _poly_det(sub))
        total = _xpoly_add(total, term, 1 if j % 2 == 0 else -1)
    return total


def top_row_minors(a: Matrix, b: Matrix, rows: int) -> List[XPoly]:
    """All rows x rows minors of the top ``rows`` rows of A + x B."""
    k = len(a[0]) if a else 0
    out = []
    for cols in combinations(range(k), rows):
        sub_a = tuple(tuple(a[i][j] for j in cols) for i in range(rows))
        sub_b = tuple(tuple(b[i][j] for j in cols) for i in range(rows))
        out.append(affine_det(sub_a, sub_b))
    return out


def affine_at(a: Matrix, b: Matrix, x) -> Matrix:
    x = Fraction(x)
    return tuple(tuple(p + x * q for p, q in zip(ra, rb)) for ra, rb in zip(a, b))


def affine_left(g: Matrix, a: Matrix, b: Matrix) -> Tuple[Matrix, Matrix]:
    return mat_mul(g, a), mat_mul(g, b)


def affine_right(a: Matrix, b: Matrix, g: Matrix) -> Tuple[Matrix, Matrix]:
    return mat_mul(a, g), mat_mul(b, g)


def z_recursion_factors(k: int) -> Tuple[Matrix, Matrix, Matrix]:
    """The three block factors whose product defines z_k (k >= 2)."""
    if k < 2:
        raise DomainError("the recursion starts at k = 2")
    with _z_lock:
        return _recursion_factors(k)
