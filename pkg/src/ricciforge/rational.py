"""Exact linear algebra over the rationals.

Matrices are numpy object arrays holding :class:`fractions.Fraction` entries.
Nothing in here touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Q",
    "qarray",
    "qzeros",
    "qeye",
    "is_rational_array",
    "rref",
    "rank",
    "nullspace",
    "row_space",
    "inverse",
    "solve",
    "ldl",
    "is_positive_definite",
    "to_float",
]


def Q(x) -> Fraction:
    """Coerce ``x`` to a Fraction; floats are rejected to keep paths exact."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def qarray(data) -> np.ndarray:
    arr = np.array(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Q(v)
    return out


def qzeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def qeye(n: int) -> np.ndarray:
    out = qzeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_rational_array(a) -> bool:
    arr = np.asarray(a, dtype=object)
    return all(
        isinstance(v, (Fraction, int, np.integer)) and not isinstance(v, bool)
        for v in arr.flat
    )


def to_float(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    return np.array([float(v) for v in arr.flat], dtype=float).reshape(arr.shape)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form. Returns the nonzero rows and pivot columns."""
    m = [[Q(v) for v in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def row_space(vectors: Iterable[Sequence]) -> list[list[Fraction]]:
    """Canonical (RREF) basis of the span of ``vectors``."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    return rref(vecs)[0]


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def inverse(a) -> np.ndarray:
    a = qarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    aug = [list(a[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise np.linalg.LinAlgError("singular matrix")
    return qarray([row[n:] for row in red])


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` exactly for square nonsingular ``a`` (b vector or matrix)."""
    a = qarray(a)
    b = qarray(b)
    vec = b.ndim == 1
    bm = b.reshape(-1, 1) if vec else b
    n = a.shape[0]
    aug = [list(a[i]) + list(bm[i]) for i in range(n)]
    red, pivots = rref(aug)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise np.linalg.LinAlgError("singular matrix")
    x = qarray([row[n:] for row in red])
    return x.reshape(-1) if vec else x


def ldl(g) -> tuple[np.ndarray, list[Fraction]]:
    """Exact factorisation ``g = L diag(d) L^T`` with unit lower-triangular ``L``.

    Raises ``ValueError`` if ``g`` is not symmetric positive definite.
    """
    g = qarray(g)
    n = g.shape[0]
    if g.shape != (n, n) or any(g[i, j] != g[j, i] for i in range(n) for j in range(i)):
        raise ValueError("gram matrix is not symmetric")
    lower = qeye(n)
    d: list[Fraction] = []
    for j in range(n):
        dj = g[j, j] - sum(lower[j, k] ** 2 * d[k] for k in range(j))
        if dj <= 0:
            raise ValueError(f"gram matrix is not positive definite (pivot {j} = {dj})")
        d.append(dj)
        for i in range(j + 1, n):
            s = g[i, j] - sum(lower[i, k] * lower[j, k] * d[k] for k in range(j))
            lower[i, j] = s / dj
    return lower, d


def is_positive_definite(g) -> bool:
    try:
        ldl(g)
    except ValueError:
        return False
    return True
