"""Compact classical Lie algebras su(m), so(m), sp(m) and the split forms sl(m, R).

Every algebra is built from explicit integer matrices; the structure constants are
read off from exact matrix commutators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lie_core import BasisLabel, LieAlgebra, StructureTensor, dense_to_root
from .rational import inverse, qzeros, rref

__all__ = [
    "CMatrix",
    "RootDatum",
    "MatrixRealization",
    "build_compact",
    "build_noncompact_sl",
    "so_variables",
    "FAMILY_MIN",
]

FAMILY_MIN = {"su": 2, "so": 3, "sp": 1, "sl": 2}


class CMatrix:
    """Complex matrix with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        re = np.asarray(re, dtype=object)
        self.re = _qcopy(re)
        self.im = qzeros(re.shape) if im is None else _qcopy(np.asarray(im, dtype=object))

    @classmethod
    def zeros(cls, n: int) -> "CMatrix":
        return cls(qzeros((n, n)))

    @property
    def shape(self):
        return self.re.shape

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        return CMatrix(
            self.re.dot(other.re) - self.im.dot(other.im),
            self.re.dot(other.im) + self.im.dot(other.re),
        )

    def __sub__(self, other: "CMatrix") -> "CMatrix":
        return CMatrix(self.re - other.re, self.im - other.im)

    def __add__(self, other: "CMatrix") -> "CMatrix":
        return CMatrix(self.re + other.re, self.im + other.im)

    def __neg__(self) -> "CMatrix":
        return CMatrix(-self.re, -self.im)

    def scale(self, a, b=0) -> "CMatrix":
        """Multiply by the complex scalar ``a + b i``."""
        a, b = Fraction(a), Fraction(b)
        return CMatrix(a * self.re - b * self.im, a * self.im + b * self.re)

    def transpose(self) -> "CMatrix":
        return CMatrix(self.re.T, self.im.T)

    def bracket(self, other: "CMatrix") -> "CMatrix":
        return self @ other - other @ self

    def is_real(self) -> bool:
        return not any(self.im.flat)

    def flat(self) -> list[Fraction]:
        return list(self.re.flat) + list(self.im.flat)

    def __eq__(self, other) -> bool:
        return isinstance(other, CMatrix) and self.flat() == other.flat()

    def __repr__(self) -> str:
        return f"CMatrix(shape={self.shape}, real={self.is_real()})"


def _qcopy(a: np.ndarray) -> np.ndarray:
    out = qzeros(a.shape)
    for idx, v in np.ndenumerate(a):
        out[idx] = Fraction(v)
    return out


def _unit(n: int, entries: dict[tuple[int, int], tuple[int, int]]) -> CMatrix:
    """Matrix from 1-based ``(row, col) -> (re, im)`` entries."""
    re, im = qzeros((n, n)), qzeros((n, n))
    for (i, j), (a, b) in entries.items():
        re[i - 1, j - 1] += a
        im[i - 1, j - 1] += b
    return CMatrix(re, im)


@dataclass(frozen=True)
class RootDatum:
    """Positive roots (in e_i coordinates) and the indices of the simple ones."""

    family: str
    rank: int
    positive_roots: tuple[tuple[int, ...], ...]
    simple_roots: tuple[int, ...]
    note: str = ""

    def __post_init__(self):
        expected = {
            "A": lambda r: (r + 1) * r // 2,
            "B": lambda r: r * r,
            "C": lambda r: r * r,
            "D": lambda r: r * (r - 1),
        }[self.family](self.rank)
        if len(self.positive_roots) != expected:
            raise ValueError(f"{self.family}{self.rank} needs {expected} positive roots")
        if len(self.simple_roots) != self.rank:
            raise ValueError("number of simple roots must equal the rank")

    @property
    def simple(self) -> list[tuple[int, ...]]:
        return [self.positive_roots[i] for i in self.simple_roots]

    def simple_coordinates(self, root: Sequence[int]) -> list[Fraction]:
        """Coefficients of ``root`` in the simple roots (exact)."""
        simple = self.simple
        n = len(root)
        aug = [[Fraction(s[i]) for s in simple] + [Fraction(root[i])] for i in range(n)]
        red, piv = rref(aug)
        if len(simple) in piv:
            raise ValueError(f"{root} is not in the span of the simple roots")
        out = [Fraction(0)] * len(simple)
        for row, p in zip(red, piv):
            out[p] = row[-1]
        return out

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "positive_roots": [list(r) for r in self.positive_roots],
            "simple_roots": list(self.simple_roots),
        }


@dataclass(frozen=True)
class MatrixRealization:
    """Basis label -> complex matrix in a fixed ambient size."""

    size: int
    matrices: dict = field(hash=False)

    def __getitem__(self, label: BasisLabel) -> CMatrix:
        return self.matrices[label]

    @property
    def labels(self) -> list[BasisLabel]:
        return list(self.matrices)

    def is_real(self) -> bool:
        return all(m.is_real() for m in self.matrices.values())

    def expand(self, mat: CMatrix) -> list[Fraction]:
        """Exact coordinates of ``mat`` in the realization basis; raises if outside the span."""
        coords = _expander(self)(mat)
        if coords is None:
            raise ValueError("matrix is not in the span of the realization")
        return coords


def _expander(real: MatrixRealization):
    mats = [real.matrices[l] for l in real.labels]
    cols = [m.flat() for m in mats]
    nrow = len(cols[0])
    # rows of the system: coordinate r of sum_a x_a mats[a] equals target[r]
    system = [[cols[a][r] for a in range(len(cols))] for r in range(nrow)]
    nz_rows = [r for r in range(nrow) if any(system[r])]

    def solve(target: CMatrix):
        t = target.flat()
        if any(t[r] for r in range(nrow) if r not in set(nz_rows)):
            return None
        aug = [system[r] + [t[r]] for r in nz_rows]
        red, piv = rref(aug)
        if len(cols) in piv:
            return None
        x = [Fraction(0)] * len(cols)
        for row, p in zip(red, piv):
            x[p] = row[-1]
        return x

    return solve


def _structure_from_matrices(labels: list[BasisLabel], mats: list[CMatrix]) -> StructureTensor:
    n = len(mats)
    cols = [m.flat() for m in mats]
    nrow = len(cols[0])
    # pivots of the transposed system are n independent coordinate rows
    _, chosen = rref(cols)
    if len(chosen) != n:
        raise ValueError("realization matrices are linearly dependent")
    inv = inverse([[cols[a][r] for a in range(n)] for r in chosen])
    entries: dict[tuple[int, int, int], Fraction] = {}
    for i in range(n):
        for j in range(i + 1, n):
            flat = mats[i].bracket(mats[j]).flat()
            rhs = [flat[r] for r in chosen]
            x = [sum((inv[a, b] * rhs[b] for b in range(n) if rhs[b]), Fraction(0)) for a in range(n)]
            recon = [sum((x[a] * cols[a][r] for a in range(n) if x[a]), Fraction(0)) for r in range(nrow)]
            if recon != flat:
                raise ValueError(f"commutator [{labels[i]}, {labels[j]}] leaves the span")
            for k, v in enumerate(x):
                if v:
                    entries[(i, j, k)] = v
    return StructureTensor(n, entries)


def _assemble(basis: list[tuple[BasisLabel, CMatrix]], size: int, datum: RootDatum | None) -> tuple[LieAlgebra, MatrixRealization]:
    labels = [l for l, _ in basis]
    mats = [m for _, m in basis]
    tensor = _structure_from_matrices(labels, mats)
    real = MatrixRealization(size, dict(basis))
    return LieAlgebra(tuple(labels), tensor, datum), real


# ---------------------------------------------------------------------------
# root data
# ---------------------------------------------------------------------------

def _e(n: int, *terms: tuple[int, int]) -> tuple[int, ...]:
    v = [0] * n
    for idx, c in terms:
        v[idx - 1] += c
    return tuple(v)


def _pairs(r: int):
    return [(k, j) for k in range(1, r + 1) for j in range(k + 1, r + 1)]


def _datum_A(m: int) -> RootDatum:
    roots = [_e(m, (i, 1), (j, -1)) for i, j in _pairs(m)]
    simple = tuple(roots.index(_e(m, (l, 1), (l + 1, -1))) for l in range(1, m))
    return RootDatum("A", m - 1, tuple(roots), simple)


def _bcd_roots(l: int, family: str) -> list[tuple[tuple[int, ...], tuple]]:
    """Positive roots with a tag: ('-', k, j), ('+', k, j) or ('s', r)."""
    out = []
    for k, j in _pairs(l):
        out.append((_e(l, (k, 1), (j, -1)), ("-", k, j)))
        out.append((_e(l, (k, 1), (j, 1)), ("+", k, j)))
    if family == "B":
        out += [(_e(l, (r, 1)), ("s", r)) for r in range(1, l + 1)]
    elif family == "C":
        out += [(_e(l, (r, 2)), ("s", r)) for r in range(1, l + 1)]
    return out


def _bcd_datum(l: int, family: str, tagged) -> RootDatum:
    roots = [r for r, _ in tagged]
    simple = [roots.index(_e(l, (i, 1), (i + 1, -1))) for i in range(1, l)]
    if family == "B":
        simple.append(roots.index(_e(l, (l, 1))))
    elif family == "C":
        simple.append(roots.index(_e(l, (l, 2))))
    else:
        simple.append(roots.index(_e(l, (l - 1, 1), (l, 1))))
    note = "so(3) is isomorphic to su(2)" if family == "B" and l == 1 else ""
    note = note or ("so(4) is not simple: D2 = A1 x A1" if family == "D" and l == 2 else "")
    return RootDatum(family, l, tuple(roots), tuple(simple), note)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _compact_su(m: int):
    datum = _datum_A(m)
    hs, xs, ys = [], [], []
    for l in range(1, m):
        root = _e(m, (l, 1), (l + 1, -1))
        hs.append((BasisLabel.cartan(root), _unit(m, {(l, l): (0, 1), (l + 1, l + 1): (0, -1)})))
    for i, j in _pairs(m):
        root = _e(m, (i, 1), (j, -1))
        xs.append((BasisLabel.root_x(root), _unit(m, {(i, j): (1, 0), (j, i): (-1, 0)})))
        ys.append((BasisLabel.root_y(root), _unit(m, {(i, j): (0, 1), (j, i): (0, 1)})))
    return hs + xs + ys, m, datum


def _so_block(entries: dict[tuple[int, int], int], size: int) -> CMatrix:
    return _unit(size, {key: (v, 0) for key, v in entries.items()})


def _so_offdiag(k: int, j: int, block: list[list[int]], size: int) -> dict[tuple[int, int], int]:
    """A_{kj} = block, A_{jk} = -block^T in 2x2 block coordinates (1-based)."""
    out: dict[tuple[int, int], int] = {}
    for a in range(2):
        for b in range(2):
            v = block[a][b]
            if v:
                out[(2 * k - 1 + a, 2 * j - 1 + b)] = out.get((2 * k - 1 + a, 2 * j - 1 + b), 0) + v
                out[(2 * j - 1 + b, 2 * k - 1 + a)] = out.get((2 * j - 1 + b, 2 * k - 1 + a), 0) - v
    return out


def _so_rot(r: int, sign: int = 1) -> dict[tuple[int, int], int]:
    # A_rr = [[0, -1], [1, 0]]
    return {(2 * r - 1, 2 * r): -sign, (2 * r, 2 * r - 1): sign}


def _compact_so(m: int):
    l = m // 2
    odd = m % 2 == 1
    family = "B" if odd else "D"
    if not odd and l < 2:
        raise ValueError("so(m) needs m >= 3")
    tagged = _bcd_roots(l, family)
    datum = _bcd_datum(l, family, tagged)
    hs = []
    for idx in datum.simple_roots:
        root, tag = tagged[idx]
        if tag[0] == "-":
            k = tag[1]
            ent = _so_rot(k)
            ent.update(_so_rot(k + 1, -1))
        elif tag[0] == "s":
            ent = _so_rot(l)
        else:  # D-type e_{l-1} + e_l
            ent = _so_rot(l - 1)
            ent.update(_so_rot(l))
        hs.append((BasisLabel.cartan(root), _so_block(ent, m)))
    xs, ys = [], []
    for root, tag in tagged:
        if tag[0] in "+-":
            _, k, j = tag
            xb = [[2, 0], [0, 2]] if tag[0] == "-" else [[2, 0], [0, -2]]
            yb = [[0, -2], [2, 0]] if tag[0] == "-" else [[0, 2], [2, 0]]
            xm = _so_block(_so_offdiag(k, j, xb, m), m)
            ym = _so_block(_so_offdiag(k, j, yb, m), m)
        else:
            r = tag[1]
            xm = _so_block({(2 * r - 1, m): 2, (m, 2 * r - 1): -2}, m)
            ym = _so_block({(2 * r, m): 2, (m, 2 * r): -2}, m)
        xs.append((BasisLabel.root_x(root), xm))
        ys.append((BasisLabel.root_y(root), ym))
    return hs + xs + ys, m, datum


def _compact_sp(m: int):
    tagged = _bcd_roots(m, "C")
    datum = _bcd_datum(m, "C", tagged)
    s = 2 * m
    hs = []
    for idx in datum.simple_roots:
        root, tag = tagged[idx]
        if tag[0] == "-":
            i = tag[1]
            ent = {(i, i): (0, 1), (i + 1, i + 1): (0, -1), (m + i, m + i): (0, -1), (m + i + 1, m + i + 1): (0, 1)}
        else:
            ent = {(m, m): (0, 1), (s, s): (0, -1)}
        hs.append((BasisLabel.cartan(root), _unit(s, ent)))
    xs, ys = [], []
    for root, tag in tagged:
        if tag[0] == "-":
            _, k, j = tag
            xm = {(k, j): (1, 0), (m + j, m + k): (-1, 0), (j, k): (-1, 0), (m + k, m + j): (1, 0)}
            ym = {(k, j): (0, 1), (m + j, m + k): (0, -1), (j, k): (0, 1), (m + k, m + j): (0, -1)}
        elif tag[0] == "+":
            _, k, j = tag
            xm = {(k, m + j): (1, 0), (j, m + k): (1, 0), (m + k, j): (-1, 0), (m + j, k): (-1, 0)}
            ym = {(k, m + j): (0, 1), (j, m + k): (0, 1), (m + k, j): (0, 1), (m + j, k): (0, 1)}
        else:
            r = tag[1]
            xm = {(r, m + r): (1, 0), (m + r, r): (-1, 0)}
            ym = {(r, m + r): (0, 1), (m + r, r): (0, 1)}
        xs.append((BasisLabel.root_x(root), _unit(s, xm)))
        ys.append((BasisLabel.root_y(root), _unit(s, ym)))
    return hs + xs + ys, s, datum


@lru_cache(maxsize=None)
def build_compact(family: str, m: int) -> tuple[LieAlgebra, MatrixRealization, RootDatum]:
    """Compact real form with basis ``H^alpha`` (simple), then ``X^beta``, then ``Y^beta``."""
    builders = {"su": _compact_su, "so": _compact_so, "sp": _compact_sp}
    if family not in builders:
        raise ValueError(f"unsupported family {family!r}")
    if m < FAMILY_MIN[family]:
        raise ValueError(f"{family}({m}) is below the minimum m = {FAMILY_MIN[family]}")
    basis, size, datum = builders[family](m)
    alg, real = _assemble(basis, size, datum)
    return alg, real, datum


@lru_cache(maxsize=None)
def build_noncompact_sl(m: int, with_center: bool = False) -> tuple[LieAlgebra, MatrixRealization]:
    """sl(m, R) (or gl(m, R) with ``Z = Id`` first) in the basis H, X = E_ij - E_ji, Y = E_ij + E_ji."""
    if m < 2:
        raise ValueError("sl(m, R) needs m >= 2")
    datum = _datum_A(m)
    basis = []
    if with_center:
        basis.append((BasisLabel.z(), _unit(m, {(i, i): (1, 0) for i in range(1, m + 1)})))
    for l in range(1, m):
        root = _e(m, (l, 1), (l + 1, -1))
        basis.append((BasisLabel.cartan(root), _unit(m, {(l, l): (1, 0), (l + 1, l + 1): (-1, 0)})))
    xs, ys = [], []
    for i, j in _pairs(m):
        root = _e(m, (i, 1), (j, -1))
        xs.append((BasisLabel.root_x(root), _unit(m, {(i, j): (1, 0), (j, i): (-1, 0)})))
        ys.append((BasisLabel.root_y(root), _unit(m, {(i, j): (1, 0), (j, i): (1, 0)})))
    alg, real = _assemble(basis + xs + ys, m, datum)
    return alg, real


def so_variables(m: int) -> list[dict[int, tuple[int, int]]]:
    """Complex linear forms ``z_k`` in ``x_1..x_m`` as ``{variable index (1-based): (re, im)}``.

    ``z_{2k-1} = x_{2k-1} + i x_{2k}``, ``z_{2k} = x_{2k-1} - i x_{2k}`` and, for odd
    ``m``, ``z_m = x_m``.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    out = []
    for k in range(1, m // 2 + 1):
        out.append({2 * k - 1: (1, 0), 2 * k: (0, 1)})
        out.append({2 * k - 1: (1, 0), 2 * k: (0, -1)})
    if m % 2:
        out.append({m: (1, 0)})
    return out


def so_variable_matrix(m: int) -> CMatrix:
    """Matrix ``C`` with ``z = C x``."""
    re, im = qzeros((m, m)), qzeros((m, m))
    for k, form in enumerate(so_variables(m)):
        for j, (a, b) in form.items():
            re[k, j - 1] = Fraction(a)
            im[k, j - 1] = Fraction(b)
    return CMatrix(re, im)


def simple_index_of(alg: LieAlgebra, label: BasisLabel) -> int | None:
    """Position of a Cartan label's root among the simple roots, if root data is attached."""
    datum = alg.root_meta
    if datum is None or label.kind != "H":
        return None
    simple = [dense_to_root(r) for r in datum.simple]
    return simple.index(label.root) if label.root in simple else None
