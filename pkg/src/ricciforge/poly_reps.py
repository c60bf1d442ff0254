"""Real representations on complex homogeneous polynomials.

A complex-linear action on the variables ``z_1..z_r`` extends to degree-``n``
monomials by the Leibniz rule. The result is realified: every monomial ``p``
gives the two real basis vectors ``p`` and ``i p``, interleaved.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Sequence

import numpy as np

from .classical import CMatrix, MatrixRealization, build_compact, build_noncompact_sl, so_variable_matrix
from .lie_core import BasisLabel, LieAlgebra
from .rational import Q, qarray, qzeros, to_float

__all__ = [
    "MonomialBasis",
    "Representation",
    "SubspaceSplit",
    "CasimirBlock",
    "DecompositionUnresolved",
    "derivation_action",
    "variable_action",
    "build_poly_rep",
    "standard_rep",
    "rep_from_matrices",
    "casimir_decompose_su2",
    "casimir_blocks",
    "TAU_EIG",
]

TAU_EIG = 1e-8


@dataclass(frozen=True)
class MonomialBasis:
    """Realified monomial basis of degree ``degree`` in ``nvars`` variables.

    Exponent vectors run in descending lexicographic order (``z1^2, z1 z2, z2^2``),
    each followed by its ``i``-multiple.
    """

    nvars: int
    degree: int
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if self.nvars < 1 or self.degree < 0:
            raise ValueError("need at least one variable and a nonnegative degree")
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"z{k + 1}" for k in range(self.nvars)))

    @property
    def exponents(self) -> tuple[tuple[int, ...], ...]:
        return _exponents(self.nvars, self.degree)

    @property
    def entries(self) -> list[tuple[tuple[int, ...], int]]:
        return [(e, ph) for e in self.exponents for ph in (0, 1)]

    @property
    def labels(self) -> tuple[BasisLabel, ...]:
        return tuple(BasisLabel.monomial(e, ph) for e, ph in self.entries)

    @property
    def dim(self) -> int:
        return 2 * comb(self.degree + self.nvars - 1, self.nvars - 1)

    def index(self, exps: Sequence[int], phase: int = 0) -> int:
        return 2 * _exponent_index(self.nvars, self.degree)[tuple(exps)] + phase

    def pure_power(self, k: int, phase: int = 0) -> int:
        """Real index of ``z_k^n`` (``k`` 0-based) with the given phase."""
        e = [0] * self.nvars
        e[k] = self.degree
        return self.index(e, phase)


@lru_cache(maxsize=None)
def _exponents(r: int, n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for combo in combinations_with_replacement(range(r), n):
        e = [0] * r
        for c in combo:
            e[c] += 1
        out.append(tuple(e))
    return tuple(sorted(set(out), reverse=True))


@lru_cache(maxsize=None)
def _exponent_index(r: int, n: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(_exponents(r, n))}


@dataclass(frozen=True)
class SubspaceSplit:
    V1: tuple[int, ...]
    V2: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "V1", tuple(sorted(self.V1)))
        object.__setattr__(self, "V2", tuple(sorted(self.V2)))
        if set(self.V1) & set(self.V2):
            raise ValueError("V1 and V2 overlap")
        if sorted(self.V1 + self.V2) != list(range(len(self.V1) + len(self.V2))):
            raise ValueError("V1 and V2 must cover 0..dim-1")

    @classmethod
    def from_v1(cls, dim: int, v1: Sequence[int]) -> "SubspaceSplit":
        v1 = set(v1)
        return cls(tuple(v1), tuple(i for i in range(dim) if i not in v1))

    @property
    def dim(self) -> int:
        return len(self.V1) + len(self.V2)


class Representation:
    """Real operators ``pi(e_i)`` for every basis element of ``source``."""

    def __init__(self, source: LieAlgebra, operators: Sequence, basis_meta=None, check: bool = True):
        ops = [qarray(op) for op in operators]
        if len(ops) != source.dim:
            raise ValueError(f"{len(ops)} operators for a {source.dim}-dimensional algebra")
        d = ops[0].shape[0] if ops else 0
        for op in ops:
            if op.shape != (d, d):
                raise ValueError("operators must be square and of equal size")
        self.source = source
        self.dim_V = d
        self.operators = tuple(ops)
        self.basis_meta = basis_meta
        self._sparse = None
        for op in self.operators:
            op.setflags(write=False)
        if check:
            bad = self.homomorphism_defect()
            if bad is not None:
                i, j = bad
                raise ValueError(
                    f"homomorphism violation on ({source.labels[i]}, {source.labels[j]})"
                )

    def op(self, label) -> np.ndarray:
        return self.operators[self.source.index(label)]

    def sparse_columns(self) -> list[list[dict[int, Fraction]]]:
        """Per operator, per column ``j``: ``{row: value}`` of the nonzero entries."""
        if self._sparse is None:
            self._sparse = [_columns(op) for op in self.operators]
        return self._sparse

    def homomorphism_defect(self) -> tuple[int, int] | None:
        """First pair ``(i, j)`` with ``pi([e_i, e_j]) != [pi(e_i), pi(e_j)]``, else None."""
        n = self.source.dim
        cols = self.sparse_columns()
        for i in range(n):
            for j in range(i + 1, n):
                terms = [(c, cols[k]) for k, c in self.source.bracket.bracket_basis(i, j).items()]
                for col in range(self.dim_V):
                    acc: dict[int, Fraction] = {}
                    for c, op in terms:
                        for r, v in op[col].items():
                            acc[r] = acc.get(r, 0) + c * v
                    for r, v in _matvec(cols[i], cols[j][col]).items():
                        acc[r] = acc.get(r, 0) - v
                    for r, v in _matvec(cols[j], cols[i][col]).items():
                        acc[r] = acc.get(r, 0) + v
                    if any(acc.values()):
                        return (i, j)
        return None

    def float_operators(self) -> list[np.ndarray]:
        return [to_float(op) for op in self.operators]

    @property
    def labels(self) -> tuple[BasisLabel, ...]:
        if isinstance(self.basis_meta, MonomialBasis):
            return self.basis_meta.labels
        return tuple(BasisLabel.generic(f"v{i + 1}") for i in range(self.dim_V))

    def __repr__(self) -> str:
        return f"Representation(dim_V={self.dim_V}, source_dim={self.source.dim})"


def _columns(op: np.ndarray) -> list[dict[int, Fraction]]:
    d = op.shape[0]
    out: list[dict[int, Fraction]] = [dict() for _ in range(d)]
    rows, cols = np.nonzero(op != 0)
    for r, c in zip(rows, cols):
        out[c][r] = op[r, c]
    return out


def _matvec(cols: list[dict[int, Fraction]], vec: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for k, b in vec.items():
        for r, a in cols[k].items():
            out[r] = out.get(r, 0) + a * b
    return out


def rep_from_matrices(source: LieAlgebra, operators: Sequence, check: bool = True) -> Representation:
    return Representation(source, operators, None, check)


def derivation_action(generator: CMatrix, basis: MonomialBasis) -> np.ndarray:
    """Real matrix of the derivation induced by ``z_k -> sum_j generator[j, k] z_j``."""
    r = basis.nvars
    if generator.shape != (r, r):
        raise ValueError(f"generator must be {r}x{r}")
    re, im = generator.re, generator.im
    d = basis.dim
    out = qzeros((d, d))
    idx = _exponent_index(r, basis.degree)
    for e, t in idx.items():
        col = [Fraction(0)] * (2 * len(idx))  # complex coefficients as (re, im) pairs
        for k in range(r):
            if not e[k]:
                continue
            for j in range(r):
                a, b = re[j, k], im[j, k]
                if not a and not b:
                    continue
                f = list(e)
                f[k] -= 1
                f[j] += 1
                q = idx[tuple(f)]
                col[2 * q] += e[k] * a
                col[2 * q + 1] += e[k] * b
        for q in range(len(idx)):
            x, y = col[2 * q], col[2 * q + 1]
            if x or y:
                # p -> (x + iy) q ;  ip -> (-y + ix) q
                out[2 * q, 2 * t] += x
                out[2 * q + 1, 2 * t] += y
                out[2 * q, 2 * t + 1] -= y
                out[2 * q + 1, 2 * t + 1] += x
    return out


def variable_action(family: str, mat: CMatrix, m: int) -> CMatrix:
    """Action on the variables induced by ``(A.P)(x) = d/dt P(exp(-tA) x)``.

    The column ``k`` of the result is the image of ``z_k``. For su, sp and sl the
    variables are the coordinates, giving ``-A^T``; for so they are ``z = C x``,
    giving ``-(C A C^{-1})^T``.
    """
    if family == "so":
        c = so_variable_matrix(m)
        return -(c @ mat @ _cinverse(c)).transpose()
    return -mat.transpose()


def _cinverse(c: CMatrix) -> CMatrix:
    from .rational import inverse

    n = c.shape[0]
    big = qzeros((2 * n, 2 * n))
    big[:n, :n] = c.re
    big[:n, n:] = -c.im
    big[n:, :n] = c.im
    big[n:, n:] = c.re
    inv = inverse(big)
    return CMatrix(inv[:n, :n], inv[n:, :n])


def _nvars(family: str, m: int) -> int:
    return 2 * m if family == "sp" else m


@lru_cache(maxsize=None)
def build_poly_rep(family: str, m: int, n: int) -> tuple[Representation, SubspaceSplit]:
    """Polynomial representation of degree ``n`` with the split ``V1 = span{s z_k^n}``.

    For so(m) only ``k <= 2 floor(m/2)`` enters V1. Degree 1 is allowed, but then
    the lemma-0 shape conditions fail (the action does not move V1 into V2).
    """
    if family not in {"su", "so", "sp", "sl"}:
        raise ValueError(f"unsupported family {family!r}")
    if n < 1:
        raise ValueError("degree must be at least 1")
    alg, real = _source(family, m)
    r = _nvars(family, m)
    basis = MonomialBasis(r, n)
    ops = [derivation_action(variable_action(family, real[l], m), basis) for l in alg.labels]
    rep = Representation(alg, ops, basis)
    kmax = 2 * (m // 2) if family == "so" else r
    v1 = [basis.pure_power(k, ph) for k in range(kmax) for ph in (0, 1)]
    return rep, SubspaceSplit.from_v1(basis.dim, v1)


def _source(family: str, m: int) -> tuple[LieAlgebra, MatrixRealization]:
    if family == "sl":
        return build_noncompact_sl(m)
    alg, real, _ = build_compact(family, m)
    return alg, real


def standard_rep(family: str, m: int) -> tuple[Representation, SubspaceSplit]:
    """The defining action on ``C^r`` realified, with ``V1 = {z1, i z1}``.

    This is the matrix action itself (``A z_k = sum_j A[j, k] z_j``), not the
    contragredient action of :func:`build_poly_rep` with ``n = 1``.
    """
    alg, real = _source(family, m)
    basis = MonomialBasis(_nvars(family, m), 1)
    ops = [derivation_action(real[l], basis) for l in alg.labels]
    rep = Representation(alg, ops, basis)
    return rep, SubspaceSplit.from_v1(basis.dim, [0, 1])


# ---------------------------------------------------------------------------
# Casimir decomposition
# ---------------------------------------------------------------------------

class DecompositionUnresolved(ValueError):
    pass


@dataclass(frozen=True)
class CasimirBlock:
    """Casimir eigenspace: eigenvalue, orthonormal-ish column basis, top weight data."""

    eigenvalue: float
    basis: np.ndarray
    highest_weight: int
    top_multiplicity: int

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def isotypic(self) -> bool:
        # one realified complex irreducible has top-weight multiplicity 2
        return self.top_multiplicity > 2


def casimir_decompose_su2(rep: Representation, tau: float = TAU_EIG) -> list[CasimirBlock]:
    """Split ``V`` into eigenspaces of ``pi(H)^2 + pi(X)^2 + pi(Y)^2``.

    Eigenvalues within ``tau`` (relative to the spectral scale) are merged;
    gaps between ``tau`` and ``1e4 * tau`` are ambiguous and raise
    :class:`DecompositionUnresolved`. Each block is checked to be invariant.
    """
    return casimir_blocks(rep.float_operators(), tau)


def casimir_blocks(ops: Sequence[np.ndarray], tau: float = TAU_EIG) -> list[CasimirBlock]:
    """Float core of :func:`casimir_decompose_su2` for operators ``pi(H), pi(X), pi(Y)``."""
    if len(ops) != 3:
        raise ValueError("source algebra must be su(2) in the basis H, X, Y")
    d = ops[0].shape[0]
    cas = sum(op @ op for op in ops)
    vals, vecs = np.linalg.eig(cas)
    scale = max(1.0, float(np.max(np.abs(vals)))) if d else 1.0
    if np.max(np.abs(vals.imag), initial=0.0) > 1e4 * tau * scale:
        raise DecompositionUnresolved("Casimir has non-real eigenvalues")
    order = np.argsort(vals.real)
    re = vals.real[order]
    clusters: list[list[int]] = []
    for pos, idx in enumerate(order):
        if clusters and abs(re[pos] - re[pos - 1]) <= tau * scale:
            clusters[-1].append(idx)
            continue
        if clusters and abs(re[pos] - re[pos - 1]) < 1e4 * tau * scale:
            raise DecompositionUnresolved(
                f"Casimir eigenvalues {re[pos - 1]:.3e} and {re[pos]:.3e} are too close to separate"
            )
        clusters.append([idx])
    blocks = []
    h = ops[0]
    for cl in clusters:
        lam = float(np.mean(vals.real[cl]))
        # eigenspace as the null space of (C - lam), which is robust to eigvec conditioning
        u, s, vt = np.linalg.svd(cas - lam * np.eye(d))
        null = vt[d - len(cl):].T
        if np.linalg.matrix_rank(null, tol=1e-6) != len(cl):
            raise DecompositionUnresolved("Casimir is not diagonalizable")
        q, _ = np.linalg.qr(null)
        for op in ops:
            resid = op @ q - q @ (q.T @ op @ q)
            if np.max(np.abs(resid), initial=0.0) > 1e-6 * max(1.0, np.max(np.abs(op))):
                raise DecompositionUnresolved("Casimir eigenspace is not invariant")
        # weights: pi(H) restricted has eigenvalues +-i*w (compact form, w integer)
        hw = np.linalg.eigvals(q.T @ h @ q)
        weights = hw.imag if np.allclose(hw.real, 0, atol=1e-6) else hw.real
        top = int(round(float(np.max(weights, initial=0.0))))
        mult = int(np.sum(np.abs(weights - top) < 1e-6))
        blocks.append(CasimirBlock(lam, q, top, mult if top else len(cl)))
    return blocks
