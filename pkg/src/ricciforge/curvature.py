"""Ricci operators of left-invariant metrics on Lie algebras.

``Ric = M - B/2 - S(ad H)`` where ``M`` is the moment-map term, ``B`` the Killing
operator, ``H`` the mean curvature vector and ``S`` the symmetric part with
respect to the inner product.

With a rational Gram matrix everything except the eigenvalues is exact: the Gram
matrix is factored as ``L D L^T`` and the formulas are evaluated in the
orthogonal (not orthonormal) frame ``f = L^{-T} e``, so no square roots appear.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .lie_core import LieAlgebra, gl_action, is_abelian, is_ideal, is_nilpotent, is_subalgebra, restrict
from .rational import inverse, is_rational_array, ldl, qarray, qeye, qzeros, to_float

__all__ = [
    "MetricLieAlgebra",
    "RicciReport",
    "Definiteness",
    "NiceReport",
    "StructureError",
    "mean_curvature",
    "moment_map",
    "ricci",
    "ricci_solvable",
    "ricci_triple",
    "definiteness",
    "is_nice_basis",
    "TAU_DEF",
]

TAU_DEF = 1e-9


class StructureError(ValueError):
    """Raised when a block formula's structural preconditions fail."""


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    algebra: LieAlgebra
    gram: np.ndarray

    def __post_init__(self):
        n = self.algebra.dim
        g = self.gram
        if is_rational_array(g):
            g = qarray(g)
            if g.shape != (n, n):
                raise ValueError(f"gram must be {n}x{n}")
            ldl(g)  # raises unless symmetric positive definite
        else:
            g = np.array(g, dtype=float)
            if g.shape != (n, n):
                raise ValueError(f"gram must be {n}x{n}")
            if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.abs(g).max())):
                raise ValueError("gram matrix is not symmetric")
            try:
                np.linalg.cholesky(g)
            except np.linalg.LinAlgError as exc:
                raise ValueError("gram matrix is not positive definite") from exc
        object.__setattr__(self, "gram", g)

    @classmethod
    def orthonormal(cls, L: LieAlgebra) -> "MetricLieAlgebra":
        return cls(L, qeye(L.dim))

    @property
    def exact(self) -> bool:
        return self.gram.dtype == object

    @property
    def dim(self) -> int:
        return self.algebra.dim


@dataclass(frozen=True)
class Definiteness:
    verdict: str
    eigenvalues: tuple[float, ...]
    lambda_max: float
    lambda_min: float
    tolerance: float
    offending: float | None = None


@dataclass(frozen=True, eq=False)
class RicciReport:
    """All terms are operators in the algebra basis (column ``j`` = image of ``e_j``)."""

    M: np.ndarray
    B_op: np.ndarray
    H_vec: np.ndarray
    S_adH: np.ndarray
    ricci: np.ndarray
    eigenvalues: tuple[float, ...]
    verdict: str
    exact: bool
    definiteness: Definiteness = field(repr=False)

    @property
    def lambda_max(self) -> float:
        return self.eigenvalues[-1]


# ---------------------------------------------------------------------------
# exact evaluation in an orthogonal frame
# ---------------------------------------------------------------------------

def _frame(ML: MetricLieAlgebra):
    """``(P, P^{-1}, d, algebra in the f-frame)`` with ``P^T G P = diag(d)``."""
    G = ML.gram
    n = ML.dim
    diagonal = all(G[i, j] == 0 for i in range(n) for j in range(n) if i != j)
    if diagonal:
        return None, None, [G[i, i] for i in range(n)], ML.algebra
    low, d = ldl(G)
    Lt = low.T
    P = inverse(Lt)
    return P, Lt, d, gl_action(Lt, ML.algebra)


class _Sparse:
    """Index views of a structure tensor used by the exact formulas."""

    def __init__(self, L: LieAlgebra):
        rows = L.bracket.rows()
        # c_{pa}^k keyed by (a, k) -> [(p, c)]
        self.by_ak: dict[tuple[int, int], list[tuple[int, Fraction]]] = {}
        for p, row in rows.items():
            for a, vec in row.items():
                for k, c in vec.items():
                    self.by_ak.setdefault((a, k), []).append((p, c))
        # c_{ab}^p with a < b keyed by (a, b) -> [(p, c)]
        self.by_ab: dict[tuple[int, int], list[tuple[int, Fraction]]] = {}
        for (a, b, p), c in L.bracket.entries.items():
            self.by_ab.setdefault((a, b), []).append((p, c))
        self.n = L.dim
        self.trace = [Fraction(0)] * L.dim
        for (a, k), lst in self.by_ak.items():
            if a == k:
                for p, c in lst:
                    self.trace[p] += c


def _exact_terms(alg: LieAlgebra, d: Sequence[Fraction]):
    """``(M_op, B_op, h, S(ad H))`` in an orthogonal frame with squared norms ``d``."""
    n = alg.dim
    sp = _Sparse(alg)
    m = qzeros((n, n))
    for (a, k), lst in sp.by_ak.items():
        w = d[k] / d[a]
        for p, cp in lst:
            for q, cq in lst:
                if q >= p:
                    m[p, q] -= Fraction(1, 2) * cp * cq * w
    for (a, b), lst in sp.by_ab.items():
        w = 1 / (d[a] * d[b])
        for p, cp in lst:
            for q, cq in lst:
                if q >= p:
                    # ordered sum over (a, b) and (b, a)
                    m[p, q] += Fraction(1, 2) * cp * cq * d[p] * d[q] * w
    B = qzeros((n, n))
    for (a, k), lst in sp.by_ak.items():
        other = sp.by_ak.get((k, a))
        if not other:
            continue
        for p, cp in lst:
            for q, cq in other:
                if q >= p:
                    B[p, q] += cp * cq
    for p in range(n):
        for q in range(p + 1, n):
            m[q, p] = m[p, q]
            B[q, p] = B[p, q]
    M_op = qzeros((n, n))
    B_op = qzeros((n, n))
    for p in range(n):
        for q in range(n):
            if m[p, q]:
                M_op[p, q] = m[p, q] / d[p]
            if B[p, q]:
                B_op[p, q] = B[p, q] / d[p]
    h = [sp.trace[a] / d[a] for a in range(n)]
    A = qzeros((n, n))
    for (a, k), lst in sp.by_ak.items():
        for p, c in lst:
            if h[p]:
                A[k, a] += h[p] * c
    S = qzeros((n, n))
    for i in range(n):
        for j in range(n):
            # A* = D^{-1} A^T D
            S[i, j] = (A[i, j] + A[j, i] * d[j] / d[i]) / 2
    return M_op, B_op, h, S


def _conj(P, Pinv, X):
    if P is None:
        return X
    return P.dot(X).dot(Pinv)


def _exact_report(ML: MetricLieAlgebra, tau: float) -> RicciReport:
    P, Pinv, d, alg = _frame(ML)
    M_f, B_f, h, S_f = _exact_terms(alg, d)
    R_f = M_f - B_f / 2 - S_f
    # D^{1/2} R_f D^{-1/2} is symmetric
    sq = np.sqrt(np.array([float(v) for v in d]))
    sym = to_float(R_f) * sq[:, None] / sq[None, :]
    sym = (sym + sym.T) / 2
    defin = definiteness(sym, tau)
    hv = qarray(h)
    if P is not None:
        hv = P.dot(hv)
    return RicciReport(
        M=_conj(P, Pinv, M_f),
        B_op=_conj(P, Pinv, B_f),
        H_vec=hv,
        S_adH=_conj(P, Pinv, S_f),
        ricci=_conj(P, Pinv, R_f),
        eigenvalues=defin.eigenvalues,
        verdict=defin.verdict,
        exact=True,
        definiteness=defin,
    )


# ---------------------------------------------------------------------------
# floating point evaluation in an orthonormal frame
# ---------------------------------------------------------------------------

def _orthonormal_tensor(L: LieAlgebra, G: np.ndarray):
    """Dense constants in the orthonormal frame ``u = P^T``-columns, plus ``P`` and ``P^{-1}``."""
    C = np.linalg.cholesky(G)  # G = C C^T
    P = np.linalg.inv(C).T  # columns: orthonormal basis in e-coordinates
    Pinv = C.T
    c = L.bracket.dense(float)
    cu = np.einsum("ia,jb,ijl,kl->abk", P, P, c, Pinv, optimize=True)
    return cu, P, Pinv


def _orthonormal_terms(c: np.ndarray):
    """``(M, B, H, S(ad H))`` for constants ``c[i, j, k]`` in an orthonormal basis."""
    T1 = np.einsum("pak,qak->pq", c, c)
    T2 = np.einsum("abp,abq->pq", c, c)
    M = -0.5 * T1 + 0.25 * T2
    ad = np.transpose(c, (0, 2, 1))  # ad[p][k, a] = c_{pa}^k
    B = np.einsum("pka,qak->pq", ad, ad)
    H = np.einsum("paa->p", c)
    A = np.einsum("p,pka->ka", H, ad)
    S = (A + A.T) / 2
    return M, B, H, S


def _float_report(ML: MetricLieAlgebra, tau: float) -> RicciReport:
    G = np.array(ML.gram, dtype=float)
    cu, P, Pinv = _orthonormal_tensor(ML.algebra, G)
    M, B, H, S = _orthonormal_terms(cu)
    R = M - B / 2 - S
    defin = definiteness((R + R.T) / 2, tau)
    conj = lambda X: P @ X @ Pinv
    return RicciReport(
        M=conj(M),
        B_op=conj(B),
        H_vec=P @ H,
        S_adH=conj(S),
        ricci=conj(R),
        eigenvalues=defin.eigenvalues,
        verdict=defin.verdict,
        exact=False,
        definiteness=defin,
    )


def ricci(ML: MetricLieAlgebra, tau: float = TAU_DEF) -> RicciReport:
    """Full Ricci report; exact rationals whenever the Gram matrix is rational."""
    if ML.exact:
        return _exact_report(ML, tau)
    return _float_report(ML, tau)


def mean_curvature(ML: MetricLieAlgebra) -> np.ndarray:
    """The ``H`` with ``<H, X> = tr ad X``; solves ``G H = (tr ad e_i)_i``."""
    from .lie_core import trace_ad

    t = trace_ad(ML.algebra)
    if ML.exact:
        if not any(t):
            return qzeros(ML.dim)
        from .rational import solve

        return solve(ML.gram, qarray(t))
    return np.linalg.solve(ML.gram, np.array([float(v) for v in t]))


def moment_map(ML: MetricLieAlgebra) -> np.ndarray:
    """Moment-map term ``M`` as an operator in the algebra basis."""
    if ML.exact:
        P, Pinv, d, alg = _frame(ML)
        M_f = _exact_terms(alg, d)[0]
        return _conj(P, Pinv, M_f)
    cu, P, Pinv = _orthonormal_tensor(ML.algebra, np.asarray(ML.gram, dtype=float))
    return P @ _orthonormal_terms(cu)[0] @ Pinv


# ---------------------------------------------------------------------------
# definiteness
# ---------------------------------------------------------------------------

def definiteness(sym, tau: float = TAU_DEF, gram=None) -> Definiteness:
    """Classify a symmetric matrix (or an operator self-adjoint for ``gram``).

    The tolerance is ``tau`` times the largest absolute eigenvalue.
    """
    A = to_float(sym) if np.asarray(sym).dtype == object else np.asarray(sym, dtype=float)
    if gram is not None:
        G = to_float(gram) if np.asarray(gram).dtype == object else np.asarray(gram, dtype=float)
        form = G @ A
        scale = max(1.0, np.abs(form).max())
        if np.abs(form - form.T).max() > 1e-12 * scale * 1e3:
            raise ValueError("operator is not self-adjoint for the given gram")
        vals = scipy.linalg.eigh((form + form.T) / 2, G, eigvals_only=True)
    else:
        scale = max(1.0, np.abs(A).max()) if A.size else 1.0
        if A.size and np.abs(A - A.T).max() > 1e-12 * scale:
            raise ValueError("matrix is not symmetric")
        vals = np.linalg.eigvalsh((A + A.T) / 2) if A.size else np.zeros(0)
    vals = np.sort(vals)
    big = float(np.abs(vals).max()) if vals.size else 0.0
    tol = tau * big
    lmax = float(vals[-1]) if vals.size else 0.0
    lmin = float(vals[0]) if vals.size else 0.0
    near_zero = [float(v) for v in vals if abs(v) <= tol]
    offending = None
    if big == 0.0:
        verdict = "zero"
    elif lmax < -tol:
        verdict = "negative_definite"
    elif lmin > tol:
        verdict = "positive_definite"
    elif lmax <= tol:
        verdict = "negative_semidefinite"
        offending = near_zero[-1] if near_zero else lmax
    elif lmin >= -tol:
        verdict = "positive_semidefinite"
        offending = near_zero[0] if near_zero else lmin
    else:
        verdict = "indefinite"
        offending = lmax
    return Definiteness(verdict, tuple(float(v) for v in vals), lmax, lmin, tol, offending)


# ---------------------------------------------------------------------------
# block formulas for (a + r) x| n
# ---------------------------------------------------------------------------

def _check_blocks(ML: MetricLieAlgebra, a: Sequence[int], r: Sequence[int], nn: Sequence[int]):
    L = ML.algebra
    a, r, nn = list(a), list(r), list(nn)
    if sorted(a + r + nn) != list(range(L.dim)):
        raise StructureError("blocks must partition the basis")
    G = to_float(ML.gram) if ML.exact else np.asarray(ML.gram, dtype=float)
    h = a + r
    for block, rest in ((a, r + nn), (r, nn)):
        if block and rest and np.abs(G[np.ix_(block, rest)]).max() > 1e-12:
            raise StructureError("split not orthogonal")
    if not is_abelian(L, a):
        raise StructureError("a is not abelian")
    for i in a:
        for j in r:
            if L.bracket.bracket_basis(i, j):
                raise StructureError("[a,r] != 0")
    if not is_subalgebra(L, h):
        raise StructureError("a + r is not a subalgebra")
    if not is_ideal(L, nn):
        raise StructureError("n is not an ideal")
    if nn and not is_nilpotent(restrict(L, nn)):
        raise StructureError("n is not nilpotent")
    return a, r, nn, G


def _block_ricci(ML: MetricLieAlgebra, a, r, nn, check_normal: bool = False) -> np.ndarray:
    a, r, nn, G = _check_blocks(ML, a, r, nn)
    L = ML.algebra
    h = a + r
    order = h + nn
    perm = np.array(order)
    Gp = G[np.ix_(perm, perm)]
    nh = len(h)
    # block-orthonormal frame: u = P-columns (in permuted coordinates)
    P = np.zeros_like(Gp)
    if nh:
        P[:nh, :nh] = np.linalg.inv(np.linalg.cholesky(Gp[:nh, :nh])).T
    if nn:
        P[nh:, nh:] = np.linalg.inv(np.linalg.cholesky(Gp[nh:, nh:])).T
    Pinv = np.linalg.inv(P)
    c = L.bracket.dense(float)[np.ix_(perm, perm, perm)]
    cu = np.einsum("ia,jb,ijl,kl->abk", P, P, c, Pinv, optimize=True)
    N = len(order)
    hs, ns = slice(0, nh), slice(nh, N)
    ad = np.transpose(cu, (0, 2, 1))  # ad[p][k, a]
    adn = ad[:, ns, ns]  # ad e_p restricted to n, for every p
    R = np.zeros((N, N))
    # h x h: Ric of h minus tr S(ad U|n) S(ad U'|n)
    if nh:
        ch = cu[hs, hs, hs]
        Mh, Bh, Hh, Sh = _orthonormal_terms(ch)
        Rh = Mh - Bh / 2 - Sh
        Sn = (adn[hs] + np.transpose(adn[hs], (0, 2, 1))) / 2
        R[hs, hs] = Rh - np.einsum("pij,qji->pq", Sn, Sn)
    # h x n: -1/2 tr((ad U|n)^t ad Z|n)
    if nh and nn:
        cross = -0.5 * np.einsum("pij,qij->pq", adn[hs], adn[ns])
        R[hs, ns] = cross
        R[ns, hs] = cross.T
    # n x n: M_n - S(ad H|n) + 1/2 sum [ad U_i|n, (ad U_i|n)^t]
    if nn:
        cn = cu[ns, ns, ns]
        Mn = _orthonormal_terms(cn)[0]
        H = np.einsum("paa->p", cu)
        adH = np.einsum("p,pij->ij", H, adn)
        comm = sum((x @ x.T - x.T @ x for x in adn[hs]), np.zeros((len(nn), len(nn))))
        R[ns, ns] = Mn - (adH + adH.T) / 2 + comm / 2
    if check_normal and nh and nn:
        normal = all(np.allclose(x @ x.T, x.T @ x, atol=1e-10) for x in adn[:len(a)])
        if normal and np.abs(R[:len(a), ns]).max(initial=0.0) > 1e-10:
            raise StructureError("normal ad a|n but <Ric a, n> != 0")
    # back to the original ordering and basis
    Rop = P @ R @ Pinv
    inv = np.argsort(perm)
    return Rop[np.ix_(inv, inv)]


def ricci_solvable(ML: MetricLieAlgebra, split: tuple[Sequence[int], Sequence[int]]) -> np.ndarray:
    """Ricci operator of ``a x| n`` with ``a`` abelian, ``n`` a nilpotent ideal, ``a`` orthogonal to ``n``."""
    a, nn = split
    return _block_ricci(ML, a, [], nn, check_normal=True)


def ricci_triple(ML: MetricLieAlgebra, split: tuple[Sequence[int], Sequence[int], Sequence[int]]) -> np.ndarray:
    """Ricci operator of ``(a + r) x| n`` from the block formulas (orthogonal blocks, ``[a, r] = 0``)."""
    a, r, nn = split
    return _block_ricci(ML, a, r, nn)


# ---------------------------------------------------------------------------
# nice bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NiceReport:
    nice: bool
    failed_condition: int | None
    witness: tuple | None
    moment_map_diagonal: bool | None


def is_nice_basis(L: LieAlgebra) -> NiceReport:
    """Check the two sparsity conditions; if nice, also confirm ``M`` is diagonal."""
    outs: dict[tuple[int, int], int] = {}
    partners: dict[tuple[int, int], set[int]] = {}
    for (i, j, k), _ in L.bracket.entries.items():
        if (i, j) in outs and outs[(i, j)] != k:
            return NiceReport(False, 1, (i, j), None)
        outs[(i, j)] = k
        partners.setdefault((i, k), set()).add(j)
        partners.setdefault((j, k), set()).add(i)
    for (i, k), js in sorted(partners.items()):
        if len(js) > 1:
            return NiceReport(False, 2, (i, k, tuple(sorted(js))), None)
    M = moment_map(MetricLieAlgebra.orthonormal(L))
    n = L.dim
    diag = all(M[i, j] == 0 for i in range(n) for j in range(n) if i != j)
    return NiceReport(True, None, None, diag)
