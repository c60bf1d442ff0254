"""Small hand-built algebras shared by the tests."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ricciforge.classical import build_compact
from ricciforge.lie_core import BasisLabel, LieAlgebra, StructureTensor
from ricciforge.semidirect import SemidirectSpec, general_semidirect


def generic(n: int, prefix: str = "e") -> tuple[BasisLabel, ...]:
    return tuple(BasisLabel.generic(f"{prefix}{i + 1}") for i in range(n))


def h3() -> LieAlgebra:
    return LieAlgebra.from_brackets(generic(3), {(0, 1, 2): 1})


def two_dim() -> LieAlgebra:
    """``[A, X] = X``."""
    return LieAlgebra.from_brackets((BasisLabel.generic("A"), BasisLabel.generic("X")), {(0, 1, 1): 1})


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(generic(n), StructureTensor(n, {}))


def _qmul(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


_UNITS = [tuple(int(i == k) for i in range(4)) for k in range(4)]


def quaternion_left(k: int) -> np.ndarray:
    """Left multiplication by the ``k``-th unit quaternion on the basis ``1, i, j, k``."""
    return np.array([_qmul(_UNITS[k], e) for e in _UNITS]).T


def quaternion_right(k: int) -> np.ndarray:
    return np.array([_qmul(e, _UNITS[k]) for e in _UNITS]).T


def h5() -> LieAlgebra:
    """Heisenberg algebra ``[v, w] = <R_i v, w> e5`` on ``H + R``."""
    Ri = quaternion_right(1)
    br = {}
    for a in range(4):
        for b in range(a + 1, 4):
            w = int(Ri[b, a])
            if w:
                br[(a, b, 4)] = w
    return LieAlgebra(generic(5, "n"), StructureTensor(5, br))


def _left_factor() -> LieAlgebra:
    su2 = build_compact("su", 2)[0]
    entries = {(i + 1, j + 1, k + 1): c for (i, j, k), c in su2.bracket.entries.items()}
    return LieAlgebra((BasisLabel.z(),) + su2.labels, StructureTensor(4, entries))


def _embed(M, last=0) -> np.ndarray:
    A = np.zeros((5, 5), dtype=int)
    A[:4, :4] = M
    A[4, 4] = last
    return A


@lru_cache(maxsize=None)
def su2_h5(z_weights=(1, 1, 1, 1, 2), trivial: bool = False) -> LieAlgebra:
    """``(R Z + su(2)) x| h5`` with su(2) acting on ``H`` by left multiplication."""
    if trivial:
        acts = [np.diag(z_weights)] + [np.zeros((5, 5), dtype=int)] * 3
    else:
        acts = [np.diag(z_weights)] + [_embed(quaternion_left(k)) for k in (1, 2, 3)]
    return general_semidirect(SemidirectSpec(_left_factor(), h5(), tuple(acts)))


def su2_abelian(rep_ops, z_diag) -> LieAlgebra:
    """``(R Z + su(2)) x| R^d`` with the given su(2) operators and diagonal ``ad Z``."""
    d = len(z_diag)
    right = LieAlgebra(generic(d, "n"), StructureTensor(d, {}))
    acts = [np.diag(z_diag)] + [np.asarray(op) for op in rep_ops]
    return general_semidirect(SemidirectSpec(_left_factor(), right, tuple(acts)))


# ---------------------------------------------------------------------------
# seeded random instances for the block Ricci formulas
# ---------------------------------------------------------------------------

def random_spd(rng, k: int) -> np.ndarray:
    A = rng.normal(size=(k, k))
    return A @ A.T + k * np.eye(k)


def block_gram(rng, sizes) -> np.ndarray:
    G = np.zeros((sum(sizes), sum(sizes)))
    o = 0
    for k in sizes:
        if k:
            G[o:o + k, o:o + k] = random_spd(rng, k)
        o += k
    return G


def _free_two_step(d: int) -> LieAlgebra:
    """Free 2-step nilpotent algebra on ``d`` generators: ``[v_i, v_j] = w_ij``."""
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    br = {(i, j, d + p): 1 for p, (i, j) in enumerate(pairs)}
    return LieAlgebra(generic(d + len(pairs), "n"), StructureTensor(d + len(pairs), br))


def _extend_to_two_step(A: np.ndarray, d: int) -> np.ndarray:
    """The derivation of the free 2-step algebra induced by ``A`` in gl(d)."""
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    n = d + len(pairs)
    D = np.zeros((n, n), dtype=int)
    D[:d, :d] = A
    pos = {p: d + q for q, p in enumerate(pairs)}
    for (i, j), col in pos.items():
        # D w_ij = [A v_i, v_j] + [v_i, A v_j]
        for k in range(d):
            for src, other, sign in ((i, j, 1), (j, i, -1)):
                c = A[k, src]
                if not c or k == other:
                    continue
                a, b = (k, other) if sign == 1 else (other, k)
                s = 1 if a < b else -1
                D[pos[(min(a, b), max(a, b))], col] += s * c
    return D


def random_solvable(seed: int):
    """``(a x| n, gram, (a, n))``: ``a`` abelian acting by commuting derivations."""
    rng = np.random.default_rng(seed)
    na = int(rng.integers(1, 3))
    if seed % 2:
        d = int(rng.integers(2, 5))
        right = abelian(d)
        M = rng.integers(-2, 3, size=(d, d))
        acts = [M, M @ M + np.eye(d, dtype=int)][:na]
    else:
        d = 3
        right = _free_two_step(d)
        acts = [_extend_to_two_step(np.diag(rng.integers(-2, 3, size=d)), d) for _ in range(na)]
    left = LieAlgebra(tuple(BasisLabel.generic(f"a{i}") for i in range(na)), StructureTensor(na, {}))
    L = general_semidirect(SemidirectSpec(left, right, tuple(acts), a_indices=tuple(range(na))))
    G = block_gram(rng, (na, right.dim))
    return L, G, (list(range(na)), list(range(na, L.dim)))


def random_triple(seed: int):
    """``((R Z + u) x| W_n, gram, (a, r, n))`` with ``u`` in su(2), sl(2) and a block-diagonal gram."""
    from ricciforge.classical import build_noncompact_sl
    from ricciforge.poly_reps import build_poly_rep
    from ricciforge.semidirect import central_semidirect

    rng = np.random.default_rng(seed)
    fam = ("su", "sl")[seed % 2]
    n = int(rng.integers(1, 4))
    u = build_compact("su", 2)[0] if fam == "su" else build_noncompact_sl(2)[0]
    rep, _ = build_poly_rep(fam, 2, n)
    L = central_semidirect(u, rep)
    G = block_gram(rng, (1, 3, rep.dim_V))
    return L, G, ([0], [1, 2, 3], list(range(4, L.dim)))


def random_basis_change(rng, n: int) -> np.ndarray:
    """Rational ``U L`` with unit-ish triangular factors; condition number stays below ~100.

    Isometry checks compare float spectra, so the basis change must not amplify
    roundoff beyond the 1e-9 tolerance.
    """
    from fractions import Fraction

    from ricciforge.rational import qarray

    up = qarray(np.triu(rng.integers(-1, 2, size=(n, n)), 1)) * Fraction(1, 2) + qarray(np.diag(rng.integers(1, 3, size=n)))
    lo = qarray(np.tril(rng.integers(-1, 2, size=(n, n)), -1)) * Fraction(1, 2) + qarray(np.eye(n, dtype=int))
    return up.dot(lo)
