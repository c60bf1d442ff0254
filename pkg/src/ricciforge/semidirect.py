"""Semidirect products ``(R Z + u) x| V`` and ``(a + r) x| n``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lie_core import BasisLabel, LieAlgebra, StructureTensor
from .poly_reps import Representation, _columns, _matvec
from .rational import qarray

__all__ = [
    "SemidirectSpec",
    "SemidirectError",
    "central_semidirect",
    "general_semidirect",
    "check_derivation",
]


class SemidirectError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SemidirectSpec:
    """``left`` acts on ``right`` through ``action[i]`` (matrix of ``left.labels[i]``).

    ``a_indices`` marks the abelian factor of ``left``; it must commute with all of
    ``left``. By default it is every ``Z``-labelled element.
    """

    left: LieAlgebra
    right: LieAlgebra
    action: tuple
    a_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        acts = tuple(qarray(a) for a in self.action)
        if len(acts) != self.left.dim:
            raise SemidirectError(f"{len(acts)} action matrices for {self.left.dim} left elements")
        for a in acts:
            if a.shape != (self.right.dim, self.right.dim):
                raise SemidirectError("action matrices must match the right factor's dimension")
        object.__setattr__(self, "action", acts)
        if self.a_indices is None:
            object.__setattr__(self, "a_indices", tuple(self.left.indices("Z")))


def check_derivation(D, L: LieAlgebra) -> tuple[int, int] | None:
    """First basis pair ``(i, j)`` with ``D[e_i, e_j] != [D e_i, e_j] + [e_i, D e_j]``."""
    D = qarray(D)
    n = L.dim
    cols = _columns(D)
    rows = L.bracket.rows()
    for i in range(n):
        for j in range(i + 1, n):
            acc: dict[int, Fraction] = {}
            for k, c in L.bracket.bracket_basis(i, j).items():
                for r, v in cols[k].items():
                    acc[r] = acc.get(r, 0) + c * v
            # [D e_i, e_j]
            for p, dv in cols[i].items():
                for r, c in rows.get(p, {}).get(j, {}).items():
                    acc[r] = acc.get(r, 0) - dv * c
            # [e_i, D e_j]
            for p, dv in cols[j].items():
                for r, c in rows.get(i, {}).get(p, {}).items():
                    acc[r] = acc.get(r, 0) - dv * c
            if any(acc.values()):
                return (i, j)
    return None


def _homomorphism_defect(left: LieAlgebra, acts: Sequence[np.ndarray]) -> tuple[int, int] | None:
    rep = Representation(left, acts, check=False)
    return rep.homomorphism_defect()


def general_semidirect(spec: SemidirectSpec) -> LieAlgebra:
    """Basis: left elements, then right elements; ``[x, w] = action(x) w``."""
    left, right = spec.left, spec.right
    for a in spec.a_indices:
        for b in range(left.dim):
            if left.bracket.bracket_basis(a, b):
                raise SemidirectError(f"[a,r] != 0: [{left.labels[a]}, {left.labels[b]}] is nonzero")
    for i, act in enumerate(spec.action):
        bad = check_derivation(act, right)
        if bad is not None:
            x, y = bad
            raise SemidirectError(
                f"not a derivation: action of {left.labels[i]} on ({right.labels[x]}, {right.labels[y]})"
            )
    bad = _homomorphism_defect(left, spec.action)
    if bad is not None:
        raise SemidirectError(
            f"action is not a homomorphism on ({left.labels[bad[0]]}, {left.labels[bad[1]]})"
        )
    labels = left.labels + right.labels
    if len(set(labels)) != len(labels):
        raise SemidirectError("left and right labels collide")
    off = left.dim
    entries: dict[tuple[int, int, int], Fraction] = dict(left.bracket.entries)
    for (i, j, k), c in right.bracket.entries.items():
        entries[(i + off, j + off, k + off)] = c
    for x, act in enumerate(spec.action):
        for w, col in enumerate(_columns(act)):
            for r, v in col.items():
                entries[(x, w + off, r + off)] = v
    alg = LieAlgebra(labels, StructureTensor(len(labels), entries), left.root_meta)
    return alg


def central_semidirect(u: LieAlgebra, rep: Representation) -> LieAlgebra:
    """``(R Z + u) x| V`` with ``Z`` central in the left factor and ``ad Z|_V = Id``."""
    if rep.source is not u and rep.source != u:
        raise SemidirectError("representation source differs from u")
    bad = rep.homomorphism_defect()
    if bad is not None:
        raise SemidirectError(
            f"homomorphism violation on ({u.labels[bad[0]]}, {u.labels[bad[1]]})"
        )
    if BasisLabel.z() in u.labels:
        raise SemidirectError("u already contains a Z element")
    d = rep.dim_V
    labels = (BasisLabel.z(),) + u.labels + rep.labels
    off = 1 + u.dim
    entries: dict[tuple[int, int, int], Fraction] = {}
    for (i, j, k), c in u.bracket.entries.items():
        entries[(i + 1, j + 1, k + 1)] = c
    for v in range(d):
        entries[(0, off + v, off + v)] = Fraction(1)
    for x, cols in enumerate(rep.sparse_columns()):
        for v, col in enumerate(cols):
            for r, c in col.items():
                entries[(x + 1, off + v, off + r)] = c
    return LieAlgebra(labels, StructureTensor(len(labels), entries), u.root_meta)


def abelian(labels: Sequence) -> LieAlgebra:
    labels = tuple(BasisLabel.generic(l) if isinstance(l, str) else l for l in labels)
    return LieAlgebra(labels, StructureTensor(len(labels), {}))


def block_positions(L: LieAlgebra, left_dim: int) -> dict[str, list[int]]:
    """Index sets ``a`` (Z-labelled), ``r`` and ``n`` for an algebra built by the constructors above."""
    a = [i for i in L.indices("Z") if i < left_dim]
    r = [i for i in range(left_dim) if i not in a]
    n = list(range(left_dim, L.dim))
    return {"a": a, "r": r, "n": n}
