"""Diagonal scaling degenerations ``t -> phi_t . mu`` and their limits as ``t -> oo``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .lie_core import LieAlgebra, StructureTensor
from .poly_reps import SubspaceSplit
from .rational import Q, qzeros

__all__ = [
    "ScalingFamily",
    "LaurentBracket",
    "LimitDiverges",
    "scale_bracket",
    "take_limit",
    "dropped_terms",
    "lemma0_family",
    "psi_family",
    "rho_isomorphism",
]


class LimitDiverges(ValueError):
    pass


@dataclass(frozen=True)
class ScalingFamily:
    """``phi_t(e_i) = constants[i] * t**exponents[i] * e_i``."""

    exponents: tuple[int, ...]
    constants: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        object.__setattr__(self, "constants", tuple(Q(c) for c in self.constants))
        if len(self.exponents) != len(self.constants):
            raise ValueError("exponents and constants differ in length")
        if any(c == 0 for c in self.constants):
            raise ValueError("scaling constants must be nonzero")

    @classmethod
    def identity(cls, n: int) -> "ScalingFamily":
        return cls((0,) * n, (Fraction(1),) * n)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def matrix(self, t) -> np.ndarray:
        """Exact diagonal matrix of ``phi_t`` at a rational ``t``."""
        t = Q(t)
        out = qzeros((self.dim, self.dim))
        for i, (e, c) in enumerate(zip(self.exponents, self.constants)):
            out[i, i] = c * t ** e
        return out


class LaurentBracket:
    """Structure constants that are Laurent polynomials in ``t``: ``(i,j,k) -> {exponent: coeff}``."""

    def __init__(self, dim: int, entries: Mapping, labels=None, root_meta=None):
        clean: dict[tuple[int, int, int], Mapping[int, Fraction]] = {}
        for key, poly in entries.items():
            i, j, k = key
            if not (0 <= i < j < dim and 0 <= k < dim):
                raise ValueError(f"bad key {key}")
            p = {int(e): Q(c) for e, c in poly.items() if Q(c) != 0}
            if p:
                clean[key] = MappingProxyType(p)
        self.dim = dim
        self.entries = MappingProxyType(dict(sorted(clean.items())))
        self.labels = labels
        self.root_meta = root_meta

    def at(self, t) -> LieAlgebra:
        """Instantiate at a rational ``t``."""
        t = Q(t)
        ent = {key: sum((c * t ** e for e, c in poly.items()), Fraction(0)) for key, poly in self.entries.items()}
        return LieAlgebra(self.labels, StructureTensor(self.dim, ent), self.root_meta)

    def max_exponent(self) -> int | None:
        exps = [e for poly in self.entries.values() for e in poly]
        return max(exps) if exps else None

    def __repr__(self) -> str:
        return f"LaurentBracket(dim={self.dim}, nnz={len(self.entries)})"


def scale_bracket(L: LieAlgebra, F: ScalingFamily) -> LaurentBracket:
    """``phi_t . mu``: the constant ``c_ij^k`` becomes ``(f_k / (f_i f_j)) c_ij^k``."""
    if F.dim != L.dim:
        raise ValueError("family dimension differs from the algebra")
    e, c = F.exponents, F.constants
    entries = {}
    for (i, j, k), v in L.bracket.entries.items():
        entries[(i, j, k)] = {e[k] - e[i] - e[j]: c[k] / (c[i] * c[j]) * v}
    return LaurentBracket(L.dim, entries, L.labels, L.root_meta)


def take_limit(LB: LaurentBracket) -> LieAlgebra:
    """Limit as ``t -> oo``: keep ``t^0`` terms, drop negative powers, refuse positive powers."""
    kept = {}
    for key, poly in LB.entries.items():
        for e in poly:
            if e > 0:
                i, j, k = key
                raise LimitDiverges(f"limit diverges at (i,j,k) = {key} with exponent {e}")
        if 0 in poly:
            kept[key] = poly[0]
    labels = LB.labels
    if labels is None:
        from .lie_core import BasisLabel

        labels = tuple(BasisLabel.generic(f"e{i + 1}") for i in range(LB.dim))
    return LieAlgebra(labels, StructureTensor(LB.dim, kept), LB.root_meta)


def dropped_terms(LB: LaurentBracket) -> list[tuple[tuple[int, int, int], int, Fraction]]:
    """Terms that vanish in the limit, as ``((i, j, k), exponent, coefficient)``."""
    return [(key, e, c) for key, poly in LB.entries.items() for e, c in poly.items() if e < 0]


def lemma0_family(L: LieAlgebra, split: SubspaceSplit, rho) -> ScalingFamily:
    """Exponents ``Z, H -> 0``; ``X, Y -> 1``; ``V1 -> 1`` with constant ``1/rho``; ``V2 -> 2``.

    ``L`` must end with the representation space, as built by ``central_semidirect``.
    """
    rho = Q(rho)
    if rho == 0:
        raise ValueError("rho must be nonzero")
    off = L.dim - split.dim
    if off < 0:
        raise ValueError("split is larger than the algebra")
    exps, consts = [], []
    for i, lab in enumerate(L.labels[:off]):
        if lab.kind in ("Z", "H"):
            exps.append(0)
        elif lab.kind in ("X", "Y"):
            exps.append(1)
        else:
            raise ValueError(f"cannot place {lab} in the lemma-0 family")
        consts.append(Fraction(1))
    v1 = set(split.V1)
    for v in range(split.dim):
        if v in v1:
            exps.append(1)
            consts.append(1 / rho)
        else:
            exps.append(2)
            consts.append(Fraction(1))
    return ScalingFamily(tuple(exps), tuple(consts))


def psi_family(L: LieAlgebra, n_indices: Sequence[int]) -> ScalingFamily:
    """Identity on the complement of ``n`` and ``t Id`` on ``n``."""
    nset = set(n_indices)
    return ScalingFamily(tuple(1 if i in nset else 0 for i in range(L.dim)), (Fraction(1),) * L.dim)


def rho_isomorphism(L: LieAlgebra, split: SubspaceSplit, rho) -> np.ndarray:
    """Diagonal ``g`` with ``g . mu_rho = mu_1`` for the lemma-0 limits (``rho`` on V1)."""
    rho = Q(rho)
    off = L.dim - split.dim
    g = qzeros((L.dim, L.dim))
    for i in range(L.dim):
        g[i, i] = Fraction(1)
    for v in split.V1:
        g[off + v, off + v] = rho
    return g
