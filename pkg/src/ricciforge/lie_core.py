"""Finite-dimensional real Lie algebras as exact structure-constant tensors."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .rational import Q, inverse, is_rational_array, ldl, nullspace, qarray, qzeros, row_space, to_float

__all__ = [
    "BasisLabel",
    "root_text",
    "parse_label",
    "StructureTensor",
    "LieAlgebra",
    "JacobiReport",
    "bracket_eval",
    "check_jacobi",
    "ad_matrix",
    "trace_ad",
    "killing_form",
    "killing_operator",
    "gl_action",
    "bracket_span",
    "lower_central_series",
    "derived_series",
    "is_nilpotent",
    "is_solvable",
    "center",
    "is_abelian",
    "is_ideal",
    "is_subalgebra",
    "coordinate_subspace",
    "restrict",
]

Root = tuple[tuple[int, int], ...]  # sparse (1-based e-index, coefficient), sorted


# ---------------------------------------------------------------------------
# basis labels
# ---------------------------------------------------------------------------

def root_text(root: Root) -> str:
    parts = []
    for idx, coeff in root:
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        parts.append(f"{sign}{'' if mag == 1 else mag}e{idx}")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def _parse_root(text: str) -> Root:
    terms = re.findall(r"([+-]?)(\d*)e(\d+)", text)
    rebuilt = "".join(f"{s}{c}e{i}" for s, c, i in terms)
    if not terms or rebuilt != text:
        raise ValueError(f"bad root text {text!r}")
    out: dict[int, int] = {}
    for sign, coeff, idx in terms:
        v = int(coeff) if coeff else 1
        out[int(idx)] = out.get(int(idx), 0) + (-v if sign == "-" else v)
    return tuple(sorted((i, c) for i, c in out.items() if c))


def dense_to_root(vec: Sequence[int]) -> Root:
    return tuple((i + 1, int(c)) for i, c in enumerate(vec) if c)


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Label of one basis vector.

    ``kind`` is one of ``Z``, ``H`` (Cartan element of a simple root), ``X``/``Y``
    (real root vectors of a positive root), ``monomial`` or ``generic``.
    Monomials carry an exponent vector and a phase (0 for 1, 1 for i).
    """

    kind: str
    root: Root = ()
    exponents: tuple[int, ...] = ()
    phase: int = 0
    name: str = ""

    def __post_init__(self):
        if self.kind not in {"Z", "H", "X", "Y", "monomial", "generic"}:
            raise ValueError(f"unknown label kind {self.kind!r}")
        if self.kind == "monomial":
            if any(e < 0 for e in self.exponents):
                raise ValueError("monomial exponents must be nonnegative")
            if self.phase not in (0, 1):
                raise ValueError("phase must be 0 (real) or 1 (imaginary)")

    @classmethod
    def z(cls) -> "BasisLabel":
        return cls("Z")

    @classmethod
    def cartan(cls, root) -> "BasisLabel":
        return cls("H", root=_as_root(root))

    @classmethod
    def root_x(cls, root) -> "BasisLabel":
        return cls("X", root=_as_root(root))

    @classmethod
    def root_y(cls, root) -> "BasisLabel":
        return cls("Y", root=_as_root(root))

    @classmethod
    def monomial(cls, exponents: Sequence[int], phase: int = 0) -> "BasisLabel":
        return cls("monomial", exponents=tuple(int(e) for e in exponents), phase=phase)

    @classmethod
    def generic(cls, name: str) -> "BasisLabel":
        return cls("generic", name=name)

    @property
    def text(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind in ("H", "X", "Y"):
            return f"{self.kind}[{root_text(self.root)}]"
        if self.kind == "monomial":
            return "p[" + ",".join(map(str, self.exponents)) + "]" + ("i" if self.phase else "")
        return self.name

    def __str__(self) -> str:
        return self.text


def _as_root(root) -> Root:
    if not root:
        return ()
    first = root[0]
    if isinstance(first, tuple):
        return tuple(root)
    return dense_to_root(root)


_ROOT_LABEL = re.compile(r"^([HXY])\[(.+)\]$")
_MONO_LABEL = re.compile(r"^p\[([0-9,]*)\](i?)$")


def parse_label(text: str) -> BasisLabel:
    """Inverse of :attr:`BasisLabel.text`."""
    if text == "Z":
        return BasisLabel.z()
    m = _ROOT_LABEL.match(text)
    if m:
        try:
            return BasisLabel(m.group(1), root=_parse_root(m.group(2)))
        except ValueError:
            return BasisLabel.generic(text)
    m = _MONO_LABEL.match(text)
    if m:
        exps = tuple(int(e) for e in m.group(1).split(",")) if m.group(1) else ()
        return BasisLabel.monomial(exps, 1 if m.group(2) else 0)
    return BasisLabel.generic(text)


# ---------------------------------------------------------------------------
# structure tensor
# ---------------------------------------------------------------------------

class StructureTensor:
    """Sparse antisymmetric tensor ``c[i,j,k]`` with ``[e_i, e_j] = sum_k c[i,j,k] e_k``.

    Only ``i < j`` is stored, so antisymmetry cannot be violated. Input keys with
    ``i > j`` are folded in with a sign flip; repeated keys are summed.
    """

    __slots__ = ("dim", "_entries", "_rows")

    def __init__(self, dim: int, entries: Mapping[tuple[int, int, int], Any] | Iterable = ()):
        if dim <= 0:
            raise ValueError("dimension must be positive")
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[tuple[int, int, int], Fraction] = {}
        for (i, j, k), v in items:
            v = Q(v)
            for idx in (i, j, k):
                if not 0 <= idx < dim:
                    raise IndexError(f"index {idx} out of range for dimension {dim}")
            if i == j:
                if v != 0:
                    raise ValueError(f"[e{i}, e{i}] must vanish")
                continue
            if i > j:
                i, j, v = j, i, -v
            acc[(i, j, k)] = acc.get((i, j, k), Fraction(0)) + v
        self.dim = dim
        self._entries = MappingProxyType({key: v for key, v in sorted(acc.items()) if v != 0})
        self._rows: dict[int, dict[int, dict[int, Fraction]]] | None = None

    @property
    def entries(self) -> Mapping[tuple[int, int, int], Fraction]:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StructureTensor)
            and self.dim == other.dim
            and dict(self._entries) == dict(other._entries)
        )

    def __hash__(self) -> int:
        return hash((self.dim, tuple(self._entries.items())))

    def __repr__(self) -> str:
        return f"StructureTensor(dim={self.dim}, nnz={len(self._entries)})"

    def rows(self) -> dict[int, dict[int, dict[int, Fraction]]]:
        """Full antisymmetric table ``rows[i][j] = {k: c}`` (both orders present)."""
        if self._rows is None:
            rows: dict[int, dict[int, dict[int, Fraction]]] = {}
            for (i, j, k), v in self._entries.items():
                rows.setdefault(i, {}).setdefault(j, {})[k] = v
                rows.setdefault(j, {}).setdefault(i, {})[k] = -v
            self._rows = rows
        return self._rows

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        return self.rows().get(i, {}).get(j, {})

    def dense(self, dtype=float) -> np.ndarray:
        """Dense ``c[i, j, k]`` array, antisymmetric in ``i, j``."""
        if dtype is object:
            c = qzeros((self.dim,) * 3)
        else:
            c = np.zeros((self.dim,) * 3, dtype=dtype)
        for (i, j, k), v in self._entries.items():
            val = v if dtype is object else float(v)
            c[i, j, k] = val
            c[j, i, k] = -val
        return c


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Labelled basis plus bracket. ``root_meta`` optionally holds a RootDatum."""

    labels: tuple[BasisLabel, ...]
    bracket: StructureTensor
    root_meta: Any = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != self.bracket.dim:
            raise ValueError(
                f"{len(self.labels)} labels for a {self.bracket.dim}-dimensional bracket"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be pairwise distinct")

    @classmethod
    def from_brackets(cls, labels, brackets, root_meta=None, check: bool = True) -> "LieAlgebra":
        labels = tuple(parse_label(l) if isinstance(l, str) else l for l in labels)
        alg = cls(labels, StructureTensor(len(labels), brackets), root_meta)
        if check:
            rep = check_jacobi(alg)
            if not rep.ok:
                raise ValueError(f"Jacobi identity fails on triple {rep.worst_triple}")
        return alg

    @property
    def dim(self) -> int:
        return self.bracket.dim

    def index(self, label) -> int:
        if isinstance(label, str):
            label = parse_label(label)
        return self.labels.index(label)

    def indices(self, kind: str) -> list[int]:
        return [i for i, l in enumerate(self.labels) if l.kind == kind]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LieAlgebra)
            and self.labels == other.labels
            and self.bracket == other.bracket
        )

    def __hash__(self) -> int:
        return hash((self.labels, self.bracket))

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, nnz={len(self.bracket)})"


def _tensor(obj) -> StructureTensor:
    return obj.bracket if isinstance(obj, LieAlgebra) else obj


def _vec(x, n: int) -> list[Fraction]:
    if len(x) != n:
        raise ValueError(f"vector of length {len(x)} for a {n}-dimensional algebra")
    return [Q(v) for v in x]


def bracket_eval(L: LieAlgebra, x, y) -> np.ndarray:
    """``[x, y]`` for coordinate vectors ``x``, ``y``."""
    n = L.dim
    x, y = _vec(x, n), _vec(y, n)
    out = qzeros(n)
    for (i, j, k), c in L.bracket.entries.items():
        coeff = x[i] * y[j] - x[j] * y[i]
        if coeff:
            out[k] += coeff * c
    return out


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    worst_triple: tuple[int, int, int] | None
    residual: Fraction
    violations: int = 0


def check_jacobi(L) -> JacobiReport:
    """Exact Jacobi check over all triples, exploiting sparsity.

    The Jacobiator ``J(a,b,c) = [a,[b,c]] + [b,[c,a]] + [c,[a,b]]`` is alternating,
    so every term ``[e_i,[e_j,e_k]]`` is accumulated into the sorted triple with the
    sign of the sorting permutation.
    """
    t = _tensor(L)
    rows = t.rows()
    acc: dict[tuple[int, int, int], dict[int, Fraction]] = {}
    for (j, k, m), c in t.entries.items():
        for i, row in rows.get(m, {}).items():
            # [e_i, e_m] = -[e_m, e_i]
            if i == j or i == k:
                continue
            trip = (i, j, k)
            srt = tuple(sorted(trip))
            sign = _perm_sign(trip, srt)
            bucket = acc.setdefault(srt, {})
            for n, d in row.items():
                bucket[n] = bucket.get(n, Fraction(0)) - sign * c * d
    worst, worst_val, bad = None, Fraction(0), 0
    for trip, vec in acc.items():
        val = max((abs(v) for v in vec.values()), default=Fraction(0))
        if val:
            bad += 1
            if val > worst_val or (val == worst_val and (worst is None or trip < worst)):
                worst, worst_val = trip, val
    return JacobiReport(bad == 0, worst, worst_val, bad)


def _perm_sign(perm, target) -> int:
    pos = [target.index(p) for p in perm]
    sign = 1
    for a in range(3):
        for b in range(a + 1, 3):
            if pos[a] > pos[b]:
                sign = -sign
    return sign


def ad_matrix(L: LieAlgebra, x) -> np.ndarray:
    """Matrix of ``ad x``: column ``j`` holds ``[x, e_j]``."""
    n = L.dim
    x = _vec(x, n)
    out = qzeros((n, n))
    for (i, j, k), c in L.bracket.entries.items():
        if x[i]:
            out[k, j] += x[i] * c
        if x[j]:
            out[k, i] -= x[j] * c
    return out


def _ad_sparse(L: LieAlgebra) -> list[dict[tuple[int, int], Fraction]]:
    """``ad e_p`` as sparse maps ``(row k, col a) -> c_{pa}^k``."""
    out: list[dict[tuple[int, int], Fraction]] = [dict() for _ in range(L.dim)]
    for p, row in L.bracket.rows().items():
        for a, vec in row.items():
            for k, c in vec.items():
                out[p][(k, a)] = c
    return out


def trace_ad(L: LieAlgebra) -> list[Fraction]:
    """``(tr ad e_p)_p``."""
    out = [Fraction(0)] * L.dim
    for (i, j, k), c in L.bracket.entries.items():
        # [e_i, e_j] has e_j-component c when k == j: contributes to tr ad e_i
        if k == j:
            out[i] += c
        if k == i:
            out[j] -= c
    return out


def killing_form(L: LieAlgebra) -> np.ndarray:
    """Exact ``K[p, q] = tr(ad e_p ad e_q)``."""
    ads = _ad_sparse(L)
    n = L.dim
    by_col: list[dict[int, dict[int, Fraction]]] = []
    for ad in ads:
        d: dict[int, dict[int, Fraction]] = {}
        for (k, a), c in ad.items():
            d.setdefault(k, {})[a] = c
        by_col.append(d)
    K = qzeros((n, n))
    for p in range(n):
        for q in range(p, n):
            s = Fraction(0)
            # tr(ad_p ad_q) = sum_{k,a} ad_p[k,a] ad_q[a,k]
            rows_q = by_col[q]
            for (k, a), c in ads[p].items():
                d = rows_q.get(a, {}).get(k)
                if d:
                    s += c * d
            K[p, q] = K[q, p] = s
    return K


def killing_operator(L: LieAlgebra, G) -> np.ndarray:
    """``G^{-1} K`` (self-adjoint for the inner product ``G``)."""
    K = killing_form(L)
    if is_rational_array(G):
        ldl(G)  # raises if not SPD
        return inverse(G).dot(K)
    G = np.asarray(G, dtype=float)
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise ValueError("gram matrix is not positive definite") from exc
    if not np.allclose(G, G.T, atol=1e-12):
        raise ValueError("gram matrix is not symmetric")
    return np.linalg.solve(G, to_float(K))


def gl_action(g, L: LieAlgebra) -> LieAlgebra:
    """Push the bracket forward: ``(g.mu)(x, y) = g mu(g^-1 x, g^-1 y)``."""
    g = qarray(g)
    n = L.dim
    if g.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix")
    off = any(g[i, j] != 0 for i in range(n) for j in range(n) if i != j)
    if not off:
        diag = [g[i, i] for i in range(n)]
        if any(v == 0 for v in diag):
            raise np.linalg.LinAlgError("singular matrix")
        new = {(i, j, k): diag[k] * c / (diag[i] * diag[j]) for (i, j, k), c in L.bracket.entries.items()}
        return LieAlgebra(L.labels, StructureTensor(n, new), L.root_meta)
    gi = inverse(g)
    cols = [[gi[i, a] for i in range(n)] for a in range(n)]
    support = [[i for i in range(n) if cols[a][i]] for a in range(n)]
    rows = L.bracket.rows()
    new: dict[tuple[int, int, int], Fraction] = {}
    for a in range(n):
        for b in range(a + 1, n):
            mu = [Fraction(0)] * n
            for i in support[a]:
                row = rows.get(i)
                if not row:
                    continue
                for j in support[b]:
                    vec = row.get(j)
                    if not vec:
                        continue
                    w = cols[a][i] * cols[b][j]
                    for k, c in vec.items():
                        mu[k] += w * c
            if not any(mu):
                continue
            for k in range(n):
                s = sum((g[k, m] * mu[m] for m in range(n) if mu[m]), Fraction(0))
                if s:
                    new[(a, b, k)] = s
    return LieAlgebra(L.labels, StructureTensor(n, new), L.root_meta)


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

def bracket_span(L: LieAlgebra, A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list[Fraction]]:
    """RREF basis of ``[A, B]`` for subspaces given by spanning vectors."""
    vecs = []
    for u in A:
        for v in B:
            w = list(bracket_eval(L, u, v))
            if any(w):
                vecs.append(w)
    return row_space(vecs)


def _full(L: LieAlgebra) -> list[list[Fraction]]:
    n = L.dim
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def lower_central_series(L: LieAlgebra) -> list[list[list[Fraction]]]:
    """``[L, L^k]`` until it stabilises; the last entry is the stable term."""
    series = [_full(L)]
    full = series[0]
    while True:
        nxt = bracket_span(L, full, series[-1])
        if len(nxt) == len(series[-1]):
            return series
        series.append(nxt)
        if not nxt:
            return series


def derived_series(L: LieAlgebra) -> list[list[list[Fraction]]]:
    series = [_full(L)]
    while True:
        cur = series[-1]
        nxt = bracket_span(L, cur, cur)
        if len(nxt) == len(cur):
            return series
        series.append(nxt)
        if not nxt:
            return series


def is_nilpotent(L: LieAlgebra) -> bool:
    return not lower_central_series(L)[-1]


def is_solvable(L: LieAlgebra) -> bool:
    return not derived_series(L)[-1]


def center(L: LieAlgebra) -> list[list[Fraction]]:
    """Basis of ``{x : [x, L] = 0}``."""
    n = L.dim
    eqs: dict[tuple[int, int], list[Fraction]] = {}
    for (i, j, k), c in L.bracket.entries.items():
        # x_i c_{ij}^k for bracket with e_j, and -x_j c_{ij}^k for bracket with e_i
        eqs.setdefault((j, k), [Fraction(0)] * n)[i] += c
        eqs.setdefault((i, k), [Fraction(0)] * n)[j] -= c
    return row_space(nullspace(list(eqs.values()), ncols=n)) if eqs else _full(L)


def coordinate_subspace(n: int, indices: Iterable[int]) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in indices]


def _contains(span_rows: list[list[Fraction]], vecs: list[list[Fraction]]) -> bool:
    base = row_space(span_rows)
    return len(row_space(base + vecs)) == len(base)


def is_abelian(L: LieAlgebra, indices: Iterable[int] | None = None) -> bool:
    if indices is None:
        return len(L.bracket) == 0
    idx = set(indices)
    return not any(
        i in idx and j in idx and L.bracket.bracket_basis(i, j)
        for i in idx for j in idx if i < j
    )


def is_subalgebra(L: LieAlgebra, indices: Iterable[int]) -> bool:
    idx = set(indices)
    for (i, j, k), _ in L.bracket.entries.items():
        if i in idx and j in idx and k not in idx:
            return False
    return True


def is_ideal(L: LieAlgebra, indices: Iterable[int]) -> bool:
    idx = set(indices)
    for (i, j, k), _ in L.bracket.entries.items():
        if (i in idx or j in idx) and k not in idx:
            return False
    return True


def restrict(L: LieAlgebra, indices: Sequence[int]) -> LieAlgebra:
    """The coordinate subalgebra spanned by ``indices`` (must be closed)."""
    indices = list(indices)
    if not is_subalgebra(L, indices):
        raise ValueError("indices do not span a subalgebra")
    pos = {old: new for new, old in enumerate(indices)}
    new = {
        (pos[i], pos[j], pos[k]): c
        for (i, j, k), c in L.bracket.entries.items()
        if i in pos and j in pos
    }
    return LieAlgebra(tuple(L.labels[i] for i in indices), StructureTensor(len(indices), new))
