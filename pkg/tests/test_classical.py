from fractions import Fraction
from math import comb

import numpy as np
import pytest

from oracles import brute_jacobi_residual
from ricciforge.classical import build_compact, build_noncompact_sl
from ricciforge.lie_core import check_jacobi, killing_form
from ricciforge.rational import to_float

GRID = [("su", m) for m in (2, 3, 4)] + [("so", m) for m in (3, 4, 5)] + [("sp", m) for m in (1, 2, 3)]
DIMS = {"su": lambda m: m * m - 1, "so": lambda m: comb(m, 2), "sp": lambda m: m * (2 * m + 1)}


@pytest.mark.parametrize("family,m", GRID)
def test_compact_forms(family, m):
    L, real, datum = build_compact(family, m)
    assert L.dim == DIMS[family](m)
    assert check_jacobi(L).ok
    assert brute_jacobi_residual(L.bracket.dense()) < 1e-12
    # compact: Killing form negative definite
    assert np.linalg.eigvalsh(to_float(killing_form(L))).max() < 0
    assert len(L.indices("H")) == datum.rank
    assert len(L.indices("X")) == len(datum.positive_roots)


def test_su2_brackets():
    L = build_compact("su", 2)[0]
    assert dict(L.bracket.entries) == {(0, 1, 2): 2, (0, 2, 1): -2, (1, 2, 0): 2}
    assert killing_form(L).tolist() == np.diag([-8, -8, -8]).tolist()


def test_sl2_brackets():
    L, real = build_noncompact_sl(2)
    assert [l.text for l in L.labels] == ["H[e1-e2]", "X[e1-e2]", "Y[e1-e2]"]
    # [H, X] = 2Y, [H, Y] = 2X, [X, Y] = 2H
    assert dict(L.bracket.entries) == {(0, 1, 2): 2, (0, 2, 1): 2, (1, 2, 0): 2}
    assert killing_form(L).tolist() == np.diag([8, -8, 8]).tolist()


@pytest.mark.parametrize("m", [2, 3, 4])
def test_sl_and_gl(m):
    L = build_noncompact_sl(m)[0]
    assert L.dim == m * m - 1 and check_jacobi(L).ok
    G = build_noncompact_sl(m, with_center=True)[0]
    assert G.dim == m * m and G.labels[0].text == "Z"
    assert not any(i == 0 or j == 0 for i, j, _ in G.bracket.entries)


def test_rejects_small_rank():
    with pytest.raises(ValueError):
        build_compact("so", 2)
    with pytest.raises(ValueError):
        build_compact("xx", 3)


def test_realization_expands_back():
    L, real, _ = build_compact("sp", 2)
    for i, l in enumerate(L.labels):
        coords = real.expand(real[l])
        assert coords == [Fraction(int(i == j)) for j in range(L.dim)]
