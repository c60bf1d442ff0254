from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ricciforge.rational import (
    Q,
    inverse,
    is_positive_definite,
    ldl,
    nullspace,
    qarray,
    qeye,
    rank,
    row_space,
    solve,
    to_float,
)

small = st.integers(-5, 5)


def test_q_rejects_floats():
    assert Q(3) == Fraction(3)
    assert Q("2/6") == Fraction(1, 3)
    with pytest.raises(TypeError):
        Q(0.5)


def test_inverse_and_solve_exact():
    a = qarray([[2, 1], [1, 1]])
    ai = inverse(a)
    assert (a.dot(ai) == qeye(2)).all()
    x = solve(a, [3, 2])
    assert list(x) == [1, 1]
    with pytest.raises(np.linalg.LinAlgError):
        inverse([[1, 2], [2, 4]])


def test_row_space_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert rank(rows) == 2
    assert row_space(rows) == [[1, 0, 1], [0, 1, 1]]
    ns = nullspace(rows)
    assert ns == [[-1, -1, 1]]


def test_ldl_detects_indefinite():
    L, d = ldl([[4, 2], [2, 5]])
    assert d == [4, 4]
    assert L[1, 0] == Fraction(1, 2)
    assert not is_positive_definite([[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        ldl([[1, 2], [3, 4]])


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=9, max_size=9))
def test_inverse_matches_float(vals):
    a = qarray(np.array(vals).reshape(3, 3))
    if np.linalg.matrix_rank(to_float(a)) < 3:
        return
    assert np.allclose(to_float(inverse(a)), np.linalg.inv(to_float(a)))


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=12, max_size=12))
def test_nullspace_is_annihilated(vals):
    rows = np.array(vals).reshape(3, 4).tolist()
    ns = nullspace(rows)
    assert len(ns) + rank(rows) == 4
    for v in ns:
        assert all(sum(Fraction(r[i]) * v[i] for i in range(4)) == 0 for r in rows)
