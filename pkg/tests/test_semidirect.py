import numpy as np
import pytest

from fixtures import _extend_to_two_step, _free_two_step, h3, random_solvable, su2_h5
from ricciforge.classical import build_compact
from ricciforge.lie_core import check_jacobi, is_ideal, is_nilpotent, restrict
from ricciforge.poly_reps import build_poly_rep
from ricciforge.semidirect import (
    SemidirectError,
    SemidirectSpec,
    abelian,
    block_positions,
    central_semidirect,
    check_derivation,
    general_semidirect,
)


def test_central_semidirect_layout():
    u = build_compact("su", 2)[0]
    rep, _ = build_poly_rep("su", 2, 2)
    L = central_semidirect(u, rep)
    assert L.dim == 1 + 3 + 6
    assert L.labels[0].text == "Z"
    assert check_jacobi(L).ok
    # Z acts as the identity on V and commutes with u
    assert all(L.bracket.bracket_basis(0, v) == {v: 1} for v in range(4, 10))
    assert all(not L.bracket.bracket_basis(0, x) for x in (1, 2, 3))
    assert block_positions(L, 4) == {"a": [0], "r": [1, 2, 3], "n": list(range(4, 10))}
    assert is_ideal(L, range(4, 10))


def test_central_semidirect_rejects_foreign_rep():
    rep, _ = build_poly_rep("su", 2, 2)
    with pytest.raises(SemidirectError):
        central_semidirect(build_compact("so", 3)[0], rep)


def test_derivation_check():
    L = h3()
    assert check_derivation(np.diag([1, 1, 2]), L) is None
    assert check_derivation(np.diag([1, 1, 1]), L) == (0, 1)


def test_free_two_step_extension_is_derivation():
    rng = np.random.default_rng(3)
    L = _free_two_step(3)
    for _ in range(5):
        A = rng.integers(-2, 3, size=(3, 3))
        assert check_derivation(_extend_to_two_step(A, 3), L) is None


def test_general_semidirect_validates_actions():
    left = abelian(["a"])
    with pytest.raises(SemidirectError, match="derivation"):
        general_semidirect(SemidirectSpec(left, h3(), (np.eye(3, dtype=int),), a_indices=(0,)))
    with pytest.raises(SemidirectError):
        SemidirectSpec(left, h3(), (np.eye(2, dtype=int),))


def test_non_homomorphism_rejected():
    su2 = build_compact("su", 2)[0]
    ops = [np.diag([1, 1, 1])] * 3
    with pytest.raises(SemidirectError, match="homomorphism"):
        general_semidirect(SemidirectSpec(su2, abelian(["x", "y", "z"]), tuple(ops), a_indices=()))


def test_su2_h5_is_lie_algebra():
    L = su2_h5()
    assert L.dim == 9 and check_jacobi(L).ok
    assert is_nilpotent(restrict(L, range(4, 9)))


@pytest.mark.parametrize("seed", range(6))
def test_random_solvable_fixture(seed):
    L, G, (a, n) = random_solvable(seed)
    assert check_jacobi(L).ok
    assert is_nilpotent(restrict(L, n))
