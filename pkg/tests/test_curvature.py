from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fixtures import abelian, h3, h5, random_basis_change, random_solvable, random_triple, su2_h5, two_dim
from oracles import koszul_ricci_operator, koszul_ricci_orthonormal
from ricciforge.classical import build_compact, build_noncompact_sl
from ricciforge.curvature import (
    MetricLieAlgebra,
    StructureError,
    definiteness,
    is_nice_basis,
    mean_curvature,
    moment_map,
    ricci,
    ricci_solvable,
    ricci_triple,
)
from ricciforge.lie_core import gl_action
from ricciforge.rational import qarray, to_float


def test_h3_moment_map():
    r = ricci(MetricLieAlgebra.orthonormal(h3()))
    half = Fraction(1, 2)
    assert r.exact
    assert r.ricci.tolist() == np.diag([-half, -half, half]).tolist()
    assert moment_map(MetricLieAlgebra.orthonormal(h3())).tolist() == r.ricci.tolist()
    assert r.verdict == "indefinite"


def test_two_dim_is_negative():
    r = ricci(MetricLieAlgebra.orthonormal(two_dim()))
    assert r.ricci.tolist() == [[-1, 0], [0, -1]]
    assert r.verdict == "negative_definite"
    assert list(mean_curvature(MetricLieAlgebra.orthonormal(two_dim()))) == [1, 0]


def test_compact_semisimple_bi_invariant():
    # Killing metric on su(2): Ric = -1/4 B, i.e. 1/4 Id for the metric -B
    L = build_compact("su", 2)[0]
    r = ricci(MetricLieAlgebra(L, qarray(np.diag([8, 8, 8]))))
    assert r.ricci.tolist() == np.diag([Fraction(1, 4)] * 3).tolist()
    assert r.verdict == "positive_definite"


def test_abelian_is_flat():
    assert ricci(MetricLieAlgebra.orthonormal(abelian(3))).verdict == "zero"


@pytest.mark.parametrize(
    "L",
    [h3(), h5(), two_dim(), build_noncompact_sl(2)[0], build_compact("su", 3)[0], su2_h5()],
    ids=["h3", "h5", "two_dim", "sl2", "su3", "su2_h5"],
)
def test_matches_koszul_oracle(L):
    rng = np.random.default_rng(L.dim)
    c = L.bracket.dense()
    A = rng.normal(size=(L.dim, L.dim))
    G = A @ A.T + L.dim * np.eye(L.dim)
    got = ricci(MetricLieAlgebra(L, G)).ricci
    assert np.allclose(got, koszul_ricci_operator(c, G), atol=1e-9)
    exact = ricci(MetricLieAlgebra.orthonormal(L)).ricci
    assert np.allclose(to_float(exact), koszul_ricci_orthonormal(c), atol=1e-12)


def test_exact_and_float_paths_agree():
    L = su2_h5()
    G = qarray(np.diag([1, 2, 3, 4, 1, 1, 1, 1, 2]))
    G[4, 5] = G[5, 4] = Fraction(1, 3)
    ex = ricci(MetricLieAlgebra(L, G))
    fl = ricci(MetricLieAlgebra(L, to_float(G)))
    assert ex.exact and not fl.exact
    assert np.allclose(to_float(ex.ricci), fl.ricci, atol=1e-12)
    assert np.allclose(ex.eigenvalues, fl.eigenvalues, atol=1e-12)


def test_gram_validation():
    with pytest.raises(ValueError):
        MetricLieAlgebra(h3(), qarray([[1, 0, 0], [0, -1, 0], [0, 0, 1]]))
    with pytest.raises(ValueError):
        MetricLieAlgebra(h3(), np.eye(2))


def test_definiteness_verdicts():
    assert definiteness(np.diag([-1.0, -2.0])).verdict == "negative_definite"
    assert definiteness(np.diag([-1.0, 0.0])).verdict == "negative_semidefinite"
    assert definiteness(np.diag([-1.0, 1.0])).verdict == "indefinite"
    d = definiteness(np.diag([1.0, 3.0]), gram=np.diag([1.0, 3.0]))
    assert d.verdict == "positive_definite"


@pytest.mark.parametrize("seed", range(8))
def test_block_formulas_match_general(seed):
    L, G, split = random_solvable(seed)
    assert np.allclose(ricci_solvable(MetricLieAlgebra(L, G), split), ricci(MetricLieAlgebra(L, G)).ricci, atol=1e-10)
    L, G, split = random_triple(seed)
    assert np.allclose(ricci_triple(MetricLieAlgebra(L, G), split), ricci(MetricLieAlgebra(L, G)).ricci, atol=1e-10)


def test_block_formula_preconditions():
    L, G, split = random_triple(0)
    G = G.copy()
    G[0, 5] = G[5, 0] = 0.1
    with pytest.raises(StructureError, match="orthogonal"):
        ricci_triple(MetricLieAlgebra(L, G), split)
    L, G, split = random_triple(1)
    with pytest.raises(StructureError):
        ricci_triple(MetricLieAlgebra(L, G), ([1], [0, 2, 3], split[2]))


def test_nice_bases():
    rep = is_nice_basis(h3())
    assert rep.nice and rep.moment_map_diagonal
    su3 = is_nice_basis(build_compact("su", 3)[0])
    assert not su3.nice and su3.witness is not None


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_isometry_invariance(seed):
    # (L, G) and (g.L, g^-T G g^-1) are isometric, so the Ricci spectra coincide
    rng = np.random.default_rng(seed)
    L, G, _ = random_triple(seed % 6)
    g = random_basis_change(rng, L.dim)
    gf = to_float(g)
    gi = np.linalg.inv(gf)
    a = ricci(MetricLieAlgebra(L, G)).eigenvalues
    b = ricci(MetricLieAlgebra(gl_action(g, L), gi.T @ G @ gi)).eigenvalues
    assert np.allclose(a, b, atol=1e-9 * max(1.0, np.abs(a).max()))
