import pytest

from subtensor_rank.equations import (
    bound_formula,
    decompose_via_chain,
    extract_hchain,
    find_k,
    multilinearize,
    orbit_vanishes,
)
from subtensor_rank.errors import BudgetExceeded, HypothesisViolated
from subtensor_rank.exact_algebra import RATIONALS, gf
from subtensor_rank.polynomials import Poly, determinant, permanent
from subtensor_rank.rank_engine import random_decomposition
from subtensor_rank.tensor_core import Tensor


def test_determinant_chain():
    chain = extract_hchain(determinant(2))
    assert chain.m == 2 and chain.order == 2
    assert chain.h[1] == Poly.variable(RATIONALS, "tensor", (2, 2), (0, 0))
    assert chain.r[0] == Poly.build(RATIONALS, "tensor", (2, 2), [(((0, 1), (1, 0)), -1)])
    assert chain.h[2] == Poly.constant(RATIONALS, "tensor", (2, 2), 1)
    assert chain.r[1].is_zero()
    assert chain.verify()
    assert chain.cumulative == ((0, 1), (0, 1))


@pytest.mark.parametrize("m", [2, 3])
def test_chains_verify(m):
    for f in (determinant(m), permanent(m)):
        chain = extract_hchain(f)
        assert chain.verify()
        assert len(chain.h) == m + 1 and len(chain.r) == m


def test_chain_permutes_when_the_diagonal_is_missing():
    f = Poly.build(RATIONALS, "tensor", (2, 2), [(((0, 1), (1, 0)), 1)])
    chain = extract_hchain(f)
    assert chain.verify()
    assert chain.cumulative != ((0, 1), (0, 1))


def test_chain_rejects_non_multilinear_input():
    with pytest.raises(ValueError):
        extract_hchain(Poly.build(RATIONALS, "tensor", (1, 1), {((0, 0), (0, 0)): 1}))


def test_chain_of_multilinearized_square():
    chain = extract_hchain(multilinearize(Poly.build(RATIONALS, "tensor", (1, 1), {((0, 0), (0, 0)): 1})))
    assert chain.verify()
    assert chain.to_json()["m"] == 2


def test_orbit_vanishing(gf5):
    det = determinant(2, gf5)
    rank_one = Tensor.from_nested(gf5, [[1, 2, 3], [2, 4, 1], [0, 0, 0]])
    result = orbit_vanishes(det, rank_one)
    assert result.vanishes and result.checked == 36
    full = orbit_vanishes(det, Tensor.from_nested(gf5, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert not full.vanishes and full.witness is not None
    sampled = orbit_vanishes(det, rank_one, sample=10, seed=3)
    assert sampled.vanishes and sampled.heuristic
    with pytest.raises(BudgetExceeded):
        orbit_vanishes(det, rank_one, orbit_budget=5)
    with pytest.raises(ValueError):
        orbit_vanishes(determinant(3, gf5), Tensor.zeros(gf5, (2, 2)))


def test_find_k(gf5):
    chain = extract_hchain(determinant(2, gf5))
    T = Tensor.from_nested(gf5, [[0, 0], [0, 3]])
    found = find_k(T, chain)
    assert found.k == 0
    with pytest.raises(HypothesisViolated):
        find_k(Tensor.from_nested(gf5, [[1, 0], [0, 1]]), chain)


@pytest.mark.parametrize("seed", range(50))
def test_decompose_rank_one_matrices(seed):
    field = gf(5)
    chain = extract_hchain(determinant(2, field))
    T, _ = random_decomposition((3, 3), field, 1, seed)
    result = decompose_via_chain(T, chain)
    assert result.decomposition.evaluate() == T
    assert len(result.decomposition) <= bound_formula(2, 2, result.k) == 4
    assert result.to_json()["length"] == len(result.decomposition)


def test_decompose_converts_rational_chain(gf5):
    T = Tensor.from_nested(gf5, [[0, 0, 0], [0, 2, 4], [0, 1, 2]])
    result = decompose_via_chain(T, extract_hchain(determinant(2)))
    assert result.decomposition.evaluate() == T


def test_decompose_zero_tensor(gf5):
    result = decompose_via_chain(Tensor.zeros(gf5, (3, 3)), extract_hchain(determinant(2, gf5)))
    assert len(result.decomposition) == 0


def test_decompose_rejects_full_rank(gf5):
    with pytest.raises(HypothesisViolated):
        decompose_via_chain(Tensor.from_nested(gf5, [[1, 0], [0, 1]]), extract_hchain(determinant(2, gf5)))
