import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subtensor_rank.errors import BudgetExceeded, ParseError, SingularBlock
from subtensor_rank.exact_algebra import RATIONALS, gf, matrix_rank
from subtensor_rank.rank_engine import (
    LowerBound,
    PartitionDecomposition,
    PartitionTerm,
    max_full_rank_submatrix,
    prank,
    prank_at_most,
    random_decomposition,
    reconstruct_outside,
    slice_rank,
    slice_rank_at_most,
    three_r_decomposition,
)
from subtensor_rank.tensor_core import (
    AxisSplit,
    IndexSubsets,
    Tensor,
    all_splits,
    diagonal_tensor,
    outer,
    random_tensor,
    subtensor,
)


def _nonzero_tensors(field, dims):
    size = int(np.prod(dims))
    for values in itertools.product(range(field.char), repeat=size):
        if any(values):
            yield Tensor(field, np.array(values, dtype=np.int64).reshape(dims))


def _all_tensors_222():
    F = gf(2)
    for values in itertools.product(range(2), repeat=8):
        yield Tensor(F, np.array(values, dtype=np.int64).reshape(2, 2, 2))


@pytest.fixture(scope="module")
def rank_one_222():
    """Every product A ⊗ B over GF(2) on 2x2x2, built straight from the definition."""
    F = gf(2)
    products = set()
    for split in all_splits(3):
        a_dims = tuple(2 for _ in split.axes)
        b_dims = tuple(2 for _ in split.complement)
        for A in _nonzero_tensors(F, a_dims):
            for B in _nonzero_tensors(F, b_dims):
                products.add(outer(A, B, split).data.tobytes())
    return products


def _expected_rank_222(T, rank_one):
    if T.is_zero():
        return 0
    return 1 if T.data.tobytes() in rank_one else 2


def test_every_2x2x2_tensor_over_gf2(rank_one_222):
    for T in _all_tensors_222():
        cert = prank(T)
        assert cert.value == _expected_rank_222(T, rank_one_222)
        assert cert.lower_bound == LowerBound.EXHAUSTIVE
        assert cert.verify(T)


def test_strategies_agree_on_2x2x2(rank_one_222):
    for T in _all_tensors_222():
        assert prank(T, strategy="terms").value == prank(T, strategy="subspace").value


def test_diagonal_has_full_partition_and_slice_rank(gf2):
    D = diagonal_tensor(3, 3, gf2)
    p = prank(D)
    s = slice_rank(D)
    assert p.value == 3 and s.value == 3
    assert s.witness.is_slice()
    assert p.verify(D) and s.verify(D)
    assert prank_at_most(D, 2).holds is False
    assert slice_rank_at_most(D, 3).holds is True


def test_order_four_product_of_matrices(gf2):
    split = AxisSplit(4, (0, 1))
    A = Tensor.from_nested(gf2, [[1, 0], [1, 1]])
    B = Tensor.from_nested(gf2, [[0, 1], [1, 0]])
    T = outer(A, B, split)
    cert = prank(T)
    assert cert.value == 1
    assert cert.witness.terms[0].split == split
    assert slice_rank(T).value == 2


@pytest.mark.parametrize("field", [gf(5), RATIONALS])
def test_matrices_use_matrix_rank(field):
    T = Tensor.from_nested(field, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    cert = prank(T)
    assert cert.value == 2
    assert cert.lower_bound == LowerBound.MATRIX_RANK
    assert cert.verify(T)
    assert prank_at_most(T, 1).holds is False
    assert prank_at_most(T, 2).holds is True


def test_rationals_give_upper_bounds_only(qq):
    D = diagonal_tensor(3, 2, qq)
    cert = prank(D)
    assert cert.lower_bound == LowerBound.NONE
    assert cert.value == 2 and cert.verify(D)
    assert prank_at_most(D, 1).holds is None
    assert prank_at_most(D, 2).holds is True
    assert prank_at_most(Tensor.zeros(qq, (2, 2, 2)), 0).holds is True


def test_zero_tensor(gf5):
    Z = Tensor.zeros(gf5, (2, 3, 2))
    cert = prank(Z)
    assert cert.value == 0 and len(cert.witness) == 0
    assert prank_at_most(Z, 0).holds is True


def test_budget_exceeded(gf2):
    with pytest.raises(BudgetExceeded) as info:
        prank(diagonal_tensor(3, 3, gf2), node_budget=1)
    assert info.value.exit_code == 3


def test_unknown_strategy(gf2):
    with pytest.raises(ParseError):
        prank_at_most(diagonal_tensor(3, 2, gf2), 1, strategy="guess")


@pytest.mark.parametrize("seed", range(4))
def test_random_decomposition_bounds_rank(seed):
    T, dec = random_decomposition((3, 3, 3), gf(2), 2, seed)
    assert dec.evaluate() == T
    decision = prank_at_most(T, 2)
    assert decision.holds is True
    assert decision.witness.evaluate() == T
    assert len(decision.witness) <= 2


@pytest.mark.parametrize("seed", range(3))
def test_restriction_never_raises_rank(seed):
    T, dec = random_decomposition((3, 3, 3), gf(2), 2, seed)
    S = IndexSubsets(((0, 1), (0, 2), (1, 2)))
    sub = subtensor(T, S)
    assert dec.restrict(S).evaluate() == sub
    assert prank(sub).value <= prank(T).value


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_slice_rank_equals_prank_in_order_three(seed):
    T = random_tensor((3, 3, 3), gf(2), seed)
    assert slice_rank(T).value == prank(T).value


def test_decomposition_json_round_trip(gf5):
    T, dec = random_decomposition((2, 2, 3), gf5, 2, seed=5)
    again = PartitionDecomposition.from_json(dec.to_json())
    assert again.evaluate() == T
    assert again.canonical().terms == dec.canonical().terms


def test_term_normalization(gf5):
    split = AxisSplit(2, (0,))
    A = Tensor.from_nested(gf5, [0, 2])
    B = Tensor.from_nested(gf5, [1, 1])
    term = PartitionTerm.normalized(split, A, B)
    assert term.A[1] == 1 and term.B[0] == 2
    assert term.evaluate() == outer(A, B, split)
    with pytest.raises(ValueError):
        PartitionTerm.normalized(split, A, Tensor.zeros(gf5, (2,)))


def test_certificate_json(diag222):
    doc = prank(diag222).to_json()
    assert doc["kind"] == "partition"
    assert doc["value"] == 2
    assert doc["lower_bound"] == "exhaustive-search"
    assert doc["tensor_sha256"] == diag222.digest()
    assert len(doc["witness"]["terms"]) == 2


def test_max_full_rank_submatrix(gf5):
    A = Tensor.from_nested(gf5, [[0, 0, 0], [1, 2, 0], [2, 4, 1]])
    X, Y, r = max_full_rank_submatrix(A)
    assert (X, Y, r) == ((1, 2), (0, 2), 2)
    assert reconstruct_outside(A, X, Y) == []


def test_reconstruct_reports_violations(gf5):
    I = Tensor.from_nested(gf5, [[1, 0], [0, 1]])
    assert len(reconstruct_outside(I, (), ())) == 2
    violations = reconstruct_outside(I, (0,), (0,))
    assert [(v.row, v.col, v.expected, v.actual) for v in violations] == [(1, 1, 0, 1)]
    assert violations[0].to_json(gf5) == {"idx": [2, 2], "expected": "0", "actual": "1"}
    with pytest.raises(SingularBlock):
        reconstruct_outside(I, (0,), (1,))
    with pytest.raises(SingularBlock):
        reconstruct_outside(I, (0, 1), (0,))


@settings(max_examples=40, deadline=None)
@given(
    rows=st.integers(1, 5),
    cols=st.integers(1, 5),
    p=st.sampled_from([2, 3, 5]),
    seed=st.integers(0, 2**16),
    sparsity=st.sampled_from([0.2, 0.5, 1.0]),
)
def test_three_r_decomposition(rows, cols, p, seed, sparsity):
    A = random_tensor((rows, cols), gf(p), seed, sparsity)
    X, Y, r = max_full_rank_submatrix(A)
    assert r == matrix_rank(A.as_matrix())
    assert reconstruct_outside(A, X, Y) == []
    dec = three_r_decomposition(A)
    assert len(dec) <= 3 * r
    assert dec.evaluate() == A
