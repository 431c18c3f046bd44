import numpy as np
import pytest

from subtensor_rank.errors import IndexOutOfRange, ParseError
from subtensor_rank.exact_algebra import ExactMatrix, matrix_rank
from subtensor_rank.tensor_core import (
    AxisSplit,
    IndexSubsets,
    Tensor,
    all_splits,
    apply_axis_matrices,
    apply_index_permutations,
    diagonal_tensor,
    flatten,
    generate,
    outer,
    random_tensor,
    slice_splits,
    subtensor,
)


def test_json_indices_are_one_based(diag222):
    assert diag222.dims == (2, 2, 2)
    assert diag222[0, 0, 0] == 1 and diag222[1, 1, 1] == 1
    assert diag222.support_size() == 2
    doc = diag222.to_json()
    assert [e["idx"] for e in doc["entries"]] == [[1, 1, 1], [2, 2, 2]]
    assert Tensor.from_json(doc) == diag222


def test_from_json_rejects_bad_documents():
    with pytest.raises(ParseError):
        Tensor.from_json({"dims": [2, 2]})
    with pytest.raises(ParseError):
        Tensor.from_json({"order": 3, "dims": [2, 2], "field": {"char": 2}})
    with pytest.raises(IndexOutOfRange):
        Tensor.from_json({"dims": [2, 2], "field": {"char": 2}, "entries": [{"idx": [3, 1], "val": "1"}]})


def test_tensor_is_immutable(gf5):
    T = Tensor.zeros(gf5, (2, 2))
    with pytest.raises(ValueError):
        T.data[0, 0] = 1


def test_arithmetic(gf5):
    T = Tensor.from_entries(gf5, (2, 2), {(0, 0): 3, (1, 0): 4})
    assert (T + T)[0, 0] == 1
    assert (T - T).is_zero()
    assert (-T)[1, 0] == 1
    assert T.scale(2)[1, 0] == 3
    with pytest.raises(ValueError):
        T + Tensor.zeros(gf5, (2, 3))


def test_digest_is_stable(gf2):
    A = Tensor.from_entries(gf2, (2, 2, 2), {(0, 1, 0): 1})
    B = Tensor.from_nested(gf2, [[[0, 0], [1, 0]], [[0, 0], [0, 0]]])
    assert A == B
    assert A.digest() == B.digest()
    assert hash(A) == hash(B)


def test_axis_split_canonicalization():
    split = AxisSplit(3, (1, 2))
    assert split.axes == (0,)
    assert split.complement == (1, 2)
    assert split.to_json() == [1]
    assert AxisSplit(4, (2, 3)) == AxisSplit(4, (0, 1))
    with pytest.raises(ParseError):
        AxisSplit(3, (0, 1, 2))
    with pytest.raises(ParseError):
        AxisSplit(3, ())


@pytest.mark.parametrize("order,total,slices", [(2, 1, 1), (3, 3, 3), (4, 7, 4), (5, 15, 5)])
def test_split_counts(order, total, slices):
    assert len(all_splits(order)) == total
    assert len(slice_splits(order)) == slices
    assert all(s.is_slice() for s in all_splits(order)[:slices])


def test_outer_has_rank_one_flattening(gf5):
    split = AxisSplit(3, (0, 2))
    A = random_tensor((2, 3), gf5, seed=1)
    B = random_tensor((2,), gf5, seed=2)
    T = outer(A, B, split)
    assert T.dims == (2, 2, 3)
    assert T[1, 0, 2] == gf5.mul(A[1, 2], B[0])
    assert matrix_rank(flatten(T, split)) == 1


def test_outer_rejects_wrong_orders(gf5):
    with pytest.raises(ValueError):
        outer(Tensor.zeros(gf5, (2,)), Tensor.zeros(gf5, (2,)), AxisSplit(3, (0,)))


def test_subtensor_and_subsets(gf5):
    T = random_tensor((3, 3, 3), gf5, seed=7)
    S = IndexSubsets(((0, 2), (1,), (0, 1, 2)))
    sub = subtensor(T, S)
    assert sub.dims == (2, 1, 3)
    assert sub[1, 0, 2] == T[2, 1, 2]
    inner = IndexSubsets(((1,), (0,), (2,)))
    assert subtensor(sub, inner) == subtensor(T, S.compose(inner))
    assert S.complement((3, 3, 3)).subsets == ((1,), (0, 2), ())
    assert S.to_json() == [[1, 3], [2], [1, 2, 3]]
    assert IndexSubsets.from_json(S.to_json()) == S
    with pytest.raises(ParseError):
        IndexSubsets(((1, 0),))
    with pytest.raises(IndexOutOfRange):
        subtensor(T, IndexSubsets(((0,), (3,), (0,))))


def test_cube_subsets():
    assert IndexSubsets.cube((0, 2), 3).subsets == ((0, 2),) * 3


def test_index_permutations_round_trip(gf5):
    T = random_tensor((3, 2), gf5, seed=3)
    perms = [[2, 0, 1], [1, 0]]
    P = apply_index_permutations(T, perms)
    assert P[2, 1] == T[0, 0]
    inverse = [list(np.argsort(p)) for p in perms]
    assert apply_index_permutations(P, inverse) == T
    with pytest.raises(ValueError):
        apply_index_permutations(T, [[0, 0, 1], [1, 0]])


def test_axis_matrices(gf5):
    T = random_tensor((2, 2, 2), gf5, seed=4)
    identity = ExactMatrix.identity(gf5, 2)
    assert apply_axis_matrices(T, [identity, None, identity]) == T
    swap = ExactMatrix.from_rows(gf5, [[0, 1], [1, 0]])
    swapped = apply_axis_matrices(T, [None, swap, None])
    assert swapped[0, 0, 1] == T[0, 1, 1]
    assert swapped == apply_index_permutations(T, [[0, 1], [1, 0], [0, 1]])


def test_diagonal_tensor(gf5):
    D = diagonal_tensor(3, 2, gf5, [2, 3])
    assert D[0, 0, 0] == 2 and D[1, 1, 1] == 3 and D.support_size() == 2


def test_generators_are_seeded(gf5):
    for kind in ("uniform", "sparse", "diagonal"):
        assert generate(kind, (2, 3, 2), gf5, 11) == generate(kind, (2, 3, 2), gf5, 11)
    with pytest.raises(ParseError):
        generate("tricky", (2, 2), gf5, 0)


def test_random_tensor_rejects_bad_sparsity(gf5):
    with pytest.raises(ValueError):
        random_tensor((2, 2), gf5, 0, sparsity=1.5)
