"""
Nullcone certificates for order-3 tensors.

If T lies in V_1 ⊗ K^n ⊗ K^n + K^n ⊗ V_2 ⊗ K^n + K^n ⊗ K^n ⊗ V_3 with
dim V_1 + dim V_2 + dim V_3 < n, a one-parameter subgroup of
SL_n × SL_n × SL_n sends T to 0, so every invariant vanishes on T. The
module builds that subgroup and checks the weights on the support.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import structlog

from .errors import DimensionSumTooLarge, NonSliceTerm, ZeroTensor
from .exact_algebra import ExactMatrix, Field, invert, matrix_rank, row_space_basis, rref
from .rank_engine import PartitionDecomposition
from .tensor_core import Index, Tensor, apply_axis_matrices

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class SubspaceTriple:
    field: Field
    n: int
    bases: Tuple[Tuple[Tuple, ...], Tuple[Tuple, ...], Tuple[Tuple, ...]]

    def __post_init__(self):
        if len(self.bases) != 3:
            raise ValueError("a subspace triple needs exactly three bases")
        for basis in self.bases:
            if any(len(v) != self.n for v in basis):
                raise ValueError(f"basis vectors must have length {self.n}")
            if basis and matrix_rank(ExactMatrix.from_rows(self.field, basis)) < len(basis):
                raise ValueError("basis vectors are linearly dependent")

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(len(b) for b in self.bases)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "field": self.field.to_json(),
            "bases": [[[self.field.format(x) for x in v] for v in basis] for basis in self.bases],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SubspaceTriple":
        field = Field.from_json(doc.get("field", "rational"))
        bases = tuple(tuple(tuple(field.element(x) for x in v) for v in basis) for basis in doc["bases"])
        return cls(field, int(doc["n"]), bases)


@dataclass(frozen=True)
class OneParamSubgroup:
    """lambda_i(t) = diag(t^exponents[i][0], ..., t^exponents[i][n-1])."""

    exponents: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]

    def __post_init__(self):
        if any(sum(e) != 0 for e in self.exponents):
            raise ValueError("each exponent vector must sum to zero")

    @property
    def n(self) -> int:
        return len(self.exponents[0])

    def weight(self, idx: Index) -> int:
        return sum(e[i] for e, i in zip(self.exponents, idx))

    def to_json(self) -> dict:
        return {"exponents": [list(e) for e in self.exponents]}


def build_1psg(n: int, n1: int, n2: int, n3: int) -> OneParamSubgroup:
    sizes = (n1, n2, n3)
    if min(sizes) < 0 or sum(sizes) >= n:
        raise DimensionSumTooLarge(
            f"Subspace dimensions {sizes} must be nonnegative and sum below n={n}", {"n": n, "dims": list(sizes)}
        )
    return OneParamSubgroup(tuple(tuple([n - k] * k + [-k] * (n - k)) for k in sizes))


def entry_weights(psg: OneParamSubgroup, T: Tensor) -> List[Tuple[Index, int]]:
    return [(idx, psg.weight(idx)) for idx, _ in T.entries()]


def weight_on_support(psg: OneParamSubgroup, T: Tensor) -> int:
    """Least exponent of t among the nonzero entries of lambda(t) T."""
    if T.is_zero():
        raise ZeroTensor("The zero tensor has no support to weigh")
    return min(w for _, w in entry_weights(psg, T))


def _adapted_basis(field: Field, n: int, basis: Sequence[Tuple]) -> ExactMatrix:
    """Columns: the basis of V first, then the standard vectors off its pivot columns."""
    columns = [list(v) for v in basis]
    pivots = set(rref(ExactMatrix.from_rows(field, basis))[2]) if basis else set()
    for j in range(n):
        if j not in pivots:
            columns.append([field.one if i == j else field.zero for i in range(n)])
    return ExactMatrix.from_rows(field, columns).transpose()


@dataclass
class NullconeCertificate:
    holds: bool
    weight: int
    threshold: int
    subgroup: OneParamSubgroup
    entry_weights: List[Tuple[Index, int]]

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "min_weight": self.weight,
            "threshold": self.threshold,
            "subgroup": self.subgroup.to_json(),
            "entry_weights": [{"idx": [i + 1 for i in idx], "weight": w} for idx, w in self.entry_weights],
        }


def nullcone_certificate(T: Tensor, triple: SubspaceTriple) -> NullconeCertificate:
    """Move each V_i onto the leading coordinates and weigh the support under the matching subgroup."""
    n = triple.n
    if T.order != 3 or T.dims != (n, n, n):
        raise ValueError(f"expected an {n}x{n}x{n} tensor, got dims {T.dims}")
    psg = build_1psg(n, *triple.dims)
    changes = [invert(_adapted_basis(T.field, n, basis)) for basis in triple.bases]
    moved = apply_axis_matrices(T, changes)
    weights = entry_weights(psg, moved)
    if not weights:
        raise ZeroTensor("The zero tensor has no support to weigh")
    a = min(w for _, w in weights)
    threshold = n - sum(triple.dims)
    holds = a >= threshold > 0
    logger.debug("nullcone_certificate", n=n, dims=triple.dims, min_weight=a, holds=holds)
    return NullconeCertificate(holds, a, threshold, psg, weights)


def certify_nullcone(T: Tensor, triple: SubspaceTriple) -> bool:
    return nullcone_certificate(T, triple).holds


def triple_from_slice_decomposition(decomposition: PartitionDecomposition) -> SubspaceTriple:
    """
    Collect, per axis, the vectors of the terms whose singleton side is that
    axis. Splits are stored with axis 0 on the first side, so {0} carries its
    vector in A while {0,2} and {0,1} carry the axis-1 and axis-2 vectors in B.
    """
    if len(decomposition.dims) != 3:
        raise ValueError("subspace triples exist for order-3 decompositions only")
    n = decomposition.dims[0]
    if any(k != n for k in decomposition.dims):
        raise ValueError(f"expected cubical dims, got {decomposition.dims}")
    field = decomposition.field
    vectors: List[List] = [[], [], []]
    for term in decomposition.terms:
        if not term.split.is_slice():
            raise NonSliceTerm(f"Term on axes {term.split.axes} is not a slice", {"axes": list(term.split.axes)})
        if term.split.axes == (0,):
            vectors[0].append(term.A.data)
        else:
            (axis,) = term.split.complement
            vectors[axis].append(term.B.data)
    bases = []
    for vs in vectors:
        if vs:
            reduced = row_space_basis(field, field.coerce_array(np.stack(vs)))
            bases.append(tuple(tuple(field.element(x) for x in row) for row in reduced))
        else:
            bases.append(())
    return SubspaceTriple(field, n, tuple(bases))


def d3_degree_bound(r: int) -> Tuple[int, int]:
    """(k, k^3) with k the least positive integer such that k^2 >= r + 1."""
    if r < 1:
        raise ValueError("r must be at least 1")
    k = math.isqrt(r) + 1
    return k, k**3
