"""
Exact partition-rank and slice-rank decisions with verified witnesses.

A tensor has partition rank at most r when it is a sum of r products A ⊗ B,
each taken along some split of the axes into two nonempty groups. Over a
finite field the question is decided exhaustively; over the rationals only
witness-backed upper bounds are produced (order-2 tensors excepted, where
the matrix rank is exact on every field).

Two search strategies are available:

- "subspace" (default): for every distribution of the r terms over the
  splits, enumerate the spans of the factors on the smaller side of each
  split and solve for the other factors by linear algebra. When the
  enumerated sides are compatible, the last split is settled by the rank
  of a projected flattening instead of being enumerated.
- "terms": the literal depth-first recursion T <- T - A ⊗ B over canonical
  terms taken in non-decreasing order. Only usable on tiny tensors; kept
  as an independent cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from .config import DEFAULT_NODE_BUDGET
from .errors import BudgetExceeded, ParseError, SingularBlock, SingularMatrix
from .exact_algebra import (
    ExactMatrix,
    Field,
    Scalar,
    in_span_mod_p,
    invert,
    matrix_rank,
    rref,
    row_space_basis,
)
from .subspaces import enumerate_subspaces, weak_compositions
from .tensor_core import (
    AxisSplit,
    IndexSubsets,
    Tensor,
    all_splits,
    flatten,
    outer,
    random_tensor,
    slice_splits,
    subtensor,
)

logger = structlog.get_logger(__name__)

STRATEGIES = ("subspace", "terms")


class LowerBound(str, Enum):
    EXHAUSTIVE = "exhaustive-search"
    MATRIX_RANK = "matrix-rank"
    NONE = "none"


def _first_nonzero(data: np.ndarray) -> Scalar:
    flat = data.ravel()
    nz = np.flatnonzero(flat != 0)
    if nz.size == 0:
        raise ValueError("zero factor")
    return flat[nz[0]]


def _sortable(t: Tensor) -> Tuple:
    return tuple(t.data.ravel().tolist())


@dataclass(frozen=True)
class PartitionTerm:
    """A ⊗ B with A on ``split.axes`` and B on the complementary axes."""

    split: AxisSplit
    A: Tensor
    B: Tensor

    @classmethod
    def normalized(cls, split: AxisSplit, A: Tensor, B: Tensor) -> "PartitionTerm":
        """Rescale so the first nonzero entry of A is 1."""
        field = A.field
        lead = _first_nonzero(A.data)
        if B.is_zero():
            raise ValueError("zero factor")
        return cls(split, A.scale(field.inv(lead)), B.scale(lead))

    def evaluate(self) -> Tensor:
        return outer(self.A, self.B, self.split)

    @property
    def sort_key(self):
        return (self.split.sort_key, _sortable(self.A), _sortable(self.B))

    def restrict(self, S: IndexSubsets) -> Optional["PartitionTerm"]:
        a_sub = IndexSubsets(tuple(S.subsets[i] for i in self.split.axes))
        b_sub = IndexSubsets(tuple(S.subsets[i] for i in self.split.complement))
        if any(not s for s in S.subsets):
            return None
        A, B = subtensor(self.A, a_sub), subtensor(self.B, b_sub)
        if A.is_zero() or B.is_zero():
            return None
        return PartitionTerm.normalized(self.split, A, B)

    def to_json(self) -> dict:
        return {"I": self.split.to_json(), "A": self.A.to_json(), "B": self.B.to_json()}

    @classmethod
    def from_json(cls, doc: dict, order: int) -> "PartitionTerm":
        try:
            axes = tuple(int(i) - 1 for i in doc["I"])
            A, B = Tensor.from_json(doc["A"]), Tensor.from_json(doc["B"])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Malformed decomposition term: {e}") from e
        split = AxisSplit(order, axes)
        if split.axes != tuple(sorted(axes)):
            A, B = B, A
        return cls.normalized(split, A, B)


@dataclass(frozen=True)
class PartitionDecomposition:
    dims: Tuple[int, ...]
    field: Field
    terms: Tuple[PartitionTerm, ...] = ()

    def __len__(self) -> int:
        return len(self.terms)

    def evaluate(self) -> Tensor:
        total = Tensor.zeros(self.field, self.dims)
        for term in self.terms:
            total = total + term.evaluate()
        return total

    def canonical(self) -> "PartitionDecomposition":
        return PartitionDecomposition(self.dims, self.field, tuple(sorted(self.terms, key=lambda t: t.sort_key)))

    def restrict(self, S: IndexSubsets) -> "PartitionDecomposition":
        """Witness for the subtensor T[S]: every term restricted, vanishing terms dropped."""
        restricted = [t.restrict(S) for t in self.terms]
        return PartitionDecomposition(S.sizes, self.field, tuple(t for t in restricted if t is not None))

    def is_slice(self) -> bool:
        return all(t.split.is_slice() for t in self.terms)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "field": self.field.to_json(),
            "terms": [t.to_json() for t in self.terms],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PartitionDecomposition":
        try:
            dims = tuple(int(n) for n in doc["dims"])
            field = Field.from_json(doc["field"])
            raw_terms = doc["terms"]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Malformed decomposition document: {e}") from e
        return cls(dims, field, tuple(PartitionTerm.from_json(t, len(dims)) for t in raw_terms))


@dataclass(frozen=True)
class RankCertificate:
    value: int
    witness: PartitionDecomposition
    lower_bound: LowerBound
    tensor_digest: str
    kind: str = "partition"
    nodes: int = 0

    def verify(self, T: Tensor) -> bool:
        """Recheck the witness half of the certificate against T."""
        return (
            T.digest() == self.tensor_digest
            and len(self.witness) <= self.value
            and self.witness.evaluate() == T
            and (self.kind != "slice" or self.witness.is_slice())
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "lower_bound": self.lower_bound.value,
            "tensor_sha256": self.tensor_digest,
            "nodes": self.nodes,
            "witness": self.witness.to_json(),
        }


@dataclass
class Decision:
    """Outcome of an "at most r" query. ``holds`` is None when undecidable here (rationals)."""

    holds: Optional[bool]
    witness: Optional[PartitionDecomposition] = None
    nodes: int = 0


def _prod(values) -> int:
    return int(math.prod(values))


def _matmul(field: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return field.reduce(A @ B)


def flattening_witness(T: Tensor, split: AxisSplit) -> PartitionDecomposition:
    """Decomposition of length rank(flatten(T, split)) from the column-row factorization."""
    M = flatten(T, split)
    R, rank, pivots = rref(M)
    a_dims = tuple(T.dims[i] for i in split.axes)
    b_dims = tuple(T.dims[i] for i in split.complement)
    terms = []
    for j, col in enumerate(pivots):
        A = Tensor(T.field, M.data[:, col].reshape(a_dims).copy())
        B = Tensor(T.field, R.data[j].reshape(b_dims).copy())
        terms.append(PartitionTerm.normalized(split, A, B))
    return PartitionDecomposition(T.dims, T.field, tuple(terms))


def flattening_upper_bound(T: Tensor, splits: Sequence[AxisSplit]) -> PartitionDecomposition:
    best = None
    for split in splits:
        candidate = flattening_witness(T, split)
        if best is None or len(candidate) < len(best):
            best = candidate
    return best.canonical()


class _Search:
    """Shared state of one query: the target, the allowed splits and the node counter."""

    def __init__(self, T: Tensor, splits: Sequence[AxisSplit], node_budget: Optional[int]):
        self.T = T
        self.field = T.field
        self.dims = T.dims
        self.splits = list(splits)
        self.node_budget = node_budget or DEFAULT_NODE_BUDGET
        self.nodes = 0
        self._upper: Optional[PartitionDecomposition] = None
        self._natural_index: Dict[Tuple[int, ...], np.ndarray] = {}

    def tick(self, n: int = 1):
        self.nodes += n
        if self.nodes > self.node_budget:
            raise BudgetExceeded(
                f"Search exceeded {self.node_budget} nodes",
                {"nodes": self.nodes, "budget": self.node_budget, "dims": list(self.dims)},
            )

    @property
    def upper(self) -> PartitionDecomposition:
        if self._upper is None:
            self._upper = flattening_upper_bound(self.T, self.splits)
        return self._upper

    def side(self, split: AxisSplit) -> Tuple[int, ...]:
        """The side whose factors get enumerated: the one with fewer coordinates."""
        a = _prod(self.dims[i] for i in split.axes)
        b = _prod(self.dims[i] for i in split.complement)
        return split.axes if a <= b else split.complement

    def other(self, side: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(i for i in range(len(self.dims)) if i not in side)

    def layout_index(self, side: Tuple[int, ...]) -> np.ndarray:
        if side not in self._natural_index:
            layout = side + self.other(side)
            N = _prod(self.dims)
            self._natural_index[side] = np.arange(N).reshape(self.dims).transpose(layout).reshape(-1)
        return self._natural_index[side]


def _flatten_along(data: np.ndarray, side: Tuple[int, ...]) -> np.ndarray:
    """Rows indexed by the ``side`` axes, columns by the rest, both lexicographic."""
    rest = tuple(i for i in range(data.ndim) if i not in side)
    rows = _prod(data.shape[i] for i in side)
    return np.ascontiguousarray(data.transpose(side + rest).reshape(rows, -1))


def _project(field: Field, data: np.ndarray, side: Tuple[int, ...], V: np.ndarray) -> np.ndarray:
    """
    Apply x -> x - V^T x[P] on the ``side`` axes, where P are the pivot
    columns of the RREF basis V. The kernel of this map is span(V).
    """
    order = data.ndim
    rest = tuple(i for i in range(order) if i not in side)
    layout = side + rest
    moved = data.transpose(layout)
    n_side = _prod(moved.shape[: len(side)])
    P = np.eye(n_side, dtype=data.dtype)
    for j in range(V.shape[0]):
        pivot = int(np.flatnonzero(V[j] != 0)[0])
        P[:, pivot] = P[:, pivot] - V[j]
    P = field.reduce(P)
    projected = _matmul(field, P, moved.reshape(n_side, -1)).reshape(moved.shape)
    return projected.transpose(np.argsort(layout))


def _membership(search: _Search, chosen: Sequence[Tuple[AxisSplit, np.ndarray]]) -> Optional[PartitionDecomposition]:
    """
    Is T in the sum of span(V_s) ⊗ K^{rest} over the chosen splits? If so,
    recover the complementary factors and return the decomposition.
    """
    field, dims = search.field, search.dims
    N = _prod(dims)
    blocks = []
    for split, V in chosen:
        side = search.side(split)
        n_other = _prod(dims[i] for i in search.other(side))
        generators = np.zeros((N, V.shape[0] * n_other), dtype=field.dtype)
        generators[search.layout_index(side)] = np.kron(V.T, np.eye(n_other, dtype=field.dtype))
        blocks.append(generators)
    if not blocks:
        return PartitionDecomposition(dims, field) if search.T.is_zero() else None
    x = in_span_mod_p(np.concatenate(blocks, axis=1), search.T.data.reshape(-1), field.char)
    if x is None:
        return None
    terms = []
    offset = 0
    for split, V in chosen:
        side = search.side(split)
        other = search.other(side)
        side_dims = tuple(dims[i] for i in side)
        other_dims = tuple(dims[i] for i in other)
        n_other = _prod(other_dims)
        coefficients = x[offset : offset + V.shape[0] * n_other].reshape(V.shape[0], n_other)
        offset += V.shape[0] * n_other
        for j in range(V.shape[0]):
            if not np.any(coefficients[j] != 0):
                continue
            side_factor = Tensor(field, V[j].reshape(side_dims).copy())
            other_factor = Tensor(field, coefficients[j].reshape(other_dims).copy())
            if side == split.axes:
                terms.append(PartitionTerm.normalized(split, side_factor, other_factor))
            else:
                terms.append(PartitionTerm.normalized(split, other_factor, side_factor))
    decomposition = PartitionDecomposition(dims, field, tuple(terms))
    assert decomposition.evaluate() == search.T, "membership witness does not reproduce the tensor"
    return decomposition


def _pick_last(search: _Search, active: List[Tuple[AxisSplit, int]]) -> Optional[AxisSplit]:
    """
    Choose a split to settle by flattening rank. This is exact when the
    enumerated sides of the other splits are pairwise disjoint and each lies
    inside one side of the chosen split.
    """
    candidates = sorted(active, key=lambda sb: -_prod(search.dims[i] for i in search.side(sb[0])) * sb[1])
    for last, _ in candidates:
        sides = [set(search.side(s)) for s, _ in active if s != last]
        disjoint = all(not (a & b) for a, b in itertools.combinations(sides, 2))
        inside = all(side <= set(last.axes) or side <= set(last.complement) for side in sides)
        if disjoint and inside:
            return last
    return None


def _enumerations(search: _Search, splits: Sequence[Tuple[AxisSplit, int]]) -> Iterator[Tuple[np.ndarray, ...]]:
    spaces = []
    for split, b in splits:
        ambient = _prod(search.dims[i] for i in search.side(split))
        spaces.append(list(enumerate_subspaces(search.field, ambient, b)))
    return itertools.product(*spaces)


def _decide_budget(search: _Search, budget: Sequence[Tuple[AxisSplit, int]]) -> Optional[PartitionDecomposition]:
    active = [(s, b) for s, b in budget if b > 0]
    if not active:
        search.tick()
        return PartitionDecomposition(search.dims, search.field) if search.T.is_zero() else None
    last = _pick_last(search, active)
    if last is None:
        for choice in _enumerations(search, active):
            search.tick()
            found = _membership(search, list(zip([s for s, _ in active], choice)))
            if found is not None:
                return found
        return None

    earlier = [(s, b) for s, b in active if s != last]
    last_budget = dict(active)[last]
    last_side = search.side(last)
    for choice in _enumerations(search, earlier):
        search.tick()
        projected = search.T.data
        for (split, _), V in zip(earlier, choice):
            projected = _project(search.field, projected, search.side(split), V)
        M = ExactMatrix(search.field, _flatten_along(projected, last_side))
        if matrix_rank(M) > last_budget:
            continue
        V_last = row_space_basis(search.field, np.ascontiguousarray(M.data.T))
        chosen = [(s, V) for (s, _), V in zip(earlier, choice)]
        if V_last.shape[0]:
            chosen.append((last, V_last))
        found = _membership(search, chosen)
        assert found is not None, "projected flattening rank and membership disagree"
        return found
    return None


def _leads_with_one(v: Sequence[int]) -> bool:
    for x in v:
        if x:
            return x == 1
    return False


def _candidate_terms(field: Field, dims: Tuple[int, ...], splits: Sequence[AxisSplit]) -> List[PartitionTerm]:
    """Every canonical term (first nonzero entry of A equal to 1) in canonical order."""
    terms = []
    for split in splits:
        a_dims = tuple(dims[i] for i in split.axes)
        b_dims = tuple(dims[i] for i in split.complement)
        a_vectors = [v for v in itertools.product(range(field.char), repeat=_prod(a_dims)) if _leads_with_one(v)]
        b_vectors = [v for v in itertools.product(range(field.char), repeat=_prod(b_dims)) if any(v)]
        for a in a_vectors:
            A = Tensor(field, np.array(a, dtype=field.dtype).reshape(a_dims))
            for b in b_vectors:
                terms.append(PartitionTerm(split, A, Tensor(field, np.array(b, dtype=field.dtype).reshape(b_dims))))
    return terms


def _terms_search(search: _Search, r: int) -> Optional[PartitionDecomposition]:
    candidates = _candidate_terms(search.field, search.dims, search.splits)
    values = [c.evaluate().data for c in candidates]
    field = search.field
    logger.debug("terms_search_start", candidates=len(candidates), r=r)

    def rank_one_term(data: np.ndarray) -> Optional[PartitionTerm]:
        residual = Tensor(field, data)
        for split in search.splits:
            if matrix_rank(flatten(residual, split)) <= 1:
                return flattening_witness(residual, split).terms[0]
        return None

    def dfs(data: np.ndarray, remaining: int, start: int) -> Optional[List[PartitionTerm]]:
        search.tick()
        if not np.any(data != 0):
            return []
        if remaining == 0:
            return None
        if remaining == 1:
            term = rank_one_term(data)
            return [term] if term is not None else None
        for i in range(start, len(candidates)):
            found = dfs(field.reduce(data - values[i]), remaining - 1, i)
            if found is not None:
                return [candidates[i]] + found
        return None

    found = dfs(search.T.data, r, 0)
    if found is None:
        return None
    return PartitionDecomposition(search.dims, field, tuple(found))


def _at_most(search: _Search, r: int, strategy: str) -> Decision:
    T = search.T
    if T.is_zero():
        return Decision(True, PartitionDecomposition(T.dims, T.field), search.nodes)
    if r >= len(search.upper):
        return Decision(True, search.upper, search.nodes)
    if T.order == 2:
        # The flattening bound of a matrix is its rank, which is exact.
        return Decision(False, None, search.nodes)
    if T.field.is_rational:
        return Decision(None, None, search.nodes)
    if r == 0:
        return Decision(False, None, search.nodes)

    if strategy == "terms":
        found = _terms_search(search, r)
    else:
        found = None
        for composition in weak_compositions(r, len(search.splits)):
            found = _decide_budget(search, list(zip(search.splits, composition)))
            if found is not None:
                break
    if found is None:
        return Decision(False, None, search.nodes)
    return Decision(True, found.canonical(), search.nodes)


def _check_strategy(strategy: str):
    if strategy not in STRATEGIES:
        raise ParseError(f"Unknown search strategy '{strategy}'", {"known": list(STRATEGIES)})


def prank_at_most(
    T: Tensor, r: int, node_budget: Optional[int] = None, strategy: str = "subspace", slice_only: bool = False
) -> Decision:
    """Decide partrank(T) <= r (slice rank when ``slice_only``); a True answer carries a verified witness."""
    _check_strategy(strategy)
    splits = slice_splits(T.order) if slice_only else all_splits(T.order)
    search = _Search(T, splits, node_budget)
    decision = _at_most(search, r, strategy)
    logger.debug("rank_decision", r=r, holds=decision.holds, nodes=search.nodes, dims=list(T.dims))
    return decision


def slice_rank_at_most(T: Tensor, r: int, node_budget: Optional[int] = None, strategy: str = "subspace") -> Decision:
    return prank_at_most(T, r, node_budget, strategy, slice_only=True)


def _certify(T: Tensor, splits: Sequence[AxisSplit], kind: str, node_budget: Optional[int], strategy: str) -> RankCertificate:
    _check_strategy(strategy)
    search = _Search(T, splits, node_budget)
    digest = T.digest()

    def certificate(witness: PartitionDecomposition, tag: LowerBound) -> RankCertificate:
        cert = RankCertificate(len(witness), witness, tag, digest, kind, search.nodes)
        logger.info("rank_certified", kind=kind, value=cert.value, lower_bound=tag.value, nodes=search.nodes, dims=list(T.dims))
        return cert

    if T.is_zero():
        return certificate(PartitionDecomposition(T.dims, T.field), LowerBound.EXHAUSTIVE)
    if T.order == 2:
        return certificate(search.upper, LowerBound.MATRIX_RANK)
    if T.field.is_rational:
        return certificate(search.upper, LowerBound.NONE)
    for r in range(1, len(search.upper)):
        decision = _at_most(search, r, strategy)
        if decision.holds:
            return certificate(decision.witness, LowerBound.EXHAUSTIVE)
    return certificate(search.upper, LowerBound.EXHAUSTIVE)


def prank(T: Tensor, node_budget: Optional[int] = None, strategy: str = "subspace") -> RankCertificate:
    """Partition rank by iterative deepening below the best flattening bound."""
    return _certify(T, all_splits(T.order), "partition", node_budget, strategy)


def slice_rank(T: Tensor, node_budget: Optional[int] = None, strategy: str = "subspace") -> RankCertificate:
    return _certify(T, slice_splits(T.order), "slice", node_budget, strategy)


def max_full_rank_submatrix(A: Tensor) -> Tuple[Tuple[int, ...], Tuple[int, ...], int]:
    """
    Lexicographically least (X, Y) with A[X, Y] invertible of size rank(A).

    X is the greedy row basis (pivots of A^T); Y the greedy column basis of
    the rows X.
    """
    M = A.as_matrix()
    _, rank, row_pivots = rref(M.transpose())
    X = tuple(row_pivots)
    if not X:
        return (), (), 0
    _, _, col_pivots = rref(M.submatrix(X, range(M.cols)))
    return X, tuple(col_pivots), rank


@dataclass(frozen=True)
class Violation:
    row: int
    col: int
    expected: Scalar
    actual: Scalar

    def to_json(self, field: Field) -> dict:
        return {"idx": [self.row + 1, self.col + 1], "expected": field.format(self.expected), "actual": field.format(self.actual)}


def _block_inverse(M: ExactMatrix, X: Sequence[int], Y: Sequence[int]) -> ExactMatrix:
    try:
        return invert(M.submatrix(X, Y))
    except SingularMatrix as e:
        raise SingularBlock(
            f"A[X, Y] is singular for X={[x + 1 for x in X]}, Y={[y + 1 for y in Y]}", e.details
        ) from e


def reconstruct_outside(A: Tensor, X: Sequence[int], Y: Sequence[int]) -> List[Violation]:
    """Check A(x, y) = A[{x}, Y] A[X, Y]^{-1} A[X, {y}] for every x outside X and y outside Y."""
    M = A.as_matrix()
    if len(X) != len(Y):
        raise SingularBlock(f"A[X, Y] is not square ({len(X)}x{len(Y)})")
    X, Y = list(X), list(Y)
    outside_rows = [x for x in range(M.rows) if x not in X]
    outside_cols = [y for y in range(M.cols) if y not in Y]
    if not outside_rows or not outside_cols:
        return []
    if not X:
        predicted = ExactMatrix.zero(A.field, len(outside_rows), len(outside_cols))
    else:
        inverse = _block_inverse(M, X, Y)
        predicted = M.submatrix(outside_rows, Y) @ inverse @ M.submatrix(X, outside_cols)
    violations = []
    for i, x in enumerate(outside_rows):
        for j, y in enumerate(outside_cols):
            if predicted[i, j] != M[x, y]:
                violations.append(Violation(x, y, predicted[i, j], M[x, y]))
    return violations


def three_r_decomposition(A: Tensor) -> PartitionDecomposition:
    """
    Decompose a matrix into at most 3r rank-one terms, r = rank(A): one term
    per row in X, one per column in Y restricted to the rows outside X, and
    r terms for the remaining block A[X^c, Y] A[X, Y]^{-1} A[X, Y^c].
    """
    M = A.as_matrix()
    field = A.field
    X, Y, r = max_full_rank_submatrix(A)
    split = AxisSplit(2, (0,))
    terms: List[PartitionTerm] = []

    def vector(values, positions, length) -> Tensor:
        data = field.zeros((length,))
        for p, v in zip(positions, values):
            data[p] = v
        return Tensor(field, data)

    def add(a: Tensor, b: Tensor):
        if not a.is_zero() and not b.is_zero():
            terms.append(PartitionTerm.normalized(split, a, b))

    for x in X:
        add(vector([1], [x], M.rows), Tensor(field, M.data[x].copy()))
    outside_rows = [x for x in range(M.rows) if x not in X]
    outside_cols = [y for y in range(M.cols) if y not in Y]
    for y in Y:
        add(vector(M.data[outside_rows, y], outside_rows, M.rows), vector([1], [y], M.cols))
    if r and outside_rows and outside_cols:
        left = M.submatrix(outside_rows, Y) @ _block_inverse(M, X, Y)
        right = M.submatrix(X, outside_cols)
        for j in range(r):
            add(vector(left.data[:, j], outside_rows, M.rows), vector(right.data[j], outside_cols, M.cols))
    decomposition = PartitionDecomposition(A.dims, field, tuple(terms))
    assert len(decomposition) <= 3 * r
    return decomposition


def random_decomposition(
    dims: Sequence[int], field: Field, r: int, seed: int, splits: Optional[Sequence[AxisSplit]] = None
) -> Tuple[Tensor, PartitionDecomposition]:
    """A seeded tensor of partition rank at most r together with the decomposition that built it."""
    dims = tuple(dims)
    splits = list(splits) if splits is not None else all_splits(len(dims))
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(r):
        split = splits[int(rng.integers(len(splits)))]
        factors = []
        for axes in (split.axes, split.complement):
            factor = random_tensor(tuple(dims[i] for i in axes), field, int(rng.integers(2**32)), 0.7)
            if factor.is_zero():
                factor = Tensor.from_entries(field, factor.dims, {(0,) * factor.order: 1})
            factors.append(factor)
        terms.append(PartitionTerm.normalized(split, *factors))
    decomposition = PartitionDecomposition(dims, field, tuple(terms))
    return decomposition.evaluate(), decomposition
