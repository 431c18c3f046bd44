"""
Dense order-d tensors over an exact field.

Indices are 0-based in the Python API and 1-based in every JSON document.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from .config import RATIONAL_SAMPLE_BOUND
from .errors import IndexOutOfRange, ParseError
from .exact_algebra import ExactMatrix, Field, Scalar

logger = structlog.get_logger(__name__)

Index = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Tensor:
    field: Field
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim < 1:
            raise ValueError("a tensor needs at least one axis")
        if any(n < 1 for n in self.data.shape):
            raise ValueError(f"tensor dimensions must be positive, got {self.data.shape}")
        self.data.setflags(write=False)

    @classmethod
    def zeros(cls, field: Field, dims: Sequence[int]) -> "Tensor":
        return cls(field, field.zeros(tuple(dims)))

    @classmethod
    def from_entries(cls, field: Field, dims: Sequence[int], entries: Dict[Index, Scalar]) -> "Tensor":
        data = field.zeros(tuple(dims))
        for idx, val in entries.items():
            _check_index(idx, dims)
            data[tuple(idx)] = field.element(val)
        return cls(field, data)

    @classmethod
    def from_nested(cls, field: Field, nested) -> "Tensor":
        return cls(field, field.coerce_array(nested))

    @classmethod
    def from_matrix(cls, M: ExactMatrix) -> "Tensor":
        return cls(M.field, M.data.copy())

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    def __getitem__(self, idx):
        return self.data[idx]

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def entries(self) -> Iterator[Tuple[Index, Scalar]]:
        """Nonzero entries in lexicographic index order."""
        for idx in zip(*np.nonzero(self.data != 0)):
            idx = tuple(int(i) for i in idx)
            yield idx, self.data[idx]

    def support_size(self) -> int:
        return int(np.count_nonzero(self.data != 0))

    def _check_compatible(self, other: "Tensor"):
        if self.field != other.field or self.dims != other.dims:
            raise ValueError(f"incompatible tensors {self.dims}/{self.field} and {other.dims}/{other.field}")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.field, self.field.reduce(self.data - other.data))

    def __neg__(self) -> "Tensor":
        return Tensor(self.field, self.field.reduce(-self.data))

    def scale(self, c: Scalar) -> "Tensor":
        c = self.field.element(c)
        return Tensor(self.field, self.field.reduce(self.data * c))

    def to_field(self, field: Field) -> "Tensor":
        return Tensor(field, field.coerce_array(self.data))

    def as_matrix(self) -> ExactMatrix:
        if self.order != 2:
            raise ValueError(f"order-{self.order} tensor is not a matrix")
        return ExactMatrix(self.field, self.data.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.field == other.field and self.dims == other.dims and bool(np.all(self.data == other.data))

    def __hash__(self):
        return hash((self.field, self.dims, tuple(self.entries())))

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "dims": list(self.dims),
            "field": self.field.to_json(),
            "entries": [
                {"idx": [i + 1 for i in idx], "val": self.field.format(val)} for idx, val in self.entries()
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Tensor":
        try:
            dims = [int(n) for n in doc["dims"]]
            field = Field.from_json(doc["field"])
            raw_entries = doc.get("entries", [])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Malformed tensor document: {e}") from e
        if "order" in doc and int(doc["order"]) != len(dims):
            raise ParseError(f"order {doc['order']} does not match dims {dims}")
        entries: Dict[Index, Scalar] = {}
        for entry in raw_entries:
            try:
                idx = tuple(int(i) - 1 for i in entry["idx"])
                val = entry["val"]
            except (KeyError, TypeError, ValueError) as e:
                raise ParseError(f"Malformed tensor entry {entry!r}") from e
            entries[idx] = field.parse(str(val))
        return cls.from_entries(field, dims, entries)

    def digest(self) -> str:
        canonical = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"Tensor<{self.field}>{self.dims}[{', '.join(f'{i}:{self.field.format(v)}' for i, v in self.entries())}]"


def _check_index(idx: Sequence[int], dims: Sequence[int]):
    if len(idx) != len(dims) or any(not 0 <= i < n for i, n in zip(idx, dims)):
        raise IndexOutOfRange(
            f"Index {[i + 1 for i in idx]} outside dims {list(dims)}",
            {"index": [i + 1 for i in idx], "dims": list(dims)},
        )


@dataclass(frozen=True)
class IndexSubsets:
    """Per-axis strictly increasing index lists X_1, ..., X_d."""

    subsets: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(tuple(int(i) for i in s) for s in self.subsets))
        for s in self.subsets:
            if any(a >= b for a, b in zip(s, s[1:])):
                raise ParseError(f"index subset {list(s)} is not strictly increasing")

    @classmethod
    def full(cls, dims: Sequence[int]) -> "IndexSubsets":
        return cls(tuple(tuple(range(n)) for n in dims))

    @classmethod
    def cube(cls, subset: Sequence[int], order: int) -> "IndexSubsets":
        return cls(tuple(tuple(subset) for _ in range(order)))

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.subsets)

    def validate(self, dims: Sequence[int]):
        if len(self.subsets) != len(dims):
            raise IndexOutOfRange(f"{len(self.subsets)} subsets given for an order-{len(dims)} tensor")
        for axis, (s, n) in enumerate(zip(self.subsets, dims)):
            if s and (s[0] < 0 or s[-1] >= n):
                raise IndexOutOfRange(
                    f"subset on axis {axis + 1} leaves [1, {n}]",
                    {"axis": axis + 1, "subset": [i + 1 for i in s]},
                )

    def compose(self, inner: "IndexSubsets") -> "IndexSubsets":
        """Subsets of the original tensor selecting ``inner`` positions inside this selection."""
        return IndexSubsets(tuple(tuple(outer[i] for i in sub) for outer, sub in zip(self.subsets, inner.subsets)))

    def complement(self, dims: Sequence[int]) -> "IndexSubsets":
        return IndexSubsets(tuple(tuple(i for i in range(n) if i not in set(s)) for s, n in zip(self.subsets, dims)))

    def to_json(self) -> List[List[int]]:
        return [[i + 1 for i in s] for s in self.subsets]

    @classmethod
    def from_json(cls, doc) -> "IndexSubsets":
        return cls(tuple(tuple(int(i) - 1 for i in s) for s in doc))


@dataclass(frozen=True)
class AxisSplit:
    """
    A proper nonempty subset I of the axes, stored by the representative
    that contains axis 0 (so the pair {I, I^c} has a single name).
    """

    order: int
    axes: Tuple[int, ...]

    def __post_init__(self):
        axes = tuple(sorted(set(int(a) for a in self.axes)))
        if not axes or len(axes) >= self.order or axes[0] < 0 or axes[-1] >= self.order:
            raise ParseError(f"{[a + 1 for a in axes]} is not a proper nonempty subset of the {self.order} axes")
        if 0 not in axes:
            axes = tuple(a for a in range(self.order) if a not in axes)
        object.__setattr__(self, "axes", axes)

    @property
    def complement(self) -> Tuple[int, ...]:
        return tuple(a for a in range(self.order) if a not in self.axes)

    @property
    def size(self) -> int:
        """Order of the smaller factor."""
        return min(len(self.axes), self.order - len(self.axes))

    @property
    def sort_key(self):
        return (self.size, self.axes)

    def is_slice(self) -> bool:
        return self.size == 1

    def to_json(self) -> List[int]:
        return [a + 1 for a in self.axes]


def all_splits(order: int) -> List[AxisSplit]:
    """Canonical splits of ``order`` axes: singleton sides first, then larger ones."""
    others = range(1, order)
    splits = set()
    for k in range(0, order - 1):
        for extra in itertools.combinations(others, k):
            splits.add(AxisSplit(order, (0,) + extra))
    return sorted(splits, key=lambda s: s.sort_key)


def slice_splits(order: int) -> List[AxisSplit]:
    return [s for s in all_splits(order) if s.is_slice()]


def subtensor(T: Tensor, S: IndexSubsets) -> Tensor:
    S.validate(T.dims)
    index = np.ix_(*(np.asarray(s, dtype=np.intp) for s in S.subsets))
    return Tensor(T.field, T.data[index].copy())


def flatten(T: Tensor, split: AxisSplit) -> ExactMatrix:
    rows = int(np.prod([T.dims[a] for a in split.axes]))
    cols = int(np.prod([T.dims[a] for a in split.complement]))
    return ExactMatrix(T.field, T.data.transpose(split.axes + split.complement).reshape(rows, cols).copy())


def outer(A: Tensor, B: Tensor, split: AxisSplit) -> Tensor:
    """The tensor A ⊗ B with A on the axes of ``split`` and B on the rest."""
    if A.order != len(split.axes) or B.order != len(split.complement):
        raise ValueError(f"factor orders {A.order}/{B.order} do not fit split {split.to_json()}")
    product = np.multiply.outer(A.data, B.data)
    layout = split.axes + split.complement
    return Tensor(A.field, A.field.reduce(product.transpose(np.argsort(layout))))


def apply_index_permutations(T: Tensor, perms: Sequence[Sequence[int]]) -> Tensor:
    """result(x_1, ..., x_d) = T(σ_1^{-1} x_1, ..., σ_d^{-1} x_d); σ_i given as image lists."""
    if len(perms) != T.order:
        raise ValueError(f"{len(perms)} permutations for an order-{T.order} tensor")
    inverses = []
    for perm, n in zip(perms, T.dims):
        perm = np.asarray(perm, dtype=np.intp)
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError(f"{perm.tolist()} is not a permutation of {n} indices")
        inverses.append(np.argsort(perm))
    return Tensor(T.field, T.data[np.ix_(*inverses)].copy())


def apply_axis_matrices(T: Tensor, matrices: Sequence[Optional[ExactMatrix]]) -> Tensor:
    """Apply M_i along axis i (None leaves the axis untouched)."""
    data = T.data
    for axis, M in enumerate(matrices):
        if M is None:
            continue
        if M.cols != T.dims[axis]:
            raise ValueError(f"matrix with {M.cols} columns cannot act on axis of size {T.dims[axis]}")
        data = T.field.reduce(np.moveaxis(np.tensordot(M.data, data, axes=([1], [axis])), 0, axis))
    return Tensor(T.field, np.ascontiguousarray(data))


def diagonal_tensor(order: int, n: int, field: Field, values: Optional[Sequence[Scalar]] = None) -> Tensor:
    values = list(values) if values is not None else [field.one] * n
    return Tensor.from_entries(field, (n,) * order, {(i,) * order: v for i, v in enumerate(values)})


def basis_vector(field: Field, n: int, i: int) -> Tensor:
    return Tensor.from_entries(field, (n,), {(i,): 1})


def _random_values(rng: np.random.Generator, field: Field, shape) -> np.ndarray:
    if field.is_finite:
        return rng.integers(1, field.char, size=shape)
    magnitudes = rng.integers(1, RATIONAL_SAMPLE_BOUND + 1, size=shape)
    signs = rng.choice(np.array([-1, 1]), size=shape)
    return magnitudes * signs


def random_tensor(dims: Sequence[int], field: Field, seed: int, sparsity: float = 1.0) -> Tensor:
    """
    Seeded random tensor. Each entry is nonzero with probability ``sparsity``;
    nonzero values are uniform over the nonzero field elements, or uniform
    nonzero integers in [-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND] over the rationals.
    """
    if not 0.0 <= sparsity <= 1.0:
        raise ValueError(f"sparsity {sparsity} outside [0, 1]")
    rng = np.random.default_rng(seed)
    dims = tuple(dims)
    mask = rng.random(dims) < sparsity
    values = _random_values(rng, field, dims)
    return Tensor(field, field.coerce_array(np.where(mask, values, 0)))


GENERATORS = ("uniform", "sparse", "diagonal")


def generate(kind: str, dims: Sequence[int], field: Field, seed: int) -> Tensor:
    """Neutral tensor families for experiment batches."""
    if kind == "uniform":
        if field.is_finite:
            rng = np.random.default_rng(seed)
            return Tensor(field, field.coerce_array(rng.integers(0, field.char, size=tuple(dims))))
        return random_tensor(dims, field, seed, 1.0)
    if kind == "sparse":
        return random_tensor(dims, field, seed, 0.3)
    if kind == "diagonal":
        rng = np.random.default_rng(seed)
        n = min(dims)
        values = _random_values(rng, field, (n,))
        entries = {(i,) * len(dims): int(v) for i, v in enumerate(values)}
        return Tensor.from_entries(field, dims, entries)
    raise ParseError(f"Unknown generator '{kind}'", {"known": list(GENERATORS)})
