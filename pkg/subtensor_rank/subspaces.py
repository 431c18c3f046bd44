"""
Enumeration of linear subspaces of GF(p)^n by their canonical RREF bases.

Both exhaustive searches (partition rank and strength) walk these
enumerations in the fixed order produced here, which makes every returned
witness reproducible.
"""

import itertools
from typing import Iterator, Tuple

import numpy as np

from .exact_algebra import Field


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_subspaces(field: Field, ambient: int, dim: int) -> int:
    return gaussian_binomial(ambient, min(dim, ambient), field.char)


def enumerate_subspaces(field: Field, ambient: int, dim: int) -> Iterator[np.ndarray]:
    """
    Yield a (dim x ambient) RREF basis for every dim-dimensional subspace.

    Pivot sets come in lexicographic order; within a pivot set the free
    entries run through the field in odometer order. A request for more
    dimensions than the ambient space has yields the whole space once.
    """
    if field.is_rational:
        raise ValueError("subspaces of a rational vector space cannot be enumerated")
    dim = min(dim, ambient)
    for pivots in itertools.combinations(range(ambient), dim):
        pivot_set = set(pivots)
        free = [(row, col) for row, p in enumerate(pivots) for col in range(p + 1, ambient) if col not in pivot_set]
        for values in itertools.product(range(field.char), repeat=len(free)):
            basis = np.zeros((dim, ambient), dtype=field.dtype)
            for row, p in enumerate(pivots):
                basis[row, p] = 1
            for (row, col), v in zip(free, values):
                basis[row, col] = v
            yield basis


def weak_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``, lexicographically descending."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest
