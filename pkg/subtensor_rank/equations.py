"""
Polynomial equations for bounded partition rank.

This module covers three connected pieces of machinery:

- weights and polarization: reading the torus weight of a polynomial in
  tensor entries and polarizing it until it is multilinear;
- pullback kernels: composing degree-m polynomials with the parametrization
  of tensors of partition rank at most r and reading vanishing polynomials
  off the kernel of the resulting coefficient matrix, plus the dimension
  counts and closed-form bounds that go with it;
- h-chains: the nested splitting h_k = x_{c..c} h_{k+1} + r_{k+1} of a
  multilinear polynomial, orbit-vanishing checks, and the explicit
  decomposition of a tensor on which the orbit of some h_k vanishes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import structlog

from .config import DEFAULT_EXACT_BIT_BUDGET, DEFAULT_ORBIT_BUDGET, DEFAULT_SIZE_CAP, LOG_PRECISION_BITS
from .errors import (
    BadCharacteristic,
    BudgetExceeded,
    ChainEvaluationZero,
    HypothesisViolated,
    NotWeightHomogeneous,
    SizeCapExceeded,
    WeightTooLow,
)
from .exact_algebra import RATIONALS, ExactMatrix, Field, kernel_basis
from .polynomials import Monomial, Poly, Var, monomials_of_degree
from .rank_engine import PartitionDecomposition, PartitionTerm
from .subspaces import weak_compositions
from .tensor_core import AxisSplit, Tensor, all_splits, apply_index_permutations

logger = structlog.get_logger(__name__)

MODES = ("tight", "full")

# ---------------------------------------------------------------------------
# Weights, polarization and multilinearization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightVector:
    alphas: Tuple[Tuple[int, ...], ...]

    def is_multilinear(self) -> bool:
        return all(a in (0, 1) for alpha in self.alphas for a in alpha)

    def first_excess(self) -> Optional[Tuple[int, int]]:
        """First (axis, index) whose weight is at least 2."""
        for axis, alpha in enumerate(self.alphas):
            for j, a in enumerate(alpha):
                if a >= 2:
                    return axis, j
        return None

    def to_json(self) -> List[List[int]]:
        return [list(alpha) for alpha in self.alphas]


def _monomial_weight(mono: Monomial, shape: Sequence[int]) -> WeightVector:
    counts = [[0] * n for n in shape]
    for v in mono:
        for axis, i in enumerate(v):
            counts[axis][i] += 1
    return WeightVector(tuple(tuple(c) for c in counts))


def weight_of(f: Poly) -> WeightVector:
    """The common per-axis index multiset of every monomial of f."""
    if f.kind != "tensor":
        raise ValueError("weights are defined for polynomials in tensor entries")
    if f.is_zero():
        return WeightVector(tuple((0,) * n for n in f.shape))
    first_mono = f.terms[0][0]
    weight = _monomial_weight(first_mono, f.shape)
    for mono, _ in f.terms[1:]:
        if _monomial_weight(mono, f.shape) != weight:
            raise NotWeightHomogeneous(
                "Polynomial is not a weight vector",
                {"monomials": [[[i + 1 for i in v] for v in first_mono], [[i + 1 for i in v] for v in mono]]},
            )
    return weight


def weight_components(f: Poly) -> List[Tuple[WeightVector, Poly]]:
    """Split f into weight vectors, ordered by weight."""
    groups: Dict[WeightVector, List] = {}
    for mono, coef in f.terms:
        groups.setdefault(_monomial_weight(mono, f.shape), []).append((mono, coef))
    return [
        (w, Poly.build(f.field, f.kind, f.shape, groups[w], f.degree))
        for w in sorted(groups, key=lambda w: w.alphas, reverse=True)
    ]


def polarize(f: Poly, axis: int, j: int) -> Poly:
    """
    Apply the derivation sending one occurrence of index j on ``axis`` to the
    fresh index shape[axis], summed over occurrences, then normalize the
    coefficients.
    """
    weight = weight_of(f)
    if weight.alphas[axis][j] < 2:
        raise WeightTooLow(
            f"Weight at axis {axis + 1}, index {j + 1} is {weight.alphas[axis][j]}; polarization needs at least 2",
            {"axis": axis + 1, "index": j + 1},
        )
    fresh = f.shape[axis]
    shape = tuple(n + 1 if a == axis else n for a, n in enumerate(f.shape))
    terms = []
    for mono, coef in f.terms:
        for pos, v in enumerate(mono):
            if v[axis] == j:
                moved = v[:axis] + (fresh,) + v[axis + 1 :]
                terms.append((mono[:pos] + (moved,) + mono[pos + 1 :], coef))
    result = Poly.build(f.field, "tensor", shape, terms, f.degree)
    if result.is_zero():
        raise BadCharacteristic(f"Polarization vanished over {f.field}", {"axis": axis + 1, "index": j + 1})
    return result.primitive()


def multilinearize(f: Poly) -> Poly:
    """Polarize until every weight entry is 0 or 1, then drop unused indices."""
    if f.is_zero():
        raise ValueError("cannot multilinearize the zero polynomial")
    g = f
    weight = weight_of(g)
    steps = 0
    while (excess := weight.first_excess()) is not None:
        g = polarize(g, *excess)
        weight = weight_of(g)
        steps += 1
    keep = [[i for i, a in enumerate(alpha) if a == 1] for alpha in weight.alphas]
    m = g.degree
    assert all(len(k) == m for k in keep), "multilinear weight must use m indices on every axis"
    relabel = [{old: new for new, old in enumerate(k)} for k in keep]
    g = g.rename(lambda v: tuple(relabel[a][i] for a, i in enumerate(v)), shape=(m,) * len(f.shape))
    assert not g.is_zero()
    logger.debug("multilinearized", degree=m, polarizations=steps, terms=len(g))
    return g.primitive()


def multilinearize_components(f: Poly) -> List[Poly]:
    return [multilinearize(component) for _, component in weight_components(f)]


# ---------------------------------------------------------------------------
# Parametrization, pullback matrix and vanishing polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BudgetVector:
    """Term counts per axis subset I (0-based axes). The A factor lives on I."""

    order: int
    counts: Tuple[Tuple[Tuple[int, ...], int], ...]
    mode: str

    @property
    def total(self) -> int:
        return sum(b for _, b in self.counts)

    def to_json(self) -> dict:
        return {"mode": self.mode, "counts": [{"I": [a + 1 for a in axes], "b": b} for axes, b in self.counts]}


def full_budget(d: int, r: int) -> BudgetVector:
    """r terms on every nonempty proper subset of the axes."""
    subsets = [
        axes for k in range(1, d) for axes in itertools.combinations(range(d), k)
    ]
    return BudgetVector(d, tuple((axes, r) for axes in subsets if r > 0), "full")


def tight_budgets(d: int, r: int) -> List[BudgetVector]:
    """One budget per distribution of exactly r terms over the canonical splits."""
    splits = all_splits(d)
    budgets = []
    for composition in weak_compositions(r, len(splits)):
        counts = tuple((s.axes, b) for s, b in zip(splits, composition) if b > 0)
        budgets.append(BudgetVector(d, counts, "tight"))
    return budgets


def parametrization_entry(v: Var, budget: BudgetVector, field: Field) -> Poly:
    """The image of the tensor entry x_v: sum over terms of A[v_I] B[v_{I^c}]."""
    terms = []
    for s, (axes, b) in enumerate(budget.counts):
        complement = tuple(a for a in range(budget.order) if a not in axes)
        for j in range(b):
            a_var = (s, j, 0) + tuple(v[a] for a in axes)
            b_var = (s, j, 1) + tuple(v[a] for a in complement)
            terms.append(((a_var, b_var), 1))
    return Poly.build(field, "param", (), terms, 2)


def compose_with_parametrization(f: Poly, budget: BudgetVector) -> Poly:
    """f ∘ φ as a polynomial in the parameter variables."""
    return f.compose(lambda v: parametrization_entry(v, budget, f.field), "param")


def vanishes_on_parametrization(f: Poly, budget: BudgetVector) -> bool:
    return compose_with_parametrization(f, budget).is_zero()


@dataclass
class PullbackMatrix:
    matrix: ExactMatrix
    columns: List[Monomial]
    rows: List[Monomial]


def _tensor_variables(d: int, n: int) -> List[Var]:
    return list(itertools.product(range(n), repeat=d))


def pullback_system(
    d: int, n: int, m: int, field: Field, budget: BudgetVector, size_cap: Optional[int] = None
) -> PullbackMatrix:
    size_cap = size_cap or DEFAULT_SIZE_CAP
    columns = monomials_of_degree(_tensor_variables(d, n), m)
    work = len(columns) * max(1, budget.total) ** m
    if work > size_cap:
        raise SizeCapExceeded(
            f"Pullback assembly needs about {work} monomial products (cap {size_cap})",
            {"columns": len(columns), "cap": size_cap},
        )
    images = {}
    entry_cache: Dict[Var, Poly] = {}

    def entry(v: Var) -> Poly:
        if v not in entry_cache:
            entry_cache[v] = parametrization_entry(v, budget, field)
        return entry_cache[v]

    for mono in columns:
        f = Poly.build(field, "tensor", (n,) * d, {mono: 1}, m)
        images[mono] = f.compose(entry, "param")
    rows = sorted({pm for image in images.values() for pm, _ in image.terms})
    if len(rows) * len(columns) > size_cap:
        raise SizeCapExceeded(
            f"Pullback matrix would have {len(rows)}x{len(columns)} cells (cap {size_cap})",
            {"rows": len(rows), "columns": len(columns), "cap": size_cap},
        )
    row_index = {pm: i for i, pm in enumerate(rows)}
    data = field.zeros((len(rows), len(columns)))
    for c, mono in enumerate(columns):
        for pm, coef in images[mono].terms:
            data[row_index[pm], c] = coef
    logger.debug("pullback_matrix", rows=len(rows), columns=len(columns), budget=budget.to_json())
    return PullbackMatrix(ExactMatrix(field, data), columns, rows)


def build_pullback_matrix(
    d: int, n: int, r: int, m: int, field: Field, budget: BudgetVector, size_cap: Optional[int] = None
) -> ExactMatrix:
    """Column c holds the coefficients of (monomial_c) ∘ φ for the parametrization ``budget``."""
    if budget.mode == "full" and budget.counts and any(b != r for _, b in budget.counts):
        raise ValueError("full-mode budgets put r terms on every subset")
    return pullback_system(d, n, m, field, budget, size_cap).matrix


def budgets_for(d: int, r: int, mode: str) -> List[BudgetVector]:
    if mode == "tight":
        return tight_budgets(d, r)
    if mode == "full":
        return [full_budget(d, r)]
    raise ValueError(f"Unknown mode '{mode}' (expected one of {MODES})")


def vanishing_space(
    d: int, n: int, r: int, m: int, field: Field = RATIONALS, mode: str = "tight", size_cap: Optional[int] = None
) -> List[Poly]:
    """Basis of the degree-m polynomials vanishing on the chosen parametrization(s)."""
    systems = [pullback_system(d, n, m, field, b, size_cap) for b in budgets_for(d, r, mode)]
    columns = systems[0].columns
    stacked = np.concatenate([s.matrix.data for s in systems], axis=0)
    basis = kernel_basis(ExactMatrix(field, stacked))
    polys = [Poly.build(field, "tensor", (n,) * d, zip(columns, vec), m).primitive() for vec in basis]
    logger.info("vanishing_space", d=d, n=n, r=r, m=m, mode=mode, kernel_dim=len(polys), rows=stacked.shape[0])
    return polys


def find_vanishing_poly(
    d: int, n: int, r: int, m: int, field: Field = RATIONALS, mode: str = "tight", size_cap: Optional[int] = None
) -> Optional[Poly]:
    """The first canonical kernel element, or None when only 0 vanishes."""
    polys = vanishing_space(d, n, r, m, field, mode, size_cap)
    return polys[0] if polys else None


# ---------------------------------------------------------------------------
# Counting and closed-form bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimFormulas:
    S: int
    dimP2m: int
    dimPm: int


def parameter_count(d: int, n: int, r: int) -> int:
    return sum(r * (n**k + n ** (d - k)) * math.comb(d, k) for k in range(1, d))


def dim_formulas(d: int, n: int, r: int, m: int) -> DimFormulas:
    S = parameter_count(d, n, r)
    dimP2m = 1 if S == 0 else math.comb(2 * m + S - 1, 2 * m)
    dimPm = math.comb(m + n**d - 1, m)
    return DimFormulas(S, dimP2m, dimPm)


def _log_factorial(k: int) -> "mpmath.iv.mpf":
    """Enclosure of ln k! from Stirling's series with Robbins' error bounds."""
    iv = mpmath.iv
    if k < 2:
        return iv.mpf(0)
    n = iv.mpf(k)
    base = n * iv.log(n) - n + iv.log(2 * iv.pi * n) / 2
    low = base + iv.mpf(1) / (12 * k + 1)
    high = base + iv.mpf(1) / (12 * k)
    return iv.mpf([low.a, high.b])


def _log_binomial(top: int, bottom: int) -> "mpmath.iv.mpf":
    return _log_factorial(top) - _log_factorial(bottom) - _log_factorial(top - bottom)


def _endpoints(x) -> Tuple[mpmath.mpf, mpmath.mpf]:
    low, high = x._mpi_
    return mpmath.mp.make_mpf(low), mpmath.mp.make_mpf(high)


@dataclass
class CountingReport:
    d: int
    r: int
    n: int
    m: int
    S: int
    holds: bool
    method: str
    log_dimP2m: str
    log_dimPm: str

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "n": self.n,
            "m": str(self.m),
            "S": self.S,
            "holds": self.holds,
            "method": self.method,
            "log_dimP2m": self.log_dimP2m,
            "log_dimPm": self.log_dimPm,
        }


def check_counting_inequality(
    d: int, r: int, m: Optional[int] = None, n: Optional[int] = None, bit_budget: Optional[int] = None
) -> CountingReport:
    """
    Check dim P_{2m}(parameters) < dim P_m(tensor entries), which forces a
    nonzero kernel. Defaults: n = 2^{d+3} r and m = n^{2d}.
    """
    n = n if n is not None else 2 ** (d + 3) * r
    m = m if m is not None else n ** (2 * d)
    bit_budget = bit_budget or DEFAULT_EXACT_BIT_BUDGET
    S = parameter_count(d, n, r)
    N = n**d
    iv = mpmath.iv
    saved = iv.prec
    iv.prec = LOG_PRECISION_BITS
    try:
        lhs_low, lhs_high = _endpoints(iv.mpf(0) if S == 0 else _log_binomial(2 * m + S - 1, S - 1))
        rhs_low, rhs_high = _endpoints(_log_binomial(m + N - 1, N - 1))
    finally:
        iv.prec = saved
    with mpmath.workprec(LOG_PRECISION_BITS):
        bits = int(max(lhs_high, rhs_high) / mpmath.log(2)) + 1
        if bits <= bit_budget:
            dims = dim_formulas(d, n, r, m)
            holds = dims.dimP2m < dims.dimPm
            method = "exact"
        elif lhs_high < rhs_low:
            holds, method = True, "log-factorial"
        elif lhs_low >= rhs_high:
            holds, method = False, "log-factorial"
        else:
            raise BudgetExceeded(
                "Log-factorial enclosures overlap; raise the exact bit budget",
                {"bits": bits, "bit_budget": bit_budget},
            )
        report = CountingReport(
            d, r, n, m, S, holds, method,
            mpmath.nstr((lhs_low + lhs_high) / 2, 20),
            mpmath.nstr((rhs_low + rhs_high) / 2, 20),
        )
    logger.info("counting_inequality", d=d, r=r, n=n, holds=report.holds, method=report.method)
    return report


def bound_formula(d: int, m: int, k: int) -> int:
    """d L + sum_{s=1}^{floor(d/2)} C(d, s) L^{d-s} with L = m - k - 1."""
    if not 0 <= k <= m - 1:
        raise ValueError(f"k={k} outside [0, {m - 1}]")
    L = m - k - 1
    return d * L + sum(math.comb(d, s) * L ** (d - s) for s in range(1, d // 2 + 1))


def fd_gd(d: int, r: int) -> Tuple[int, int]:
    """Subtensor size F and partition-rank bound G for order d and rank r."""
    base = 2 ** (d + 3) * r
    return base ** (2 * d), base ** (2 * d * d)


# ---------------------------------------------------------------------------
# h-chains
# ---------------------------------------------------------------------------

Injection = Tuple[Tuple[int, ...], ...]


def _transposition(n: int, a: int, b: int) -> Tuple[int, ...]:
    perm = list(range(n))
    perm[a], perm[b] = perm[b], perm[a]
    return tuple(perm)


def _rename_by(perms: Sequence[Sequence[int]]):
    return lambda v: tuple(perms[a][i] for a, i in enumerate(v))


@dataclass
class HChain:
    """
    h[k] = x_{c,...,c} h[k+1] + r[k] with c = m - 1 - k (0-based), all in
    the coordinates reached after every recorded permutation.
    """

    m: int
    order: int
    field: Field
    h: List[Poly]
    r: List[Poly]
    permutations: List[Tuple[Tuple[int, ...], ...]] = dc_field(default_factory=list)
    cumulative: Tuple[Tuple[int, ...], ...] = ()

    def diagonal(self, k: int) -> Var:
        return (self.m - 1 - k,) * self.order

    def verify(self) -> bool:
        for k in range(self.m):
            x = Poly.variable(self.field, "tensor", self.h[k].shape, self.diagonal(k))
            if self.h[k + 1].is_zero() or x * self.h[k + 1] + self.r[k] != self.h[k]:
                return False
            if any(self.diagonal(k) in mono for mono, _ in self.r[k].terms):
                return False
        return self.h[self.m].is_constant() and not self.h[self.m].is_zero() and self.r[self.m - 1].is_zero()

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "order": self.order,
            "field": self.field.to_json(),
            "h": [p.to_json() for p in self.h],
            "r": [p.to_json() for p in self.r],
            "permutations": [[[i + 1 for i in perm] for perm in level] for level in self.permutations],
            "cumulative": [[i + 1 for i in perm] for perm in self.cumulative],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HChain":
        def perm(values) -> Tuple[int, ...]:
            return tuple(int(i) - 1 for i in values)

        return cls(
            m=int(doc["m"]),
            order=int(doc["order"]),
            field=Field.from_json(doc["field"]),
            h=[Poly.from_json(p) for p in doc["h"]],
            r=[Poly.from_json(p) for p in doc["r"]],
            permutations=[tuple(perm(p) for p in level) for level in doc.get("permutations", [])],
            cumulative=tuple(perm(p) for p in doc.get("cumulative", [])),
        )


def extract_hchain(f: Poly) -> HChain:
    """Split a multilinear weight-(1^m, ..., 1^m) polynomial level by level."""
    weight = weight_of(f)
    m, d = f.degree, len(f.shape)
    if f.is_zero() or any(alpha != (1,) * m for alpha in weight.alphas):
        raise ValueError("h-chains need a nonzero multilinear polynomial on m x ... x m entries")
    identity = tuple(range(m))
    cumulative = [list(identity) for _ in range(d)]
    hs: List[Poly] = [f]
    rs: List[Poly] = []
    levels = []
    current = f
    for k in range(m):
        c = m - 1 - k
        diag = (c,) * d
        if not any(diag in mono for mono, _ in current.terms):
            v = max(current.terms[0][0])
            perms = tuple(_transposition(m, v[a], c) for a in range(d))
            rename = _rename_by(perms)
            hs = [p.rename(rename) for p in hs]
            rs = [p.rename(rename) for p in rs]
            current = current.rename(rename)
            cumulative = [[perms[a][i] for i in cumulative[a]] for a in range(d)]
        else:
            perms = tuple(identity for _ in range(d))
        levels.append(perms)
        h_next, rest = current.split_on(diag)
        assert not h_next.is_zero()
        rs.append(rest)
        hs.append(h_next)
        current = h_next
    chain = HChain(m, d, f.field, hs, rs, levels, tuple(tuple(p) for p in cumulative))
    assert chain.verify(), "extracted chain does not satisfy its level relations"
    logger.debug("hchain_extracted", m=m, order=d, permuted_levels=sum(1 for lv in levels if any(p != identity for p in lv)))
    return chain


@dataclass
class OrbitResult:
    vanishes: bool
    witness: Optional[Injection]
    checked: int
    heuristic: bool = False

    def to_json(self) -> dict:
        return {
            "vanishes": self.vanishes,
            "witness": None if self.witness is None else [[i + 1 for i in inj] for inj in self.witness],
            "checked": self.checked,
            "heuristic": self.heuristic,
        }


def _index_size(h: Poly) -> int:
    used = [i for v in h.variables() for i in v]
    return max(used) + 1 if used else 0


def orbit_vanishes(
    h: Poly,
    T: Tensor,
    orbit_budget: Optional[int] = None,
    sample: Optional[int] = None,
    seed: int = 0,
) -> OrbitResult:
    """
    Evaluate h at every injective placement of its indices into T's index
    ranges (axis by axis). With ``sample`` only that many seeded random
    placements are tried and the answer is marked heuristic.
    """
    size = _index_size(h)
    if any(size > n for n in T.dims):
        raise ValueError(f"polynomial uses {size} indices per axis but T has dims {T.dims}")
    poly = h if h.field == T.field else h.to_field(T.field)
    data = T.data

    def value(inj: Injection):
        return poly.evaluate(lambda v: data.item(tuple(inj[a][i] for a, i in enumerate(v))), T.field)

    if sample is not None:
        rng = np.random.default_rng(seed)
        for checked in range(1, sample + 1):
            inj = tuple(tuple(int(i) for i in rng.permutation(n)[:size]) for n in T.dims)
            if value(inj) != 0:
                return OrbitResult(False, inj, checked, heuristic=True)
        return OrbitResult(True, None, sample, heuristic=True)

    orbit_budget = orbit_budget or DEFAULT_ORBIT_BUDGET
    total = math.prod(math.perm(n, size) for n in T.dims)
    if total > orbit_budget:
        raise BudgetExceeded(
            f"Orbit has {total} placements (budget {orbit_budget})", {"placements": total, "budget": orbit_budget}
        )
    checked = 0
    for inj in itertools.product(*(itertools.permutations(range(n), size) for n in T.dims)):
        checked += 1
        if value(inj) != 0:
            return OrbitResult(False, inj, checked)
    return OrbitResult(True, None, checked)


@dataclass
class FindKResult:
    k: int
    witness: Injection


def find_k(T: Tensor, chain: HChain, orbit_budget: Optional[int] = None) -> FindKResult:
    """Largest k whose h_k orbit vanishes at T, with a nonvanishing placement of h_{k+1}."""
    if not orbit_vanishes(chain.h[0], T, orbit_budget).vanishes:
        raise HypothesisViolated("The orbit of h_0 does not vanish at T", {"dims": list(T.dims)})
    witness: Injection = tuple(() for _ in T.dims)
    for k in range(chain.m - 1, -1, -1):
        result = orbit_vanishes(chain.h[k], T, orbit_budget)
        if result.vanishes:
            logger.debug("find_k", k=k, m=chain.m)
            return FindKResult(k, witness)
        witness = result.witness
    raise AssertionError("the orbit of h_0 vanishes, so some level must vanish")


@dataclass
class ChainDecomposition:
    decomposition: PartitionDecomposition
    k: int
    bound: int
    witness: Injection

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "bound": self.bound,
            "length": len(self.decomposition),
            "witness": [[i + 1 for i in inj] for inj in self.witness],
            "decomposition": self.decomposition.to_json(),
        }


def _term(order: int, axes: Tuple[int, ...], first: Tensor, second: Tensor) -> PartitionTerm:
    """Term with ``first`` on ``axes`` and ``second`` on the other axes."""
    split = AxisSplit(order, axes)
    if split.axes == tuple(sorted(axes)):
        return PartitionTerm.normalized(split, first, second)
    return PartitionTerm.normalized(split, second, first)


def _extend_permutation(n: int, low: Sequence[int]) -> Tuple[int, ...]:
    rest = [i for i in range(n) if i not in set(low)]
    return tuple(low) + tuple(rest)


def decompose_via_chain(
    T: Tensor, chain: HChain, orbit_budget: Optional[int] = None
) -> ChainDecomposition:
    """
    Explicit decomposition of T when the orbit of h_0 vanishes at T.

    With L = m - k - 1 and T relabelled so that h_{k+1} is nonzero on the
    first L indices of every axis, each entry t_u with all u_i >= L equals
    -r_{k+1}/h_{k+1} evaluated at the placement sending index L to u. Terms
    of r_{k+1} grouped by their smallest high factor give the block outside
    the low indices; the entries with some low index are covered by slices.
    """
    field, d = T.field, T.order
    if T.is_zero():
        return ChainDecomposition(PartitionDecomposition(T.dims, field), chain.m - 1, 0, tuple(() for _ in T.dims))
    if chain.field != field:
        chain = extract_hchain(chain.h[0].to_field(field))
    found = find_k(T, chain, orbit_budget)
    k, L = found.k, chain.m - found.k - 1
    perms = [_extend_permutation(n, found.witness[a]) for a, n in enumerate(T.dims)]
    # T'(x) = T(π x)
    relabelled = T.data[np.ix_(*(np.asarray(p, dtype=np.intp) for p in perms))]

    h_value = chain.h[k + 1].evaluate(lambda v: relabelled.item(v), field)
    if h_value == 0:
        raise ChainEvaluationZero("h_{k+1} vanishes at the chosen placement", {"k": k})
    scale = field.neg(field.inv(h_value))

    high_mask = [np.arange(n) >= L for n in T.dims]

    def high_factor(v: Var, axes: Tuple[int, ...]) -> np.ndarray:
        index = tuple(slice(None) if a in axes else v[a] for a in range(d))
        block = relabelled[index].copy()
        for pos, a in enumerate(axes):
            shape = [1] * len(axes)
            shape[pos] = T.dims[a]
            block = np.where(high_mask[a].reshape(shape), block, 0)
        return block.astype(relabelled.dtype) if field.is_finite else block

    groups: Dict[Tuple, Tuple[Tuple[int, ...], np.ndarray, np.ndarray]] = {}
    for mono, coef in chain.r[k].terms:
        coefficient = field.mul(scale, coef)
        highs = []
        for v in mono:
            axes = tuple(a for a in range(d) if v[a] == L)
            if axes:
                highs.append((axes, v))
            else:
                coefficient = field.mul(coefficient, relabelled.item(v))
        if coefficient == 0:
            continue
        highs.sort(key=lambda av: (len(av[0]), av[0]))
        (chosen_axes, chosen_var), others = highs[0], highs[1:]
        rest_axes = tuple(a for a in range(d) if a not in chosen_axes)
        key = (chosen_axes, tuple(chosen_var[a] for a in rest_axes))
        product = None
        layout: Tuple[int, ...] = ()
        for axes, v in others:
            block = high_factor(v, axes)
            product = block if product is None else np.multiply.outer(product, block)
            layout += axes
        product = field.reduce(product.transpose(np.argsort(layout)) * coefficient)
        if key in groups:
            axes, F, G = groups[key]
            groups[key] = (axes, F, field.reduce(G + product))
        else:
            groups[key] = (chosen_axes, high_factor(chosen_var, chosen_axes), product)

    def to_original(block: np.ndarray, axes: Sequence[int]) -> Tensor:
        # factor on T coordinates: value at π(x) equals value at x
        return apply_index_permutations(Tensor(field, np.ascontiguousarray(block)), [perms[a] for a in axes])

    terms: List[PartitionTerm] = []
    for key in sorted(groups):
        axes, F, G = groups[key]
        if not np.any(F != 0) or not np.any(G != 0):
            continue
        rest_axes = tuple(a for a in range(d) if a not in axes)
        terms.append(_term(d, axes, to_original(F, axes), to_original(G, rest_axes)))

    covered = np.zeros(T.dims, dtype=bool)
    for a in range(d):
        others = tuple(b for b in range(d) if b != a)
        for low in range(L):
            index = tuple(low if b == a else slice(None) for b in range(d))
            block = np.where(covered[index], 0, relabelled[index])
            covered[index] = True
            if field.is_finite:
                block = block.astype(relabelled.dtype)
            if not np.any(block != 0):
                continue
            e = field.zeros((T.dims[a],))
            e[low] = field.one
            terms.append(_term(d, (a,), to_original(e, (a,)), to_original(block, others)))

    decomposition = PartitionDecomposition(T.dims, field, tuple(terms)).canonical()
    bound = bound_formula(d, chain.m, k)
    assert decomposition.evaluate() == T, "chain decomposition does not reproduce T"
    assert len(decomposition) <= bound, f"decomposition of length {len(decomposition)} exceeds bound {bound}"
    logger.info("chain_decomposition", k=k, length=len(decomposition), bound=bound, dims=list(T.dims))
    return ChainDecomposition(decomposition, k, bound, found.witness)
