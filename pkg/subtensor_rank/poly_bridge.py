"""
Homogeneous polynomials versus symmetric tensors, and polynomial strength.

phi sends e_{i_1} ⊗ ... ⊗ e_{i_d} to x_{i_1} ... x_{i_d}; psi sends a
product of d variables to the sum of its d! ordered placements. The
strength of P is the least k with P = Q_1 R_1 + ... + Q_k R_k where every
factor has degree between 1 and deg P - 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from .config import DEFAULT_NODE_BUDGET
from .errors import BadCharacteristic, BudgetExceeded
from .exact_algebra import Field, in_span_mod_p
from .polynomials import Monomial, Poly, mono_powers, monomials_of_degree
from .rank_engine import LowerBound, PartitionDecomposition, PartitionTerm, prank, prank_at_most
from .subspaces import enumerate_subspaces, weak_compositions
from .tensor_core import AxisSplit, IndexSubsets, Tensor, subtensor

logger = structlog.get_logger(__name__)

Pair = Tuple[Poly, Poly]


def _check_characteristic(field: Field, d: int):
    if field.is_finite and field.char <= d:
        raise BadCharacteristic(
            f"Characteristic {field.char} must be 0 or exceed the degree {d}", {"char": field.char, "degree": d}
        )


def phi(T: Tensor) -> Poly:
    """The form sum_x T(x) x_{x_1} ... x_{x_d} of a cubical tensor (order 1 tensors give linear forms)."""
    n = T.dims[0]
    if any(k != n for k in T.dims):
        raise ValueError(f"phi needs a cubical tensor, got dims {T.dims}")
    terms = [(tuple((i,) for i in idx), val) for idx, val in T.entries()]
    return Poly.build(T.field, "point", (n,), terms, T.order)


def psi(P: Poly, order: Optional[int] = None) -> Tensor:
    """Symmetric tensor of P: each monomial spread over all its orderings with multiplicity ∏ α_v!."""
    d = P.degree if order is None else order
    if d < 1:
        raise ValueError("psi needs a form of positive degree")
    _check_characteristic(P.field, d)
    field = P.field
    n = P.shape[0]
    data = field.zeros((n,) * d)
    for mono, coef in P.terms:
        weight = field.element(math.prod(math.factorial(p) for _, p in mono_powers(mono)))
        value = field.mul(coef, weight)
        for placement in set(itertools.permutations(v[0] for v in mono)):
            data[placement] = field.add(data[placement], value)
    return Tensor(field, data)


def restrict(P: Poly, U: Sequence[int]) -> Poly:
    """Set every variable outside U to zero."""
    keep = set(U)
    return Poly.build(
        P.field, P.kind, P.shape, [(m, c) for m, c in P.terms if all(v[0] in keep for v in m)], P.degree
    )


def d_const(d: int) -> int:
    return math.comb(d, d // 2)


@dataclass
class StrengthCertificate:
    value: int
    witness: List[Pair]
    lower_bound: LowerBound
    nodes: int = 0

    def verify(self, P: Poly) -> bool:
        total = Poly.zero(P.field, P.kind, P.shape, P.degree)
        for Q, R in self.witness:
            if not (1 <= Q.degree <= P.degree - 1 and 1 <= R.degree <= P.degree - 1):
                return False
            total = total + Q * R
        return total == P and len(self.witness) <= self.value

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "lower_bound": self.lower_bound.value,
            "nodes": self.nodes,
            "witness": [{"Q": Q.to_json(), "R": R.to_json()} for Q, R in self.witness],
        }


@dataclass
class StrengthDecision:
    holds: Optional[bool]
    witness: Optional[List[Pair]] = None
    nodes: int = 0


def greedy_strength_witness(P: Poly) -> List[Pair]:
    """P = sum_i x_i R_i, grouping terms by their smallest variable."""
    groups: Dict[int, List] = {}
    for mono, coef in P.terms:
        groups.setdefault(mono[0][0], []).append((mono[1:], coef))
    pairs = []
    for i in sorted(groups):
        Q = Poly.variable(P.field, P.kind, P.shape, (i,))
        R = Poly.build(P.field, P.kind, P.shape, groups[i], P.degree - 1)
        pairs.append((Q, R))
    return pairs


class _StrengthSearch:
    def __init__(self, P: Poly, node_budget: Optional[int]):
        self.P = P
        self.field = P.field
        self.n = P.shape[0]
        self.d = P.degree
        self.node_budget = node_budget or DEFAULT_NODE_BUDGET
        self.nodes = 0
        self.variables = [(i,) for i in range(self.n)]
        self.target_monomials = monomials_of_degree(self.variables, self.d)
        self.target_index = {m: i for i, m in enumerate(self.target_monomials)}
        self.target = np.array([P.coefficient(m) for m in self.target_monomials], dtype=self.field.dtype)
        self.basis: Dict[int, List[Monomial]] = {
            e: monomials_of_degree(self.variables, e) for e in range(1, self.d)
        }

    def tick(self):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded(
                f"Strength search exceeded {self.node_budget} nodes", {"nodes": self.nodes, "budget": self.node_budget}
            )

    def form(self, e: int, coefficients) -> Poly:
        return Poly.build(self.field, "point", (self.n,), zip(self.basis[e], coefficients), e)

    def solve(self, chosen: Sequence[Tuple[int, np.ndarray]]) -> Optional[List[Pair]]:
        """Find cofactors R with sum Q_j R_j = P for the chosen low-degree spans."""
        columns = []
        layout = []
        for e, V in chosen:
            cofactor_basis = self.basis[self.d - e]
            for row in V:
                Q = self.form(e, row)
                for mono in cofactor_basis:
                    column = np.zeros(len(self.target_monomials), dtype=self.field.dtype)
                    for qm, qc in Q.terms:
                        column[self.target_index[tuple(sorted(qm + mono))]] = qc
                    columns.append(column)
                layout.append((e, Q))
        if not columns:
            return [] if self.P.is_zero() else None
        x = in_span_mod_p(np.stack(columns, axis=1), self.target, self.field.char)
        if x is None:
            return None
        pairs = []
        offset = 0
        for e, Q in layout:
            size = len(self.basis[self.d - e])
            R = self.form(self.d - e, x[offset : offset + size])
            offset += size
            if not R.is_zero():
                pairs.append((Q, R))
        return pairs

    def at_most(self, k: int) -> Optional[List[Pair]]:
        degrees = list(range(1, self.d // 2 + 1))
        for composition in weak_compositions(k, len(degrees)):
            active = [(e, b) for e, b in zip(degrees, composition) if b > 0]
            spaces = [list(enumerate_subspaces(self.field, len(self.basis[e]), b)) for e, b in active]
            for choice in itertools.product(*spaces):
                self.tick()
                found = self.solve(list(zip([e for e, _ in active], choice)))
                if found is not None:
                    return found
        return None


def strength_at_most(P: Poly, k: int, node_budget: Optional[int] = None) -> StrengthDecision:
    """Decide strength(P) <= k over a finite field of characteristic > deg P."""
    _check_characteristic(P.field, P.degree)
    if P.is_zero():
        return StrengthDecision(True, [], 0)
    if P.degree < 2:
        return StrengthDecision(False, None, 0)
    upper = greedy_strength_witness(P)
    if k >= len(upper):
        return StrengthDecision(True, upper, 0)
    if P.field.is_rational:
        return StrengthDecision(None, None, 0)
    search = _StrengthSearch(P, node_budget)
    found = search.at_most(k)
    logger.debug("strength_decision", k=k, holds=found is not None, nodes=search.nodes)
    return StrengthDecision(found is not None, found, search.nodes)


def strength(P: Poly, node_budget: Optional[int] = None) -> StrengthCertificate:
    """Strength by iterative deepening below the greedy bound."""
    _check_characteristic(P.field, P.degree)
    if P.is_zero():
        return StrengthCertificate(0, [], LowerBound.EXHAUSTIVE)
    if P.degree < 2:
        raise ValueError("strength is only defined for degree at least 2")
    upper = greedy_strength_witness(P)
    if P.field.is_rational:
        return StrengthCertificate(len(upper), upper, LowerBound.NONE)
    search = _StrengthSearch(P, node_budget)
    for k in range(1, len(upper)):
        found = search.at_most(k)
        if found is not None:
            logger.info("strength_certified", value=len(found), nodes=search.nodes)
            return StrengthCertificate(len(found), found, LowerBound.EXHAUSTIVE, search.nodes)
    logger.info("strength_certified", value=len(upper), nodes=search.nodes)
    return StrengthCertificate(len(upper), upper, LowerBound.EXHAUSTIVE, search.nodes)


def strength_witness_from_partition(decomposition: PartitionDecomposition) -> List[Pair]:
    """phi applied term by term: A ⊗ B becomes phi(A) phi(B)."""
    return [(phi(term.A), phi(term.B)) for term in decomposition.terms]


def partition_witness_from_strength(pairs: Sequence[Pair], n: int, d: int, field: Field) -> PartitionDecomposition:
    """psi(Q R) = sum over e-subsets S of positions of psi(Q) on S ⊗ psi(R) off S."""
    _check_characteristic(field, d)
    terms: List[PartitionTerm] = []
    for Q, R in pairs:
        A_sym, B_sym = psi(Q), psi(R)
        if A_sym.is_zero() or B_sym.is_zero():
            continue
        for positions in itertools.combinations(range(d), Q.degree):
            split = AxisSplit(d, positions)
            if split.axes == positions:
                terms.append(PartitionTerm.normalized(split, A_sym, B_sym))
            else:
                terms.append(PartitionTerm.normalized(split, B_sym, A_sym))
    return PartitionDecomposition((n,) * d, field, tuple(terms))


def is_symmetric(T: Tensor) -> bool:
    return all(np.array_equal(T.data, T.data.transpose(p)) for p in itertools.permutations(range(T.order)))


@dataclass
class PipelineReport:
    """Each link of the restriction argument with status pass, fail or unknown."""

    degree: int
    n: int
    r: int
    D: int
    size_cap: int
    links: Dict[str, str] = dc_field(default_factory=dict)
    details: Dict[str, object] = dc_field(default_factory=dict)
    theorem_claimed: bool = False

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "n": self.n,
            "r": self.r,
            "D": self.D,
            "size_cap": self.size_cap,
            "links": dict(self.links),
            "details": dict(self.details),
            "theorem_claimed": self.theorem_claimed,
        }


def _status(ok: Optional[bool]) -> str:
    return "unknown" if ok is None else ("pass" if ok else "fail")


def _combine(statuses: Sequence[str]) -> str:
    if "fail" in statuses:
        return "fail"
    if "unknown" in statuses:
        return "unknown"
    return "pass"


def verify_restriction_pipeline(
    P: Poly, r: int, size_cap: int, node_budget: Optional[int] = None
) -> PipelineReport:
    """
    Walk the argument that bounded strength of every small restriction of P
    bounds the partition rank of every small cubical subtensor of psi(P).
    Only the desk-scale links are checked; the global statement is never claimed.
    """
    d, n = P.degree, P.shape[0]
    _check_characteristic(P.field, d)
    D = d_const(d)
    report = PipelineReport(d, n, r, D, size_cap)
    T = psi(P)
    report.links["symmetric_tensor"] = _status(is_symmetric(T))
    report.links["phi_psi_identity"] = _status(phi(T) == P.scale(math.factorial(d)))

    restricted, subtensors, compatible = [], [], []
    per_subset = []
    for size in range(1, min(size_cap, n) + 1):
        for U in itertools.combinations(range(n), size):
            P_U = restrict(P, U)
            try:
                s = strength_at_most(P_U, r, node_budget).holds if d >= 2 else None
            except BudgetExceeded:
                s = None
            T_U = subtensor(T, IndexSubsets.cube(U, d))
            relabel = {u: i for i, u in enumerate(U)}
            P_U_local = P_U.rename(lambda v: (relabel[v[0]],), shape=(size,))
            compatible.append(_status(phi(T_U) == P_U_local.scale(math.factorial(d))))
            try:
                p = prank_at_most(T_U, r * D, node_budget).holds
            except BudgetExceeded:
                p = None
            restricted.append(_status(s))
            subtensors.append(_status(p))
            per_subset.append({"U": [u + 1 for u in U], "strength_at_most_r": _status(s), "prank_at_most_rD": _status(p)})
    report.links["restricted_strength"] = _combine(restricted)
    report.links["restriction_compatibility"] = _combine(compatible)
    report.links["subtensor_prank"] = _combine(subtensors)
    report.details["subsets"] = per_subset

    try:
        s_cert = strength(P, node_budget)
        p_cert = prank(T, node_budget)
        transported = partition_witness_from_strength(s_cert.witness, n, d, P.field)
        report.details["strength"] = s_cert.value
        report.details["prank"] = p_cert.value
        report.details["strength_witness"] = s_cert.to_json()["witness"]
        report.details["transported"] = transported.to_json()
        report.links["witness_transport"] = _status(
            transported.evaluate() == T and len(transported) <= D * s_cert.value
        )
        exact = s_cert.lower_bound == LowerBound.EXHAUSTIVE and p_cert.lower_bound != LowerBound.NONE
        consistent = s_cert.value <= p_cert.value <= D * s_cert.value
        report.links["rank_sandwich"] = _status(consistent) if exact else "unknown"
    except BudgetExceeded as e:
        report.links["witness_transport"] = "unknown"
        report.links["rank_sandwich"] = "unknown"
        report.details["budget"] = e.details
    logger.info("restriction_pipeline", degree=d, n=n, r=r, links=report.links)
    return report
