"""
Sparse homogeneous polynomials with exact coefficients.

A variable is a tuple of 0-based integers: (i_1, ..., i_d) for tensor
entries, (i,) for points, and free-form tuples for parameters. A monomial
is the ascending tuple of its variables with repetition, so x_1^2 x_2 is
((0,), (0,), (1,)). Sorting monomials of equal degree ascending gives the
graded lexicographic order, largest monomial first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from .errors import ParseError
from .exact_algebra import RATIONALS, Field, Scalar
from .tensor_core import Tensor

logger = structlog.get_logger(__name__)

Var = Tuple[int, ...]
Monomial = Tuple[Var, ...]

KINDS = ("tensor", "point", "param")


def monomial(*variables: Var) -> Monomial:
    return tuple(sorted(variables))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b))


def mono_key(m: Monomial):
    return (-len(m), m)


def mono_powers(m: Monomial) -> List[Tuple[Var, int]]:
    return [(v, len(list(group))) for v, group in itertools.groupby(m)]


def monomials_of_degree(variables: Sequence[Var], degree: int) -> List[Monomial]:
    """All degree-``degree`` monomials in ``variables``, graded lex descending."""
    ordered = sorted(variables)
    return [tuple(c) for c in itertools.combinations_with_replacement(ordered, degree)]


@dataclass(frozen=True, eq=False)
class Poly:
    field: Field
    kind: str
    shape: Tuple[int, ...]
    degree: int
    terms: Tuple[Tuple[Monomial, Scalar], ...]

    @classmethod
    def build(
        cls,
        field: Field,
        kind: str,
        shape: Sequence[int],
        terms: Union[Mapping[Monomial, Scalar], Iterable[Tuple[Monomial, Scalar]]],
        degree: Optional[int] = None,
    ) -> "Poly":
        """Normalize monomials, merge duplicates, drop zeros and check homogeneity."""
        if kind not in KINDS:
            raise ParseError(f"Unknown variable kind '{kind}'")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: Dict[Monomial, Scalar] = {}
        for mono, coef in items:
            mono = tuple(sorted(tuple(v) for v in mono))
            merged[mono] = field.add(merged.get(mono, field.zero), field.element(coef))
        kept = sorted(((m, c) for m, c in merged.items() if c != 0), key=lambda mc: mono_key(mc[0]))
        degrees = {len(m) for m, _ in kept}
        if len(degrees) > 1:
            raise ValueError(f"polynomial is not homogeneous: degrees {sorted(degrees)}")
        if degrees:
            found = degrees.pop()
            if degree is not None and degree != found:
                raise ValueError(f"declared degree {degree} but terms have degree {found}")
            degree = found
        return cls(field, kind, tuple(shape), degree or 0, tuple(kept))

    @classmethod
    def zero(cls, field: Field, kind: str, shape: Sequence[int], degree: int = 0) -> "Poly":
        return cls(field, kind, tuple(shape), degree, ())

    @classmethod
    def constant(cls, field: Field, kind: str, shape: Sequence[int], value: Scalar = 1) -> "Poly":
        return cls.build(field, kind, shape, {(): value}, 0)

    @classmethod
    def variable(cls, field: Field, kind: str, shape: Sequence[int], var: Var) -> "Poly":
        return cls.build(field, kind, shape, {(tuple(var),): 1}, 1)

    @cached_property
    def coefficients(self) -> Dict[Monomial, Scalar]:
        return dict(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Scalar]]:
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return self.degree == 0

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.coefficients.get(tuple(sorted(mono)), self.field.zero)

    def variables(self) -> List[Var]:
        return sorted({v for m, _ in self.terms for v in m})

    def leading(self) -> Tuple[Monomial, Scalar]:
        return self.terms[0]

    def _like(self, terms, degree: Optional[int] = None) -> "Poly":
        return Poly.build(self.field, self.kind, self.shape, terms, self.degree if degree is None else degree)

    def _check(self, other: "Poly"):
        if self.field != other.field or self.kind != other.kind:
            raise ValueError(f"incompatible polynomials ({self.field}/{self.kind} vs {other.field}/{other.kind})")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"cannot add degree {self.degree} and degree {other.degree}")
        return self._like(list(self.terms) + list(other.terms))

    def __neg__(self) -> "Poly":
        return self._like([(m, self.field.neg(c)) for m, c in self.terms])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c: Scalar) -> "Poly":
        c = self.field.element(c)
        return self._like([(m, self.field.mul(c, v)) for m, v in self.terms])

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        field = self.field
        product: Dict[Monomial, Scalar] = {}
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                key = mono_mul(ma, mb)
                product[key] = field.add(product.get(key, field.zero), field.mul(ca, cb))
        return self._like(product, self.degree + other.degree)

    def __pow__(self, k: int) -> "Poly":
        result = Poly.constant(self.field, self.kind, self.shape, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.kind == other.kind and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, self.kind, self.terms))

    def evaluate(self, lookup: Callable[[Var], Scalar], field: Optional[Field] = None) -> Scalar:
        """Value with every variable v replaced by lookup(v), computed in ``field``."""
        field = field or self.field
        poly = self if field == self.field else self.to_field(field)
        total = field.zero
        for mono, coef in poly.terms:
            value = coef
            for v in mono:
                value = field.mul(value, lookup(v))
                if value == 0:
                    break
            total = field.add(total, value)
        return total

    def at_tensor(self, T: Tensor) -> Scalar:
        return self.evaluate(lambda v: T.data[v], T.field)

    def at_point(self, point: Sequence[Scalar], field: Optional[Field] = None) -> Scalar:
        return self.evaluate(lambda v: point[v[0]], field)

    def compose(
        self, substitution: Callable[[Var], "Poly"], kind: str, shape: Sequence[int] = ()
    ) -> "Poly":
        """Replace every variable by a polynomial; powers of each image are computed once."""
        field = self.field
        powers: Dict[Tuple[Var, int], Poly] = {}
        total: Dict[Monomial, Scalar] = {}
        degree = None
        for mono, coef in self.terms:
            product = Poly.constant(field, kind, shape, coef)
            for v, p in mono_powers(mono):
                if (v, p) not in powers:
                    powers[(v, p)] = substitution(v) ** p
                product = product * powers[(v, p)]
            if degree is None:
                degree = product.degree
            for m, c in product.terms:
                total[m] = field.add(total.get(m, field.zero), c)
        return Poly.build(field, kind, shape, total, degree)

    def rename(self, mapping: Callable[[Var], Var], kind: Optional[str] = None, shape: Optional[Sequence[int]] = None) -> "Poly":
        terms = [(tuple(mapping(v) for v in m), c) for m, c in self.terms]
        return Poly.build(
            self.field, kind or self.kind, self.shape if shape is None else shape, terms, self.degree
        )

    def split_on(self, var: Var) -> Tuple["Poly", "Poly"]:
        """(h, r) with self = var * h + r and var absent from r."""
        with_var, without = [], []
        for mono, coef in self.terms:
            if var in mono:
                rest = list(mono)
                rest.remove(var)
                with_var.append((tuple(rest), coef))
            else:
                without.append((mono, coef))
        h = self._like(with_var, self.degree - 1) if with_var else Poly.zero(self.field, self.kind, self.shape, self.degree - 1)
        r = self._like(without) if without else Poly.zero(self.field, self.kind, self.shape, self.degree)
        return h, r

    def to_field(self, field: Field) -> "Poly":
        """Reduce rational coefficients into another field (denominators must be invertible)."""
        return Poly.build(field, self.kind, self.shape, [(m, field.element(c)) for m, c in self.terms], self.degree)

    def primitive(self) -> "Poly":
        """
        Canonical scalar multiple: over the rationals, integer coefficients
        with gcd 1 and positive leading coefficient; over GF(p), monic.
        """
        if self.is_zero():
            return self
        if self.field.is_finite:
            return self.scale(self.field.inv(self.leading()[1]))
        coefs = [Fraction(c) for _, c in self.terms]
        lcm = math.lcm(*(c.denominator for c in coefs))
        ints = [int(c * lcm) for c in coefs]
        g = math.gcd(*ints)
        if ints[0] < 0:
            g = -g
        return self._like([(m, Fraction(v, g)) for (m, _), v in zip(self.terms, ints)])

    def integer_coefficients(self) -> List[int]:
        if not self.field.is_rational:
            raise ValueError("integer coefficients only exist over the rationals")
        out = []
        for _, c in self.terms:
            if Fraction(c).denominator != 1:
                raise ValueError("polynomial has non-integer coefficients")
            out.append(int(c))
        return out

    def to_json(self) -> dict:
        doc = {"vars": self.kind, "degree": self.degree, "field": self.field.to_json()}
        if self.kind == "tensor":
            doc["dims"] = list(self.shape)
        elif self.kind == "point":
            doc["n"] = self.shape[0] if self.shape else 0
        offset = 0 if self.kind == "param" else 1
        doc["terms"] = [
            {
                "exp": [[*(i + offset for i in v), p] for v, p in mono_powers(mono)],
                "coef": self.field.format(coef),
            }
            for mono, coef in self.terms
        ]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Poly":
        try:
            kind = doc["vars"]
            field = Field.from_json(doc.get("field", "rational"))
            if kind == "tensor":
                shape = tuple(int(n) for n in doc["dims"])
            elif kind == "point":
                shape = (int(doc["n"]),)
            else:
                shape = ()
            offset = 0 if kind == "param" else 1
            terms = []
            for term in doc["terms"]:
                mono: List[Var] = []
                for entry in term["exp"]:
                    *idx, power = (int(x) for x in entry)
                    mono.extend([tuple(i - offset for i in idx)] * power)
                terms.append((tuple(mono), field.parse(str(term["coef"]))))
            degree = int(doc["degree"]) if "degree" in doc else None
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Malformed polynomial document: {e}") from e
        try:
            poly = cls.build(field, kind, shape, terms, degree)
        except ValueError as e:
            raise ParseError(str(e)) from e
        poly.check_bounds()
        return poly

    def check_bounds(self):
        if self.kind == "param":
            return
        for v in self.variables():
            if len(v) != len(self.shape) or any(not 0 <= i < n for i, n in zip(v, self.shape)):
                raise ParseError(f"variable {[i + 1 for i in v]} outside shape {list(self.shape)}")

    def _format_var(self, v: Var) -> str:
        if self.kind == "param":
            return "p" + str(list(v))
        sep = "," if any(i >= 9 for i in v) else ""
        return "x_{" + sep.join(str(i + 1) for i in v) + "}"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for mono, coef in self.terms:
            body = "".join(self._format_var(v) + (f"^{p}" if p > 1 else "") for v, p in mono_powers(mono))
            text = self.field.format(coef)
            if body and text in ("1", "-1"):
                text = text[:-1]
            parts.append(text + body)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly<{self.field},{self.kind}{list(self.shape)}>({self})"


def determinant(m: int, field: Field = RATIONALS) -> Poly:
    """det of the m x m matrix of variables x_{ij}."""
    terms = []
    for perm in itertools.permutations(range(m)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        terms.append((tuple((i, perm[i]) for i in range(m)), -1 if inversions % 2 else 1))
    return Poly.build(field, "tensor", (m, m), terms, m)


def permanent(m: int, field: Field = RATIONALS) -> Poly:
    terms = [(tuple((i, perm[i]) for i in range(m)), 1) for perm in itertools.permutations(range(m))]
    return Poly.build(field, "tensor", (m, m), terms, m)


def minors_vanish(T: Tensor, size: int) -> bool:
    """True when every size x size minor of a matrix vanishes."""
    M = T.data
    rows, cols = M.shape
    det = determinant(size, T.field)
    for X in itertools.combinations(range(rows), size):
        for Y in itertools.combinations(range(cols), size):
            if det.evaluate(lambda v: M[X[v[0]], Y[v[1]]]) != 0:
                return False
    return True


def random_poly(field: Field, n: int, degree: int, seed: int, density: float = 0.5) -> Poly:
    """Seeded random form in n point variables."""
    rng = np.random.default_rng(seed)
    terms = []
    for mono in monomials_of_degree([(i,) for i in range(n)], degree):
        if rng.random() < density:
            terms.append((mono, int(rng.integers(1, field.char if field.is_finite else 10))))
    return Poly.build(field, "point", (n,), terms, degree)


def count_monomials(nvars: int, degree: int) -> int:
    return math.comb(nvars + degree - 1, degree)
