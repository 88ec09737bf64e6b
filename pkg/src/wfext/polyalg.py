"""Exact polynomial and rational-function algebra on face charts.

A ``MultiPoly`` is a sparse map from exponent vectors (one exponent per
free chart variable) to ``Fraction`` coefficients. A ``RationalFn`` keeps
its denominator as a product of primitive linear forms, each positive on
the open face, so that singular loci and cancellations stay exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from wfext.errors import ArgumentError, EvaluationError, RangeError, RestrictionError
from wfext.simplex import MAX_N, Face, Projection, SimplexPoint

Coeff = Fraction
Exponent = tuple[int, ...]
Number = Union[int, float, Fraction]

DEFAULT_MAX_DEGREE = 16
# Products may reach twice a truncated degree (face integrals of f * phi) plus
# one degree per extension step; nothing built from truncated data goes higher.
MAX_CONSTRUCTION_DEGREE = 2 * (DEFAULT_MAX_DEGREE + MAX_N)

_TERM_SEPARATOR = " + "
_FACTOR_PATTERN = re.compile(r"^p(\d+)(?:\^(\d+))?$")


def _as_coeff(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    raise ArgumentError(f"Cannot use {value!r} as an exact coefficient.")


def _glex_key(exponent: Exponent) -> tuple:
    return (sum(exponent), exponent)


def _check_degree_cap(degree: int) -> None:
    if degree > MAX_CONSTRUCTION_DEGREE:
        raise RangeError(f"Product of degree {degree} exceeds the polynomial cap {MAX_CONSTRUCTION_DEGREE}.")


def _check_same_face(a: Face, b: Face) -> None:
    if a != b:
        raise ArgumentError(f"Chart mismatch: expression on face {a} combined with one on face {b}.")


class MultiPoly:
    """Sparse multivariate polynomial with exact coefficients on a face chart"""

    __slots__ = ("face", "_terms", "_hash")

    def __init__(self, face: Face, terms: Optional[Mapping[Sequence[int], Number]] = None):
        clean: dict[Exponent, Fraction] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(int(a) for a in exponent)
            if len(exponent) != face.dim or any(a < 0 for a in exponent):
                raise ArgumentError(
                    f"Exponent {list(exponent)} does not fit the {face.dim} free variables of face {face}."
                )
            value = clean.get(exponent, Fraction(0)) + _as_coeff(coeff)
            if value:
                clean[exponent] = value
            else:
                clean.pop(exponent, None)
        self.face = face
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, face: Face, terms: dict[Exponent, Fraction]) -> "MultiPoly":
        poly = cls.__new__(cls)
        poly.face = face
        poly._terms = terms
        poly._hash = None
        return poly

    # constructors

    @classmethod
    def zero(cls, face: Face) -> "MultiPoly":
        return cls._raw(face, {})

    @classmethod
    def constant(cls, face: Face, value: Number) -> "MultiPoly":
        value = _as_coeff(value)
        return cls._raw(face, {(0,) * face.dim: value} if value else {})

    @classmethod
    def coordinate(cls, face: Face, label: int) -> "MultiPoly":
        """p^label in the chart of ``face``: a variable or 1 - sum of variables"""
        position = face.chart.variable(label)
        if position is not None:
            exponent = tuple(1 if i == position else 0 for i in range(face.dim))
            return cls._raw(face, {exponent: Fraction(1)})
        terms = {(0,) * face.dim: Fraction(1)}
        for i in range(face.dim):
            terms[tuple(1 if j == i else 0 for j in range(face.dim))] = Fraction(-1)
        return cls._raw(face, terms)

    @classmethod
    def linear(cls, face: Face, weights: Mapping[int, Number], constant: Number = 0) -> "MultiPoly":
        """constant + sum of weight * p^label"""
        result = cls.constant(face, constant)
        for label, weight in weights.items():
            result = result + cls.coordinate(face, label) * weight
        return result

    # inspection

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return self.face.dim

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.face.dim, Fraction(0))

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in descending graded-lexicographic order"""
        return sorted(self._terms.items(), key=lambda item: _glex_key(item[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self._terms:
            raise ArgumentError("The zero polynomial has no leading term.")
        exponent = max(self._terms, key=_glex_key)
        return exponent, self._terms[exponent]

    def on_face(self, face: Face) -> "MultiPoly":
        """The same coefficients read in the chart of another face of equal dimension"""
        if face.dim != self.face.dim:
            raise ArgumentError(f"Cannot move a polynomial from face {self.face} to face {face}.")
        return MultiPoly._raw(face, dict(self._terms))

    # arithmetic

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            _check_same_face(self.face, other.face)
            return other
        if isinstance(other, (int, float, Fraction)):
            return MultiPoly.constant(self.face, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for exponent, coeff in other._terms.items():
            value = terms.get(exponent, 0) + coeff
            if value:
                terms[exponent] = value
            else:
                terms.pop(exponent, None)
        return MultiPoly._raw(self.face, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.face, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: Number) -> "MultiPoly":
        factor = _as_coeff(factor)
        if not factor:
            return MultiPoly.zero(self.face)
        return MultiPoly._raw(self.face, {e: c * factor for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            return self.scale(other)
        if isinstance(other, RationalFn):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        _check_degree_cap(self.degree + other.degree)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                terms[exponent] = terms.get(exponent, 0) + c1 * c2
        return MultiPoly._raw(self.face, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "MultiPoly":
        if power < 0:
            raise ArgumentError("Polynomials only take nonnegative integer powers.")
        _check_degree_cap(self.degree * power)
        result = MultiPoly.constant(self.face, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.face == other.face and self._terms == other._terms
        if isinstance(other, RationalFn):
            return other == self
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.constant(self.face, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.face, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"MultiPoly({self.face}, {self.to_text()!r})"

    # calculus and substitution

    def partial(self, label: int) -> "MultiPoly":
        """Derivative along the free variable p^label"""
        position = self.face.chart.variable(label)
        if position is None:
            raise ArgumentError(f"p{label} is the dependent coordinate of face {self.face}, not a free variable.")
        terms: dict[Exponent, Fraction] = {}
        for exponent, coeff in self._terms.items():
            a = exponent[position]
            if a:
                lowered = exponent[:position] + (a - 1,) + exponent[position + 1:]
                terms[lowered] = coeff * a
        return MultiPoly._raw(self.face, terms)

    def substitute(self, target: Face, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Replace every free variable by a polynomial on ``target``"""
        if len(images) != self.nvars:
            raise ArgumentError(f"Expected {self.nvars} substitution images, got {len(images)}.")
        for image in images:
            _check_same_face(image.face, target)
        powers: list[list[MultiPoly]] = [[MultiPoly.constant(target, 1)] for _ in images]
        result = MultiPoly.zero(target)
        for exponent, coeff in self._terms.items():
            term = MultiPoly.constant(target, coeff)
            for i, a in enumerate(exponent):
                while len(powers[i]) <= a:
                    powers[i].append(powers[i][-1] * images[i])
                if a:
                    term = term * powers[i][a]
            result = result + term
        return result

    def evaluate_values(self, values: Sequence[Number], exact: Optional[bool] = None):
        """Value at the given free-variable values; exact for Fraction input"""
        if len(values) != self.nvars:
            raise ArgumentError(f"Expected {self.nvars} variable values, got {len(values)}.")
        if exact is None:
            exact = bool(values) and all(isinstance(v, (int, Fraction)) for v in values)
        total = Fraction(0) if exact else 0.0
        for exponent, coeff in self._terms.items():
            term = coeff if exact else float(coeff)
            for v, a in zip(values, exponent):
                if a:
                    term *= v**a
            total += term
        return total

    def evaluate(self, point: SimplexPoint, exact: bool = False):
        values = self.face.chart.values(point)
        if exact:
            values = tuple(Fraction(v) for v in values)
        return self.evaluate_values(values, exact=exact)

    # division

    def divide_exact(self, divisor: "MultiPoly") -> Optional["MultiPoly"]:
        """Quotient if ``divisor`` divides this polynomial, else None.

        Division runs in graded-lexicographic order; a single divisor is a
        Groebner basis, so a leading term it cannot reduce means a nonzero
        remainder.
        """
        _check_same_face(self.face, divisor.face)
        if divisor.is_zero():
            raise ArgumentError("Division by the zero polynomial.")
        lead_exp, lead_coeff = divisor.leading_term()
        remainder = dict(self._terms)
        quotient: dict[Exponent, Fraction] = {}
        while remainder:
            exponent = max(remainder, key=_glex_key)
            shift = tuple(a - b for a, b in zip(exponent, lead_exp))
            if any(s < 0 for s in shift):
                return None
            factor = remainder[exponent] / lead_coeff
            quotient[shift] = quotient.get(shift, 0) + factor
            for e, c in divisor._terms.items():
                target = tuple(a + b for a, b in zip(e, shift))
                value = remainder.get(target, 0) - factor * c
                if value:
                    remainder[target] = value
                else:
                    remainder.pop(target, None)
        return MultiPoly._raw(self.face, {e: c for e, c in quotient.items() if c})

    def primitive(self) -> tuple[Fraction, "MultiPoly"]:
        """Split into content and a polynomial with coprime integer coefficients"""
        if self.is_zero():
            return Fraction(0), self
        denominators = reduce(math.lcm, (c.denominator for c in self._terms.values()), 1)
        numerators = reduce(math.gcd, (c.numerator for c in self._terms.values()), 0)
        content = Fraction(numerators, denominators)
        return content, self.scale(1 / content)

    # serialization

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        labels = self.face.chart.free_labels
        parts = []
        for exponent, coeff in self.sorted_terms():
            factors = [f"p{label}" if a == 1 else f"p{label}^{a}" for label, a in zip(labels, exponent) if a]
            parts.append(f"{coeff} * {' '.join(factors)}" if factors else str(coeff))
        return _TERM_SEPARATOR.join(parts)

    def barycentric_text(self) -> str:
        """Render an affine polynomial as sum of c * p^label over all labels of the face"""
        if self.degree > 1:
            raise ArgumentError("Only affine polynomials have a barycentric rendering.")
        base = self.constant_term
        parts = []
        for label in self.face.indices:
            position = self.face.chart.variable(label)
            slope = Fraction(0)
            if position is not None:
                slope = self._terms.get(tuple(1 if i == position else 0 for i in range(self.nvars)), Fraction(0))
            weight = base + slope
            if weight:
                parts.append(f"p{label}" if weight == 1 else f"{weight} * p{label}")
        return _TERM_SEPARATOR.join(parts) if parts else "0"

    @classmethod
    def from_text(cls, face: Face, text: str) -> "MultiPoly":
        """Parse the text form; factors may also name the dependent label"""
        text = text.strip()
        if not text:
            raise ArgumentError("Empty polynomial text.")
        if text == "0":
            return cls.zero(face)
        result = cls.zero(face)
        for term in text.replace(" - ", " + -").split("+"):
            term = term.strip()
            if not term:
                raise ArgumentError(f"Malformed polynomial text {text!r}.")
            if "*" in term and not term.startswith("p") and not term.startswith("-p"):
                coeff_text, monomial_text = term.split("*", 1)
            elif term.startswith("-p"):
                coeff_text, monomial_text = "-1", term[1:]
            elif term.startswith("p"):
                coeff_text, monomial_text = "1", term
            else:
                coeff_text, monomial_text = term, ""
            try:
                coeff = Fraction(coeff_text.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise ArgumentError(f"Bad coefficient {coeff_text.strip()!r} in {text!r}.") from exc
            value = cls.constant(face, coeff)
            for token in monomial_text.replace("*", " ").split():
                match = _FACTOR_PATTERN.match(token)
                if not match:
                    raise ArgumentError(f"Bad factor {token!r} in {text!r}.")
                label, power = int(match.group(1)), int(match.group(2) or 1)
                if label not in face:
                    raise ArgumentError(f"Factor {token!r} names a label outside face {face}.")
                value = value * cls.coordinate(face, label) ** power
            result = result + value
        return result

    def to_float(self) -> "FloatPoly":
        items = self.sorted_terms()
        exponents = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), self.nvars)
        coeffs = np.array([float(c) for _, c in items], dtype=np.float64)
        return FloatPoly(self.face, exponents, coeffs)


@dataclass(frozen=True)
class FloatPoly:
    """Floating mirror of a MultiPoly for vectorised evaluation"""

    face: Face
    exponents: np.ndarray
    coeffs: np.ndarray

    def evaluate(self, values: np.ndarray) -> np.ndarray:
        """Evaluate at an (m, nvars) array of free-variable values"""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != self.exponents.shape[1]:
            raise ArgumentError(f"Expected an (m, {self.exponents.shape[1]}) array of variable values.")
        if not len(self.coeffs):
            return np.zeros(values.shape[0])
        monomials = np.prod(values[:, None, :] ** self.exponents[None, :, :], axis=2)
        return monomials @ self.coeffs


Factor = tuple[MultiPoly, int]


def _canonical_factor(linear: MultiPoly) -> tuple[Fraction, MultiPoly]:
    """Split a linear form into a scalar and a primitive form positive on the open face"""
    if linear.degree > 1:
        raise ArgumentError(f"Denominator factor {linear.to_text()} is not linear.")
    content, primitive = linear.primitive()
    barycenter = tuple(Fraction(1, linear.face.dim + 1) for _ in range(linear.face.dim))
    value = primitive.evaluate_values(barycenter)
    if value == 0:
        raise ArgumentError(f"Denominator factor {linear.to_text()} vanishes inside face {linear.face}.")
    if value < 0:
        content, primitive = -content, -primitive
    return content, primitive


def _factor_key(factor: MultiPoly) -> tuple:
    return tuple(factor.sorted_terms())


class RationalFn:
    """Numerator over a product of linear forms, kept factored and fully cancelled"""

    __slots__ = ("numerator", "factors")

    def __init__(self, numerator: MultiPoly, factors: Iterable[Factor] = ()):
        merged: dict[MultiPoly, int] = {}
        for linear, power in factors:
            _check_same_face(numerator.face, linear.face)
            if power < 0:
                raise ArgumentError("Denominator powers must be nonnegative.")
            if not power:
                continue
            if linear.is_zero():
                raise EvaluationError("Denominator factor is identically zero.")
            if linear.is_constant():
                numerator = numerator.scale(1 / linear.constant_term**power)
                continue
            content, primitive = _canonical_factor(linear)
            numerator = numerator.scale(1 / content**power)
            merged[primitive] = merged.get(primitive, 0) + power
        if numerator.is_zero():
            merged = {}
        for primitive in list(merged):
            while merged[primitive]:
                quotient = numerator.divide_exact(primitive)
                if quotient is None:
                    break
                numerator = quotient
                merged[primitive] -= 1
        self.numerator = numerator
        self.factors: tuple[Factor, ...] = tuple(
            sorted(((f, p) for f, p in merged.items() if p), key=lambda item: _factor_key(item[0]))
        )

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "RationalFn":
        return cls(poly)

    @classmethod
    def ratio(cls, numerator: MultiPoly, linear: MultiPoly, power: int = 1) -> "RationalFn":
        return cls(numerator, [(linear, power)])

    @property
    def face(self) -> Face:
        return self.numerator.face

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    @property
    def is_polynomial(self) -> bool:
        return not self.factors

    def as_polynomial(self) -> Optional[MultiPoly]:
        return self.numerator if not self.factors else None

    def denominator(self) -> MultiPoly:
        result = MultiPoly.constant(self.face, 1)
        for linear, power in self.factors:
            result = result * linear**power
        return result

    # arithmetic

    def _coerce(self, other) -> Optional["RationalFn"]:
        if isinstance(other, RationalFn):
            _check_same_face(self.face, other.face)
            return other
        if isinstance(other, MultiPoly):
            _check_same_face(self.face, other.face)
            return RationalFn(other)
        if isinstance(other, (int, float, Fraction)):
            return RationalFn(MultiPoly.constant(self.face, other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        mine = dict(self.factors)
        theirs = dict(other.factors)
        common = {f: max(mine.get(f, 0), theirs.get(f, 0)) for f in set(mine) | set(theirs)}
        left = self.numerator
        right = other.numerator
        for linear, power in common.items():
            if power > mine.get(linear, 0):
                left = left * linear ** (power - mine.get(linear, 0))
            if power > theirs.get(linear, 0):
                right = right * linear ** (power - theirs.get(linear, 0))
        return RationalFn(left + right, common.items())

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.numerator, self.factors)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFn(self.numerator * other.numerator, self.factors + other.factors)

    __rmul__ = __mul__

    def scale(self, factor: Number) -> "RationalFn":
        return RationalFn(self.numerator.scale(factor), self.factors)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self) -> str:
        return f"RationalFn({self.face}, {self.to_text()!r})"

    # calculus and substitution

    def partial(self, label: int) -> "RationalFn":
        """Quotient-rule derivative keeping the factored denominator"""
        if not self.factors:
            return RationalFn(self.numerator.partial(label))
        linears = [linear for linear, _ in self.factors]
        product = reduce(lambda a, b: a * b, linears)
        numerator = self.numerator.partial(label) * product
        for i, (linear, power) in enumerate(self.factors):
            slope = linear.partial(label)
            if slope.is_zero():
                continue
            others = reduce(lambda a, b: a * b, linears[:i] + linears[i + 1:], MultiPoly.constant(self.face, 1))
            numerator = numerator - self.numerator * slope * others * power
        return RationalFn(numerator, [(linear, power + 1) for linear, power in self.factors])

    def substitute(self, target: Face, images: Sequence[MultiPoly]) -> "RationalFn":
        numerator = self.numerator.substitute(target, images)
        factors = []
        for linear, power in self.factors:
            image = linear.substitute(target, images)
            if image.is_zero():
                raise RestrictionError(
                    f"Denominator factor {linear.to_text()} vanishes identically on face {target}; "
                    "the expression has no continuous extension there."
                )
            factors.append((image, power))
        return RationalFn(numerator, factors)

    def evaluate_values(self, values: Sequence[Number], exact: Optional[bool] = None):
        denominator = None
        for linear, power in self.factors:
            value = linear.evaluate_values(values, exact=exact)
            if value == 0:
                raise EvaluationError(f"Denominator factor {linear.to_text()} vanishes at {list(values)}.")
            denominator = value**power if denominator is None else denominator * value**power
        numerator = self.numerator.evaluate_values(values, exact=exact)
        return numerator if denominator is None else numerator / denominator

    def evaluate(self, point: SimplexPoint, exact: bool = False):
        values = self.face.chart.values(point)
        if exact:
            values = tuple(Fraction(v) for v in values)
        return self.evaluate_values(values, exact=exact)

    # serialization

    def to_text(self) -> str:
        if not self.factors:
            return self.numerator.to_text()
        denominator = " ".join(
            f"({linear.to_text()})" if power == 1 else f"({linear.to_text()})^{power}"
            for linear, power in self.factors
        )
        return f"({self.numerator.to_text()}) / {denominator}"

    def to_document(self) -> dict:
        return {
            "numerator": self.numerator.to_text(),
            "denominator": [{"factor": linear.to_text(), "power": power} for linear, power in self.factors],
        }

    @classmethod
    def from_document(cls, face: Face, document: Mapping) -> "RationalFn":
        return cls(
            MultiPoly.from_text(face, document["numerator"]),
            [(MultiPoly.from_text(face, item["factor"]), int(item["power"])) for item in document.get("denominator", [])],
        )


Expr = Union[MultiPoly, RationalFn]


def simplify(expr: Expr) -> Expr:
    """Demote a rational function without denominator to a polynomial"""
    if isinstance(expr, RationalFn) and expr.is_polynomial:
        return expr.numerator
    return expr


def to_rational(expr: Expr) -> RationalFn:
    return expr if isinstance(expr, RationalFn) else RationalFn(expr)


def coordinate(face: Face, label: int) -> MultiPoly:
    return MultiPoly.coordinate(face, label)


def compose_projection(expr: Expr, projection: Projection) -> Expr:
    """expr o projection: an expression on the projection target read on its domain"""
    target, domain = projection.target, projection.domain
    _check_same_face(expr.face, target)
    images = []
    for label in target.chart.free_labels:
        image = MultiPoly.coordinate(domain, label)
        if label == projection.anchor:
            for absorbed in projection.absorbed:
                image = image + MultiPoly.coordinate(domain, absorbed)
        images.append(image)
    return expr.substitute(domain, images)


def restrict(expr: Expr, subface: Face) -> Expr:
    """Exact restriction of ``expr`` to a face of its closed face"""
    face = expr.face
    if not subface.issubset(face):
        raise ArgumentError(f"Face {subface} is not a face of {face}.")
    images = [
        MultiPoly.coordinate(subface, label) if label in subface else MultiPoly.zero(subface)
        for label in face.chart.free_labels
    ]
    return expr.substitute(subface, images)


def integrate_over_face(expr: MultiPoly, face: Optional[Face] = None) -> Fraction:
    """Exact integral over the face in chart Lebesgue measure.

    Termwise Dirichlet formula: the integral of prod x_j^{a_j} over the
    standard d-simplex is prod a_j! / (d + |a|)!.
    """
    if not isinstance(expr, MultiPoly):
        raise ArgumentError("Only polynomials are integrated exactly.")
    if face is not None:
        _check_same_face(expr.face, face)
    d = expr.face.dim
    total = Fraction(0)
    for exponent, coeff in expr.terms.items():
        numerator = math.prod(math.factorial(a) for a in exponent)
        total += coeff * Fraction(numerator, math.factorial(d + sum(exponent)))
    return total


def inner_product(u: MultiPoly, v: MultiPoly) -> Fraction:
    """Plain L2 product on the face"""
    return integrate_over_face(u * v)


def evaluate(expr: Expr, point: SimplexPoint, exact: bool = False):
    """Value of ``expr`` at a point of its closed face"""
    return expr.evaluate(point, exact=exact)
