"""Backward and forward Wright–Fisher operators on face charts.

L* u = 1/2 sum_ij x_i (delta_ij - x_j) d_i d_j u, and L is its formal
adjoint. Both take the same form in every chart of a face, so the chart
with the smallest label eliminated is used throughout.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from wfext.enums import OperatorKind
from wfext.errors import ArgumentError
from wfext.polyalg import Exponent, Expr, MultiPoly, RationalFn, integrate_over_face, restrict
from wfext.simplex import Face

HALF = Fraction(1, 2)


def monomial_image(exponent: Exponent, kind: OperatorKind) -> dict[Exponent, Fraction]:
    """Image of the chart monomial x^a under L* or L.

    L* x^a = 1/2 sum a_i (a_i - 1) x^(a - e_i) - 1/2 |a| (|a| - 1) x^a
    L  x^a = 1/2 sum a_i (a_i + 1) x^(a - e_i) - 1/2 (|a| + d)(|a| + d + 1) x^a
    """
    d = len(exponent)
    total = sum(exponent)
    image: dict[Exponent, Fraction] = {}
    for i, a in enumerate(exponent):
        weight = a * (a - 1) if kind is OperatorKind.BACKWARD else a * (a + 1)
        if a and weight:
            lowered = exponent[:i] + (a - 1,) + exponent[i + 1:]
            image[lowered] = HALF * weight
    if kind is OperatorKind.BACKWARD:
        diagonal = -HALF * total * (total - 1)
    else:
        diagonal = -HALF * (total + d) * (total + d + 1)
    if diagonal:
        image[exponent] = image.get(exponent, 0) + diagonal
    return image


def _apply_monomialwise(poly: MultiPoly, kind: OperatorKind) -> MultiPoly:
    terms: dict[Exponent, Fraction] = {}
    for exponent, coeff in poly.terms.items():
        for target, weight in monomial_image(exponent, kind).items():
            terms[target] = terms.get(target, 0) + coeff * weight
    return MultiPoly(poly.face, terms)


def _check_face(expr: Expr, face: Face | None) -> Face:
    if face is not None and expr.face != face:
        raise ArgumentError(f"Expression lives on face {expr.face}, not on face {face}.")
    return expr.face


def apply_backward(expr: Expr, face: Face | None = None) -> Expr:
    """L* applied exactly; the zero operator on a vertex"""
    face = _check_face(expr, face)
    if face.is_vertex:
        return expr * 0
    if isinstance(expr, MultiPoly):
        return _apply_monomialwise(expr, OperatorKind.BACKWARD)

    labels = face.chart.free_labels
    coords = {label: MultiPoly.coordinate(face, label) for label in labels}
    firsts = {label: expr.partial(label) for label in labels}
    diagonal = RationalFn(MultiPoly.zero(face))
    mixed = RationalFn(MultiPoly.zero(face))
    for i, li in enumerate(labels):
        for lj in labels[i:]:
            second = firsts[li].partial(lj)
            weight = coords[li] * coords[lj]
            if li == lj:
                diagonal = diagonal + second * coords[li]
                mixed = mixed + second * weight
            else:
                mixed = mixed + second * (weight * 2)
    return (diagonal - mixed).scale(HALF)


def apply_forward(expr: MultiPoly, face: Face | None = None) -> MultiPoly:
    """L applied exactly to a polynomial"""
    face = _check_face(expr, face)
    if not isinstance(expr, MultiPoly):
        raise ArgumentError("The forward operator is only applied to polynomials.")
    if face.is_vertex:
        return expr * 0
    return _apply_monomialwise(expr, OperatorKind.FORWARD)


def apply_operator(expr: Expr, kind: OperatorKind) -> Expr:
    if kind is OperatorKind.BACKWARD:
        return apply_backward(expr)
    return apply_forward(expr)


def omega(face: Face) -> MultiPoly:
    """omega = product of all barycentric coordinates of the face"""
    if face.is_vertex:
        raise ArgumentError(f"omega is undefined on the vertex {face}.")
    result = MultiPoly.constant(face, 1)
    for label in face.indices:
        result = result * MultiPoly.coordinate(face, label)
    return result


def restriction_defect(expr: MultiPoly, face: Face, subface: Face) -> MultiPoly:
    """Restrict-then-apply minus apply-then-restrict on ``subface``"""
    if expr.face != face:
        raise ArgumentError(f"Expression lives on face {expr.face}, not on face {face}.")
    if subface == face or not subface.issubset(face):
        raise ArgumentError(f"Face {subface} is not a proper face of {face}.")
    return apply_backward(restrict(expr, subface)) - restrict(apply_backward(expr), subface)


def adjointness_defect(u: MultiPoly, phi: MultiPoly, face: Face) -> Fraction:
    """(L u, phi) - (u, L* phi) for phi vanishing on the face boundary"""
    if u.face != face or phi.face != face:
        raise ArgumentError(f"Both arguments must live on face {face}.")
    return integrate_over_face(apply_forward(u) * phi) - integrate_over_face(u * apply_backward(phi))


def eigen_defect(expr: Expr, kappa: Union[Fraction, int]) -> Expr:
    """L* expr + kappa expr; zero exactly for eigenfunctions"""
    return apply_backward(expr) + expr * Fraction(kappa)
