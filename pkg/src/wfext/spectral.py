"""Exact eigen-decomposition on graded polynomial spaces and proper solutions.

Both generators map a monomial of total degree m to a multiple of itself
plus terms of degree m - 1, so every total-degree block of the operator
matrix is scalar. Eigenvectors follow by back-substitution through the
lower blocks. Proper eigenfunctions of L* are the omega-shifted
eigenfunctions of L.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from wfext.enums import OperatorKind
from wfext.errors import ArgumentError, DecompositionError, RangeError
from wfext.logging import log_stage, logger
from wfext.operators import eigen_defect, monomial_image, omega
from wfext.polyalg import DEFAULT_MAX_DEGREE, Exponent, Expr, MultiPoly, integrate_over_face, to_rational
from wfext.simplex import Face, SimplexPoint

D_MAX = DEFAULT_MAX_DEGREE


def graded_monomials(nvars: int, degree: int) -> list[Exponent]:
    """Exponents of total degree <= degree: ascending degree, lex-descending within a degree"""

    def compositions(total: int, slots: int):
        if slots == 0:
            if total == 0:
                yield ()
            return
        for head in range(total, -1, -1):
            for tail in compositions(total - head, slots - 1):
                yield (head, *tail)

    return [e for m in range(degree + 1) for e in compositions(m, nvars)]


def _check_degree(degree: int) -> None:
    if not 0 <= degree <= D_MAX:
        raise RangeError(f"Truncation degree {degree} is outside 0..{D_MAX}.")


@dataclass(frozen=True)
class OperatorMatrix:
    """Matrix of L or L* in the graded monomial basis; column j is the image of basis[j]"""

    face: Face
    degree: int
    kind: OperatorKind
    basis: tuple[Exponent, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def size(self) -> int:
        return len(self.basis)

    def degrees(self) -> list[int]:
        return sorted({sum(e) for e in self.basis})

    def block(self, m: int) -> range:
        indices = [i for i, e in enumerate(self.basis) if sum(e) == m]
        return range(indices[0], indices[-1] + 1)

    def vector(self, poly: MultiPoly) -> list[Fraction]:
        """Coefficient vector of a polynomial in the basis"""
        positions = {e: i for i, e in enumerate(self.basis)}
        vector = [Fraction(0)] * self.size
        for exponent, coeff in poly.terms.items():
            if exponent not in positions:
                raise RangeError(f"Polynomial degree {poly.degree} exceeds matrix degree {self.degree}.")
            vector[positions[exponent]] = coeff
        return vector

    def polynomial(self, vector: Sequence[Fraction]) -> MultiPoly:
        return MultiPoly(self.face, {e: c for e, c in zip(self.basis, vector) if c})

    def apply(self, vector: Sequence[Fraction]) -> list[Fraction]:
        return [sum((row[j] * vector[j] for j in range(self.size) if row[j]), Fraction(0)) for row in self.entries]


def operator_matrix(face: Face, degree: int, kind: OperatorKind) -> OperatorMatrix:
    """Finite representation of the operator on polynomials of degree <= ``degree``"""
    _check_degree(degree)
    basis = tuple(graded_monomials(face.dim, degree))
    positions = {e: i for i, e in enumerate(basis)}
    rows = [[Fraction(0)] * len(basis) for _ in basis]
    if not face.is_vertex:
        for j, exponent in enumerate(basis):
            for target, weight in monomial_image(exponent, kind).items():
                rows[positions[target]][j] += weight
    return OperatorMatrix(face, degree, kind, basis, tuple(tuple(row) for row in rows))


@dataclass(frozen=True)
class EigenPair:
    """kappa and an eigenfunction with L* eigenfunction = -kappa eigenfunction.

    For proper pairs ``eigenfunction`` is omega * ``forward`` and vanishes on
    the face boundary; ``forward`` is the paired eigenfunction of L.
    """

    kappa: Fraction
    eigenfunction: MultiPoly
    face: Face
    proper: bool
    forward: Optional[MultiPoly] = None
    degree: int = 0

    def defect(self) -> MultiPoly:
        return eigen_defect(self.eigenfunction, self.kappa)

    def verify(self) -> bool:
        return self.defect().is_zero()

    def on_face(self, face: Face) -> "EigenPair":
        return EigenPair(
            self.kappa,
            self.eigenfunction.on_face(face),
            face,
            self.proper,
            self.forward.on_face(face) if self.forward is not None else None,
            self.degree,
        )


def _block_eigenvalues(matrix: OperatorMatrix) -> dict[int, Fraction]:
    values = {}
    for m in matrix.degrees():
        block = matrix.block(m)
        diagonal = matrix.entries[block.start][block.start]
        for i in block:
            for j in block:
                expected = diagonal if i == j else 0
                if matrix.entries[i][j] != expected:
                    raise DecompositionError(
                        f"Degree block {m} of the {matrix.kind.value} operator on face {matrix.face} "
                        "is not a scalar block."
                    )
        values[m] = -diagonal
    return values


def decompose(face: Face, degree: int, kind: OperatorKind) -> list[tuple[Fraction, MultiPoly, int]]:
    """Eigenpairs (kappa, eigenfunction, degree) of the operator on degree <= ``degree``.

    Each eigenvector is pivoted on one monomial of its top degree block and
    completed through v_i = S_i / (lambda_k - lambda_m) for rows of lower degree k.
    """
    matrix = operator_matrix(face, degree, kind)
    eigenvalues = _block_eigenvalues(matrix)
    blocks = {m: matrix.block(m) for m in eigenvalues}
    pairs = []
    for m, top in blocks.items():
        for pivot in top:
            vector = [Fraction(0)] * matrix.size
            vector[pivot] = Fraction(1)
            for k in range(m - 1, -1, -1):
                gap = eigenvalues[k] - eigenvalues[m]
                upper = range(blocks[k + 1].start, top.stop)
                for i in blocks[k]:
                    row = matrix.entries[i]
                    s = sum((row[c] * vector[c] for c in upper if row[c] and vector[c]), Fraction(0))
                    if gap:
                        vector[i] = s / gap
                    elif s:
                        raise DecompositionError(
                            f"Degree blocks {k} and {m} of the {kind.value} operator on face {face} "
                            "share an eigenvalue but the coupling does not vanish; the operator is not semisimple."
                        )
            pairs.append((eigenvalues[m], matrix.polynomial(vector), m))
    return pairs


def _weighted_gram_schmidt(functions: list[MultiPoly], weight: MultiPoly) -> list[MultiPoly]:
    done: list[tuple[MultiPoly, Fraction]] = []
    for phi in functions:
        for previous, norm in done:
            phi = phi - previous * (integrate_over_face(weight * phi * previous) / norm)
        norm = integrate_over_face(weight * phi * phi)
        if not norm:
            raise DecompositionError(f"Eigenfunctions on face {weight.face} are linearly dependent.")
        done.append((phi, norm))
    return [phi for phi, _ in done]


@lru_cache(maxsize=None)
def _proper_basis_for_dim(dim: int, degree: int) -> tuple[EigenPair, ...]:
    face = Face.full(dim)
    started = time.perf_counter()
    weight = omega(face)
    groups: dict[Fraction, list[tuple[MultiPoly, int]]] = {}
    for kappa, phi, m in decompose(face, degree - (dim + 1), OperatorKind.FORWARD):
        groups.setdefault(kappa, []).append((phi, m))
    pairs = []
    for kappa, members in groups.items():
        forward = _weighted_gram_schmidt([phi for phi, _ in members], weight)
        for phi, (_, m) in zip(forward, members):
            pair = EigenPair(kappa, weight * phi, face, True, phi, m + dim + 1)
            if not pair.verify():
                raise DecompositionError(
                    f"Proper eigenfunction of degree {pair.degree} on a {dim}-face fails L* phi = -{kappa} phi."
                )
            pairs.append(pair)
    log_stage(logger, "proper_basis", dim=dim, degree=degree, modes=len(pairs),
              seconds=round(time.perf_counter() - started, 6))
    return tuple(pairs)


def proper_basis(face: Face, degree: int) -> list[EigenPair]:
    """Proper eigenpairs (kappa, omega phi) of L* from eigenpairs of L of degree <= degree - dim - 1"""
    if face.is_vertex:
        raise ArgumentError(f"Vertex {face} has no proper eigenfunctions.")
    _check_degree(degree)
    if degree < face.dim + 1:
        raise RangeError(f"Degree {degree} is below the minimum {face.dim + 1} for face {face}.")
    return [pair.on_face(face) for pair in _proper_basis_for_dim(face.dim, degree)]


def eigenpairs(face: Face, degree: int, kind: OperatorKind) -> list[EigenPair]:
    """Plain (not omega-shifted) eigenpairs of L or L*, both reported with the L* sign convention"""
    _check_degree(degree)
    return [EigenPair(kappa, phi, face, False, None, m) for kappa, phi, m in decompose(face, degree, kind)]


def spectrum(face: Face, degree: int) -> list[tuple[Fraction, int]]:
    """Distinct proper eigenvalues with multiplicities"""
    counts: dict[Fraction, int] = {}
    for pair in proper_basis(face, degree):
        counts[pair.kappa] = counts.get(pair.kappa, 0) + 1
    return sorted(counts.items())


def project_final_condition(f: MultiPoly, basis: Sequence[EigenPair], face: Face) -> list[Fraction]:
    """Biorthogonal coefficients c_m = (f, phi_m) / (phi*_m, phi_m)"""
    if f.face != face:
        raise ArgumentError(f"Final condition lives on face {f.face}, not on face {face}.")
    coefficients = []
    for pair in basis:
        if pair.forward is None:
            raise ArgumentError("Projection needs proper eigenpairs.")
        pairing = integrate_over_face(pair.eigenfunction * pair.forward)
        if not pairing:
            raise DecompositionError(f"Vanishing pairing for the kappa = {pair.kappa} mode on face {face}.")
        coefficients.append(integrate_over_face(f * pair.forward) / pairing)
    return coefficients


@dataclass(frozen=True)
class Mode:
    """One term c e^{kappa t} expr of a time-dependent solution"""

    kappa: Fraction
    coeff: Fraction
    expr: Expr

    def value(self, values: Sequence[float], t: float) -> float:
        return float(self.coeff) * math.exp(float(self.kappa) * t) * float(self.expr.evaluate_values(values))

    def to_document(self) -> dict:
        return {"kappa": str(self.kappa), "coeff": str(self.coeff), "expr": to_rational(self.expr).to_document()}


@dataclass(frozen=True)
class ProperSolution:
    """u(p, t) = sum c_m e^{kappa_m t} phi*_m(p) on one face"""

    face: Face
    modes: tuple[Mode, ...]
    degree: int = 0
    final_condition: Optional[MultiPoly] = field(default=None, compare=False)

    def snapshot(self) -> MultiPoly:
        """u(., 0)"""
        result = MultiPoly.zero(self.face)
        for mode in self.modes:
            result = result + mode.expr * mode.coeff
        return result

    def time_defects(self) -> list[Mode]:
        """Modes violating -d_t u = L* u"""
        return [mode for mode in self.modes if not eigen_defect(mode.expr, mode.kappa).is_zero()]

    def evaluate(self, point: SimplexPoint, t: float) -> float:
        return evaluate_solution(self, point, t)


def vertex_solution(face: Face, value) -> ProperSolution:
    """The stationary constant solution on a vertex"""
    if not face.is_vertex:
        raise ArgumentError(f"Face {face} is not a vertex.")
    value = Fraction(value)
    modes = (Mode(Fraction(0), value, MultiPoly.constant(face, 1)),) if value else ()
    return ProperSolution(face, modes, 0, MultiPoly.constant(face, value))


def proper_solution(f: MultiPoly, face: Face, degree: int) -> ProperSolution:
    """Spectral solution of the KBE on the open face with final condition projected from f"""
    if face.is_vertex:
        raise ArgumentError(f"Proper solutions need a face of dimension >= 1, got vertex {face}.")
    basis = proper_basis(face, degree)
    coefficients = project_final_condition(f, basis, face)
    modes = tuple(
        Mode(pair.kappa, c, pair.eigenfunction) for pair, c in zip(basis, coefficients) if c
    )
    logger.debug("Proper solution assembled", face=str(face), degree=degree, modes=len(modes))
    return ProperSolution(face, modes, degree, f)


def evaluate_solution(sol: ProperSolution, point: SimplexPoint, t: float) -> float:
    if t > 0:
        raise ArgumentError(f"Solutions are defined for t <= 0, got t = {t}.")
    point = point.classify()
    if point.face != sol.face:
        if not point.face.issubset(sol.face):
            raise ArgumentError(f"Point on face {point.face} is not on the closed face {sol.face}.")
        return 0.0
    values = sol.face.chart.values(point)
    return math.fsum(mode.value(values, t) for mode in sol.modes)
