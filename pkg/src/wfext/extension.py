"""Extensions of face solutions into the faces that contain them.

A single step carries an eigenfunction psi on I \\ {s} into I as
psi(pi^{r,s}(p)) p^r / (p^r + p^s). Iterating along a path i_k, ..., i_n
gives the closed form

    u(pi^{i_k..i_d}(p), t) * prod_j p^{i_j} / sum_{l >= j} p^{i_l}

and averaging over all anchors and orderings gives the global extension.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from wfext.errors import ArgumentError
from wfext.logging import logger
from wfext.operators import eigen_defect
from wfext.polyalg import Expr, MultiPoly, RationalFn, compose_projection, simplify, to_rational
from wfext.simplex import Face, PathSpec, Projection, SimplexPoint, superfaces
from wfext.spectral import Mode, ProperSolution
from wfext.utils.parallel import ordered_map


@dataclass(frozen=True)
class ExtensionStep:
    """Extension from ``ambient`` minus s into ``ambient``: allele s is lost over allele r"""

    ambient: Face
    r: int
    s: int

    def __post_init__(self):
        if self.r == self.s:
            raise ArgumentError(f"Extension labels must differ, got r = s = {self.r}.")
        for label in (self.r, self.s):
            if label not in self.ambient:
                raise ArgumentError(f"Label {label} is not part of face {self.ambient}.")

    @property
    def source_face(self) -> Face:
        return self.ambient.without(self.s)

    @property
    def projection(self) -> Projection:
        return Projection(self.ambient, self.r, (self.s,))


@dataclass(frozen=True)
class Piece:
    """The modes of a solution on one face"""

    face: Face
    modes: tuple[Mode, ...]

    @classmethod
    def of(cls, solution: Union[ProperSolution, "Piece"]) -> "Piece":
        return cls(solution.face, tuple(solution.modes))

    def snapshot(self) -> Expr:
        total = RationalFn(MultiPoly.zero(self.face))
        for mode in self.modes:
            total = total + to_rational(mode.expr) * mode.coeff
        return simplify(total)


def _path_weight(face: Face, sequence: Sequence[int]) -> RationalFn:
    """prod_{j < last} p^{i_j} / sum_{l >= j} p^{i_l} on ``face``"""
    numerator = MultiPoly.constant(face, 1)
    factors = []
    for j in range(len(sequence) - 1):
        numerator = numerator * MultiPoly.coordinate(face, sequence[j])
        tail = MultiPoly.zero(face)
        for label in sequence[j:]:
            tail = tail + MultiPoly.coordinate(face, label)
        factors.append((tail, 1))
    return RationalFn(numerator, factors)


def _check_eigenfunction(psi: Expr, kappa: Fraction) -> None:
    if not eigen_defect(psi, kappa).is_zero():
        raise ArgumentError(f"Expression on face {psi.face} is not an eigenfunction of L* with kappa = {kappa}.")


def extend_eigenfunction(psi: Expr, kappa, step: ExtensionStep, check: bool = True) -> Expr:
    """psi(pi^{r,s}(p)) p^r / (p^r + p^s) on the ambient face"""
    if psi.face != step.source_face:
        raise ArgumentError(f"Eigenfunction lives on face {psi.face}, not on the step source {step.source_face}.")
    if check:
        _check_eigenfunction(psi, Fraction(kappa))
    lifted = to_rational(compose_projection(psi, step.projection))
    return simplify(lifted * _path_weight(step.ambient, (step.r, step.s)))


def extend_solution_once(u: Union[ProperSolution, Piece], step: ExtensionStep, check: bool = True) -> Piece:
    """Mode-by-mode extension; also applies to the t = 0 snapshot"""
    if u.face != step.source_face:
        raise ArgumentError(f"Solution lives on face {u.face}, not on the step source {step.source_face}.")
    modes = tuple(
        Mode(mode.kappa, mode.coeff, extend_eigenfunction(mode.expr, mode.kappa, step, check))
        for mode in u.modes
    )
    return Piece(step.ambient, modes)


class PiecewiseSolution:
    """A time-dependent expression per face; faces without a piece carry 0"""

    def __init__(self, n: int, pieces: Optional[Mapping[Face, Iterable[Mode]]] = None):
        self.n = n
        self.pieces: dict[Face, tuple[Mode, ...]] = {}
        for face, modes in (pieces or {}).items():
            modes = tuple(modes)
            if modes:
                self.pieces[Face(face.indices, n)] = modes

    @classmethod
    def single(cls, n: int, solution: Union[ProperSolution, Piece]) -> "PiecewiseSolution":
        return cls(n, {solution.face: solution.modes})

    def faces(self) -> list[Face]:
        return sorted(self.pieces, key=lambda face: (face.dim, face.indices))

    def piece(self, face: Face) -> Piece:
        return Piece(face, self.pieces.get(face, ()))

    def __add__(self, other: "PiecewiseSolution") -> "PiecewiseSolution":
        if self.n != other.n:
            raise ArgumentError(f"Cannot add solutions on simplices with n = {self.n} and n = {other.n}.")
        pieces = dict(self.pieces)
        for face, modes in other.pieces.items():
            pieces[face] = pieces.get(face, ()) + modes
        return PiecewiseSolution(self.n, pieces)

    def snapshot(self, face: Face) -> Expr:
        """The t = 0 value on ``face``"""
        return self.piece(face).snapshot()

    @property
    def final_snapshot(self) -> dict[Face, Expr]:
        return {face: self.snapshot(face) for face in self.faces()}

    def merged(self) -> "PiecewiseSolution":
        """One mode per distinct kappa on every face"""
        pieces = {}
        for face, modes in self.pieces.items():
            grouped: dict[Fraction, RationalFn] = {}
            for mode in modes:
                term = to_rational(mode.expr) * mode.coeff
                grouped[mode.kappa] = grouped[mode.kappa] + term if mode.kappa in grouped else term
            pieces[face] = tuple(
                Mode(kappa, Fraction(1), simplify(expr))
                for kappa, expr in sorted(grouped.items())
                if not expr.is_zero()
            )
        return PiecewiseSolution(self.n, pieces)

    def mode_defects(self) -> list[Face]:
        """Faces with a mode violating L* psi + kappa psi = 0"""
        return [
            face
            for face in self.faces()
            if any(not eigen_defect(mode.expr, mode.kappa).is_zero() for mode in self.pieces[face])
        ]

    def check_modes(self) -> bool:
        return not self.mode_defects()

    def is_stationary(self) -> bool:
        return all(mode.kappa == 0 for modes in self.pieces.values() for mode in modes)

    def stationary_part(self) -> "PiecewiseSolution":
        return PiecewiseSolution(
            self.n, {face: [m for m in modes if m.kappa == 0] for face, modes in self.pieces.items()}
        )

    def evaluate_chart(self, face: Face, values: Sequence[float], t: float) -> float:
        return math.fsum(mode.value(values, t) for mode in self.pieces.get(face, ()))

    def evaluate(self, point: SimplexPoint, t: float) -> float:
        """Value at a point of the closed simplex; the point's own face selects the piece"""
        point = point.classify()
        face = Face(point.face.indices, self.n)
        if face not in self.pieces:
            return 0.0
        return self.evaluate_chart(face, face.chart.values(point), t)

    def to_document(self) -> list[dict]:
        return [
            {"face": face.to_json(), "modes": [mode.to_document() for mode in self.pieces[face]]}
            for face in self.faces()
        ]


def _as_piece(u: Union[ProperSolution, Piece]) -> Piece:
    if u.face.is_vertex and any(mode.kappa != 0 for mode in u.modes):
        raise ArgumentError(f"A solution on the vertex {u.face} must be constant.")
    return Piece.of(u)


def pathwise_extension(u: Union[ProperSolution, Piece], path: PathSpec) -> PiecewiseSolution:
    """Closed-form extension of u along one path; pieces on the chain I_k, ..., I_n"""
    if u.face != path.base:
        raise ArgumentError(f"Solution lives on face {u.face}, not on the path base {path.base}.")
    base = _as_piece(u)
    n = path.base.ambient_n
    pieces = {path.base: base.modes}
    for face in path.chain()[1:]:
        d = face.dim
        projection = path.projection(d)
        weight = _path_weight(face, path.sequence[: d - path.base.dim + 1])
        pieces[face] = tuple(
            Mode(mode.kappa, mode.coeff, simplify(to_rational(compose_projection(mode.expr, projection)) * weight))
            for mode in base.modes
        )
    return PiecewiseSolution(n, pieces)


def iterate_extension(u: Union[ProperSolution, Piece], path: PathSpec, check: bool = False) -> PiecewiseSolution:
    """The same extension as a right fold of single steps with r = i_{d-1}, s = i_d"""
    if u.face != path.base:
        raise ArgumentError(f"Solution lives on face {u.face}, not on the path base {path.base}.")
    current = _as_piece(u)
    pieces = {current.face: current.modes}
    sequence = path.sequence
    for j, face in enumerate(path.chain()[1:], start=1):
        current = extend_solution_once(current, ExtensionStep(face, sequence[j - 1], sequence[j]), check)
        pieces[face] = current.modes
    return PiecewiseSolution(path.base.ambient_n, pieces)


def _global_piece(base_piece: Piece, face: Face) -> tuple[Face, tuple[Mode, ...]]:
    base = base_piece.face
    if face == base:
        return face, base_piece.modes
    added = [label for label in face.indices if label not in base]
    scale = Fraction(1, len(base.indices))
    lifted: list[RationalFn] = [RationalFn(MultiPoly.zero(face)) for _ in base_piece.modes]
    for anchor in base.indices:
        projection = Projection(face, anchor, tuple(added))
        weight = RationalFn(MultiPoly.zero(face))
        for ordering in itertools.permutations(added):
            weight = weight + _path_weight(face, (anchor, *ordering))
        for i, mode in enumerate(base_piece.modes):
            lifted[i] = lifted[i] + to_rational(compose_projection(mode.expr, projection)) * weight
    modes = tuple(
        Mode(mode.kappa, mode.coeff, simplify(expr.scale(scale)))
        for mode, expr in zip(base_piece.modes, lifted)
    )
    return face, modes


def global_extension(
    u: Union[ProperSolution, Piece],
    base: Optional[Face] = None,
    n: Optional[int] = None,
    workers: int = 1,
) -> PiecewiseSolution:
    """Average of the pathwise extensions over every anchor in the base and every ordering of the added labels"""
    base = u.face if base is None else base
    if u.face != base:
        raise ArgumentError(f"Solution lives on face {u.face}, not on the base {base}.")
    n = base.ambient_n if n is None else n
    base_piece = _as_piece(u)
    faces = superfaces(base, n)
    if n > 7 and len(faces) > 1:
        logger.warning("Global extension enumerates many paths", n=n, base=str(base), faces=len(faces))
    results = ordered_map(lambda face: _global_piece(base_piece, face), faces, workers)
    logger.debug("Global extension assembled", base=str(base), faces=len(results))
    return PiecewiseSolution(n, dict(results))
