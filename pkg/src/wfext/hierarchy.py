"""Hierarchical solutions of the extended backward equation.

Layer 0 extends the vertex values globally. Each later layer solves the
proper problem for the modified final condition f'_d = f_d minus the t = 0
snapshots of the lower layers on every d-face, then extends those
solutions globally. The top layer needs no extension.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from wfext.enums import FillPolicy
from wfext.errors import ArgumentError, OutOfModelError, RangeError
from wfext.extension import PiecewiseSolution, global_extension, pathwise_extension
from wfext.logging import log_stage, logger
from wfext.operators import apply_backward
from wfext.polyalg import DEFAULT_MAX_DEGREE, Expr, MultiPoly, RationalFn, simplify
from wfext.simplex import Face, PathSpec, SimplexPoint, all_faces, boundary_faces
from wfext.spectral import Mode, proper_solution, vertex_solution


@dataclass
class StratifiedFinalCondition:
    """Per-face polynomial components f_d of a final condition on the closed simplex"""

    n: int
    components: dict[Face, MultiPoly] = field(default_factory=dict)
    fill: FillPolicy = FillPolicy.ZERO

    def __post_init__(self):
        if self.n < 1:
            raise RangeError(f"Need at least two alleles (n >= 1), got n = {self.n}.")
        components = {}
        for face, poly in self.components.items():
            face = Face(face.indices, self.n)
            if poly.face != face:
                raise ArgumentError(f"Component for face {face} lives on face {poly.face}.")
            if poly.degree > DEFAULT_MAX_DEGREE:
                raise RangeError(f"Component on face {face} has degree {poly.degree} > {DEFAULT_MAX_DEGREE}.")
            components[face] = poly
        self.components = components

    def component(self, face: Face) -> Optional[MultiPoly]:
        return self.components.get(face)

    def explicit(self, face: Face) -> MultiPoly:
        """The component, or 0 for a missing face under zero fill"""
        poly = self.components.get(face)
        if poly is not None:
            return poly
        if self.fill is FillPolicy.EXTEND:
            raise ArgumentError(f"Face {face} inherits its final condition; resolve it against a solution first.")
        return MultiPoly.zero(face)

    @property
    def max_degree(self) -> int:
        return max((poly.degree for poly in self.components.values()), default=0)

    @classmethod
    def vertex_supported(cls, values: Mapping[int, object], n: int) -> "StratifiedFinalCondition":
        """Vertex values only; every other face inherits the lower layers"""
        components = {
            Face((label,), n): MultiPoly.constant(Face((label,), n), Fraction(value)) for label, value in values.items()
        }
        return cls(n, components, FillPolicy.EXTEND)

    @classmethod
    def from_document(cls, document: Mapping, n: int) -> "StratifiedFinalCondition":
        """{"strata": [{"face": [...], "poly": "..."}], "fill": "zero" | "extend"}"""
        if not isinstance(document, Mapping) or "strata" not in document:
            raise ArgumentError("Final-condition document needs a 'strata' list.")
        try:
            fill = FillPolicy(document.get("fill", FillPolicy.ZERO.value))
        except ValueError as exc:
            raise ArgumentError(f"Unknown fill policy {document.get('fill')!r}.") from exc
        components: dict[Face, MultiPoly] = {}
        for entry in document["strata"]:
            face = Face.from_json(entry["face"], n)
            if face in components:
                raise ArgumentError(f"Face {face} appears twice in the final condition.")
            components[face] = MultiPoly.from_text(face, str(entry["poly"]))
        return cls(n, components, fill)

    def to_document(self) -> dict:
        return {
            "fill": self.fill.value,
            "strata": [
                {"face": face.to_json(), "poly": self.components[face].to_text()}
                for face in sorted(self.components, key=lambda f: (f.dim, f.indices))
            ],
        }


class GlobalSolution:
    """Layers U_0, ..., U_n and their sum"""

    def __init__(self, n: int, layers: list[PiecewiseSolution], degree: int = 0):
        self.n = n
        self.layers = layers
        self.degree = degree

    @property
    def total(self) -> PiecewiseSolution:
        result = PiecewiseSolution(self.n)
        for layer in self.layers:
            result = result + layer
        return result

    def evaluate(self, point: SimplexPoint, t: float) -> float:
        return self.total.evaluate(point, t)

    def snapshot(self, face: Face) -> Expr:
        return self.total.snapshot(face)

    def stationary_component(self) -> PiecewiseSolution:
        """The kappa = 0 part, the limit as t -> -infinity"""
        return self.total.stationary_part().merged()

    def is_stationary(self) -> bool:
        return self.total.is_stationary()

    def to_document(self) -> dict:
        return {
            "alleles": self.n + 1,
            "degree": self.degree,
            "layers": [{"dimension": d, "pieces": layer.to_document()} for d, layer in enumerate(self.layers)],
            "total": self.total.merged().to_document(),
        }


def _as_polynomial(expr: Expr, face: Face) -> MultiPoly:
    expr = simplify(expr)
    if isinstance(expr, RationalFn):
        raise OutOfModelError(
            f"The t = 0 snapshot on face {face} does not reduce to a polynomial: {expr.to_text()}"
        )
    return expr


def modified_final_condition(
    d: int, f: StratifiedFinalCondition, lower: list[PiecewiseSolution]
) -> dict[Face, MultiPoly]:
    """f'_d = f_d minus the lower-layer snapshots on every d-face"""
    result = {}
    for face in boundary_faces(Face.full(f.n), d):
        inherited = MultiPoly.zero(face)
        for layer in lower:
            inherited = inherited + _as_polynomial(layer.snapshot(face), face)
        target = f.component(face)
        if target is None:
            target = inherited if f.fill is FillPolicy.EXTEND else MultiPoly.zero(face)
        result[face] = target - inherited
    return result


def solve_extended_kbe(f: StratifiedFinalCondition, degree: int, workers: int = 1) -> GlobalSolution:
    """Solve the extended KBE stratum by stratum, dimension ascending"""
    if degree < f.max_degree:
        raise RangeError(f"Truncation degree {degree} is below the final-condition degree {f.max_degree}.")
    layers: list[PiecewiseSolution] = []
    for d in range(f.n + 1):
        started = time.perf_counter()
        layer = PiecewiseSolution(f.n)
        for face, target in modified_final_condition(d, f, layers).items():
            if target.is_zero():
                continue
            if d == 0:
                solution = vertex_solution(face, target.constant_term)
            elif degree < d + 1:
                raise RangeError(
                    f"Truncation degree {degree} has no proper modes on face {face}; "
                    f"its final value needs degree at least {d + 1}."
                )
            else:
                solution = proper_solution(target, face, degree)
            if solution.modes:
                layer = layer + global_extension(solution, face, f.n, workers)
        layers.append(layer)
        log_stage(logger, "layer", dimension=d, faces=len(layer.pieces), seconds=round(time.perf_counter() - started, 6))
    return GlobalSolution(f.n, layers, degree)


def resolve_final_condition(f: StratifiedFinalCondition, solution: GlobalSolution) -> StratifiedFinalCondition:
    """Explicit components on every face, inherited faces taken from the solution snapshot"""
    components = {}
    for face in all_faces(f.n):
        poly = f.component(face)
        if poly is None and f.fill is FillPolicy.EXTEND:
            poly = _as_polynomial(solution.snapshot(face), face)
        if poly is not None and not poly.is_zero():
            components[face] = poly
    return StratifiedFinalCondition(f.n, components, FillPolicy.ZERO)


def littler(path: PathSpec) -> Expr:
    """Top-face piece of the pathwise extension of the constant 1 from a vertex"""
    if not path.base.is_vertex:
        raise ArgumentError(f"Path base {path.base} is not a vertex.")
    extension = pathwise_extension(vertex_solution(path.base, 1), path)
    return simplify(extension.snapshot(path.top))


def stationary_solution(vertex_values: Mapping[int, object], n: int) -> GlobalSolution:
    """U = sum_i f_0(e_i) p^i on every face"""
    if n < 1:
        raise RangeError(f"Need at least two alleles (n >= 1), got n = {n}.")
    values = {int(label): Fraction(value) for label, value in vertex_values.items()}
    for label in values:
        if not 0 <= label <= n:
            raise ArgumentError(f"Vertex {label} is not a vertex of the {n}-simplex.")
    pieces = {}
    for face in all_faces(n):
        expr = MultiPoly.linear(face, {label: values[label] for label in face.indices if label in values})
        if not expr.is_zero():
            pieces[face] = (Mode(Fraction(0), Fraction(1), expr),)
    layers = [PiecewiseSolution(n, pieces)] + [PiecewiseSolution(n) for _ in range(n)]
    return GlobalSolution(n, layers)


@dataclass(frozen=True)
class StemReport:
    """Per-face result of L* U = 0"""

    results: dict[Face, bool]

    @property
    def passed(self) -> bool:
        return all(self.results.values())

    def failures(self) -> list[Face]:
        return [face for face, ok in self.results.items() if not ok]

    def to_document(self) -> dict:
        return {
            "passed": self.passed,
            "faces": [{"face": face.to_json(), "pass": ok} for face, ok in self.results.items()],
        }


def stem_check(solution: GlobalSolution) -> StemReport:
    """Check L* U = 0 exactly on every face of dimension >= 1"""
    if not solution.is_stationary():
        raise ArgumentError("The stem check needs a time-independent solution.")
    total = solution.total
    results = {}
    for face in all_faces(solution.n):
        if face.is_vertex:
            continue
        results[face] = apply_backward(total.snapshot(face)).is_zero()
    return StemReport(results)
