"""Tests for single-step, pathwise and global extensions"""

import math
import random
import unittest
from fractions import Fraction

import pytest

from wfext.errors import ArgumentError
from wfext.extension import (
    ExtensionStep,
    PiecewiseSolution,
    extend_eigenfunction,
    extend_solution_once,
    global_extension,
    iterate_extension,
    pathwise_extension,
)
from wfext.operators import eigen_defect, omega
from wfext.polyalg import MultiPoly, RationalFn, restrict
from wfext.simplex import Face, PathSpec, SimplexPoint, superfaces
from wfext.spectral import Mode, proper_basis, proper_solution, vertex_solution

TRIANGLE = Face.full(2)
BASE_EDGE = Face((0, 1), 2)


def p(face, label):
    return MultiPoly.coordinate(face, label)


class ExtensionStepTestCase(unittest.TestCase):
    """Unit tests for ExtensionStep and extend_eigenfunction"""

    def test_step_validation(self):
        with self.assertRaises(ArgumentError):
            ExtensionStep(TRIANGLE, 1, 1)
        with self.assertRaises(ArgumentError):
            ExtensionStep(Face((0, 1)), 0, 2)
        self.assertEqual(ExtensionStep(TRIANGLE, 1, 2).source_face, Face((0, 1)))

    def test_constant_from_a_vertex(self):
        edge = Face((0, 1), 1)
        psi = MultiPoly.constant(Face((1,), 1), 1)
        extended = extend_eigenfunction(psi, 0, ExtensionStep(edge, 1, 0))
        self.assertEqual(extended, p(edge, 1))

    def test_edge_eigenfunction_into_triangle(self):
        x = p(BASE_EDGE, 1)
        psi = x * (1 - x)
        extended = extend_eigenfunction(psi, 1, ExtensionStep(TRIANGLE, 1, 2))
        self.assertEqual(extended, p(TRIANGLE, 0) * p(TRIANGLE, 1))
        self.assertTrue(eigen_defect(extended, 1).is_zero())

    def test_boundary_values(self):
        x = p(BASE_EDGE, 1)
        psi = x * (1 - x)
        extended = extend_eigenfunction(psi, 1, ExtensionStep(TRIANGLE, 1, 2))
        self.assertEqual(restrict(extended, Face((0, 1))), psi)
        self.assertTrue(restrict(extended, Face((0, 2))).is_zero())

    def test_rejects_non_eigenfunctions(self):
        x = p(BASE_EDGE, 1)
        with self.assertRaises(ArgumentError):
            extend_eigenfunction(x * x, 1, ExtensionStep(TRIANGLE, 1, 2))
        with self.assertRaises(ArgumentError):
            extend_eigenfunction(x * (1 - x), 1, ExtensionStep(TRIANGLE, 0, 1))


class StepIdentityTestCase(unittest.TestCase):
    """Every proper mode on every facet, carried in by every admissible step"""

    def check_simplex(self, n, degree):
        full = Face.full(n)
        for s in full.indices:
            facet = full.without(s)
            for pair in proper_basis(facet, degree):
                psi, kappa = pair.eigenfunction, pair.kappa
                for r in facet.indices:
                    label = f"kappa = {kappa}, r = {r}, s = {s}"
                    extended = extend_eigenfunction(psi, kappa, ExtensionStep(full, r, s))
                    self.assertTrue(eigen_defect(extended, kappa).is_zero(), msg=label)
                    self.assertEqual(restrict(extended, facet), psi, msg=label)
                    self.assertTrue(restrict(extended, full.without(r)).is_zero(), msg=label)
                    for k in facet.indices:
                        if k == r:
                            continue
                        side = full.without(k)
                        lower = restrict(psi, facet.without(k))
                        self.assertTrue(lower.is_zero(), msg=label)
                        carried = extend_eigenfunction(lower, kappa, ExtensionStep(side, r, s), check=False)
                        self.assertTrue(carried.is_zero(), msg=label)
                        self.assertTrue(restrict(extended, side).is_zero(), msg=f"{label}, side {side}")

    def test_triangle(self):
        self.check_simplex(2, 5)

    @pytest.mark.slow
    def test_tetrahedron(self):
        self.check_simplex(3, 5)

    def test_side_facet_carries_the_lower_extension(self):
        edge = Face((0, 1), 2)
        psi = p(edge, 0)
        extended = extend_eigenfunction(psi, 0, ExtensionStep(TRIANGLE, 0, 2))
        side = Face((0, 2), 2)
        lower = restrict(psi, Face((0,), 2))
        carried = extend_eigenfunction(lower, 0, ExtensionStep(side, 0, 2))
        self.assertEqual(restrict(extended, side), carried)
        self.assertEqual(carried, p(side, 0))


class ExtendSolutionOnceTestCase(unittest.TestCase):
    """Unit tests for extend_solution_once"""

    def test_single_mode(self):
        solution = proper_solution(omega(BASE_EDGE), BASE_EDGE, 4)
        piece = extend_solution_once(solution, ExtensionStep(TRIANGLE, 1, 2))
        self.assertEqual(piece.face, TRIANGLE)
        (mode,) = piece.modes
        self.assertEqual(mode.kappa, 1)
        self.assertEqual(mode.expr, p(TRIANGLE, 0) * p(TRIANGLE, 1))

    def test_zero_solution(self):
        solution = proper_solution(MultiPoly.zero(BASE_EDGE), BASE_EDGE, 4)
        piece = extend_solution_once(solution, ExtensionStep(TRIANGLE, 0, 2))
        self.assertEqual(piece.modes, ())
        self.assertTrue(piece.snapshot().is_zero())

    def test_stationary_vertex(self):
        edge = Face((0, 1), 1)
        piece = extend_solution_once(vertex_solution(Face((1,), 1), 1), ExtensionStep(edge, 1, 0))
        self.assertEqual(piece.snapshot(), p(edge, 1))


class PathwiseExtensionTestCase(unittest.TestCase):
    """Unit tests for pathwise_extension against the step fold"""

    def test_loss_order_formula(self):
        path = PathSpec(Face((0,), 2), 0, (1, 2))
        extension = pathwise_extension(vertex_solution(path.base, 1), path)
        top = extension.snapshot(TRIANGLE)
        x, y = p(TRIANGLE, 1), p(TRIANGLE, 2)
        self.assertEqual(top, RationalFn(p(TRIANGLE, 0) * x, [(x + y, 1)]))
        self.assertEqual(extension.snapshot(Face((0, 1))), p(Face((0, 1)), 0))
        self.assertEqual(extension.faces(), path.chain())

    def test_single_step_path(self):
        solution = proper_solution(omega(BASE_EDGE), BASE_EDGE, 4)
        extension = pathwise_extension(solution, PathSpec(BASE_EDGE, 1, (2,)))
        self.assertEqual(extension.snapshot(TRIANGLE), p(TRIANGLE, 0) * p(TRIANGLE, 1))

    def test_closed_form_matches_step_fold(self):
        rng = random.Random(17)
        for _ in range(20):
            n = rng.randint(2, 4)
            labels = list(range(n + 1))
            rng.shuffle(labels)
            if rng.random() < 0.5:
                base = Face((labels[0],), n)
                solution = vertex_solution(base, Fraction(rng.randint(1, 5), 3))
                anchor, added = labels[0], labels[1:]
            else:
                base = Face(labels[:2], n)
                x = MultiPoly.coordinate(base, base.chart.free_labels[0])
                f = omega(base) * (x * rng.randint(-3, 3) + 1)
                solution = proper_solution(f, base, 4)
                anchor, added = rng.choice(labels[:2]), labels[2:]
            path = PathSpec(base, anchor, tuple(added))
            closed = pathwise_extension(solution, path)
            folded = iterate_extension(solution, path, check=True)
            for face in path.chain():
                self.assertEqual(closed.snapshot(face), folded.snapshot(face), msg=f"{path.sequence} on {face}")
            self.assertTrue(closed.check_modes())

    def test_base_mismatch(self):
        solution = proper_solution(omega(BASE_EDGE), BASE_EDGE, 4)
        with self.assertRaises(ArgumentError):
            pathwise_extension(solution, PathSpec(Face((0, 2), 2), 0, (1,)))
        with self.assertRaises(ArgumentError):
            iterate_extension(solution, PathSpec(Face((1,), 2), 1, (0, 2)))


class GlobalExtensionTestCase(unittest.TestCase):
    """Unit tests for global_extension"""

    def test_vertex_constant_reduces_to_the_coordinate(self):
        base = Face((1,), 3)
        extension = global_extension(vertex_solution(base, 1))
        for face in superfaces(base, 3):
            self.assertEqual(extension.snapshot(face), p(face, 1), msg=str(face))
        self.assertTrue(extension.snapshot(Face((0, 2, 3), 3)).is_zero())

    def test_full_simplex_base_is_the_solution(self):
        solution = proper_solution(omega(TRIANGLE), TRIANGLE, 3)
        extension = global_extension(solution)
        self.assertEqual(extension.faces(), [TRIANGLE])
        self.assertEqual(extension.snapshot(TRIANGLE), omega(TRIANGLE))

    def test_edge_mode_into_triangle(self):
        solution = proper_solution(omega(BASE_EDGE), BASE_EDGE, 4)
        extension = global_extension(solution, n=2)
        self.assertEqual(extension.snapshot(TRIANGLE), p(TRIANGLE, 0) * p(TRIANGLE, 1))
        self.assertEqual(extension.mode_defects(), [])

    def test_limits_towards_the_faces(self):
        solution = proper_solution(omega(BASE_EDGE), BASE_EDGE, 4)
        extension = global_extension(solution, n=2)
        eps = 1e-5
        source = SimplexPoint(BASE_EDGE, (0.3, 0.7))
        near_source = SimplexPoint(TRIANGLE, (0.3 * (1 - eps), 0.7 * (1 - eps), eps))
        self.assertAlmostEqual(extension.evaluate(near_source, -1.0), solution.evaluate(source, -1.0), delta=1e-4)
        near_empty = SimplexPoint(TRIANGLE, (0.4 * (1 - eps), eps, 0.6 * (1 - eps)))
        self.assertAlmostEqual(extension.evaluate(near_empty, -1.0), 0.0, delta=1e-4)

    def test_worker_count_does_not_change_the_result(self):
        base = Face((0, 1), 3)
        solution = proper_solution(omega(base) * (p(base, 1) + 2), base, 5)
        serial = global_extension(solution, n=3)
        threaded = global_extension(solution, n=3, workers=3)
        for face in serial.faces():
            self.assertEqual(serial.snapshot(face), threaded.snapshot(face))

    def test_base_mismatch(self):
        solution = vertex_solution(Face((0,), 2), 1)
        with self.assertRaises(ArgumentError):
            global_extension(solution, Face((1,), 2))


class PiecewiseSolutionTestCase(unittest.TestCase):
    """Unit tests for PiecewiseSolution"""

    def setUp(self):
        self.vertex = PiecewiseSolution.single(2, vertex_solution(Face((0,), 2), 2))
        self.edge = PiecewiseSolution.single(2, proper_solution(omega(BASE_EDGE), BASE_EDGE, 4))

    def test_sum_and_merge(self):
        total = self.vertex + self.edge + self.edge
        self.assertEqual(total.faces(), [Face((0,)), BASE_EDGE])
        (mode,) = total.merged().piece(BASE_EDGE).modes
        self.assertEqual(mode.expr, omega(BASE_EDGE) * 2)

    def test_stationary_part(self):
        total = self.vertex + self.edge
        self.assertFalse(total.is_stationary())
        self.assertTrue(total.stationary_part().is_stationary())
        self.assertEqual(total.stationary_part().faces(), [Face((0,))])

    def test_evaluate_selects_the_piece_of_the_point(self):
        total = self.vertex + self.edge
        self.assertEqual(total.evaluate(SimplexPoint.vertex(0, 2), -1.0), 2.0)
        self.assertAlmostEqual(total.evaluate(SimplexPoint.barycenter(BASE_EDGE), 0.0), 0.25)
        self.assertEqual(total.evaluate(SimplexPoint.barycenter(TRIANGLE), -1.0), 0.0)

    def test_mismatched_simplices(self):
        with self.assertRaises(ArgumentError):
            self.vertex + PiecewiseSolution(3)

    def test_mode_defects_are_reported(self):
        broken = PiecewiseSolution(2, {BASE_EDGE: [Mode(Fraction(2), Fraction(1), omega(BASE_EDGE))]})
        self.assertEqual(broken.mode_defects(), [BASE_EDGE])
        self.assertFalse(broken.check_modes())

    def test_document(self):
        document = self.edge.to_document()
        self.assertEqual(document[0]["face"], [0, 1])
        self.assertEqual(document[0]["modes"][0]["kappa"], "1")
        self.assertTrue(math.isclose(float(Fraction(document[0]["modes"][0]["coeff"])), 1.0))
