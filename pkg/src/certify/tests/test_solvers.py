from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from helpers.solvers import (
    LinearProgram,
    SemidefiniteProgram,
    SolverError,
    exact_rank,
    ldl_psd_certificate,
    solve_exact,
    solve_lp,
    solve_sdp,
    solve_sdp_projection,
)


class SimplexTestCase(SimpleTestCase):
    def setUp(self):
        # max x + y  s.t.  x + 2y <= 4,  3x + y <= 6
        self.lp = LinearProgram(
            objective=(1, 1),
            ineq_matrix=((1, 2), (3, 1)),
            ineq_rhs=(4, 6),
        )

    def test_exact_optimum_with_certificate(self):
        solution = solve_lp(self.lp)
        self.assertTrue(solution.is_optimal)
        self.assertEqual(solution.value, Fraction(14, 5))
        self.assertEqual(solution.point, (Fraction(8, 5), Fraction(6, 5)))
        self.assertTrue(solution.certified)
        self.assertEqual(solution.dual_value, Fraction(14, 5))
        self.assertEqual(solution.tight_inequalities, (0, 1))

    def test_float_mode_matches(self):
        lp = LinearProgram(
            objective=(1, 1),
            ineq_matrix=((1, 2), (3, 1)),
            ineq_rhs=(4, 6),
            numeric_mode="float",
        )
        solution = solve_lp(lp)
        self.assertAlmostEqual(solution.value, 2.8, places=9)

    def test_infeasible(self):
        lp = LinearProgram(objective=(1,), ineq_matrix=((1,),), ineq_rhs=(-1,))
        self.assertEqual(solve_lp(lp).status, "infeasible")

    def test_unbounded(self):
        lp = LinearProgram(objective=(1,), ineq_matrix=((-1,),), ineq_rhs=(0,))
        self.assertEqual(solve_lp(lp).status, "unbounded")

    def test_free_variables_and_minimization(self):
        # min x  s.t.  x + y = -3,  y <= 0,  x and y free
        lp = LinearProgram(
            objective=(1, 0),
            eq_matrix=((1, 1),),
            eq_rhs=(-3,),
            ineq_matrix=((0, 1),),
            ineq_rhs=(0,),
            maximize=False,
            nonnegative=False,
        )
        solution = solve_lp(lp)
        self.assertEqual(solution.value, -3)
        self.assertEqual(solution.point, (Fraction(-3), Fraction(0)))

    def test_fixed_free_variable(self):
        lp = LinearProgram(objective=(1,), eq_matrix=((1,),), eq_rhs=(-3,), maximize=False, nonnegative=False)
        solution = solve_lp(lp)
        self.assertTrue(solution.is_optimal)
        self.assertEqual(solution.value, -3)
        self.assertEqual(solution.point, (Fraction(-3),))

    def test_degenerate_problem_terminates(self):
        # several constraints tight at the optimum (0, 1)
        lp = LinearProgram(
            objective=(0, 1),
            ineq_matrix=((1, 1), (-1, 1), (0, 1), (1, 2)),
            ineq_rhs=(1, 1, 1, 2),
        )
        solution = solve_lp(lp)
        self.assertEqual(solution.value, 1)

    def test_row_length_is_checked(self):
        with self.assertRaises(SolverError):
            LinearProgram(objective=(1, 1), ineq_matrix=((1,),), ineq_rhs=(1,))


class ExactLinearAlgebraTestCase(SimpleTestCase):
    def test_rank(self):
        self.assertEqual(exact_rank([[1, 2], [2, 4]]), 1)
        self.assertEqual(exact_rank([[1, 0], [0, "1/3"]]), 2)

    def test_solve(self):
        self.assertEqual(solve_exact([[2, 1], [1, 3]], [3, 5]), [Fraction(4, 5), Fraction(7, 5)])

    def test_singular_system(self):
        with self.assertRaises(ValueError):
            solve_exact([[1, 2], [2, 4]], [1, 2])

    def test_psd_certificate(self):
        certificate = ldl_psd_certificate([[1, 1], [1, 1]])
        self.assertTrue(certificate.is_psd)
        self.assertEqual(certificate.rank, 1)

    def test_indefinite_matrix(self):
        certificate = ldl_psd_certificate([[1, 2], [2, 1]])
        self.assertFalse(certificate.is_psd)
        self.assertIn("negative pivot", certificate.failure)


class SemidefiniteTestCase(SimpleTestCase):
    def make_sdp(self, cap=None):
        # maximize Γ01 over 2x2 correlation matrices, optionally with Γ01 <= cap
        off = np.array([[0.0, 1.0], [1.0, 0.0]])
        equalities = ((np.diag([2.0, 0.0]), 1.0), (np.diag([0.0, 2.0]), 1.0))
        inequalities = ((off, cap, "<="),) if cap is not None else ()
        return SemidefiniteProgram(2, off, equalities, inequalities)

    def test_interior_point(self):
        solution = solve_sdp(self.make_sdp())
        self.assertTrue(solution.converged)
        self.assertAlmostEqual(solution.value, 1.0, places=5)
        self.assertGreater(solution.min_eigenvalue, -1e-6)

    def test_interior_point_with_inequality(self):
        solution = solve_sdp(self.make_sdp(cap=0.5))
        self.assertTrue(solution.converged)
        self.assertAlmostEqual(solution.value, 0.5, places=6)

    def test_projection_oracle(self):
        solution = solve_sdp_projection(self.make_sdp(cap=0.5))
        self.assertTrue(solution.converged)
        self.assertAlmostEqual(solution.value, 0.5, places=4)

    def test_rejects_asymmetric_objective(self):
        with self.assertRaises(SolverError):
            SemidefiniteProgram(2, [[0.0, 1.0], [0.0, 0.0]], ((np.eye(2), 1.0),))
