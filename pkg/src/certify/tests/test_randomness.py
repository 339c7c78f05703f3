from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from certify.inequalities import InequalityError, chsh, mermin3, parity_family
from certify.polytope import local_deterministic_vertices
from certify.randomness import (
    CertificationError,
    Transformation,
    apply_transformation,
    certify_uniform_output,
    correlator_sign,
    fixes_inequality,
    guessing_probability_local,
    guessing_probability_ns,
    hamming_distance,
    invariant_transformation_family,
    min_entropy,
    report_from_certificate,
)
from certify.scenario import BehaviorError, Scenario, is_no_signaling, mixture, pr_box, uniform_behavior
from certify.services import default_x_prime

from .test_scenario import signaling_behavior


class GuessingProbabilityTestCase(SimpleTestCase):
    def test_pr_box_is_half(self):
        report = guessing_probability_ns(pr_box(), "00")
        self.assertEqual(report.guessing_probability, Fraction(1, 2))
        self.assertEqual(report.min_entropy, 1.0)
        self.assertTrue(report.certified)
        self.assertEqual(report.correlation_set, "NS")

    def test_decomposition_recombines(self):
        noisy = mixture([(Fraction(3, 4), pr_box()), (Fraction(1, 4), uniform_behavior(Scenario(2, 2, 2)))])
        report = guessing_probability_ns(noisy, (1, 1))
        self.assertTrue(np.array_equal(report.recombined(), noisy.table))
        self.assertGreaterEqual(report.guessing_probability, Fraction(1, 2))
        self.assertLessEqual(report.guessing_probability, 1)

    def test_local_behavior_is_fully_predictable(self):
        report = guessing_probability_ns(uniform_behavior(Scenario(2, 2, 2)), (0, 1))
        self.assertEqual(report.guessing_probability, 1)
        self.assertEqual(report.min_entropy, 0.0)

    def test_float_mode(self):
        report = guessing_probability_ns(pr_box().to_float(), (0, 0))
        self.assertAlmostEqual(float(report.guessing_probability), 0.5, places=9)

    def test_signaling_behavior_rejected(self):
        with self.assertRaises(BehaviorError):
            guessing_probability_ns(signaling_behavior(), (0, 0))

    def test_classical_set(self):
        report = guessing_probability_local(uniform_behavior(Scenario(2, 2, 2)), (0, 0))
        self.assertEqual(report.guessing_probability, 1)
        self.assertEqual(report.correlation_set, "C")
        self.assertEqual(sum(term.weight for term in report.decomposition), 1)
        with self.assertRaises(BehaviorError):
            guessing_probability_local(pr_box(), (0, 0))

    def test_min_entropy_range(self):
        self.assertEqual(min_entropy(Fraction(1, 8)), 3.0)
        with self.assertRaises(ValueError):
            min_entropy(0)


class TransformationTestCase(SimpleTestCase):
    def test_signs(self):
        self.assertEqual(hamming_distance((0, 1, 1), (1, 1, 0)), 2)
        self.assertEqual(correlator_sign((0, 1), (0, 1), (0, 1)), 1)
        self.assertEqual(correlator_sign((0, 1), (0, 1), (1, 1)), -1)

    def test_transformation_is_an_involution(self):
        flip = Transformation.parse("01")
        once = apply_transformation(pr_box(), flip)
        self.assertTrue(is_no_signaling(once).is_no_signaling)
        self.assertNotEqual(once, pr_box())
        self.assertEqual(apply_transformation(once, flip), pr_box())

    def test_transformation_needs_matching_length(self):
        with self.assertRaises(BehaviorError):
            apply_transformation(pr_box(), Transformation((0, 1, 1)))

    def test_fixing_transformations(self):
        self.assertTrue(fixes_inequality(parity_family(2), (0, 0)))
        self.assertFalse(fixes_inequality(chsh(), (1, 0)))

    def test_structured_family(self):
        family = invariant_transformation_family(4)
        self.assertEqual([str(t) for t in family], ["0000", "1001", "0101", "0011"])
        with self.assertRaises(InequalityError):
            invariant_transformation_family(3)


class SymmetryCertificateTestCase(SimpleTestCase):
    def test_parity4(self):
        certificate = certify_uniform_output(parity_family(4), (1, 1, 1, 0), uniqueness_assumed=True)
        self.assertEqual(certificate.conclusion, Fraction(1, 16))
        self.assertEqual(certificate.covered, 15)
        self.assertEqual(report_from_certificate(certificate).min_entropy, 4.0)

    def test_mermin3_generic_search(self):
        certificate = certify_uniform_output(mermin3(), "000", uniqueness_assumed=True, search="generic")
        self.assertEqual(certificate.conclusion, Fraction(1, 8))
        self.assertEqual(certificate.search, "generic")
        self.assertEqual(len(certificate.witnesses), 7)

    def test_parity3_default_input(self):
        certificate = certify_uniform_output(parity_family(3), (1, 0, 0), uniqueness_assumed=True)
        self.assertEqual(certificate.conclusion, Fraction(1, 8))

    def test_uncovered_subset_is_reported(self):
        with self.assertRaises(CertificationError) as context:
            certify_uniform_output(parity_family(3), (1, 1, 0), uniqueness_assumed=True)
        self.assertIn((0, 1, 2), context.exception.uncovered)

    def test_uniqueness_is_required(self):
        with self.assertRaises(CertificationError):
            certify_uniform_output(parity_family(4), (1, 1, 1, 0), uniqueness_assumed=False)

    def test_every_even_parity_certifies_uniform_output(self):
        for n in (2, 4, 6, 8, 10):
            x_prime = default_x_prime(n)
            certificate = certify_uniform_output(parity_family(n), x_prime, uniqueness_assumed=True)
            self.assertEqual(certificate.conclusion, Fraction(1, 2 ** n), n)
            self.assertEqual(certificate.covered, 2 ** n - 1, n)


class DeterministicPointTestCase(SimpleTestCase):
    def test_deterministic_points_are_fully_predictable(self):
        scenario = Scenario(2, 2, 2)
        vertices = local_deterministic_vertices(scenario)
        self.assertEqual(len(vertices), 16)
        for vertex in vertices:
            for x0 in scenario.input_strings():
                self.assertEqual(guessing_probability_ns(vertex, x0).guessing_probability, 1)
