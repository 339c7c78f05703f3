import itertools
from fractions import Fraction

from django.test import SimpleTestCase

from certify.inequalities import (
    BellInequality,
    InequalityError,
    algebraic_bound,
    chsh,
    evaluate,
    local_bound,
    mermin3,
    parity_exponent,
    parity_exponent_pairwise,
    parity_family,
)
from certify.scenario import Scenario, pr_box, uniform_behavior


class NamedInequalityTestCase(SimpleTestCase):
    def test_chsh_bounds(self):
        inequality = chsh()
        self.assertEqual(local_bound(inequality), 2)
        self.assertEqual(local_bound(inequality), inequality.declared_local_bound)
        self.assertEqual(algebraic_bound(inequality), 4)

    def test_pr_box_reaches_the_algebraic_bound(self):
        self.assertEqual(evaluate(chsh(), pr_box()), 4)
        self.assertEqual(evaluate(chsh(), uniform_behavior(Scenario(2, 2, 2))), 0)

    def test_mermin3_bounds(self):
        self.assertEqual(local_bound(mermin3()), 2)
        self.assertEqual(algebraic_bound(mermin3()), 4)

    def test_parity_family_terms(self):
        parity3 = parity_family(3)
        self.assertEqual(parity3.coefficient((0, 1, 2), (0, 0, 0)), 1)
        for x in ((0, 1, 1), (1, 0, 1), (1, 1, 0)):
            self.assertEqual(parity3.coefficient((0, 1, 2), x), -1)
        self.assertEqual(local_bound(parity3), 2)
        self.assertTrue(parity3.is_full_correlator)

    def test_parity2_has_no_gap(self):
        parity2 = parity_family(2)
        self.assertEqual(len(parity2.coefficients), 2)
        self.assertEqual(local_bound(parity2), 2)
        self.assertEqual(algebraic_bound(parity2), 2)

    def test_parity_term_count(self):
        for n in (2, 3, 4, 5):
            inequality = parity_family(n)
            self.assertEqual(len(inequality.coefficients), 2 ** (n - 1))
            self.assertEqual(algebraic_bound(inequality), 2 ** (n - 1))

    def test_exponent_forms_agree(self):
        for n in range(1, 7):
            for x in itertools.product((0, 1), repeat=n):
                self.assertEqual(parity_exponent(x), parity_exponent_pairwise(x), x)

    def test_parity_family_needs_two_parties(self):
        with self.assertRaises(InequalityError):
            parity_family(1)


class BellInequalityTestCase(SimpleTestCase):
    def test_probability_form_matches_correlators(self):
        beta = chsh().probability_form()
        for box in (pr_box(), pr_box((1, 1, 0)), uniform_behavior(Scenario(2, 2, 2))):
            self.assertEqual((beta * box.table).sum(), evaluate(chsh(), box))

    def test_dict_round_trip(self):
        payload = mermin3().as_dict()
        self.assertEqual(payload["terms"][0], {"subset": [0, 1, 2], "inputs": [0, 0, 1], "coeff": "1"})
        restored = BellInequality.from_dict(payload)
        self.assertEqual(restored.coefficients, mermin3().coefficients)
        self.assertEqual(restored.name, "mermin3")

    def test_zero_terms_are_dropped(self):
        inequality = BellInequality(Scenario(2, 2, 2), {((0,), (0,)): 0, ((0, 1), (1, 1)): Fraction(1, 2)})
        self.assertEqual(list(inequality.coefficients), [((0, 1), (1, 1))])
        self.assertTrue(inequality.is_full_correlator)

    def test_malformed_inequalities(self):
        with self.assertRaises(InequalityError):
            BellInequality(Scenario(2, 2, 3), {((0, 1), (0, 0)): 1})
        with self.assertRaises(InequalityError):
            BellInequality(Scenario(2, 2, 2), {((0, 2), (0, 0)): 1})
        with self.assertRaises(InequalityError):
            BellInequality(Scenario(2, 2, 2), {((0, 1), (0,)): 1})
        with self.assertRaises(InequalityError):
            BellInequality.from_dict({"name": "broken"})

    def test_scenario_mismatch(self):
        with self.assertRaises(InequalityError):
            evaluate(mermin3(), pr_box())
