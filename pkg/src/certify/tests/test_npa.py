from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase, tag

from certify.npa_service import (
    BASIS_LABELS,
    OperatorWord,
    PropagationContradiction,
    PropagationState,
    block_d,
    build_moment_model,
    certify_max_randomness_sdp,
    class_census,
    deterministic_moment_matrix,
    extrapolate,
    functional_value,
    gamma_distance,
    gamma_reference,
    max_single_expectation_sdp,
    mermin_functional,
    probability_functional,
    propagate_stabilizers,
    quantum_moment_matrix,
    reconstruct_gamma,
    reduce_word,
    word_class,
)
from certify.npa_service.programs import relaxation
from certify.npa_service.propagation import tie_block_o
from certify.npa_service.words import IDENTITY
from certify.polytope import deterministic_strategies
from certify.quantum import ghz_state, mermin_optimal_settings
from certify.scenario import Scenario
from helpers.solvers import exact_rank, ldl_psd_certificate


def word(text):
    return OperatorWord.from_string(text)


class OperatorWordTestCase(SimpleTestCase):
    def test_letters_square_to_identity(self):
        self.assertTrue(reduce_word(word("A0A0B1B1")).is_identity)
        self.assertEqual(str(word("A0A1") * word("A1")), "A0")
        self.assertEqual(str(word("-B0") * word("C1")), "-B0C1")

    def test_parties_commute(self):
        self.assertEqual(word("C1A0B0"), word("A0B0C1"))

    def test_class_picks_the_smaller_of_word_and_adjoint(self):
        self.assertEqual(str(word_class(word("A1A0"))), "A0A1")
        self.assertEqual(word("A0A1B1B0").adjoint(), word("A1A0B0B1"))

    def test_unparseable(self):
        with self.assertRaises(ValueError):
            word("X1")


class MomentModelTestCase(SimpleTestCase):
    def setUp(self):
        self.model = build_moment_model()

    def test_basis_and_identity_class(self):
        self.assertEqual([str(w) for w in self.model.basis], list(BASIS_LABELS))
        self.assertEqual(self.model.classes[0], IDENTITY)
        self.assertTrue(all(self.model.class_ids[i, i] == 0 for i in range(len(BASIS_LABELS))))
        self.assertEqual(self.model.class_of(0, self.model.index("A0")), word("A0"))

    def test_tie_count(self):
        off_diagonal = 15 * 14 // 2
        self.assertEqual(len(self.model.ties), off_diagonal - (len(self.model.classes) - 1))

    def test_census_matches_model(self):
        census = class_census()
        self.assertEqual(sum(census.values()), 120)
        expected = {str(cls): len(self.model.entries(cls)) for cls in self.model.classes}
        self.assertEqual(census, expected)

    def test_deterministic_points_respect_the_local_bound(self):
        functional = mermin_functional(self.model)
        values = []
        for strategy in deterministic_strategies(Scenario(3, 2, 2)):
            gamma = deterministic_moment_matrix(strategy, self.model)
            self.assertEqual(self.model.tie_residual(gamma), 0)
            values.append(functional_value(functional, gamma))
        self.assertEqual(max(values), 2)
        self.assertEqual(min(values), -2)

    def test_probability_functional_on_a_deterministic_point(self):
        gamma = deterministic_moment_matrix(((0, 0), (0, 0), (0, 0)), self.model)
        self.assertEqual(functional_value(probability_functional(self.model, "000"), gamma), 1)
        self.assertEqual(functional_value(probability_functional(self.model, "111"), gamma), 0)
        with self.assertRaises(ValueError):
            probability_functional(self.model, "0012")

    def test_quantum_realization(self):
        assignment, phase = mermin_optimal_settings()
        gamma = quantum_moment_matrix(ghz_state(3, phase), assignment, self.model)
        self.assertLess(self.model.tie_residual(gamma), 1e-12)
        self.assertAlmostEqual(functional_value(mermin_functional(self.model).astype(float), gamma), 4.0)
        for outcome in ("000", "011", "101"):
            value = functional_value(probability_functional(self.model, outcome).astype(float), gamma)
            self.assertAlmostEqual(value, 0.125)
        self.assertLess(gamma_distance(gamma, gamma_reference(self.model)), 1e-12)


class PropagationTestCase(SimpleTestCase):
    def setUp(self):
        self.model = build_moment_model()
        self.state = propagate_stabilizers(self.model)

    def test_mermin_terms_are_fixed(self):
        self.assertEqual(self.state.value(word("A0B0C1")), 1)
        self.assertEqual(self.state.value(word("A1B1C1")), -1)

    def test_pair_products_are_fixed(self):
        self.assertEqual(self.state.value(self.model.class_of(7, 8)), 1)

    def test_free_symbols_are_single_observables(self):
        for symbol in self.state.free_symbols(self.model.classes):
            self.assertEqual(symbol.length, 1)

    def test_reconstruction_matches_reference(self):
        reference = gamma_reference(self.model)
        gamma = reconstruct_gamma(self.model, self.state)
        self.assertTrue(np.array_equal(gamma, reference))
        self.assertTrue(ldl_psd_certificate(reference.tolist()).is_psd)
        self.assertEqual(functional_value(mermin_functional(self.model), reference), 4)

    def test_every_outcome_is_an_eighth(self):
        reference = gamma_reference(self.model)
        for outcome in ("000", "001", "010", "011", "100", "101", "110", "111"):
            self.assertEqual(functional_value(probability_functional(self.model, outcome), reference), Fraction(1, 8))

    def test_block_o_alone_zeroes_even_triples_and_pairs(self):
        state = PropagationState()
        tie_block_o(state, self.model)
        self.assertEqual(sum(1 for entry in state.log if entry["rule"] == "block-O"), 16)
        for label in ("A0B1C1", "A1B0C1", "A1B1C0", "A0B0C0", "A0A1", "B0B1", "C0C1"):
            self.assertEqual(state.value(word(label)), 0, label)

    def test_rule_labels(self):
        rules = {entry["rule"] for entry in self.state.log}
        self.assertEqual(rules, {"mermin", "block-O", "stabilizer"})

    def test_nonzero_singles_break_positivity(self):
        for singles in (Fraction(1, 10), Fraction(-1, 20), {"A0": Fraction(1, 100)}):
            gamma = reconstruct_gamma(self.model, self.state, singles=singles)
            self.assertFalse(ldl_psd_certificate(gamma.tolist()).is_psd, singles)

    def test_odd_cycle_zeroes_a_component(self):
        state = PropagationState()
        state.tie(word("A0"), word("B0C1"), 1, "test")
        state.tie(word("B0C1"), word("A0"), -1, "test")
        self.assertEqual(state.value(word("A0")), 0)
        self.assertEqual(state.status(word("B0C1")), "fixed")

    def test_contradiction(self):
        state = PropagationState()
        with self.assertRaises(PropagationContradiction):
            state.tie(IDENTITY, IDENTITY, -1, "test")

    def test_rank_one_block(self):
        self.assertEqual(exact_rank(block_d().tolist()), 1)


class RelaxationTestCase(SimpleTestCase):
    def test_extrapolation(self):
        eps = [1e-4, 1e-6, 1e-8]
        values = [0.5 + 2 * e ** 0.5 + 3 * e for e in eps]
        self.assertAlmostEqual(extrapolate(eps, values), 0.5, places=6)
        self.assertAlmostEqual(extrapolate([1e-4], [0.2]), 0.2)
        with self.assertRaises(ValueError):
            extrapolate([], [])

    def test_eps_range(self):
        model = build_moment_model()
        with self.assertRaises(ValueError):
            relaxation(model, np.zeros((15, 15)), 0.1)

    def test_unknown_single_target(self):
        with self.assertRaises(ValueError):
            max_single_expectation_sdp("D0", 1e-4)

    @tag("slow")
    def test_outcome_probability_near_an_eighth(self):
        result = certify_max_randomness_sdp((0, 0, 0), 1e-6)
        self.assertGreater(result.value, 0.12)
        self.assertLess(result.value, 0.2)
        self.assertLess(result.residual, 1e-4)

    @tag("slow")
    def test_single_expectation_is_free_without_mermin(self):
        result = max_single_expectation_sdp("A1", None)
        self.assertAlmostEqual(result.value, 1.0, places=3)
