import math

import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from certify.inequalities import evaluate, mermin3, parity_family
from certify.quantum import (
    MeasurementAssignment,
    Observable,
    QuantumSimulationError,
    StateVector,
    correlator,
    ghz_state,
    inequality_value,
    maximal_parity_settings,
    mermin_optimal_settings,
    product_state,
    quantum_behavior,
)


class StateTestCase(SimpleTestCase):
    def test_ghz_correlators(self):
        state = ghz_state(2)
        self.assertAlmostEqual(correlator(state, [Observable.pauli("z")] * 2), 1.0)
        self.assertAlmostEqual(correlator(state, [Observable.pauli("x")] * 2), 1.0)
        self.assertAlmostEqual(correlator(state, [Observable.pauli("z"), None]), 0.0)

    def test_phase_rotates_equatorial_correlator(self):
        state = ghz_state(2, phase=math.pi)
        self.assertAlmostEqual(correlator(state, [Observable.pauli("x")] * 2), -1.0)

    def test_invalid_states(self):
        with self.assertRaises(QuantumSimulationError):
            StateVector([1.0, 0.0, 0.0])
        with self.assertRaises(QuantumSimulationError):
            StateVector([1.0, 1.0])
        with self.assertRaises(QuantumSimulationError):
            ghz_state(1)

    @override_settings(CERTIFY_QUANTUM_MAX_PARTIES=3)
    def test_party_cap(self):
        with self.assertRaises(QuantumSimulationError):
            ghz_state(4)

    def test_bloch_observables(self):
        self.assertTrue(np.allclose(Observable.bloch((0, 0, 2)).matrix, Observable.pauli("z").matrix))
        self.assertTrue(np.allclose(Observable.bloch((0, 1, 0)).matrix, Observable.pauli("y").matrix))
        tilted = Observable.bloch((1, 1, 1))
        self.assertAlmostEqual(correlator(product_state((0,)), [tilted]), 1 / math.sqrt(3))
        with self.assertRaises(QuantumSimulationError):
            Observable.bloch((0, 0, 0))
        with self.assertRaises(QuantumSimulationError):
            Observable.bloch((1, 2))

    def test_invalid_observables(self):
        with self.assertRaises(QuantumSimulationError):
            Observable(np.array([[1.0, 0.0], [0.0, 0.5]]))
        with self.assertRaises(QuantumSimulationError):
            Observable.pauli("w")


class MeasurementTestCase(SimpleTestCase):
    def test_product_state_statistics(self):
        assignment = MeasurementAssignment(((Observable.pauli("z"),), (Observable.pauli("z"),)))
        behavior = quantum_behavior(product_state((1, 0)), assignment)
        self.assertAlmostEqual(float(behavior.probability((1, 0), (0, 0))), 1.0)
        self.assertAlmostEqual(float(behavior.probability((0, 0), (0, 0))), 0.0)

    def test_mermin_settings_give_uniform_outputs_at_000(self):
        assignment, phase = mermin_optimal_settings()
        state = ghz_state(3, phase)
        self.assertAlmostEqual(inequality_value(mermin3(), state, assignment), 4.0)
        behavior = quantum_behavior(state, assignment)
        self.assertAlmostEqual(evaluate(mermin3(), behavior), 4.0)
        column = np.array(behavior.column((0, 0, 0)), dtype=float)
        self.assertTrue(np.allclose(column, 1 / 8))

    def test_assignment_must_cover_every_qubit(self):
        assignment = MeasurementAssignment(((Observable.pauli("z"),),))
        with self.assertRaises(QuantumSimulationError):
            quantum_behavior(ghz_state(2), assignment)

    def test_angles_are_recorded(self):
        assignment = MeasurementAssignment.from_angles([[0.0, math.pi / 2]])
        self.assertEqual(assignment.angles(), [[0.0, math.pi / 2]])
        self.assertEqual(assignment.as_dict(0.5), {"angles": [[0.0, math.pi / 2]], "phase": 0.5})


class ParitySettingsTestCase(SimpleTestCase):
    def test_parity2(self):
        _, _, value = maximal_parity_settings(2)
        self.assertAlmostEqual(value, 2.0, places=6)

    @tag("slow")
    def test_parity_up_to_six_parties(self):
        for n in (3, 4, 5, 6):
            assignment, phase, value = maximal_parity_settings(n)
            self.assertAlmostEqual(value, 2 ** (n - 1), places=5)
            dense = inequality_value(parity_family(n), ghz_state(n, phase), assignment)
            self.assertAlmostEqual(dense, value)
