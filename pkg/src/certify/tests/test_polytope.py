from fractions import Fraction

from django.test import SimpleTestCase, override_settings, tag

from certify.polytope import (
    BudgetExceededError,
    enumerate_vertices,
    local_deterministic_vertices,
    merge_vertex_sets,
    ns_affine_dimension,
    ns_parametrization,
    ns_randomness_bound,
    randomness_gap,
    sample_vertices,
    vertex_rows,
    zero_count,
)
from certify.scenario import BehaviorError, Scenario, pr_box, uniform_behavior


class ParametrizationTestCase(SimpleTestCase):
    def test_dimensions(self):
        for label, expected in (("2,2,2", 8), ("3,2,2", 26), ("2,3,2", 15), ("2,2,3", 24)):
            scenario = Scenario.parse(label)
            self.assertEqual(ns_parametrization(scenario).dimension, expected, label)
            self.assertEqual(ns_affine_dimension(scenario), expected, label)

    def test_extract_then_reconstruct(self):
        p = ns_parametrization(Scenario(2, 2, 2))
        box = pr_box((0, 1, 1))
        self.assertEqual(p.reconstruct(p.extract(box)), box)

    def test_vertex_check(self):
        p = ns_parametrization(Scenario(2, 2, 2))
        self.assertTrue(p.is_vertex(p.extract(pr_box())))
        self.assertFalse(p.is_vertex(p.extract(uniform_behavior(Scenario(2, 2, 2)))))

    def test_wrong_scenario(self):
        p = ns_parametrization(Scenario(2, 2, 2))
        with self.assertRaises(BehaviorError):
            p.extract(uniform_behavior(Scenario(3, 2, 2)))


class VertexEnumerationTestCase(SimpleTestCase):
    def setUp(self):
        self.scenario = Scenario(2, 2, 2)
        self.vertices = enumerate_vertices(ns_parametrization(self.scenario))

    def test_two_party_counts(self):
        self.assertEqual(len(self.vertices), 24)
        self.assertEqual(len(self.vertices.deterministic()), 16)
        self.assertEqual(len(self.vertices.nonlocal_vertices()), 8)

    def test_nonlocal_vertices_are_pr_boxes(self):
        boxes = {pr_box((a, b, c)).key() for a in (0, 1) for b in (0, 1) for c in (0, 1)}
        self.assertEqual({v.key() for v in self.vertices.nonlocal_vertices()}, boxes)

    def test_every_vertex_meets_the_zero_count(self):
        for vertex in self.vertices:
            self.assertTrue(zero_count(vertex).passed)

    def test_local_deterministic_vertices(self):
        local = local_deterministic_vertices(self.scenario)
        self.assertEqual(len(local), 16)
        self.assertTrue(local.keys() <= self.vertices.keys())

    def test_dimension_guard(self):
        with self.assertRaises(BudgetExceededError):
            enumerate_vertices(ns_parametrization(Scenario(3, 2, 2)))

    def test_ray_guard(self):
        with self.assertRaises(BudgetExceededError):
            enumerate_vertices(ns_parametrization(self.scenario), ray_limit=5)

    def test_strategy_limit(self):
        with self.assertRaises(BudgetExceededError):
            local_deterministic_vertices(self.scenario, limit=10)


class VertexSamplingTestCase(SimpleTestCase):
    def test_samples_are_enumerated_vertices(self):
        p = ns_parametrization(Scenario(2, 2, 2))
        known = enumerate_vertices(p).keys()
        sampled = sample_vertices(p, count=60, seed=3)
        self.assertGreater(len(sampled), 0)
        self.assertTrue(sampled.keys() <= known)
        self.assertEqual(sampled.method, "sample")

    def test_sampling_is_reproducible(self):
        p = ns_parametrization(Scenario(2, 2, 2))
        first = sample_vertices(p, count=30, seed=11)
        second = sample_vertices(p, count=30, seed=11)
        self.assertEqual([v.key() for v in first], [v.key() for v in second])

    def test_merge_drops_duplicates(self):
        merged = merge_vertex_sets(Scenario(2, 2, 2), [[pr_box(), pr_box()], [pr_box((1, 0, 0))]])
        self.assertEqual(len(merged), 2)

    @tag("slow")
    def test_three_party_samples_meet_the_zero_count(self):
        sampled = sample_vertices(ns_parametrization(Scenario(3, 2, 2)), count=40, seed=5)
        self.assertGreater(len(sampled.nonlocal_vertices()), 0)
        for vertex in sampled:
            self.assertTrue(zero_count(vertex).passed)
            self.assertTrue(all(vertex.max_entry(x) >= Fraction(1, 7) for x in vertex.scenario.input_strings()))

    @tag("slow")
    def test_three_party_samples_reach_one_sixth(self):
        sampled = sample_vertices(ns_parametrization(Scenario(3, 2, 2)), count=500)
        randomness = [min(v.max_entry(x) for x in v.scenario.input_strings()) for v in sampled]
        self.assertTrue(all(zero_count(vertex).passed for vertex in sampled))
        self.assertEqual(min(randomness), Fraction(1, 6))


class ZeroCountTestCase(SimpleTestCase):
    def test_bounds(self):
        self.assertEqual(ns_randomness_bound(Scenario(2, 2, 2)), Fraction(1, 3))
        self.assertEqual(ns_randomness_bound(Scenario(3, 2, 2)), Fraction(1, 7))
        self.assertEqual(ns_randomness_bound(Scenario(2, 2, 3)), Fraction(1, 5))
        self.assertEqual(ns_randomness_bound(Scenario(1, 2, 2)), 1)

    def test_pr_box_zero_counts(self):
        report = zero_count(pr_box())
        self.assertEqual(report.counts, (2, 2, 2, 2))
        self.assertEqual(report.bound, 1)
        self.assertTrue(report.passed)
        self.assertEqual(report.implied_bounds[0], Fraction(1, 2))

    def test_uniform_behavior_fails(self):
        report = zero_count(uniform_behavior(Scenario(2, 2, 2)))
        self.assertEqual(report.minimum, 0)
        self.assertFalse(report.passed)

    def test_float_behavior_rejected(self):
        with self.assertRaises(BehaviorError):
            zero_count(uniform_behavior(Scenario(2, 2, 2), "float"))

    def test_two_party_gap_is_not_tight(self):
        scenario = Scenario(2, 2, 2)
        gap = randomness_gap(scenario, enumerate_vertices(ns_parametrization(scenario)))
        self.assertEqual(gap.bound, Fraction(1, 3))
        self.assertEqual(gap.observed, Fraction(1, 2))
        self.assertFalse(gap.tight)

    def test_gap_needs_vertices(self):
        with self.assertRaises(BehaviorError):
            randomness_gap(Scenario(2, 2, 2), [])

    def test_vertex_rows(self):
        rows = vertex_rows([pr_box()])
        self.assertEqual(len(rows), 16)
        self.assertEqual(rows[0], (0, 0, 0, Fraction(1, 2)))


@override_settings(CERTIFY_ENUMERATION_DIM_LIMIT=4)
class EnumerationSettingsTestCase(SimpleTestCase):
    def test_dimension_limit_comes_from_settings(self):
        with self.assertRaises(BudgetExceededError):
            enumerate_vertices(ns_parametrization(Scenario(2, 2, 2)))
