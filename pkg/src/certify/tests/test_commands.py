import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, tag

from certify.inequalities import mermin3
from certify.models import CertificationRun
from certify.scenario import Scenario, pr_box, uniform_behavior
from certify.utils import behavior_to_dict, dumps


class CommandTestMixin:
    def setUp(self):
        # Scratch directory for behavior and inequality files
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_json(self, name, payload):
        path = Path(self.tmp.name) / name
        path.write_text(dumps(payload))
        return str(path)

    def run_json(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return json.loads(out.getvalue())

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as context:
            call_command(*args, stdout=StringIO(), stderr=StringIO())
        self.assertEqual(context.exception.returncode, code)
        return context.exception


class BoundCommandTestCase(CommandTestMixin, TestCase):
    def test_scenario_triple(self):
        payload = self.run_json("bound", "--scenario", "2,2,2")
        self.assertEqual(payload["bound"], "1/3")
        self.assertEqual(payload["zero_count_bound"], 1)
        self.assertAlmostEqual(payload["min_entropy_bits"], 1.584962500721)

    def test_separate_flags(self):
        payload = self.run_json("bound", "-N", "3", "-M", "2", "-d", "2")
        self.assertEqual(payload["bound"], "1/7")
        self.assertEqual(payload["scenario"], {"N": 3, "M": 2, "d": 2})

    def test_input_errors(self):
        self.assertExitCode(2, "bound")
        self.assertExitCode(2, "bound", "-N", "3")
        self.assertExitCode(2, "bound", "--scenario", "2,2,1")

    def test_save_records_the_run(self):
        call_command("bound", "--scenario", "2,2,3", "--save", stdout=StringIO())
        run = CertificationRun.objects.get()
        self.assertEqual(run.command, "bound")
        self.assertTrue(run.passed)
        self.assertEqual(run.result["bound"], "1/5")
        self.assertEqual(run.parameters["scenario"], "2,2,3")


class GuessCommandTestCase(CommandTestMixin, TestCase):
    def test_pr_box(self):
        path = self.write_json("pr.json", behavior_to_dict(pr_box()))
        payload = self.run_json("guess", "--input", path, "--x0", "00")
        self.assertEqual(payload["guessing_probability"], "1/2")
        self.assertEqual(payload["ns_bound"], "1/3")
        self.assertTrue(payload["above_bound"])
        self.assertTrue(payload["certified"])

    def test_float_mode(self):
        path = self.write_json("pr.json", behavior_to_dict(pr_box()))
        payload = self.run_json("guess", "--input", path, "--x0", "11", "--mode", "float")
        self.assertAlmostEqual(payload["guessing_probability"], 0.5)

    def test_classical_set(self):
        path = self.write_json("uniform.json", behavior_to_dict(uniform_behavior(Scenario(2, 2, 2))))
        payload = self.run_json("guess", "--input", path, "--x0", "01", "--set", "C")
        self.assertEqual(payload["guessing_probability"], "1")
        self.assertEqual(payload["correlation_set"], "C")

    def test_input_errors(self):
        path = self.write_json("pr.json", behavior_to_dict(pr_box()))
        self.assertExitCode(2, "guess", "--input", path, "--x0", "000")
        self.assertExitCode(2, "guess", "--input", path, "--x0", "02")
        self.assertExitCode(2, "guess", "--input", path, "--x0", "00", "--set", "C")
        self.assertExitCode(2, "guess", "--input", str(Path(self.tmp.name) / "missing.json"), "--x0", "00")
        broken = self.write_json("broken.json", {"scenario": {"N": 2, "M": 2, "d": 2}, "p": [["1/2"] * 4] * 4})
        self.assertExitCode(2, "guess", "--input", broken, "--x0", "00")


class VerticesCommandTestCase(CommandTestMixin, TestCase):
    def test_enumerate_json(self):
        payload = self.run_json("vertices", "--scenario", "2,2,2")
        summary = payload["summary"]
        self.assertEqual(summary["vertex_count"], 24)
        self.assertEqual(summary["deterministic_count"], 16)
        self.assertEqual(summary["nonlocal_count"], 8)
        self.assertEqual(summary["n_min"], 2)
        self.assertEqual(summary["bound"], 1)
        self.assertTrue(summary["all_pass"])
        self.assertEqual(summary["nonlocal_randomness_values"], ["1/2"])
        self.assertEqual(summary["gap"]["observed_min_max_entry"], "1/2")
        self.assertEqual(len(payload["vertices"]), 24)

    def test_csv_to_stdout(self):
        out, err = StringIO(), StringIO()
        call_command("vertices", "--scenario", "2,2,2", "--format", "csv", stdout=out, stderr=err)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "vertex,a,x,p")
        self.assertEqual(len(lines), 1 + 24 * 16)
        self.assertTrue(json.loads(err.getvalue())["all_pass"])

    def test_csv_to_file(self):
        target = Path(self.tmp.name) / "vertices.csv"
        payload = self.run_json("vertices", "--scenario", "2,2,2", "--format", "csv", "--output", str(target))
        self.assertEqual(payload["summary"]["vertex_count"], 24)
        self.assertEqual(len(target.read_text().splitlines()), 1 + 24 * 16)

    def test_sampling(self):
        payload = self.run_json("vertices", "--scenario", "2,2,2", "--method", "sample", "--count", "30", "--seed", "4")
        self.assertEqual(payload["method"], "sample")
        self.assertTrue(payload["summary"]["all_pass"])
        self.assertLessEqual(payload["summary"]["vertex_count"], 24)

    def test_budget_refusals(self):
        self.assertExitCode(3, "vertices", "--scenario", "3,2,2")
        self.assertExitCode(3, "vertices", "--scenario", "2,2,2", "--budget", "5")
        self.assertExitCode(3, "vertices", "--scenario", "2,2,2", "--method", "sample", "--count", "10", "--budget", "5")

    def test_bad_budget(self):
        self.assertExitCode(2, "vertices", "--scenario", "2,2,2", "--budget", "0")


class CertifySymmetryCommandTestCase(CommandTestMixin, TestCase):
    def test_parity2_with_simulation(self):
        payload = self.run_json("certify_symmetry", "-N", "2", "--assume-unique")
        self.assertEqual(payload["x_prime"], "10")
        self.assertEqual(payload["conclusion"], "1/4")
        self.assertEqual(payload["covered_subsets"], 3)
        self.assertTrue(payload["quantum"]["passed"])
        self.assertEqual(payload["report"]["min_entropy_bits"], 2.0)

    def test_parity8_without_simulation(self):
        payload = self.run_json("certify_symmetry", "-N", "8", "--assume-unique", "--simulate-up-to", "6")
        self.assertEqual(payload["x_prime"], "11111110")
        self.assertEqual(payload["conclusion"], "1/256")
        self.assertNotIn("quantum", payload)

    def test_inequality_file(self):
        path = self.write_json("mermin.json", mermin3().as_dict())
        payload = self.run_json("certify_symmetry", "--input", path, "--x0", "000", "--assume-unique")
        self.assertEqual(payload["inequality"], "mermin3")
        self.assertEqual(payload["conclusion"], "1/8")
        self.assertEqual(len(payload["witnesses"]), 7)

    def test_uniqueness_flag_is_required(self):
        self.assertExitCode(1, "certify_symmetry", "-N", "4")

    def test_uncovered_subsets_are_printed(self):
        out = StringIO()
        with self.assertRaises(CommandError) as context:
            call_command("certify_symmetry", "-N", "3", "--x0", "110", "--assume-unique", stdout=out)
        self.assertEqual(context.exception.returncode, 1)
        self.assertIn([0, 1, 2], json.loads(out.getvalue())["uncovered"])

    def test_input_errors(self):
        self.assertExitCode(2, "certify_symmetry", "--assume-unique")
        self.assertExitCode(2, "certify_symmetry", "-N", "1", "--assume-unique")
        self.assertExitCode(2, "certify_symmetry", "-N", "4", "--x0", "10", "--assume-unique")


@tag("slow")
class NpaMerminCommandTestCase(CommandTestMixin, TestCase):
    def test_single_eps_run(self):
        out = StringIO()
        try:
            call_command("npa_mermin", "--eps", "1e-6", "--no-snapshot", "--save", stdout=out)
        except CommandError as exc:
            # one ε is too coarse for the 1e-4 extrapolation check
            self.assertEqual(exc.returncode, 1)
        payload = json.loads(out.getvalue())
        self.assertEqual(payload["schedule"], [1e-6])
        self.assertNotIn("gamma_snapshot", payload)
        self.assertTrue(payload["analytic"]["reconstruction_matches_reference"])
        self.assertTrue(payload["analytic"]["census_matches"])
        self.assertEqual(payload["analytic"]["mermin_value"], "4")
        self.assertEqual(set(payload["outcomes"]), {f"{a}{b}{c}" for a in "01" for b in "01" for c in "01"})
        self.assertEqual(CertificationRun.objects.filter(command="npa_mermin").count(), 1)

    def test_bad_eps(self):
        self.assertExitCode(2, "npa_mermin", "--eps", "1e-4,abc")
        self.assertExitCode(2, "npa_mermin", "--eps", "0.5")


class ReproCommandTestCase(CommandTestMixin, TestCase):
    rows = [
        {"claim": "NS bound", "passed": True, "detail": "1/3, 1/7", "seconds": 0.0},
        {"claim": "zero count", "passed": False, "detail": "n = 0", "seconds": 1.5},
    ]

    def test_report_and_saved_rows(self):
        target = Path(self.tmp.name) / "report.md"
        out = StringIO()
        with mock.patch("certify.management.commands.repro.run_repro", return_value=self.rows) as run:
            with self.assertRaises(CommandError) as context:
                call_command("repro", "--count", "20", "--eps", "1e-4", "--output", str(target), "--save", stdout=out)
        self.assertEqual(context.exception.returncode, 1)
        run.assert_called_once_with(sample_count=20, seed=None, schedule=[1e-4], oracle_cases=1000)
        self.assertIn("| 2 | zero count | FAIL | n = 0 | 1.5 |", out.getvalue())
        self.assertEqual(target.read_text(), out.getvalue())
        self.assertEqual(
            sorted(CertificationRun.objects.values_list("command", "passed")),
            [("repro:1", True), ("repro:2", False)],
        )
