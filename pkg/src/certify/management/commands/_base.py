"""
Shared plumbing for the certify management commands.

Exit codes
----------
0 success, 1 failed internal assertion, 2 input error, 3 budget refusal,
4 solver failure.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from helpers.solvers import SolverError

from ...npa_service import PropagationContradiction
from ...polytope import BudgetExceededError
from ...quantum import QuantumSimulationError
from ...randomness import CertificationError
from ...scenario import BehaviorError, Scenario, parse_digits
from ...utils import batch_insert_runs, dumps

logger = logging.getLogger(__name__)

EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_SOLVER = 4


@dataclass
class RunConfig:
    """Validated options of one command run; stored as the run's parameters."""

    command: str
    scenario: Optional[str] = None
    input: Optional[str] = None
    output: Optional[str] = None
    x0: Optional[str] = None
    seed: Optional[int] = None
    mode: Optional[str] = None
    tolerance: float = 1e-9
    eps: list = field(default_factory=list)
    budget: Optional[int] = None
    format: str = "json"

    @classmethod
    def from_options(cls, command: str, options: dict, with_scenario: bool = True) -> "RunConfig":
        mode = options.get("mode")
        if mode not in (None, "rational", "float"):
            raise BehaviorError(f"--mode must be rational or float, got {mode!r}")
        fmt = options.get("format") or "json"
        if fmt not in ("json", "csv"):
            raise BehaviorError(f"--format must be json or csv, got {fmt!r}")
        budget = options.get("budget")
        if budget is not None and budget < 1:
            raise BehaviorError("--budget must be a positive integer")
        return cls(
            command=command,
            scenario=_scenario_label(options) if with_scenario else None,
            input=options.get("input"),
            output=options.get("output"),
            x0=options.get("x0"),
            seed=options.get("seed"),
            mode=mode,
            tolerance=getattr(settings, "CERTIFY_TOLERANCE", 1e-9),
            eps=parse_eps(options.get("eps")),
            budget=budget,
            format=fmt,
        )

    def get_scenario(self) -> Scenario:
        if self.scenario is None:
            raise BehaviorError("give the scenario with --scenario N,M,d or -N/-M/-d")
        return Scenario.parse(self.scenario)

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v not in (None, [])}


def _scenario_label(options: dict) -> Optional[str]:
    if options.get("scenario"):
        return options["scenario"]
    parts = (options.get("parties"), options.get("inputs"), options.get("outputs"))
    if all(p is None for p in parts):
        return None
    if any(p is None for p in parts):
        raise BehaviorError("-N, -M and -d must be given together")
    return ",".join(str(p) for p in parts)


def parse_eps(text) -> list:
    """Read "1e-4,1e-6,1e-8"; empty means the configured schedule."""
    if not text:
        return []
    try:
        return [float(part) for part in str(text).split(",") if part.strip()]
    except ValueError as exc:
        raise BehaviorError(f"--eps must be a comma-separated list of numbers, got {text!r}") from exc


def parse_x0(text, parties: int) -> tuple:
    if text is None:
        raise BehaviorError("--x0 is required")
    return parse_digits(text, parties)


class CertifyCommand(BaseCommand):
    """
    Base class: subclasses implement `run(config, **options)` returning
    ``(payload, passed)``; errors become CommandError with a distinct
    returncode.
    """

    name = "certify"
    scenario_arguments = True

    def add_arguments(self, parser):
        if self.scenario_arguments:
            parser.add_argument("--scenario", help="Scenario as N,M,d")
            parser.add_argument("-N", dest="parties", type=int, help="Number of parties")
            parser.add_argument("-M", dest="inputs", type=int, help="Inputs per party")
            parser.add_argument("-d", dest="outputs", type=int, help="Outputs per input")
        parser.add_argument("--save", action="store_true", help="Record the run in the database")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, config: RunConfig, **options):
        raise NotImplementedError

    def emit(self, payload) -> None:
        self.stdout.write(dumps(payload))

    def records(self, config: RunConfig, payload, passed: bool) -> list:
        """CertificationRun rows for --save."""
        return [{
            "command": self.name,
            "parameters": config.as_dict(),
            "result": payload,
            "passed": passed,
        }]

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_options(self.name, options, self.scenario_arguments)
            payload, passed = self.run(config, **options)
        except CertificationError as exc:
            if exc.uncovered:
                self.stdout.write(dumps({"error": str(exc), "uncovered": [list(s) for s in exc.uncovered]}))
            raise CommandError(str(exc), returncode=EXIT_ASSERTION) from exc
        except PropagationContradiction as exc:
            raise CommandError(str(exc), returncode=EXIT_ASSERTION) from exc
        except BudgetExceededError as exc:
            raise CommandError(str(exc), returncode=EXIT_BUDGET) from exc
        except (SolverError, QuantumSimulationError) as exc:
            logger.error(f"{self.name}: {exc}")
            raise CommandError(str(exc), returncode=EXIT_SOLVER) from exc
        except ValueError as exc:
            raise CommandError(str(exc), returncode=EXIT_INPUT) from exc

        if options.get("save"):
            saved = batch_insert_runs(self.records(config, payload, passed))
            logger.info(f"{self.name}: saved {saved} run(s)")
        if not passed:
            raise CommandError(f"{self.name}: an internal check failed", returncode=EXIT_ASSERTION)
