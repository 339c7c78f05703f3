from pathlib import Path

from ...services import render_repro_markdown, run_repro
from ._base import CertifyCommand


class Command(CertifyCommand):
    help = "Run every reproducible claim and print a markdown PASS/FAIL report."
    name = "repro"
    scenario_arguments = False

    def add_command_arguments(self, parser):
        parser.add_argument("--count", type=int, help="Sampled (3,2,2) objectives (default CERTIFY_SAMPLE_COUNT)")
        parser.add_argument("--seed", type=int, help="Seed for sampling and random checks (default CERTIFY_SEED)")
        parser.add_argument("--eps", help="Comma-separated relaxation schedule")
        parser.add_argument("--oracle-cases", type=int, default=1000, help="Random cases per oracle check")
        parser.add_argument("--output", help="Also write the markdown report to this path")

    def run(self, config, **options):
        rows = run_repro(
            sample_count=options.get("count"),
            seed=config.seed,
            schedule=config.eps or None,
            oracle_cases=options.get("oracle_cases", 1000),
        )
        report = render_repro_markdown(rows)
        if config.output:
            Path(config.output).write_text(report)
        self.stdout.write(report, ending="")
        return {"claims": rows}, all(row["passed"] for row in rows)

    def records(self, config, payload, passed):
        return [
            {
                "command": f"repro:{index}",
                "parameters": config.as_dict(),
                "result": row,
                "passed": row["passed"],
            }
            for index, row in enumerate(payload["claims"], start=1)
        ]
