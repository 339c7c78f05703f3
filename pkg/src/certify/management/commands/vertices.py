import io

from ...services import get_vertex_report, get_vertex_set
from ...utils import dumps, write_vertex_csv
from ._base import CertifyCommand


class Command(CertifyCommand):
    help = (
        "Enumerate or sample the vertices of a no-signaling polytope and check "
        "the zero count n >= (d-1)^N on each of them."
    )
    name = "vertices"

    def add_command_arguments(self, parser):
        parser.add_argument("--method", choices=["enumerate", "sample"], default="enumerate")
        parser.add_argument("--count", type=int, help="Objectives to sample (default CERTIFY_SAMPLE_COUNT)")
        parser.add_argument("--seed", type=int, help="Sampling seed (default CERTIFY_SEED)")
        parser.add_argument("--budget", type=int, help="Ray cap for enumeration, largest sample count for sampling")
        parser.add_argument("--format", choices=["json", "csv"], default="json")
        parser.add_argument("--output", help="Write the vertex CSV here; the JSON report goes to stdout")

    def run(self, config, **options):
        method = options.get("method", "enumerate")
        vertex_set = get_vertex_set(
            config.get_scenario(),
            method=method,
            count=options.get("count"),
            seed=config.seed,
            budget=config.budget,
        )
        report = get_vertex_report(vertex_set, config.as_dict())
        passed = report["summary"]["all_pass"]

        if config.format == "csv":
            if config.output:
                with open(config.output, "w", newline="") as handle:
                    write_vertex_csv(vertex_set, handle)
                self.emit(report)
            else:
                buffer = io.StringIO()
                write_vertex_csv(vertex_set, buffer)
                self.stdout.write(buffer.getvalue(), ending="")
                self.stderr.write(dumps(report["summary"]))
        else:
            self.emit(report)
        return report, passed
