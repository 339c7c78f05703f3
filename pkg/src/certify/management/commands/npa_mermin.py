from ...services import get_npa_mermin_report
from ._base import CertifyCommand


class Command(CertifyCommand):
    help = (
        "Largest p(a|000) under a maximal Mermin violation on the 15x15 moment "
        "matrix, with the exact propagation path for comparison."
    )
    name = "npa_mermin"
    scenario_arguments = False

    def add_command_arguments(self, parser):
        parser.add_argument("--eps", help="Comma-separated relaxation schedule (default CERTIFY_EPS_SCHEDULE)")
        parser.add_argument("--method", choices=["interior-point", "projection"], default="interior-point")
        parser.add_argument("--no-snapshot", action="store_true", help="Leave the solver Γ out of the report")

    def run(self, config, **options):
        payload = get_npa_mermin_report(
            schedule=config.eps or None,
            method=options.get("method", "interior-point"),
            snapshot=not options.get("no_snapshot", False),
        )
        self.emit(payload)
        return payload, payload["passed"]
