from ...inequalities import parity_family
from ...scenario import BehaviorError, parse_digits
from ...services import get_symmetry_certificate
from ...utils import load_inequality
from ._base import CertifyCommand


class Command(CertifyCommand):
    help = (
        "Certify uniform outcomes at x' for the unique maximal violator of a "
        "full-correlator inequality (the parity family of N parties, or a file)."
    )
    name = "certify_symmetry"
    scenario_arguments = False

    def add_command_arguments(self, parser):
        parser.add_argument("-N", dest="parties", type=int, help="Parity family of N parties")
        parser.add_argument("--input", help="Inequality JSON file instead of -N")
        parser.add_argument("--x0", help="The input string x' (default 1..10 for even N, 10..0 for odd N)")
        parser.add_argument(
            "--search",
            choices=["auto", "structured", "generic"],
            default="auto",
            help="Transformation search: even-N family, all 2^N strings, or both",
        )
        parser.add_argument(
            "--assume-unique",
            action="store_true",
            help="Accept that the maximal violator is unique (required for the conclusion)",
        )
        parser.add_argument(
            "--simulate-up-to",
            type=int,
            default=6,
            help="Cross-check parity inequalities by dense simulation up to this N",
        )

    def run(self, config, **options):
        parties = options.get("parties")
        if (parties is None) == (config.input is None):
            raise BehaviorError("give exactly one of -N or --input")
        inequality = load_inequality(config.input) if config.input else parity_family(parties)
        x_prime = None
        if config.x0 is not None:
            x_prime = parse_digits(config.x0, inequality.scenario.parties)
        payload = get_symmetry_certificate(
            inequality,
            x_prime,
            uniqueness_assumed=options.get("assume_unique", False),
            search=options.get("search", "auto"),
            simulate_max_parties=options.get("simulate_up_to", 6),
        )
        self.emit(payload)
        passed = payload.get("quantum", {}).get("passed", True)
        return payload, passed
