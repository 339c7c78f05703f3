from ...services import get_guessing_report
from ...utils import load_behavior
from ._base import CertifyCommand, parse_x0


class Command(CertifyCommand):
    help = "Guessing probability of the outcome string at x0 for a behavior file."
    name = "guess"
    scenario_arguments = False

    def add_command_arguments(self, parser):
        parser.add_argument("--input", required=True, help="Behavior JSON file")
        parser.add_argument("--x0", required=True, help="Target input string, e.g. 00")
        parser.add_argument("--mode", choices=["rational", "float"], help="Convert the behavior before solving")
        parser.add_argument(
            "--set",
            dest="correlation_set",
            choices=["NS", "C"],
            default="NS",
            help="Adversary correlations: no-signaling (default) or classical",
        )

    def run(self, config, **options):
        behavior = load_behavior(config.input)
        if config.mode == "float":
            behavior = behavior.to_float()
        elif config.mode == "rational":
            behavior = behavior.to_rational()
        x0 = parse_x0(config.x0, behavior.scenario.parties)
        behavior.scenario.input_index(x0)  # range check
        payload = get_guessing_report(behavior, x0, options.get("correlation_set", "NS"))
        self.emit(payload)
        return payload, payload["above_bound"]
