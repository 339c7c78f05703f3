from ...services import get_bound_report
from ._base import CertifyCommand


class Command(CertifyCommand):
    help = "Print the no-signaling randomness bound 1/(d^N - (d-1)^N) of a scenario."
    name = "bound"

    def run(self, config, **options):
        payload = get_bound_report(config.get_scenario())
        self.emit(payload)
        return payload, True
