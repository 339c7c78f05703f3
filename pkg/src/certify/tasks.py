import logging

from celery import shared_task

from .npa_service import certify_max_randomness_sdp, max_single_expectation_sdp
from .polytope import ns_parametrization, vertices_for_objectives
from .scenario import Scenario, parse_digits
from .utils import behavior_to_dict

logger = logging.getLogger(__name__)


@shared_task
def sample_vertex_batch(scenario, objectives):
    """
    Maximizes each objective over the no-signaling polytope of a scenario.

    One batch is one independent chain of exact LPs, so batches of a seeded
    objective list can run on separate workers and be merged in order.

    Parameters:
        scenario (str): "N,M,d"
        objectives (list): Integer objective vectors over the marginal coordinates

    Returns:
        dict: {"scenario": ..., "vertices": [behavior dicts in objective order]}
    """
    parametrization = ns_parametrization(Scenario.parse(scenario))
    vertices = vertices_for_objectives(parametrization, objectives)
    logger.info(f"Vertex batch for {scenario}: {len(vertices)} vertices from {len(objectives)} objectives")
    return {
        "scenario": scenario,
        "vertices": [behavior_to_dict(v) for v in vertices],
    }


@shared_task
def solve_outcome_sdp(outcome, eps, method="interior-point"):
    """
    Largest p(outcome|000) over the relaxed moment-matrix set at one ε.

    Returns:
        dict: RelaxationResult fields plus the solver's Γ as nested lists
    """
    result = certify_max_randomness_sdp(parse_digits(outcome, 3), eps, method=method)
    payload = result.as_dict()
    payload["gamma"] = result.gamma.tolist()
    return payload


@shared_task
def solve_single_target_sdp(target, eps, method="interior-point"):
    """
    Largest |⟨target⟩| for one single-party observable; eps=None drops the
    Mermin constraint.
    """
    return max_single_expectation_sdp(target, eps, method=method).as_dict()
