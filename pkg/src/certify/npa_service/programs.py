"""
programs.py

Semidefinite programs over the moment model at (near) maximal Mermin violation.

Design notes
------------
- Fixing the Mermin value to its maximum 4 leaves no strictly feasible point,
  so every program uses ½tr(BΓ) >= 4 - ε and the ε -> 0 limit is estimated
  by least squares on {1, √ε, ε} over the schedule.
- Each program is an independent solver instance; `tasks.py` fans them out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from django.conf import settings

from helpers.solvers import SemidefiniteProgram, SolverError, solve_sdp, solve_sdp_projection

from .moment_model import SIZE, MomentModel, build_moment_model, entry_matrix, mermin_functional, probability_functional

logger = logging.getLogger(__name__)

MERMIN_MAXIMUM = 4.0
SINGLE_LABELS = ("A0", "A1", "B0", "B1", "C0", "C1")


def default_schedule() -> list[float]:
    return list(getattr(settings, "CERTIFY_EPS_SCHEDULE", [1e-4, 1e-6, 1e-8]))


@dataclass(frozen=True, slots=True)
class RelaxationResult:
    """
    Attributes
    ----------
    target : str
        Outcome string such as "010" or a single label such as "A1".
    eps : float or None
        None when the Mermin constraint was dropped.
    value : float
    status : str
    residual : float
    min_eigenvalue : float
    gamma : numpy.ndarray
    """

    target: str
    eps: float | None
    value: float
    status: str
    residual: float
    min_eigenvalue: float
    gamma: np.ndarray

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "eps": self.eps,
            "value": self.value,
            "status": self.status,
            "residual": self.residual,
            "min_eigenvalue": self.min_eigenvalue,
        }


def relaxation(model: MomentModel, objective: np.ndarray, eps: float | None) -> SemidefiniteProgram:
    """
    maximize ½tr(objective·Γ) subject to the diagonal, the class ties and, when
    ``eps`` is not None, ½tr(BΓ) >= 4 - eps.
    """
    equalities = [(d, 1.0) for d in model.diagonal_matrices()]
    equalities += [(d, 0.0) for d in model.tie_matrices()]
    inequalities = []
    if eps is not None:
        if not 0 < eps <= 1e-3:
            raise ValueError(f"relaxation eps must lie in (0, 1e-3], got {eps}")
        inequalities.append((mermin_functional(model).astype(float), MERMIN_MAXIMUM - eps, ">="))
    return SemidefiniteProgram(
        dimension=SIZE,
        objective=np.asarray(objective, dtype=float),
        equalities=tuple(equalities),
        inequalities=tuple(inequalities),
    )


def _solve(sdp: SemidefiniteProgram, target: str, eps: float | None, method: str) -> RelaxationResult:
    solver = solve_sdp_projection if method == "projection" else solve_sdp
    solution = solver(sdp)
    if not solution.converged:
        raise SolverError(
            f"SDP for {target} at eps={eps} ended with status {solution.status} "
            f"(residual {solution.residual:.2e}, min eigenvalue {solution.min_eigenvalue:.2e})"
        )
    return RelaxationResult(
        target=target,
        eps=eps,
        value=solution.value,
        status=solution.status,
        residual=solution.residual,
        min_eigenvalue=solution.min_eigenvalue,
        gamma=solution.gamma,
    )


def certify_max_randomness_sdp(
    outcome: Sequence[int],
    eps: float,
    model: MomentModel | None = None,
    method: str = "interior-point",
) -> RelaxationResult:
    """
    Largest p(a|000) over the relaxed feasible set.

    Raises:
        SolverError: if the solver does not converge.
    """
    model = model or build_moment_model()
    target = "".join(str(int(v)) for v in outcome)
    sdp = relaxation(model, probability_functional(model, outcome).astype(float), eps)
    result = _solve(sdp, target, eps, method)
    logger.info(f"p({target}|000) <= {result.value:.10f} at eps={eps:g} ({result.status})")
    return result


def max_single_expectation_sdp(
    target: str,
    eps: float | None,
    model: MomentModel | None = None,
    method: str = "interior-point",
) -> RelaxationResult:
    """
    Largest |⟨target⟩| over the relaxed feasible set (two solves, one per sign).

    ``eps=None`` drops the Mermin constraint.
    """
    if target not in SINGLE_LABELS:
        raise ValueError(f"target must be one of {SINGLE_LABELS}, got {target!r}")
    model = model or build_moment_model()
    column = model.index(target)
    best = None
    for sign in (1.0, -1.0):
        sdp = relaxation(model, sign * entry_matrix(0, column), eps)
        result = _solve(sdp, target, eps, method)
        if best is None or result.value > best.value:
            best = result
    logger.info(f"|⟨{target}⟩| <= {best.value:.3e} at eps={eps}")
    return best


def extrapolate(eps_values: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares fit of value(ε) on {1, √ε, ε}, evaluated at ε = 0."""
    eps = np.asarray(eps_values, dtype=float)
    if len(eps) == 0 or len(eps) != len(values):
        raise ValueError("extrapolate needs matching, nonempty eps and value lists")
    columns = [np.ones_like(eps), np.sqrt(eps), eps][: len(eps)]
    design = np.stack(columns, axis=1)
    coefficients, *_ = np.linalg.lstsq(design, np.asarray(values, dtype=float), rcond=None)
    return float(coefficients[0])


def gamma_distance(gamma: np.ndarray, reference: np.ndarray) -> float:
    """Max-norm distance between a solver matrix and an exact one."""
    return float(np.abs(np.asarray(gamma, dtype=float) - np.asarray(reference, dtype=float)).max())
