"""
_sdp.py

Dense semidefinite programming for small symmetric matrix variables.

Problems are stated the way the moment-matrix code thinks about them:

    maximize   ½ tr(C Γ)
    subject to ½ tr(D_i Γ) = r_i            (equalities)
               ½ tr(E_j Γ) >= / <= s_j      (optional inequalities)
               Γ ⪰ 0

Design notes
------------
- Inequalities are turned into equalities with one slack per row.  The slacks live
  on extra diagonal entries of an enlarged matrix variable; the coupling entries
  between Γ and the slacks are pinned to zero, so one PSD cone covers everything.
- `solve_sdp` is an infeasible-start primal-dual path-following method using the
  HKM search direction and Mehrotra's centering heuristic.  Iterates stay strictly
  positive definite, so boundary optima are approached from the interior.
- `solve_sdp_projection` is an alternating-direction augmented Lagrangian method on
  the dual (a projection onto the PSD cone per iteration).  It shares no code path
  with the interior-point method and serves as an independent oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from decouple import config
from scipy import linalg as scipy_linalg

from ._simplex import SolverError

logger = logging.getLogger(__name__)

# --------------------------------------------------------------------------- #
# Configuration
# --------------------------------------------------------------------------- #

SDP_TOLERANCE = config("SDP_TOLERANCE", default=1e-9, cast=float)
SDP_MAX_ITERATIONS = config("SDP_MAX_ITERATIONS", default=150, cast=int)
PROJECTION_MAX_ITERATIONS = config("PROJECTION_MAX_ITERATIONS", default=50_000, cast=int)

_STEP_FRACTION = 0.95
_INACCURATE_FACTOR = 1e3

SDPStatus = Literal["optimal", "inaccurate", "max_iterations", "stalled"]


# --------------------------------------------------------------------------- #
# Problem / solution types
# --------------------------------------------------------------------------- #

def _symmetric(matrix, n: int, label: str) -> np.ndarray:
    array = np.array(matrix, dtype=float)
    if array.shape != (n, n):
        raise SolverError(f"{label} must be {n}x{n}, got {array.shape}")
    if not np.allclose(array, array.T, atol=1e-12):
        raise SolverError(f"{label} must be symmetric")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True)
class SemidefiniteProgram:
    """
    ``maximize ½tr(CΓ)`` over symmetric ``Γ ⪰ 0`` of size ``dimension``.

    Attributes
    ----------
    dimension : int
        Size n of the matrix variable.
    objective : array-like
        Symmetric C.
    equalities : sequence of (D, r)
        ``½tr(DΓ) = r``.
    inequalities : sequence of (E, s, sense)
        ``½tr(EΓ) >= s`` for sense ``'>='`` or ``<= s`` for ``'<='``.
    """

    dimension: int
    objective: np.ndarray
    equalities: tuple = ()
    inequalities: tuple = ()

    def __post_init__(self):
        n = self.dimension
        object.__setattr__(self, "objective", _symmetric(self.objective, n, "objective"))
        object.__setattr__(
            self,
            "equalities",
            tuple((_symmetric(d, n, f"equality {k}"), float(r)) for k, (d, r) in enumerate(self.equalities)),
        )
        inequalities = []
        for k, (d, r, sense) in enumerate(self.inequalities):
            if sense not in (">=", "<="):
                raise SolverError(f"inequality {k}: unknown sense {sense!r}")
            inequalities.append((_symmetric(d, n, f"inequality {k}"), float(r), sense))
        object.__setattr__(self, "inequalities", tuple(inequalities))

    def objective_value(self, gamma: np.ndarray) -> float:
        return 0.5 * float(np.sum(self.objective * gamma))

    def max_residual(self, gamma: np.ndarray) -> float:
        """Largest equality residual or inequality violation at ``gamma``."""
        worst = 0.0
        for d, r in self.equalities:
            worst = max(worst, abs(0.5 * float(np.sum(d * gamma)) - r))
        for d, r, sense in self.inequalities:
            value = 0.5 * float(np.sum(d * gamma))
            gap = r - value if sense == ">=" else value - r
            worst = max(worst, gap)
        return worst


@dataclass(frozen=True, slots=True)
class SDPSolution:
    """
    Result of an SDP solve.

    ``value`` is the primal objective ½tr(CΓ) and ``dual_value`` the dual objective;
    for converged runs their difference is the duality gap.
    """

    status: SDPStatus
    value: float
    gamma: np.ndarray
    residual: float
    min_eigenvalue: float
    dual_value: float
    iterations: int
    method: str

    @property
    def converged(self) -> bool:
        return self.status in ("optimal", "inaccurate")

    @property
    def gap(self) -> float:
        return self.dual_value - self.value


# --------------------------------------------------------------------------- #
# Standard form
# --------------------------------------------------------------------------- #

def _standard_form(sdp: SemidefiniteProgram):
    """
    Return ``(C, A, b)`` for ``max <C,X>`` s.t. ``<A_i,X> = b_i``, ``X ⪰ 0``.

    ``A`` has shape (m, N, N) with N = n + number of inequalities.
    """
    n = sdp.dimension
    k = len(sdp.inequalities)
    size = n + k

    def embed(matrix: np.ndarray) -> np.ndarray:
        out = np.zeros((size, size))
        out[:n, :n] = matrix
        return out

    constraints, rhs = [], []
    for d, r in sdp.equalities:
        constraints.append(embed(0.5 * d))
        rhs.append(r)
    for j, (d, r, sense) in enumerate(sdp.inequalities):
        a = embed(0.5 * d)
        a[n + j, n + j] = -1.0 if sense == ">=" else 1.0
        constraints.append(a)
        rhs.append(r)
    for j in range(k):
        p = n + j
        for q in range(p):
            a = np.zeros((size, size))
            a[p, q] = a[q, p] = 0.5
            constraints.append(a)
            rhs.append(0.0)

    if not constraints:
        raise SolverError("SemidefiniteProgram needs at least one constraint")
    return embed(0.5 * sdp.objective), np.array(constraints), np.array(rhs)


def _apply(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``A(X)``: the vector of ``<A_i, X>``."""
    return np.einsum("ijk,jk->i", a, x)


def _adjoint(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``Aᵀ(y) = Σ y_i A_i``."""
    return np.einsum("i,ijk->jk", y, a)


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest α with ``x + α dx ⪰ 0`` (x positive definite)."""
    chol = np.linalg.cholesky(x)
    inv = scipy_linalg.solve_triangular(chol, np.eye(x.shape[0]), lower=True)
    lowest = np.linalg.eigvalsh(inv @ dx @ inv.T).min()
    return np.inf if lowest >= 0 else -1.0 / lowest


def _finish(sdp, status, x, y, b, iterations, method) -> SDPSolution:
    n = sdp.dimension
    gamma = 0.5 * (x[:n, :n] + x[:n, :n].T)
    gamma.setflags(write=False)
    return SDPSolution(
        status=status,
        value=sdp.objective_value(gamma),
        gamma=gamma,
        residual=sdp.max_residual(gamma),
        min_eigenvalue=float(np.linalg.eigvalsh(gamma).min()),
        dual_value=float(b @ y),
        iterations=iterations,
        method=method,
    )


# --------------------------------------------------------------------------- #
# Interior point
# --------------------------------------------------------------------------- #

def _hkm_direction(a, c, b, x, y, z, z_inv, target):
    """Solve the HKM Newton system for centring target ``target = σμ``."""
    primal_residual = b - _apply(a, x)
    dual_residual = _adjoint(a, y) - z - c

    xa_zinv = x[None, :, :] @ a @ z_inv[None, :, :]
    schur = np.einsum("ijk,mkj->im", a, xa_zinv)

    inner = target * z_inv - x - x @ dual_residual @ z_inv
    rhs = _apply(a, inner) - primal_residual
    try:
        dy = scipy_linalg.solve(schur, rhs, assume_a="gen")
    except (scipy_linalg.LinAlgError, ValueError):
        dy = np.linalg.lstsq(schur, rhs, rcond=None)[0]
    dz = _adjoint(a, dy) + dual_residual
    dx = inner - x @ _adjoint(a, dy) @ z_inv
    dx = 0.5 * (dx + dx.T)
    return dx, dy, dz


def solve_sdp(sdp: SemidefiniteProgram, tol: float | None = None, max_iterations: int | None = None) -> SDPSolution:
    """
    Solve ``sdp`` with a primal-dual interior-point method.

    Parameters
    ----------
    sdp : SemidefiniteProgram
    tol : float, optional
        Target for the absolute primal/dual residuals and the relative duality gap.
        Defaults to ``SDP_TOLERANCE``.
    max_iterations : int, optional
        Defaults to ``SDP_MAX_ITERATIONS``.

    Returns
    -------
    SDPSolution
        ``status`` is 'optimal' at ``tol``, 'inaccurate' when only a looser target
        was met before stalling or running out of iterations, otherwise
        'max_iterations' / 'stalled' with the last iterate for diagnostics.
    """
    tol = SDP_TOLERANCE if tol is None else tol
    max_iterations = SDP_MAX_ITERATIONS if max_iterations is None else max_iterations
    c, a, b = _standard_form(sdp)
    size = c.shape[0]
    m = len(b)

    norms = np.sqrt(np.einsum("ijk,ijk->i", a, a))
    xi = max(10.0, np.sqrt(size), size * max((1 + abs(b[i])) / (1 + norms[i]) for i in range(m)))
    eta = max(10.0, np.sqrt(size), norms.max(), np.linalg.norm(c))
    x = xi * np.eye(size)
    z = eta * np.eye(size)
    y = np.zeros(m)

    status: SDPStatus = "max_iterations"
    best_error = np.inf
    for iteration in range(1, max_iterations + 1):
        z_inv = np.linalg.inv(z)
        z_inv = 0.5 * (z_inv + z_inv.T)
        mu = float(np.sum(x * z)) / size

        primal_obj = float(np.sum(c * x))
        dual_obj = float(b @ y)
        primal_inf = np.abs(b - _apply(a, x)).max()
        dual_inf = np.abs(_adjoint(a, y) - z - c).max()
        rel_gap = abs(dual_obj - primal_obj) / (1.0 + abs(primal_obj) + abs(dual_obj))
        error = max(primal_inf, dual_inf, rel_gap)
        best_error = min(best_error, error)
        logger.debug(f"sdp iter {iteration}: pobj={primal_obj:.10g} dobj={dual_obj:.10g} err={error:.2e}")
        if error <= tol:
            status = "optimal"
            break

        # Predictor: pure Newton step, used only to choose the centring weight.
        dx, dy, dz = _hkm_direction(a, c, b, x, y, z, z_inv, 0.0)
        alpha_p = min(1.0, _max_step(x, dx))
        alpha_d = min(1.0, _max_step(z, dz))
        mu_affine = float(np.sum((x + alpha_p * dx) * (z + alpha_d * dz))) / size
        sigma = min(1.0, (mu_affine / mu) ** 3) if mu > 0 else 0.0

        dx, dy, dz = _hkm_direction(a, c, b, x, y, z, z_inv, sigma * mu)
        alpha_p = min(1.0, _STEP_FRACTION * _max_step(x, dx))
        alpha_d = min(1.0, _STEP_FRACTION * _max_step(z, dz))
        if max(alpha_p, alpha_d) < 1e-12:
            status = "stalled"
            break
        x = x + alpha_p * dx
        x = 0.5 * (x + x.T)
        y = y + alpha_d * dy
        z = z + alpha_d * dz
        z = 0.5 * (z + z.T)

    if status != "optimal" and best_error <= _INACCURATE_FACTOR * tol:
        status = "inaccurate"
    if status not in ("optimal",):
        logger.warning(f"Interior-point SDP finished with status {status} (best error {best_error:.2e})")
    return _finish(sdp, status, x, y, b, iteration, "interior-point")


# --------------------------------------------------------------------------- #
# Projection oracle
# --------------------------------------------------------------------------- #

def solve_sdp_projection(
    sdp: SemidefiniteProgram,
    tol: float = 1e-8,
    max_iterations: int | None = None,
    penalty: float = 1.0,
) -> SDPSolution:
    """
    Solve ``sdp`` with the alternating-direction augmented Lagrangian method.

    Each iteration solves for the dual multipliers in closed form, projects a
    symmetric matrix onto the PSD cone by eigen-decomposition and reads the primal
    matrix off the negative part of that same matrix.

    Parameters
    ----------
    tol : float
        Relative primal/dual infeasibility target.
    penalty : float
        Augmented Lagrangian penalty μ.
    """
    max_iterations = PROJECTION_MAX_ITERATIONS if max_iterations is None else max_iterations
    c, a, b = _standard_form(sdp)
    cost = -c  # minimisation form
    size = c.shape[0]
    gram = np.einsum("ijk,mjk->im", a, a)
    gram_factor = scipy_linalg.cho_factor(gram)

    x = np.zeros((size, size))
    s = np.zeros((size, size))
    y = np.zeros(len(b))
    b_scale = 1.0 + np.linalg.norm(b)
    c_scale = 1.0 + np.linalg.norm(cost)
    status: SDPStatus = "max_iterations"
    mu = penalty
    for iteration in range(1, max_iterations + 1):
        y = -scipy_linalg.cho_solve(gram_factor, mu * (_apply(a, x) - b) + _apply(a, s - cost))
        v = cost - _adjoint(a, y) - mu * x
        values, vectors = np.linalg.eigh(0.5 * (v + v.T))
        s = (vectors * np.maximum(values, 0.0)) @ vectors.T
        x = (vectors * np.maximum(-values, 0.0)) @ vectors.T / mu

        primal_inf = np.linalg.norm(_apply(a, x) - b) / b_scale
        dual_inf = np.linalg.norm(cost - _adjoint(a, y) - s) / c_scale
        if iteration % 50 == 0 or max(primal_inf, dual_inf) <= tol:
            gap = abs(float(np.sum(cost * x)) - float(b @ y)) / (1.0 + abs(float(np.sum(cost * x))))
            if max(primal_inf, dual_inf, gap) <= tol:
                status = "optimal"
                break

    if status != "optimal":
        logger.warning(f"Projection SDP stopped after {iteration} iterations without meeting tol={tol:g}")
    # The dual of the minimisation form is max b·y; flip to match the maximisation.
    return _finish(sdp, status, x, -y, b, iteration, "projection")
