"""
_simplex.py

Dense two-phase simplex for small linear programs, exact or floating point.

Design notes
------------
- The problem is stated as ``max/min c·z`` subject to ``A z = b``, ``G z <= h`` and
  ``z >= 0`` (free variables are split into a positive and a negative part).
- In rational mode every tableau entry is a ``fractions.Fraction``; comparisons are
  exact.  In float mode the same code runs on ``float64`` with an absolute tolerance.
- Bland's rule picks the entering column (smallest index with positive reduced cost)
  and breaks ratio-test ties by the smallest basic variable index, so the method
  terminates on degenerate problems and always returns the same basis.
- Inequality rows with ``h >= 0`` start with their slack in the basis; only equality
  rows and inequality rows with ``h < 0`` receive artificial variables.
- On optimality the dual multipliers are recovered from the final basis and checked:
  dual feasibility plus equal objective values is the optimality certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from decouple import config

from ._linalg import as_fraction, solve_exact

logger = logging.getLogger(__name__)

# --------------------------------------------------------------------------- #
# Configuration
# --------------------------------------------------------------------------- #

LP_MAX_PIVOTS = config("LP_MAX_PIVOTS", default=100_000, cast=int)
LP_FLOAT_TOLERANCE = config("LP_FLOAT_TOLERANCE", default=1e-10, cast=float)

NumericMode = Literal["rational", "float"]


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class SolverError(RuntimeError):
    """Raised when a solver cannot produce a usable answer (pivot cap, bad data)."""


# --------------------------------------------------------------------------- #
# Arithmetic back-ends
# --------------------------------------------------------------------------- #

class _ExactOps:
    dtype = object

    def convert(self, value):
        return as_fraction(value)

    def is_positive(self, value) -> bool:
        return value > 0

    def is_negative(self, value) -> bool:
        return value < 0

    def is_zero(self, value) -> bool:
        return value == 0


class _FloatOps:
    dtype = float

    def __init__(self, tolerance: float = LP_FLOAT_TOLERANCE):
        self.tolerance = tolerance

    def convert(self, value):
        return float(value)

    def is_positive(self, value) -> bool:
        return value > self.tolerance

    def is_negative(self, value) -> bool:
        return value < -self.tolerance

    def is_zero(self, value) -> bool:
        return abs(value) <= self.tolerance


def _ops_for(mode: NumericMode):
    return _ExactOps() if mode == "rational" else _FloatOps()


# --------------------------------------------------------------------------- #
# Problem / solution types
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class LinearProgram:
    """
    Linear program ``opt c·z`` s.t. ``A z = b``, ``G z <= h`` and (optionally) ``z >= 0``.

    Attributes
    ----------
    objective : sequence
        Cost vector ``c``.
    eq_matrix, eq_rhs : sequences
        Equality constraints ``A z = b`` (may be empty).
    ineq_matrix, ineq_rhs : sequences
        Inequality constraints ``G z <= h`` (may be empty).
    maximize : bool
        Maximise when True (default), minimise otherwise.
    nonnegative : bool
        When False every variable is free.
    numeric_mode : {'rational', 'float'}
        Rational mode requires rational data and solves exactly.
    """

    objective: tuple
    eq_matrix: tuple = ()
    eq_rhs: tuple = ()
    ineq_matrix: tuple = ()
    ineq_rhs: tuple = ()
    maximize: bool = True
    nonnegative: bool = True
    numeric_mode: NumericMode = "rational"

    def __post_init__(self):
        ops = _ops_for(self.numeric_mode)
        n = len(self.objective)
        if n == 0:
            raise SolverError("LinearProgram needs at least one variable")
        for name in ("objective", "eq_rhs", "ineq_rhs"):
            object.__setattr__(self, name, tuple(ops.convert(v) for v in getattr(self, name)))
        for name in ("eq_matrix", "ineq_matrix"):
            rows = tuple(tuple(ops.convert(v) for v in row) for row in getattr(self, name))
            if any(len(row) != n for row in rows):
                raise SolverError(f"{name} rows must have {n} entries")
            object.__setattr__(self, name, rows)
        if len(self.eq_matrix) != len(self.eq_rhs):
            raise SolverError("eq_matrix and eq_rhs disagree in length")
        if len(self.ineq_matrix) != len(self.ineq_rhs):
            raise SolverError("ineq_matrix and ineq_rhs disagree in length")

    @property
    def variable_count(self) -> int:
        return len(self.objective)


@dataclass(frozen=True, slots=True)
class LPSolution:
    """
    Result of :func:`solve_lp`.

    ``basis`` lists standard-form column indices (structural columns first, then one
    slack per inequality row) in row order.  ``eq_duals`` / ``ineq_duals`` are the
    multipliers of the maximisation form; ``ineq_duals`` are nonnegative.
    """

    status: Literal["optimal", "infeasible", "unbounded"]
    value: object = None
    point: tuple = ()
    basis: tuple = ()
    eq_duals: tuple = ()
    ineq_duals: tuple = ()
    dual_value: object = None
    certified: bool = False
    pivots: int = 0
    tight_inequalities: tuple = field(default=())

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


# --------------------------------------------------------------------------- #
# Tableau
# --------------------------------------------------------------------------- #

class _Tableau:
    """Row-major simplex tableau with an explicit reduced-cost row."""

    def __init__(self, rows: np.ndarray, rhs: np.ndarray, basis: list[int], ops):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ops = ops
        self.costs = None
        self.reduced = None
        self.value = None
        self.pivots = 0

    def set_objective(self, costs: np.ndarray) -> None:
        self.costs = costs
        basic_costs = costs[self.basis]
        self.reduced = costs - basic_costs.dot(self.rows) if len(self.basis) else costs.copy()
        self.value = basic_costs.dot(self.rhs) if len(self.basis) else self.ops.convert(0)

    def pivot(self, row: int, col: int) -> None:
        head = self.rows[row, col]
        self.rows[row] = self.rows[row] / head
        self.rhs[row] = self.rhs[row] / head
        column = self.rows[:, col]
        for i in range(self.rows.shape[0]):
            factor = column[i]
            if i != row and not self.ops.is_zero(factor):
                self.rows[i] = self.rows[i] - factor * self.rows[row]
                self.rhs[i] = self.rhs[i] - factor * self.rhs[row]
        factor = self.reduced[col]
        if not self.ops.is_zero(factor):
            self.reduced = self.reduced - factor * self.rows[row]
            self.value = self.value + factor * self.rhs[row]
        self.basis[row] = col
        self.pivots += 1
        if self.pivots > LP_MAX_PIVOTS:
            raise SolverError(f"Simplex exceeded {LP_MAX_PIVOTS} pivots")

    def entering(self, allowed: int) -> int | None:
        for j in range(allowed):
            if self.ops.is_positive(self.reduced[j]):
                return j
        return None

    def leaving(self, col: int) -> int | None:
        best_row, best_ratio = None, None
        for i in range(self.rows.shape[0]):
            entry = self.rows[i, col]
            if not self.ops.is_positive(entry):
                continue
            ratio = self.rhs[i] / entry
            if best_row is None or ratio < best_ratio or (
                ratio == best_ratio and self.basis[i] < self.basis[best_row]
            ):
                best_row, best_ratio = i, ratio
        return best_row

    def run(self, allowed: int) -> Literal["optimal", "unbounded"]:
        while True:
            col = self.entering(allowed)
            if col is None:
                return "optimal"
            row = self.leaving(col)
            if row is None:
                return "unbounded"
            self.pivot(row, col)


# --------------------------------------------------------------------------- #
# Public interface
# --------------------------------------------------------------------------- #

def _standard_form(lp: LinearProgram, ops):
    """Build ``M y = r`` with ``y >= 0``; returns matrix, rhs, costs, row signs and counts."""
    n = lp.variable_count
    split = not lp.nonnegative
    n_struct = 2 * n if split else n
    n_eq, n_ineq = len(lp.eq_matrix), len(lp.ineq_matrix)
    n_rows = n_eq + n_ineq
    zero = ops.convert(0)
    one = ops.convert(1)

    matrix = np.full((n_rows, n_struct + n_ineq), zero, dtype=ops.dtype)
    rhs = np.full(n_rows, zero, dtype=ops.dtype)
    for i, (row, b) in enumerate(zip(lp.eq_matrix + lp.ineq_matrix, lp.eq_rhs + lp.ineq_rhs)):
        for j, a in enumerate(row):
            matrix[i, j] = a
            if split:
                matrix[i, n + j] = -a
        rhs[i] = b
    for k in range(n_ineq):
        matrix[n_eq + k, n_struct + k] = one

    signs = []
    for i in range(n_rows):
        if ops.is_negative(rhs[i]):
            matrix[i] = -matrix[i]
            rhs[i] = -rhs[i]
            signs.append(-1)
        else:
            signs.append(1)

    costs = np.full(n_struct + n_ineq, zero, dtype=ops.dtype)
    sense = one if lp.maximize else -one
    for j, c in enumerate(lp.objective):
        costs[j] = sense * c
        if split:
            costs[n + j] = -sense * c
    return matrix, rhs, costs, signs, n_struct


def solve_lp(lp: LinearProgram) -> LPSolution:
    """
    Solve ``lp`` with the two-phase simplex method under Bland's rule.

    Returns
    -------
    LPSolution
        ``status`` is 'optimal', 'infeasible' or 'unbounded'; value and point are
        in the caller's orientation (max or min) and variables (free ones recombined).
    """
    ops = _ops_for(lp.numeric_mode)
    zero, one = ops.convert(0), ops.convert(1)
    matrix, rhs, costs, signs, n_struct = _standard_form(lp, ops)
    n_rows, n_cols = matrix.shape
    n_eq = len(lp.eq_matrix)

    # Initial basis: slacks where the row kept its sign, artificials elsewhere.
    basis: list[int] = []
    artificial_rows: list[int] = []
    for i in range(n_rows):
        if i >= n_eq and signs[i] == 1:
            basis.append(n_struct + (i - n_eq))
        else:
            basis.append(n_cols + len(artificial_rows))
            artificial_rows.append(i)
    n_art = len(artificial_rows)
    rows = np.full((n_rows, n_cols + n_art), zero, dtype=ops.dtype)
    rows[:, :n_cols] = matrix
    for k, i in enumerate(artificial_rows):
        rows[i, n_cols + k] = one
    tableau = _Tableau(rows, rhs.copy(), basis, ops)

    # Phase 1 --------------------------------------------------------------- #
    if n_art:
        phase_one = np.full(n_cols + n_art, zero, dtype=ops.dtype)
        phase_one[n_cols:] = -one
        tableau.set_objective(phase_one)
        tableau.run(n_cols + n_art)
        if ops.is_negative(tableau.value):
            logger.debug(f"LP infeasible after {tableau.pivots} pivots")
            return LPSolution(status="infeasible", pivots=tableau.pivots)

        # Drive zero-level artificials out of the basis, dropping redundant rows.
        keep = []
        for i in range(n_rows):
            if tableau.basis[i] < n_cols:
                keep.append(i)
                continue
            col = next((j for j in range(n_cols) if not ops.is_zero(tableau.rows[i, j])), None)
            if col is None:
                continue
            tableau.pivot(i, col)
            keep.append(i)
        tableau.rows = tableau.rows[keep][:, :n_cols]
        tableau.rhs = tableau.rhs[keep]
        tableau.basis = [tableau.basis[i] for i in keep]
        kept_rows = keep
    else:
        kept_rows = list(range(n_rows))

    # Phase 2 --------------------------------------------------------------- #
    tableau.set_objective(costs)
    status = tableau.run(n_cols)
    if status == "unbounded":
        return LPSolution(status="unbounded", pivots=tableau.pivots)

    y = np.full(n_cols, zero, dtype=ops.dtype)
    for i, col in enumerate(tableau.basis):
        y[col] = tableau.rhs[i]
    n = lp.variable_count
    point = y[:n] - y[n:2 * n] if not lp.nonnegative else y[:n]
    internal_value = costs.dot(y)
    value = internal_value if lp.maximize else -internal_value

    eq_duals, ineq_duals, dual_value, certified = _dual_certificate(
        lp, ops, matrix, rhs, costs, signs, kept_rows, tableau.basis, internal_value
    )

    tight = tuple(
        k for k, (row, h) in enumerate(zip(lp.ineq_matrix, lp.ineq_rhs))
        if ops.is_zero(sum((a * z for a, z in zip(row, point)), zero) - h)
    )
    return LPSolution(
        status="optimal",
        value=value,
        point=tuple(point),
        basis=tuple(tableau.basis),
        eq_duals=eq_duals,
        ineq_duals=ineq_duals,
        dual_value=dual_value if lp.maximize else -dual_value,
        certified=certified,
        pivots=tableau.pivots,
        tight_inequalities=tight,
    )


def _dual_certificate(lp, ops, matrix, rhs, costs, signs, kept_rows, basis, internal_value):
    """Recover dual multipliers from the optimal basis and verify them."""
    zero = ops.convert(0)
    basis_matrix = matrix[np.ix_(kept_rows, basis)]
    if lp.numeric_mode == "rational":
        transposed = [[basis_matrix[r][c] for r in range(len(kept_rows))] for c in range(len(basis))]
        kept_duals = solve_exact(transposed, [costs[c] for c in basis])
    else:
        kept_duals = list(np.linalg.solve(basis_matrix.astype(float).T, costs[basis].astype(float)))

    duals = [zero] * matrix.shape[0]
    for r, value in zip(kept_rows, kept_duals):
        duals[r] = value
    reduced = costs - np.array(duals, dtype=ops.dtype).dot(matrix)
    dual_feasible = not any(ops.is_positive(v) for v in reduced)
    dual_value = sum((d * b for d, b in zip(duals, rhs)), zero)

    n_eq = len(lp.eq_matrix)
    oriented = [s * d for s, d in zip(signs, duals)]
    certified = dual_feasible and ops.is_zero(dual_value - internal_value)
    return tuple(oriented[:n_eq]), tuple(oriented[n_eq:]), dual_value, certified
