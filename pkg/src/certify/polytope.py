"""
polytope.py

The no-signaling polytope of a scenario: a minimal coordinate system, exact
vertex enumeration by double description, seeded vertex sampling with the
simplex method, and the zero-count property of its vertices.

Design notes
------------
- Coordinates are the marginals p(a_J|x_J) over every nonempty party subset
  J, every input substring x_J and every output substring with all a_j < d-1.
  Inclusion-exclusion over the parties answering d-1 gives every table entry
  as ``constant + L·c`` with integer L, so normalization and no-signaling hold
  by construction and the polytope is {c : constant + L·c >= 0}.
- Double description works on the homogenized cone {(t, c) : t·constant +
  L·c >= 0, t >= 0}.  Zero sets are Python int bitmasks and adjacency is the
  combinatorial test, so no floating point enters the enumeration.
- Sampling maximizes seeded integer objectives in {-B..B}; with c >= 0 added
  (implied by the other rows) the all-slack basis is feasible and every optimal
  basis is a vertex.  Each vertex is re-checked exactly by the rank of its tight
  rows.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from django.conf import settings

from helpers.solvers import LinearProgram, exact_rank, solve_exact, solve_lp

from .scenario import (
    Behavior,
    BehaviorError,
    Scenario,
    deterministic_behavior,
    nonempty_subsets,
)

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class BudgetExceededError(RuntimeError):
    """Raised when a computation would exceed its configured size guard."""


def _setting(name: str, default):
    return getattr(settings, name, default)


# --------------------------------------------------------------------------- #
# Vertex sets
# --------------------------------------------------------------------------- #

def is_deterministic(behavior: Behavior) -> bool:
    return all(v == 0 or v == 1 for v in behavior.table.ravel())


@dataclass(frozen=True, slots=True)
class VertexSet:
    """
    Distinct vertices of a scenario's no-signaling polytope (rational mode).

    ``method`` records how they were produced: 'deterministic', 'enumerate' or
    'sample'.
    """

    scenario: Scenario
    vertices: tuple
    method: str = "enumerate"

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def deterministic(self) -> list[Behavior]:
        return [v for v in self.vertices if is_deterministic(v)]

    def nonlocal_vertices(self) -> list[Behavior]:
        # A no-signaling vertex is local exactly when it is deterministic.
        return [v for v in self.vertices if not is_deterministic(v)]

    def keys(self) -> set:
        return {v.key() for v in self.vertices}


def _dedup(behaviors: Iterable[Behavior]) -> tuple:
    seen, unique = set(), []
    for behavior in behaviors:
        key = behavior.key()
        if key not in seen:
            seen.add(key)
            unique.append(behavior)
    return tuple(unique)


def local_deterministic_vertices(scenario: Scenario, limit: int | None = None) -> VertexSet:
    """
    All (d^M)^N local deterministic behaviors.

    Raises:
        BudgetExceededError: if the strategy count exceeds ``limit``
            (default ``CERTIFY_DETERMINISTIC_LIMIT``).
    """
    vertices = tuple(
        deterministic_behavior(scenario, strategy)
        for strategy in deterministic_strategies(scenario, limit)
    )
    return VertexSet(scenario, vertices, "deterministic")


def deterministic_strategies(scenario: Scenario, limit: int | None = None):
    """Iterate strategies as tuples ``(f_0, …, f_{N-1})`` with ``f_j[x_j] = a_j``."""
    limit = _setting("CERTIFY_DETERMINISTIC_LIMIT", 1_000_000) if limit is None else limit
    total = (scenario.outputs ** scenario.inputs) ** scenario.parties
    if total > limit:
        raise BudgetExceededError(f"{scenario} has {total} deterministic strategies, above the limit {limit}")
    functions = list(itertools.product(range(scenario.outputs), repeat=scenario.inputs))
    return itertools.product(functions, repeat=scenario.parties)


# --------------------------------------------------------------------------- #
# Parametrization
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class NSParametrization:
    """
    Affine map from marginal coordinates to full behavior tables.

    Attributes
    ----------
    scenario : Scenario
    coordinates : tuple
        ``(J, x_J, a_J)`` triples with every ``a_j < d - 1``.
    constant : numpy.ndarray
        Integer vector over flattened table entries (row-major (a, x)).
    linear : numpy.ndarray
        Integer matrix, one row per table entry and one column per coordinate.
    """

    scenario: Scenario
    coordinates: tuple
    constant: np.ndarray
    linear: np.ndarray
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def coordinate_index(self, subset, inputs, outputs) -> int:
        return self._index[(tuple(subset), tuple(inputs), tuple(outputs))]

    def extract(self, behavior: Behavior) -> tuple:
        """Coordinates of a no-signaling behavior (read at x_j = 0 outside J)."""
        s = self.scenario
        if behavior.scenario != s:
            raise BehaviorError(f"behavior is in {behavior.scenario}, parametrization in {s}")
        tensor = behavior.tensor()
        cache: dict = {}
        values = []
        for subset, xs, outs in self.coordinates:
            if (subset, xs) not in cache:
                full_x = [0] * s.parties
                for j, v in zip(subset, xs):
                    full_x[j] = v
                column = tensor[(slice(None),) * s.parties + tuple(full_x)]
                others = tuple(j for j in range(s.parties) if j not in subset)
                cache[(subset, xs)] = column.sum(axis=others) if others else column
            values.append(cache[(subset, xs)][outs])
        return tuple(values)

    def table_values(self, coordinates: Sequence) -> np.ndarray:
        """``constant + L·c`` with exact arithmetic for rational coordinates."""
        c = np.asarray(list(coordinates), dtype=object)
        if len(c) != self.dimension:
            raise BehaviorError(f"expected {self.dimension} coordinates, got {len(c)}")
        return self.constant.astype(object) + self.linear.astype(object).dot(c)

    def reconstruct(self, coordinates: Sequence) -> Behavior:
        s = self.scenario
        values = self.table_values([Fraction(v) for v in coordinates])
        return Behavior(s, values.reshape(s.output_count, s.input_count), "rational")

    def tight_rows(self, coordinates: Sequence) -> list[int]:
        values = self.table_values([Fraction(v) for v in coordinates])
        return [i for i, v in enumerate(values) if v == 0]

    def is_vertex(self, coordinates: Sequence) -> bool:
        """Extreme iff the tight positivity rows have full rank ``dimension``."""
        rows = self.tight_rows(coordinates)
        if len(rows) < self.dimension:
            return False
        return exact_rank(self.linear[rows].tolist()) == self.dimension


def ns_parametrization(scenario: Scenario) -> NSParametrization:
    """
    Build the inclusion-exclusion parametrization of the no-signaling polytope.

    For an output string a let K be the parties with a_j < d-1 and L the rest:
    p(a|x) = Σ_{T⊆L} (-1)^|T| Σ_{b_T < d-1} p(a_K, b_T | x_{K∪T}), where the
    empty marginal is 1.
    """
    s = scenario
    n, last = s.parties, s.outputs - 1
    coordinates = []
    index = {}
    for subset in nonempty_subsets(n):
        for xs in itertools.product(range(s.inputs), repeat=len(subset)):
            for outs in itertools.product(range(last), repeat=len(subset)):
                index[(subset, xs, outs)] = len(coordinates)
                coordinates.append((subset, xs, outs))

    rows = s.output_count * s.input_count
    constant = np.zeros(rows, dtype=np.int64)
    linear = np.zeros((rows, len(coordinates)), dtype=np.int64)
    inputs = s.input_strings()
    for a in s.output_strings():
        kept = [j for j in range(n) if a[j] < last]
        pinned = [j for j in range(n) if a[j] == last]
        for col, x in enumerate(inputs):
            row = s.output_index(a) * s.input_count + col
            for size in range(len(pinned) + 1):
                sign = -1 if size % 2 else 1
                for flipped in itertools.combinations(pinned, size):
                    subset = tuple(sorted(kept + list(flipped)))
                    if not subset:
                        constant[row] += sign
                        continue
                    for fill in itertools.product(range(last), repeat=size):
                        outs = dict(zip(flipped, fill))
                        outs.update({j: a[j] for j in kept})
                        key = (subset, tuple(x[j] for j in subset), tuple(outs[j] for j in subset))
                        linear[row, index[key]] += sign
    constant.setflags(write=False)
    linear.setflags(write=False)
    logger.debug(f"NS parametrization of {s}: dimension {len(coordinates)}")
    return NSParametrization(s, tuple(coordinates), constant, linear, index)


def ns_affine_dimension(scenario: Scenario) -> int:
    """
    Dimension of the no-signaling affine hull from its equality system.

    Independent of `ns_parametrization`: counts table entries minus the exact
    rank of the normalization and no-signaling equations.
    """
    s = scenario
    size = s.output_count * s.input_count
    equations = []
    for col in range(s.input_count):
        row = [0] * size
        for a in range(s.output_count):
            row[a * s.input_count + col] = 1
        equations.append(row)
    for k in range(s.parties):
        for x in s.input_strings():
            if x[k] == 0:
                continue
            x_ref = x[:k] + (0,) + x[k + 1:]
            for rest in itertools.product(range(s.outputs), repeat=s.parties - 1):
                row = [0] * size
                for a_k in range(s.outputs):
                    a = rest[:k] + (a_k,) + rest[k:]
                    row[s.output_index(a) * s.input_count + s.input_index(x)] += 1
                    row[s.output_index(a) * s.input_count + s.input_index(x_ref)] -= 1
                equations.append(row)
    return size - exact_rank(equations)


# --------------------------------------------------------------------------- #
# Double description
# --------------------------------------------------------------------------- #

def _primitive(vector: Sequence) -> tuple:
    """Scale a rational vector to coprime integers, direction preserved."""
    fractions = [Fraction(v) for v in vector]
    scale = 1
    for v in fractions:
        scale = math.lcm(scale, v.denominator)
    ints = [int(v * scale) for v in fractions]
    common = 0
    for v in ints:
        common = math.gcd(common, v)
    return tuple(v // common for v in ints) if common > 1 else tuple(ints)


def _dot(row: Sequence[int], ray: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(row, ray))


def _double_description(rows: list[tuple], dimension: int, ray_limit: int) -> list[tuple]:
    """
    Extreme rays of the pointed cone {y : row·y >= 0 for every row}.

    ``dimension`` is the ambient dimension of y.
    """
    selected: list[int] = []
    for i, row in enumerate(rows):
        if exact_rank([rows[j] for j in selected] + [row]) > len(selected):
            selected.append(i)
            if len(selected) == dimension:
                break
    if len(selected) < dimension:
        raise BehaviorError("inequality system does not describe a pointed cone")

    basis = [list(rows[i]) for i in selected]
    rays: list[tuple] = []
    zero_sets: list[int] = []
    for j in range(dimension):
        unit = [1 if k == j else 0 for k in range(dimension)]
        rays.append(_primitive(solve_exact(basis, unit)))
        zero_sets.append(sum(1 << selected[k] for k in range(dimension) if k != j))

    needed = dimension - 2
    for i, row in enumerate(rows):
        if i in selected:
            continue
        values = [_dot(row, ray) for ray in rays]
        positive = [k for k, v in enumerate(values) if v > 0]
        negative = [k for k, v in enumerate(values) if v < 0]
        zero = [k for k, v in enumerate(values) if v == 0]
        bit = 1 << i

        new_rays, new_zero_sets = [], []
        for p in positive:
            for q in negative:
                common = zero_sets[p] & zero_sets[q]
                if common.bit_count() < needed:
                    continue
                if any(
                    k != p and k != q and zero_sets[k] & common == common
                    for k in range(len(rays))
                ):
                    continue
                combined = [values[p] * b - values[q] * a for a, b in zip(rays[p], rays[q])]
                new_rays.append(_primitive(combined))
                new_zero_sets.append(common | bit)

        rays = [rays[k] for k in positive] + [rays[k] for k in zero] + new_rays
        zero_sets = (
            [zero_sets[k] for k in positive]
            + [zero_sets[k] | bit for k in zero]
            + new_zero_sets
        )
        if len(rays) > ray_limit:
            raise BudgetExceededError(f"double description exceeded {ray_limit} intermediate rays")
    return rays


def enumerate_vertices(
    parametrization: NSParametrization,
    dimension_limit: int | None = None,
    ray_limit: int | None = None,
) -> VertexSet:
    """
    Every vertex of the no-signaling polytope, exactly.

    Raises:
        BudgetExceededError: when the polytope dimension is above
            ``dimension_limit`` (sample instead) or the ray count explodes.
    """
    p = parametrization
    dimension_limit = _setting("CERTIFY_ENUMERATION_DIM_LIMIT", 10) if dimension_limit is None else dimension_limit
    ray_limit = _setting("CERTIFY_RAY_LIMIT", 250_000) if ray_limit is None else ray_limit
    if p.dimension > dimension_limit:
        raise BudgetExceededError(
            f"{p.scenario} has NS dimension {p.dimension} > {dimension_limit}; "
            "use vertex sampling or raise CERTIFY_ENUMERATION_DIM_LIMIT"
        )
    logger.info(f"Enumerating NS vertices of {p.scenario} (dimension {p.dimension})")
    rows = [(int(k),) + tuple(int(v) for v in l) for k, l in zip(p.constant, p.linear)]
    rows.append((1,) + (0,) * p.dimension)
    rays = _double_description(rows, p.dimension + 1, ray_limit)

    vertices = []
    for ray in rays:
        if ray[0] <= 0:
            logger.warning(f"Unbounded direction {ray} found in {p.scenario}; skipped")
            continue
        coordinates = [Fraction(v, ray[0]) for v in ray[1:]]
        if not p.is_vertex(coordinates):
            raise BehaviorError(f"double description produced a non-extreme point in {p.scenario}")
        vertices.append(p.reconstruct(coordinates))
    result = VertexSet(p.scenario, _dedup(vertices), "enumerate")
    logger.info(f"Found {len(result)} vertices of {p.scenario}")
    return result


# --------------------------------------------------------------------------- #
# Sampling
# --------------------------------------------------------------------------- #

def random_objectives(dimension: int, count: int, seed: int, objective_range: int | None = None) -> list[tuple]:
    """``count`` integer vectors with entries uniform in {-B..B}, reproducible from ``seed``."""
    bound = _setting("CERTIFY_OBJECTIVE_RANGE", 1000) if objective_range is None else objective_range
    rng = np.random.default_rng(seed)
    draws = rng.integers(-bound, bound, size=(count, dimension), endpoint=True)
    return [tuple(int(v) for v in row) for row in draws]


def vertex_for_objective(parametrization: NSParametrization, objective: Sequence[int]) -> Behavior | None:
    """Maximize ``objective·c`` over the polytope; None if the optimum fails the vertex check."""
    p = parametrization
    lp = LinearProgram(
        objective=tuple(objective),
        ineq_matrix=tuple(tuple(-int(v) for v in row) for row in p.linear),
        ineq_rhs=tuple(int(k) for k in p.constant),
        maximize=True,
        nonnegative=True,
    )
    solution = solve_lp(lp)
    if not solution.is_optimal:
        raise BehaviorError(f"vertex LP for {p.scenario} returned {solution.status}")
    if not p.is_vertex(solution.point):
        logger.warning("Optimal basic solution failed the exact vertex check; objective rejected")
        return None
    return p.reconstruct(solution.point)


def vertices_for_objectives(parametrization: NSParametrization, objectives: Iterable[Sequence[int]]) -> list[Behavior]:
    found = []
    for objective in objectives:
        vertex = vertex_for_objective(parametrization, objective)
        if vertex is not None:
            found.append(vertex)
    return found


def sample_vertices(
    parametrization: NSParametrization,
    count: int | None = None,
    seed: int | None = None,
    objective_range: int | None = None,
) -> VertexSet:
    """
    Vertices reached by maximizing ``count`` seeded random objectives.

    Deterministic in (count, seed): Bland's rule fixes the optimal basis of
    every LP and duplicates are dropped in first-seen order.
    """
    p = parametrization
    count = _setting("CERTIFY_SAMPLE_COUNT", 500) if count is None else count
    seed = _setting("CERTIFY_SEED", 20140101) if seed is None else seed
    logger.info(f"Sampling {count} NS vertices of {p.scenario} with seed {seed}")
    objectives = random_objectives(p.dimension, count, seed, objective_range)
    vertices = _dedup(vertices_for_objectives(p, objectives))
    logger.info(f"Sampling {p.scenario}: {len(vertices)} distinct vertices from {count} objectives")
    return VertexSet(p.scenario, vertices, "sample")


def merge_vertex_sets(scenario: Scenario, batches: Iterable[Iterable[Behavior]], method: str = "sample") -> VertexSet:
    return VertexSet(scenario, _dedup(itertools.chain.from_iterable(batches)), method)


# --------------------------------------------------------------------------- #
# Zero counts and bounds
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class ZeroCountReport:
    """
    Attributes
    ----------
    counts : tuple
        n(x0) for every input string, in index order.
    minimum : int
        n = min over x0.
    bound : int
        (d-1)^N.
    passed : bool
        n >= (d-1)^N.
    implied_bounds : tuple
        1/(d^N - n(x0)) per input: a lower bound on the largest entry of p(·|x0).
    """

    counts: tuple
    minimum: int
    bound: int
    passed: bool
    implied_bounds: tuple

    def as_dict(self) -> dict:
        return {
            "counts": list(self.counts),
            "n": self.minimum,
            "bound": self.bound,
            "pass": self.passed,
            "implied_max_entry_bounds": [str(v) for v in self.implied_bounds],
        }


def zero_count(behavior: Behavior) -> ZeroCountReport:
    """
    Count exact zeros of p(·|x0) for every input x0.

    Raises:
        BehaviorError: for float behaviors, whose zeros are ambiguous.
    """
    if behavior.numeric_mode != "rational":
        raise BehaviorError("zero_count needs a rational behavior; convert with to_rational() first")
    s = behavior.scenario
    counts = tuple(int(sum(1 for v in behavior.table[:, col] if v == 0)) for col in range(s.input_count))
    bound = (s.outputs - 1) ** s.parties
    minimum = min(counts)
    implied = tuple(Fraction(1, s.output_count - n) for n in counts)
    return ZeroCountReport(counts, minimum, bound, minimum >= bound, implied)


def ns_randomness_bound(scenario: Scenario) -> Fraction:
    """Lower bound 1/(d^N - (d-1)^N) on the no-signaling guessing probability."""
    return Fraction(1, scenario.outputs ** scenario.parties - (scenario.outputs - 1) ** scenario.parties)


@dataclass(frozen=True, slots=True)
class RandomnessGap:
    bound: Fraction
    observed: Fraction
    vertex_index: int
    input_string: tuple
    tight: bool

    def as_dict(self) -> dict:
        return {
            "bound": str(self.bound),
            "observed_min_max_entry": str(self.observed),
            "vertex": self.vertex_index,
            "x0": "".join(str(v) for v in self.input_string),
            "tight": self.tight,
        }


def randomness_gap(scenario: Scenario, vertices: Iterable[Behavior]) -> RandomnessGap:
    """
    Compare the bound with the smallest max-entry observed over vertices and inputs.
    """
    best = None
    for index, vertex in enumerate(vertices):
        for x in scenario.input_strings():
            value = vertex.max_entry(x)
            if best is None or value < best[0]:
                best = (value, index, x)
    if best is None:
        raise BehaviorError("randomness_gap needs at least one vertex")
    bound = ns_randomness_bound(scenario)
    return RandomnessGap(bound, best[0], best[1], best[2], best[0] == bound)


def vertex_rows(vertices: Iterable[Behavior]) -> list[tuple]:
    """Flatten vertices to (vertex id, output index, input index, value) rows."""
    rows = []
    for vid, vertex in enumerate(vertices):
        outputs, inputs = vertex.table.shape
        for a in range(outputs):
            for x in range(inputs):
                rows.append((vid, a, x, vertex.table[a, x]))
    return rows
