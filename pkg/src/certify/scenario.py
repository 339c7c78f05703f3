"""
scenario.py

Bell scenarios, behaviors and their correlator representation.

Design notes
------------
- A scenario (N, M, d) fixes N parties, M inputs per party and d outputs per
  input.  Parties are 0-based in code; strings of inputs or outputs are tuples
  with party 0 first, and a string maps to the integer Σ_j s_j · base^(N-1-j)
  (party 0 most significant), which is also `itertools.product` order.
- A behavior stores p(a|x) as a read-only numpy array of shape (d^N, M^N):
  rows are output strings, columns are input strings.  In rational mode the
  array holds `fractions.Fraction` objects and every check is exact; in float
  mode it holds float64 and checks use an absolute tolerance.
- For d = 2 the correlator of a party subset J is ⟨x_J⟩ = Σ_a (-1)^(Σ_{j∈J} a_j)
  p(a|x).  Indexing subsets by bitmasks aligned with output strings turns the
  transform into a product with the Sylvester-Hadamard matrix, whose inverse
  is itself over 2^N.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Sequence

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)

NumericMode = Literal["rational", "float"]


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class BehaviorError(ValueError):
    """Raised for malformed scenarios, behaviors or correlator tables."""


# --------------------------------------------------------------------------- #
# Utilities
# --------------------------------------------------------------------------- #

def default_tolerance() -> float:
    return getattr(settings, "CERTIFY_TOLERANCE", 1e-9)


def to_rational(value) -> Fraction:
    """Exact conversion; floats go through their shortest repr so 0.1 -> 1/10."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (float, np.floating)):
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    raise BehaviorError(f"cannot read {value!r} as a rational number")


def string_index(digits: Sequence[int], base: int) -> int:
    """Index of a digit string, party 0 most significant."""
    index = 0
    for digit in digits:
        index = index * base + int(digit)
    return index


def string_digits(index: int, base: int, length: int) -> tuple[int, ...]:
    digits = []
    for _ in range(length):
        index, digit = divmod(index, base)
        digits.append(digit)
    return tuple(reversed(digits))


def parse_digits(text: str | Sequence[int], length: int | None = None) -> tuple[int, ...]:
    """Read "0110" or (0, 1, 1, 0) into a tuple of ints."""
    if isinstance(text, str):
        digits = tuple(int(ch) for ch in text.strip() if not ch.isspace() and ch != ",")
    else:
        digits = tuple(int(d) for d in text)
    if length is not None and len(digits) != length:
        raise BehaviorError(f"expected a string of {length} digits, got {text!r}")
    return digits


def subset_mask(parties: Iterable[int], n_parties: int) -> int:
    mask = 0
    for j in parties:
        mask |= 1 << (n_parties - 1 - j)
    return mask


def mask_subset(mask: int, n_parties: int) -> tuple[int, ...]:
    return tuple(j for j in range(n_parties) if mask >> (n_parties - 1 - j) & 1)


def nonempty_subsets(n_parties: int) -> list[tuple[int, ...]]:
    """All nonempty party subsets, by size then lexicographically."""
    return [
        subset
        for size in range(1, n_parties + 1)
        for subset in itertools.combinations(range(n_parties), size)
    ]


def hadamard_signs(n_parties: int) -> np.ndarray:
    """S[J, a] = (-1)^popcount(J & a) over bitmask-indexed subsets and output strings."""
    size = 1 << n_parties
    masks = np.arange(size)
    overlap = masks[:, None] & masks[None, :]
    parity = np.zeros_like(overlap)
    for bit in range(n_parties):
        parity ^= (overlap >> bit) & 1
    return 1 - 2 * parity


# --------------------------------------------------------------------------- #
# Scenario
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class Scenario:
    """
    Bell scenario (N, M, d).

    Attributes
    ----------
    parties : int
        Number of parties N >= 1.
    inputs : int
        Inputs per party M >= 1.
    outputs : int
        Outputs per input d >= 2.
    """

    parties: int
    inputs: int
    outputs: int

    def __post_init__(self):
        if self.parties < 1 or self.inputs < 1 or self.outputs < 2:
            raise BehaviorError(
                f"invalid scenario (N={self.parties}, M={self.inputs}, d={self.outputs}); "
                "need N >= 1, M >= 1, d >= 2"
            )

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        """Read "N,M,d"."""
        try:
            n, m, d = (int(part) for part in text.split(","))
        except ValueError as exc:
            raise BehaviorError(f"scenario must look like 'N,M,d', got {text!r}") from exc
        return cls(n, m, d)

    @property
    def input_count(self) -> int:
        return self.inputs ** self.parties

    @property
    def output_count(self) -> int:
        return self.outputs ** self.parties

    def input_strings(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.inputs), repeat=self.parties))

    def output_strings(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.outputs), repeat=self.parties))

    def input_index(self, x: Sequence[int]) -> int:
        x = tuple(x)
        if len(x) != self.parties or any(not 0 <= v < self.inputs for v in x):
            raise BehaviorError(f"input string {x} does not fit {self}")
        return string_index(x, self.inputs)

    def output_index(self, a: Sequence[int]) -> int:
        a = tuple(a)
        if len(a) != self.parties or any(not 0 <= v < self.outputs for v in a):
            raise BehaviorError(f"output string {a} does not fit {self}")
        return string_index(a, self.outputs)

    def as_dict(self) -> dict:
        return {"N": self.parties, "M": self.inputs, "d": self.outputs}

    def __str__(self) -> str:
        return f"({self.parties},{self.inputs},{self.outputs})"


# --------------------------------------------------------------------------- #
# Behavior
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True, eq=False)
class Behavior:
    """
    Conditional distribution p(a|x) of a Bell experiment.

    Attributes
    ----------
    scenario : Scenario
    table : numpy.ndarray
        Shape (d^N, M^N); rows index output strings, columns input strings.
    numeric_mode : {'rational', 'float'}
    """

    scenario: Scenario
    table: np.ndarray
    numeric_mode: NumericMode = "rational"

    def __post_init__(self):
        s = self.scenario
        shape = (s.output_count, s.input_count)
        if self.numeric_mode == "rational":
            array = np.empty(shape, dtype=object)
            flat = np.asarray(self.table, dtype=object)
            if flat.size != array.size:
                raise BehaviorError(f"{s} needs {array.size} entries, got {flat.size}")
            array.flat[:] = [to_rational(v) for v in flat.ravel()]
        elif self.numeric_mode == "float":
            array = np.asarray(self.table, dtype=float).copy()
            if array.size != shape[0] * shape[1]:
                raise BehaviorError(f"{s} needs {shape[0] * shape[1]} entries, got {array.size}")
            array = array.reshape(shape)
        else:
            raise BehaviorError(f"unknown numeric mode {self.numeric_mode!r}")

        tol = 0 if self.numeric_mode == "rational" else default_tolerance()
        low = min(array.ravel())
        if low < -tol:
            raise BehaviorError(f"negative entry {low} in behavior table")
        if max(array.ravel()) > 1 + tol:
            raise BehaviorError("behavior entry above 1")
        sums = array.sum(axis=0)
        for col, total in enumerate(sums):
            if abs(total - 1) > tol:
                x = string_digits(col, s.inputs, s.parties)
                raise BehaviorError(f"column x={x} sums to {total}, not 1")
        array.setflags(write=False)
        object.__setattr__(self, "table", array)

    # ----- access ----------------------------------------------------------- #

    def probability(self, a: Sequence[int], x: Sequence[int]):
        return self.table[self.scenario.output_index(a), self.scenario.input_index(x)]

    def column(self, x: Sequence[int]) -> np.ndarray:
        return self.table[:, self.scenario.input_index(x)]

    def max_entry(self, x: Sequence[int]):
        return max(self.column(x))

    def tensor(self) -> np.ndarray:
        """View with axes (a_0, …, a_{N-1}, x_0, …, x_{N-1})."""
        s = self.scenario
        return self.table.reshape((s.outputs,) * s.parties + (s.inputs,) * s.parties)

    # ----- conversions ------------------------------------------------------ #

    def to_float(self) -> "Behavior":
        if self.numeric_mode == "float":
            return self
        return Behavior(self.scenario, self.table.astype(float), "float")

    def to_rational(self, max_denominator: int | None = None) -> "Behavior":
        """Exact copy; float entries are snapped with `limit_denominator` when asked."""
        if self.numeric_mode == "rational":
            return self
        values = [Fraction(repr(float(v))) for v in self.table.ravel()]
        if max_denominator is not None:
            values = [v.limit_denominator(max_denominator) for v in values]
        return Behavior(self.scenario, values, "rational")

    def key(self) -> tuple:
        """Hashable exact identity of the table (dedup key)."""
        return (self.scenario, self.numeric_mode, tuple(self.table.ravel().tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Behavior):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


def infer_mode(entries) -> NumericMode:
    flat = np.asarray(entries, dtype=object).ravel()
    return "float" if any(isinstance(v, (float, np.floating)) for v in flat) else "rational"


def behavior_from_table(scenario: Scenario, entries, numeric_mode: NumericMode | None = None) -> Behavior:
    """
    Validate and wrap a table of probabilities.

    Args:
        scenario: The (N, M, d) triple.
        entries: Flat sequence in row-major (output, input) order, or a nested
            d^N x M^N sequence.
        numeric_mode: 'rational' or 'float'; inferred from the entries when None.

    Returns:
        Behavior with checked normalization (no-signaling is not asserted).
    """
    mode = numeric_mode or infer_mode(entries)
    return Behavior(scenario, entries, mode)


def uniform_behavior(scenario: Scenario, numeric_mode: NumericMode = "rational") -> Behavior:
    value = Fraction(1, scenario.output_count)
    entries = np.full((scenario.output_count, scenario.input_count), value, dtype=object)
    behavior = Behavior(scenario, entries, "rational")
    return behavior.to_float() if numeric_mode == "float" else behavior


def deterministic_behavior(scenario: Scenario, strategy: Sequence[Sequence[int]]) -> Behavior:
    """
    Local deterministic point: party j answers ``strategy[j][x_j]``.
    """
    if len(strategy) != scenario.parties or any(len(f) != scenario.inputs for f in strategy):
        raise BehaviorError(f"strategy must give {scenario.inputs} outputs for each of {scenario.parties} parties")
    entries = np.full((scenario.output_count, scenario.input_count), Fraction(0), dtype=object)
    for col, x in enumerate(scenario.input_strings()):
        a = tuple(int(strategy[j][x[j]]) for j in range(scenario.parties))
        entries[scenario.output_index(a), col] = Fraction(1)
    return Behavior(scenario, entries, "rational")


def pr_box(relabeling: Sequence[int] = (0, 0, 0)) -> Behavior:
    """
    PR box in (2,2,2): p = 1/2 when a_0 ⊕ a_1 = x_0·x_1 ⊕ αx_0 ⊕ βx_1 ⊕ γ, else 0.

    The eight relabelings (α, β, γ) give the eight nonlocal vertices.
    """
    alpha, beta, gamma = (int(v) % 2 for v in relabeling)
    scenario = Scenario(2, 2, 2)
    entries = np.full((4, 4), Fraction(0), dtype=object)
    for col, (x0, x1) in enumerate(scenario.input_strings()):
        target = (x0 * x1 + alpha * x0 + beta * x1 + gamma) % 2
        for row, (a0, a1) in enumerate(scenario.output_strings()):
            if (a0 + a1) % 2 == target:
                entries[row, col] = Fraction(1, 2)
    return Behavior(scenario, entries, "rational")


def mixture(terms: Sequence[tuple[object, Behavior]]) -> Behavior:
    """Convex combination Σ w_k b_k; weights must be nonnegative and sum to 1."""
    if not terms:
        raise BehaviorError("mixture needs at least one term")
    scenario = terms[0][1].scenario
    if any(b.scenario != scenario for _, b in terms):
        raise BehaviorError("mixture terms must share a scenario")
    rational = all(b.numeric_mode == "rational" for _, b in terms) and not any(
        isinstance(w, float) for w, _ in terms
    )
    if rational:
        weights = [to_rational(w) for w, _ in terms]
        tables = [b.table for _, b in terms]
    else:
        weights = [float(w) for w, _ in terms]
        tables = [b.table.astype(float) for _, b in terms]
    if any(w < 0 for w in weights):
        raise BehaviorError("mixture weights must be nonnegative")
    total = sum(w * t for w, t in zip(weights, tables))
    return Behavior(scenario, total, "rational" if rational else "float")


# --------------------------------------------------------------------------- #
# Marginals and no-signaling
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class MarginalDistribution:
    """p(a_J | x_J), listed over output substrings in product order."""

    parties: tuple
    inputs: tuple
    probabilities: tuple

    def as_dict(self) -> dict:
        return {"subset": list(self.parties), "inputs": list(self.inputs), "p": list(self.probabilities)}


def marginal(behavior: Behavior, parties: Sequence[int], x: Sequence[int]) -> MarginalDistribution:
    """Sum out every party outside ``parties`` at the full input string ``x``."""
    s = behavior.scenario
    subset = tuple(sorted(set(int(j) for j in parties)))
    if not subset:
        raise BehaviorError("marginal needs a nonempty party subset")
    if any(not 0 <= j < s.parties for j in subset):
        raise BehaviorError(f"party subset {subset} does not fit {s}")
    column = behavior.column(x).reshape((s.outputs,) * s.parties)
    others = tuple(j for j in range(s.parties) if j not in subset)
    summed = column.sum(axis=others) if others else column
    x = tuple(x)
    return MarginalDistribution(
        parties=subset,
        inputs=tuple(x[j] for j in subset),
        probabilities=tuple(np.asarray(summed, dtype=object).ravel().tolist()),
    )


@dataclass(frozen=True, slots=True)
class NoSignalingReport:
    """
    Attributes
    ----------
    is_no_signaling : bool
    worst_violation : number
        Largest |p(a_rest|x) - p(a_rest|x')| over inputs differing at one party.
    witness : tuple
        (party, input string) attaining the worst violation, empty when none.
    """

    is_no_signaling: bool
    worst_violation: object
    witness: tuple = field(default=())

    def as_dict(self) -> dict:
        return {
            "no_signaling": self.is_no_signaling,
            "worst_violation": str(self.worst_violation),
            "witness": {"party": self.witness[0], "x": list(self.witness[1])} if self.witness else None,
        }


def is_no_signaling(behavior: Behavior, tol: float | None = None) -> NoSignalingReport:
    """
    Check that the marginal of the other parties never depends on party k's input.

    Testing the (N-1)-party marginals is enough: every smaller marginal is a
    sum of those.
    """
    s = behavior.scenario
    tol = default_tolerance() if tol is None else tol
    exact = behavior.numeric_mode == "rational"
    tensor = behavior.tensor()
    zero = Fraction(0) if exact else 0.0
    worst, witness = zero, ()
    if s.parties == 1:
        return NoSignalingReport(True, zero)
    for k in range(s.parties):
        rest = tensor.sum(axis=k)
        input_axis = s.parties - 1 + k
        reference = np.take(rest, [0], axis=input_axis)
        deviation = np.abs(rest - reference) if not exact else np.vectorize(abs, otypes=[object])(rest - reference)
        flat_position = int(np.argmax(deviation.astype(float)))
        value = deviation.ravel()[flat_position]
        if value > worst:
            worst = value
            position = np.unravel_index(flat_position, deviation.shape)
            witness = (k, tuple(int(v) for v in position[s.parties - 1:]))
    passed = worst == 0 if exact else worst <= tol
    if not passed:
        logger.debug(f"Signaling behavior in {s}: worst violation {worst} at {witness}")
    return NoSignalingReport(bool(passed), worst, witness)


# --------------------------------------------------------------------------- #
# Correlators
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True, eq=False)
class CorrelatorTable:
    """
    Correlators ⟨x_J⟩ of a dichotomic behavior.

    Attributes
    ----------
    scenario : Scenario
        Must have d = 2.
    values : dict
        ``(J, x_J) -> value`` for every subset J (tuple of parties) and every
        input substring x_J; the empty subset maps to 1.
    contexts : dict or None
        ``(J, x) -> value`` over full input strings, present only when some
        correlator depends on inputs outside J (signaling behaviors).
    numeric_mode : {'rational', 'float'}
    """

    scenario: Scenario
    values: dict
    contexts: dict | None = None
    numeric_mode: NumericMode = "rational"

    def __post_init__(self):
        s = self.scenario
        if s.outputs != 2:
            raise BehaviorError("correlators are defined for d = 2 only")
        tol = 0 if self.numeric_mode == "rational" else default_tolerance()
        values = dict(self.values)
        if values.setdefault(((), ()), 1) != 1:
            raise BehaviorError("the empty-set correlator must be 1")
        for mapping in (values, self.contexts or {}):
            for key, value in mapping.items():
                if abs(value) > 1 + tol:
                    raise BehaviorError(f"correlator {key} = {value} lies outside [-1, 1]")
        for subset in nonempty_subsets(s.parties):
            for xs in itertools.product(range(s.inputs), repeat=len(subset)):
                if (subset, xs) not in values:
                    raise BehaviorError(f"missing correlator for subset {subset}, inputs {xs}")
        object.__setattr__(self, "values", values)

    def value(self, subset: Sequence[int], inputs: Sequence[int]):
        return self.values[(tuple(subset), tuple(inputs))]

    def value_at(self, subset: Sequence[int], x: Sequence[int]):
        """Correlator of ``subset`` with the parties set to the full input string ``x``."""
        subset, x = tuple(subset), tuple(x)
        if self.contexts is not None and subset:
            return self.contexts[(subset, x)]
        return self.values[(subset, tuple(x[j] for j in subset))]

    def with_value(self, subset: Sequence[int], inputs: Sequence[int], value) -> "CorrelatorTable":
        """Copy with one entry replaced (validated again)."""
        values = dict(self.values)
        values[(tuple(subset), tuple(inputs))] = value
        return CorrelatorTable(self.scenario, values, None, self.numeric_mode)


def _require_dichotomic(scenario: Scenario) -> None:
    if scenario.outputs != 2:
        raise BehaviorError(f"correlators need d = 2, scenario is {scenario}")


def correlator_matrix(behavior: Behavior) -> np.ndarray:
    """C[J_mask, x_index] = ⟨x_J⟩ at the full input x."""
    _require_dichotomic(behavior.scenario)
    signs = hadamard_signs(behavior.scenario.parties)
    if behavior.numeric_mode == "rational":
        return signs.astype(object).dot(behavior.table)
    return signs.astype(float) @ behavior.table


def correlators_from_behavior(behavior: Behavior) -> CorrelatorTable:
    """
    Correlators of every subset at every input substring.

    When a correlator takes different values at different completions of x_J
    the full per-context table is kept as well, so the inverse transform
    reproduces the behavior exactly.
    """
    s = behavior.scenario
    _require_dichotomic(s)
    matrix = correlator_matrix(behavior)
    exact = behavior.numeric_mode == "rational"
    tol = 0 if exact else default_tolerance()
    inputs = s.input_strings()

    values: dict = {((), ()): Fraction(1) if exact else 1.0}
    contexts: dict = {}
    consistent = True
    for subset in nonempty_subsets(s.parties):
        row = matrix[subset_mask(subset, s.parties)]
        for col, x in enumerate(inputs):
            value = row[col]
            contexts[(subset, x)] = value
            key = (subset, tuple(x[j] for j in subset))
            if key not in values:
                values[key] = value
            elif abs(values[key] - value) > tol:
                consistent = False
    return CorrelatorTable(s, values, None if consistent else contexts, behavior.numeric_mode)


def behavior_from_correlators(table: CorrelatorTable) -> Behavior:
    """
    p(a|x) = 2^-N Σ_J (-1)^(Σ_{k∈J} a_k) ⟨x_J⟩.

    Raises
    ------
    BehaviorError
        When a reconstructed entry leaves [0, 1] (the table is not a behavior).
    """
    s = table.scenario
    exact = table.numeric_mode == "rational"
    size = 1 << s.parties
    matrix = np.empty((size, s.input_count), dtype=object if exact else float)
    inputs = s.input_strings()
    for mask in range(size):
        subset = mask_subset(mask, s.parties)
        for col, x in enumerate(inputs):
            matrix[mask, col] = table.value_at(subset, x)
    signs = hadamard_signs(s.parties)
    if exact:
        probabilities = signs.astype(object).T.dot(matrix) * Fraction(1, size)
    else:
        probabilities = signs.astype(float).T @ matrix / size
    tol = 0 if exact else default_tolerance()
    worst = min(probabilities.ravel())
    if worst < -tol:
        raise BehaviorError(f"correlators reconstruct a negative probability {worst}")
    if not exact:
        probabilities = np.clip(probabilities, 0.0, 1.0)
    return Behavior(s, probabilities, table.numeric_mode)
