"""
inequalities.py

Bell inequalities in correlator form: CHSH, the tripartite Mermin inequality
and the even-parity family, with exact evaluation, local bounds by strategy
enumeration and algebraic bounds.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polytope import deterministic_strategies
from .scenario import (
    Behavior,
    Scenario,
    correlator_matrix,
    string_index,
    subset_mask,
    to_rational,
)

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class InequalityError(ValueError):
    """Raised for malformed inequalities or mismatched scenarios."""


# --------------------------------------------------------------------------- #
# Type
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True, eq=False)
class BellInequality:
    """
    Linear functional Σ c_{J,x_J} ⟨x_J⟩ on dichotomic behaviors.

    Attributes
    ----------
    scenario : Scenario
        Must have d = 2.
    coefficients : dict
        ``(J, x_J) -> Fraction``; only nonzero terms are kept.
    name : str
    declared_local_bound : Fraction or None
        Published local bound, kept as metadata next to the computed one.
    """

    scenario: Scenario
    coefficients: dict
    name: str = "inequality"
    declared_local_bound: Fraction | None = None

    def __post_init__(self):
        s = self.scenario
        if s.outputs != 2:
            raise InequalityError("correlator inequalities need d = 2")
        cleaned = {}
        for (subset, inputs), coeff in self.coefficients.items():
            subset, inputs = tuple(int(j) for j in subset), tuple(int(v) for v in inputs)
            if not subset or list(subset) != sorted(set(subset)) or subset[-1] >= s.parties:
                raise InequalityError(f"bad party subset {subset} for {s}")
            if len(inputs) != len(subset) or any(not 0 <= v < s.inputs for v in inputs):
                raise InequalityError(f"inputs {inputs} do not match subset {subset}")
            coeff = to_rational(coeff)
            if coeff != 0:
                cleaned[(subset, inputs)] = cleaned.get((subset, inputs), Fraction(0)) + coeff
        object.__setattr__(self, "coefficients", {k: v for k, v in cleaned.items() if v != 0})

    def coefficient(self, subset: Sequence[int], inputs: Sequence[int]) -> Fraction:
        return self.coefficients.get((tuple(subset), tuple(inputs)), Fraction(0))

    def terms(self) -> list[tuple]:
        """Terms sorted by subset size, subset, then inputs."""
        return sorted(self.coefficients.items(), key=lambda item: (len(item[0][0]), item[0]))

    @property
    def is_full_correlator(self) -> bool:
        full = tuple(range(self.scenario.parties))
        return all(subset == full for subset, _ in self.coefficients)

    def probability_form(self) -> np.ndarray:
        """
        β with Σ_{a,x} β[a, x] p(a|x) equal to the correlator value on
        no-signaling behaviors; each term is read at x_j = 0 outside J.
        """
        s = self.scenario
        beta = np.full((s.output_count, s.input_count), Fraction(0), dtype=object)
        for (subset, inputs), coeff in self.coefficients.items():
            x = [0] * s.parties
            for j, v in zip(subset, inputs):
                x[j] = v
            col = s.input_index(x)
            for row, a in enumerate(s.output_strings()):
                sign = -1 if sum(a[j] for j in subset) % 2 else 1
                beta[row, col] += sign * coeff
        return beta

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "scenario": self.scenario.as_dict(),
            "terms": [
                {"subset": list(subset), "inputs": list(inputs), "coeff": str(coeff)}
                for (subset, inputs), coeff in self.terms()
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "BellInequality":
        try:
            sc = payload["scenario"]
            scenario = Scenario(int(sc["N"]), int(sc["M"]), int(sc["d"]))
            coefficients = {
                (tuple(term["subset"]), tuple(term["inputs"])): to_rational(term["coeff"])
                for term in payload["terms"]
            }
        except (KeyError, TypeError) as exc:
            raise InequalityError(f"inequality JSON is missing {exc}") from exc
        return cls(scenario, coefficients, payload.get("name", "inequality"))


# --------------------------------------------------------------------------- #
# Evaluation and bounds
# --------------------------------------------------------------------------- #

def evaluate(inequality: BellInequality, behavior: Behavior):
    """
    Σ coefficients × correlators of ``behavior``.

    Exact (Fraction) for rational behaviors, float otherwise.
    """
    s = inequality.scenario
    if behavior.scenario != s:
        raise InequalityError(f"inequality is for {s}, behavior is in {behavior.scenario}")
    matrix = correlator_matrix(behavior)
    exact = behavior.numeric_mode == "rational"
    total = Fraction(0) if exact else 0.0
    for (subset, inputs), coeff in inequality.coefficients.items():
        x = [0] * s.parties
        for j, v in zip(subset, inputs):
            x[j] = v
        value = matrix[subset_mask(subset, s.parties), string_index(x, s.inputs)]
        total += coeff * value if exact else float(coeff) * float(value)
    return total


def local_bound(inequality: BellInequality, limit: int | None = None) -> Fraction:
    """
    Maximum over local deterministic strategies, where ⟨x_J⟩ = Π_{j∈J} (-1)^(f_j(x_j)).
    """
    s = inequality.scenario
    terms = inequality.terms()
    best = None
    for strategy in deterministic_strategies(s, limit):
        value = Fraction(0)
        for (subset, inputs), coeff in terms:
            parity = sum(strategy[j][x] for j, x in zip(subset, inputs)) % 2
            value += -coeff if parity else coeff
        if best is None or value > best:
            best = value
    logger.debug(f"local bound of {inequality.name}: {best}")
    return best


def algebraic_bound(inequality: BellInequality) -> Fraction:
    return sum((abs(c) for c in inequality.coefficients.values()), Fraction(0))


# --------------------------------------------------------------------------- #
# Named inequalities
# --------------------------------------------------------------------------- #

def chsh() -> BellInequality:
    """⟨00⟩ + ⟨01⟩ + ⟨10⟩ - ⟨11⟩ <= 2."""
    full = (0, 1)
    coefficients = {(full, (0, 0)): 1, (full, (0, 1)): 1, (full, (1, 0)): 1, (full, (1, 1)): -1}
    return BellInequality(Scenario(2, 2, 2), coefficients, "chsh", Fraction(2))


def mermin3() -> BellInequality:
    """⟨001⟩ + ⟨010⟩ + ⟨100⟩ - ⟨111⟩ <= 2."""
    full = (0, 1, 2)
    coefficients = {
        (full, (0, 0, 1)): 1,
        (full, (0, 1, 0)): 1,
        (full, (1, 0, 0)): 1,
        (full, (1, 1, 1)): -1,
    }
    return BellInequality(Scenario(3, 2, 2), coefficients, "mermin3", Fraction(2))


def parity_exponent(x: Sequence[int]) -> int:
    """f(x) = Σ_{j<N-1} x_j (Σ_{k>j} x_k) mod 2."""
    total = 0
    for j in range(len(x) - 1):
        total += x[j] * sum(x[j + 1:])
    return total % 2


def parity_exponent_pairwise(x: Sequence[int]) -> int:
    """Same exponent via the pair count C(w, 2) of a weight-w string."""
    weight = sum(x)
    return (weight * (weight - 1) // 2) % 2


def parity_family(parties: int) -> BellInequality:
    """
    Σ_x (-1)^f(x) [Σ_j x_j even] ⟨x⟩ over full correlators of N parties.

    Args:
        parties: N >= 2.

    Returns:
        BellInequality with 2^(N-1) terms and algebraic bound 2^(N-1).
    """
    if parties < 2:
        raise InequalityError("the parity family needs N >= 2")
    full = tuple(range(parties))
    coefficients = {}
    for x in itertools.product((0, 1), repeat=parties):
        if sum(x) % 2 == 0:
            coefficients[(full, x)] = -1 if parity_exponent(x) else 1
    return BellInequality(Scenario(parties, 2, 2), coefficients, f"parity{parties}")
