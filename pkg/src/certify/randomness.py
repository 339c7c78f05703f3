"""
randomness.py

Guessing probabilities and randomness certificates.

Design notes
------------
- Over the no-signaling set the optimal convex decomposition is one LP: split
  the observed behavior into d^N subnormalized no-signaling components, one
  per guess e, and maximize Σ_e p_e(e|x0).  Each component lives in the cone
  over the polytope, written with the marginal coordinates as
  λ_e·constant + L·c_e >= 0.
- For dichotomic full-correlator inequalities, output flips that leave the
  inequality unchanged but negate a correlator at x' force that correlator to
  vanish for the (assumed unique) maximal violator; covering every nonempty
  subset gives p(a|x') = 1/2^N.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from helpers.solvers import LinearProgram, solve_lp

from .inequalities import BellInequality, InequalityError
from .polytope import deterministic_strategies, ns_parametrization
from .scenario import (
    Behavior,
    BehaviorError,
    deterministic_behavior,
    is_no_signaling,
    nonempty_subsets,
    parse_digits,
    string_index,
)

logger = logging.getLogger(__name__)


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class CertificationError(RuntimeError):
    """Raised when a symmetry certificate cannot be completed."""

    def __init__(self, message: str, uncovered: Sequence = ()):
        super().__init__(message)
        self.uncovered = list(uncovered)


# --------------------------------------------------------------------------- #
# Reports
# --------------------------------------------------------------------------- #

def min_entropy(guessing_probability) -> float:
    """-log2 G in bits, for 0 < G <= 1."""
    if not 0 < guessing_probability <= 1:
        raise ValueError(f"guessing probability must lie in (0, 1], got {guessing_probability}")
    bits = -math.log2(guessing_probability)
    return bits + 0.0  # normalizes -0.0


@dataclass(frozen=True, slots=True)
class DecompositionTerm:
    weight: object
    behavior: Behavior
    best_output: tuple


@dataclass(frozen=True, slots=True)
class GuessingReport:
    """
    Attributes
    ----------
    x0 : tuple
        Target input string.
    guessing_probability : Fraction or float
    min_entropy : float
        Bits, -log2 G.
    decomposition : tuple of DecompositionTerm
        Empty for certificate-based reports.
    correlation_set : str
        'NS', 'C', 'Q-symmetry' or 'Q^{1+ABC}'.
    certified : bool
        True when an LP dual certificate confirmed the optimum exactly.
    """

    x0: tuple
    guessing_probability: object
    min_entropy: float
    decomposition: tuple = ()
    correlation_set: str = "NS"
    certified: bool = False

    def recombined(self) -> np.ndarray:
        return sum(term.weight * term.behavior.table for term in self.decomposition)


def guessing_probability_ns(behavior: Behavior, x0: Sequence[int]) -> GuessingReport:
    """
    Maximal guessing probability of the outcome string at ``x0`` over
    no-signaling decompositions of ``behavior``.

    Args:
        behavior: A no-signaling behavior; rational mode gives exact results.
        x0: Target input string.

    Returns:
        GuessingReport with the decomposition recovered from the nonzero components.

    Raises:
        BehaviorError: if ``behavior`` is signaling.
    """
    s = behavior.scenario
    x0 = parse_digits(x0, s.parties)
    col0 = s.input_index(x0)
    report = is_no_signaling(behavior)
    if not report.is_no_signaling:
        raise BehaviorError(
            f"behavior is signaling (worst violation {report.worst_violation} at {report.witness})"
        )

    p = ns_parametrization(behavior.scenario)
    dim = p.dimension
    block = dim + 1
    guesses = s.output_strings()
    n_vars = block * len(guesses)
    target = p.extract(behavior)

    objective = [0] * n_vars
    ineq_matrix, ineq_rhs = [], []
    for e_index, e in enumerate(guesses):
        offset = e_index * block
        row = s.output_index(e) * s.input_count + col0
        objective[offset] = int(p.constant[row])
        for k in range(dim):
            objective[offset + 1 + k] = int(p.linear[row, k])
        for r in range(len(p.constant)):
            constraint = [0] * n_vars
            constraint[offset] = -int(p.constant[r])
            for k in range(dim):
                constraint[offset + 1 + k] = -int(p.linear[r, k])
            ineq_matrix.append(constraint)
            ineq_rhs.append(0)

    eq_matrix, eq_rhs = [], []
    weights_row = [0] * n_vars
    for e_index in range(len(guesses)):
        weights_row[e_index * block] = 1
    eq_matrix.append(weights_row)
    eq_rhs.append(1)
    for k in range(dim):
        row = [0] * n_vars
        for e_index in range(len(guesses)):
            row[e_index * block + 1 + k] = 1
        eq_matrix.append(row)
        eq_rhs.append(target[k])

    lp = LinearProgram(
        objective=tuple(objective),
        eq_matrix=tuple(map(tuple, eq_matrix)),
        eq_rhs=tuple(eq_rhs),
        ineq_matrix=tuple(map(tuple, ineq_matrix)),
        ineq_rhs=tuple(ineq_rhs),
        numeric_mode=behavior.numeric_mode,
    )
    solution = solve_lp(lp)
    if not solution.is_optimal:
        raise BehaviorError(f"guessing LP returned {solution.status} for a no-signaling behavior")

    terms = []
    for e_index, e in enumerate(guesses):
        weight = solution.point[e_index * block]
        if weight <= (0 if behavior.numeric_mode == "rational" else 1e-12):
            continue
        coords = solution.point[e_index * block + 1:(e_index + 1) * block]
        if behavior.numeric_mode == "rational":
            component = p.reconstruct([c / weight for c in coords])
        else:
            values = p.constant.astype(float) + p.linear.astype(float) @ (np.array(coords, dtype=float) / weight)
            values = np.clip(values, 0.0, 1.0).reshape(s.output_count, s.input_count)
            values = values / values.sum(axis=0, keepdims=True)
            component = Behavior(s, values, "float")
        terms.append(DecompositionTerm(weight, component, e))

    value = solution.value
    logger.info(f"NS guessing probability at x0={x0}: {value} ({len(terms)} components)")
    return GuessingReport(
        x0=x0,
        guessing_probability=value,
        min_entropy=min_entropy(value),
        decomposition=tuple(terms),
        correlation_set="NS",
        certified=solution.certified,
    )


def local_decomposition(behavior: Behavior) -> tuple | None:
    """
    Weights over local deterministic points reproducing ``behavior``, or None
    when the behavior is nonlocal.
    """
    s = behavior.scenario
    strategies = list(deterministic_strategies(s))
    points = [deterministic_behavior(s, strategy) for strategy in strategies]
    n_entries = s.output_count * s.input_count
    eq_matrix = [
        tuple(point.table.ravel()[i] for point in points)
        for i in range(n_entries)
    ]
    eq_rhs = tuple(behavior.to_rational().table.ravel()) if behavior.numeric_mode == "rational" else tuple(behavior.table.ravel())
    lp = LinearProgram(
        objective=(0,) * len(points),
        eq_matrix=tuple(eq_matrix),
        eq_rhs=eq_rhs,
        numeric_mode=behavior.numeric_mode,
    )
    solution = solve_lp(lp)
    if not solution.is_optimal:
        return None
    return tuple(
        DecompositionTerm(weight, point, ())
        for weight, point in zip(solution.point, points)
        if weight > 0
    )


def guessing_probability_local(behavior: Behavior, x0: Sequence[int]) -> GuessingReport:
    """
    Guessing probability over classical decompositions: 1 for every local behavior.

    Raises:
        BehaviorError: if ``behavior`` has no local decomposition.
    """
    s = behavior.scenario
    x0 = parse_digits(x0, s.parties)
    terms = local_decomposition(behavior)
    if terms is None:
        raise BehaviorError("behavior is nonlocal; it has no decomposition into deterministic points")
    labelled = tuple(
        DecompositionTerm(
            term.weight,
            term.behavior,
            s.output_strings()[max(range(s.output_count), key=lambda a: term.behavior.table[a, s.input_index(x0)])],
        )
        for term in terms
    )
    return GuessingReport(x0, Fraction(1), 0.0, labelled, "C", True)


# --------------------------------------------------------------------------- #
# Transformations
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class Transformation:
    """Flip output a_j whenever x_j == s_j."""

    bits: tuple

    @classmethod
    def parse(cls, text, length: int | None = None) -> "Transformation":
        return cls(parse_digits(text, length))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def hamming_distance(x: Sequence[int], s: Sequence[int]) -> int:
    """H(x, s) = Σ (x_j + s_j mod 2)."""
    if len(x) != len(s):
        raise BehaviorError(f"hamming distance needs equal lengths, got {len(x)} and {len(s)}")
    return sum((a + b) % 2 for a, b in zip(x, s))


def correlator_sign(subset: Sequence[int], inputs: Sequence[int], bits: Sequence[int]) -> int:
    """
    Sign picked up by ⟨x_J⟩ under a transformation: (-1)^(|J| - H(x_J, s_J)).

    ``inputs`` and ``bits`` are the substrings on ``subset``.
    """
    if not len(subset) == len(inputs) == len(bits):
        raise BehaviorError("subset, inputs and transformation substring must have equal lengths")
    flips = len(subset) - hamming_distance(inputs, bits)
    return -1 if flips % 2 else 1


def apply_transformation(behavior: Behavior, transformation: Transformation) -> Behavior:
    """p'(a|x) = p(a ⊕ flip(x) | x) with flip_j = [x_j == s_j]."""
    s = behavior.scenario
    if s.outputs != 2:
        raise BehaviorError("output flips need d = 2")
    bits = transformation.bits
    if len(bits) != s.parties:
        raise BehaviorError(f"transformation has {len(bits)} bits for {s.parties} parties")
    rows = np.arange(s.output_count)
    table = np.empty_like(behavior.table)
    for col, x in enumerate(s.input_strings()):
        flip = string_index([1 if x[j] == bits[j] else 0 for j in range(s.parties)], 2)
        table[:, col] = behavior.table[rows ^ flip, col]
    return Behavior(s, table, behavior.numeric_mode)


def fixes_inequality(inequality: BellInequality, bits: Sequence[int]) -> bool:
    """True when every term keeps its sign under the transformation."""
    return all(
        correlator_sign(subset, inputs, [bits[j] for j in subset]) == 1
        for subset, inputs in inequality.coefficients
    )


def invariant_transformation_family(parties: int) -> list[Transformation]:
    """
    The zero string plus the N-1 strings with s_{N-1} = 1 and exactly one other 1.

    Raises:
        InequalityError: for odd or too small N.
    """
    if parties < 2 or parties % 2:
        raise InequalityError(f"the structured family needs an even N >= 2, got {parties}")
    family = [Transformation((0,) * parties)]
    for i in range(parties - 1):
        bits = [0] * parties
        bits[i] = 1
        bits[-1] = 1
        family.append(Transformation(tuple(bits)))
    return family


# --------------------------------------------------------------------------- #
# Certificates
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True)
class SymmetryCertificate:
    """
    Attributes
    ----------
    inequality : BellInequality
    x_prime : tuple
    transformations : tuple of Transformation
        Transformations that fix the inequality.
    witnesses : dict
        Nonempty subset -> transformation negating its correlator at x'.
    uniqueness_assumed : bool
    conclusion : Fraction
        p(a|x') for every a.
    search : str
        'structured' or 'generic'.
    """

    inequality: BellInequality
    x_prime: tuple
    transformations: tuple
    witnesses: dict
    uniqueness_assumed: bool
    conclusion: Fraction
    search: str = "structured"
    covered: int = field(default=0)


def _witnesses(x_prime: tuple, family: Sequence[Transformation]) -> tuple[dict, list]:
    witnesses, uncovered = {}, []
    for subset in nonempty_subsets(len(x_prime)):
        inputs = [x_prime[j] for j in subset]
        match = next(
            (t for t in family if correlator_sign(subset, inputs, [t.bits[j] for j in subset]) == -1),
            None,
        )
        if match is None:
            uncovered.append(subset)
        else:
            witnesses[subset] = match
    return witnesses, uncovered


def certify_uniform_output(
    inequality: BellInequality,
    x_prime: Sequence[int],
    uniqueness_assumed: bool,
    search: str = "auto",
) -> SymmetryCertificate:
    """
    Certify p(a|x') = 1/2^N for the maximal violator of ``inequality``.

    Args:
        inequality: Full-correlator inequality.
        x_prime: Input string whose outcomes are certified.
        uniqueness_assumed: Must be True; the conclusion holds only for a
            unique maximal violator.
        search: 'structured' (even-N family), 'generic' (all 2^N strings) or
            'auto' (structured first, generic as fallback).

    Raises:
        CertificationError: without the uniqueness flag, or when some subset
            has no sign-flipping witness (``uncovered`` lists them).
    """
    n = inequality.scenario.parties
    x_prime = parse_digits(x_prime, n)
    if not uniqueness_assumed:
        raise CertificationError("the certificate is conditional on a unique maximal violator; set uniqueness_assumed")
    if not inequality.is_full_correlator:
        raise InequalityError("symmetry certificates need a full-correlator inequality")
    if search not in ("auto", "structured", "generic"):
        raise CertificationError(f"unknown search mode {search!r}")

    attempts = []
    if search in ("auto", "structured") and n % 2 == 0:
        attempts.append("structured")
    if search in ("auto", "generic"):
        attempts.append("generic")

    uncovered: list = []
    for mode in attempts:
        if mode == "structured":
            family = [t for t in invariant_transformation_family(n) if fixes_inequality(inequality, t.bits)]
        else:
            family = [
                Transformation(bits)
                for bits in itertools.product((0, 1), repeat=n)
                if fixes_inequality(inequality, bits)
            ]
        witnesses, uncovered = _witnesses(x_prime, family)
        logger.info(
            f"{mode} search for {inequality.name} at x'={x_prime}: "
            f"{len(family)} invariant transformations, {len(uncovered)} uncovered subsets"
        )
        if not uncovered:
            return SymmetryCertificate(
                inequality=inequality,
                x_prime=x_prime,
                transformations=tuple(family),
                witnesses=witnesses,
                uniqueness_assumed=True,
                conclusion=Fraction(1, 2 ** n),
                search=mode,
                covered=len(witnesses),
            )
    raise CertificationError(
        f"no sign-flipping witness for {len(uncovered)} subsets of x'={x_prime}",
        uncovered=uncovered,
    )


def report_from_certificate(certificate: SymmetryCertificate) -> GuessingReport:
    value = certificate.conclusion
    return GuessingReport(certificate.x_prime, value, min_entropy(value), (), "Q-symmetry", True)


def report_from_npa(x0: Sequence[int], value) -> GuessingReport:
    """Report for the moment-matrix relaxation optimum (largest outcome probability)."""
    return GuessingReport(tuple(x0), value, min_entropy(value), (), "Q^{1+ABC}", False)
