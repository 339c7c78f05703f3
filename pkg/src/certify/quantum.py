"""
quantum.py

Dense pure-state simulation of N qubits measured with dichotomic projective
observables.

Design notes
------------
- States are flat complex vectors of length 2^N with party 0 as the most
  significant qubit, so reshaping to (2,)*N gives one axis per party in the
  same order as output strings.
- Probabilities are computed by contracting each party's projector stack into
  the state tensor one party at a time; correlators apply one observable per
  party and take Re⟨ψ|φ⟩.
- For the GHZ state and equatorial observables O(θ) = cos θ·X + sin θ·Y the
  full correlator is cos(Σ_j θ_j - φ), which gives the settings ansatz; every
  claimed value is re-checked by dense simulation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from django.conf import settings
from scipy.optimize import minimize

from .inequalities import BellInequality, parity_family
from .scenario import Behavior, Scenario

logger = logging.getLogger(__name__)

_ATOL = 1e-12


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class QuantumSimulationError(RuntimeError):
    """Raised for invalid states/observables or when a target violation is not reached."""


def _max_parties() -> int:
    return getattr(settings, "CERTIFY_QUANTUM_MAX_PARTIES", 12)


# --------------------------------------------------------------------------- #
# Types
# --------------------------------------------------------------------------- #

@dataclass(frozen=True, slots=True, eq=False)
class StateVector:
    """
    Unit vector of N qubits.

    Attributes
    ----------
    amplitudes : numpy.ndarray
        Complex, length 2^N, norm 1 within 1e-12.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        vector = np.asarray(self.amplitudes, dtype=complex).ravel().copy()
        size = vector.size
        if size < 2 or size & (size - 1):
            raise QuantumSimulationError(f"state length must be a power of two >= 2, got {size}")
        norm = np.linalg.norm(vector)
        if abs(norm - 1.0) > _ATOL:
            raise QuantumSimulationError(f"state norm is {norm}, not 1")
        vector.setflags(write=False)
        object.__setattr__(self, "amplitudes", vector)

    @property
    def parties(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.parties)

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, slots=True, eq=False)
class Observable:
    """
    Dichotomic qubit observable: Hermitian with O² = I.

    ``angle`` is set for equatorial observables cos θ·X + sin θ·Y.
    """

    matrix: np.ndarray
    angle: float | None = None

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise QuantumSimulationError(f"observable must be 2x2, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, atol=_ATOL):
            raise QuantumSimulationError("observable is not Hermitian")
        if not np.allclose(matrix @ matrix, np.eye(2), atol=_ATOL):
            raise QuantumSimulationError("observable does not square to the identity")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def equatorial(cls, theta: float) -> "Observable":
        phase = np.exp(1j * theta)
        return cls(np.array([[0, np.conj(phase)], [phase, 0]]), float(theta))

    @classmethod
    def bloch(cls, direction: Sequence[float]) -> "Observable":
        """n·σ for the normalized direction n = (n_x, n_y, n_z)."""
        n = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(n) if n.shape == (3,) else 0.0
        if norm < _ATOL:
            raise QuantumSimulationError(f"Bloch direction must be a nonzero 3-vector, got {direction!r}")
        x, y, z = n / norm
        return cls(np.array([[z, x - 1j * y], [x + 1j * y, -z]]))

    @classmethod
    def pauli(cls, axis: str) -> "Observable":
        matrices = {
            "x": [[0, 1], [1, 0]],
            "y": [[0, -1j], [1j, 0]],
            "z": [[1, 0], [0, -1]],
        }
        try:
            return cls(np.array(matrices[axis.lower()]))
        except KeyError:
            raise QuantumSimulationError(f"unknown Pauli axis {axis!r}") from None

    def projector(self, outcome: int) -> np.ndarray:
        """(I + (-1)^a O) / 2."""
        sign = -1 if outcome else 1
        return 0.5 * (np.eye(2) + sign * self.matrix)


@dataclass(frozen=True, slots=True)
class MeasurementAssignment:
    """``observables[j][x_j]`` is party j's observable for input x_j."""

    observables: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.observables)
        if not rows or not rows[0]:
            raise QuantumSimulationError("measurement assignment is empty")
        if any(len(row) != len(rows[0]) for row in rows):
            raise QuantumSimulationError("every party needs the same number of inputs")
        object.__setattr__(self, "observables", rows)

    @classmethod
    def from_angles(cls, angles: Sequence[Sequence[float]]) -> "MeasurementAssignment":
        return cls(tuple(tuple(Observable.equatorial(t) for t in row) for row in angles))

    @property
    def parties(self) -> int:
        return len(self.observables)

    @property
    def inputs(self) -> int:
        return len(self.observables[0])

    def angles(self) -> list[list[float | None]]:
        return [[o.angle for o in row] for row in self.observables]

    def as_dict(self, phase: float | None = None) -> dict:
        payload = {"angles": self.angles()}
        if phase is not None:
            payload["phase"] = phase
        return payload


# --------------------------------------------------------------------------- #
# States
# --------------------------------------------------------------------------- #

def ghz_state(parties: int, phase: float = 0.0) -> StateVector:
    """(|0…0⟩ + e^{iφ}|1…1⟩)/√2."""
    if parties < 2:
        raise QuantumSimulationError("a GHZ state needs at least two parties")
    if parties > _max_parties():
        raise QuantumSimulationError(f"{parties} qubits exceed CERTIFY_QUANTUM_MAX_PARTIES={_max_parties()}")
    vector = np.zeros(2 ** parties, dtype=complex)
    vector[0] = 1 / math.sqrt(2)
    vector[-1] = np.exp(1j * phase) / math.sqrt(2)
    return StateVector(vector)


def product_state(bits: Sequence[int]) -> StateVector:
    vector = np.zeros(2 ** len(bits), dtype=complex)
    index = 0
    for bit in bits:
        index = 2 * index + int(bit)
    vector[index] = 1.0
    return StateVector(vector)


# --------------------------------------------------------------------------- #
# Measurement statistics
# --------------------------------------------------------------------------- #

def _as_observable(value) -> Observable:
    return value if isinstance(value, Observable) else Observable(value)


def quantum_behavior(state: StateVector, assignment: MeasurementAssignment) -> Behavior:
    """
    p(a|x) = ||(⊗_j P^{x_j}_{a_j}) ψ||² as a float Behavior in (N, M, 2).

    Raises:
        QuantumSimulationError: if the assignment does not cover every qubit.
    """
    n = state.parties
    if assignment.parties != n:
        raise QuantumSimulationError(f"state has {n} qubits, assignment {assignment.parties} parties")
    scenario = Scenario(n, assignment.inputs, 2)
    stacks = [
        [np.stack([o.projector(0), o.projector(1)]) for o in row]
        for row in assignment.observables
    ]
    table = np.empty((scenario.output_count, scenario.input_count))
    psi = state.tensor()
    for col, x in enumerate(scenario.input_strings()):
        amplitudes = psi
        for j in range(n):
            # axes so far: a_0..a_{j-1}, then the n physical axes; qubit j sits at 2j
            contracted = np.tensordot(stacks[j][x[j]], amplitudes, axes=([2], [2 * j]))
            amplitudes = np.moveaxis(contracted, [0, 1], [j, 2 * j + 1])
        weights = np.sum(np.abs(amplitudes) ** 2, axis=tuple(range(n, 2 * n)))
        table[:, col] = weights.ravel()
    return Behavior(scenario, table, "float")


def correlator(state: StateVector, observables: Sequence) -> float:
    """
    Re⟨ψ|O_0 ⊗ … ⊗ O_{N-1}|ψ⟩; ``None`` entries stand for the identity.
    """
    n = state.parties
    if len(observables) != n:
        raise QuantumSimulationError(f"need {n} observables (None for identity), got {len(observables)}")
    phi = state.tensor()
    for j, value in enumerate(observables):
        if value is None:
            continue
        matrix = _as_observable(value).matrix
        phi = np.moveaxis(np.tensordot(matrix, phi, axes=([1], [j])), 0, j)
    return float(np.real(np.vdot(state.tensor().ravel(), phi.ravel())))


def inequality_value(inequality: BellInequality, state: StateVector, assignment: MeasurementAssignment) -> float:
    """Bell value computed term by term from dense correlators."""
    n = inequality.scenario.parties
    total = 0.0
    for (subset, inputs), coeff in inequality.coefficients.items():
        chosen = [None] * n
        for j, x in zip(subset, inputs):
            chosen[j] = assignment.observables[j][x]
        total += float(coeff) * correlator(state, chosen)
    return total


# --------------------------------------------------------------------------- #
# Optimal settings
# --------------------------------------------------------------------------- #

def _ghz_equatorial_value(inequality: BellInequality, angles: np.ndarray, phase: float) -> float:
    total = 0.0
    for (subset, inputs), coeff in inequality.coefficients.items():
        total += float(coeff) * math.cos(sum(angles[j, x] for j, x in zip(subset, inputs)) - phase)
    return total


def maximal_parity_settings(parties: int) -> tuple[MeasurementAssignment, float, float]:
    """
    GHZ phase and equatorial angles reaching 2^(N-1) on the parity family.

    Starts from θ(0) = 0, θ(1) = π/2, φ = 0 and refines all angles and the phase
    with BFGS on the closed-form GHZ value.

    Returns:
        (assignment, phase, value) where value is the dense-simulation Bell value.

    Raises:
        QuantumSimulationError: if N exceeds the dense cap or the refined
            settings fall short of 2^(N-1) - 1e-6.
    """
    if parties > _max_parties():
        raise QuantumSimulationError(f"{parties} qubits exceed CERTIFY_QUANTUM_MAX_PARTIES={_max_parties()}")
    inequality = parity_family(parties)
    target = 2 ** (parties - 1)
    start = np.concatenate([np.tile([0.0, math.pi / 2], parties), [0.0]])

    def loss(v: np.ndarray) -> float:
        return -_ghz_equatorial_value(inequality, v[:-1].reshape(parties, 2), v[-1])

    result = minimize(loss, start, method="BFGS", options={"gtol": 1e-12})
    vector = result.x if -result.fun >= -loss(start) else start
    angles, phase = vector[:-1].reshape(parties, 2), float(vector[-1])

    assignment = MeasurementAssignment.from_angles(angles.tolist())
    value = inequality_value(inequality, ghz_state(parties, phase), assignment)
    logger.info(f"parity{parties}: GHZ equatorial value {value:.12f} (target {target})")
    if value < target - 1e-6:
        raise QuantumSimulationError(f"settings reach {value}, short of the algebraic bound {target}")
    return assignment, phase, value


def mermin_optimal_settings() -> tuple[MeasurementAssignment, float]:
    """Angles -π/6 (input 0) and π/3 (input 1) on every party with φ = 0."""
    angles = [[-math.pi / 6, math.pi / 3]] * 3
    return MeasurementAssignment.from_angles(angles), 0.0
