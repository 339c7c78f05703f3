"""
moment_model.py

The 15x15 real moment matrix of the (3,2,2) scenario over the basis
I, single observables and triple products.

Design notes
------------
- Entry (i, j) is bound to the class of O_i† O_j (see `word_class`).  Class ids
  are assigned in row-major order over the upper triangle, so the identity is
  class 0.
- Diagonal entries are fixed to 1.  Every other class contributes one tie per
  extra upper-triangle entry, each linking it to the first entry of its class;
  the ties are linearly independent, which the interior-point solver needs.
- Functionals are symmetric matrices F with value ½tr(FΓ); they are built from
  `entry_matrix` so ½tr(entry_matrix(i, j)·Γ) = Γ_ij.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..quantum import MeasurementAssignment, QuantumSimulationError, StateVector
from .words import BASIS_LABELS, OperatorWord, basis_words, entry_word, word_class

logger = logging.getLogger(__name__)

SIZE = len(BASIS_LABELS)
SINGLES = tuple(range(1, 7))
Q2 = tuple(range(7, 11))
Q3 = tuple(range(11, 15))


@dataclass(frozen=True, slots=True, eq=False)
class MomentModel:
    """
    Attributes
    ----------
    basis : tuple of OperatorWord
    class_ids : numpy.ndarray
        SIZE x SIZE integer grid, symmetric.
    classes : tuple of OperatorWord
        Canonical word of each class id.
    ties : tuple
        ``((i, j), (k, l))`` pairs asserting Γ_ij = Γ_kl, upper triangle only.
    fixed : dict
        ``(i, i) -> 1`` for the diagonal.
    """

    basis: tuple
    class_ids: np.ndarray
    classes: tuple
    ties: tuple
    fixed: dict

    def index(self, label: str) -> int:
        return BASIS_LABELS.index(label)

    def class_of(self, i: int, j: int) -> OperatorWord:
        return self.classes[self.class_ids[i, j]]

    def entries(self, word: OperatorWord) -> list[tuple[int, int]]:
        """Upper-triangle entries bound to the class of ``word``."""
        target = self.classes.index(word_class(word).unsigned())
        return [(i, j) for i in range(SIZE) for j in range(i, SIZE) if self.class_ids[i, j] == target]

    def tie_matrices(self) -> list[np.ndarray]:
        """Symmetric D with ½tr(DΓ) = Γ_ij - Γ_kl for every tie."""
        return [entry_matrix(*a) - entry_matrix(*b) for a, b in self.ties]

    def diagonal_matrices(self) -> list[np.ndarray]:
        return [entry_matrix(i, i) for i in range(SIZE)]

    def tie_residual(self, gamma: np.ndarray) -> float:
        gamma = np.asarray(gamma, dtype=float)
        if not self.ties:
            return 0.0
        return max(abs(gamma[a] - gamma[b]) for a, b in self.ties)

    def as_dict(self) -> dict:
        return {
            "basis": [str(w) for w in self.basis],
            "classes": [str(w) for w in self.classes],
            "class_map": self.class_ids.tolist(),
            "fixed": {f"{i},{j}": str(v) for (i, j), v in sorted(self.fixed.items())},
            "tie_count": len(self.ties),
        }


def entry_matrix(i: int, j: int) -> np.ndarray:
    """Symmetric S with ½tr(SΓ) = Γ_ij."""
    matrix = np.zeros((SIZE, SIZE))
    if i == j:
        matrix[i, i] = 2.0
    else:
        matrix[i, j] = matrix[j, i] = 1.0
    return matrix


def build_moment_model() -> MomentModel:
    basis = basis_words()
    class_ids = np.zeros((SIZE, SIZE), dtype=int)
    classes: list[OperatorWord] = []
    lookup: dict[OperatorWord, int] = {}
    first: dict[int, tuple[int, int]] = {}
    ties = []
    for i in range(SIZE):
        for j in range(i, SIZE):
            cls = word_class(entry_word(basis[i], basis[j])).unsigned()
            if cls not in lookup:
                lookup[cls] = len(classes)
                classes.append(cls)
            cid = lookup[cls]
            class_ids[i, j] = class_ids[j, i] = cid
            if i == j:
                continue
            if cid in first:
                ties.append((first[cid], (i, j)))
            else:
                first[cid] = (i, j)
    class_ids.setflags(write=False)
    model = MomentModel(
        basis=basis,
        class_ids=class_ids,
        classes=tuple(classes),
        ties=tuple(ties),
        fixed={(i, i): Fraction(1) for i in range(SIZE)},
    )
    logger.debug(f"moment model: {len(classes)} classes, {len(ties)} ties")
    return model


# --------------------------------------------------------------------------- #
# Functionals
# --------------------------------------------------------------------------- #

def functional_value(functional: np.ndarray, gamma: np.ndarray):
    """½tr(FΓ); exact when both arrays hold Fractions/ints."""
    return (functional * gamma).sum() / 2


def mermin_functional(model: MomentModel) -> np.ndarray:
    """B = C + Cᵀ with row I of C carrying ⟨001⟩ + ⟨010⟩ + ⟨100⟩ - ⟨111⟩."""
    c = np.full((SIZE, SIZE), Fraction(0), dtype=object)
    for label, sign in (("A0B0C1", 1), ("A0B1C0", 1), ("A1B0C0", 1), ("A1B1C1", -1)):
        c[0, model.index(label)] = Fraction(sign)
    return c + c.T


def probability_functional(model: MomentModel, outcome: Sequence[int]) -> np.ndarray:
    """
    M_a with ½tr(M_aΓ) = p(a|000), expanded over correlators at inputs 000.
    """
    a = tuple(int(v) for v in outcome)
    if len(a) != 3 or any(v not in (0, 1) for v in a):
        raise ValueError(f"outcome must be three bits, got {outcome!r}")
    eighth = Fraction(1, 8)
    terms = [((0, 0), 1)]
    singles = ("A0", "B0", "C0")
    for j, label in enumerate(singles):
        terms.append(((0, model.index(label)), (-1) ** a[j]))
    for j in range(3):
        for k in range(j + 1, 3):
            terms.append(((model.index(singles[j]), model.index(singles[k])), (-1) ** (a[j] + a[k])))
    terms.append(((0, model.index("A0B0C0")), (-1) ** sum(a)))

    functional = np.full((SIZE, SIZE), Fraction(0), dtype=object)
    for (i, j), sign in terms:
        if i == j:
            functional[i, i] += 2 * sign * eighth
        else:
            functional[i, j] += sign * eighth
            functional[j, i] += sign * eighth
    return functional


# --------------------------------------------------------------------------- #
# Embeddings
# --------------------------------------------------------------------------- #

def _word_operator(word: OperatorWord, assignment: MeasurementAssignment) -> np.ndarray:
    operator = np.eye(1, dtype=complex)
    for party, part in enumerate(word.parts):
        local = np.eye(2, dtype=complex)
        for index in part:
            local = local @ assignment.observables[party][index].matrix
        operator = np.kron(operator, local)
    return word.sign * operator


def quantum_moment_matrix(state: StateVector, assignment: MeasurementAssignment, model: MomentModel | None = None) -> np.ndarray:
    """Re⟨ψ|O_i† O_j|ψ⟩ for a three-qubit realization."""
    if state.parties != 3 or assignment.parties != 3 or assignment.inputs != 2:
        raise QuantumSimulationError("the moment model needs three qubits with two inputs each")
    basis = model.basis if model is not None else basis_words()
    vectors = np.array([_word_operator(w, assignment) @ state.amplitudes for w in basis])
    return np.real(vectors.conj() @ vectors.T)


def deterministic_moment_matrix(strategy: Sequence[Sequence[int]], model: MomentModel | None = None) -> np.ndarray:
    """Γ_ij = v(O_i)·v(O_j) where each letter X_x takes the value (-1)^f_X(x)."""
    basis = model.basis if model is not None else basis_words()
    values = []
    for word in basis:
        value = word.sign
        for party, part in enumerate(word.parts):
            for index in part:
                value *= -1 if strategy[party][index] else 1
        values.append(value)
    v = np.array(values, dtype=int)
    return np.outer(v, v)
