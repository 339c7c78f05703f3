"""
propagation.py

Exact consequences of a maximal Mermin violation on the moment matrix.

Design notes
------------
- Class values live in a signed union-find: every node points to a parent with
  a relative sign, value(node) = sign · value(parent).  The identity class is
  the node ONE whose value is 1.
- A tie closing a cycle with sign -1 makes the whole component zero.  If ONE
  is in that component the constraints are inconsistent and
  PropagationContradiction is raised.
- The Mermin fixes make the four triples with odd index sum stabilizers:
  R|ψ⟩ = σ_R|ψ⟩.  Hence ⟨W·R⟩ = σ_R ⟨W⟩ for every word W, applied to every
  model class and its adjoint.  Roots prefer ONE, then the shortest word, so
  surviving free symbols are single observables.
- Block O (even triples against the stabilizer triples) gets its own rule,
  logged as "block-O", before the generic closure logged as "stabilizer".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .moment_model import Q2, Q3, SINGLES, SIZE, MomentModel
from .words import IDENTITY, OperatorWord, word_class

logger = logging.getLogger(__name__)

STABILIZERS = (
    ("A0B0C1", 1),
    ("A0B1C0", 1),
    ("A1B0C0", 1),
    ("A1B1C1", -1),
)
PAIR_WORDS = ("A0A1", "B0B1", "C0C1")


# --------------------------------------------------------------------------- #
# Custom exception
# --------------------------------------------------------------------------- #
class PropagationContradiction(RuntimeError):
    """Raised when the propagated constraints would force 1 = -1."""


@dataclass(slots=True)
class PropagationState:
    """
    Attributes
    ----------
    parent : dict
        node -> (parent node, relative sign).
    zero : set
        Roots whose component is forced to 0.
    log : list
        One dict per applied rule, in application order.
    """

    parent: dict = field(default_factory=dict)
    zero: set = field(default_factory=set)
    log: list = field(default_factory=list)

    # ----- union-find ------------------------------------------------------- #

    def add(self, node: OperatorWord) -> None:
        self.parent.setdefault(node, (node, 1))

    def find(self, node: OperatorWord) -> tuple[OperatorWord, int]:
        self.add(node)
        parent, sign = self.parent[node]
        if parent == node:
            return node, 1
        root, parent_sign = self.find(parent)
        self.parent[node] = (root, sign * parent_sign)
        return root, sign * parent_sign

    def _mark_zero(self, root: OperatorWord, reason: str) -> None:
        if root == IDENTITY:
            raise PropagationContradiction(f"constraints force 1 = -1 ({reason})")
        self.zero.add(root)

    def tie(self, u: OperatorWord, v: OperatorWord, sign: int, rule: str, detail: str = "") -> None:
        """Assert value(u) = sign · value(v)."""
        root_u, sign_u = self.find(u)
        root_v, sign_v = self.find(v)
        relative = sign_u * sign * sign_v  # value(root_u) = relative · value(root_v)
        self.log.append({"rule": rule, "left": str(u), "right": str(v), "sign": sign, "detail": detail})
        if root_u == root_v:
            if relative == -1 and root_u not in self.zero:
                logger.debug(f"{u} = -{u} after {rule}: component of {root_u} is zero")
                self._mark_zero(root_u, f"{rule}: {detail or u}")
            return
        if root_u == IDENTITY or (root_v != IDENTITY and root_u.sort_key() < root_v.sort_key()):
            keep, child = root_u, root_v
        else:
            keep, child = root_v, root_u
        self.parent[child] = (keep, relative)
        if child in self.zero:
            self.zero.discard(child)
            self._mark_zero(keep, f"{rule}: {detail or child}")

    # ----- reading ---------------------------------------------------------- #

    def value(self, node: OperatorWord):
        """
        0 or ±1 when fixed, else ``(sign, root)`` for a free symbol.
        """
        root, sign = self.find(node)
        if root in self.zero:
            return 0
        if root == IDENTITY:
            return sign
        return (sign, root)

    def status(self, node: OperatorWord) -> str:
        root, _ = self.find(node)
        if root in self.zero or root == IDENTITY:
            return "fixed"
        return "free" if root == node else "tied"

    def free_symbols(self, nodes) -> set:
        found = set()
        for node in nodes:
            value = self.value(node)
            if isinstance(value, tuple):
                found.add(value[1])
        return found


def _word(label: str) -> OperatorWord:
    return OperatorWord.from_string(label)


def tie_block_o(state: PropagationState, model: MomentModel) -> None:
    """
    Equate the two expressions of the block O = Γ[Q2, Q3].

    Row k is the rank-one pattern σ_l·⟨P_k⟩ (stabilizer column R_l acting on
    |ψ⟩); each entry is also the class of P_k·R_l, which reduces to a pair
    word such as B0B1 or to a longer word.  Tying them entry by entry closes
    odd cycles through q2 and the pair words, which zeroes both.
    """
    signs = dict(STABILIZERS)
    for k in Q2:
        for l in Q3:
            sigma = signs[str(model.basis[l])]
            entry = model.class_of(k, l)
            state.tie(entry, model.basis[k], sigma, "block-O", f"O[{k},{l}] = {sigma:+d}·⟨{model.basis[k]}⟩")
    zeroed = [label for label in PAIR_WORDS + tuple(str(model.basis[k]) for k in Q2) if state.value(_word(label)) == 0]
    logger.debug(f"block O: zeroed {zeroed}")


def propagate_stabilizers(model: MomentModel) -> PropagationState:
    """
    Install the Mermin-saturating fixes, equate the two forms of block O and
    close the model classes under right multiplication by the stabilizers.

    Raises:
        PropagationContradiction: if the closure forces the identity class to 0.
    """
    state = PropagationState()
    state.add(IDENTITY)
    for cls in model.classes:
        state.add(cls)
    for label, sigma in STABILIZERS:
        state.tie(_word(label), IDENTITY, sigma, "mermin", f"⟨{label}⟩ = {sigma:+d}")

    tie_block_o(state, model)
    for cls in model.classes:
        if cls.is_identity:
            continue
        for word in (cls,) if cls.adjoint() == cls else (cls, cls.adjoint()):
            for label, sigma in STABILIZERS:
                product = word_class(word * _word(label)).unsigned()
                state.tie(product, cls, sigma, "stabilizer", f"{word}·{label}")
    fixed = sum(1 for cls in model.classes if state.status(cls) == "fixed")
    logger.info(
        f"stabilizer propagation: {len(state.log)} rules, {fixed}/{len(model.classes)} classes fixed, "
        f"free symbols {sorted(str(s) for s in state.free_symbols(model.classes))}"
    )
    return state


def reconstruct_gamma(model: MomentModel, state: PropagationState, singles=0) -> np.ndarray:
    """
    Exact Γ from the propagated classes.

    Args:
        singles: value for every free single-observable symbol, or a mapping
            from labels such as "A1" to values.

    Raises:
        ValueError: if a class is tied to a symbol that is not a single observable.
    """
    gamma = np.empty((SIZE, SIZE), dtype=object)
    for i in range(SIZE):
        for j in range(SIZE):
            value = state.value(model.class_of(i, j))
            if isinstance(value, tuple):
                sign, root = value
                if root.length != 1:
                    raise ValueError(f"entry ({i}, {j}) is tied to the unresolved symbol {root}")
                symbol = singles.get(str(root), 0) if isinstance(singles, dict) else singles
                value = sign * Fraction(symbol)
            gamma[i, j] = Fraction(value)
    return gamma


# --------------------------------------------------------------------------- #
# Reference solution
# --------------------------------------------------------------------------- #

def _definition_value(word: OperatorWord) -> Fraction:
    label = str(word)
    if word.is_identity:
        return Fraction(1)
    if label in ("A0B0C1", "A0B1C0", "A1B0C0"):
        return Fraction(1)
    if label == "A1B1C1":
        return Fraction(-1)
    long_parts = [p for p in word.parts if p]
    if len(long_parts) == 2 and all(len(p) == 2 and p[0] != p[1] for p in long_parts):
        # P·P'† when the two pairs run in opposite order, P·P' otherwise
        return Fraction(1) if long_parts[0] != long_parts[1] else Fraction(-1)
    return Fraction(0)


def gamma_reference(model: MomentModel) -> np.ndarray:
    """
    The unique feasible moment matrix at maximal Mermin violation: 1 on the
    diagonal and on ⟨001⟩, ⟨010⟩, ⟨100⟩ and P·P'† entries, -1 on ⟨111⟩ and P·P'
    entries (P ≠ P' among A0A1, B0B1, C0C1), 0 elsewhere.
    """
    gamma = np.empty((SIZE, SIZE), dtype=object)
    for i in range(SIZE):
        for j in range(SIZE):
            gamma[i, j] = Fraction(1) if i == j else _definition_value(model.class_of(i, j))
    return gamma


def schur_submatrix(gamma: np.ndarray) -> np.ndarray:
    """
    Schur complement of the (I, I) entry, restricted to singles and the even
    triples: Γ[k, l] - Γ[k, 0]Γ[0, l]/Γ[0, 0] for k, l in those rows.
    """
    rows = list(SINGLES) + list(Q2)
    head = gamma[0, 0]
    out = np.empty((len(rows), len(rows)), dtype=object)
    for a, k in enumerate(rows):
        for b, l in enumerate(rows):
            out[a, b] = gamma[k, l] - gamma[k, 0] * gamma[0, l] / head
    return out


def block_d() -> np.ndarray:
    """D = q3ᵀ·q3 with q3 = (1, 1, 1, -1)."""
    q3 = np.array([Fraction(1), Fraction(1), Fraction(1), Fraction(-1)], dtype=object)
    return np.outer(q3, q3)


