"""
_linalg.py

Exact rational linear algebra on small dense matrices.

Everything here works on ``fractions.Fraction`` entries (ints and "p/q" strings are
accepted and converted) so that ranks, solutions and positive-semidefiniteness
verdicts carry no rounding.  The routines are row-reduction based and meant for
matrices of a few hundred entries per side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


# --------------------------------------------------------------------------- #
# Helpers
# --------------------------------------------------------------------------- #

def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, numpy integers and "p/q" strings to ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(int(value)) if float(value).is_integer() else Fraction(value)


def fraction_matrix(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Return a fresh list-of-lists copy with ``Fraction`` entries."""
    return [[as_fraction(entry) for entry in row] for row in rows]


def _row_echelon(matrix: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """
    Reduce ``matrix`` in place to reduced row echelon form.

    Returns
    -------
    (matrix, pivot_columns)
    """
    if not matrix:
        return matrix, []
    n_rows, n_cols = len(matrix), len(matrix[0])
    pivot_columns: list[int] = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        pivot = next((r for r in range(row, n_rows) if matrix[r][col] != 0), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        head = matrix[row][col]
        matrix[row] = [entry / head for entry in matrix[row]]
        for r in range(n_rows):
            factor = matrix[r][col]
            if r != row and factor != 0:
                matrix[r] = [a - factor * b for a, b in zip(matrix[r], matrix[row])]
        pivot_columns.append(col)
        row += 1
    return matrix, pivot_columns


# --------------------------------------------------------------------------- #
# Public interface
# --------------------------------------------------------------------------- #

def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix given as a sequence of rows."""
    if len(rows) == 0:
        return 0
    _, pivots = _row_echelon(fraction_matrix(rows))
    return len(pivots)


def solve_exact(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """
    Solve the square nonsingular system ``matrix @ x = rhs`` exactly.

    Raises
    ------
    ValueError
        If the system is not square or the matrix is singular.
    """
    n = len(matrix)
    if n == 0:
        return []
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError(f"solve_exact expects a square system, got {n} rows and rhs of {len(rhs)}")
    augmented = [row + [as_fraction(b)] for row, b in zip(fraction_matrix(matrix), rhs)]
    reduced, pivots = _row_echelon(augmented)
    if pivots != list(range(n)):
        raise ValueError("solve_exact: matrix is singular")
    return [reduced[i][n] for i in range(n)]


@dataclass(frozen=True, slots=True)
class PSDCertificate:
    """
    Outcome of an exact LDLᵀ factorisation attempt.

    Attributes
    ----------
    is_psd : bool
        True when every pivot is nonnegative and zero pivots have zero rows.
    pivots : tuple[Fraction, ...]
        The diagonal of D (zero for eliminated-by-dependence rows).
    rank : int
        Number of strictly positive pivots.
    failure : str
        Empty when ``is_psd``; otherwise where the factorisation broke down.
    """

    is_psd: bool
    pivots: tuple
    rank: int
    failure: str = ""


def ldl_psd_certificate(matrix: Sequence[Sequence]) -> PSDCertificate:
    """
    Decide positive semidefiniteness of a symmetric rational matrix exactly.

    Symmetric Gaussian elimination without pivoting: a negative pivot, or a zero
    pivot whose remaining row is not identically zero, refutes PSD.  Otherwise the
    eliminations give ``matrix = L D Lᵀ`` with ``D >= 0``.
    """
    work = fraction_matrix(matrix)
    n = len(work)
    for i in range(n):
        if len(work[i]) != n:
            raise ValueError("ldl_psd_certificate expects a square matrix")
        for j in range(i):
            if work[i][j] != work[j][i]:
                return PSDCertificate(False, (), 0, f"not symmetric at ({i}, {j})")

    pivots: list[Fraction] = []
    for k in range(n):
        head = work[k][k]
        if head < 0:
            return PSDCertificate(False, tuple(pivots), sum(1 for p in pivots if p > 0), f"negative pivot at {k}")
        if head == 0:
            if any(work[k][j] != 0 for j in range(k + 1, n)):
                return PSDCertificate(False, tuple(pivots), sum(1 for p in pivots if p > 0), f"zero pivot with nonzero row at {k}")
            pivots.append(Fraction(0))
            continue
        pivots.append(head)
        for i in range(k + 1, n):
            factor = work[i][k] / head
            if factor == 0:
                continue
            for j in range(k + 1, n):
                work[i][j] -= factor * work[k][j]
    rank = sum(1 for p in pivots if p > 0)
    return PSDCertificate(True, tuple(pivots), rank)
