"""Dense tableau simplex over exact rationals.

Specialized to the one program the matrix class checkers need:

    minimize t  subject to  A x <= t * e,  x >= 0,  sum(x) = 1

All pivoting is done in :class:`fractions.Fraction`; float inputs are lifted
exactly (every float is a rational), so the optimal value and optimizer are
exact.  Bland's rule guarantees termination on degenerate tableaus.  Problem
sizes here are tiny (n <= 10), so exactness costs nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = ["LpResult", "OPTIMAL", "INFEASIBLE", "minimax_on_simplex"]

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LpResult:
    """Outcome of the min-max program over the standard simplex."""

    status: str
    t_star: float
    x_star: np.ndarray
    t_exact: Fraction
    x_exact: tuple[Fraction, ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def _pivot(tableau, obj, basis, row, col):
    piv = tableau[row][col]
    inv = _ONE / piv
    tableau[row] = [v * inv for v in tableau[row]]
    prow = tableau[row]
    for i, r in enumerate(tableau):
        if i != row and r[col] != 0:
            f = r[col]
            tableau[i] = [a - f * b for a, b in zip(r, prow)]
    if obj[col] != 0:
        f = obj[col]
        for j in range(len(obj)):
            obj[j] -= f * prow[j]
    basis[row] = col


def _bland_step(tableau, obj, basis, ncols):
    """One simplex step; returns False at optimality. Raises if unbounded."""
    enter = -1
    for j in range(ncols):
        if obj[j] < 0:
            enter = j
            break
    if enter < 0:
        return False
    leave = -1
    best = None
    for i, row in enumerate(tableau):
        a = row[enter]
        if a > 0:
            ratio = row[-1] / a
            if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                best = ratio
                leave = i
    if leave < 0:
        raise ArithmeticError("LP unbounded; malformed program")
    _pivot(tableau, obj, basis, leave, enter)
    return True


def _solve_standard_form(a_rows, b, c):
    """min c.y s.t. A y = b, y >= 0 with b >= 0; returns (y, value) or None."""
    m = len(a_rows)
    n = len(c)
    total = n + m  # structural + artificial
    tableau = []
    for i in range(m):
        row = list(a_rows[i]) + [_ZERO] * m + [b[i]]
        row[n + i] = _ONE
        tableau.append(row)
    basis = [n + i for i in range(m)]

    # Phase 1: minimize the sum of artificials; reduced costs are the
    # negated column sums while the artificials are basic.
    obj = [_ZERO] * (total + 1)
    for j in range(n):
        obj[j] = -sum(tableau[i][j] for i in range(m))
    obj[-1] = -sum(tableau[i][-1] for i in range(m))
    while _bland_step(tableau, obj, basis, n):
        pass
    if -obj[-1] != 0:
        return None
    # Drive any degenerate artificial out of the basis (or drop its row).
    for i in range(m - 1, -1, -1):
        if basis[i] >= n:
            col = next((j for j in range(n) if tableau[i][j] != 0), -1)
            if col >= 0:
                _pivot(tableau, obj, basis, i, col)
            else:
                del tableau[i]
                del basis[i]
    m = len(tableau)

    # Phase 2 on structural columns only.
    tableau = [row[:n] + [row[-1]] for row in tableau]
    obj = list(c) + [_ZERO]
    for i in range(m):
        cb = c[basis[i]]
        if cb != 0:
            for j in range(n):
                obj[j] -= cb * tableau[i][j]
            obj[-1] -= cb * tableau[i][-1]
    while _bland_step(tableau, obj, basis, n):
        pass
    y = [_ZERO] * n
    for i in range(m):
        y[basis[i]] = tableau[i][-1]
    value = sum(ci * yi for ci, yi in zip(c, y))
    return y, value


def minimax_on_simplex(a) -> LpResult:
    """Exactly minimize ``max_l (A x)_l`` over the standard simplex.

    ``A`` is a square matrix (any rational-valued entries; floats are lifted
    exactly).  Always feasible and bounded, so the status is Optimal.
    """
    mat = np.asarray(a, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    m = mat.shape[0]
    rows = [[_frac(mat[i, j]) for j in range(m)] for i in range(m)]

    if m == 1:
        t = rows[0][0]
        return LpResult(OPTIMAL, float(t), np.array([1.0]), t, (_ONE,))

    # Variables: x (m), t+, t-, slacks (m).
    n = 2 * m + 2
    a_rows = []
    for i in range(m):
        row = [_ZERO] * n
        for j in range(m):
            row[j] = rows[i][j]
        row[m] = -_ONE
        row[m + 1] = _ONE
        row[m + 2 + i] = _ONE
        a_rows.append(row)
    srow = [_ONE] * m + [_ZERO] * (m + 2)
    a_rows.append(srow)
    b = [_ZERO] * m + [_ONE]
    c = [_ZERO] * m + [_ONE, -_ONE] + [_ZERO] * m

    solved = _solve_standard_form(a_rows, b, c)
    if solved is None:  # unreachable for this program; kept for safety
        return LpResult(INFEASIBLE, math_nan := float("nan"), np.full(m, math_nan), _ZERO, ())
    y, value = solved
    x_exact = tuple(y[:m])
    x_star = np.array([float(v) for v in x_exact])
    return LpResult(OPTIMAL, float(value), x_star, value, x_exact)
