import itertools
from fractions import Fraction

import numpy as np
import pytest

from tensorcp.lp import OPTIMAL, minimax_on_simplex


def brute_force_minimax(a, resolution=64):
    """Grid oracle: exact integer evaluation of max(Ax) on the simplex."""
    a = np.asarray(a)
    m = a.shape[0]
    best = None
    for comp in itertools.combinations(range(resolution + m - 1), m - 1):
        ks = []
        prev = -1
        for c in comp:
            ks.append(c - prev - 1)
            prev = c
        ks.append(resolution + m - 2 - prev)
        val = max(
            sum(int(a[i, j]) * ks[j] for j in range(m)) for i in range(m)
        )
        best = val if best is None else min(best, val)
    return Fraction(best, resolution)


class TestMinimaxOnSimplex:
    def test_single_entry(self):
        res = minimax_on_simplex([[-1.0]])
        assert res.status == OPTIMAL
        assert res.t_exact == -1
        assert res.x_exact == (Fraction(1),)

    def test_known_member(self):
        # min over the simplex of max(x1 - x2, 2 x2) is attained at 0.
        res = minimax_on_simplex([[1.0, -1.0], [0.0, 2.0]])
        assert res.t_exact >= 0

    def test_known_violation(self):
        res = minimax_on_simplex([[-1.0, -2.0], [-3.0, -1.0]])
        assert res.t_exact < 0
        assert sum(res.x_exact) == 1
        assert all(v >= 0 for v in res.x_exact)

    def test_optimizer_achieves_value(self):
        a = np.array([[1.0, -2.0], [-1.0, 1.0]])
        res = minimax_on_simplex(a)
        x = np.array([float(v) for v in res.x_exact])
        assert max(a @ x) == pytest.approx(float(res.t_exact), abs=1e-12)

    def test_exactness_against_grid_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(120):
            m = int(rng.integers(1, 4))
            a = rng.integers(-2, 3, size=(m, m)).astype(float)
            res = minimax_on_simplex(a)
            grid = brute_force_minimax(a)
            # The LP optimum is a lower bound for any grid value and exact
            # arithmetic keeps the comparison meaningful.
            assert res.t_exact <= grid
            # Optimizer is primal feasible and achieves t_exact exactly.
            assert sum(res.x_exact) == 1
            achieved = max(
                sum(Fraction(float(a[i, j])) * res.x_exact[j] for j in range(m))
                for i in range(m)
            )
            assert achieved == res.t_exact

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            minimax_on_simplex(np.ones((2, 3)))
