"""Shared fixtures: demo tensors and their independent polynomial oracles.

The oracle functions evaluate the closed-form contraction polynomials of the
demo tensors directly, with no shared code paths into the package, so tests
can check the sparse contraction machinery against them.
"""

import numpy as np
import pytest

from tensorcp import demo


@pytest.fixture
def ex_semipos():
    return demo.semipositive_4_3()


@pytest.fixture
def ex_nonsemipos():
    return demo.non_semipositive_4_2()


@pytest.fixture
def ex_not_rowdiag():
    return demo.semipositive_not_row_diagonal_4_3()


def poly_semipos(u):
    u1, u2, u3 = u
    return np.array(
        [
            u1**2 * u2 + u2 * u3**2 + u2**2 * u3,
            u1**2 * u2 + 2 * u2**2 * u3,
            -2 * u1 * u3**2 - 4 * u2**2 * u3,
        ]
    )


def poly_nonsemipos(u):
    u1, u2 = u
    return np.array(
        [
            u1**3 - 3 * u1**2 * u2 - u2**3,
            -3 * u1**2 * u2 + 2 * u2**3,
        ]
    )


def poly_not_rowdiag(u):
    u1, u2, u3 = u
    return np.array(
        [
            2 * u1 * u2**2 + 2 * u1**2 * u3,
            -3 * u1**2 * u2 - u2**2 * u3,
            3 * u1 * u3**2,
        ]
    )


def rational_points(count, dim, include_negative=True):
    """Deterministic rational test points with small denominators."""
    pts = []
    for k in range(count):
        comps = []
        for j in range(dim):
            num = (3 * k + 5 * j + 2) % 17 - (8 if include_negative else 0)
            den = 7 + ((k + j) % 5)
            comps.append(num / den)
        pts.append(np.array(comps))
    return pts
