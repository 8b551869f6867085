"""Hand-picked sample tensors sitting on interesting class boundaries.

These small fixtures are used by the regression tests, the verification
suites, and the README walkthrough.  The contraction of each is a readable
polynomial vector, recorded here for reference.
"""

from __future__ import annotations

import numpy as np

from .core import Tensor, make_tensor

__all__ = [
    "semipositive_4_3",
    "non_semipositive_4_2",
    "semipositive_not_row_diagonal_4_3",
    "rescale_demo_matrices",
]


def semipositive_4_3() -> Tensor:
    """Order-4, dim-3 semipositive tensor.

    Contraction: (u1^2 u2 + u2 u3^2 + u2^2 u3,  u1^2 u2 + 2 u2^2 u3,
    -2 u1 u3^2 - 4 u2^2 u3).
    """
    return make_tensor(
        4,
        3,
        {
            (1, 2, 1, 1): 1.0,
            (1, 2, 3, 3): 2.0,
            (1, 3, 2, 3): -1.0,
            (1, 2, 2, 3): -3.0,
            (1, 2, 3, 2): 4.0,
            (2, 2, 1, 1): 1.0,
            (2, 2, 2, 3): -3.0,
            (2, 3, 2, 2): 5.0,
            (3, 2, 3, 2): -1.0,
            (3, 3, 2, 2): -3.0,
            (3, 3, 1, 3): -2.0,
        },
    )


def non_semipositive_4_2() -> Tensor:
    """Order-4, dim-2 tensor that is not semipositive.

    Contraction: (u1^3 - 3 u1^2 u2 - u2^3,  -3 u1^2 u2 + 2 u2^3); at the
    all-ones vector this is (-3, -1), negative on the whole support.
    """
    return make_tensor(
        4,
        2,
        {
            (1, 1, 1, 1): 1.0,
            (1, 1, 2, 1): -1.0,
            (1, 1, 1, 2): -3.0,
            (1, 2, 2, 2): -1.0,
            (1, 2, 1, 1): 1.0,
            (2, 1, 2, 1): -3.0,
            (2, 2, 2, 2): 2.0,
        },
    )


def semipositive_not_row_diagonal_4_3() -> Tensor:
    """Order-4, dim-3 semipositive tensor that is not row diagonal.

    Contraction: (2 u1 u2^2 + 2 u1^2 u3,  -3 u1^2 u2 - u2^2 u3,  3 u1 u3^2).
    """
    return make_tensor(
        4,
        3,
        {
            (1, 1, 2, 2): 2.0,
            (1, 1, 3, 1): 2.0,
            (2, 2, 1, 1): 1.0,
            (2, 1, 1, 2): -4.0,
            (2, 3, 2, 2): -1.0,
            (3, 2, 3, 2): -1.0,
            (3, 3, 2, 2): 1.0,
            (3, 3, 1, 3): 3.0,
        },
    )


def rescale_demo_matrices() -> tuple[np.ndarray, np.ndarray]:
    """Nonnegative diagonal rescalings that repair :func:`non_semipositive_4_2`.

    Scaling a non-semipositive tensor by either of these singular diagonal
    matrices produces a semipositive tensor, showing the one-way nature of
    nonnegative diagonal scaling.
    """
    d1 = np.diag([0.0, 3.0])
    d2 = np.diag([2.0, 0.0])
    return d1, d2
