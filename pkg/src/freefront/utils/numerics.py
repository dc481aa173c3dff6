import math
from typing import Sequence

import numpy as np
from scipy.linalg import solve_banded


def solve_tridiagonal(
    lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray
) -> np.ndarray:
    """
    Solve a tridiagonal system (Thomas algorithm, via LAPACK's banded solver).

    Parameters
    ----------
    lower : ndarray
        Sub-diagonal as a length n array (0, a_2, ..., a_n); lower[0] is ignored.
    diag : ndarray
        Main diagonal (b_1, ..., b_n).
    upper : ndarray
        Super-diagonal as a length n array (c_1, ..., c_{n-1}, 0); upper[-1] is ignored.
    rhs : ndarray
        Right hand side.

    Returns
    -------
    x : ndarray
        Solution vector.
    """
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def dirichlet_gradient(values: np.ndarray, spacing: float) -> float:
    """One-sided second-order derivative at the last node: (3 f_N - 4 f_{N-1} + f_{N-2}) / (2 dx)."""
    return float((3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * spacing))


def convergence_order(coarse: float, medium: float, fine: float, ratio: float = 2.0) -> float:
    """Observed order from three solutions on successively refined grids."""
    num = abs(coarse - medium)
    den = abs(medium - fine)
    if den == 0.0 or num == 0.0:
        return math.inf
    return math.log(num / den) / math.log(ratio)


def least_squares_slope(x: Sequence[float], y: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)
    return float(slope)


__all__ = [
    "solve_tridiagonal",
    "dirichlet_gradient",
    "convergence_order",
    "least_squares_slope",
]
