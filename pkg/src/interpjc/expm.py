"""Dense matrix exponential by Taylor scaling and squaring.

Used only by the brute-force propagator, which must not rely on the block
structure of the interaction. The scaled Taylor polynomial is truncated at the
smallest degree whose remainder is provably below ``tol``:

    || sum_{k>m} X^k / k! || <= x^(m+1) / (m+1)! * 1 / (1 - x / (m+2)),   x = ||X||_1 < m+2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_ROUNDOFF = 2.0**-53


@dataclass(frozen=True)
class ExpmInfo:
    scaling: int
    degree: int
    scaled_norm: float
    remainder_bound: float


def one_norm(a: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0


def taylor_remainder_bound(x: float, degree: int) -> float:
    """Upper bound on the 1-norm of the Taylor tail beyond ``degree`` for ||X||_1 = x."""
    if x == 0.0:
        return 0.0
    ratio = x / (degree + 2)
    if ratio >= 1.0:
        return math.inf
    log_term = (degree + 1) * math.log(x) - math.lgamma(degree + 2)
    return math.exp(log_term) / (1.0 - ratio)


def expm_with_info(m: np.ndarray, tol: float = UNIT_ROUNDOFF, theta: float = 0.5, max_degree: int = 40):
    """Return (exp(m), ExpmInfo).

    ``m`` is scaled by 2^-s so that its 1-norm is at most ``theta``, the Taylor
    polynomial is summed by nested Horner steps in a fixed order, and the
    result is squared s times.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    m = m.astype(complex)
    norm = one_norm(m)
    s = 0 if norm <= theta else int(math.ceil(math.log2(norm / theta)))
    x = m / 2.0**s
    xn = norm / 2.0**s

    degree = 1
    while taylor_remainder_bound(xn, degree) > tol:
        degree += 1
        if degree > max_degree:
            raise ArithmeticError(f"Taylor degree exceeded {max_degree} at scaled norm {xn:g}")

    eye = np.eye(m.shape[0], dtype=complex)
    result = eye.copy()
    for k in range(degree, 0, -1):
        result = eye + (x @ result) / k
    for _ in range(s):
        result = result @ result

    info = ExpmInfo(s, degree, xn, taylor_remainder_bound(xn, degree))
    return result, info


def expm(m: np.ndarray, tol: float = UNIT_ROUNDOFF) -> np.ndarray:
    return expm_with_info(m, tol)[0]
