"""Resonant evolution of |psi>|g> under H_I = lam (sigma_+ R + sigma_- R^dag).

Each excitation block {|n,g>, |n-1,e>} rotates at frequency lam sqrt(A_n), so

    g_n(t)     = c_n cos(lam t sqrt(A_n))
    e_{n-1}(t) = -i c_n sin(lam t sqrt(A_n))

The e-branch amplitude uses R sin(x sqrt(A))/sqrt(A) |n> = sin(x sqrt(A_n)) |n-1>,
which has no 0/0 at A_0 = 0 since R|0> = 0.

:func:`evolve_oracle` is an independent check that exponentiates the dense
joint-space H_I without using any of this structure.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .algebra import InterpolationParams, a_eigencurve, hamiltonian_matrices
from .expm import expm_with_info
from .fock import FieldState, moment

#: Default ceiling on the oracle's joint-space dimension (dense complex matrices).
ORACLE_MAX_DIM = int(os.environ.get("INTERPJC_ORACLE_MAX_DIM", "2048"))


class OracleResourceError(MemoryError):
    pass


@dataclass(frozen=True)
class JointState:
    """Unnormalized field branches of the atom-field state at dimensionless time lam*t."""

    g_branch: np.ndarray
    e_branch: np.ndarray
    time: float

    def __post_init__(self):
        g = np.array(self.g_branch, dtype=complex)
        e = np.array(self.e_branch, dtype=complex)
        if g.shape != e.shape or g.ndim != 1:
            raise ValueError(f"branch shapes differ: {g.shape} vs {e.shape}")
        g.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "g_branch", g)
        object.__setattr__(self, "e_branch", e)

    @property
    def cutoff(self) -> int:
        return self.g_branch.size - 1

    @property
    def p_g(self) -> float:
        return math.fsum(np.abs(self.g_branch) ** 2)

    @property
    def p_e(self) -> float:
        return math.fsum(np.abs(self.e_branch) ** 2)

    def joint_vector(self) -> np.ndarray:
        """Interleaved amplitudes in the product basis |0,g>, |0,e>, |1,g>, ..."""
        v = np.empty(2 * self.g_branch.size, dtype=complex)
        v[0::2] = self.g_branch
        v[1::2] = self.e_branch
        return v

    @classmethod
    def from_joint_vector(cls, v, time: float) -> "JointState":
        v = np.asarray(v, dtype=complex)
        return cls(v[0::2], v[1::2], time)


def rabi_frequencies(params: InterpolationParams, cutoff: int) -> np.ndarray:
    """sqrt(A_n) for n = 0..cutoff, in units of lam."""
    return np.sqrt(a_eigencurve(params, np.arange(cutoff + 1)))


def evolve_branches(psi0: FieldState, params: InterpolationParams, lambda_t) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized exact propagation; returns (g, e) of shape (len(lambda_t), cutoff + 1)."""
    t = np.atleast_1d(np.asarray(lambda_t, dtype=float))
    c = psi0.amplitudes
    phase = np.outer(t, rabi_frequencies(params, psi0.cutoff))
    g = c * np.cos(phase)
    e = np.zeros_like(g)
    e[:, :-1] = -1j * (c * np.sin(phase))[:, 1:]
    return g, e


def evolve_exact(psi0: FieldState, params: InterpolationParams, lambda_t: float) -> JointState:
    if lambda_t < 0:
        raise ValueError(f"lambda_t must be >= 0, got {lambda_t}")
    g, e = evolve_branches(psi0, params, [lambda_t])
    return JointState(g[0], e[0], float(lambda_t))


def initial_joint_vector(psi0: FieldState, cutoff: int) -> np.ndarray:
    amps = psi0.amplitudes
    if cutoff < psi0.cutoff:
        dropped = math.fsum(np.abs(amps[cutoff + 1:]) ** 2)
        if dropped > 1e-12:
            raise ValueError(f"cutoff {cutoff} discards {dropped:.3g} of the initial state")
        amps = amps[: cutoff + 1]
    field = np.zeros(cutoff + 1, dtype=complex)
    field[: amps.size] = amps
    return np.kron(field, np.array([1.0, 0.0], dtype=complex))


def evolve_oracle(
    psi0: FieldState,
    params: InterpolationParams,
    lambda_t: float,
    cutoff: int | None = None,
    max_dim: int | None = None,
) -> JointState:
    """Brute-force propagation: exp(-i H_I t) as a dense matrix applied to |psi>|g>."""
    if cutoff is None:
        cutoff = psi0.cutoff
    if psi0.tail_bound >= 1e-12:
        raise ValueError(f"oracle requires tail_bound < 1e-12, got {psi0.tail_bound:.3g}")
    limit = ORACLE_MAX_DIM if max_dim is None else max_dim
    dim = 2 * (cutoff + 1)
    if dim > limit:
        raise OracleResourceError(f"oracle joint dimension {dim} exceeds ceiling {limit}")
    _, _, h_i = hamiltonian_matrices(params, 1.0, 1.0, cutoff)
    t = lambda_t / params.lam
    u, _ = expm_with_info(-1j * t * h_i.entries)
    v = u @ initial_joint_vector(psi0, cutoff)
    return JointState.from_joint_vector(v, float(lambda_t))


def fidelity(a: JointState, b: JointState) -> float:
    """|<a|b>|^2 over the joint space."""
    if a.g_branch.shape != b.g_branch.shape:
        raise ValueError(f"dimension mismatch: cutoff {a.cutoff} vs {b.cutoff}")
    overlap = np.vdot(a.joint_vector(), b.joint_vector())
    return float(min(1.0, abs(overlap) ** 2))


@dataclass(frozen=True)
class SmallTimeCoefficients:
    """Quadratic small-time expansion of the three photon means in x = lam*t.

    n_g(x) ~ n_mean + n_g_curvature x^2
    n_e(x) ~ n_e_intercept + n_e_curvature x^2
    n(x)   ~ n_mean + n_total_curvature x^2

    The e-branch coefficients are None when <A> = 0.
    """

    n_mean: float
    n_g_curvature: float
    n_e_intercept: float | None
    n_e_curvature: float | None
    n_total_curvature: float

    def n_g(self, x):
        return self.n_mean + self.n_g_curvature * np.square(x)

    def n_e(self, x):
        if self.n_e_intercept is None:
            raise ValueError("e-branch expansion undefined for <A> = 0")
        return self.n_e_intercept + self.n_e_curvature * np.square(x)

    def n_total(self, x):
        return self.n_mean + self.n_total_curvature * np.square(x)


def small_time_series(psi0: FieldState, params: InterpolationParams) -> SmallTimeCoefficients:
    xi, delta = params.xi, params.delta
    m = [moment(psi0, k) for k in range(6)]
    n1, n2, n3, n4, n5 = m[1:]
    var = n2 - n1 * n1

    a_mean = xi * n2 + delta * n1
    na = xi * n3 + delta * n2
    na2 = xi**2 * n5 + 2 * xi * delta * n4 + delta**2 * n3
    a2 = xi**2 * n4 + 2 * xi * delta * n3 + delta**2 * n2

    g_curv = -(xi * (n3 - n2 * n1) + delta * var)
    total_curv = -(delta * n1 + xi * n2)
    if a_mean > 0:
        e_int = na / a_mean - 1.0
        e_curv = -(na2 * a_mean - na * a2) / (3.0 * a_mean**2)
    else:
        e_int = e_curv = None
    return SmallTimeCoefficients(n1, g_curv, e_int, e_curv, total_curv)
