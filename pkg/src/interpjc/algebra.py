"""The (xi, delta)-deformed ladder operators and the interpolating Hamiltonian.

The lowering operator is R = a sqrt(xi n + delta), so on the number basis

    R |n> = sqrt(n) sqrt(xi n + delta) |n - 1>,    A = R^dag R = n (xi n + delta).

Operators are available as diagonal eigenvalue curves (used by the propagator)
and as dense matrices (used by the algebra checks and the brute-force oracle).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

OPERATOR_NAMES = ("a", "a_dagger", "n", "R", "R_dagger", "R0", "A")

PRESET_NAMES = ("JCM", "BSM", "SM", "RLM")


class DeltaRangeWarning(UserWarning):
    """delta above 1, outside the range the model was originally stated for."""


@dataclass(frozen=True)
class InterpolationParams:
    """Deformation parameters (xi, delta) and coupling lam."""

    xi: float
    delta: float
    lam: float = 1.0

    def __post_init__(self):
        for name in ("xi", "delta", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.xi < 0:
            raise ValueError(f"xi must be >= 0, got {self.xi}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.xi == 0 and self.delta == 0:
            raise ValueError("(xi, delta) = (0, 0) gives no coupling")
        if self.lam <= 0:
            raise ValueError(f"coupling lam must be > 0, got {self.lam}")

    def warn_if_outside_stated_range(self):
        if self.delta > 1:
            warnings.warn(
                f"delta={self.delta:g} exceeds the nominal range 0 <= delta <= 1",
                DeltaRangeWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class ModelPreset:
    """Named limit of the interpolating family.

    JCM -> (0, 1), BSM -> (1, 0), SM(k) -> (k, 1), RLM(k) -> (1, 2k).
    """

    name: str
    k: float = 1.0

    def __post_init__(self):
        name = self.name.upper()
        if name not in PRESET_NAMES:
            raise ValueError(f"unknown model preset {self.name!r}; expected one of {PRESET_NAMES}")
        object.__setattr__(self, "name", name)
        if name in ("SM", "RLM") and not self.k > 0:
            raise ValueError(f"{name} requires k > 0, got {self.k}")

    @property
    def xi_delta(self) -> tuple[float, float]:
        return {
            "JCM": (0.0, 1.0),
            "BSM": (1.0, 0.0),
            "SM": (float(self.k), 1.0),
            "RLM": (1.0, 2.0 * self.k),
        }[self.name]

    def params(self, lam: float = 1.0) -> InterpolationParams:
        xi, delta = self.xi_delta
        return InterpolationParams(xi, delta, lam)

    def __str__(self):
        if self.name in ("SM", "RLM"):
            return f"{self.name}(k={self.k:g})"
        return self.name


def preset(name: str, k: float = 1.0, lam: float = 1.0) -> InterpolationParams:
    return ModelPreset(name, k).params(lam)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    label: str
    cutoff: int

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator {self.label!r} is not square: {m.shape}")
        if m.shape[0] not in (self.cutoff + 1, 2 * (self.cutoff + 1)):
            raise ValueError(f"operator {self.label!r} shape {m.shape} inconsistent with cutoff {self.cutoff}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def shape(self):
        return self.entries.shape


def a_eigencurve(params: InterpolationParams, n):
    """Eigenvalue A_n = n (xi n + delta) of R^dag R; accepts scalars or arrays."""
    n = np.asarray(n, dtype=float)
    out = n * (params.xi * n + params.delta)
    return float(out) if out.ndim == 0 else out


def _ladder(cutoff: int, weights) -> np.ndarray:
    # superdiagonal M[n-1, n] = weights[n-1] for n = 1..cutoff
    return np.diag(np.asarray(weights, dtype=complex), k=1)


def build_operator(params: InterpolationParams, which: str, cutoff: int) -> OperatorMatrix:
    if which not in OPERATOR_NAMES:
        raise ValueError(f"unknown operator {which!r}; expected one of {OPERATOR_NAMES}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    n = np.arange(cutoff + 1, dtype=float)
    up = n[1:]
    xi, delta = params.xi, params.delta
    if which == "a":
        m = _ladder(cutoff, np.sqrt(up))
    elif which == "a_dagger":
        m = _ladder(cutoff, np.sqrt(up)).T
    elif which == "n":
        m = np.diag(n.astype(complex))
    elif which == "R":
        m = _ladder(cutoff, np.sqrt(up) * np.sqrt(xi * up + delta))
    elif which == "R_dagger":
        m = _ladder(cutoff, np.sqrt(up) * np.sqrt(xi * up + delta)).conj().T
    elif which == "R0":
        m = np.diag(((delta + xi) / 2 + xi * n).astype(complex))
    else:
        m = np.diag(a_eigencurve(params, n).astype(complex))
    return OperatorMatrix(m, which, cutoff)


def _comm(x, y):
    return x @ y - y @ x


def commutator_residuals(params: InterpolationParams, cutoff: int) -> dict[str, float]:
    """Max-abs residual of each closure relation on the interior block 0..cutoff-1.

    The top Fock level is excluded because any truncated ladder algebra
    violates its commutators there.
    """
    if cutoff < 3:
        raise ValueError(f"cutoff must be >= 3 for the algebra checks, got {cutoff}")
    ops = {w: build_operator(params, w, cutoff).entries for w in ("R", "R_dagger", "R0", "n")}
    R, Rd, R0, n = ops["R"], ops["R_dagger"], ops["R0"], ops["n"]
    xi = params.xi
    relations = {
        "[R,R_dagger]=2R0": _comm(R, Rd) - 2 * R0,
        "[R0,R_dagger]=xi*R_dagger": _comm(R0, Rd) - xi * Rd,
        "[R0,R]=-xi*R": _comm(R0, R) + xi * R,
        "[R,n]=R": _comm(R, n) - R,
        "[R_dagger,n]=-R_dagger": _comm(Rd, n) + Rd,
    }
    return {name: float(np.max(np.abs(d[:-1, :-1]))) for name, d in relations.items()}


# atom basis ordered (g, e)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


def joint_index(n: int, excited: bool) -> int:
    """Position of |n> (x) |g or e> in the joint product basis."""
    return 2 * n + int(excited)


def hamiltonian_matrices(params: InterpolationParams, omega: float, omega0: float, cutoff: int):
    """(H, H_A, H_I) on the joint space, basis {|n,g>, |n,e>} for n = 0..cutoff.

    H   = omega n + omega0 sigma_z / 2 + lam (sigma_+ R + sigma_- R^dag)
    H_A = omega (n + sigma_z / 2)
    H_I = (omega0 - omega) sigma_z / 2 + lam (sigma_+ R + sigma_- R^dag)
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    eye_f = np.eye(cutoff + 1, dtype=complex)
    eye_a = np.eye(2, dtype=complex)
    n = build_operator(params, "n", cutoff).entries
    R = build_operator(params, "R", cutoff).entries
    Rd = build_operator(params, "R_dagger", cutoff).entries
    sz = np.kron(eye_f, SIGMA_Z)
    coupling = params.lam * (np.kron(R, SIGMA_PLUS) + np.kron(Rd, SIGMA_MINUS))
    h_a = omega * (np.kron(n, eye_a) + 0.5 * sz)
    h_i = 0.5 * (omega0 - omega) * sz + coupling
    h = h_a + h_i
    return (
        OperatorMatrix(h, "H", cutoff),
        OperatorMatrix(h_a, "H_A", cutoff),
        OperatorMatrix(h_i, "H_I", cutoff),
    )


def constants_of_motion_residuals(params: InterpolationParams, omega: float, omega0: float, cutoff: int) -> dict[str, float]:
    """Interior max-abs of [H, H_A], [H, H_I], [H_A, H_I]."""
    h, h_a, h_i = (m.entries for m in hamiltonian_matrices(params, omega, omega0, cutoff))
    inner = 2 * cutoff
    pairs = {"[H,H_A]": (h, h_a), "[H,H_I]": (h, h_i), "[H_A,H_I]": (h_a, h_i)}
    return {k: float(np.max(np.abs(_comm(x, y)[:inner, :inner]))) for k, (x, y) in pairs.items()}
