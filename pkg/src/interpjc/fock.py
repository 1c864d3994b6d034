"""Truncated Fock-space states and photon-number moments.

States are stored as complex amplitude vectors c_0..c_N over the number basis,
ordered by photon number. Truncation is never hidden: a coherent state keeps its
raw amplitudes and records the Poisson mass that fell above the cutoff in
``tail_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, pdtrc

#: Largest discarded probability mass accepted when building a state.
MAX_TAIL = 1e-6


class InsufficientCutoffError(ValueError):
    """Raised when the Fock cutoff discards more than ``MAX_TAIL`` of the state."""

    def __init__(self, tail_mass, cutoff):
        self.tail_mass = float(tail_mass)
        self.cutoff = int(cutoff)
        super().__init__(
            f"insufficient cutoff: N={cutoff} discards tail mass {tail_mass:.6g} "
            f"(limit {MAX_TAIL:g})"
        )


class UndefinedMomentError(ValueError):
    """Raised when a moment is requested of a zero-norm state."""


@dataclass(frozen=True)
class FieldState:
    """Pure single-mode field state on the truncated basis |0>..|cutoff>."""

    amplitudes: np.ndarray
    cutoff: int
    tail_bound: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")
        if amps.shape != (self.cutoff + 1,):
            raise ValueError(
                f"expected {self.cutoff + 1} amplitudes for cutoff {self.cutoff}, got {amps.shape}"
            )
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm2(self) -> float:
        return math.fsum(self.probabilities)


def default_cutoff(mean_photon_number: float) -> int:
    """Cutoff heuristic ceil(nbar + 10 sqrt(nbar + 1) + 20).

    Keeps the discarded Poisson tail below 1e-12 up to nbar = 100.
    """
    nbar = float(mean_photon_number)
    return int(math.ceil(nbar + 10.0 * math.sqrt(nbar + 1.0) + 20.0))


def coherent_state(mean_photon_number: float, phase: float = 0.0, cutoff: int | None = None) -> FieldState:
    """Truncated coherent state with alpha = sqrt(nbar) exp(i phase).

    Amplitudes are not renormalized after truncation; the exact Poisson tail
    above ``cutoff`` is reported as ``tail_bound``. Raises
    :class:`InsufficientCutoffError` if that tail exceeds ``MAX_TAIL``.
    """
    nbar = float(mean_photon_number)
    if not math.isfinite(nbar) or nbar < 0:
        raise ValueError(f"mean photon number must be finite and >= 0, got {mean_photon_number}")
    if cutoff is None:
        cutoff = default_cutoff(nbar)
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")

    n = np.arange(cutoff + 1)
    if nbar == 0.0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        tail = 0.0
    else:
        log_mod = -0.5 * nbar + 0.5 * n * math.log(nbar) - 0.5 * gammaln(n + 1)
        amps = np.exp(log_mod) * np.exp(1j * phase * n)
        tail = float(pdtrc(cutoff, nbar))
    if tail > MAX_TAIL:
        raise InsufficientCutoffError(tail, cutoff)
    return FieldState(amps, cutoff, tail, label=f"coherent(nbar={nbar:g})")


def fock_state(n: int, cutoff: int) -> FieldState:
    if n < 0 or n > cutoff:
        raise IndexError(f"Fock index {n} out of range 0..{cutoff}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return FieldState(amps, cutoff, 0.0, label=f"fock({n})")


def weighted_moment(probabilities, k: int) -> float:
    """Normalized k-th raw moment of a (possibly unnormalized) number distribution."""
    p = np.asarray(probabilities, dtype=float)
    total = math.fsum(p)
    if total <= 0.0:
        raise UndefinedMomentError("moment of a zero-norm state is undefined")
    n = np.arange(p.size, dtype=float)
    return math.fsum(p * n**k) / total


def moment(state: FieldState, k: int) -> float:
    """<n^k> for k in 0..5, computed with compensated summation."""
    if not 0 <= k <= 5:
        raise ValueError(f"moment order must lie in 0..5, got {k}")
    return weighted_moment(state.probabilities, k)
