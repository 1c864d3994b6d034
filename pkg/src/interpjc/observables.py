"""Photon statistics of the evolved state and detection of the paradox window.

Conditional means are normalized branch expectations,
n_g = <psi_g|n|psi_g> / <psi_g|psi_g> and likewise for the e branch. The total
mean and Mandel Q refer to the reduced field state |psi_g><psi_g| + |psi_e><psi_e|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import InterpolationParams
from .dynamics import JointState, evolve_branches, evolve_exact, small_time_series
from .fock import FieldState, moment

#: Branch weights below this are treated as absent; their conditional mean is undefined.
BRANCH_EPS = 1e-14

RELATION_UPPER = "n_e>n_total"
RELATION_LOWER = "n_total>n_g"


@dataclass(frozen=True)
class PhotonStatsRecord:
    lambda_t: float
    n_total: float
    n_g: float | None
    n_e: float | None
    p_e: float
    q_mandel: float | None
    p_g: float = float("nan")


def _none_if_nan(x):
    x = float(x)
    return None if math.isnan(x) else x


def stats_arrays(g: np.ndarray, e: np.ndarray) -> dict[str, np.ndarray]:
    """Statistics for branch arrays of shape (T, N+1); undefined entries are NaN."""
    g = np.atleast_2d(g)
    e = np.atleast_2d(e)
    n = np.arange(g.shape[1], dtype=float)
    pg_n = np.abs(g) ** 2
    pe_n = np.abs(e) ** 2
    p_g = pg_n.sum(axis=1)
    p_e = pe_n.sum(axis=1)
    sum_g = pg_n @ n
    sum_e = pe_n @ n
    n_total = sum_g + sum_e
    m2 = (pg_n + pe_n) @ (n * n)

    with np.errstate(invalid="ignore", divide="ignore"):
        n_g = np.where(p_g >= BRANCH_EPS, sum_g / p_g, np.nan)
        n_e = np.where(p_e >= BRANCH_EPS, sum_e / p_e, np.nan)
        q = np.where(n_total >= BRANCH_EPS, (m2 - n_total**2) / n_total - 1.0, np.nan)
    return {"n_total": n_total, "n_g": n_g, "n_e": n_e, "p_e": p_e, "p_g": p_g, "q_mandel": q}


def photon_stats(state: JointState) -> PhotonStatsRecord:
    s = stats_arrays(state.g_branch, state.e_branch)
    return PhotonStatsRecord(
        lambda_t=float(state.time),
        n_total=float(s["n_total"][0]),
        n_g=_none_if_nan(s["n_g"][0]),
        n_e=_none_if_nan(s["n_e"][0]),
        p_e=float(s["p_e"][0]),
        q_mandel=_none_if_nan(s["q_mandel"][0]),
        p_g=float(s["p_g"][0]),
    )


@dataclass(frozen=True)
class ObservableSeries:
    """Photon statistics on a uniform lam*t grid; undefined values stored as NaN.

    ``psi0`` and ``params`` are kept when known so that crossings can be refined
    with the exact propagator; series reloaded from CSV carry neither.
    """

    lambda_t: np.ndarray
    n_total: np.ndarray
    n_g: np.ndarray
    n_e: np.ndarray
    p_e: np.ndarray
    q_mandel: np.ndarray
    p_g: np.ndarray | None = None
    psi0: FieldState | None = field(default=None, compare=False)
    params: InterpolationParams | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.lambda_t)

    def __getitem__(self, i) -> PhotonStatsRecord:
        p_g = float(self.p_g[i]) if self.p_g is not None else 1.0 - float(self.p_e[i])
        return PhotonStatsRecord(
            float(self.lambda_t[i]),
            float(self.n_total[i]),
            _none_if_nan(self.n_g[i]),
            _none_if_nan(self.n_e[i]),
            float(self.p_e[i]),
            _none_if_nan(self.q_mandel[i]),
            p_g,
        )

    def records(self) -> list[PhotonStatsRecord]:
        return [self[i] for i in range(len(self))]


def series(psi0: FieldState, params: InterpolationParams, t_max: float, steps: int) -> ObservableSeries:
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if not t_max > 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    t = np.linspace(0.0, float(t_max), int(steps))
    g, e = evolve_branches(psi0, params, t)
    s = stats_arrays(g, e)
    return ObservableSeries(
        t, s["n_total"], s["n_g"], s["n_e"], s["p_e"], s["q_mandel"], s["p_g"], psi0=psi0, params=params
    )


@dataclass(frozen=True)
class ParadoxWindow:
    """Initial interval on which n_e > n_total > n_g.

    ``end_lambda_t`` is None when the chain never holds, or when it still
    holds at the end of the series.
    """

    holds_at_small_t: bool
    end_lambda_t: float | None
    violated_relation: str | None


def _margins(n_total, n_g, n_e):
    upper = n_e - n_total
    lower = n_total - n_g
    return upper, lower


def _fill_n_e(ser: ObservableSeries, n_e_limit: float | None) -> np.ndarray:
    n_e = np.array(ser.n_e, dtype=float)
    undefined = ser.p_e < BRANCH_EPS
    if not undefined.any():
        return n_e
    if n_e_limit is not None:
        n_e[undefined] = n_e_limit
        return n_e
    # no analytic limit available: carry the nearest defined value backwards
    defined = np.flatnonzero(~undefined)
    if defined.size == 0:
        return n_e
    idx = np.searchsorted(defined, np.arange(n_e.size)).clip(max=defined.size - 1)
    n_e[undefined] = n_e[defined[idx]][undefined]
    return n_e


def _min_margin_exact(psi0, params, t, n_e_limit):
    rec = photon_stats(evolve_exact(psi0, params, t))
    n_e = rec.n_e if rec.n_e is not None else n_e_limit
    upper, lower = _margins(rec.n_total, rec.n_g, n_e)
    return min(upper, lower)


def paradox_window(ser: ObservableSeries, tolerance: float = 0.0, resolution: float = 1e-6) -> ParadoxWindow:
    """First time after 0 at which either inequality of the chain fails by ``tolerance``.

    The failing grid interval is refined by bisection to ``resolution`` using the
    exact propagator when the series carries its initial state, otherwise by
    linear interpolation of the margins.
    """
    if len(ser) < 3:
        raise ValueError("paradox window needs a series of at least 3 points")
    if ser.lambda_t[0] != 0.0:
        raise ValueError("series must start at lambda_t = 0")
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")

    n_e_limit = None
    if ser.psi0 is not None and ser.params is not None:
        n_e_limit = small_time_series(ser.psi0, ser.params).n_e_intercept
    n_e = _fill_n_e(ser, n_e_limit)
    upper, lower = _margins(ser.n_total, ser.n_g, n_e)
    worst = np.fmin(upper, lower)
    failing = worst[1:] <= -tolerance
    failing |= np.isnan(worst[1:])

    if not failing.any():
        return ParadoxWindow(True, None, None)
    i = int(np.argmax(failing)) + 1
    relation = RELATION_UPPER if not upper[i] > lower[i] else RELATION_LOWER
    if i == 1:
        return ParadoxWindow(False, None, relation)

    lo, hi = float(ser.lambda_t[i - 1]), float(ser.lambda_t[i])
    if ser.psi0 is not None and ser.params is not None:
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            if _min_margin_exact(ser.psi0, ser.params, mid, n_e_limit) <= -tolerance:
                hi = mid
            else:
                lo = mid
        end = 0.5 * (lo + hi)
    else:
        m0 = worst[i - 1] + tolerance
        m1 = worst[i] + tolerance
        end = lo + (hi - lo) * (m0 / (m0 - m1)) if m0 != m1 else hi
    return ParadoxWindow(True, end, relation)


def small_time_ordering_check(psi0: FieldState, params: InterpolationParams, probe: float = 0.01) -> bool:
    """Whether n_e > n_total > n_g holds just after t = 0.

    Requires the e-branch limit at t -> 0+ to be at least <n> and the strict
    chain of the exact curves at lam*t = ``probe``.
    """
    n_mean = moment(psi0, 1)
    if n_mean <= 0:
        raise ValueError("ordering undefined for the vacuum")
    coeffs = small_time_series(psi0, params)
    if coeffs.n_e_intercept is None:
        raise ValueError("ordering undefined: <A> = 0")
    limit_ok = coeffs.n_e_intercept >= n_mean - 1e-12 * max(1.0, n_mean)
    rec = photon_stats(evolve_exact(psi0, params, probe))
    if rec.n_e is None or rec.n_g is None:
        return False
    return bool(limit_ok and rec.n_e > rec.n_total > rec.n_g)
