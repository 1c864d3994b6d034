"""Invariant suite behind ``interpjc verify``.

Each check returns (name, passed, detail). The quoted paradox end-times are
reported in a separate reference table that does not affect the exit status.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import InterpolationParams, ModelPreset, commutator_residuals, constants_of_motion_residuals
from .dynamics import evolve_branches, evolve_exact, evolve_oracle, fidelity, small_time_series
from .fock import coherent_state, fock_state
from .observables import paradox_window, photon_stats, series, small_time_ordering_check, stats_arrays

PRESETS = [ModelPreset("JCM"), ModelPreset("BSM"), ModelPreset("SM", 1.0), ModelPreset("RLM", 1.0)]

#: quoted end of the paradox window at <n> = 3
QUOTED_END_TIMES = {"JCM": 0.70, "BSM": 0.30, "SM": 0.27, "RLM": 0.25}
END_TIME_TOL = 0.05


def _random_params(rng, count):
    return [InterpolationParams(float(x), float(d)) for x, d in zip(rng.uniform(0, 1, count), rng.uniform(0, 2, count))]


def check_coherent_states():
    worst = 0.0
    for nbar in (0.5, 3.0, 10.0, 30.0, 100.0):
        s = coherent_state(nbar)
        worst = max(worst, abs(s.norm2() + s.tail_bound - 1))
    return "coherent normalization + tail", worst < 1e-12, f"max |sum + tail - 1| = {worst:.2e}"


def check_algebra(rng):
    params = [p.params() for p in PRESETS] + _random_params(rng, 10)
    worst = max(max(commutator_residuals(p, 20).values()) for p in params)
    return "algebra closure (interior, N=20)", worst < 1e-12, f"max residual = {worst:.2e}"


def check_constants_of_motion(rng):
    params = [p.params() for p in PRESETS] + _random_params(rng, 10)
    worst = max(max(constants_of_motion_residuals(p, 1.0, 1.0, 20).values()) for p in params)
    return "constants of motion", worst < 1e-10, f"max residual = {worst:.2e}"


def check_oracle(rng):
    params = [p.params() for p in PRESETS[:3]] + _random_params(rng, 2)
    states = [coherent_state(3.0, cutoff=40), coherent_state(1.0, 0.7, cutoff=40), fock_state(5, 40)]
    times = np.linspace(0.25, 2.0, 8)
    worst = 1.0
    for p in params:
        for psi in states:
            for t in times:
                worst = min(worst, fidelity(evolve_exact(psi, p, t), evolve_oracle(psi, p, t)))
    return "oracle equivalence (5x8x3)", worst >= 1 - 1e-10, f"min fidelity = 1 - {1 - worst:.2e}"


def check_unitarity_and_conservation(rng):
    t = np.linspace(0, 10, 1000)
    unit = cons = 0.0
    psi = coherent_state(3.0, cutoff=40)
    for p in [q.params() for q in PRESETS] + _random_params(rng, 4):
        g, e = evolve_branches(psi, p, t)
        s = stats_arrays(g, e)
        unit = max(unit, np.max(np.abs(s["p_g"] + s["p_e"] - 1)))
        cons = max(cons, np.max(np.abs(s["n_total"] + s["p_e"] - s["n_total"][0])))
    ok = unit < 1e-10 and cons < 1e-9
    return "unitarity + excitation conservation", bool(ok), f"norm drift {unit:.2e}, excitation drift {cons:.2e}"


def check_bsm_periodicity():
    psi = coherent_state(3.0, cutoff=40)
    p = ModelPreset("BSM").params()
    worst = 0.0
    for t in np.linspace(0, 3, 31):
        a, b = photon_stats(evolve_exact(psi, p, t)), photon_stats(evolve_exact(psi, p, t + math.pi))
        for f in ("n_total", "p_e", "q_mandel", "n_g", "n_e"):
            x, y = getattr(a, f), getattr(b, f)
            if x is None or y is None:
                # undefined conditional only where its branch weight vanishes
                continue
            worst = max(worst, abs(x - y))
    return "BSM pi-periodicity", worst < 1e-9, f"max deviation = {worst:.2e}"


def check_small_time_scaling():
    psi = coherent_state(3.0, cutoff=40)
    worst = math.inf
    for preset in PRESETS:
        p = preset.params()
        c = small_time_series(psi, p)
        for name, approx in (("n_g", c.n_g), ("n_e", c.n_e), ("n_total", c.n_total)):
            r = [abs(getattr(photon_stats(evolve_exact(psi, p, t)), name) - approx(t)) for t in (0.04, 0.02)]
            worst = min(worst, r[0] / r[1])
    return "small-time residual ~ (lam t)^4", worst >= 12, f"min halving ratio = {worst:.2f}"


def check_ordering(rng):
    params = _random_params(rng, 20)
    fails = sum(
        not small_time_ordering_check(coherent_state(nbar), p) for nbar in (1.0, 3.0, 10.0, 30.0) for p in params
    )
    return "small-time chain n_e > n > n_g", fails == 0, f"{fails} of 80 cases fail"


def check_mandel_baseline():
    worst = max(abs(photon_stats(evolve_exact(coherent_state(nbar), InterpolationParams(0.5, 0.5), 0.0)).q_mandel) for nbar in (0.5, 3.0, 30.0))
    return "Q(0) = 0 for coherent input", worst < 1e-10, f"max |Q(0)| = {worst:.2e}"


def run_checks(seed: int = 12345):
    rng = np.random.default_rng(seed)
    return [
        check_coherent_states(),
        check_algebra(rng),
        check_constants_of_motion(rng),
        check_oracle(rng),
        check_unitarity_and_conservation(rng),
        check_bsm_periodicity(),
        check_small_time_scaling(),
        check_ordering(rng),
        check_mandel_baseline(),
    ]


def reference_end_times(nbar: float = 3.0):
    """(model, computed end, quoted end, within tolerance) at the given <n>."""
    psi = coherent_state(nbar, cutoff=max(40, coherent_state(nbar).cutoff))
    rows = []
    for preset in PRESETS:
        w = paradox_window(series(psi, preset.params(), 2.0, 2001))
        quoted = QUOTED_END_TIMES[preset.name]
        ok = w.end_lambda_t is not None and abs(w.end_lambda_t - quoted) <= END_TIME_TOL
        rows.append((str(preset), w.end_lambda_t, quoted, ok))
    return rows


def format_table(rows) -> str:
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}" for name, ok, detail in rows)
