"""Run configuration, single runs, parameter scans and the sidecar metadata."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import InterpolationParams, ModelPreset
from .csvio import SCAN_HEADER, fmt, series_rows, write_columns_csv, write_json, write_series_csv
from .dynamics import evolve_exact, evolve_oracle, fidelity
from .fock import InsufficientCutoffError, coherent_state
from .observables import ObservableSeries, paradox_window, series

OUTPUT_KINDS = ("series", "paradox", "mandel", "oracle-check")

#: Rows above which a scan is refused.
MAX_SCAN_ROWS = 5_000_000

ORACLE_FIDELITY_FLOOR = 1 - 1e-10
ORACLE_PROBES = 8


class ConfigError(ValueError):
    exit_code = 1


class VerificationError(RuntimeError):
    exit_code = 2


def worker_count() -> int:
    env = os.environ.get("INTERPJC_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"INTERPJC_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Ordered map over a thread pool sized by ``worker_count``."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class RunConfig:
    model: ModelPreset | None = None
    xi: float | None = None
    delta: float | None = None
    nbar: float = 3.0
    t_max: float = 2.0
    steps: int = 2001
    cutoff: int | None = None
    outputs: frozenset = frozenset({"series"})
    out_path: Path = Path("series.csv")
    lam: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        explicit = self.xi is not None or self.delta is not None
        if self.model is not None and explicit:
            raise ConfigError("model preset and explicit xi/delta are mutually exclusive")
        if self.model is None and (self.xi is None or self.delta is None):
            raise ConfigError("either a model preset or both xi and delta are required")
        if not self.steps >= 2:
            raise ConfigError(f"steps must be >= 2, got {self.steps}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError(f"t_max must be > 0, got {self.t_max}")
        if not (math.isfinite(self.nbar) and self.nbar >= 0):
            raise ConfigError(f"nbar must be >= 0, got {self.nbar}")
        if self.cutoff is not None and self.cutoff < 1:
            raise ConfigError(f"cutoff must be >= 1, got {self.cutoff}")
        unknown = set(self.outputs) - set(OUTPUT_KINDS)
        if unknown:
            raise ConfigError(f"unknown outputs {sorted(unknown)}; expected subset of {OUTPUT_KINDS}")
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        object.__setattr__(self, "out_path", Path(self.out_path))
        self.params()

    def params(self) -> InterpolationParams:
        try:
            if self.model is not None:
                return self.model.params(self.lam)
            return InterpolationParams(float(self.xi), float(self.delta), self.lam)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def initial_state(self):
        try:
            return coherent_state(self.nbar, self.phase, self.cutoff)
        except InsufficientCutoffError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class RunResult:
    exit_code: int
    files: list[Path] = field(default_factory=list)
    series: ObservableSeries | None = None
    messages: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def metadata_path(out_path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.name + ".meta.json")


def _sibling(out_path: Path, suffix: str) -> Path:
    return out_path.with_name(out_path.stem + suffix)


def run_metadata(config: RunConfig, psi0) -> dict:
    params = config.params()
    return {
        "tool": "interpjc",
        "version": __version__,
        "model": None if config.model is None else config.model.name,
        "k": None if config.model is None else config.model.k,
        "xi": params.xi,
        "delta": params.delta,
        "lambda": params.lam,
        "nbar": config.nbar,
        "phase": config.phase,
        "cutoff": psi0.cutoff,
        "cutoff_requested": config.cutoff,
        "tail_bound": psi0.tail_bound,
        "t_max": config.t_max,
        "steps": config.steps,
        "outputs": sorted(config.outputs),
    }


def config_from_metadata(meta: dict, out_path=None) -> RunConfig:
    """Rebuild the RunConfig recorded in a sidecar."""
    model = ModelPreset(meta["model"], meta["k"]) if meta.get("model") else None
    return RunConfig(
        model=model,
        xi=None if model else meta["xi"],
        delta=None if model else meta["delta"],
        nbar=meta["nbar"],
        t_max=meta["t_max"],
        steps=meta["steps"],
        cutoff=meta.get("cutoff_requested"),
        outputs=frozenset(meta["outputs"]),
        out_path=Path(out_path) if out_path is not None else Path("series.csv"),
        lam=meta["lambda"],
        phase=meta["phase"],
    )


def spot_check(ser: ObservableSeries, n0: float, fraction: float = 0.01) -> list[str]:
    """Check record invariants on an evenly spaced ~``fraction`` of the rows."""
    stride = max(1, int(round(1 / fraction)))
    idx = np.unique(np.r_[np.arange(0, len(ser), stride), len(ser) - 1])
    problems = []
    for i in idx:
        r = ser[int(i)]
        if abs(r.p_g + r.p_e - 1) >= 1e-10:
            problems.append(f"row {i}: |p_g + p_e - 1| = {abs(r.p_g + r.p_e - 1):.3g}")
        if abs(r.n_total + r.p_e - n0) >= 1e-9:
            problems.append(f"row {i}: excitation drift {abs(r.n_total + r.p_e - n0):.3g}")
        if r.n_g is not None and r.n_e is not None:
            gap = abs(r.p_g * r.n_g + r.p_e * r.n_e - r.n_total)
            if gap >= 1e-9:
                problems.append(f"row {i}: total expectation gap {gap:.3g}")
        if r.q_mandel is not None and r.q_mandel < -1 - 1e-12:
            problems.append(f"row {i}: Q = {r.q_mandel} < -1")
    return problems


def oracle_check(psi0, params, t_max: float, probes: int = ORACLE_PROBES):
    """(lambda_t, fidelity, max |amplitude difference|) at evenly spaced probe times."""
    times = np.linspace(0.0, t_max, probes + 1)[1:]

    def probe(t):
        a = evolve_exact(psi0, params, float(t))
        b = evolve_oracle(psi0, params, float(t))
        return float(t), fidelity(a, b), float(np.max(np.abs(a.joint_vector() - b.joint_vector())))

    return parallel_map(probe, times)


def run(config: RunConfig) -> RunResult:
    params = config.params()
    if params.delta > 1:
        params.warn_if_outside_stated_range()
    psi0 = config.initial_state()
    lam = params.lam
    ser = series(psi0, params, config.t_max * lam, config.steps)
    result = RunResult(0, series=ser)

    n0 = ser.n_total[0]
    problems = spot_check(ser, n0)
    if problems:
        result.exit_code = VerificationError.exit_code
        result.failures.extend(problems)

    out = config.out_path
    # series reports lam * t; the grid above is already in those units
    if "series" in config.outputs:
        result.files.append(write_series_csv(out, ser))
    if "mandel" in config.outputs:
        result.files.append(write_columns_csv(_sibling(out, ".mandel.csv"), ("lambda_t", "q_mandel"), (ser.lambda_t, ser.q_mandel)))
    if "paradox" in config.outputs:
        if config.nbar > 0:
            w = paradox_window(ser)
            payload = {"holds_at_small_t": w.holds_at_small_t, "end_lambda_t": w.end_lambda_t, "violated_relation": w.violated_relation}
        else:
            payload = {"holds_at_small_t": False, "end_lambda_t": None, "violated_relation": None}
        result.files.append(write_json(_sibling(out, ".paradox.json"), payload))
        result.messages.append(f"paradox end_lambda_t={fmt(payload['end_lambda_t'])} relation={payload['violated_relation']}")
    if "oracle-check" in config.outputs:
        rows = oracle_check(psi0, params, config.t_max * lam)
        result.files.append(write_columns_csv(_sibling(out, ".oracle.csv"), ("lambda_t", "fidelity", "max_abs_diff"), list(zip(*rows))))
        worst = min(r[1] for r in rows)
        result.messages.append(f"oracle min_fidelity={fmt(worst)}")
        if worst < ORACLE_FIDELITY_FLOOR:
            result.exit_code = VerificationError.exit_code
            result.failures.append(f"oracle fidelity {worst!r} below {ORACLE_FIDELITY_FLOOR!r}")

    result.files.append(write_json(metadata_path(out), run_metadata(config, psi0)))
    return result


def parse_values(text: str) -> list[float]:
    """Parse '0,0.5,1' or the linspace form 'start:stop:num'."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            values = list(np.linspace(float(start), float(stop), int(num)))
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse value list {text!r}") from None
    if not values:
        raise ConfigError(f"empty value list {text!r}")
    return values


def _check_monotone(name, values):
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name} values must be strictly increasing: {values}")


@dataclass(frozen=True)
class ScanConfig:
    xi_values: tuple
    delta_values: tuple
    nbar: float = 3.0
    t_max: float = 10.0
    steps: int = 1001
    cutoff: int | None = None
    paired: bool = False
    lam: float = 1.0

    def points(self) -> list[tuple[float, float]]:
        if self.paired:
            if len(self.xi_values) != len(self.delta_values):
                raise ConfigError("paired scan needs equally long xi and delta lists")
            _check_monotone("xi", self.xi_values)
            return list(zip(self.xi_values, self.delta_values))
        _check_monotone("xi", self.xi_values)
        _check_monotone("delta", self.delta_values)
        return [(x, d) for x in self.xi_values for d in self.delta_values]


def scan(config: ScanConfig, out_path) -> RunResult:
    if not config.xi_values or not config.delta_values:
        raise ConfigError("scan ranges must be nonempty")
    if config.steps < 2 or not config.t_max > 0:
        raise ConfigError("scan needs steps >= 2 and t_max > 0")
    points = config.points()
    kept = []
    for xi, delta in points:
        if xi < 0 or delta < 0:
            raise ConfigError(f"negative parameter in scan point ({xi}, {delta})")
        if xi == 0 and delta == 0:
            warnings.warn("skipping degenerate scan point (xi, delta) = (0, 0)", stacklevel=2)
            continue
        kept.append((xi, delta))
    rows = len(kept) * config.steps
    if rows > MAX_SCAN_ROWS:
        factor = math.ceil(rows / MAX_SCAN_ROWS)
        raise ConfigError(
            f"scan of {rows} rows exceeds ceiling {MAX_SCAN_ROWS}; reduce steps to {config.steps // factor} "
            f"or the grid by a factor {factor}"
        )
    try:
        psi0 = coherent_state(config.nbar, 0.0, config.cutoff)
    except InsufficientCutoffError as exc:
        raise ConfigError(str(exc)) from None

    def one(point):
        xi, delta = point
        return series(psi0, InterpolationParams(xi, delta, config.lam), config.t_max * config.lam, config.steps)

    results = parallel_map(one, kept)
    result = RunResult(0)
    out_path = Path(out_path)
    with out_path.open("w", newline="") as fh:
        fh.write(SCAN_HEADER + "\n")
        for (xi, delta), ser in zip(kept, results):
            problems = spot_check(ser, ser.n_total[0])
            if problems:
                result.exit_code = VerificationError.exit_code
                result.failures.extend(f"(xi={xi:g}, delta={delta:g}) {p}" for p in problems)
            prefix = fmt(xi) + "," + fmt(delta) + ","
            for row in series_rows(ser):
                fh.write(prefix + ",".join(row) + "\n")
    result.files.append(out_path)
    meta = {
        "tool": "interpjc",
        "version": __version__,
        "points": [[xi, delta] for xi, delta in kept],
        "lambda": config.lam,
        "nbar": config.nbar,
        "cutoff": psi0.cutoff,
        "tail_bound": psi0.tail_bound,
        "t_max": config.t_max,
        "steps": config.steps,
    }
    result.files.append(write_json(metadata_path(out_path), meta))
    return result


def with_out_path(config: RunConfig, out_path) -> RunConfig:
    return replace(config, out_path=Path(out_path))
