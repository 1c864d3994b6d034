"""Panel definitions for the four reference figures and emission of their data.

Each panel writes one CSV per curve (``lambda_t,<quantity>``). A standalone
matplotlib script is written next to them; running it renders the figure, the
harness itself never draws anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .algebra import InterpolationParams, ModelPreset
from .csvio import write_columns_csv
from .fock import coherent_state
from .harness import ConfigError, parallel_map
from .observables import series


@dataclass(frozen=True)
class Panel:
    label: str
    xi: float
    delta: float
    nbar: float
    title: str


def _preset_panels(nbar):
    out = []
    for letter, p in zip("abcd", (ModelPreset("JCM"), ModelPreset("BSM"), ModelPreset("SM", 1.0), ModelPreset("RLM", 1.0))):
        xi, delta = p.xi_delta
        out.append(Panel(letter, xi, delta, nbar, str(p)))
    return out


_FIG3 = [(0.10, 0.90), (0.50, 0.50), (0.90, 0.10), (0.25, 1.0), (0.50, 1.0), (0.75, 1.0), (0.25, 2.0), (0.50, 2.0), (0.75, 2.0)]

PANELS: dict[int, list[Panel]] = {
    1: _preset_panels(3.0),
    2: _preset_panels(3.0),
    3: [Panel(letter, xi, d, 3.0, f"xi={xi:.2f}, delta={d:.2f}") for letter, (xi, d) in zip("abcdefghi", _FIG3)],
    4: [
        Panel(letter, 0.90, d, nbar, f"<n>={nbar:g}, xi=0.90, delta={d:g}")
        for letter, (nbar, d) in zip("abcdef", [(3.0, 0.0), (3.0, 1.0), (3.0, 2.0), (30.0, 0.0), (30.0, 1.0), (30.0, 2.0)])
    ],
}

#: quantity -> matplotlib line style; figure 1 uses solid/dashed/dotted for n_e/n/n_g
CURVES = {
    1: {"n_e": "-", "n_total": "--", "n_g": ":"},
    2: {"q_mandel": "-"},
    3: {"q_mandel": "-"},
    4: {"q_mandel": "-"},
}

DEFAULT_T_MAX = {1: 2.0, 2: 10.0, 3: 10.0, 4: 10.0}
GRID = {1: (2, 2), 2: (2, 2), 3: (3, 3), 4: (2, 3)}
Y_LABELS = {"n_e": r"$\langle n\rangle_e$", "n_total": r"$\langle n\rangle$", "n_g": r"$\langle n\rangle_g$", "q_mandel": r"$Q$"}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    panel: str | None = None

    def __post_init__(self):
        if self.figure_id not in PANELS:
            raise ConfigError(f"unknown figure {self.figure_id}; expected one of {sorted(PANELS)}")
        if self.panel is not None and self.panel not in {p.label for p in PANELS[self.figure_id]}:
            valid = "".join(p.label for p in PANELS[self.figure_id])
            raise ConfigError(f"figure {self.figure_id} has no panel {self.panel!r}; valid panels: {valid}")

    def panels(self) -> list[Panel]:
        return [p for p in PANELS[self.figure_id] if self.panel is None or p.label == self.panel]


def curve_path(out_dir: Path, fig: int, panel: str, quantity: str) -> Path:
    return out_dir / f"fig{fig}{panel}_{quantity}.csv"


def figure(spec: FigureSpec, out_dir, t_max: float | None = None, steps: int = 2001) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t_max = DEFAULT_T_MAX[spec.figure_id] if t_max is None else t_max
    panels = spec.panels()

    def compute(panel):
        return series(coherent_state(panel.nbar), InterpolationParams(panel.xi, panel.delta), t_max, steps)

    results = parallel_map(compute, panels)
    files = []
    for panel, ser in zip(panels, results):
        for quantity in CURVES[spec.figure_id]:
            path = curve_path(out_dir, spec.figure_id, panel.label, quantity)
            files.append(write_columns_csv(path, ("lambda_t", quantity), (ser.lambda_t, getattr(ser, quantity))))
    files.append(write_plot_script(spec, panels, out_dir))
    return files


def write_plot_script(spec: FigureSpec, panels, out_dir: Path) -> Path:
    fig = spec.figure_id
    suffix = spec.panel or ""
    rows, cols = (1, 1) if len(panels) == 1 else GRID[fig]
    panel_list = ",\n".join(f"    ({p.label!r}, {p.title!r})" for p in panels)
    curves = ",\n".join(f"    ({q!r}, {style!r}, {Y_LABELS[q]!r})" for q, style in CURVES[fig].items())
    text = f'''"""Render figure {fig}{suffix} from the CSV files next to this script (requires matplotlib)."""
import csv
import math
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
PANELS = [
{panel_list},
]
CURVES = [
{curves},
]


def load(path):
    xs, ys = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for t, v in reader:
            xs.append(float(t))
            ys.append(float(v) if v else math.nan)
    return xs, ys


fig, axes = plt.subplots({rows}, {cols}, figsize=({3.2 * cols:.1f}, {2.6 * rows:.1f}), squeeze=False)
flat = axes.ravel()
for ax, (label, title) in zip(flat, PANELS):
    for quantity, style, ylabel in CURVES:
        xs, ys = load(HERE / f"fig{fig}{{label}}_{{quantity}}.csv")
        ax.plot(xs, ys, style, color="k", lw=1.0, label=ylabel)
    ax.set_title(f"({{label}}) {{title}}", fontsize=9)
    ax.set_xlabel(r"$\\lambda t$")
    if len(CURVES) == 1:
        ax.set_ylabel(CURVES[0][2])
    else:
        ax.legend(fontsize=7)
for ax in flat[len(PANELS):]:
    ax.set_visible(False)
fig.tight_layout()
fig.savefig(HERE / "fig{fig}{suffix}.png", dpi=150)
'''
    path = out_dir / f"fig{fig}{suffix}_plot.py"
    path.write_text(text)
    return path
