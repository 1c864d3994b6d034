import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from interpjc import cli
from interpjc.algebra import InterpolationParams
from interpjc.fock import coherent_state
from interpjc.figures import PANELS, FigureSpec, figure
from interpjc.harness import ConfigError
from interpjc.observables import series

GOLDEN = Path(__file__).parent / "golden"


def load(path):
    return np.genfromtxt(path, delimiter=",", skip_header=1, missing_values="", filling_values=np.nan)


def test_panel_tables():
    assert [p.label for p in PANELS[1]] == list("abcd")
    assert [p.label for p in PANELS[3]] == list("abcdefghi")
    assert [p.label for p in PANELS[4]] == list("abcdef")
    assert [(p.xi, p.delta) for p in PANELS[1]] == [(0, 1), (1, 0), (1, 1), (1, 2)]
    assert {p.nbar for p in PANELS[2] + PANELS[3]} == {3.0}
    assert [(p.nbar, p.delta) for p in PANELS[4]] == [(3, 0), (3, 1), (3, 2), (30, 0), (30, 1), (30, 2)]
    assert all(p.xi == 0.9 for p in PANELS[4])


@pytest.mark.parametrize("fig, panel", [(0, None), (5, None), (1, "e"), (3, "j"), (4, "g")])
def test_invalid_figure_spec(fig, panel):
    with pytest.raises(ConfigError):
        FigureSpec(fig, panel)


def test_figure1_panel_a(tmp_path):
    files = figure(FigureSpec(1, "a"), tmp_path)
    names = sorted(f.name for f in files)
    assert names == ["fig1a_n_e.csv", "fig1a_n_g.csv", "fig1a_n_total.csv", "fig1a_plot.py"]
    n_e, n_t, n_g = (load(tmp_path / f"fig1a_{q}.csv") for q in ("n_e", "n_total", "n_g"))
    t = n_e[:, 0]
    assert t[-1] == 2.0
    window = (t > 0) & (t < 0.65)
    assert np.all(n_e[window, 1] > n_t[window, 1])
    assert np.all(n_t[window, 1] > n_g[window, 1])


def test_figure3_panel_b(tmp_path):
    figure(FigureSpec(3, "b"), tmp_path, steps=201)
    q = load(tmp_path / "fig3b_q_mandel.csv")
    ref = series(coherent_state(3.0), InterpolationParams(0.5, 0.5), 10.0, 201)
    np.testing.assert_array_equal(q[:, 1], ref.q_mandel)


def test_figure4_panel_d(tmp_path):
    figure(FigureSpec(4, "d"), tmp_path, steps=101)
    q = load(tmp_path / "fig4d_q_mandel.csv")
    ref = series(coherent_state(30.0), InterpolationParams(0.9, 0.0), 10.0, 101)
    np.testing.assert_array_equal(q[:, 1], ref.q_mandel)


def test_whole_figure_via_cli(tmp_path):
    assert cli.main(["figure", "3", "--out-dir", str(tmp_path), "--steps", "51"]) == 0
    assert len(list(tmp_path.glob("fig3?_q_mandel.csv"))) == 9
    assert (tmp_path / "fig3_plot.py").exists()


def test_plot_script_renders(tmp_path):
    pytest.importorskip("matplotlib")
    files = figure(FigureSpec(1), tmp_path, steps=201)
    script = [f for f in files if f.suffix == ".py"][0]
    subprocess.run([sys.executable, str(script)], check=True, cwd=tmp_path, capture_output=True)
    assert (tmp_path / "fig1.png").stat().st_size > 0


@pytest.mark.parametrize("name", ["fig2a_q_mandel", "fig4c_q_mandel", "fig1d_n_e"])
def test_golden_curves(tmp_path, name):
    fig, panel = int(name[3]), name[4]
    figure(FigureSpec(fig, panel), tmp_path, steps=201)
    got = load(tmp_path / f"{name}.csv")
    want = load(GOLDEN / f"{name}.csv")
    assert got.shape == want.shape
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-13)
    assert np.array_equal(np.isnan(got), np.isnan(want))
