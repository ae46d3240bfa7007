"""Tests for sweep specifications and ordered parallel evaluation."""
import math

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from src.exceptions import IllConditionedError
from src.sweeps import GridAxis, SweepRunner, SweepSpec, format_sweep_summary, run_sweep


def test_grid_axis_parsing():
    axis = GridAxis.parse("lambda:0.01:3:100:log")
    assert axis.scale == "log" and axis.count == 100
    values = axis.values()
    assert values[0] == pytest.approx(0.01) and values[-1] == pytest.approx(3.0)
    assert np.allclose(np.diff(np.log(values)), np.log(300.0) / 99)
    assert GridAxis.parse("s:3:4:3").values().tolist() == [3.0, 3.5, 4.0]
    assert str(GridAxis.parse("s:3:4:3")) == "s:3.0:4.0:3:lin"


@pytest.mark.parametrize("text", ["lambda:0:1", "lambda:0:1:1", "lambda:2:1:5", "lambda:0:1:5:log", "lambda:0:1:5:cubic"])
def test_grid_axis_rejects_bad_text(text):
    with pytest.raises(ValueError):
        GridAxis.parse(text)


def test_spec_rejects_axes_and_quantities_of_other_commands():
    with pytest.raises(ValidationError):
        SweepSpec(command="measures", grid=["tau:0:1:2"])
    with pytest.raises(ValidationError):
        SweepSpec(command="qrt", quantities=["blp"])
    with pytest.raises(ValidationError):
        SweepSpec(command="photonic", panel="a", grid=["delta_omega0:0:1:2"])
    with pytest.raises(ValidationError):
        SweepSpec(command="qrt", t1=2.0, t2=1.0)
    with pytest.raises(ValidationError):
        SweepSpec(command="measures", grid=["s:3:4:2", "s:3:5:2"])


def test_default_grids():
    assert len(SweepSpec(command="measures").points()) == 600
    assert len(SweepSpec(command="qrt").points()) == 93
    assert [a.name for a in SweepSpec(command="photonic", panel="b").resolved_grid()] == ["delta_omega0", "tau"]


def test_user_axis_replaces_default():
    spec = SweepSpec(command="measures", grid=["s:3:4:2"])
    axes = spec.resolved_grid()
    assert [a.name for a in axes] == ["lambda", "s"]
    assert axes[1].count == 2


def test_points_are_in_grid_order():
    spec = SweepSpec(command="measures", grid=["lambda:1:2:2:lin", "s:3:4:2:lin"])
    assert [(p["lambda"], p["s"]) for p in spec.points()] == [(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]


def test_measures_sweep():
    spec = SweepSpec(command="measures", grid=["lambda:1:2:2:lin", "s:3:4:2:lin"], threads=2)
    frame = run_sweep(spec)
    assert list(frame.columns) == ["lambda", "s", "blp", "rhp", "lower_bound"]
    assert frame.loc[0, "blp"] == pytest.approx(0.043227, abs=1e-6)
    assert frame.loc[1, "rhp"] == pytest.approx(0.5, abs=1e-10)
    assert frame.loc[2, "rhp"] == pytest.approx(0.25, abs=1e-10)


def test_results_do_not_depend_on_thread_count():
    grid = ["lambda:0.5:2:4:lin", "s:3:4:3:lin"]
    single = run_sweep(SweepSpec(command="measures", grid=grid, threads=1))
    pooled = run_sweep(SweepSpec(command="measures", grid=grid, threads=4))
    pd.testing.assert_frame_equal(single, pooled)


def test_qrt_sweep_times_are_in_cutoff_units():
    spec = SweepSpec(
        command="qrt", ohmic={"lambda": 0.5, "s": 3.0, "omega": 2.0}, grid=["lambda:0:0.5:2", "s:3:4:2"]
    )
    frame = run_sweep(spec)
    assert frame.loc[0, "z"] == 0.0
    assert frame.loc[2, "z"] == pytest.approx(0.75854, rel=5e-4)


def test_qrt_sweep_with_oracle_column():
    spec = SweepSpec(command="qrt", grid=["lambda:0.5:1:2", "s:3:4:2"], oracle_check=True)
    frame = run_sweep(spec)
    assert (frame["z"] - frame["z_oracle"]).abs().max() < 1e-6


def test_photonic_panel_a_sweep():
    spec = SweepSpec(command="photonic", panel="a", grid=["delta_delta_omega:0:5:2", "tau:0:10:2"])
    frame = run_sweep(spec)
    assert list(frame.columns[:4]) == ["delta_delta_omega", "tau", "z", "flagged"]
    assert frame.loc[frame["delta_delta_omega"] == 0.0, "z"].abs().max() < 1e-12
    assert frame.iloc[-1]["z"] == pytest.approx(0.98661, abs=1e-4)
    assert not frame["flagged"].any()


def test_photonic_panel_b_blp_column():
    spec = SweepSpec(
        command="photonic", panel="b", grid=["delta_omega0:0:4:3", "tau:0:1:2"], quantities=["z", "blp"]
    )
    frame = run_sweep(spec)
    assert "error" not in frame.columns
    blp = frame.groupby("delta_omega0")["blp"].first()
    assert blp[0.0] == 0.0
    assert blp[4.0] > 0.0
    assert blp[2.0] > 0.0


def test_oracle_sweep():
    frame = run_sweep(SweepSpec(command="oracle", grid=["t:0:5:3"]))
    assert (frame["gamma"] - frame["gamma_oracle"]).abs().max() < 1e-6
    assert (frame["rate"] - frame["rate_oracle"]).abs().max() < 1e-6
    assert (frame["z"] - frame["z_oracle"]).abs().max() < 1e-6


def test_runner_records_failures_when_not_strict():
    def evaluate(point):
        if point["x"] > 1.0:
            raise IllConditionedError("boom", 0.0)
        return {"y": 2 * point["x"]}

    points = [{"x": 0.5}, {"x": 2.0}]
    frame = SweepRunner(threads=2, strict=False).run(points, evaluate)
    assert frame.loc[0, "y"] == 1.0
    assert "boom" in frame.loc[1, "error"]
    assert math.isnan(frame.loc[1, "y"])
    with pytest.raises(IllConditionedError):
        SweepRunner(threads=2).run(points, evaluate)


def test_metadata_and_summary():
    spec = SweepSpec(command="measures", grid=["lambda:1:2:2", "s:3:4:2"])
    meta = spec.metadata()
    assert meta["command"] == "measures"
    assert meta["lambda"] == "1.0" and meta["beta"] == "inf"
    assert "lambda:1.0:2.0:2:lin" in meta["grid"]
    summary = format_sweep_summary(spec, run_sweep(spec))
    assert "4 rows" in summary
