"""Plot export: band math, log parsing, byte-stable SVG output."""

import numpy as np
import pytest

from asvnav.plotting import (
    curve_band,
    load_metrics,
    plot_learning_curves,
    plot_trajectories,
    read_trajectory_log,
)

HEADER = "step,reward_mean,reward_stderr,success_rate,avg_travel_time"


def write_csv(path, rows):
    path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")


def test_load_metrics_columns(tmp_path):
    p = tmp_path / "m.csv"
    write_csv(p, ["100,1.5,0.2,0.3,20.0", "200,2.5,0.1,0.6,18.0"])
    cols = load_metrics(str(p))
    assert list(cols) == HEADER.split(",")
    assert np.array_equal(cols["step"], [100.0, 200.0])
    assert np.array_equal(cols["success_rate"], [0.3, 0.6])


def test_load_metrics_handles_nan(tmp_path):
    p = tmp_path / "m.csv"
    write_csv(p, ["100,1.0,0.0,0.0,nan"])
    cols = load_metrics(str(p))
    assert np.isnan(cols["avg_travel_time"][0])


def test_curve_band_mean_and_stderr(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, ["100,0,0,1.0,1", "200,0,0,3.0,1"])
    write_csv(b, ["100,0,0,3.0,1", "200,0,0,5.0,1"])
    steps, mean, err = curve_band([str(a), str(b)], "success_rate")
    assert np.array_equal(steps, [100.0, 200.0])
    assert np.array_equal(mean, [2.0, 4.0])
    # std ddof=1 of {1,3} is sqrt(2); stderr = sqrt(2)/sqrt(2) = 1
    assert np.allclose(err, [1.0, 1.0])


def test_curve_band_single_run_zero_stderr(tmp_path):
    a = tmp_path / "a.csv"
    write_csv(a, ["100,0,0,0.5,1"])
    _, mean, err = curve_band([str(a)])
    assert mean[0] == 0.5 and err[0] == 0.0


def test_curve_band_rejects_mismatched_grids(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, ["100,0,0,1,1"])
    write_csv(b, ["150,0,0,1,1"])
    with pytest.raises(ValueError, match="grids"):
        curve_band([str(a), str(b)])


def test_curve_band_rejects_empty():
    with pytest.raises(ValueError):
        curve_band([])


def _fake_trajectory(rng, steps=30):
    t = np.arange(steps) * 0.5
    x = np.cumsum(rng.uniform(0.5, 1.5, steps))
    y = np.cumsum(rng.uniform(-0.5, 0.5, steps))
    yaw = rng.uniform(-0.3, 0.3, steps)
    u = rng.uniform(1.0, 3.0, steps)
    v = rng.uniform(-0.2, 0.2, steps)
    r = rng.uniform(-0.1, 0.1, steps)
    thr = rng.uniform(0, 1000, (steps, 2))
    return np.column_stack([t, x, y, yaw, u, v, r, thr])


def test_plot_trajectories_bytes_stable(tmp_path):
    rng = np.random.default_rng(5)
    trajs = [_fake_trajectory(rng), _fake_trajectory(rng)]
    goals = [(25.0, 3.0), (20.0, -4.0)]
    buoys = [(10.0, 2.0, 1.0)]
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    plot_trajectories(trajs, goals, str(p1), buoys=buoys)
    plot_trajectories(trajs, goals, str(p2), buoys=buoys)
    blob = p1.read_bytes()
    assert blob == p2.read_bytes()
    assert blob.startswith(b"<?xml")


def test_plot_learning_curves_bytes_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, ["100,0,0,0.2,9", "200,0,0,0.5,8"])
    write_csv(b, ["100,0,0,0.4,9", "200,0,0,0.7,8"])
    groups = {"one": [str(a), str(b)], "two": [str(a)]}
    p1, p2 = tmp_path / "c1.svg", tmp_path / "c2.svg"
    plot_learning_curves(groups, str(p1))
    plot_learning_curves(groups, str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_plot_writers_reject_empty(tmp_path):
    with pytest.raises(ValueError):
        plot_trajectories([], [], str(tmp_path / "x.svg"))
    with pytest.raises(ValueError):
        plot_learning_curves({}, str(tmp_path / "y.svg"))


def test_read_trajectory_log_roundtrip(tmp_path):
    from asvnav.episode import EpisodeResult
    from asvnav.harness import _write_trajectories

    rng = np.random.default_rng(3)
    trajs = [_fake_trajectory(rng, 5), _fake_trajectory(rng, 5)]
    res = EpisodeResult(terminal=[None, None], rewards=[0.0, 0.0],
                        travel_times=[None, None], steps=4,
                        trajectories=trajs)
    path = tmp_path / "ep.traj"
    _write_trajectories(str(path), res)
    back = read_trajectory_log(str(path))
    assert len(back) == 2
    assert back[0].shape == (5, 9)
    assert np.allclose(back[0][:, 0], trajs[0][:, 0], atol=1e-4)
    assert np.allclose(back[1][:, 1:], trajs[1][:, 1:], atol=1e-6)


def test_read_trajectory_log_rejects_empty(tmp_path):
    p = tmp_path / "empty.traj"
    p.write_text("# t vid x y yaw u v r T_left T_right\n")
    with pytest.raises(ValueError):
        read_trajectory_log(str(p))
