"""End-to-end checks of the command-line front end.

Everything goes through cli.main(argv) so exit codes and artifacts are
exactly what a shell user would see.
"""

import json
import math
import os

import numpy as np
import pytest

from asvnav import cli
from asvnav.cli import EXIT_DIVERGED, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE
from asvnav.nn import load_checkpoint


TINY_NET = [
    "agent.ego_hidden=12", "agent.object_hidden=12", "agent.trunk_hidden=[16]",
    "agent.quantile_embed_dim=8", "agent.num_quantiles=4",
    "agent.num_target_quantiles=4", "agent.num_action_quantiles=8",
    "agent.batch_size=8", "agent.buffer_capacity=4096",
    "agent.warmup_steps=20", "agent.anneal_steps=200",
]

TINY_TRAIN = TINY_NET + [
    "train.steps_per_stage=[120,120,120,120,120,120]",
    "train.eval_interval=120", "train.eval_episodes=1",
    "train.log_interval=1000", "train.checkpoint_interval=1000000",
]


def run(*argv):
    return cli.main(list(argv))


def test_no_arguments_is_usage_error(capsys):
    assert run() == EXIT_USAGE
    capsys.readouterr()


def test_help_exits_clean(capsys):
    assert run("--help") == EXIT_OK
    out = capsys.readouterr().out
    assert "train" in out and "segment" in out


def test_unknown_agent_rejected(capsys):
    assert run("train", "--agent", "muzero") == EXIT_USAGE
    assert "muzero" in capsys.readouterr().err


def test_out_of_scope_agent_named_explicitly(capsys):
    assert run("train", "--agent", "sac") == EXIT_USAGE
    assert "out of scope" in capsys.readouterr().err


def test_unknown_flag_rejected(capsys):
    assert run("train", "--agent", "dqn", "--bogus") == EXIT_USAGE
    capsys.readouterr()


def test_train_rejects_baseline(capsys):
    assert run("train", "--agent", "apf") == EXIT_USAGE
    assert "nothing to train" in capsys.readouterr().err


def test_bad_override_is_usage_error(capsys):
    assert run("train", "--agent", "dqn", "--set", "agent.no_such=1") \
        == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_non_numeric_override_into_float_field(capsys):
    assert run("train", "--agent", "dqn", "--set", "agent.lr=fast") \
        == EXIT_USAGE
    assert "expects a number" in capsys.readouterr().err


def test_bare_exponent_override_parses_as_float():
    from asvnav.config import Config, apply_overrides
    cfg = Config()
    apply_overrides(cfg, ["agent.lr=1e80"])
    assert cfg.agent.lr == 1e80 and isinstance(cfg.agent.lr, float)


def test_train_smoke(tmp_path, capsys):
    out = tmp_path / "run"
    code = run("train", "--agent", "dqn", "--seed", "3", "--steps", "60",
               "--out", str(out), *sum((["--set", s] for s in TINY_TRAIN), []))
    assert code == EXIT_OK
    assert (out / "final.ckpt").exists()
    assert (out / "metrics.csv").exists()
    assert "trained dqn for 60 steps" in capsys.readouterr().out


def test_train_layering_file_then_set(tmp_path):
    # --set wins over the config file, which wins over defaults (64/64)
    cfg_file = tmp_path / "cfg.yaml"
    cfg_file.write_text("agent:\n  ego_hidden: 16\n  object_hidden: 24\n")
    out = tmp_path / "run"
    overrides = [s for s in TINY_TRAIN if "ego_hidden" not in s
                 and "object_hidden" not in s]
    code = run("train", "--agent", "dqn", "--steps", "30",
               "--config", str(cfg_file), "--out", str(out),
               "--set", "agent.ego_hidden=8",
               *sum((["--set", s] for s in overrides), []))
    assert code == EXIT_OK
    meta, _ = load_checkpoint(str(out / "final.ckpt"))
    assert meta["ego_hidden"] == 8
    assert meta["object_hidden"] == 24


def test_train_divergence_exit_code(tmp_path, capsys):
    out = tmp_path / "run"
    with np.errstate(all="ignore"):
        code = run("train", "--agent", "dqn", "--steps", "40", "--out",
                   str(out), "--set", "agent.lr=1e80", "--set",
                   "agent.warmup_steps=0", "--set", "agent.batch_size=2",
                   *sum((["--set", s] for s in TINY_NET
                         if "batch" not in s and "warmup" not in s), []),
                   "--set", "train.steps_per_stage=[200,200,200,200,200,200]",
                   "--set", "train.eval_interval=1000",
                   "--set", "train.log_interval=1000")
    assert code == EXIT_DIVERGED
    assert (out / "diverged.ckpt").exists()
    assert "diverged" in capsys.readouterr().err


def test_output_root_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ASVNAV_OUTPUT_ROOT", str(tmp_path / "root"))
    code = run("train", "--agent", "dqn", "--seed", "1", "--steps", "30",
               *sum((["--set", s] for s in TINY_TRAIN), []))
    assert code == EXIT_OK
    assert (tmp_path / "root" / "train-dqn-s1" / "final.ckpt").exists()
    capsys.readouterr()


def test_rollout_apf_artifacts(tmp_path, capsys):
    out = tmp_path / "ep"
    code = run("rollout", "--agent", "apf", "--seed", "11", "--stage", "1",
               "--out", str(out))
    assert code == EXIT_OK
    assert (out / "episode.traj").exists()
    assert (out / "episode.svg").read_bytes().startswith(b"<?xml")
    result = json.loads((out / "result.json").read_text())
    assert set(result) == {"success", "collided", "steps", "travel_times",
                           "rewards"}
    scenario = json.loads((out / "scenario.json").read_text())
    assert len(scenario["starts"]) == len(result["travel_times"])
    assert "success=" in capsys.readouterr().out


def test_eval_grid_small(tmp_path, capsys):
    out = tmp_path / "grid"
    code = run("eval", "--agent", "random", "--episodes", "1",
               "--out", str(out),
               "--set", "harness.set_robots=[2]",
               "--set", "harness.set_buoys=[0]")
    assert code == EXIT_OK
    assert (out / "summary.json").exists()
    assert "2 rob 0 obs" in capsys.readouterr().out


def test_eval_checkpoint_kind_mismatch(tmp_path, capsys):
    out = tmp_path / "run"
    assert run("train", "--agent", "dqn", "--steps", "30", "--out", str(out),
               *sum((["--set", s] for s in TINY_TRAIN), [])) == EXIT_OK
    capsys.readouterr()
    code = run("eval", "--agent", "ac-iqn", "--episodes", "1",
               "--checkpoint", str(out / "final.ckpt"),
               "--out", str(tmp_path / "grid"),
               "--set", "harness.set_robots=[2]",
               "--set", "harness.set_buoys=[0]",
               *sum((["--set", s] for s in TINY_NET), []))
    assert code == EXIT_RUNTIME
    assert "dqn" in capsys.readouterr().err


def test_segment_roundtrip(tmp_path, capsys):
    # two separated arcs -> two clusters partitioning the finite beams
    n = 90
    ranges = [None] * n
    for i in range(4):
        ranges[i] = 5.0
    for i in range(40, 46):
        ranges[i] = 9.0
    scan_file = tmp_path / "scan.json"
    scan_file.write_text(json.dumps({"ranges": ranges, "max_range": 20.0}))
    out = tmp_path / "seg"
    assert run("segment", "--scan", str(scan_file), "--out", str(out)) \
        == EXIT_OK
    payload = json.loads((out / "clusters.json").read_text())
    assert payload["num_beams"] == n
    members = sorted(m for c in payload["clusters"] for m in c["members"])
    assert members == [i for i, v in enumerate(ranges) if v is not None]
    assert len(payload["clusters"]) == 2
    for c in payload["clusters"]:
        assert math.isfinite(c["radius"]) and len(c["centroid"]) == 2
    capsys.readouterr()


def test_segment_matches_golden_corpus(tmp_path, capsys):
    # frozen scan/cluster pairs; segmentation output must not drift
    data = os.path.join(os.path.dirname(__file__), "data")
    pairs = sorted(f[:-10] for f in os.listdir(data)
                   if f.endswith("_scan.json"))
    assert pairs, "golden corpus missing"
    for name in pairs:
        scan_file = os.path.join(data, f"{name}_scan.json")
        with open(os.path.join(data, f"{name}_clusters.json")) as fh:
            want = json.load(fh)
        with open(scan_file) as fh:
            theta = json.load(fh)["theta_deg"]
        out = tmp_path / name
        assert run("segment", "--scan", scan_file, "--theta-deg", str(theta),
                   "--out", str(out)) == EXIT_OK
        got = json.loads((out / "clusters.json").read_text())["clusters"]
        assert len(got) == len(want), name
        for g, w in zip(got, want):
            assert g["members"] == w["members"], name
            assert g["centroid"] == pytest.approx(w["centroid"], abs=1e-8)
            assert g["radius"] == pytest.approx(w["radius"], abs=1e-8)
    capsys.readouterr()


def test_segment_to_stdout(tmp_path, capsys):
    scan_file = tmp_path / "scan.json"
    scan_file.write_text(json.dumps({"ranges": [3.0, 3.1, None, None],
                                     "max_range": 10.0}))
    assert run("segment", "--scan", str(scan_file)) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["clusters"]


def test_plot_export_metrics(tmp_path, capsys):
    csv = tmp_path / "metrics.csv"
    csv.write_text("step,reward_mean,reward_stderr,success_rate,"
                   "avg_travel_time\n"
                   "100,1.0,0.1,0.2,50.0\n200,2.0,0.1,0.5,40.0\n")
    out = tmp_path / "plots"
    assert run("plot-export", "--metrics", str(csv), "--out", str(out)) \
        == EXIT_OK
    assert (out / "success_rate.svg").read_bytes().startswith(b"<?xml")
    capsys.readouterr()


def test_plot_export_trajectory(tmp_path, capsys):
    traj = tmp_path / "episode.traj"
    rows = ["# t vid x y yaw u v r T_left T_right"]
    for k in range(6):
        rows.append(f"{0.5 * k:.4f} 0 {1.0 * k:.6f} {0.5 * k:.6f} 0.000000 "
                    "1.000000 0.000000 0.000000 100.000000 100.000000")
    traj.write_text("\n".join(rows) + "\n")
    out = tmp_path / "plots"
    assert run("plot-export", "--traj", str(traj), "--goals", "10,5",
               "--out", str(out)) == EXIT_OK
    assert (out / "trajectories.svg").read_bytes().startswith(b"<?xml")
    capsys.readouterr()


def test_plot_export_requires_one_mode(tmp_path, capsys):
    assert run("plot-export") == EXIT_USAGE
    csv = tmp_path / "m.csv"
    csv.write_text("step,reward_mean,reward_stderr,success_rate,"
                   "avg_travel_time\n100,1,0,0.5,10\n")
    traj = tmp_path / "t.traj"
    traj.write_text("# t vid x y yaw u v r T_left T_right\n"
                    "0.0 0 0 0 0 0 0 0 0 0\n")
    assert run("plot-export", "--metrics", str(csv), "--traj", str(traj)) \
        == EXIT_USAGE
    capsys.readouterr()


def test_module_entry_point():
    import asvnav.cli as mod
    assert callable(mod.main)
    path = os.path.join(os.path.dirname(mod.__file__), "__main__.py")
    assert os.path.exists(path)
