import json

import numpy as np
import pytest

from gfclust import load_dataset
from gfclust.cli import main

from test_datasets import write_tiny3


def base_config(tmp_path, **extra):
    payload = {
        "synthetic": {
            "n_nodes": 24,
            "n_clusters": 3,
            "n_views": 2,
            "p_in": 0.5,
            "p_out": 0.05,
            "n_features": 8,
            "mean_separation": 4.0,
            "noise_scale": 0.8,
            "seed": 1,
        },
        "epochs": 2,
        "hr_refresh_interval": 2,
        "encoder": {"latent_dim": 4, "hidden_dim": 8, "epochs": 5},
        "seed": 0,
    }
    payload.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return path


class TestRun:
    def test_run_on_tiny3_fixture(self, tmp_path, capsys):
        manifest = write_tiny3(tmp_path)
        config = tmp_path / "cfg.json"
        config.write_text(
            json.dumps(
                {
                    "manifest": manifest.name,
                    "epochs": 1,
                    "encoder": {"latent_dim": 2, "hidden_dim": 3, "epochs": 2},
                }
            )
        )
        out = tmp_path / "out"
        code = main(["run", "--config", str(config), "--out", str(out)])
        assert code == 0
        assert (out / "report.json").exists()
        assert (out / "embedding.csv").exists()
        line = capsys.readouterr().out.strip()
        assert line.startswith("NMI=") and "ARI=" in line and "ACC=" in line and "F1=" in line

    def test_negative_gamma_exits_one(self, tmp_path, capsys):
        config = base_config(tmp_path, gamma_rec=-1.0)
        out = tmp_path / "out"
        code = main(["run", "--config", str(config), "--out", str(out)])
        assert code == 1
        assert not out.exists()  # no partial outputs
        assert "error" in capsys.readouterr().err

    def test_same_seed_byte_identical_reports(self, tmp_path, capsys):
        config = base_config(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", str(config), "--seed", "7", "--out", str(out1)]) == 0
        assert main(["run", "--config", str(config), "--seed", "7", "--out", str(out2)]) == 0
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
        assert (out1 / "embedding.csv").read_bytes() == (out2 / "embedding.csv").read_bytes()

    def test_flag_overrides_config_epochs(self, tmp_path, capsys):
        config = base_config(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--epochs", "1", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["epochs"]) == 1

    def test_missing_data_source_exits_one(self, tmp_path, capsys):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"epochs": 1}))
        assert main(["run", "--config", str(config)]) == 1

    def test_both_data_sources_exit_one(self, tmp_path, capsys):
        config = base_config(tmp_path, manifest="whatever.json")
        assert main(["run", "--config", str(config)]) == 1


class TestAblate:
    def test_no_kl_zeroes_kl_entries(self, tmp_path, capsys):
        config = base_config(tmp_path)
        out = tmp_path / "out"
        code = main(
            ["ablate", "--config", str(config), "--variant", "no_kl", "--out", str(out)]
        )
        assert code == 0
        report = json.loads((out / "report_no_kl.json").read_text())
        assert all(rec["l_kl"] == 0.0 for rec in report["epochs"])

    def test_unknown_variant_exits_one(self, tmp_path, capsys):
        config = base_config(tmp_path)
        assert main(["ablate", "--config", str(config), "--variant", "nonsense"]) == 1
        assert "unknown variant" in capsys.readouterr().err

    def test_variants_change_the_outcome(self, tmp_path, capsys):
        config = base_config(tmp_path)
        outs = {}
        for variant in ("raw_adjacency", "low_pass_only"):
            out = tmp_path / variant
            assert (
                main(["ablate", "--config", str(config), "--variant", variant, "--out", str(out)])
                == 0
            )
            outs[variant] = json.loads((out / f"report_{variant}.json").read_text())
        base_out = tmp_path / "base"
        assert main(["run", "--config", str(config), "--out", str(base_out)]) == 0
        base = json.loads((base_out / "report.json").read_text())
        assert outs["raw_adjacency"]["epochs"] != base["epochs"]
        assert outs["low_pass_only"]["epochs"] != base["epochs"]


class TestSpectrumAndSynth:
    def test_synth_then_load_round_trip(self, tmp_path, capsys):
        config = base_config(tmp_path)
        out = tmp_path / "ds"
        assert main(["synth", "--config", str(config), "--out", str(out)]) == 0
        g = load_dataset(out / "manifest.json")
        assert g.n_nodes == 24
        assert g.n_views == 2

    def test_synth_deterministic_bytes(self, tmp_path, capsys):
        config = base_config(tmp_path)
        out1, out2 = tmp_path / "d1", tmp_path / "d2"
        assert main(["synth", "--config", str(config), "--seed", "5", "--out", str(out1)]) == 0
        assert main(["synth", "--config", str(config), "--seed", "5", "--out", str(out2)]) == 0
        for name in ("manifest.json", "features.csv", "labels.csv", "graph_0.txt", "graph_1.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_spectrum_emits_two_csvs_per_view(self, tmp_path, capsys):
        config = base_config(tmp_path)
        out = tmp_path / "spec"
        assert main(["spectrum", "--config", str(config), "--out", str(out)]) == 0
        assert len(list(out.glob("*.csv"))) == 4  # 2 views x 2 kernels
        for view in (0, 1):
            assert (out / f"spectrum_view{view}_adjacency_rw.csv").exists()
            assert (out / f"spectrum_view{view}_joint_aggregation_rw.csv").exists()


class TestArgumentHandling:
    def test_bad_flag_exits_one(self, capsys):
        assert main(["run", "--not-a-flag"]) == 1

    def test_unknown_command_exits_one(self, capsys):
        assert main(["dance"]) == 1

    def test_unreadable_config_exits_one(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1

    def test_invalid_json_config_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        assert main(["run", "--config", str(bad)]) == 1
