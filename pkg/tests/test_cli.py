"""End-to-end command-line runs against the checked-in network files."""

import json
import xml.etree.ElementTree as ET

import pytest

from tilepack.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def net(fixtures_dir, name):
    return str(fixtures_dir / name)


class TestPack:
    def test_exact_worked_instance(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "pack",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--tile", "512x512", "--exact", "-o", str(tmp_path))
        assert rc == 0
        assert "2 bins of 512x512 (dense" in out
        assert "exact: optimal, lower bound 2, 0 nodes" in out
        payload = json.loads((tmp_path / "thirteen-items-dense-pack.json").read_text())
        assert payload["bins"] == 2
        assert payload["exact"] == {"optimal": True, "lower_bound": 2, "nodes": 0}
        # wall-clock stays on the console, never in the report
        assert "runtime" not in (tmp_path / "thirteen-items-dense-pack.json").read_text()

    def test_pipeline_mode(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "pack",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--tile", "512x512", "--mode", "pipeline",
                         "-o", str(tmp_path))
        assert rc == 0
        assert "4 bins of 512x512 (pipeline" in out
        assert (tmp_path / "thirteen-items-pipeline-placements.csv").exists()
        assert (tmp_path / "thirteen-items-pipeline-pack.json").exists()

    def test_next_fit_policy(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "pack",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--tile", "512x512", "--mode", "pipeline",
                         "--policy", "next-fit", "-o", str(tmp_path))
        assert rc == 0
        assert "5 bins" in out

    def test_render_svg(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "pack",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--tile", "512x512", "--render", "svg",
                         "-o", str(tmp_path))
        assert rc == 0
        path = tmp_path / "thirteen-items-dense-layout.svg"
        assert str(path) in out
        root = ET.fromstring(path.read_text())
        assert root.tag.endswith("svg")

    def test_render_ascii(self, capsys, tmp_path, fixtures_dir):
        rc, _, _ = run(capsys, "pack",
                       "--network", net(fixtures_dir, "thirteen-items.toml"),
                       "--tile", "512x512", "--render", "ascii",
                       "-o", str(tmp_path))
        assert rc == 0
        text = (tmp_path / "thirteen-items-dense-layout.txt").read_text()
        assert text.startswith("bin 0 (512x512")


class TestFragments:
    def test_reference_counts(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "fragments",
                         "--network", net(fixtures_dir, "resnet9-cifar10.toml"),
                         "--tile", "256x256", "-o", str(tmp_path))
        assert rc == 0
        assert "111 fragments on 256x256" in out
        assert "fully_mapped=94" in out
        csv_lines = (tmp_path / "resnet9-cifar10-fragments.csv").read_text().splitlines()
        assert len(csv_lines) == 112
        payload = json.loads((tmp_path / "resnet9-cifar10-fragments.json").read_text())
        assert payload["fragments"] == 111
        assert payload["counts"]["fully_mapped"] == 94

    def test_csv_only(self, capsys, tmp_path, fixtures_dir):
        rc, _, _ = run(capsys, "fragments",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--tile", "256x256", "--csv", "-o", str(tmp_path))
        assert rc == 0
        assert (tmp_path / "lenet-fragments.csv").exists()
        assert not (tmp_path / "lenet-fragments.json").exists()

    def test_json_only(self, capsys, tmp_path, fixtures_dir):
        rc, _, _ = run(capsys, "fragments",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--tile", "256x256", "--json", "-o", str(tmp_path))
        assert rc == 0
        assert not (tmp_path / "lenet-fragments.csv").exists()
        assert (tmp_path / "lenet-fragments.json").exists()


class TestSweep:
    def test_small_grid(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "sweep",
                         "--network", net(fixtures_dir, "lenet.toml"),
                         "--row-dims", "128,256", "--aspects", "1,2",
                         "-o", str(tmp_path))
        assert rc == 0
        assert "optimum" in out and "aspect 1:" in out and "aspect 2:" in out
        csv_lines = (tmp_path / "lenet-dense-sweep.csv").read_text().splitlines()
        assert len(csv_lines) == 5
        payload = json.loads((tmp_path / "lenet-dense-sweep.json").read_text())
        assert len(payload["points"]) == 4

    def test_square_only(self, capsys, tmp_path, fixtures_dir):
        rc, _, _ = run(capsys, "sweep",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--row-dims", "128,256", "--aspects", "1,2,4",
                       "--square-only", "-o", str(tmp_path))
        assert rc == 0
        csv_lines = (tmp_path / "lenet-dense-sweep.csv").read_text().splitlines()
        assert len(csv_lines) == 3  # header + one square point per row dim

    def test_byte_identical_reruns(self, capsys, tmp_path, fixtures_dir):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            rc, _, _ = run(capsys, "sweep",
                           "--network", net(fixtures_dir, "resnet9-cifar10.toml"),
                           "--row-dims", "128,256,512", "--aspects", "1,2",
                           "-o", str(out))
            assert rc == 0
        for name in ("resnet9-cifar10-dense-sweep.csv",
                     "resnet9-cifar10-dense-sweep.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_exact_packer_flag(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "sweep",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--row-dims", "512", "--aspects", "1",
                         "--packer", "exact", "-o", str(tmp_path))
        assert rc == 0
        assert "(dense, exact)" in out


class TestLatency:
    def test_replicated_stack(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "latency",
                         "--network", net(fixtures_dir, "bert-encoder-layer.toml"),
                         "-o", str(tmp_path))
        assert rc == 0
        assert "sequential 6, pipelined 1" in out
        payload = json.loads((tmp_path / "bert-encoder-layer-latency.json").read_text())
        assert payload["sequential"] == 6
        assert payload["layers"][0]["replication"] == 64

    def test_timing_flags(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "latency",
                         "--network", net(fixtures_dir, "bert-encoder-layer.toml"),
                         "--t-dig", "2", "--t-com", "3", "-o", str(tmp_path))
        assert rc == 0
        assert "sequential 11, pipelined 3" in out


class TestCompare:
    def test_reference_network(self, capsys, tmp_path, fixtures_dir):
        rc, out, _ = run(capsys, "compare",
                         "--network", net(fixtures_dir, "resnet18.toml"),
                         "--tile", "256x256", "-o", str(tmp_path))
        assert rc == 0
        assert "one-to-one 201 tiles vs packed 179 (22 saved" in out
        payload = json.loads(
            (tmp_path / "resnet18-dense-compare.json").read_text())
        assert payload["tiles_saved"] == 22
        assert payload["tile_ratio"] == pytest.approx(201 / 179)


class TestConfigPrecedence:
    def test_config_file_sets_sweep_grid(self, capsys, tmp_path, fixtures_dir):
        cfg = tmp_path / "run.toml"
        cfg.write_text("[sweep]\nrow_dims = [128]\naspects = [1]\n")
        rc, _, _ = run(capsys, "sweep",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--config", str(cfg), "-o", str(tmp_path))
        assert rc == 0
        lines = (tmp_path / "lenet-dense-sweep.csv").read_text().splitlines()
        assert len(lines) == 2 and lines[1].startswith("128,128,")

    def test_cli_flag_beats_config(self, capsys, tmp_path, fixtures_dir):
        cfg = tmp_path / "run.toml"
        cfg.write_text("[sweep]\nrow_dims = [128]\naspects = [1]\n")
        rc, _, _ = run(capsys, "sweep",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--config", str(cfg), "--row-dims", "256",
                       "-o", str(tmp_path))
        assert rc == 0
        lines = (tmp_path / "lenet-dense-sweep.csv").read_text().splitlines()
        assert len(lines) == 2 and lines[1].startswith("256,256,")

    def test_config_rapa_applies(self, capsys, tmp_path, fixtures_dir):
        cfg = tmp_path / "run.toml"
        cfg.write_text("[rapa]\nfirst_factor = 128\ndecay = 4\n")
        rc, out, _ = run(capsys, "latency",
                         "--network", net(fixtures_dir, "resnet18.toml"),
                         "--config", str(cfg), "-o", str(tmp_path))
        assert rc == 0
        assert "sequential 10438, pipelined 3136" in out


class TestOutputDir:
    def test_env_var(self, capsys, tmp_path, monkeypatch, fixtures_dir):
        monkeypatch.setenv("TILEPACK_OUTPUT_DIR", str(tmp_path))
        rc, _, _ = run(capsys, "fragments",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--tile", "256x256")
        assert rc == 0
        assert (tmp_path / "lenet-fragments.csv").exists()

    def test_flag_beats_env_var(self, capsys, tmp_path, monkeypatch, fixtures_dir):
        monkeypatch.setenv("TILEPACK_OUTPUT_DIR", str(tmp_path / "env"))
        rc, _, _ = run(capsys, "fragments",
                       "--network", net(fixtures_dir, "lenet.toml"),
                       "--tile", "256x256", "-o", str(tmp_path / "flag"))
        assert rc == 0
        assert (tmp_path / "flag" / "lenet-fragments.csv").exists()
        assert not (tmp_path / "env").exists()


class TestErrors:
    def test_zero_tile_dimension(self, capsys, tmp_path, fixtures_dir):
        rc, _, err = run(capsys, "pack",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--tile", "0x512", "-o", str(tmp_path))
        assert rc == 1
        assert "error: tile dimensions must be >= 1" in err

    def test_malformed_tile(self, capsys, tmp_path, fixtures_dir):
        rc, _, err = run(capsys, "pack",
                         "--network", net(fixtures_dir, "thirteen-items.toml"),
                         "--tile", "big", "-o", str(tmp_path))
        assert rc == 1
        assert "tile must be ROWSxCOLS" in err

    def test_missing_network_file(self, capsys, tmp_path):
        rc, _, err = run(capsys, "fragments", "--network", "absent.toml",
                         "--tile", "256x256", "-o", str(tmp_path))
        assert rc == 1
        assert err.startswith("error:")

    def test_bad_rapa(self, capsys, tmp_path, fixtures_dir):
        rc, _, err = run(capsys, "latency",
                         "--network", net(fixtures_dir, "lenet.toml"),
                         "--rapa", "12x", "-o", str(tmp_path))
        assert rc == 1
        assert "rapa must be FIRST/DECAY" in err

    def test_bad_config_key(self, capsys, tmp_path, fixtures_dir):
        cfg = tmp_path / "run.toml"
        cfg.write_text("sede = 1\n")
        rc, _, err = run(capsys, "latency",
                         "--network", net(fixtures_dir, "lenet.toml"),
                         "--config", str(cfg), "-o", str(tmp_path))
        assert rc == 1
        assert "unknown key 'sede'" in err

    def test_unknown_flag_is_usage_error(self, fixtures_dir):
        with pytest.raises(SystemExit) as exc:
            main(["pack", "--network", net(fixtures_dir, "lenet.toml"),
                  "--tile", "256x256", "--frobnicate"])
        assert exc.value.code == 2

    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_bad_row_dims(self, capsys, tmp_path, fixtures_dir):
        rc, _, err = run(capsys, "sweep",
                         "--network", net(fixtures_dir, "lenet.toml"),
                         "--row-dims", "64,zero", "-o", str(tmp_path))
        assert rc == 1
        assert "--row-dims must be comma-separated integers" in err
