"""Tests for the command-line interface."""

import json

import pytest
from typer.testing import CliRunner

from roughmetrics import __version__
from roughmetrics.cli.main import app
from roughmetrics.core.config import Settings, get_settings, use_config_file

runner = CliRunner()


def _write(path, data):
    path.write_text(json.dumps(data))
    return path


def _json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


@pytest.fixture
def flake_file(tmp_path):
    """Points 0, 1, 2 of the line snowflaked at alpha = 0.5."""
    return _write(
        tmp_path / "flake.json",
        {
            "kind": "snowflake",
            "alpha": 0.5,
            "base": {"kind": "euclidean", "coords": [[0.0], [1.0], [2.0]]},
        },
    )


@pytest.fixture
def bad_file(tmp_path):
    """Matrix breaking the triangle inequality."""
    matrix = [[0, 1, 1], [1, 0, 3], [1, 3, 0]]
    return _write(tmp_path / "bad.json", {"kind": "matrix", "matrix": matrix})


@pytest.fixture
def zigzag_file(tmp_path):
    """Ordered points that turn back, so they are not rough self-expanding."""
    coords = [[0.0], [10.0], [5.0], [-20.0]]
    return _write(tmp_path / "zigzag.json", {"kind": "euclidean", "coords": coords})


@pytest.fixture
def outward_file(tmp_path):
    """Points running away from the origin along a line."""
    coords = [[0.0], [1.0], [3.0], [7.0]]
    return _write(tmp_path / "outward.json", {"kind": "euclidean", "coords": coords})


def test_version():
    result = runner.invoke(app, ["--version"])

    assert result.exit_code == 0
    assert f"roughmetrics v{__version__}" in result.stdout


class TestValidate:
    def test_metric_passes(self, flake_file):
        report = _json(runner.invoke(app, ["validate", str(flake_file)]))

        assert report["passed"]
        assert report["violations"] == []

    def test_violation_exits_six(self, bad_file):
        result = runner.invoke(app, ["validate", str(bad_file)])

        assert result.exit_code == 6

    def test_invalid_json_exits_two(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ nope")

        result = runner.invoke(app, ["validate", str(path)])

        assert result.exit_code == 2

    def test_missing_file_exits_two(self, tmp_path):
        result = runner.invoke(app, ["validate", str(tmp_path / "absent.json")])

        assert result.exit_code == 2

    def test_report_to_file(self, flake_file, tmp_path):
        out = tmp_path / "reports" / "validate.json"

        result = runner.invoke(app, ["validate", str(flake_file), "--out", str(out)])

        assert result.exit_code == 0
        assert json.loads(out.read_text())["passed"]


class TestAnalyze:
    def test_snowflaked_line(self, flake_file):
        report = _json(runner.invoke(app, ["analyze", str(flake_file)]))

        assert report["n"] == 3
        assert report["sra"]["required_alpha"] == pytest.approx(2**0.5 - 1.0)
        assert not report["ultrametric"]

    def test_alpha_check_and_angles(self, flake_file):
        report = _json(
            runner.invoke(app, ["analyze", str(flake_file), "--alpha", "0.5", "--angles", "0,1,2"])
        )

        assert report["check"]["passed"]
        assert len(report["angles"]["angles"]) == 3

    def test_triple_table(self, flake_file, tmp_path):
        table = tmp_path / "triples.csv"

        result = runner.invoke(app, ["analyze", str(flake_file), "--table", str(table)])

        assert result.exit_code == 0
        lines = table.read_text().splitlines()
        assert lines[0] == "i,j,k,required_alpha"
        assert len(lines) == 2

    def test_pretty_table(self, flake_file):
        result = runner.invoke(app, ["analyze", str(flake_file), "--pretty", "--no-lp"])

        assert result.exit_code == 0
        assert "AnalysisReport" in result.stdout

    def test_csv_format(self, flake_file):
        result = runner.invoke(app, ["analyze", str(flake_file), "--format", "csv"])

        assert result.exit_code == 0
        header, row = result.stdout.strip().splitlines()
        assert header == "i,j,k,required_alpha"
        assert float(row.split(",")[3]) == pytest.approx(2**0.5 - 1.0)


class TestOrderCheck:
    def test_kernels_of_plain_space_file(self, outward_file):
        report = _json(runner.invoke(app, ["order-check", str(outward_file)]))

        assert report["order"]["size"] == 4
        assert report["order"]["lambda_expanding"] <= 0.0

    def test_theta_needs_m(self, outward_file):
        result = runner.invoke(app, ["order-check", str(outward_file), "--theta", "0.5"])

        assert result.exit_code == 3

    def test_trace_file(self, outward_file, tmp_path):
        trace = tmp_path / "trace.jsonl"

        report = _json(
            runner.invoke(
                app,
                ["order-check", str(outward_file), "--theta", "0.5", "--m", "3"]
                + ["--trace", str(trace)],
            )
        )

        assert report["trace"]["m"] == 3
        assert trace.exists()


class TestConstruct:
    def test_prints_document(self):
        doc = _json(runner.invoke(app, ["construct", "laakso_level", "--param", "m=3"]))

        assert doc["kind"] == "construction"
        assert doc["params"] == {"m": 3}

    def test_inline_writes_points(self, tmp_path):
        out = tmp_path / "laakso.json"

        result = runner.invoke(
            app, ["construct", "laakso_level", "-p", "m=2", "--inline", "--out", str(out)]
        )

        assert result.exit_code == 0
        assert json.loads(out.read_text())["kind"] != "construction"

    def test_domain_error_exits_three(self):
        result = runner.invoke(app, ["construct", "laakso_level", "--param", "m=0"])

        assert result.exit_code == 3

    def test_malformed_param(self):
        result = runner.invoke(app, ["construct", "laakso_level", "--param", "m"])

        assert result.exit_code == 2


class TestSearchAndExtract:
    def test_search(self, flake_file):
        result = _json(runner.invoke(app, ["search", str(flake_file), "--alpha", "0.5"]))

        assert result["cardinality"] == 3
        assert result["proved_optimal"]

    def test_exhaustive_search(self, outward_file):
        result = _json(
            runner.invoke(app, ["search", str(outward_file), "--alpha", "0.0", "--exhaustive"])
        )

        assert result["cardinality"] == 2

    def test_require_proof_exits_five(self, tmp_path):
        coords = [[float(x)] for x in range(12)]
        path = _write(tmp_path / "line.json", {"kind": "euclidean", "coords": coords})

        result = runner.invoke(
            app, ["search", str(path), "--alpha", "0.0", "--budget", "2", "--require-proof"]
        )

        assert result.exit_code == 5

    def test_extract_precondition_exits_four(self, zigzag_file):
        result = runner.invoke(app, ["extract", str(zigzag_file), "--alpha", "0.8", "--k", "3"])

        assert result.exit_code == 4

    def test_extract_pair(self, outward_file):
        result = _json(
            runner.invoke(app, ["extract", str(outward_file), "--alpha", "0.8", "--k", "2"])
        )

        assert result["certified"]
        assert len(result["subset"]) == 2


class TestEmbed:
    def test_schoenberg(self, tmp_path):
        path = _write(tmp_path / "pair.json", {"kind": "matrix", "matrix": [[0, 5], [5, 0]]})
        csv = tmp_path / "coords.csv"

        result = _json(runner.invoke(app, ["embed", str(path), "--coords-csv", str(csv)]))

        assert result["success"]
        assert result["dimension"] == 1
        assert csv.read_text().startswith("# norm=euclidean")

    def test_tree(self):
        result = _json(
            runner.invoke(app, ["embed", "--method", "tree", "--t", "1,0.5,0.25,0.125"])
        )

        assert result["target_norm"] == "taxicab"
        assert result["dimension"] == 2

    def test_tree_needs_heights(self):
        result = runner.invoke(app, ["embed", "--method", "tree"])

        assert result.exit_code == 3


def test_constants():
    bundle = _json(runner.invoke(app, ["constants", "--theta", "0.8", "--m", "3"]))

    assert bundle["rho"] == pytest.approx(45.0)
    assert bundle["p"] is None


class TestProbe:
    def test_doubling(self, flake_file):
        probe = _json(
            runner.invoke(app, ["probe", "doubling", str(flake_file), "-r", "2.0", "-r", "1.0"])
        )

        assert probe["count"] >= 1

    def test_sequence(self):
        check = _json(
            runner.invoke(
                app,
                ["probe", "sequence", "--t", "1,0.5,0.25,0.125", "--delta", "0.5", "--m", "1"],
            )
        )

        assert check["cond3"]
        assert check["cond4_sup"] == 0

    def test_growth(self):
        profile = _json(
            runner.invoke(
                app,
                [
                    "probe", "growth", "laakso_level",
                    "--size-param", "m", "--sizes", "1,2", "--alpha", "0.5",
                ],
            )
        )

        assert [row["size"] for row in profile["rows"]] == [1, 2]


class TestConfig:
    def test_init_show_validate(self, tmp_path):
        path = tmp_path / "roughmetrics.yaml"

        init = runner.invoke(app, ["config", "init", str(path)])
        show = runner.invoke(app, ["config", "show", "--config", str(path)])
        check = runner.invoke(app, ["config", "validate", str(path)])

        assert init.exit_code == 0
        assert Settings.load_from_file(path).threads == 1
        assert json.loads(show.stdout)["numerics"]["tolerance"] == pytest.approx(1e-9)
        assert check.exit_code == 0

    def test_init_declines_overwrite(self, tmp_path):
        path = tmp_path / "roughmetrics.yaml"
        path.write_text("threads: 3\n")

        result = runner.invoke(app, ["config", "init", str(path)], input="n\n")

        assert result.exit_code == 0
        assert path.read_text() == "threads: 3\n"

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("threads: 0\n")

        result = runner.invoke(app, ["config", "validate", str(path)])

        assert result.exit_code == 1

    def test_use_config_file(self, tmp_path):
        path = tmp_path / "small.yaml"
        path.write_text("search:\n  budget: 2\n")

        use_config_file(path)

        assert get_settings().search.budget == 2
        use_config_file(None)
        assert get_settings().search.budget == 2_000_000

    def test_global_config_changes_search_budget(self, tmp_path):
        config = tmp_path / "small.yaml"
        config.write_text("search:\n  budget: 2\n")
        coords = [[float(x)] for x in range(12)]
        line = _write(tmp_path / "line.json", {"kind": "euclidean", "coords": coords})
        command = ["search", str(line), "--alpha", "0.0", "--require-proof"]

        default = runner.invoke(app, command)
        small = runner.invoke(app, ["--config", str(config)] + command)

        assert default.exit_code == 0
        assert small.exit_code == 5

    def test_global_config_feeds_show(self, tmp_path):
        config = tmp_path / "loose.yaml"
        config.write_text("numerics:\n  tolerance: 1.0e-06\n")

        result = runner.invoke(app, ["--config", str(config), "config", "show"])

        assert json.loads(result.stdout)["numerics"]["tolerance"] == pytest.approx(1e-6)

    def test_global_config_missing_exits_two(self, tmp_path, flake_file):
        result = runner.invoke(
            app, ["--config", str(tmp_path / "absent.yaml"), "validate", str(flake_file)]
        )

        assert result.exit_code == 2

    def test_global_config_invalid_exits_one(self, tmp_path, flake_file):
        config = tmp_path / "bad.yaml"
        config.write_text("threads: 0\n")

        result = runner.invoke(app, ["--config", str(config), "validate", str(flake_file)])

        assert result.exit_code == 1
