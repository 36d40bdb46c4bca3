import json
import shutil
from importlib import resources
from pathlib import Path

import pytest

from caseminer.cli import main
from caseminer.pipeline import ARTIFACTS

FIXTURE = Path(str(resources.files("caseminer").joinpath("data/fixture")))
CONFIG = FIXTURE / "config.ini"
REPORTS = ("keyphrases_out", "recall_out", "cooccurrence_out", "report_out", "clusters_out", "candidates_out")


def run_all(out: Path, *extra: str) -> int:
    return main(["all", "--config", str(CONFIG), "--out-dir", str(out), *extra])


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert run_all(out) == 0
    return out


def test_all_writes_every_artifact(full_run):
    for key, name in ARTIFACTS.items():
        if key != "curve_out":
            assert (full_run / name).is_file(), name
    report = json.loads((full_run / "report.json").read_text(encoding="utf-8"))
    assert report["recall"]["metric"] == "recall"
    assert report["recall"]["value"] >= 0.9


def test_cluster_without_matrix_fails_naming_file(tmp_path, capsys):
    code = main(["cluster", "--config", str(CONFIG), "--out-dir", str(tmp_path)])
    assert code != 0
    assert "matrix.npz" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    assert main(["all", "--config", str(tmp_path / "nope.ini")]) == 2
    assert main(["all", "--config", str(CONFIG), "--min-pts", "1", "--out-dir", str(tmp_path)]) == 2
    assert "config" in capsys.readouterr().err


def test_runs_are_byte_identical(full_run, tmp_path):
    assert run_all(tmp_path) == 0
    for key in REPORTS:
        name = ARTIFACTS[key]
        assert (tmp_path / name).read_bytes() == (full_run / name).read_bytes(), name


def test_stage_by_stage_equals_all(full_run, tmp_path):
    for stage in ("mine", "extract", "cluster", "report"):
        assert main([stage, "--config", str(CONFIG), "--out-dir", str(tmp_path)]) == 0, stage
    for key in REPORTS:
        name = ARTIFACTS[key]
        assert (tmp_path / name).read_bytes() == (full_run / name).read_bytes(), name


def test_flags_override_config(tmp_path):
    assert run_all(tmp_path, "--max-rounds", "1") == 0
    clusters = json.loads((tmp_path / "clusters.json").read_text(encoding="utf-8"))
    assert len(clusters["rounds"]) == 1


def test_emit_curve(tmp_path):
    assert run_all(tmp_path, "--emit-curve") == 0
    lines = (tmp_path / "curve.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) > 100
    custom = tmp_path / "elsewhere.csv"
    assert run_all(tmp_path / "b", "--emit-curve", str(custom)) == 0
    assert custom.read_text(encoding="utf-8").splitlines() == lines


def test_without_gold_reports_coverage(tmp_path):
    cfg = tmp_path / "cfg"
    shutil.copytree(FIXTURE, cfg)
    text = (cfg / "config.ini").read_text(encoding="utf-8").replace("gold_labels = gold.csv\n", "")
    (cfg / "config.ini").write_text(text, encoding="utf-8")
    assert main(["all", "--config", str(cfg / "config.ini"), "--out-dir", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text(encoding="utf-8"))
    assert report["recall"]["metric"] == "coverage"
    assert not (tmp_path / "o" / "cooccurrence.csv").exists()


def test_synth_reproduces_bundled_fixture(tmp_path):
    assert main(["synth", "--out", str(tmp_path)]) == 0
    for rel in ("parses.conllu", "gold.csv", "annotation.json"):
        assert (tmp_path / rel).read_bytes() == (FIXTURE / rel).read_bytes(), rel
    bundled = sorted(p.name for p in (FIXTURE / "cases").iterdir())
    assert sorted(p.name for p in (tmp_path / "cases").iterdir()) == bundled
    for name in bundled:
        assert (tmp_path / "cases" / name).read_bytes() == (FIXTURE / "cases" / name).read_bytes()
