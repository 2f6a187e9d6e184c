import json
from pathlib import Path

import pytest

from lokg.cli import main
from lokg.config import load_config, print_defaults
from lokg.errors import ConfigError

BASE_CONFIG = """\
[dataset]
path = "dataset.json"
[output]
dir = "out"
[synth]
seed = 0
journeys = 4
n_domains = 2
overlap = 0.1
packages_per_topic = 1
contents_per_package = 1
[run]
reproducible = true
"""


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "config.toml").write_text(BASE_CONFIG)
    return tmp_path


def run(*argv):
    return main(list(argv))


def pipeline(workdir, stages=("gen-synth", "ingest", "mine", "build",
                              "metrics", "evaluate", "report")):
    for stage in stages:
        assert run(stage, "-c", "config.toml") == 0, f"stage {stage} failed"


class TestConfig:
    def test_defaults_document_is_loadable(self, tmp_path):
        path = tmp_path / "defaults.toml"
        path.write_text(print_defaults())
        cfg = load_config(path)
        assert cfg.tmp.threshold == 0.88
        assert cfg.evaluation.sample_size == 240
        assert cfg.metrics.bc_mode == "exact"

    def test_print_defaults_command(self, capsys):
        assert run("config", "print-defaults") == 0
        out = capsys.readouterr().out
        assert "[tmp]" in out and "threshold" in out

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[nope]\nx = 1\n")
        with pytest.raises(ConfigError, match="nope"):
            load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[tmp]\nthreshhold = 0.9\n")
        with pytest.raises(ConfigError, match="threshhold"):
            load_config(path)

    def test_config_hash_changes_with_any_semantic_value(self, tmp_path):
        path = tmp_path / "a.toml"
        path.write_text(BASE_CONFIG)
        base = load_config(path).config_hash()
        path.write_text(BASE_CONFIG + "[tmp]\nthreshold = 0.9\n")
        assert load_config(path).config_hash() != base
        # filesystem location does not affect the hash
        path.write_text(BASE_CONFIG.replace('dir = "out"', 'dir = "elsewhere"'))
        assert load_config(path).config_hash() == base

    def test_missing_config_is_usage_error(self, monkeypatch, capsys):
        monkeypatch.delenv("LOKG_CONFIG", raising=False)
        assert run("ingest") == 2

    def test_env_var_fallback(self, workdir, monkeypatch):
        monkeypatch.setenv("LOKG_CONFIG", "config.toml")
        assert run("gen-synth") == 0
        assert Path("dataset.json").exists()


class TestStages:
    def test_dry_run_writes_nothing(self, workdir):
        assert run("gen-synth", "-c", "config.toml") == 0
        assert run("ingest", "-c", "config.toml", "--dry-run") == 0
        assert not (workdir / "out").exists()

    def test_missing_dataset_is_schema_exit(self, workdir):
        assert run("ingest", "-c", "config.toml") == 2

    def test_malformed_dataset_reports_position(self, workdir, capsys):
        Path("dataset.json").write_text("[{broken")
        assert run("ingest", "-c", "config.toml") == 2
        assert "line" in capsys.readouterr().err

    def test_stage_order_enforced(self, workdir):
        assert run("mine", "-c", "config.toml") == 2  # no forest.json yet

    def test_full_pipeline_artifacts(self, workdir):
        pipeline(workdir)
        out = workdir / "out"
        expected = [
            "forest.json", "filter_report.json", "ledger.csv", "relations.json",
            "mine_meta.json", "kg.json", "kg.graphml", "kg_edges.csv",
            "metrics_hierarchical.json", "metrics_kg.json", "metrics_compare.json",
            "per_node_kg.csv", "evaluation.json", "assessments.csv",
            "report.json", "report.md",
        ]
        for name in expected:
            assert (out / name).exists(), name
        report = json.loads((out / "report.json").read_text())
        assert "metrics" in report and "evaluation" in report
        assert report["metrics"]["adc_directed"]["reference"]["kg"] == 2.262

    def test_bc_flag_overrides_config(self, workdir):
        pipeline(workdir, ("gen-synth", "ingest", "mine", "build"))
        assert run("metrics", "-c", "config.toml", "--bc", "pivot:8") == 0
        doc = json.loads((workdir / "out" / "metrics_kg.json").read_text())
        assert doc["method_flags"]["bc"] == "pivot:8"
        assert run("metrics", "-c", "config.toml", "--bc", "pivot:zero") == 2

    def test_hierarchy_metrics_have_zero_semantic_edges(self, workdir):
        pipeline(workdir, ("gen-synth", "ingest", "mine", "build", "metrics"))
        doc = json.loads((workdir / "out" / "metrics_hierarchical.json").read_text())
        assert doc["provenance"]["semantic_edge_count"] == 0
        kg_doc = json.loads((workdir / "out" / "metrics_kg.json").read_text())
        assert kg_doc["provenance"]["semantic_edge_count"] > 0

    def test_rerun_mine_hits_cache_and_keeps_ledger_bytes(self, workdir):
        pipeline(workdir, ("gen-synth", "ingest", "mine"))
        ledger = (workdir / "out" / "ledger.csv").read_bytes()
        assert run("mine", "-c", "config.toml") == 0
        meta = json.loads((workdir / "out" / "mine_meta.json").read_text())
        assert meta["pair_cache_hit_rate"] == 1.0
        assert meta["embed_cache_misses"] == 0
        assert (workdir / "out" / "ledger.csv").read_bytes() == ledger

    def test_threshold_change_invalidates_pairs_but_not_embeddings(self, workdir):
        pipeline(workdir, ("gen-synth", "ingest", "mine"))
        (workdir / "config.toml").write_text(BASE_CONFIG + "[tmp]\nthreshold = 0.5\n")
        assert run("mine", "-c", "config.toml") == 0
        meta = json.loads((workdir / "out" / "mine_meta.json").read_text())
        assert meta["pairs_from_cache"] == 0
        assert meta["embed_cache_misses"] == 0
        assert meta["embed_cache_hits"] > 0

    def test_reproducible_runs_are_byte_identical(self, workdir):
        pipeline(workdir)
        first = {
            name: (workdir / "out" / name).read_bytes()
            for name in ("report.json", "report.md", "kg.json", "ledger.csv",
                         "metrics_kg.json", "evaluation.json", "assessments.csv")
        }
        (workdir / "config.toml").write_text(BASE_CONFIG.replace('dir = "out"', 'dir = "two"'))
        pipeline(workdir)
        for name, payload in first.items():
            assert (workdir / "two" / name).read_bytes() == payload, name

    def test_gen_synth_bilingual_emits_lexicon_sidecar(self, workdir):
        (workdir / "config.toml").write_text(
            BASE_CONFIG.replace("seed = 0", "seed = 3")
            .replace("overlap = 0.1", "overlap = 0.1\nbilingual_fraction = 0.5"))
        assert run("gen-synth", "-c", "config.toml") == 0
        assert Path("dataset_lexicon.tsv").exists()
        assert Path("dataset_labels.json").exists()

    def test_dead_external_embedder_exits_nonzero(self, workdir, capsys):
        (workdir / "config.toml").write_text(BASE_CONFIG + """
[providers.embed]
mode = "external"
endpoint = "http://127.0.0.1:1"
max_attempts = 1
timeout_s = 0.5
""")
        pipeline(workdir, ("gen-synth", "ingest"))
        assert run("mine", "-c", "config.toml") == 1
        errors = (workdir / "out" / "errors.csv").read_text()
        assert "ProviderUnavailable" in errors
