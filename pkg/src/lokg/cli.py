"""Command-line surface: staged pipeline runs driven by one TOML config.

Stages write their artifacts into the configured output directory and later
stages read them back, so partial re-runs are cheap.  Exit codes: 0 success,
1 runtime failure, 2 usage/config/schema problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from lokg import __version__
from lokg.config import RunConfig, dataset_hash, load_config, print_defaults
from lokg.errors import ConfigError, LokgError, SchemaError
from lokg.evaluation import (
    all_journey_similarities,
    assess_relations,
    assessments_csv,
    journey_similarity_by_level,
)
from lokg.kg import build_kg, from_native, to_edge_list, to_graphml, to_native
from lokg.metrics import compare_reports, full_report, per_node_csv
from lokg.providers.client import providers_from_config
from lokg.synth import generate, lexicon_tsv
from lokg.taxonomy import filter_dataset, parse_taxonomy, serialize_taxonomy
from lokg.tmp import EmbeddingCache, TextMiner, ledger_from_csv, ledger_to_csv


def _out(cfg: RunConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _stamp(cfg: RunConfig, with_dataset: bool = True) -> dict:
    stamp = {"config_hash": cfg.config_hash()}
    if with_dataset and Path(cfg.dataset_path).exists():
        stamp["dataset_hash"] = dataset_hash(cfg.dataset_path)
    if not cfg.reproducible:
        stamp["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return stamp


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8")


def _read_json(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"missing artifact {path}; run the earlier pipeline stages first")
    return json.loads(path.read_text(encoding="utf-8"))


def _load_forest(cfg: RunConfig):
    path = _out(cfg) / "forest.json"
    if not path.exists():
        raise ConfigError(f"missing artifact {path}; run `lokg ingest` first")
    return parse_taxonomy(path)


def _miner(cfg: RunConfig) -> TextMiner:
    providers = providers_from_config(cfg.detect, cfg.translate, cfg.embed,
                                      jobs=cfg.jobs or os.cpu_count() or 1)
    cache = EmbeddingCache()
    cache_path = _out(cfg) / "cache" / "embeddings.json"
    if cache_path.exists():
        cache.load_jsonable(json.loads(cache_path.read_text(encoding="utf-8")))
    return TextMiner(config=cfg.tmp, providers=providers, cache=cache)


def _save_cache(cfg: RunConfig, miner: TextMiner) -> None:
    cache_dir = _out(cfg) / "cache"
    cache_dir.mkdir(exist_ok=True)
    (cache_dir / "embeddings.json").write_text(
        json.dumps(miner.cache.to_jsonable()), encoding="utf-8")


# --- stages -------------------------------------------------------------------


def cmd_ingest(cfg: RunConfig, args) -> int:
    dataset = Path(cfg.dataset_path)
    if not dataset.exists():
        raise ConfigError(f"dataset not found: {dataset}")
    forest = parse_taxonomy(dataset)
    filtered, report = filter_dataset(forest)
    print(f"parsed {len(forest)} objects; removed {report.total_removed} "
          f"(no_content={report.no_content}, duplicates={report.duplicates}, "
          f"isolated={report.isolated})")
    if args.dry_run:
        print("dry run: no files written")
        return 0
    out = _out(cfg)
    (out / "forest.json").write_text(serialize_taxonomy(filtered), encoding="utf-8")
    _write_json(out / "filter_report.json", {**_stamp(cfg), **report.to_dict(),
                                             "level_counts": filtered.level_counts()})
    print(f"wrote {out / 'forest.json'} and {out / 'filter_report.json'}")
    return 0


def cmd_mine(cfg: RunConfig, args) -> int:
    forest = _load_forest(cfg)
    miner = _miner(cfg)
    out = _out(cfg)
    meta_path = out / "mine_meta.json"
    ledger_path = out / "ledger.csv"
    pair_cache = {}
    stamp = _stamp(cfg)
    if meta_path.exists() and ledger_path.exists():
        old = json.loads(meta_path.read_text(encoding="utf-8"))
        if (old.get("config_hash") == stamp["config_hash"]
                and old.get("dataset_hash") == stamp.get("dataset_hash")):
            pair_cache = {v.pair: v for v in
                          ledger_from_csv(ledger_path.read_text(encoding="utf-8"))}
    result = miner.mine(forest, pair_cache=pair_cache)
    total = len(result.verdicts) + len(result.errors)
    ledger_path.write_text(ledger_to_csv(result.verdicts), encoding="utf-8")
    _write_json(out / "relations.json", {
        **stamp,
        "provider_tags": sorted({
            miner.providers.detector.provider_tag,
            miner.providers.translator.provider_tag,
            miner.providers.embedder.provider_tag,
        }),
        "passed": [
            {"id_a": v.id_a, "id_b": v.id_b, "combined": v.combined,
             "intra_journey": v.intra_journey}
            for v in result.passed
        ],
    })
    pair_hit_rate = result.pairs_from_cache / total if total else 0.0
    _write_json(meta_path, {
        **stamp,
        "pairs_total": total,
        "pairs_from_cache": result.pairs_from_cache,
        "pair_cache_hit_rate": pair_hit_rate,
        "embed_cache_hits": miner.cache.hits,
        "embed_cache_misses": miner.cache.misses,
        "errors": len(result.errors),
    })
    if result.errors:
        lines = ["id_a,id_b,error"] + [f"{e.id_a},{e.id_b},{e.error}" for e in result.errors]
        (out / "errors.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _save_cache(cfg, miner)
    print(f"evaluated {total} pairs ({result.pairs_from_cache} from cache, "
          f"hit rate {pair_hit_rate:.0%}); {len(result.passed)} passed; "
          f"{len(result.errors)} errors")
    if total and len(result.errors) / total > cfg.max_failure_fraction:
        print(f"error: failure fraction {len(result.errors) / total:.2%} exceeds "
              f"allowed {cfg.max_failure_fraction:.2%}", file=sys.stderr)
        return 1
    return 0


def _passed_verdicts(cfg: RunConfig):
    ledger_path = _out(cfg) / "ledger.csv"
    if not ledger_path.exists():
        raise ConfigError(f"missing artifact {ledger_path}; run `lokg mine` first")
    return [v for v in ledger_from_csv(ledger_path.read_text(encoding="utf-8")) if v.passed]


def cmd_build(cfg: RunConfig, args) -> int:
    forest = _load_forest(cfg)
    verdicts = _passed_verdicts(cfg)
    relations_meta = _read_json(_out(cfg) / "relations.json")
    kg = build_kg(forest, verdicts, include_intra_journey=cfg.include_intra_journey,
                  provenance={
                      "config_hash": cfg.config_hash(),
                      "dataset_hash": relations_meta.get("dataset_hash", ""),
                      "provider_tags": relations_meta.get("provider_tags", []),
                  })
    out = _out(cfg)
    (out / "kg.json").write_text(to_native(kg), encoding="utf-8")
    (out / "kg.graphml").write_text(to_graphml(kg), encoding="utf-8")
    (out / "kg_edges.csv").write_text(to_edge_list(kg), encoding="utf-8")
    print(f"graph: {len(kg.nodes)} nodes, {len(kg.hierarchical_edges())} hierarchical + "
          f"{len(kg.semantic_edges())} semantic edges")
    return 0


def _load_kg(cfg: RunConfig):
    path = _out(cfg) / "kg.json"
    if not path.exists():
        raise ConfigError(f"missing artifact {path}; run `lokg build` first")
    return from_native(path.read_text(encoding="utf-8"))


def cmd_metrics(cfg: RunConfig, args) -> int:
    if getattr(args, "bc", None):
        cfg.metrics.bc_mode = args.bc
        try:
            cfg.metrics.bc_pivots()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    forest = _load_forest(cfg)
    kg = _load_kg(cfg)
    hierarchy = build_kg(forest, provenance={"config_hash": cfg.config_hash()})
    base = full_report(hierarchy, cfg.metrics)
    completed = full_report(kg, cfg.metrics)
    out = _out(cfg)
    _write_json(out / "metrics_hierarchical.json",
                {**_stamp(cfg), "provenance": hierarchy.provenance, **base.to_dict()})
    _write_json(out / "metrics_kg.json",
                {**_stamp(cfg), "provenance": kg.provenance, **completed.to_dict()})
    _write_json(out / "metrics_compare.json",
                {**_stamp(cfg), "comparison": compare_reports(base, completed)})
    (out / "per_node_kg.csv").write_text(per_node_csv(kg, completed), encoding="utf-8")
    for name, report in (("hierarchical", base), ("kg", completed)):
        s = report.summary()
        print(f"{name}: adc={s['adc_directed']:.3f} communities={s['community_count']} "
              f"Q={s['modularity']:.3f} wcc={s['wcc_count']} bc={s['bc_mean']:.2f}")
    return 0


def cmd_evaluate(cfg: RunConfig, args) -> int:
    forest = _load_forest(cfg)
    kg = _load_kg(cfg)
    miner = _miner(cfg)
    sims = all_journey_similarities(forest, miner)
    report = assess_relations(kg, sims, sample_size=cfg.evaluation.sample_size,
                              seed=cfg.evaluation.seed)
    out = _out(cfg)
    doc = {**_stamp(cfg), **report.to_dict()}
    if cfg.evaluation.per_level:
        doc["journey_sims_by_level"] = {
            jid: {lvl: {"j_sim": js.j_sim, "pair_count": js.pair_count}
                  for lvl, js in journey_similarity_by_level(forest, jid, miner).items()}
            for jid in sorted(sims)
        }
    _write_json(out / "evaluation.json", doc)
    (out / "assessments.csv").write_text(assessments_csv(report), encoding="utf-8")
    _save_cache(cfg, miner)
    print(f"assessed {report.sample_size} of {report.population_size} relations; "
          f"pass fraction {report.pass_fraction:.1%}")
    return 0


def cmd_report(cfg: RunConfig, args) -> int:
    out = _out(cfg)
    filter_report = _read_json(out / "filter_report.json")
    mine_meta = _read_json(out / "mine_meta.json")
    compare = _read_json(out / "metrics_compare.json")["comparison"]
    evaluation = _read_json(out / "evaluation.json")
    doc = {
        **_stamp(cfg),
        "dataset": {"level_counts": filter_report.get("level_counts", {}),
                    "filtered": filter_report.get("counts", {})},
        "mining": {k: mine_meta[k] for k in
                   ("pairs_total", "pairs_from_cache", "errors") if k in mine_meta},
        "metrics": compare,
        "evaluation": {k: evaluation[k] for k in
                       ("pass_fraction", "sample_size", "population_size")},
    }
    _write_json(out / "report.json", doc)
    (out / "report.md").write_text(_markdown_report(doc), encoding="utf-8")
    print(f"wrote {out / 'report.json'} and {out / 'report.md'}")
    return 0


def _markdown_report(doc: dict) -> str:
    lines = ["# Pipeline run report", ""]
    lines.append(f"- config hash: `{doc['config_hash']}`")
    if "dataset_hash" in doc:
        lines.append(f"- dataset hash: `{doc['dataset_hash']}`")
    if "generated_at" in doc:
        lines.append(f"- generated at: {doc['generated_at']}")
    lines += ["", "## Dataset", ""]
    for level, count in doc["dataset"]["level_counts"].items():
        lines.append(f"- {level}: {count}")
    removed = doc["dataset"]["filtered"]
    lines.append(f"- filtered out: {sum(removed.values())} "
                 f"(no_content={removed.get('no_content', 0)}, "
                 f"duplicates={removed.get('duplicates', 0)}, "
                 f"isolated={removed.get('isolated', 0)})")
    lines += ["", "## Mining", ""]
    mining = doc["mining"]
    lines.append(f"- pairs evaluated: {mining.get('pairs_total', 0)} "
                 f"({mining.get('pairs_from_cache', 0)} from cache, "
                 f"{mining.get('errors', 0)} errors)")
    lines += ["", "## Structural metrics (hierarchy vs. knowledge graph)", ""]
    lines.append("| metric | hierarchy | KG | delta | preferred | trend | reference |")
    lines.append("|---|---|---|---|---|---|---|")
    for name, row in doc["metrics"].items():
        ref = row.get("reference")
        ref_text = f"{ref['hierarchical']} -> {ref['kg']}" if ref else "-"
        mark = "yes" if row["trend_matched"] else "no"
        lines.append(
            f"| {name} | {row['hierarchical']:.4g} | {row['kg']:.4g} | "
            f"{row['delta']:+.4g} | {row['preferred']} | {mark} | {ref_text} |")
    lines.append("")
    lines.append("Reference column: values reported for the full-scale "
                 "expert-curated dataset (annotation only, not reproduced here).")
    ev = doc["evaluation"]
    lines += ["", "## Relation-quality evaluation", ""]
    lines.append(f"- assessed relations: {ev['sample_size']} of {ev['population_size']}")
    lines.append(f"- pass fraction (relation score >= journey-pair average): "
                 f"{ev['pass_fraction']:.1%}")
    lines.append("")
    return "\n".join(lines)


def cmd_gen_synth(cfg: RunConfig, args) -> int:
    forest, truth, lexicon = generate(cfg.synth)
    dataset = Path(cfg.dataset_path)
    if dataset.parent != Path("."):
        dataset.parent.mkdir(parents=True, exist_ok=True)
    dataset.write_text(serialize_taxonomy(forest), encoding="utf-8")
    labels_path = dataset.with_name(dataset.stem + "_labels.json")
    labels_path.write_text(truth.to_json(), encoding="utf-8")
    message = f"wrote {dataset} ({len(forest)} objects) and {labels_path}"
    if lexicon:
        lex_path = dataset.with_name(dataset.stem + "_lexicon.tsv")
        lex_path.write_text(lexicon_tsv(lexicon), encoding="utf-8")
        message += (f" and {lex_path} (add it to [providers.translate] "
                    f"extra_lexicons to translate the German variants)")
    print(message)
    return 0


def cmd_config(cfg, args) -> int:
    if args.action == "print-defaults":
        print(print_defaults(), end="")
        return 0
    raise ConfigError(f"unknown config action {args.action!r}")


# --- argument parsing -----------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lokg",
        description="Contextual knowledge graphs from learning-object taxonomies.")
    parser.add_argument("--version", action="version", version=f"lokg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-c", "--config", default=None,
                       help="config file (or set LOKG_CONFIG)")
        p.add_argument("--jobs", type=int, default=None, help="worker cap override")
        p.add_argument("--reproducible", action="store_true", default=None,
                       help="omit timestamps for byte-identical outputs")
        p.set_defaults(func=func)
        return p

    ingest = stage("ingest", cmd_ingest, "parse and filter the dataset")
    ingest.add_argument("--dry-run", action="store_true", help="validate only")
    stage("mine", cmd_mine, "run the text mining pipeline")
    stage("build", cmd_build, "assemble the knowledge graph")
    metrics_p = stage("metrics", cmd_metrics, "compute the quality-control metric suite")
    metrics_p.add_argument("--bc", default=None, metavar="exact|pivot:k",
                           help="override the betweenness method from the config")
    stage("evaluate", cmd_evaluate, "run the relation-quality evaluation")
    stage("report", cmd_report, "assemble the run summary")
    stage("gen-synth", cmd_gen_synth, "generate a synthetic dataset")

    config_p = sub.add_parser("config", help="configuration helpers")
    config_p.add_argument("action", choices=["print-defaults"])
    config_p.set_defaults(func=cmd_config, needs_config=False)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if getattr(args, "needs_config", True):
            config_path = args.config or os.environ.get("LOKG_CONFIG")
            if not config_path:
                raise ConfigError("no config given: pass -c/--config or set LOKG_CONFIG")
            cfg = load_config(config_path)
            if getattr(args, "jobs", None) is not None:
                cfg.jobs = args.jobs
            if getattr(args, "reproducible", None):
                cfg.reproducible = True
        else:
            cfg = None
        return args.func(cfg, args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LokgError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
