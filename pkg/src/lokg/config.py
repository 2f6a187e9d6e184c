"""Run configuration: one TOML file drives every pipeline stage.

The config hash covers only semantic sections (providers, tmp, metrics,
evaluation, synth, intra-journey toggle) so that moving files around or
changing worker counts never invalidates cached decisions; the dataset
content is hashed separately.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from lokg.errors import ConfigError
from lokg.metrics import MetricsConfig
from lokg.providers import ProviderConfig
from lokg.synth import GeneratorSpec
from lokg.taxonomy import Level
from lokg.tmp import TmpConfig


@dataclass
class EvalConfig:
    sample_size: int = 240
    seed: int = 0
    per_level: bool = False


@dataclass
class RunConfig:
    dataset_path: str = "dataset.json"
    output_dir: str = "out"
    detect: ProviderConfig = field(default_factory=ProviderConfig)
    translate: ProviderConfig = field(default_factory=ProviderConfig)
    embed: ProviderConfig = field(default_factory=ProviderConfig)
    tmp: TmpConfig = field(default_factory=TmpConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)
    evaluation: EvalConfig = field(default_factory=EvalConfig)
    synth: GeneratorSpec = field(default_factory=GeneratorSpec)
    include_intra_journey: bool = False
    max_failure_fraction: float = 0.0
    jobs: int = 0
    reproducible: bool = False

    def semantic_dict(self) -> dict:
        def provider(p: ProviderConfig) -> dict:
            return {
                "mode": p.mode, "endpoint": p.endpoint, "batch_size": p.batch_size,
                "model_name": p.model_name, "extra_lexicons": list(p.extra_lexicons),
            }

        return {
            "providers": {
                "detect": provider(self.detect),
                "translate": provider(self.translate),
                "embed": provider(self.embed),
            },
            "tmp": {
                "threshold": self.tmp.threshold,
                "title_weight": self.tmp.title_weight,
                "description_weight": self.tmp.description_weight,
                "k_max": self.tmp.k_max,
                "mmr_lambda": self.tmp.mmr_lambda,
                "level_pairs": [[a.value, b.value] for a, b in self.tmp.level_pairs],
                "blocking": self.tmp.blocking,
            },
            "metrics": {
                "bc": self.metrics.bc_mode,
                "weighted_bc": self.metrics.weighted_bc,
                "resolution": self.metrics.resolution,
                "seed": self.metrics.seed,
            },
            "evaluation": {
                "sample_size": self.evaluation.sample_size,
                "seed": self.evaluation.seed,
                "per_level": self.evaluation.per_level,
            },
            "synth": {
                "seed": self.synth.seed,
                "journeys": self.synth.journeys,
                "courses_per_journey": self.synth.courses_per_journey,
                "topics_per_course": self.synth.topics_per_course,
                "packages_per_topic": self.synth.packages_per_topic,
                "contents_per_package": self.synth.contents_per_package,
                "n_domains": self.synth.n_domains,
                "overlap": self.synth.overlap,
                "bilingual_fraction": self.synth.bilingual_fraction,
            },
            "include_intra_journey": self.include_intra_journey,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def dataset_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _take(section: dict, known: dict, where: str) -> dict:
    unknown = set(section) - set(known)
    if unknown:
        raise ConfigError(f"[{where}]: unknown keys {sorted(unknown)}")
    out = {}
    for key, expected in known.items():
        if key not in section:
            continue
        value = section[key]
        if expected is float and isinstance(value, int):
            value = float(value)
        if not isinstance(value, expected):
            raise ConfigError(f"[{where}].{key}: expected {expected}, got {type(value).__name__}")
        out[key] = value
    return out


def _provider(section: dict, where: str) -> ProviderConfig:
    raw = _take(section, {
        "mode": str, "endpoint": str, "timeout_s": float, "batch_size": int,
        "model_name": str, "max_attempts": int, "backoff_base_s": float,
        "extra_lexicons": list,
    }, where)
    if raw.get("endpoint") == "":
        raw.pop("endpoint")
    try:
        return ProviderConfig(**raw)
    except ValueError as exc:
        raise ConfigError(f"[{where}]: {exc}") from exc


def _level_pairs(raw) -> tuple:
    pairs = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError(f"[tmp].level_pairs entries must be 2-element arrays, got {pair!r}")
        try:
            pairs.append((Level(pair[0]), Level(pair[1])))
        except ValueError as exc:
            raise ConfigError(f"[tmp].level_pairs: {exc}") from exc
    return tuple(pairs)


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    known_sections = {"dataset", "output", "providers", "tmp", "metrics",
                      "evaluation", "synth", "run"}
    unknown = set(doc) - known_sections
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")

    cfg = RunConfig()
    dataset = _take(doc.get("dataset", {}), {"path": str}, "dataset")
    cfg.dataset_path = dataset.get("path", cfg.dataset_path)
    output = _take(doc.get("output", {}), {"dir": str}, "output")
    cfg.output_dir = output.get("dir", cfg.output_dir)

    providers = doc.get("providers", {})
    unknown = set(providers) - {"detect", "translate", "embed"}
    if unknown:
        raise ConfigError(f"[providers]: unknown subsections {sorted(unknown)}")
    cfg.detect = _provider(providers.get("detect", {}), "providers.detect")
    cfg.translate = _provider(providers.get("translate", {}), "providers.translate")
    cfg.embed = _provider(providers.get("embed", {}), "providers.embed")

    tmp = _take(doc.get("tmp", {}), {
        "threshold": float, "title_weight": float, "description_weight": float,
        "k_max": int, "mmr_lambda": float, "level_pairs": list, "blocking": bool,
        "include_intra_journey": bool, "max_failure_fraction": float,
    }, "tmp")
    cfg.include_intra_journey = tmp.pop("include_intra_journey", False)
    cfg.max_failure_fraction = tmp.pop("max_failure_fraction", 0.0)
    if "level_pairs" in tmp:
        tmp["level_pairs"] = _level_pairs(tmp["level_pairs"])
    try:
        cfg.tmp = TmpConfig(**tmp)
    except ValueError as exc:
        raise ConfigError(f"[tmp]: {exc}") from exc

    metrics = _take(doc.get("metrics", {}), {
        "bc": str, "weighted_bc": bool, "resolution": float, "seed": int,
    }, "metrics")
    if "bc" in metrics:
        metrics["bc_mode"] = metrics.pop("bc")
    cfg.metrics = MetricsConfig(**metrics)
    try:
        cfg.metrics.bc_pivots()
    except ValueError as exc:
        raise ConfigError(f"[metrics]: {exc}") from exc

    evaluation = _take(doc.get("evaluation", {}),
                       {"sample_size": int, "seed": int, "per_level": bool}, "evaluation")
    cfg.evaluation = EvalConfig(**evaluation)

    synth = _take(doc.get("synth", {}), {
        "seed": int, "journeys": int, "courses_per_journey": int,
        "topics_per_course": int, "packages_per_topic": int,
        "contents_per_package": int, "n_domains": int, "overlap": float,
        "bilingual_fraction": float,
    }, "synth")
    try:
        cfg.synth = GeneratorSpec(**synth)
    except ValueError as exc:
        raise ConfigError(f"[synth]: {exc}") from exc

    run = _take(doc.get("run", {}), {"jobs": int, "reproducible": bool}, "run")
    cfg.jobs = run.get("jobs", 0)
    cfg.reproducible = run.get("reproducible", False)
    return cfg


DEFAULTS_TOML = """\
# lokg run configuration (all values shown are the defaults)

[dataset]
path = "dataset.json"

[output]
dir = "out"

[providers.detect]
mode = "builtin"          # builtin | external
# endpoint = "http://localhost:8080"
timeout_s = 10.0
batch_size = 32
max_attempts = 3
backoff_base_s = 0.25

[providers.translate]
mode = "builtin"
extra_lexicons = []       # extra de->en TSV files (e.g. the synth sidecar)

[providers.embed]
mode = "builtin"
model_name = ""
batch_size = 32

[tmp]
threshold = 0.88          # tunable; not a published value
title_weight = 0.5
description_weight = 0.5
k_max = 5
mmr_lambda = 0.5
level_pairs = [["Course", "Course"], ["Topic", "Topic"]]
blocking = false
include_intra_journey = false
max_failure_fraction = 0.0

[metrics]
bc = "exact"              # exact | pivot:<k>
weighted_bc = false
resolution = 1.0
seed = 0

[evaluation]
sample_size = 240
seed = 0
per_level = false

[synth]
seed = 0
journeys = 20
courses_per_journey = 3
topics_per_course = 2
packages_per_topic = 2
contents_per_package = 2
n_domains = 4
overlap = 0.2
bilingual_fraction = 0.0

[run]
jobs = 0                  # 0 = auto; caps in-flight external requests
reproducible = false      # omit timestamps for byte-identical reports
"""


def print_defaults() -> str:
    return DEFAULTS_TOML
