"""Run configuration: a YAML file, overridden by command-line flags.

Keys (all optional)::

    graphs: [seed.tsv, dice.json]   # graph files, format inferred from suffix
    reference_graph: ref.json       # for curation; omit to draw skill counts
    occupations: bls_titles.txt     # curation input, one title per line
    min_cluster_size: 10
    triple_count: 1000
    seed: 0
    renderer: template              # or "endpoint"
    oracles: null                   # use the endpoint for skill counts/ordering;
                                    # null follows the renderer
    endpoint:
      base_url: https://api.openai.com/v1
      model: gpt-4
      temperature: 1.0
      max_retries: 4
      backoff: [1, 2, 4, 8, 16]
      api_key_env: OPENAI_API_KEY
      timeout: 120
      max_concurrency: 4
      min_interval: 0.0
    judge_model: null               # defaults to endpoint.model
    names: {female: null, male: null}
    category_map: null
    split_sizes: null               # [train, test, dev]; null keeps a 50:1:1 ratio
    noise: false
    quality_sample: 100
    jobs: 1
    output_dir: out

Credentials come only from the environment variable named by
``endpoint.api_key_env``.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError


@dataclass
class EndpointSettings:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    temperature: float = 1.0
    max_retries: int = 4
    backoff: list[float] = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0, 16.0])
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 120.0
    max_concurrency: int = 4
    min_interval: float = 0.0


@dataclass
class RunConfig:
    graphs: list[str] = field(default_factory=list)
    reference_graph: str | None = None
    occupations: str | None = None
    min_cluster_size: int = 10
    triple_count: int = 1000
    seed: int = 0
    renderer: str = "template"
    oracles: bool | None = None
    endpoint: EndpointSettings = field(default_factory=EndpointSettings)
    judge_model: str | None = None
    names: dict = field(default_factory=lambda: {"female": None, "male": None})
    category_map: str | None = None
    split_sizes: list[int] | None = None
    noise: bool = False
    quality_sample: int = 100
    jobs: int = 1
    output_dir: str = "out"

    @property
    def use_oracles(self) -> bool:
        return self.renderer == "endpoint" if self.oracles is None else bool(self.oracles)

    def validate(self) -> RunConfig:
        if self.renderer not in ("template", "endpoint"):
            raise ConfigError(f"renderer must be 'template' or 'endpoint', not {self.renderer!r}")
        if self.min_cluster_size < 1:
            raise ConfigError("min_cluster_size must be >= 1")
        if self.triple_count < 1:
            raise ConfigError("triple_count must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.split_sizes is not None:
            if len(self.split_sizes) != 3 or any(int(s) < 0 for s in self.split_sizes):
                raise ConfigError("split_sizes must be three non-negative integers")
            if sum(self.split_sizes) > self.triple_count:
                raise ConfigError("triple_count is smaller than the split total")
        for path in self.input_paths().values():
            if not Path(path).exists():
                raise ConfigError(f"input file not found: {path}")
        return self

    def input_paths(self) -> dict[str, str]:
        paths = {f"graphs[{i}]": p for i, p in enumerate(self.graphs)}
        for key in ("reference_graph", "occupations", "category_map"):
            if getattr(self, key):
                paths[key] = getattr(self, key)
        for g, p in self.names.items():
            if p:
                paths[f"names.{g}"] = p
        return paths

    def digest(self) -> str:
        """Hash of the settings that affect artifacts.

        Input files enter by content hash, so moving them does not change it;
        ``output_dir`` and ``jobs`` are excluded.
        """
        doc = asdict(self)
        for key in ("output_dir", "jobs"):
            doc.pop(key)
        doc["inputs"] = {k: file_digest(p) for k, p in sorted(self.input_paths().items())}
        doc["graphs"] = [doc["inputs"][f"graphs[{i}]"] for i in range(len(self.graphs))]
        for key in ("reference_graph", "occupations", "category_map"):
            if doc[key]:
                doc[key] = doc["inputs"][key]
        doc["names"] = {g: doc["inputs"].get(f"names.{g}") for g in self.names}
        blob = json.dumps(doc, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _merge(cfg: RunConfig, values: dict, where: str) -> None:
    known = set(RunConfig.__dataclass_fields__)
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key == "endpoint":
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: endpoint must be a mapping")
            ep_known = set(EndpointSettings.__dataclass_fields__)
            for k, v in value.items():
                if k not in ep_known:
                    raise ConfigError(f"{where}: unknown endpoint key {k!r}")
                setattr(cfg.endpoint, k, v)
        elif key == "names":
            cfg.names.update(value or {})
        else:
            setattr(cfg, key, value)


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        try:
            doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        base = Path(path).parent
        for key in ("reference_graph", "occupations", "category_map"):
            if doc.get(key):
                doc[key] = str(base / doc[key])
        if doc.get("graphs"):
            doc["graphs"] = [str(base / p) for p in doc["graphs"]]
        if isinstance(doc.get("names"), dict):
            doc["names"] = {g: (str(base / p) if p else None) for g, p in doc["names"].items()}
        _merge(cfg, doc, str(path))
    if overrides:
        _merge(cfg, {k: v for k, v in copy.deepcopy(overrides).items() if v is not None}, "flags")
    return cfg
