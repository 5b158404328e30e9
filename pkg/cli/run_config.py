"""Configuração completa de uma execução, serializável em JSON."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime
from pathlib import Path
from typing import Any, Literal

from analysis.lifecycle import LifecycleConfig
from analysis.rhythm import DetectorConfig
from config.settings import CBH_THRESHOLD, DEFAULT_DOC_PATTERNS, OUTPUT_DIR
from core.exceptions import ConfigError
from core.loader import COMMIT_FORMATS
from core.utils import parse_timestamp

CoreMethodName = Literal["tf", "cbh"]
CORE_METHODS = ("tf", "cbh")
SELF_LOOP_MODES = ("pauses", "boundaries")


@dataclass(frozen=True)
class RunConfig:
    """
    Tudo o que determina as saídas de uma execução.

    `commits` aceita entradas `owner/repo=caminho` (obrigatório para git_log)
    ou apenas `caminho` (ndjson com campo `repo`).

    `trace_dirs` lista diretórios de saída já processados (um por organização)
    cujas traces o relatório junta; vazio significa usar apenas `output_dir`.
    """

    org_id: str = ""
    commits: tuple[str, ...] = ()
    commit_format: str = "git_log"
    events: tuple[str, ...] = ()
    aliases: str | None = None
    fuzzy_threshold: float | None = None
    doc_patterns: tuple[str, ...] = DEFAULT_DOC_PATTERNS
    cutoff: str | None = None
    output_dir: str = str(OUTPUT_DIR)
    cache_dir: str | None = None
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    lifecycle: LifecycleConfig = field(default_factory=LifecycleConfig)
    core_method: CoreMethodName = "tf"
    cbh_threshold: float = CBH_THRESHOLD
    include_doc_commits: bool = False
    overrides: str | None = None
    self_loop_mode: str = "pauses"
    trace_dirs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.commit_format not in COMMIT_FORMATS:
            raise ConfigError("commit_format", f"'{self.commit_format}' não está em {COMMIT_FORMATS}")
        if self.core_method not in CORE_METHODS:
            raise ConfigError("core_method", f"'{self.core_method}' não está em {CORE_METHODS}")
        if self.self_loop_mode not in SELF_LOOP_MODES:
            raise ConfigError("self_loop_mode", f"'{self.self_loop_mode}' não está em {SELF_LOOP_MODES}")
        if not 0 < self.cbh_threshold <= 1:
            raise ConfigError("cbh_threshold", f"{self.cbh_threshold} fora de (0, 1]")
        if self.fuzzy_threshold is not None and not 0 < self.fuzzy_threshold <= 100:
            raise ConfigError("fuzzy_threshold", f"{self.fuzzy_threshold} fora de (0, 100]")
        if self.cutoff is not None:
            try:
                parse_timestamp(self.cutoff)
            except (ValueError, OverflowError) as e:
                raise ConfigError("cutoff", f"data inválida '{self.cutoff}'") from e

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir) if self.cache_dir else self.output_path / "cache"

    @property
    def cutoff_datetime(self) -> datetime | None:
        return parse_timestamp(self.cutoff) if self.cutoff else None

    def commit_sources(self) -> list[tuple[str, Path]]:
        """Pares (repositório, caminho); repositório vazio quando não informado."""
        sources = []
        for entry in self.commits:
            repo, sep, path = entry.partition("=")
            sources.append((repo, Path(path)) if sep else ("", Path(repo)))
        return sources

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("commits", "events", "doc_patterns", "trace_dirs"):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError("run_config", f"chaves desconhecidas: {', '.join(unknown)}")
        values = dict(data)
        try:
            values["detector"] = DetectorConfig(**values.get("detector", {}))
            values["lifecycle"] = LifecycleConfig(**values.get("lifecycle", {}))
        except TypeError as e:
            raise ConfigError("run_config", str(e)) from e
        for key in ("commits", "events", "doc_patterns", "trace_dirs"):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigError("--config", f"arquivo não encontrado: {path}") from e
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ConfigError("--config", f"JSON inválido em {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("--config", "esperado um objeto JSON")
        return cls.from_dict(data)
