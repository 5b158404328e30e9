"""
Cache persistente das timelines e commits ingeridos.

O cache é um diretório versionado:

    manifest.json           cabeçalho com `format_version`, organização e índice
    commits.jsonl           um CommitRecord por linha
    timelines/<arquivo>     uma timeline por desenvolvedor (JSON)
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Any

from config.settings import (
    CACHE_COMMITS_FILE,
    CACHE_FORMAT_VERSION,
    CACHE_MANIFEST,
    CACHE_TIMELINES_DIR,
)
from core.exceptions import CacheCorruptedError, CacheError, CacheVersionError, PreconditionError
from core.logging_config import get_logger
from core.models import ActivityCategory, ActivityEvent, CommitFile, CommitRecord, DeveloperTimeline
from core.utils import parse_timestamp, slugify

logger = get_logger("cache")


@dataclass
class CachedCorpus:
    org_id: str
    timelines: dict[str, DeveloperTimeline]
    commits: list[CommitRecord] = field(default_factory=list)
    report: dict[str, Any] = field(default_factory=dict)


def _timeline_filename(key: str) -> str:
    digest = hashlib.sha1(key.encode("utf-8")).hexdigest()[:10]  # noqa: S324
    return f"{slugify(key)[:40]}_{digest}.json"


def _timeline_to_dict(timeline: DeveloperTimeline) -> dict[str, Any]:
    return {
        "developer_key": timeline.developer_key,
        "org_id": timeline.org_id,
        "commit_days": [d.isoformat() for d in timeline.commit_days],
        "activity_events": [
            {
                "occurred_at": e.occurred_at.isoformat(),
                "kind": e.kind,
                "repo_id": e.repo_id,
                "category": e.category.value,
            }
            for e in timeline.activity_events
        ],
        "observation_end": timeline.observation_end.isoformat(),
    }


def _timeline_from_dict(data: Mapping[str, Any]) -> DeveloperTimeline:
    return DeveloperTimeline(
        developer_key=data["developer_key"],
        org_id=data["org_id"],
        commit_days=tuple(date.fromisoformat(d) for d in data["commit_days"]),
        activity_events=tuple(
            ActivityEvent(
                occurred_at=parse_timestamp(e["occurred_at"]),
                kind=e["kind"],
                repo_id=e["repo_id"],
                category=ActivityCategory(e["category"]),
            )
            for e in data["activity_events"]
        ),
        observation_end=parse_timestamp(data["observation_end"]),
    )


def commit_to_dict(commit: CommitRecord) -> dict[str, Any]:
    return {
        "repo": commit.repo_id,
        "sha": commit.sha,
        "author_email": commit.author_key,
        "author_name": commit.author_name,
        "authored_at": commit.authored_at.isoformat(),
        "files": [{"path": f.path, "is_doc": f.is_doc, "status": f.status} for f in commit.files],
        "via_pull_request": commit.via_pull_request,
        "paths_missing": commit.paths_missing,
    }


def commit_from_dict(data: Mapping[str, Any]) -> CommitRecord:
    return CommitRecord(
        repo_id=data["repo"],
        sha=data["sha"],
        author_key=data["author_email"],
        authored_at=parse_timestamp(data["authored_at"]),
        files=tuple(CommitFile(f["path"], bool(f["is_doc"]), f.get("status", "M")) for f in data["files"]),
        via_pull_request=bool(data.get("via_pull_request", False)),
        author_name=data.get("author_name", ""),
        paths_missing=bool(data.get("paths_missing", False)),
    )


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def cache_store(
    path: str | Path,
    timelines: Mapping[str, DeveloperTimeline],
    commits: Iterable[CommitRecord] = (),
    org_id: str = "",
    report: Mapping[str, Any] | None = None,
) -> Path:
    """Grava timelines e commits no diretório de cache, substituindo o conteúdo anterior."""
    root = Path(path)
    tl_dir = root / CACHE_TIMELINES_DIR
    tl_dir.mkdir(parents=True, exist_ok=True)
    for stale in tl_dir.glob("*.json"):
        stale.unlink()

    index = []
    for key in sorted(timelines):
        filename = _timeline_filename(key)
        payload = {"format_version": CACHE_FORMAT_VERSION, "timeline": _timeline_to_dict(timelines[key])}
        (tl_dir / filename).write_text(_dump(payload) + "\n", encoding="utf-8")
        index.append({"developer_key": key, "file": filename})

    lines = [_dump(commit_to_dict(c)) for c in commits]
    (root / CACHE_COMMITS_FILE).write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")

    manifest = {
        "format_version": CACHE_FORMAT_VERSION,
        "org_id": org_id,
        "developers": index,
        "commits_file": CACHE_COMMITS_FILE,
        "report": dict(report or {}),
    }
    (root / CACHE_MANIFEST).write_text(json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Cache gravado em {root}: {len(index)} timelines, {len(lines)} commits")
    return root


def _check_version(path: Path, payload: Any) -> None:
    if not isinstance(payload, dict):
        raise CacheCorruptedError(str(path), "cabeçalho ausente")
    found = payload.get("format_version")
    if found != CACHE_FORMAT_VERSION:
        raise CacheVersionError(str(path), found, CACHE_FORMAT_VERSION)


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise CacheCorruptedError(str(path), "arquivo ausente") from e
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CacheCorruptedError(str(path), f"JSON inválido: {e}") from e


def cache_load(path: str | Path) -> CachedCorpus:
    """
    Carrega um cache gravado por `cache_store`.

    Raises:
        CacheError: Caminho vazio ou inexistente
        CacheVersionError: Versão de formato diferente da suportada
        CacheCorruptedError: Conteúdo ilegível ou incompleto
    """
    if not str(path).strip():
        raise CacheError("<vazio>", "caminho do cache não informado")
    root = Path(path)
    manifest_path = root / CACHE_MANIFEST
    if not manifest_path.is_file():
        raise CacheError(str(root), "manifesto do cache não encontrado")

    manifest = _read_json(manifest_path)
    _check_version(manifest_path, manifest)

    try:
        timelines: dict[str, DeveloperTimeline] = {}
        for entry in manifest["developers"]:
            file_path = root / CACHE_TIMELINES_DIR / entry["file"]
            payload = _read_json(file_path)
            _check_version(file_path, payload)
            timeline = _timeline_from_dict(payload["timeline"])
            timelines[timeline.developer_key] = timeline

        commits_path = root / manifest["commits_file"]
        commits = [
            commit_from_dict(json.loads(line))
            for line in commits_path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    except CacheError:
        raise
    except (KeyError, TypeError, ValueError, OSError, PreconditionError) as e:
        raise CacheCorruptedError(str(root), f"conteúdo inválido: {e}") from e

    logger.info(f"Cache carregado de {root}: {len(timelines)} timelines, {len(commits)} commits")
    return CachedCorpus(
        org_id=manifest.get("org_id", ""),
        timelines=timelines,
        commits=commits,
        report=manifest.get("report", {}),
    )
