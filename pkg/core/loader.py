"""
Módulo responsável pela leitura e parsing dos arquivos de entrada.
Suporta logs de commits (git_log ou ndjson) e exportações de eventos da forge.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import chardet

from config.settings import (
    DEFAULT_DOC_PATTERNS,
    FORGE_EVENT_KINDS,
    GIT_LOG_HEADER_FIELDS,
    GIT_LOG_RECORD_SEPARATOR,
    MAX_FILE_SIZE_MB,
    MAX_MALFORMED_RATIO,
)
from core.exceptions import IngestError, MalformedLogError
from core.logging_config import get_logger
from core.models import CollaborationEvent, CommitFile, CommitRecord, EventKind
from core.utils import matches_any, parse_timestamp

logger = get_logger("loader")

COMMIT_FORMATS = ("git_log", "ndjson")


@dataclass
class IngestReport:
    """Contadores de anomalias encontradas durante a ingestão."""

    records: Counter = field(default_factory=Counter)
    malformed: Counter = field(default_factory=Counter)
    duplicates_dropped: int = 0
    unmapped_event_types: Counter = field(default_factory=Counter)
    unresolved_identities: set[str] = field(default_factory=set)
    paths_missing: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "records": dict(sorted(self.records.items())),
            "malformed": dict(sorted(self.malformed.items())),
            "duplicates_dropped": self.duplicates_dropped,
            "unmapped_event_types": dict(sorted(self.unmapped_event_types.items())),
            "unresolved_identities": sorted(self.unresolved_identities),
            "paths_missing": self.paths_missing,
        }


def validate_file(file_path: str | Path, max_size_mb: int = MAX_FILE_SIZE_MB) -> Path:
    """
    Valida se o arquivo existe e está dentro do tamanho permitido.

    Raises:
        IngestError: Se o arquivo não existir, não for arquivo ou for grande demais
    """
    path = Path(file_path)

    if not path.exists():
        raise IngestError(str(path), "Arquivo não encontrado")

    if not path.is_file():
        raise IngestError(str(path), "Caminho não é um arquivo válido")

    size_mb = path.stat().st_size / (1024 * 1024)
    if size_mb > max_size_mb:
        raise IngestError(str(path), f"Arquivo muito grande: {size_mb:.1f} MB (máximo {max_size_mb} MB)")

    logger.debug(f"Arquivo validado: {path.name} ({size_mb:.2f} MB)")
    return path


def detect_encoding(raw: bytes) -> str:
    """Detecta o encoding de um conteúdo de texto."""
    result = chardet.detect(raw[:4096])
    encoding = result["encoding"] or "utf-8"
    logger.debug(f"Encoding detectado: {encoding}")
    return encoding


def load_text_stream(file_path: str | Path) -> list[str]:
    """
    Lê um arquivo de entrada como linhas UTF-8.

    Raises:
        IngestError: Se o arquivo não puder ser lido ou não for UTF-8
    """
    path = validate_file(file_path)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        guessed = detect_encoding(raw)
        raise IngestError(str(path), f"Conteúdo não decodificável como UTF-8 (parece {guessed})") from e
    return text.splitlines()


def is_doc_path(path: str, patterns: Sequence[str] = DEFAULT_DOC_PATTERNS) -> bool:
    return matches_any(path, patterns)


def _check_malformed(source: str, malformed: int, total: int) -> None:
    if total and malformed / total > MAX_MALFORMED_RATIO:
        raise MalformedLogError(source, malformed, total)
    if malformed:
        logger.warning(f"{source}: {malformed} de {total} registros malformados ignorados")


def _split_git_log(lines: Iterable[str]) -> list[list[str]]:
    chunks: list[list[str]] = []
    current: list[str] = []
    for line in lines:
        if line.strip() == GIT_LOG_RECORD_SEPARATOR:
            if current:
                chunks.append(current)
            current = []
        elif line.strip():
            current.append(line.rstrip("\r\n"))
    if current:
        chunks.append(current)
    return chunks


def _parse_git_log_chunk(
    chunk: list[str], repo_id: str, doc_patterns: Sequence[str]
) -> CommitRecord | None:
    header = chunk[0].split("|")
    if len(header) < GIT_LOG_HEADER_FIELDS:
        return None
    sha = header[0].strip()
    email = header[-2].strip().lower()
    name = "|".join(header[1:-2]).strip()
    if not sha or not (email or name):
        return None
    try:
        authored_at = parse_timestamp(header[-1])
    except (ValueError, OverflowError):
        return None

    files = []
    for line in chunk[1:]:
        parts = line.split("\t")
        if len(parts) < 2 or not parts[0].strip():
            return None
        status = parts[0].strip()[0].upper()
        # Renomeações/cópias: "R100\tantigo\tnovo" -> usa o caminho novo
        path = parts[-1].strip()
        files.append(CommitFile(path=path, is_doc=is_doc_path(path, doc_patterns), status=status))

    return CommitRecord(
        repo_id=repo_id,
        sha=sha,
        author_key=email or name.lower(),
        authored_at=authored_at,
        files=tuple(files),
        author_name=name,
        paths_missing=not files,
    )


def _parse_ndjson_commit(
    obj: Mapping[str, Any], repo_id: str, doc_patterns: Sequence[str]
) -> CommitRecord | None:
    sha = str(obj.get("sha") or "").strip()
    email = str(obj.get("author_email") or obj.get("author") or "").strip().lower()
    name = str(obj.get("author_name") or "").strip()
    when = obj.get("authored_at") or obj.get("date")
    if not sha or not (email or name) or not when:
        return None
    try:
        authored_at = parse_timestamp(str(when))
    except (ValueError, OverflowError):
        return None

    files = []
    for entry in obj.get("files") or []:
        if isinstance(entry, Mapping):
            path = str(entry.get("path") or "").strip()
            status = str(entry.get("status") or "M").strip()[:1].upper() or "M"
        else:
            path, status = str(entry).strip(), "M"
        if not path:
            return None
        files.append(CommitFile(path=path, is_doc=is_doc_path(path, doc_patterns), status=status))

    return CommitRecord(
        repo_id=str(obj.get("repo") or repo_id),
        sha=sha,
        author_key=email or name.lower(),
        authored_at=authored_at,
        files=tuple(files),
        via_pull_request=bool(obj.get("via_pull_request", False)),
        author_name=name,
        paths_missing=not files,
    )


def parse_commit_log(
    stream: Iterable[str],
    fmt: str = "git_log",
    repo_id: str = "",
    doc_patterns: Sequence[str] = DEFAULT_DOC_PATTERNS,
    source: str = "<stream>",
    report: IngestReport | None = None,
) -> list[CommitRecord]:
    """
    Converte um log de commits em registros `CommitRecord`.

    Args:
        stream: Linhas do log
        fmt: "git_log" (name-status com separador "@@@") ou "ndjson"
        repo_id: Repositório de origem (no ndjson, o campo "repo" tem prioridade)
        doc_patterns: Padrões de arquivos de documentação
        source: Nome da fonte usado em mensagens
        report: Acumulador opcional de anomalias

    Raises:
        IngestError: Formato desconhecido
        MalformedLogError: Mais de 10% de registros malformados
    """
    if fmt not in COMMIT_FORMATS:
        raise IngestError(source, f"Formato '{fmt}' não suportado; use {', '.join(COMMIT_FORMATS)}")

    commits: list[CommitRecord] = []
    malformed = 0
    total = 0

    if fmt == "git_log":
        for chunk in _split_git_log(stream):
            total += 1
            record = _parse_git_log_chunk(chunk, repo_id, doc_patterns)
            if record is None:
                malformed += 1
                logger.debug(f"{source}: registro malformado: {chunk[0][:80]!r}")
                continue
            commits.append(record)
    else:
        for line in stream:
            if not line.strip():
                continue
            total += 1
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                obj = None
            record = _parse_ndjson_commit(obj, repo_id, doc_patterns) if isinstance(obj, dict) else None
            if record is None:
                malformed += 1
                continue
            commits.append(record)

    _check_malformed(source, malformed, total)
    if report is not None:
        report.records[source] += len(commits)
        report.malformed[source] += malformed
        report.paths_missing += sum(1 for c in commits if c.paths_missing)

    logger.info(f"{source}: {len(commits)} commits lidos")
    return commits


def map_event_kind(
    raw_type: str, action: str | None = None, mapping: Mapping[str, str] = FORGE_EVENT_KINDS
) -> EventKind | None:
    """Converte o tipo de evento da forge no enum de kinds; None se desconhecido."""
    if action:
        mapped = mapping.get(f"{raw_type}:{action}")
        if mapped:
            return EventKind(mapped)
    mapped = mapping.get(raw_type)
    if mapped:
        return EventKind(mapped)
    try:
        return EventKind(raw_type)
    except ValueError:
        return None


def parse_event_stream(
    stream: Iterable[str],
    mapping: Mapping[str, str] = FORGE_EVENT_KINDS,
    source: str = "<stream>",
    report: IngestReport | None = None,
) -> list[CollaborationEvent]:
    """
    Converte uma exportação de eventos (ndjson com repo, actor, created_at, type).

    Tipos ausentes da tabela são tratados como `other_passive`.

    Raises:
        MalformedLogError: Mais de 10% de registros malformados
    """
    events: list[CollaborationEvent] = []
    malformed = 0
    total = 0
    unmapped: Counter = Counter()

    for line in stream:
        if not line.strip():
            continue
        total += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            malformed += 1
            continue
        if not isinstance(obj, dict):
            malformed += 1
            continue

        actor = obj.get("actor")
        if isinstance(actor, Mapping):
            actor = actor.get("login")
        repo = obj.get("repo")
        if isinstance(repo, Mapping):
            repo = repo.get("name")
        raw_type = str(obj.get("type") or "").strip()
        if not actor or not repo or not raw_type or not obj.get("created_at"):
            malformed += 1
            continue
        try:
            occurred_at = parse_timestamp(str(obj["created_at"]))
        except (ValueError, OverflowError):
            malformed += 1
            continue

        action = obj.get("action")
        if action is None and isinstance(obj.get("payload"), Mapping):
            action = obj["payload"].get("action")
        kind = map_event_kind(raw_type, action, mapping)
        if kind is None:
            unmapped[raw_type] += 1
            kind = EventKind.OTHER_PASSIVE

        raw_kind = f"{raw_type}:{action}" if action else raw_type
        events.append(
            CollaborationEvent(
                repo_id=str(repo),
                actor_key=str(actor).strip().lower(),
                occurred_at=occurred_at,
                kind=kind,
                raw_kind=raw_kind,
            )
        )

    _check_malformed(source, malformed, total)
    if unmapped:
        logger.warning(f"{source}: tipos de evento sem mapeamento tratados como passivos: {dict(unmapped)}")
    if report is not None:
        report.records[source] += len(events)
        report.malformed[source] += malformed
        report.unmapped_event_types.update(unmapped)

    logger.info(f"{source}: {len(events)} eventos lidos")
    return events


def deduplicate_commits(
    commits: Iterable[CommitRecord], report: IngestReport | None = None
) -> list[CommitRecord]:
    """Remove commits repetidos por (repo_id, sha); a primeira ocorrência vence."""
    seen: set[tuple[str, str]] = set()
    unique: list[CommitRecord] = []
    dropped = 0
    for commit in commits:
        key = (commit.repo_id, commit.sha)
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        unique.append(commit)
    if report is not None:
        report.duplicates_dropped += dropped
    if dropped:
        logger.debug(f"{dropped} commits duplicados descartados")
    return unique
