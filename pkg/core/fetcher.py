"""
Coletor mínimo de eventos públicos da forge.

Busca UMA página de eventos de um repositório e grava no formato de
exportação aceito por `parse_event_stream`. Paginação e limites de taxa
ficam fora do escopo.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import requests

from config.settings import FORGE_API_URL, FORGE_TIMEOUT_SECONDS
from core.exceptions import IngestError
from core.logging_config import get_logger

logger = get_logger("fetcher")


def fetch_repo_events(
    repo: str,
    token: str | None = None,
    session: requests.Session | None = None,
    base_url: str = FORGE_API_URL,
) -> list[dict[str, Any]]:
    """
    Retorna a primeira página de eventos de `owner/repo`.

    Raises:
        IngestError: Falha de rede ou resposta inesperada
    """
    http = session or requests.Session()
    headers = {"Accept": "application/vnd.github+json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    url = f"{base_url.rstrip('/')}/repos/{repo}/events"
    try:
        response = http.get(url, headers=headers, params={"per_page": 100}, timeout=FORGE_TIMEOUT_SECONDS)
        response.raise_for_status()
        payload = response.json()
    except (requests.RequestException, ValueError) as e:
        raise IngestError(url, f"Falha ao buscar eventos: {e}") from e
    if not isinstance(payload, list):
        raise IngestError(url, "Resposta não é uma lista de eventos")
    logger.info(f"{repo}: {len(payload)} eventos recebidos")
    return payload


def to_export_record(event: Mapping[str, Any]) -> dict[str, Any] | None:
    """Reduz um evento da API aos campos da exportação; None se incompleto."""
    actor = event.get("actor") or {}
    repo = event.get("repo") or {}
    payload = event.get("payload") or {}
    record = {
        "repo": repo.get("name") if isinstance(repo, Mapping) else repo,
        "actor": actor.get("login") if isinstance(actor, Mapping) else actor,
        "created_at": event.get("created_at"),
        "type": event.get("type"),
    }
    if not all(record.values()):
        return None
    if isinstance(payload, Mapping) and payload.get("action"):
        record["action"] = payload["action"]
    return record


def write_event_export(events: Iterable[Mapping[str, Any]], file_path: str | Path) -> int:
    """Grava os eventos como ndjson ordenado por data; retorna quantos foram gravados."""
    records = [r for r in (to_export_record(e) for e in events) if r is not None]
    records.sort(key=lambda r: (r["created_at"], r["repo"], r["actor"], r["type"]))
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records),
        encoding="utf-8",
    )
    return len(records)
