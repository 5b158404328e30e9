# tests/test_fetcher.py
"""
Testes para o módulo core.fetcher (sem rede: sessão falsa)
"""

import pytest
import requests

from core.exceptions import IngestError
from core.fetcher import fetch_repo_events, to_export_record, write_event_export
from core.loader import load_text_stream, parse_event_stream
from core.models import EventKind

API_EVENTS = [
    {
        "type": "IssueCommentEvent",
        "actor": {"login": "bia"},
        "repo": {"name": "org/app"},
        "payload": {"action": "created"},
        "created_at": "2021-03-02T10:00:00Z",
    },
    {
        "type": "PullRequestEvent",
        "actor": {"login": "ana"},
        "repo": {"name": "org/app"},
        "payload": {"action": "opened"},
        "created_at": "2021-03-01T10:00:00Z",
    },
    {"type": "WatchEvent", "actor": {}, "repo": {"name": "org/app"}, "created_at": "2021-03-03T10:00:00Z"},
]


class FakeResponse:
    def __init__(self, payload, status: int = 200) -> None:
        self.payload = payload
        self.status = status

    def raise_for_status(self) -> None:
        if self.status >= 400:
            raise requests.HTTPError(f"{self.status} erro")

    def json(self):
        return self.payload


class FakeSession:
    def __init__(self, response: FakeResponse) -> None:
        self.response = response
        self.calls: list[dict] = []

    def get(self, url, headers=None, params=None, timeout=None) -> FakeResponse:
        self.calls.append({"url": url, "headers": headers, "params": params, "timeout": timeout})
        return self.response


class TestFetchRepoEvents:
    """Testes para fetch_repo_events."""

    def test_request(self) -> None:
        """URL, token e tamanho de página."""
        session = FakeSession(FakeResponse(API_EVENTS))
        events = fetch_repo_events("org/app", token="segredo", session=session, base_url="https://forge.test/")
        assert len(events) == 3
        call = session.calls[0]
        assert call["url"] == "https://forge.test/repos/org/app/events"
        assert call["headers"]["Authorization"] == "Bearer segredo"
        assert call["params"] == {"per_page": 100}

    def test_http_error(self) -> None:
        """Erro HTTP vira IngestError."""
        with pytest.raises(IngestError):
            fetch_repo_events("org/app", session=FakeSession(FakeResponse({}, status=404)))

    def test_unexpected_payload(self) -> None:
        """Resposta que não é lista vira IngestError."""
        with pytest.raises(IngestError):
            fetch_repo_events("org/app", session=FakeSession(FakeResponse({"message": "x"})))


class TestExport:
    """Testes para to_export_record e write_event_export."""

    def test_incomplete_event_dropped(self) -> None:
        """Evento sem ator não é exportado."""
        assert to_export_record(API_EVENTS[2]) is None

    def test_export_round_trip_through_parser(self, tmp_path) -> None:
        """A exportação é lida pelo parser de eventos, ordenada por data."""
        path = tmp_path / "events.ndjson"
        assert write_event_export(API_EVENTS, path) == 2
        events = parse_event_stream(load_text_stream(path))
        assert [(e.actor_key, e.kind) for e in events] == [
            ("ana", EventKind.PR_OPENED),
            ("bia", EventKind.ISSUE_COMMENT),
        ]
