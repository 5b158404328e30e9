# tests/conftest.py
"""
Configurações e fixtures compartilhadas para os testes.
"""

from collections.abc import Callable, Iterable
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import pytest

from core.models import COMMIT_KIND, ActivityCategory, ActivityEvent, DeveloperTimeline, EventKind


def at_noon(day: date, hour: int = 12) -> datetime:
    return datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc)


def build_event(day: date, kind: EventKind = EventKind.ISSUE_COMMENT, repo: str = "org/repo") -> ActivityEvent:
    """Evento ativo não-commit em um dia (padrão: comentário em issue)."""
    return ActivityEvent(occurred_at=at_noon(day, 15), kind=kind.value, repo_id=repo, category=kind.category)


def build_timeline(
    days: Iterable[date],
    event_days: Iterable[date] = (),
    end: date | None = None,
    key: str = "dev@org.io",
    org: str = "org",
    pr_days: Iterable[date] = (),
) -> DeveloperTimeline:
    """
    Monta uma timeline a partir de dias de commit, dias de eventos e dias de PR aberto.

    O fim da observação é o último dia de commit, salvo indicação contrária.
    """
    commit_days = tuple(sorted(set(days)))
    commits = [ActivityEvent(at_noon(d), COMMIT_KIND, f"{org}/repo", ActivityCategory.CODING) for d in commit_days]
    events = [build_event(d, repo=f"{org}/repo") for d in event_days]
    events += [build_event(d, EventKind.PR_OPENED, repo=f"{org}/repo") for d in pr_days]
    last = end or (commit_days[-1] if commit_days else date(2020, 1, 1))
    return DeveloperTimeline(
        developer_key=key,
        org_id=org,
        commit_days=commit_days,
        activity_events=tuple(sorted(commits + events)),
        observation_end=datetime(last.year, last.month, last.day, 23, 59, 59, tzinfo=timezone.utc),
    )


def days_from_pauses(start: date, pauses: Iterable[int]) -> list[date]:
    """Dias de commit a partir de um dia inicial e da sequência de pausas."""
    days = [start]
    for p in pauses:
        days.append(days[-1] + timedelta(days=p))
    return days


@pytest.fixture
def make_event() -> Callable[..., ActivityEvent]:
    return build_event


@pytest.fixture
def make_timeline() -> Callable[..., DeveloperTimeline]:
    return build_timeline


@pytest.fixture
def weekly_days() -> Callable[..., list[date]]:
    """Dias de commit com ritmo fixo de `step` dias."""

    def _make(start: date, count: int, step: int = 7) -> list[date]:
        return [start + timedelta(days=step * i) for i in range(count)]

    return _make


@pytest.fixture
def git_log_text() -> Callable[..., str]:
    """
    Gera um log no formato `git log --name-status` com o separador "@@@".

    Cada commit é (sha, nome, email, data ISO, [(status, caminho), ...]).
    """

    def _make(commits: Iterable[tuple[str, str, str, str, list[tuple[str, str]]]]) -> str:
        chunks = []
        for sha, name, email, when, files in commits:
            lines = ["@@@", f"{sha}|{name}|{email}|{when}"]
            lines += [f"{status}\t{path}" for status, path in files]
            chunks.append("\n".join(lines))
        return "\n".join(chunks) + "\n"

    return _make


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    """Grava um arquivo de texto UTF-8 no diretório temporário."""

    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        return path

    return _write
