"""
Tipos de domínio da ingestão: commits, eventos de colaboração e timelines.

Todos os tipos são imutáveis; depois de `build_timeline` as timelines são
compartilhadas apenas para leitura pelos demais módulos.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum

from config.settings import PASSIVE_KINDS
from core.exceptions import PreconditionError
from core.utils import utc_date


class ActivityCategory(str, Enum):
    """Classificação de uma ação de um desenvolvedor."""

    CODING = "coding"
    NON_CODING = "non_coding"
    PASSIVE = "passive"


class EventKind(str, Enum):
    PR_OPENED = "pr_opened"
    PR_COMMENT = "pr_comment"
    ISSUE_OPENED = "issue_opened"
    ISSUE_COMMENT = "issue_comment"
    ISSUE_ACTION_ACTIVE = "issue_action_active"
    MENTION_RECEIVED = "mention_received"
    ASSIGNMENT_RECEIVED = "assignment_received"
    OTHER_PASSIVE = "other_passive"

    @property
    def is_passive(self) -> bool:
        return self.value in PASSIVE_KINDS

    @property
    def category(self) -> ActivityCategory:
        if self.is_passive:
            return ActivityCategory.PASSIVE
        if self is EventKind.PR_OPENED:
            return ActivityCategory.CODING
        return ActivityCategory.NON_CODING


COMMIT_KIND = "commit"


@dataclass(frozen=True)
class CommitFile:
    path: str
    is_doc: bool
    status: str = "M"


@dataclass(frozen=True)
class CommitRecord:
    """Um commit de um repositório da organização."""

    repo_id: str
    sha: str
    author_key: str
    authored_at: datetime
    files: tuple[CommitFile, ...] = ()
    via_pull_request: bool = False
    author_name: str = ""
    paths_missing: bool = False

    @property
    def is_doc(self) -> bool:
        """Commit só de documentação: todos os caminhos alterados são doc."""
        return bool(self.files) and all(f.is_doc for f in self.files)

    @property
    def authored_day(self) -> date:
        return utc_date(self.authored_at)


@dataclass(frozen=True)
class CollaborationEvent:
    repo_id: str
    actor_key: str
    occurred_at: datetime
    kind: EventKind
    raw_kind: str


@dataclass(frozen=True, order=True)
class ActivityEvent:
    """Ação ativa (commit ou evento não passivo) dentro de uma timeline."""

    occurred_at: datetime
    kind: str
    repo_id: str
    category: ActivityCategory = field(compare=False)

    @property
    def day(self) -> date:
        return utc_date(self.occurred_at)

    @property
    def is_commit(self) -> bool:
        return self.kind == COMMIT_KIND


@dataclass(frozen=True)
class DeveloperTimeline:
    """Sequência de dias de commit e eventos de um desenvolvedor na organização."""

    developer_key: str
    org_id: str
    commit_days: tuple[date, ...]
    activity_events: tuple[ActivityEvent, ...]
    observation_end: datetime

    def __post_init__(self) -> None:
        days = self.commit_days
        if any(a >= b for a, b in zip(days, days[1:], strict=False)):
            raise PreconditionError(
                "DeveloperTimeline", f"commit_days de '{self.developer_key}' não é estritamente crescente"
            )
        late = [e for e in self.activity_events if e.occurred_at > self.observation_end]
        if late:
            raise PreconditionError(
                "DeveloperTimeline",
                f"{len(late)} eventos de '{self.developer_key}' após o fim da observação",
            )
        if any(e.category is ActivityCategory.PASSIVE for e in self.activity_events):
            raise PreconditionError(
                "DeveloperTimeline", f"eventos passivos na timeline de '{self.developer_key}'"
            )

    @property
    def first_day(self) -> date | None:
        return self.commit_days[0] if self.commit_days else None

    @property
    def last_day(self) -> date | None:
        return self.commit_days[-1] if self.commit_days else None

    @property
    def observation_end_day(self) -> date:
        return utc_date(self.observation_end)

    def non_commit_events(self) -> list[ActivityEvent]:
        """Eventos ativos que não são commits; PRs abertos vêm com categoria CODING."""
        return [e for e in self.activity_events if not e.is_commit]
