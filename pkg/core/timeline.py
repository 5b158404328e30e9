"""Construção das timelines de desenvolvedores no nível da organização."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from datetime import datetime

from core.exceptions import PreconditionError
from core.identity import IdentityMap
from core.loader import IngestReport, deduplicate_commits
from core.logging_config import get_logger
from core.models import (
    COMMIT_KIND,
    ActivityCategory,
    ActivityEvent,
    CollaborationEvent,
    CommitRecord,
    DeveloperTimeline,
)
from core.utils import to_utc

logger = get_logger("timeline")


def _check_org(repo_id: str, org: str) -> None:
    if "/" in repo_id and repo_id.split("/", 1)[0].casefold() != org.casefold():
        raise PreconditionError("build_timeline", f"repositório '{repo_id}' não pertence à organização '{org}'")


def build_timeline(
    commits: Iterable[CommitRecord],
    events: Iterable[CollaborationEvent],
    ids: IdentityMap,
    org: str,
    cutoff: datetime,
    report: IngestReport | None = None,
) -> dict[str, DeveloperTimeline]:
    """
    Materializa uma timeline por desenvolvedor com todos os repositórios da organização.

    Commits viram dias de commit (data UTC, sem repetição) e atividades de
    código; PRs abertos contam como código; eventos passivos são descartados.
    Registros posteriores ao `cutoff` ficam fora da observação.

    Returns:
        Mapa chave do desenvolvedor -> timeline, em ordem de chave
    """
    cutoff = to_utc(cutoff)
    days: dict[str, set] = defaultdict(set)
    activity: dict[str, set[ActivityEvent]] = defaultdict(set)
    seen: set[str] = set()
    unresolved: set[str] = set()
    late = 0

    for commit in deduplicate_commits(commits, report):
        _check_org(commit.repo_id, org)
        key, ok = ids.resolve(commit.author_key, commit.author_name)
        if not ok:
            unresolved.add(key)
        seen.add(key)
        if commit.authored_at > cutoff:
            late += 1
            continue
        days[key].add(commit.authored_day)
        activity[key].add(
            ActivityEvent(
                occurred_at=commit.authored_at,
                kind=COMMIT_KIND,
                repo_id=commit.repo_id,
                category=ActivityCategory.CODING,
            )
        )

    for event in events:
        _check_org(event.repo_id, org)
        key, ok = ids.resolve(event.actor_key)
        if not ok:
            unresolved.add(key)
        seen.add(key)
        if event.kind.is_passive:
            continue
        if event.occurred_at > cutoff:
            late += 1
            continue
        activity[key].add(
            ActivityEvent(
                occurred_at=event.occurred_at,
                kind=event.kind.value,
                repo_id=event.repo_id,
                category=event.kind.category,
            )
        )

    if late:
        logger.debug(f"{late} registros após o corte {cutoff.isoformat()} ignorados")
    if unresolved:
        logger.warning(f"{len(unresolved)} identidades sem alias; usando a chave bruta")
        if report is not None:
            report.unresolved_identities.update(unresolved)

    timelines = {
        key: DeveloperTimeline(
            developer_key=key,
            org_id=org,
            commit_days=tuple(sorted(days[key])),
            activity_events=tuple(sorted(activity[key])),
            observation_end=cutoff,
        )
        for key in sorted(seen)
    }
    logger.info(f"{len(timelines)} timelines construídas para '{org}'")
    return timelines
