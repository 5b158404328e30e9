"""
Identificação de core developers de cada projeto.

Dois métodos:

1. Truck Factor: calcula o grau de autoria (DOA) de cada desenvolvedor em
   cada arquivo de código, define os autores de cada arquivo e remove,
   gulosamente, o desenvolvedor com mais arquivos até que mais da metade dos
   arquivos fique sem autor. Os removidos formam o conjunto TF.

   DOA = 3.293 + 1.098 * FA + 0.164 * DL - 0.321 * ln(1 + AC)

   - FA = 1 se o desenvolvedor criou o arquivo, senão 0
   - DL = número de alterações do desenvolvedor no arquivo
   - AC = número de alterações dos demais desenvolvedores

   Um desenvolvedor é autor quando DOA normalizado (DOA / maior DOA do
   arquivo) > 0.75 e DOA absoluto >= 3.293.

2. Heurística baseada em commits (CBH): menor grupo dos maiores
   committers que soma ao menos 80% dos commits.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import pandas as pd

from config.settings import (
    CBH_THRESHOLD,
    DOA_ABSOLUTE_MIN,
    DOA_ACCEPTANCES,
    DOA_DELIVERIES,
    DOA_FIRST_AUTHOR,
    DOA_INTERCEPT,
    DOA_NORMALIZED_MIN,
    TF_ORPHAN_SHARE,
)
from core.exceptions import ConfigError, EmptyProjectError
from core.logging_config import get_logger
from core.models import CommitRecord

logger = get_logger("core_devs")


class CoreMethod(str, Enum):
    TRUCK_FACTOR = "truck_factor"
    COMMIT_BASED = "commit_based"


@dataclass(frozen=True)
class CoreDevSet:
    project_id: str
    method: CoreMethod
    members: tuple[str, ...]
    coverage: float
    overridden: bool = False


def _project_of(commits: Sequence[CommitRecord]) -> str:
    repos = sorted({c.repo_id for c in commits})
    return repos[0] if len(repos) == 1 else ",".join(repos)


def commit_based_core(
    commits: Sequence[CommitRecord],
    threshold: float = CBH_THRESHOLD,
    include_docs: bool = False,
    resolve: Callable[[str], str] | None = None,
) -> CoreDevSet:
    """
    Menor prefixo dos maiores committers cuja fatia acumulada atinge `threshold`.

    Empates com o último membro na contagem de commits também entram.

    Args:
        commits: Commits do projeto
        threshold: Fração em (0, 1]
        include_docs: Conta commits só de documentação
        resolve: Converte a chave do autor na chave canônica (padrão: identidade)

    Raises:
        ConfigError: threshold fora de (0, 1]
        EmptyProjectError: Nenhum commit contável
    """
    if not 0 < threshold <= 1:
        raise ConfigError("threshold", f"{threshold} fora de (0, 1]")
    project = _project_of(commits) if commits else "<vazio>"
    resolve = resolve or (lambda key: key)

    counts = Counter(resolve(c.author_key) for c in commits if include_docs or not c.is_doc)
    total = sum(counts.values())
    if total == 0:
        raise EmptyProjectError(project)

    target = Fraction(str(threshold)) * total
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))

    members: list[str] = []
    cumulative = 0
    for dev, count in ranked:
        if cumulative >= target and count < counts[members[-1]]:
            break
        members.append(dev)
        cumulative += count

    return CoreDevSet(
        project_id=project,
        method=CoreMethod.COMMIT_BASED,
        members=tuple(members),
        coverage=cumulative / total,
    )


def degree_of_authorship(first_author: bool, deliveries: int, acceptances: int) -> float:
    return (
        DOA_INTERCEPT
        + DOA_FIRST_AUTHOR * (1 if first_author else 0)
        + DOA_DELIVERIES * deliveries
        - DOA_ACCEPTANCES * math.log(1 + acceptances)
    )


def file_authors(
    commits: Sequence[CommitRecord], resolve: Callable[[str], str] | None = None
) -> dict[str, set[str]]:
    """
    Autores de cada arquivo de código ainda existente no fim do histórico.

    Arquivos de documentação são ignorados.
    """
    resolve = resolve or (lambda key: key)
    creator: dict[str, str] = {}
    changes: dict[str, Counter] = defaultdict(Counter)
    deleted: set[str] = set()

    for commit in sorted(commits, key=lambda c: (c.authored_at, c.sha)):
        dev = resolve(commit.author_key)
        for f in commit.files:
            if f.is_doc:
                continue
            if f.status == "D":
                deleted.add(f.path)
                continue
            deleted.discard(f.path)
            creator.setdefault(f.path, dev)
            changes[f.path][dev] += 1

    authors: dict[str, set[str]] = {}
    for path in sorted(changes):
        if path in deleted:
            continue
        per_dev = changes[path]
        total = sum(per_dev.values())
        doas = {
            dev: degree_of_authorship(dev == creator[path], n, total - n) for dev, n in per_dev.items()
        }
        top = max(doas.values())
        authors[path] = {
            dev for dev, doa in doas.items() if doa / top > DOA_NORMALIZED_MIN and doa >= DOA_ABSOLUTE_MIN
        }
    return authors


def truck_factor(
    commits: Sequence[CommitRecord], resolve: Callable[[str], str] | None = None
) -> CoreDevSet:
    """
    Conjunto Truck Factor por remoção gulosa de autores.

    Raises:
        EmptyProjectError: Projeto sem arquivos de código
    """
    project = _project_of(commits) if commits else "<vazio>"
    authors = file_authors(commits, resolve)
    if not authors:
        raise EmptyProjectError(project, "nenhum arquivo que não seja documentação")

    n_files = len(authors)
    remaining = {path: set(devs) for path, devs in authors.items()}
    removed: list[str] = []

    def orphaned() -> int:
        return sum(1 for devs in remaining.values() if not devs)

    while orphaned() / n_files <= TF_ORPHAN_SHARE:
        load = Counter(dev for devs in remaining.values() for dev in devs)
        if not load:
            break
        top = min(load.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        removed.append(top)
        for devs in remaining.values():
            devs.discard(top)

    coverage = orphaned() / n_files
    logger.debug(f"{project}: TF={len(removed)} ({coverage:.0%} dos arquivos órfãos)")
    return CoreDevSet(
        project_id=project,
        method=CoreMethod.TRUCK_FACTOR,
        members=tuple(removed),
        coverage=coverage,
    )


def apply_override(core: CoreDevSet, overrides: Mapping[str, Sequence[str]]) -> CoreDevSet:
    """Substitui os membros de um projeto por uma lista revisada manualmente."""
    if core.project_id not in overrides:
        return core
    members = tuple(overrides[core.project_id])
    logger.info(f"{core.project_id}: membros {core.method.value} substituídos manualmente ({len(members)})")
    return CoreDevSet(core.project_id, core.method, members, core.coverage, overridden=True)


def group_by_project(commits: Iterable[CommitRecord]) -> dict[str, list[CommitRecord]]:
    projects: dict[str, list[CommitRecord]] = defaultdict(list)
    for commit in commits:
        projects[commit.repo_id].append(commit)
    return dict(sorted(projects.items()))


def core_summary(
    commits: Iterable[CommitRecord],
    threshold: float = CBH_THRESHOLD,
    include_docs: bool = False,
    overrides: Mapping[str, Sequence[str]] | None = None,
    resolve: Callable[[str], str] | None = None,
) -> tuple[pd.DataFrame, list[CoreDevSet]]:
    """
    Tabela por projeto com desenvolvedores, TF, core e % de TF contido no core.

    Returns:
        (tabela, conjuntos calculados para os dois métodos)
    """
    resolve = resolve or (lambda key: key)
    rows = []
    sets: list[CoreDevSet] = []
    for project, project_commits in group_by_project(commits).items():
        try:
            tf = apply_override(truck_factor(project_commits, resolve), overrides or {})
        except EmptyProjectError as e:
            logger.warning(str(e))
            tf = CoreDevSet(project, CoreMethod.TRUCK_FACTOR, (), 0.0)
        try:
            cbh = commit_based_core(project_commits, threshold, include_docs, resolve)
        except EmptyProjectError as e:
            logger.warning(str(e))
            cbh = CoreDevSet(project, CoreMethod.COMMIT_BASED, (), 0.0)
        sets.extend([tf, cbh])

        in_core = len(set(tf.members) & set(cbh.members))
        rows.append(
            {
                "project": project,
                "devs": len({resolve(c.author_key) for c in project_commits}),
                "tf": len(tf.members),
                "core": len(cbh.members),
                "pct_tf_in_core": round(100 * in_core / len(tf.members), 2) if tf.members else float("nan"),
            }
        )

    columns = ["project", "devs", "tf", "core", "pct_tf_in_core"]
    return pd.DataFrame(rows, columns=columns), sets
