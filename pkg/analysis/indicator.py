# analysis/indicator.py
"""Indicadores agregados a partir das traces de ciclo de vida."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
import pandas as pd

from analysis.lifecycle import STATE_ORDER, LifecycleTrace, State
from analysis.statistics import (
    Alternative,
    OddsRatioResult,
    PairedTestResult,
    check_logit_agreement,
    odds_ratio_from_table,
    wilcoxon_holm_cliffs,
)
from core.exceptions import ConsistencyError, PreconditionError
from core.logging_config import get_logger
from core.models import CommitRecord

logger = get_logger("indicator")

SelfLoopMode = Literal["pauses", "boundaries"]
AGGREGATE_SCOPE = "aggregate"

# Estados que contam como break
BREAK_STATES: tuple[State, ...] = (State.ACTIVE_NON_CODING, State.INACTIVE, State.GONE)
# Estados com estatística de duração (gone fica de fora)
DURATION_STATES: tuple[State, ...] = (State.ACTIVE_NON_CODING, State.INACTIVE)

_INDEX = {state: i for i, state in enumerate(STATE_ORDER)}


def group_by_org(traces: Iterable[LifecycleTrace]) -> dict[str, list[LifecycleTrace]]:
    groups: dict[str, list[LifecycleTrace]] = defaultdict(list)
    for trace in traces:
        groups[trace.org_id].append(trace)
    return {org: sorted(groups[org], key=lambda t: t.developer_key) for org in sorted(groups)}


def _gone_at_cutoff(trace: LifecycleTrace) -> bool:
    final = trace.final_segment
    return final.state is State.GONE and final.ongoing


# ============================================================================
# Frequência de breaks
# ============================================================================


def break_frequency(traces: Iterable[LifecycleTrace]) -> pd.DataFrame:
    """
    Por organização: quantos desenvolvedores passaram por cada estado de break.

    Inclui os que estavam gone no fim da observação e as porcentagens sobre o
    total de desenvolvedores da organização.
    """
    rows = []
    for org, group in group_by_org(traces).items():
        total = len(group)
        row: dict = {"org": org, "devs": total}
        for state in BREAK_STATES:
            row[state.value] = sum(1 for t in group if t.ever(state))
        row["gone_at_cutoff"] = sum(1 for t in group if _gone_at_cutoff(t))
        for key in [s.value for s in BREAK_STATES] + ["gone_at_cutoff"]:
            row[f"pct_{key}"] = round(100 * row[key] / total, 2)
        rows.append(row)

    columns = ["org", "devs", *[s.value for s in BREAK_STATES], "gone_at_cutoff"]
    columns += [f"pct_{c}" for c in columns[2:]]
    return pd.DataFrame(rows, columns=columns)


def break_rates(traces: Iterable[LifecycleTrace]) -> pd.DataFrame:
    """Número de breaks por estado de cada desenvolvedor, absoluto e por ano de projeto."""
    rows = []
    for org, group in group_by_org(traces).items():
        for trace in group:
            years = trace.years_in_project
            row: dict = {"org": org, "developer": trace.developer_key, "years": round(years, 4)}
            for state in BREAK_STATES:
                count = len(trace.segments_in(state))
                row[state.value] = count
                row[f"{state.value}_per_year"] = count / years
            rows.append(row)
    columns = ["org", "developer", "years"]
    for state in BREAK_STATES:
        columns += [state.value, f"{state.value}_per_year"]
    return pd.DataFrame(rows, columns=columns)


def break_rate_summary(rates: pd.DataFrame) -> pd.DataFrame:
    """Média, mediana e desvio padrão populacional das taxas anuais por organização."""
    rows = []
    for org, group in rates.groupby("org", sort=True):
        for state in BREAK_STATES:
            values = group[f"{state.value}_per_year"].to_numpy(dtype=float)
            rows.append(
                {
                    "org": org,
                    "state": state.value,
                    "mean": float(np.mean(values)),
                    "median": float(np.median(values)),
                    "sd_population": float(np.std(values, ddof=0)),
                }
            )
    return pd.DataFrame(rows, columns=["org", "state", "mean", "median", "sd_population"])


# ============================================================================
# Duração dos breaks
# ============================================================================


def _completed_lengths(trace: LifecycleTrace, state: State) -> list[int]:
    return [s.length_days for s in trace.segments_in(state) if not s.ongoing]


def break_durations(traces: Iterable[LifecycleTrace]) -> pd.DataFrame:
    """
    Distribuição das durações (dias) de breaks non-coding e inactive por organização.

    Segmentos gone e segmentos em andamento ficam de fora. Grupos vazios não
    geram linha. O desvio padrão é populacional.
    """
    rows = []
    for org, group in group_by_org(traces).items():
        for state in DURATION_STATES:
            lengths = [n for t in group for n in _completed_lengths(t, state)]
            if not lengths:
                continue
            values = np.asarray(lengths, dtype=float)
            rows.append(
                {
                    "org": org,
                    "state": state.value,
                    "n": len(values),
                    "mean": float(np.mean(values)),
                    "median": float(np.median(values)),
                    "sd_population": float(np.std(values, ddof=0)),
                }
            )
    return pd.DataFrame(rows, columns=["org", "state", "n", "mean", "median", "sd_population"])


def paired_break_medians(traces: Iterable[LifecycleTrace]) -> dict[str, list[tuple[float, float]]]:
    """(mediana non-coding, mediana inactive) dos desenvolvedores que passaram pelos dois estados."""
    pairs: dict[str, list[tuple[float, float]]] = {}
    for org, group in group_by_org(traces).items():
        pairs[org] = []
        for trace in group:
            nc = _completed_lengths(trace, State.ACTIVE_NON_CODING)
            ina = _completed_lengths(trace, State.INACTIVE)
            if nc and ina:
                pairs[org].append((float(np.median(nc)), float(np.median(ina))))
    return pairs


def duration_tests(
    traces: Sequence[LifecycleTrace], alternative: Alternative = "two-sided"
) -> list[PairedTestResult]:
    """Wilcoxon + Holm + Cliff por organização, com as contagens de desenvolvedores por estado."""
    results = wilcoxon_holm_cliffs(paired_break_medians(traces), alternative)
    groups = group_by_org(traces)
    enriched = []
    for result in results:
        group = groups.get(result.org, [])
        enriched.append(
            replace(
                result,
                n_noncoding=sum(1 for t in group if _completed_lengths(t, State.ACTIVE_NON_CODING)),
                n_inactive=sum(1 for t in group if _completed_lengths(t, State.INACTIVE)),
            )
        )
    return enriched


# ============================================================================
# Matrizes de transição
# ============================================================================


@dataclass(frozen=True)
class TransitionMatrix:
    """Contagens 4x4 de transições (linhas = origem) na ordem A, N, I, G."""

    scope: str
    counts: np.ndarray
    mode: SelfLoopMode = "pauses"

    @property
    def probs(self) -> np.ndarray:
        totals = self.counts.sum(axis=1, keepdims=True)
        # Linhas sem saída ficam zeradas
        return self.counts / np.where(totals > 0, totals, 1)

    @property
    def zero_rows(self) -> list[State]:
        """Estados sem nenhuma transição de saída."""
        return [state for state, total in zip(STATE_ORDER, self.counts.sum(axis=1), strict=True) if total == 0]

    def merge(self, other: TransitionMatrix, scope: str | None = None) -> TransitionMatrix:
        if self.mode != other.mode:
            raise PreconditionError("TransitionMatrix.merge", f"modos diferentes: {self.mode} e {other.mode}")
        return TransitionMatrix(scope or self.scope, self.counts + other.counts, self.mode)

    def to_frame(self) -> pd.DataFrame:
        labels = [s.value for s in STATE_ORDER]
        return pd.DataFrame(self.probs, index=labels, columns=labels)

    def to_edge_list(self) -> pd.DataFrame:
        """Arestas (from, to, count, probability) com contagem positiva."""
        probs = self.probs
        rows = [
            {
                "scope": self.scope,
                "from": src.value,
                "to": dst.value,
                "count": int(self.counts[i, j]),
                "probability": float(probs[i, j]),
            }
            for i, src in enumerate(STATE_ORDER)
            for j, dst in enumerate(STATE_ORDER)
            if self.counts[i, j] > 0
        ]
        return pd.DataFrame(rows, columns=["scope", "from", "to", "count", "probability"])


def transition_counts(trace: LifecycleTrace, mode: SelfLoopMode = "pauses") -> np.ndarray:
    """
    Contagens 4x4 de uma trace.

    No modo "pauses" cada pausa que não virou break soma um auto-laço
    active_coding, e uma trace que termina em gone em andamento soma um
    auto-laço gone. No modo "boundaries" só as fronteiras entre segmentos contam.
    """
    if mode not in ("pauses", "boundaries"):
        raise PreconditionError("transition_counts", f"modo de auto-laço desconhecido: {mode}")
    counts = np.zeros((4, 4), dtype=np.int64)
    for t in trace.transitions:
        counts[_INDEX[t.from_state], _INDEX[t.to_state]] += 1
    if mode == "pauses":
        counts[_INDEX[State.ACTIVE_CODING], _INDEX[State.ACTIVE_CODING]] += trace.coding_pauses
        if _gone_at_cutoff(trace):
            counts[_INDEX[State.GONE], _INDEX[State.GONE]] += 1
    return counts


def transition_matrix(
    traces: Iterable[LifecycleTrace], scope: str = AGGREGATE_SCOPE, mode: SelfLoopMode = "pauses"
) -> TransitionMatrix:
    """
    Matriz de transição de um escopo (organização ou agregado).

    Raises:
        ConsistencyError: Linha não nula que não soma 1
    """
    counts = np.zeros((4, 4), dtype=np.int64)
    for trace in traces:
        counts += transition_counts(trace, mode)
    matrix = TransitionMatrix(scope, counts, mode)

    row_sums = matrix.probs.sum(axis=1)
    for state, total, mass in zip(STATE_ORDER, counts.sum(axis=1), row_sums, strict=True):
        if total > 0 and abs(mass - 1) > 1e-9:
            raise ConsistencyError("transition_matrix", f"linha {state.value} soma {mass}")
    if matrix.zero_rows:
        logger.debug(f"{scope}: estados sem saída {[s.value for s in matrix.zero_rows]}")
    return matrix


def transition_matrices(
    traces: Sequence[LifecycleTrace], mode: SelfLoopMode = "pauses"
) -> dict[str, TransitionMatrix]:
    """Uma matriz por organização e uma agregada, nessa ordem."""
    matrices = {org: transition_matrix(group, org, mode) for org, group in group_by_org(traces).items()}
    matrices[AGGREGATE_SCOPE] = transition_matrix(traces, AGGREGATE_SCOPE, mode)
    return matrices


# ============================================================================
# Odds ratio por nível de contribuição
# ============================================================================


@dataclass(frozen=True)
class ContributionRecord:
    developer_key: str
    project_id: str
    share: float
    ever_gone: bool


def contribution_records(
    traces: Iterable[LifecycleTrace],
    commits: Iterable[CommitRecord],
    members: Mapping[str, Sequence[str]] | None = None,
    resolve: Callable[[str], str] | None = None,
) -> list[ContributionRecord]:
    """
    Fatia de commits de cada desenvolvedor em cada projeto e se ele já esteve gone.

    Args:
        members: projeto -> desenvolvedores considerados (padrão: todos com trace)
    """
    resolve = resolve or (lambda key: key)
    gone = {t.developer_key: t.ever(State.GONE) for t in traces}
    per_project: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for commit in commits:
        per_project[commit.repo_id][resolve(commit.author_key)] += 1

    records = []
    for project in sorted(per_project):
        counts = per_project[project]
        total = sum(counts.values())
        allowed = set(members[project]) if members is not None and project in members else None
        for dev in sorted(counts):
            if dev not in gone or (allowed is not None and dev not in allowed):
                continue
            records.append(ContributionRecord(dev, project, counts[dev] / total, gone[dev]))
    return records


def contribution_bins(records: Sequence[ContributionRecord]) -> list[tuple[ContributionRecord, bool]]:
    """Marca cada registro como high (fatia acima da mediana do projeto) ou low."""
    shares: dict[str, list[float]] = defaultdict(list)
    for r in records:
        shares[r.project_id].append(r.share)
    medians = {project: float(np.median(values)) for project, values in shares.items()}
    return [(r, r.share > medians[r.project_id]) for r in records]


def gone_odds_ratio(records: Sequence[ContributionRecord]) -> OddsRatioResult:
    """
    Odds de já ter ficado gone: desenvolvedores high contra low.

    Raises:
        PreconditionError: Algum dos grupos está vazio
        ConsistencyError: OR da tabela e da regressão logística divergem
    """
    binned = contribution_bins(records)
    a = sum(1 for r, high in binned if high and r.ever_gone)
    b = sum(1 for r, high in binned if high and not r.ever_gone)
    c = sum(1 for r, high in binned if not high and r.ever_gone)
    d = sum(1 for r, high in binned if not high and not r.ever_gone)
    if a + b == 0 or c + d == 0:
        raise PreconditionError("gone_odds_ratio", f"grupo vazio (high={a + b}, low={c + d})")

    result = check_logit_agreement(odds_ratio_from_table(a, b, c, d, n=len(binned)))
    logger.info(
        f"OR(high vs low)={result.or_value:.3f} IC95%=[{result.ci_low:.3f}, {result.ci_high:.3f}] n={result.n}"
    )
    return result
