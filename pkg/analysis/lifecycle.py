"""
Rotulagem do ciclo de vida: estados e transições de cada desenvolvedor.

Cada break detectado é segmentado usando os eventos de colaboração ativos
que caem dentro dele. A cadeia de pontos {início} + eventos + {fim} é
percorrida: intervalos até o limiar do break viram `active_non_coding`,
intervalos maiores viram `inactive`. Um trecho inativo que atinge
`dt_gone_days` é dividido em `inactive` (os primeiros `dt_gone_days` dias) e
`gone` (o restante).

PRs abertos são atividade de código: partem o break nos dias em que
acontecem, e o dia do PR é `active_coding`.

O tempo fora dos breaks é `active_coding`. O silêncio entre o último dia de
commit e o fim da observação segue as mesmas regras, com o último segmento
marcado como `ongoing` (censura à direita).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum
from fractions import Fraction

from analysis.rhythm import DetectedBreak, DetectorConfig, closing_threshold
from config.settings import GONE_DAYS
from core.exceptions import ConfigError, ConsistencyError, PreconditionError
from core.logging_config import get_logger
from core.models import ActivityCategory, ActivityEvent, DeveloperTimeline
from core.utils import days_between

logger = get_logger("lifecycle")


class State(str, Enum):
    ACTIVE_CODING = "active_coding"
    ACTIVE_NON_CODING = "active_non_coding"
    INACTIVE = "inactive"
    GONE = "gone"

    @property
    def short(self) -> str:
        return {"active_coding": "A", "active_non_coding": "N", "inactive": "I", "gone": "G"}[self.value]


# Ordem das linhas/colunas das matrizes de transição
STATE_ORDER: tuple[State, ...] = (State.ACTIVE_CODING, State.ACTIVE_NON_CODING, State.INACTIVE, State.GONE)


class TransitionName(str, Enum):
    BACK_TO_CODING = "back_to_coding"
    REACTIVATION = "reactivation"
    COMEBACK = "comeback"
    PAUSE_TO_NONCODING = "pause_to_noncoding"
    PAUSE_TO_INACTIVE = "pause_to_inactive"
    DEEPEN_TO_INACTIVE = "deepen_to_inactive"
    EXPIRE_TO_GONE = "expire_to_gone"
    SELF_LOOP = "self_loop"


_A, _N, _I, _G = STATE_ORDER

TRANSITION_NAMES: dict[tuple[State, State], TransitionName] = {
    (_A, _N): TransitionName.PAUSE_TO_NONCODING,
    (_A, _I): TransitionName.PAUSE_TO_INACTIVE,
    (_N, _A): TransitionName.BACK_TO_CODING,
    (_N, _I): TransitionName.DEEPEN_TO_INACTIVE,
    (_I, _A): TransitionName.REACTIVATION,
    (_I, _N): TransitionName.REACTIVATION,
    (_I, _G): TransitionName.EXPIRE_TO_GONE,
    (_G, _A): TransitionName.COMEBACK,
    (_G, _N): TransitionName.COMEBACK,
}


@dataclass(frozen=True)
class LifecycleConfig:
    """
    Parâmetros do rotulador.

    Os limiares de non-coding e inactive são sempre o T_fov do break que está
    sendo segmentado; apenas o limiar de gone é global.
    """

    dt_gone_days: int = GONE_DAYS

    def __post_init__(self) -> None:
        if self.dt_gone_days < 1:
            raise ConfigError("dt_gone_days", f"deve ser >= 1 (recebido {self.dt_gone_days})")


@dataclass(frozen=True)
class StateSegment:
    state: State
    start: date
    end: date
    ongoing: bool = False
    threshold: Fraction | None = None

    @property
    def length_days(self) -> int:
        return days_between(self.start, self.end)


@dataclass(frozen=True)
class Transition:
    from_state: State
    to_state: State
    at: date
    name: TransitionName


@dataclass(frozen=True)
class LifecycleTrace:
    developer_key: str
    org_id: str
    segments: tuple[StateSegment, ...]
    transitions: tuple[Transition, ...]
    coding_pauses: int
    observation_end: date
    n_breaks: int = 0

    @property
    def first_day(self) -> date:
        return self.segments[0].start

    @property
    def final_segment(self) -> StateSegment:
        return self.segments[-1]

    @property
    def years_in_project(self) -> float:
        """Anos entre o primeiro dia de commit e o fim da observação (mínimo de 1 dia)."""
        return max(days_between(self.first_day, self.observation_end), 1) / 365.25

    def segments_in(self, state: State) -> list[StateSegment]:
        return [s for s in self.segments if s.state is state]

    def ever(self, state: State) -> bool:
        return any(s.state is state for s in self.segments)


# ============================================================================
# Segmentação
# ============================================================================


def _segment_interval(
    start: date,
    end: date,
    event_days: Iterable[date],
    threshold: Fraction,
    gone_days: int,
    has_events: bool,
) -> list[StateSegment]:
    chain = [start, *sorted({d for d in event_days if start < d < end}), end]

    pieces: list[StateSegment] = []
    for a, b in zip(chain, chain[1:], strict=False):
        state = State.ACTIVE_NON_CODING if has_events and days_between(a, b) <= threshold else State.INACTIVE
        if pieces and state is State.ACTIVE_NON_CODING and pieces[-1].state is State.ACTIVE_NON_CODING:
            pieces[-1] = StateSegment(state, pieces[-1].start, b, threshold=threshold)
        else:
            pieces.append(StateSegment(state, a, b, threshold=threshold))

    segments: list[StateSegment] = []
    for piece in pieces:
        if piece.state is State.INACTIVE and piece.length_days >= gone_days:
            split = piece.start + timedelta(days=gone_days)
            segments.append(StateSegment(State.INACTIVE, piece.start, split, threshold=threshold))
            segments.append(StateSegment(State.GONE, split, piece.end, threshold=threshold))
        else:
            segments.append(piece)
    return segments


def _check_events(events: Sequence[ActivityEvent], start: date, end: date, operation: str) -> None:
    for event in events:
        if event.category is ActivityCategory.PASSIVE:
            raise PreconditionError(operation, f"evento passivo '{event.kind}' em {event.day}")
        if event.is_commit:
            raise PreconditionError(operation, f"commit em {event.day} dentro do intervalo")
        if not start <= event.day <= end:
            raise PreconditionError(operation, f"evento em {event.day} fora de [{start}, {end}]")


def _extend(segments: list[StateSegment], new: Iterable[StateSegment]) -> None:
    """Acrescenta segmentos fundindo `active_coding` consecutivos."""
    for seg in new:
        prev = segments[-1] if segments else None
        if prev is not None and prev.state is State.ACTIVE_CODING and seg.state is State.ACTIVE_CODING:
            segments[-1] = StateSegment(State.ACTIVE_CODING, prev.start, seg.end, ongoing=seg.ongoing)
        else:
            segments.append(seg)


def _segment_span(
    start: date,
    end: date,
    events: Sequence[ActivityEvent],
    threshold: Fraction,
    gone_days: int,
) -> list[StateSegment]:
    """
    Segmenta um intervalo sem commits tratando PRs abertos como pontos de código.

    Cada PR aberto estritamente dentro do intervalo o divide. Um trecho entre
    pontos de código que não passa do limiar é `active_coding`; os demais são
    segmentados pelos eventos não-coding que contêm. Dois trechos sem código
    separados por um PR ganham um `active_coding` de duração zero no dia do PR.
    """
    coding = sorted({e.day for e in events if e.category is ActivityCategory.CODING and start < e.day < end})
    other = [e.day for e in events if e.category is ActivityCategory.NON_CODING]
    points = [start, *coding, end]

    segments: list[StateSegment] = []
    for a, b in zip(points, points[1:], strict=False):
        if coding and days_between(a, b) <= threshold:
            piece = [StateSegment(State.ACTIVE_CODING, a, b)]
        else:
            inside = [d for d in other if a <= d <= b]
            piece = _segment_interval(a, b, inside, threshold, gone_days, bool(inside))
        if segments and segments[-1].state is not State.ACTIVE_CODING and piece[0].state is not State.ACTIVE_CODING:
            segments.append(StateSegment(State.ACTIVE_CODING, a, a))
        _extend(segments, piece)
    return segments


def segment_break(
    brk: DetectedBreak, events: Sequence[ActivityEvent], cfg: LifecycleConfig | None = None
) -> list[StateSegment]:
    """
    Divide um break em segmentos non-coding / inactive / gone.

    PRs abertos dentro do break são atividade de código: o break é partido
    nos dias deles e trechos curtos entre PRs voltam a ser `active_coding`.

    Args:
        brk: Break detectado (o limiar dele vale para non-coding e inactive)
        events: Eventos ativos não-commit dentro de [início, fim] do break

    Raises:
        PreconditionError: Evento passivo, commit ou fora do intervalo
    """
    cfg = cfg or LifecycleConfig()
    _check_events(events, brk.start, brk.end, "segment_break")
    return _segment_span(brk.start, brk.end, events, brk.threshold, cfg.dt_gone_days)


def derive_transitions(segments: Sequence[StateSegment]) -> list[Transition]:
    """
    Uma transição por fronteira entre segmentos consecutivos.

    Raises:
        ConsistencyError: Par de estados sem transição no modelo
    """
    transitions = []
    for prev, nxt in zip(segments, segments[1:], strict=False):
        if prev.end != nxt.start:
            raise ConsistencyError("derive_transitions", f"segmentos não contíguos em {prev.end} / {nxt.start}")
        pair = (prev.state, nxt.state)
        if prev.state is nxt.state:
            name = TransitionName.SELF_LOOP
        elif pair in TRANSITION_NAMES:
            name = TRANSITION_NAMES[pair]
        else:
            raise ConsistencyError(
                "derive_transitions", f"transição {prev.state.value} -> {nxt.state.value} não existe no modelo"
            )
        transitions.append(Transition(prev.state, nxt.state, nxt.start, name))
    return transitions


def build_trace(
    timeline: DeveloperTimeline,
    breaks: Sequence[DetectedBreak],
    cfg: LifecycleConfig | None = None,
    tail_threshold: Fraction | None = None,
    detector: DetectorConfig | None = None,
) -> LifecycleTrace:
    """
    Monta a sequência completa de estados de um desenvolvedor.

    Args:
        timeline: Timeline com ao menos um dia de commit
        breaks: Breaks detectados, sem sobreposição
        cfg: Parâmetros do rotulador
        tail_threshold: Limiar para o silêncio final (padrão: `closing_threshold`)
        detector: Configuração com que os breaks foram detectados; usada no
            `closing_threshold` quando `tail_threshold` não é informado

    Raises:
        PreconditionError: Timeline sem commits ou break fora do histórico
        ConsistencyError: Breaks sobrepostos
    """
    cfg = cfg or LifecycleConfig()
    if not timeline.commit_days:
        raise PreconditionError("build_trace", f"'{timeline.developer_key}' não tem dias de commit")
    first, last = timeline.first_day, timeline.last_day
    end = timeline.observation_end_day
    if end < last:
        raise PreconditionError("build_trace", f"fim da observação {end} antes do último commit {last}")

    ordered = sorted(breaks, key=lambda b: b.start)
    for prev, nxt in zip(ordered, ordered[1:], strict=False):
        if prev.end > nxt.start:
            raise ConsistencyError(
                "build_trace",
                f"breaks sobrepostos para '{timeline.developer_key}': {prev.pause.key} e {nxt.pause.key}",
            )
    for brk in ordered:
        if brk.start < first or brk.end > last:
            raise PreconditionError("build_trace", f"break {brk.pause.key} fora do histórico [{first}, {last}]")

    events = [e for e in timeline.non_commit_events() if e.day >= first]

    segments: list[StateSegment] = []
    cursor = first
    for brk in ordered:
        _extend(segments, [StateSegment(State.ACTIVE_CODING, cursor, brk.start)])
        inside = [e for e in events if brk.start <= e.day <= brk.end]
        _extend(segments, segment_break(brk, inside, cfg))
        cursor = brk.end

    if tail_threshold is None:
        tail_threshold = closing_threshold(timeline, detector or DetectorConfig())
    _extend(segments, _tail_segments(cursor, last, end, events, cfg, tail_threshold))

    trace = LifecycleTrace(
        developer_key=timeline.developer_key,
        org_id=timeline.org_id,
        segments=tuple(segments),
        transitions=tuple(derive_transitions(segments)),
        coding_pauses=len(timeline.commit_days) - 1 - len(ordered),
        observation_end=end,
        n_breaks=len(ordered),
    )
    logger.debug(
        f"{timeline.developer_key}: {len(trace.segments)} segmentos, {len(trace.transitions)} transições"
    )
    return trace


def _tail_segments(
    cursor: date,
    last: date,
    end: date,
    events: Sequence[ActivityEvent],
    cfg: LifecycleConfig,
    tail_threshold: Fraction,
) -> list[StateSegment]:
    tail = days_between(last, end)
    if tail == 0 or tail <= tail_threshold:
        return [StateSegment(State.ACTIVE_CODING, cursor, end, ongoing=True)]

    tail_events = [e for e in events if last <= e.day <= end]
    segments = [StateSegment(State.ACTIVE_CODING, cursor, last)]
    _extend(segments, _segment_span(last, end, tail_events, tail_threshold, cfg.dt_gone_days))
    final = segments[-1]
    segments[-1] = StateSegment(final.state, final.start, final.end, ongoing=True, threshold=final.threshold)
    return segments
