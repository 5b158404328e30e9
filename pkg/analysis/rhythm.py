"""
Detecção de breaks no ritmo de commits de cada desenvolvedor.

Pausas são os intervalos, em dias, entre dias de commit consecutivos. Uma
janela de `window_months` meses de calendário percorre o histórico com passo
de `shift_days` dias; em cada janela o limiar far-out de Tukey é

    T_fov = Q3 + 3 * IQR

calculado sobre as pausas contidas na janela. A janela só é válida com pelo
menos 4 pausas e IQR > 1. Janelas inválidas herdam o limiar da janela
anterior quando ele é válido; sem limiar anterior, pausas que começam na
janela e são maiores que ela ficam para o fim da varredura e são julgadas
pela média dos limiares válidos.

Os limiares são frações exatas (`Fraction`); nenhuma comparação depende de
arredondamento de ponto flutuante.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, replace
from datetime import date, timedelta
from fractions import Fraction

from config.settings import (
    FAR_OUT_MULTIPLIER,
    IQR_FLOOR_DAYS,
    MIN_PAUSES_PER_WINDOW,
    SENSITIVITY_WINDOWS,
    SHIFT_DAYS,
    WINDOW_MONTHS,
)
from core.exceptions import ConfigError, PreconditionError
from core.logging_config import get_logger
from core.models import DeveloperTimeline
from core.utils import add_months, days_between

logger = get_logger("rhythm")


# ============================================================================
# Tipos
# ============================================================================


@dataclass(frozen=True)
class Pause:
    """Intervalo entre dois dias de commit consecutivos."""

    start: date
    end: date
    length_days: int

    def __post_init__(self) -> None:
        if self.length_days != days_between(self.start, self.end) or self.length_days < 1:
            raise PreconditionError("Pause", f"pausa inválida {self.start} -> {self.end}")

    @classmethod
    def between(cls, start: date, end: date) -> Pause:
        return cls(start, end, days_between(start, end))

    @property
    def key(self) -> tuple[date, date]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Window:
    index: int
    start: date
    end: date

    @property
    def length_days(self) -> int:
        return days_between(self.start, self.end)

    def contains(self, pause: Pause) -> bool:
        return self.start <= pause.start and pause.end <= self.end

    def partially_contains(self, pause: Pause) -> bool:
        """Pausa que começa na janela e termina depois dela."""
        return self.start <= pause.start <= self.end < pause.end


@dataclass(frozen=True)
class WindowThreshold:
    """Entrada do registro de limiares de uma janela."""

    window_index: int
    t_fov: Fraction
    valid: bool
    n_pauses: int = 0
    q1: Fraction = Fraction(0)
    q3: Fraction = Fraction(0)
    inherited: bool = False

    @property
    def iqr(self) -> Fraction:
        return self.q3 - self.q1


@dataclass(frozen=True)
class DetectedBreak:
    """Pausa maior que o limiar da janela que a detectou."""

    pause: Pause
    window: Window
    threshold: Fraction
    deferred: bool = False
    ambiguous: bool = False

    @property
    def start(self) -> date:
        return self.pause.start

    @property
    def end(self) -> date:
        return self.pause.end

    @property
    def length_days(self) -> int:
        return self.pause.length_days


@dataclass(frozen=True)
class DetectorConfig:
    window_months: int = WINDOW_MONTHS
    shift_days: int = SHIFT_DAYS
    min_pauses_per_window: int = MIN_PAUSES_PER_WINDOW
    iqr_floor: int = IQR_FLOOR_DAYS

    def __post_init__(self) -> None:
        if self.window_months not in SENSITIVITY_WINDOWS:
            raise ConfigError(
                "window_months", f"{self.window_months} não está em {sorted(SENSITIVITY_WINDOWS)}"
            )
        if self.shift_days < 1:
            raise ConfigError("shift_days", f"deve ser >= 1 (recebido {self.shift_days})")
        if self.min_pauses_per_window < 1:
            raise ConfigError("min_pauses_per_window", "deve ser >= 1")
        if self.iqr_floor < 0:
            raise ConfigError("iqr_floor", "deve ser >= 0")


# ============================================================================
# Pausas e limiares
# ============================================================================


def extract_pauses(timeline: DeveloperTimeline) -> list[Pause]:
    """
    Pausas entre dias de commit consecutivos, em ordem de início.

    Menos de dois dias de commit resultam em lista vazia.
    """
    days = timeline.commit_days
    return [Pause.between(a, b) for a, b in zip(days, days[1:], strict=False)]


def _median(values: Sequence[int | Fraction]) -> Fraction:
    n = len(values)
    mid = n // 2
    if n % 2:
        return Fraction(values[mid])
    return Fraction(values[mid - 1] + values[mid], 2)


def tukey_hinges(values: Sequence[int | Fraction]) -> tuple[Fraction, Fraction]:
    """
    Quartis de Tukey (hinges): medianas das metades inferior e superior.

    Para n ímpar a mediana entra nas duas metades.

    Raises:
        PreconditionError: Lista vazia
    """
    if not values:
        raise PreconditionError("tukey_hinges", "lista vazia")
    ordered = sorted(values)
    half = (len(ordered) + 1) // 2
    return _median(ordered[:half]), _median(ordered[-half:])


def far_out_threshold(
    pauses_in_window: Sequence[int | Fraction],
    min_pauses: int = MIN_PAUSES_PER_WINDOW,
    iqr_floor: int = IQR_FLOOR_DAYS,
    window_index: int = 0,
) -> WindowThreshold:
    """
    Limiar far-out Q3 + 3*IQR de uma janela.

    A validade é um indicador, não um erro: janelas com menos de `min_pauses`
    pausas ou IQR <= `iqr_floor` são marcadas como inválidas.
    """
    n = len(pauses_in_window)
    if n == 0:
        return WindowThreshold(window_index, Fraction(0), False)
    q1, q3 = tukey_hinges(pauses_in_window)
    iqr = q3 - q1
    return WindowThreshold(
        window_index=window_index,
        t_fov=q3 + FAR_OUT_MULTIPLIER * iqr,
        valid=n >= min_pauses and iqr > iqr_floor,
        n_pauses=n,
        q1=q1,
        q3=q3,
    )


# ============================================================================
# Janela deslizante
# ============================================================================


def iter_windows(first_day: date, last_day: date, cfg: DetectorConfig) -> Iterator[Window]:
    """Janelas a partir do primeiro dia; a última é a primeira cujo fim alcança `last_day`."""
    start = first_day
    index = 0
    while True:
        end = add_months(start, cfg.window_months)
        yield Window(index, start, end)
        if end >= last_day:
            return
        start += timedelta(days=cfg.shift_days)
        index += 1


@dataclass
class _Sweep:
    windows: list[Window]
    ledger: list[WindowThreshold]
    found: list[DetectedBreak]
    deferred: list[tuple[Window, Pause]]


def _sweep(pauses: Sequence[Pause], cfg: DetectorConfig) -> _Sweep:
    sweep = _Sweep([], [], [], [])
    if not pauses:
        return sweep
    starts = [p.start for p in pauses]

    for window in iter_windows(pauses[0].start, pauses[-1].end, cfg):
        sweep.windows.append(window)
        lo = bisect_left(starts, window.start)
        hi = bisect_right(starts, window.end)
        inside = [p for p in pauses[lo:hi] if window.contains(p)]
        partial = [p for p in pauses[lo:hi] if window.partially_contains(p)]

        threshold = far_out_threshold(
            [p.length_days for p in inside], cfg.min_pauses_per_window, cfg.iqr_floor, window.index
        )
        if not threshold.valid:
            previous = sweep.ledger[-1] if sweep.ledger else None
            if previous is not None and previous.valid:
                threshold = WindowThreshold(
                    window.index, previous.t_fov, True, len(inside), previous.q1, previous.q3, inherited=True
                )
            else:
                sweep.ledger.append(threshold)
                for p in partial:
                    if p.length_days > window.length_days:
                        sweep.deferred.append((window, p))
                continue

        sweep.ledger.append(threshold)
        logger.debug(
            f"Janela {window.index} [{window.start}, {window.end}]: "
            f"T_fov={float(threshold.t_fov):.2f}{' (herdado)' if threshold.inherited else ''}"
        )
        for p in inside + partial:
            if p.length_days > threshold.t_fov:
                sweep.found.append(DetectedBreak(p, window, threshold.t_fov))
    return sweep


def _mean_valid(ledger: Sequence[WindowThreshold]) -> Fraction | None:
    valid = [e.t_fov for e in ledger if e.valid]
    if not valid:
        return None
    return sum(valid, Fraction(0)) / len(valid)


def detect_breaks(timeline: DeveloperTimeline, cfg: DetectorConfig | None = None) -> list[DetectedBreak]:
    """
    Breaks de um desenvolvedor, únicos por (início, fim) e ordenados por início.

    Quando a mesma pausa é detectada por várias janelas, vale a primeira.
    Pausas adiadas usam a média dos limiares válidos ou, se nenhum existir,
    o tamanho em dias da janela que as adiou.
    """
    cfg = cfg or DetectorConfig()
    pauses = extract_pauses(timeline)
    if not pauses:
        logger.debug(f"{timeline.developer_key}: menos de dois dias de commit, sem pausas")
        return []

    sweep = _sweep(pauses, cfg)
    average = _mean_valid(sweep.ledger)
    candidates = list(sweep.found)
    deferred_keys: set[tuple[date, date]] = set()
    for window, pause in sweep.deferred:
        # Só a primeira janela que adiou a pausa define o limiar
        if pause.key in deferred_keys:
            continue
        deferred_keys.add(pause.key)
        threshold = average if average is not None else Fraction(window.length_days)
        candidates.append(DetectedBreak(pause, window, threshold, deferred=True))

    unique: dict[tuple[date, date], DetectedBreak] = {}
    thresholds: dict[tuple[date, date], set[Fraction]] = {}
    for brk in sorted(candidates, key=lambda b: (b.window.index, b.deferred)):
        unique.setdefault(brk.pause.key, brk)
        thresholds.setdefault(brk.pause.key, set()).add(brk.threshold)

    # Mesma pausa com limiares diferentes: mantém o da primeira janela e sinaliza
    ambiguous = [key for key, values in thresholds.items() if len(values) > 1]
    for key in ambiguous:
        unique[key] = replace(unique[key], ambiguous=True)
    if ambiguous:
        logger.warning(
            f"{timeline.developer_key}: {len(ambiguous)} breaks detectados com limiares diferentes; "
            "usando o da primeira janela"
        )

    breaks = sorted(unique.values(), key=lambda b: b.pause.start)
    logger.debug(
        f"{timeline.developer_key}: {len(pauses)} pausas, {len(sweep.windows)} janelas, {len(breaks)} breaks"
    )
    return breaks


def window_thresholds(timeline: DeveloperTimeline, cfg: DetectorConfig | None = None) -> list[WindowThreshold]:
    """Registro de limiares da varredura, uma entrada por janela."""
    return _sweep(extract_pauses(timeline), cfg or DetectorConfig()).ledger


def closing_threshold(timeline: DeveloperTimeline, cfg: DetectorConfig | None = None) -> Fraction | None:
    """
    Limiar em vigor no fim do histórico, usado para rotular o silêncio final.

    Último limiar válido da varredura; sem nenhum, o tamanho em dias da última
    janela. None para timelines sem dias de commit.
    """
    cfg = cfg or DetectorConfig()
    if not timeline.commit_days:
        return None
    sweep = _sweep(extract_pauses(timeline), cfg)
    for entry in reversed(sweep.ledger):
        if entry.valid:
            return entry.t_fov
    if sweep.windows:
        return Fraction(sweep.windows[-1].length_days)
    first = timeline.commit_days[0]
    return Fraction(days_between(first, add_months(first, cfg.window_months)))


def pauses_longer_than_window(timeline: DeveloperTimeline, cfg: DetectorConfig | None = None) -> int:
    """Pausas maiores que a primeira janela do desenvolvedor."""
    cfg = cfg or DetectorConfig()
    pauses = extract_pauses(timeline)
    if not pauses:
        return 0
    first = pauses[0].start
    size = days_between(first, add_months(first, cfg.window_months))
    return sum(1 for p in pauses if p.length_days > size)
