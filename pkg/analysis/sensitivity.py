"""Comparação do detector com diferentes tamanhos de janela."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import replace

import pandas as pd

from analysis.rhythm import DetectorConfig, detect_breaks, pauses_longer_than_window
from config.settings import SENSITIVITY_WINDOWS
from core.logging_config import get_logger
from core.models import DeveloperTimeline
from core.utils import add_months

logger = get_logger("sensitivity")


def history_shorter_than_window(timeline: DeveloperTimeline, window_months: int) -> bool:
    """Histórico (primeiro ao último commit) menor que uma janela."""
    if not timeline.commit_days:
        return True
    return timeline.last_day < add_months(timeline.first_day, window_months)


def sensitivity_table(
    timelines: Mapping[str, DeveloperTimeline],
    window_sizes: Iterable[int] = SENSITIVITY_WINDOWS,
    base: DetectorConfig | None = None,
) -> pd.DataFrame:
    """
    Uma linha por tamanho de janela.

    Colunas: desenvolvedores analisados, breaks detectados, pausas maiores que
    a janela e desenvolvedores com histórico menor que a janela.
    """
    base = base or DetectorConfig()
    eligible = [timelines[key] for key in sorted(timelines) if len(timelines[key].commit_days) >= 2]

    rows = []
    for months in window_sizes:
        cfg = replace(base, window_months=months)
        n_breaks = sum(len(detect_breaks(t, cfg)) for t in eligible)
        longer = sum(pauses_longer_than_window(t, cfg) for t in eligible)
        short = sum(1 for t in eligible if history_shorter_than_window(t, months))
        rows.append(
            {
                "window_months": months,
                "developers": len(eligible),
                "breaks": n_breaks,
                "pauses_longer_than_window": longer,
                "history_shorter_than_window": short,
            }
        )
        logger.info(f"Janela de {months} meses: {n_breaks} breaks, {longer} pausas maiores que a janela")
    return pd.DataFrame(
        rows,
        columns=["window_months", "developers", "breaks", "pauses_longer_than_window", "history_shorter_than_window"],
    )
