"""
Leitura e escrita dos artefatos de cada etapa e exibição do resumo no terminal.

Todas as tabelas são CSV UTF-8 com quebra de linha `\\n` e floats em
formato fixo, para que duas execuções iguais gerem arquivos idênticos.
"""

from __future__ import annotations

import json
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from datetime import date
from fractions import Fraction
from pathlib import Path
from typing import Any

import pandas as pd

from analysis.core_devs import CoreDevSet, CoreMethod
from analysis.indicator import TransitionMatrix
from analysis.lifecycle import LifecycleTrace, State, StateSegment, Transition, TransitionName
from analysis.rhythm import DetectedBreak, Pause, Window
from core.exceptions import IngestError, PreconditionError
from core.logging_config import get_logger
from core.utils import slugify

logger = get_logger("reporter")

FLOAT_FORMAT = "%.10g"

BREAKS_FILE = "breaks.csv"
CLOSING_FILE = "closing_thresholds.csv"
SEGMENTS_FILE = "segments.csv"
TRANSITIONS_FILE = "transitions.csv"
TRACES_META_FILE = "traces_meta.csv"
CORE_FILE = "core_devs.json"
RUN_CONFIG_FILE = "run_config.json"

BREAK_COLUMNS = [
    "developer",
    "start",
    "end",
    "length",
    "threshold",
    "threshold_exact",
    "window_index",
    "window_start",
    "window_end",
    "deferred",
    "ambiguous",
]


def write_table(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format=FLOAT_FORMAT)
    logger.debug(f"Tabela gravada: {path} ({len(df)} linhas)")
    return path


def _read_table(path: str | Path, columns: Sequence[str]) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise IngestError(str(path), "Arquivo não encontrado; rode a etapa anterior")
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise IngestError(str(path), f"Colunas ausentes: {', '.join(missing)}")
    return df


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _bool(text: str) -> bool:
    return str(text).strip().lower() == "true"


# ============================================================================
# Breaks
# ============================================================================


def breaks_frame(breaks: Mapping[str, Sequence[DetectedBreak]]) -> pd.DataFrame:
    rows = [
        {
            "developer": dev,
            "start": b.start.isoformat(),
            "end": b.end.isoformat(),
            "length": b.length_days,
            "threshold": float(b.threshold),
            "threshold_exact": _fraction_text(b.threshold),
            "window_index": b.window.index,
            "window_start": b.window.start.isoformat(),
            "window_end": b.window.end.isoformat(),
            "deferred": b.deferred,
            "ambiguous": b.ambiguous,
        }
        for dev in sorted(breaks)
        for b in breaks[dev]
    ]
    return pd.DataFrame(rows, columns=BREAK_COLUMNS)


def write_breaks(breaks: Mapping[str, Sequence[DetectedBreak]], path: str | Path) -> Path:
    return write_table(breaks_frame(breaks), path)


def read_breaks(path: str | Path) -> dict[str, list[DetectedBreak]]:
    df = _read_table(path, BREAK_COLUMNS)
    breaks: dict[str, list[DetectedBreak]] = defaultdict(list)
    try:
        for row in df.itertuples(index=False):
            window = Window(int(row.window_index), date.fromisoformat(row.window_start), date.fromisoformat(row.window_end))
            breaks[row.developer].append(
                DetectedBreak(
                    pause=Pause.between(date.fromisoformat(row.start), date.fromisoformat(row.end)),
                    window=window,
                    threshold=Fraction(row.threshold_exact),
                    deferred=_bool(row.deferred),
                    ambiguous=_bool(row.ambiguous),
                )
            )
    except (ValueError, ZeroDivisionError, PreconditionError) as e:
        raise IngestError(str(path), f"Linha de break inválida: {e}") from e
    return dict(breaks)


def write_closing_thresholds(thresholds: Mapping[str, Fraction], path: str | Path) -> Path:
    rows = [
        {"developer": dev, "threshold": float(t), "threshold_exact": _fraction_text(t)}
        for dev, t in sorted(thresholds.items())
    ]
    return write_table(pd.DataFrame(rows, columns=["developer", "threshold", "threshold_exact"]), path)


def read_closing_thresholds(path: str | Path) -> dict[str, Fraction]:
    df = _read_table(path, ["developer", "threshold_exact"])
    try:
        return {row.developer: Fraction(row.threshold_exact) for row in df.itertuples(index=False)}
    except (ValueError, ZeroDivisionError) as e:
        raise IngestError(str(path), f"Limiar inválido: {e}") from e


# ============================================================================
# Traces
# ============================================================================


def write_traces(traces: Sequence[LifecycleTrace], output_dir: str | Path) -> list[Path]:
    """Grava segmentos, transições e metadados das traces (um CSV cada)."""
    out = Path(output_dir)
    ordered = sorted(traces, key=lambda t: t.developer_key)
    segments = pd.DataFrame(
        [
            {
                "developer": t.developer_key,
                "state": s.state.value,
                "start": s.start.isoformat(),
                "end": s.end.isoformat(),
                "length": s.length_days,
                "ongoing": s.ongoing,
                "threshold_exact": _fraction_text(s.threshold) if s.threshold is not None else "",
            }
            for t in ordered
            for s in t.segments
        ],
        columns=["developer", "state", "start", "end", "length", "ongoing", "threshold_exact"],
    )
    transitions = pd.DataFrame(
        [
            {
                "developer": t.developer_key,
                "name": tr.name.value,
                "from": tr.from_state.value,
                "to": tr.to_state.value,
                "at": tr.at.isoformat(),
            }
            for t in ordered
            for tr in t.transitions
        ],
        columns=["developer", "name", "from", "to", "at"],
    )
    meta = pd.DataFrame(
        [
            {
                "developer": t.developer_key,
                "org": t.org_id,
                "coding_pauses": t.coding_pauses,
                "n_breaks": t.n_breaks,
                "observation_end": t.observation_end.isoformat(),
            }
            for t in ordered
        ],
        columns=["developer", "org", "coding_pauses", "n_breaks", "observation_end"],
    )
    return [
        write_table(segments, out / SEGMENTS_FILE),
        write_table(transitions, out / TRANSITIONS_FILE),
        write_table(meta, out / TRACES_META_FILE),
    ]


def read_traces(output_dir: str | Path) -> list[LifecycleTrace]:
    out = Path(output_dir)
    try:
        return _read_traces(out)
    except (ValueError, ZeroDivisionError) as e:
        raise IngestError(str(out), f"Traces inválidas: {e}") from e


def _read_traces(out: Path) -> list[LifecycleTrace]:
    meta = _read_table(out / TRACES_META_FILE, ["developer", "org", "coding_pauses", "n_breaks", "observation_end"])
    segments_df = _read_table(out / SEGMENTS_FILE, ["developer", "state", "start", "end", "ongoing", "threshold_exact"])
    transitions_df = _read_table(out / TRANSITIONS_FILE, ["developer", "name", "from", "to", "at"])

    segments: dict[str, list[StateSegment]] = defaultdict(list)
    for row in segments_df.itertuples(index=False):
        segments[row.developer].append(
            StateSegment(
                State(row.state),
                date.fromisoformat(row.start),
                date.fromisoformat(row.end),
                ongoing=_bool(row.ongoing),
                threshold=Fraction(row.threshold_exact) if row.threshold_exact else None,
            )
        )
    transitions: dict[str, list[Transition]] = defaultdict(list)
    for rec in transitions_df.to_dict("records"):
        transitions[rec["developer"]].append(
            Transition(State(rec["from"]), State(rec["to"]), date.fromisoformat(rec["at"]), TransitionName(rec["name"]))
        )

    traces = []
    for row in meta.itertuples(index=False):
        if not segments[row.developer]:
            raise IngestError(str(out / SEGMENTS_FILE), f"trace de '{row.developer}' sem segmentos")
        traces.append(
            LifecycleTrace(
                developer_key=row.developer,
                org_id=row.org,
                segments=tuple(segments[row.developer]),
                transitions=tuple(transitions[row.developer]),
                coding_pauses=int(row.coding_pauses),
                observation_end=date.fromisoformat(row.observation_end),
                n_breaks=int(row.n_breaks),
            )
        )
    return traces


# ============================================================================
# Core developers
# ============================================================================


def write_core_sets(sets: Iterable[CoreDevSet], path: str | Path) -> Path:
    payload = [
        {
            "project": s.project_id,
            "method": s.method.value,
            "members": list(s.members),
            "coverage": round(s.coverage, 10),
            "overridden": s.overridden,
        }
        for s in sorted(sets, key=lambda s: (s.project_id, s.method.value))
    ]
    return write_json(payload, path)


def read_core_sets(path: str | Path) -> list[CoreDevSet]:
    data = read_json(path)
    try:
        return [
            CoreDevSet(d["project"], CoreMethod(d["method"]), tuple(d["members"]), float(d["coverage"]), bool(d["overridden"]))
            for d in data
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise IngestError(str(path), f"Conjuntos de core developers inválidos: {e}") from e


def read_overrides(path: str | Path) -> dict[str, list[str]]:
    """JSON projeto -> lista de membros revisada manualmente."""
    data = read_json(path)
    if not isinstance(data, dict) or not all(isinstance(v, list) for v in data.values()):
        raise IngestError(str(path), "Esperado objeto JSON projeto -> lista de membros")
    return {str(k): [str(m) for m in v] for k, v in data.items()}


# ============================================================================
# Matrizes e JSON
# ============================================================================


def write_matrices(matrices: Mapping[str, TransitionMatrix], output_dir: str | Path) -> list[Path]:
    """Para cada escopo: matriz de probabilidades e lista de arestas."""
    out = Path(output_dir)
    paths = []
    for scope, matrix in matrices.items():
        slug = slugify(scope)
        probs = matrix.to_frame().reset_index(names="from")
        paths.append(write_table(probs, out / f"transition_matrix_{slug}.csv"))
        paths.append(write_table(matrix.to_edge_list(), out / f"transition_edges_{slug}.csv"))
    return paths


def write_json(payload: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: str | Path) -> Any:
    path = Path(path)
    if not path.is_file():
        raise IngestError(str(path), "Arquivo não encontrado")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise IngestError(str(path), f"JSON inválido: {e}") from e


# ============================================================================
# Terminal
# ============================================================================


def show_summary(tables: Mapping[str, pd.DataFrame]) -> None:
    print("\n🟦  RITMO DOS CORE DEVELOPERS")
    print("=" * 70)
    if not tables:
        print("Nenhuma tabela gerada.")
        return
    for title, table in tables.items():
        print(f"\n🔹 {title}")
        if table.empty:
            print("Sem dados.")
        else:
            print(table.head(12).to_string(index=False))
