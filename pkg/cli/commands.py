"""
Interface de linha de comando: uma subcomando por etapa do pipeline.

    ritmo ingest       logs e eventos -> cache de timelines
    ritmo core         cache -> core developers (TF e CBH)
    ritmo breaks       cache -> breaks.csv
    ritmo lifecycle    cache + breaks -> segments/transitions
    ritmo report       traces -> tabelas e matrizes (`--traces` junta organizações)
    ritmo sensitivity  cache -> comparação de tamanhos de janela
    ritmo run          todas as etapas
    ritmo fetch        uma página de eventos públicos de um repositório

Cada etapa lê os artefatos da anterior em `--output` e grava `run_config.json`.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import pandas as pd
from tqdm import tqdm

from analysis.core_devs import CoreDevSet, CoreMethod, core_summary
from analysis.indicator import (
    break_durations,
    break_frequency,
    break_rate_summary,
    break_rates,
    contribution_records,
    duration_tests,
    gone_odds_ratio,
    transition_matrices,
)
from analysis.lifecycle import LifecycleConfig, LifecycleTrace, build_trace
from analysis.rhythm import DetectedBreak, DetectorConfig, closing_threshold, detect_breaks
from analysis.sensitivity import sensitivity_table
from cli.run_config import CORE_METHODS, SELF_LOOP_MODES, RunConfig
from config.settings import SENSITIVITY_WINDOWS
from core.cache import CachedCorpus, cache_load, cache_store
from core.exceptions import AnalyzerError, ConfigError, IngestError, PreconditionError
from core.fetcher import fetch_repo_events, write_event_export
from core.identity import IdentityMap
from core.loader import (
    IngestReport,
    deduplicate_commits,
    load_text_stream,
    parse_commit_log,
    parse_event_stream,
)
from core.logging_config import get_logger, setup_logging
from core.models import DeveloperTimeline
from core.timeline import build_timeline
from reports import reporter

logger = get_logger("cli")

_METHODS = {"tf": CoreMethod.TRUCK_FACTOR, "cbh": CoreMethod.COMMIT_BASED}


# ============================================================================
# Etapas
# ============================================================================


def _save_config(cfg: RunConfig) -> None:
    cfg.save(cfg.output_path / reporter.RUN_CONFIG_FILE)


def cmd_ingest(cfg: RunConfig) -> CachedCorpus:
    """Lê logs de commits e eventos, resolve identidades e grava o cache."""
    if not cfg.org_id:
        raise ConfigError("org", "informe a organização com --org")
    if not cfg.commits:
        raise ConfigError("commits", "informe ao menos um log com --commits")

    report = IngestReport()
    commits = []
    for repo, path in cfg.commit_sources():
        if cfg.commit_format == "git_log" and not repo:
            raise ConfigError("commits", f"git_log exige owner/repo=caminho (recebido '{path}')")
        commits += parse_commit_log(
            load_text_stream(path), cfg.commit_format, repo, cfg.doc_patterns, str(path), report
        )
    events = []
    for path in cfg.events:
        events += parse_event_stream(load_text_stream(path), source=str(path), report=report)

    ids = (
        IdentityMap.from_file(cfg.aliases, cfg.fuzzy_threshold)
        if cfg.aliases
        else IdentityMap(fuzzy_threshold=cfg.fuzzy_threshold)
    )
    cutoff = cfg.cutoff_datetime
    if cutoff is None:
        stamps = [c.authored_at for c in commits] + [e.occurred_at for e in events]
        if not stamps:
            raise IngestError(", ".join(cfg.commits), "nenhum registro válido")
        cutoff = max(stamps)
        logger.info(f"Corte não informado; usando o último registro: {cutoff.isoformat()}")

    timelines = build_timeline(commits, events, ids, cfg.org_id, cutoff, report)
    resolved = [
        replace(c, author_key=ids.resolve(c.author_key, c.author_name)[0])
        for c in deduplicate_commits(commits)
        if c.authored_at <= cutoff
    ]
    cache_store(cfg.cache_path, timelines, resolved, cfg.org_id, report.to_dict())
    reporter.write_json(report.to_dict(), cfg.output_path / "ingest_report.json")
    _save_config(cfg)
    return CachedCorpus(cfg.org_id, timelines, resolved, report.to_dict())


def cmd_core(cfg: RunConfig) -> tuple[pd.DataFrame, list[CoreDevSet]]:
    """Calcula TF e CBH por projeto e grava o resumo e os conjuntos."""
    corpus = cache_load(cfg.cache_path)
    overrides = reporter.read_overrides(cfg.overrides) if cfg.overrides else None
    summary, sets = core_summary(corpus.commits, cfg.cbh_threshold, cfg.include_doc_commits, overrides)
    reporter.write_table(summary, cfg.output_path / "core_summary.csv")
    reporter.write_core_sets(sets, cfg.output_path / reporter.CORE_FILE)
    _save_config(cfg)
    logger.info(f"Core developers calculados para {len(summary)} projetos")
    return summary, sets


def _selected_timelines(corpus: CachedCorpus, cfg: RunConfig) -> list[DeveloperTimeline]:
    """Timelines dos core developers do método escolhido, ou todas sem `core_devs.json`."""
    core_file = cfg.output_path / reporter.CORE_FILE
    timelines = corpus.timelines
    if core_file.is_file():
        method = _METHODS[cfg.core_method]
        members = {m for s in reporter.read_core_sets(core_file) if s.method is method for m in s.members}
        missing = sorted(members - set(timelines))
        if missing:
            logger.warning(f"{len(missing)} core developers sem timeline no cache")
        keys = sorted(members & set(timelines))
        logger.info(f"{len(keys)} core developers ({cfg.core_method}) selecionados")
    else:
        keys = sorted(timelines)
        logger.info(f"{core_file.name} ausente; analisando todos os {len(keys)} desenvolvedores")

    eligible = [timelines[k] for k in keys if len(timelines[k].commit_days) >= 2]
    skipped = [k for k in keys if len(timelines[k].commit_days) < 2]
    if skipped:
        logger.info(f"{len(skipped)} desenvolvedores com menos de dois dias de commit ignorados")
        logger.debug(f"Ignorados: {', '.join(skipped)}")
    return eligible


def _detect_one(args: tuple[DeveloperTimeline, DetectorConfig]) -> tuple[str, list[DetectedBreak], Fraction]:
    timeline, detector = args
    return timeline.developer_key, detect_breaks(timeline, detector), closing_threshold(timeline, detector)


def detect_all(
    timelines: Sequence[DeveloperTimeline], detector: DetectorConfig, jobs: int = 1
) -> tuple[dict[str, list[DetectedBreak]], dict[str, Fraction]]:
    """
    Detecta breaks de cada desenvolvedor, opcionalmente em paralelo.

    O resultado é ordenado por chave do desenvolvedor, qualquer que seja a
    ordem de conclusão.
    """
    work = [(t, detector) for t in timelines]
    progress = {"total": len(work), "desc": "Detectando breaks", "unit": "dev", "disable": len(work) < 2}
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(tqdm(pool.map(_detect_one, work, chunksize=8), **progress))
    else:
        results = [_detect_one(item) for item in tqdm(work, **progress)]

    results.sort(key=lambda r: r[0])
    breaks = {key: brks for key, brks, _ in results}
    closing = {key: t for key, _, t in results}
    return breaks, closing


def cmd_breaks(cfg: RunConfig, jobs: int = 1) -> dict[str, list[DetectedBreak]]:
    corpus = cache_load(cfg.cache_path)
    breaks, closing = detect_all(_selected_timelines(corpus, cfg), cfg.detector, jobs)
    reporter.write_breaks(breaks, cfg.output_path / reporter.BREAKS_FILE)
    reporter.write_closing_thresholds(closing, cfg.output_path / reporter.CLOSING_FILE)
    _save_config(cfg)
    logger.info(f"{sum(len(b) for b in breaks.values())} breaks de {len(breaks)} desenvolvedores")
    return breaks


def cmd_lifecycle(cfg: RunConfig) -> list[LifecycleTrace]:
    """Monta as traces dos desenvolvedores analisados na etapa de breaks."""
    corpus = cache_load(cfg.cache_path)
    breaks = reporter.read_breaks(cfg.output_path / reporter.BREAKS_FILE)
    closing = reporter.read_closing_thresholds(cfg.output_path / reporter.CLOSING_FILE)

    traces = []
    for key in sorted(closing):
        if key not in corpus.timelines:
            raise PreconditionError("lifecycle", f"'{key}' está em {reporter.CLOSING_FILE} mas não no cache")
        timeline = corpus.timelines[key]
        traces.append(build_trace(timeline, breaks.get(key, []), cfg.lifecycle, closing[key], cfg.detector))
    reporter.write_traces(traces, cfg.output_path)
    _save_config(cfg)
    logger.info(f"{len(traces)} traces gravadas")
    return traces


def _report_sources(cfg: RunConfig) -> list[RunConfig]:
    """Configuração de cada diretório de traces; sem `trace_dirs`, só a própria saída."""
    if not cfg.trace_dirs:
        return [cfg]
    sources = []
    for entry in cfg.trace_dirs:
        path = Path(entry)
        saved = path / reporter.RUN_CONFIG_FILE
        source = RunConfig.load(saved) if saved.is_file() else RunConfig()
        sources.append(replace(source, output_dir=str(path)))
    return sources


def _merged_traces(sources: Sequence[RunConfig]) -> list[list[LifecycleTrace]]:
    """Traces de cada fonte; a mesma organização em duas fontes é erro de configuração."""
    owner: dict[str, Path] = {}
    per_source = []
    for source in sources:
        traces = reporter.read_traces(source.output_path)
        for org in sorted({t.org_id for t in traces}):
            if org in owner:
                raise ConfigError("traces", f"organização '{org}' em {owner[org]} e em {source.output_path}")
            owner[org] = source.output_path
        per_source.append(traces)
    if len(sources) > 1:
        logger.info(f"{sum(len(t) for t in per_source)} traces de {len(owner)} organizações")
    return per_source


def cmd_report(cfg: RunConfig) -> dict[str, pd.DataFrame]:
    """
    Gera as tabelas de frequência, duração, testes, odds ratio e as matrizes.

    Com `trace_dirs`, junta as traces de várias execuções (uma por organização):
    as tabelas ganham uma linha por organização, a correção de Holm vale entre
    elas e a matriz agregada soma todas.
    """
    out = cfg.output_path
    sources = _report_sources(cfg)
    per_source = _merged_traces(sources)
    traces = [t for group in per_source for t in group]
    rates = break_rates(traces)
    reporter.write_table(rates, out / "break_rates.csv")

    # (título, arquivo, tabela)
    outputs = [
        ("Frequência de breaks", "break_frequency.csv", break_frequency(traces)),
        ("Breaks por ano", "break_rate_summary.csv", break_rate_summary(rates)),
        ("Duração dos breaks (dias, DP populacional)", "break_durations.csv", break_durations(traces)),
        (
            "Wilcoxon non-coding vs inactive",
            "duration_tests.csv",
            pd.DataFrame([r.to_dict() for r in duration_tests(traces)]),
        ),
    ]
    odds = _odds_ratio_table(sources, per_source)
    if odds is not None:
        outputs.append(("Odds ratio gone (high vs low)", "odds_ratio.csv", odds))

    for _, filename, table in outputs:
        reporter.write_table(table, out / filename)
    reporter.write_matrices(transition_matrices(traces, cfg.self_loop_mode), out)
    _save_config(cfg)

    tables = {title: table for title, _, table in outputs}
    reporter.show_summary(tables)
    return tables


def _odds_ratio_table(
    sources: Sequence[RunConfig], per_source: Sequence[Sequence[LifecycleTrace]]
) -> pd.DataFrame | None:
    records = []
    for source, traces in zip(sources, per_source, strict=True):
        try:
            corpus = cache_load(source.cache_path)
        except AnalyzerError as e:
            logger.warning(f"Odds ratio não calculado: {e}")
            return None
        core_file = source.output_path / reporter.CORE_FILE
        members = None
        if core_file.is_file():
            method = _METHODS[source.core_method]
            members = {
                s.project_id: list(s.members) for s in reporter.read_core_sets(core_file) if s.method is method
            }
        records += contribution_records(traces, corpus.commits, members)
    try:
        result = gone_odds_ratio(records)
    except PreconditionError as e:
        logger.warning(f"Odds ratio não calculado: {e}")
        return None
    return pd.DataFrame([result.to_dict()])


def cmd_sensitivity(cfg: RunConfig, window_sizes: Sequence[int] = SENSITIVITY_WINDOWS) -> pd.DataFrame:
    corpus = cache_load(cfg.cache_path)
    timelines = {t.developer_key: t for t in _selected_timelines(corpus, cfg)}
    table = sensitivity_table(timelines, window_sizes, cfg.detector)
    reporter.write_table(table, cfg.output_path / "sensitivity.csv")
    _save_config(cfg)
    reporter.show_summary({"Sensibilidade ao tamanho da janela": table})
    return table


def cmd_run(cfg: RunConfig, jobs: int = 1) -> dict[str, pd.DataFrame]:
    cmd_ingest(cfg)
    cmd_core(cfg)
    cmd_breaks(cfg, jobs)
    cmd_lifecycle(cfg)
    return cmd_report(cfg)


def cmd_fetch(repo: str, output: Path, token: str | None = None) -> int:
    return write_event_export(fetch_repo_events(repo, token), output)


# ============================================================================
# Argumentos
# ============================================================================


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", default=None, help="Diretório de saída (padrão: ./output)")
    common.add_argument("--cache", default=None, help="Diretório do cache (padrão: <output>/cache)")
    common.add_argument("--config", default=None, help="Recarrega um run_config.json (ignora as demais opções)")
    common.add_argument("--window-months", type=int, default=None, choices=SENSITIVITY_WINDOWS)
    common.add_argument("--shift-days", type=int, default=None)
    common.add_argument("--gone-days", type=int, default=None)
    common.add_argument("--core-method", choices=CORE_METHODS, default=None)
    common.add_argument("--cbh-threshold", type=float, default=None)
    common.add_argument("--include-doc-commits", action="store_true", help="CBH conta commits só de documentação")
    common.add_argument("--overrides", default=None, help="JSON projeto -> membros do TF revisados")
    common.add_argument("--self-loop-mode", choices=SELF_LOOP_MODES, default=None)
    common.add_argument("--cutoff", default=None, help="Fim da observação (ISO-8601)")
    common.add_argument("--jobs", type=int, default=1, help="Processos para a detecção de breaks")
    common.add_argument("--verbose", "-v", action="store_true", help="Log em nível DEBUG")
    common.add_argument("--log-file", default=None, help="Grava o log também neste arquivo")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="ritmo",
        description="Breaks e ciclo de vida de core developers a partir do histórico de repositórios",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("ingest", "run"):
        p = sub.add_parser(name, parents=[common], help=f"etapa {name}")
        p.add_argument("--org", default=None, help="Organização (owner) dos repositórios")
        p.add_argument("--commits", action="append", default=[], help="owner/repo=caminho ou caminho (repetível)")
        p.add_argument("--commit-format", choices=("git_log", "ndjson"), default=None)
        p.add_argument("--events", action="append", default=[], help="Exportação ndjson de eventos (repetível)")
        p.add_argument("--aliases", default=None, help="CSV alias,canonical")
        p.add_argument("--fuzzy-threshold", type=float, default=None, help="Casamento aproximado de nomes (0-100)")
        p.add_argument("--doc-patterns", default=None, help="Arquivo com um padrão de documentação por linha")

    for name in ("core", "breaks", "lifecycle", "sensitivity"):
        sub.add_parser(name, parents=[common], help=f"etapa {name}")

    report = sub.add_parser("report", parents=[common], help="etapa report")
    report.add_argument(
        "--traces", action="append", default=[], help="Diretório de saída de uma organização (repetível)"
    )

    fetch = sub.add_parser("fetch", parents=[common], help="baixa uma página de eventos de um repositório")
    fetch.add_argument("repo", help="owner/repo")
    fetch.add_argument("--token", default=None)
    fetch.add_argument("--events-out", default=None, help="Arquivo ndjson de saída")
    return parser


def _read_doc_patterns(path: str) -> tuple[str, ...]:
    patterns = tuple(
        line.strip() for line in load_text_stream(path) if line.strip() and not line.lstrip().startswith("#")
    )
    if not patterns:
        raise ConfigError("doc-patterns", f"nenhum padrão em {path}")
    return patterns


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Monta a RunConfig a partir dos argumentos (ou de `--config`)."""
    if args.config:
        cfg = RunConfig.load(args.config)
        logger.info(f"Configuração carregada de {args.config}")
        if args.output:
            cfg = replace(cfg, output_dir=args.output)
        return cfg

    base = RunConfig()
    detector = DetectorConfig(
        window_months=args.window_months or base.detector.window_months,
        shift_days=args.shift_days if args.shift_days is not None else base.detector.shift_days,
    )
    lifecycle = LifecycleConfig(args.gone_days if args.gone_days is not None else base.lifecycle.dt_gone_days)
    values = {
        "output_dir": args.output or base.output_dir,
        "cache_dir": args.cache,
        "detector": detector,
        "lifecycle": lifecycle,
        "core_method": args.core_method or base.core_method,
        "cbh_threshold": args.cbh_threshold if args.cbh_threshold is not None else base.cbh_threshold,
        "include_doc_commits": args.include_doc_commits,
        "overrides": args.overrides,
        "self_loop_mode": args.self_loop_mode or base.self_loop_mode,
        "cutoff": args.cutoff,
    }
    if hasattr(args, "org"):
        values.update(
            org_id=args.org or "",
            commits=tuple(args.commits),
            commit_format=args.commit_format or base.commit_format,
            events=tuple(args.events),
            aliases=args.aliases,
            fuzzy_threshold=args.fuzzy_threshold,
        )
        if args.doc_patterns:
            values["doc_patterns"] = _read_doc_patterns(args.doc_patterns)
    if getattr(args, "traces", None):
        values["trace_dirs"] = tuple(args.traces)
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None) -> int:
    """
    Ponto de entrada da CLI.

    Returns:
        0 em sucesso, 2 para entrada inválida, 3 para inconsistência interna,
        1 para outros erros
    """
    args = build_parser().parse_args(argv)
    setup_logging(
        level=logging.DEBUG if args.verbose else logging.INFO,
        log_file=Path(args.log_file) if args.log_file else None,
    )

    try:
        if args.command == "fetch":
            target = Path(args.events_out or Path(args.output or ".") / f"{args.repo.replace('/', '_')}_events.ndjson")
            count = cmd_fetch(args.repo, target, args.token)
            logger.info(f"{count} eventos gravados em {target}")
            return 0

        if args.jobs < 1:
            raise ConfigError("jobs", f"deve ser >= 1 (recebido {args.jobs})")
        cfg = config_from_args(args)
        commands = {
            "ingest": lambda: cmd_ingest(cfg),
            "core": lambda: cmd_core(cfg),
            "breaks": lambda: cmd_breaks(cfg, args.jobs),
            "lifecycle": lambda: cmd_lifecycle(cfg),
            "report": lambda: cmd_report(cfg),
            "sensitivity": lambda: cmd_sensitivity(cfg),
            "run": lambda: cmd_run(cfg, args.jobs),
        }
        commands[args.command]()
    except AnalyzerError as e:
        logger.error(str(e))
        return e.exit_code
    except KeyboardInterrupt:
        logger.error("Interrompido pelo usuário")
        return 1
    except Exception:  # noqa: BLE001
        logger.exception("Erro inesperado")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
