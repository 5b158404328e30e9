# tests/test_run_config.py
"""
Testes para o módulo cli.run_config
"""

import json
from pathlib import Path

import pytest

from analysis.lifecycle import LifecycleConfig
from analysis.rhythm import DetectorConfig
from cli.run_config import RunConfig
from core.exceptions import ConfigError


class TestValidation:
    """Testes de validação dos campos."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"commit_format": "svn"},
            {"core_method": "hero"},
            {"self_loop_mode": "todos"},
            {"cbh_threshold": 0},
            {"cbh_threshold": 1.2},
            {"fuzzy_threshold": 0},
            {"fuzzy_threshold": 101},
            {"cutoff": "amanhã"},
        ],
    )
    def test_invalid_values(self, kwargs: dict) -> None:
        """Valores fora do domínio geram ConfigError (exit code 2)."""
        with pytest.raises(ConfigError) as exc:
            RunConfig(**kwargs)
        assert exc.value.exit_code == 2

    def test_defaults(self) -> None:
        """Padrões: TF, janela de 3 meses, gone em 365 dias."""
        cfg = RunConfig()
        assert cfg.core_method == "tf"
        assert cfg.detector.window_months == 3
        assert cfg.lifecycle.dt_gone_days == 365
        assert cfg.cutoff_datetime is None


class TestPaths:
    """Testes para caminhos e fontes de commits."""

    def test_cache_defaults_to_output(self, tmp_path) -> None:
        """Sem --cache, o cache fica dentro da saída."""
        assert RunConfig(output_dir=str(tmp_path)).cache_path == tmp_path / "cache"
        assert RunConfig(output_dir=str(tmp_path), cache_dir="/tmp/c").cache_path == Path("/tmp/c")

    def test_commit_sources(self) -> None:
        """Entradas com e sem repositório."""
        cfg = RunConfig(commits=("org/app=logs/app.log", "logs/todos.ndjson"))
        assert cfg.commit_sources() == [("org/app", Path("logs/app.log")), ("", Path("logs/todos.ndjson"))]

    def test_cutoff_parsed(self) -> None:
        """O corte é convertido para UTC."""
        cfg = RunConfig(cutoff="2021-12-31T21:00:00-03:00")
        assert cfg.cutoff_datetime.isoformat() == "2022-01-01T00:00:00+00:00"


class TestPersistence:
    """Testes para save e load."""

    def test_round_trip(self, tmp_path) -> None:
        """O arquivo gravado recria a mesma configuração."""
        cfg = RunConfig(
            org_id="org",
            commits=("org/app=app.log",),
            events=("events.ndjson",),
            detector=DetectorConfig(window_months=6, shift_days=14),
            lifecycle=LifecycleConfig(dt_gone_days=180),
            core_method="cbh",
            self_loop_mode="boundaries",
            trace_dirs=("saida/org", "saida/outra"),
        )
        path = cfg.save(tmp_path / "out" / "run_config.json")
        assert RunConfig.load(path) == cfg

    def test_saved_json_is_sorted(self, tmp_path) -> None:
        """Chaves ordenadas para gerar arquivos estáveis."""
        path = RunConfig(org_id="org").save(tmp_path / "run_config.json")
        data = json.loads(path.read_text(encoding="utf-8"))
        assert list(data) == sorted(data)
        assert data["detector"]["window_months"] == 3

    def test_unknown_keys(self, write_file) -> None:
        """Chaves desconhecidas são recusadas."""
        path = write_file("cfg.json", json.dumps({"org_id": "org", "janela": 3}))
        with pytest.raises(ConfigError, match="janela"):
            RunConfig.load(path)

    def test_unknown_detector_field(self, write_file) -> None:
        """Campo desconhecido dentro do detector também."""
        path = write_file("cfg.json", json.dumps({"detector": {"window": 3}}))
        with pytest.raises(ConfigError):
            RunConfig.load(path)

    def test_invalid_detector_value(self, write_file) -> None:
        """Valores do detector são validados ao carregar."""
        path = write_file("cfg.json", json.dumps({"detector": {"window_months": 5}}))
        with pytest.raises(ConfigError):
            RunConfig.load(path)

    @pytest.mark.parametrize("content", ["{quebrado", "[1, 2]"])
    def test_bad_json(self, write_file, content: str) -> None:
        """JSON inválido ou que não é objeto."""
        with pytest.raises(ConfigError):
            RunConfig.load(write_file("cfg.json", content))

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(ConfigError):
            RunConfig.load(tmp_path / "nada.json")
