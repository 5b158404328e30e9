# tests/test_cache.py
"""
Testes para o módulo core.cache
"""

import json
from datetime import date, datetime, timezone

import pytest

from core.cache import cache_load, cache_store
from core.exceptions import CacheCorruptedError, CacheError, CacheVersionError
from core.models import CommitFile, CommitRecord


@pytest.fixture
def corpus(make_timeline):
    """Duas timelines e dois commits."""
    timelines = {
        "ana@org.io": make_timeline(
            [date(2021, 1, 1), date(2021, 1, 9)], [date(2021, 1, 4)], key="ana@org.io"
        ),
        "bia@org.io": make_timeline([date(2021, 2, 1)], key="bia@org.io"),
    }
    commits = [
        CommitRecord(
            "org/app",
            "a1",
            "ana@org.io",
            datetime(2021, 1, 1, 12, tzinfo=timezone.utc),
            files=(CommitFile("src/a.py", False, "A"), CommitFile("README.md", True)),
            author_name="Ana",
        ),
        CommitRecord("org/lib", "b2", "bia@org.io", datetime(2021, 2, 1, 12, tzinfo=timezone.utc), via_pull_request=True),
    ]
    return timelines, commits


class TestCacheRoundTrip:
    """Testes de gravação e leitura do cache."""

    def test_store_and_load(self, tmp_path, corpus) -> None:
        """O que foi gravado volta igual."""
        timelines, commits = corpus
        cache_store(tmp_path / "cache", timelines, commits, org_id="org", report={"duplicates_dropped": 3})
        loaded = cache_load(tmp_path / "cache")
        assert loaded.org_id == "org"
        assert loaded.timelines == timelines
        assert loaded.commits == commits
        assert loaded.report == {"duplicates_dropped": 3}

    def test_store_is_deterministic(self, tmp_path, corpus) -> None:
        """Duas gravações iguais geram os mesmos bytes."""
        timelines, commits = corpus
        first = cache_store(tmp_path / "a", timelines, commits, org_id="org")
        second = cache_store(tmp_path / "b", timelines, commits, org_id="org")
        for name in ("manifest.json", "commits.jsonl"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_stale_timelines_removed(self, tmp_path, corpus) -> None:
        """Regravar o cache apaga timelines que não existem mais."""
        timelines, commits = corpus
        cache_store(tmp_path, timelines, commits)
        cache_store(tmp_path, {"bia@org.io": timelines["bia@org.io"]}, commits)
        assert len(list((tmp_path / "timelines").glob("*.json"))) == 1
        assert list(cache_load(tmp_path).timelines) == ["bia@org.io"]


class TestCacheErrors:
    """Testes para os erros de leitura do cache."""

    def test_missing_cache(self, tmp_path) -> None:
        """Diretório sem manifesto."""
        with pytest.raises(CacheError):
            cache_load(tmp_path / "nada")

    def test_empty_path(self) -> None:
        """Caminho vazio."""
        with pytest.raises(CacheError):
            cache_load("")

    def test_version_mismatch(self, tmp_path, corpus) -> None:
        """Versão de formato diferente é recusada."""
        timelines, commits = corpus
        cache_store(tmp_path, timelines, commits)
        manifest = tmp_path / "manifest.json"
        data = json.loads(manifest.read_text(encoding="utf-8"))
        data["format_version"] = 99
        manifest.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(CacheVersionError) as exc:
            cache_load(tmp_path)
        assert exc.value.found == 99
        assert exc.value.exit_code == 2

    def test_corrupted_timeline(self, tmp_path, corpus) -> None:
        """Arquivo de timeline truncado."""
        timelines, commits = corpus
        cache_store(tmp_path, timelines, commits)
        victim = next((tmp_path / "timelines").glob("*.json"))
        victim.write_text('{"format_version": 1, "timel', encoding="utf-8")
        with pytest.raises(CacheCorruptedError):
            cache_load(tmp_path)

    def test_missing_timeline_file(self, tmp_path, corpus) -> None:
        """Arquivo listado no manifesto e ausente."""
        timelines, commits = corpus
        cache_store(tmp_path, timelines, commits)
        next((tmp_path / "timelines").glob("*.json")).unlink()
        with pytest.raises(CacheCorruptedError):
            cache_load(tmp_path)

    def test_invalid_commit_line(self, tmp_path, corpus) -> None:
        """Linha de commit sem campos obrigatórios."""
        timelines, commits = corpus
        cache_store(tmp_path, timelines, commits)
        (tmp_path / "commits.jsonl").write_text('{"sha": "x"}\n', encoding="utf-8")
        with pytest.raises(CacheCorruptedError):
            cache_load(tmp_path)
