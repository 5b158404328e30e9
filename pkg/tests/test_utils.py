# tests/test_utils.py
"""
Testes para o módulo core.utils
"""

from datetime import date, datetime, timezone

import pytest

from core.utils import add_months, days_between, matches_any, parse_timestamp, slugify, utc_date


class TestTimestamps:
    """Testes para parse_timestamp e utc_date."""

    def test_offset_converted_to_utc(self) -> None:
        """Fuso informado é convertido para UTC."""
        assert parse_timestamp("2021-03-01T22:30:00-03:00") == datetime(2021, 3, 2, 1, 30, tzinfo=timezone.utc)

    def test_naive_is_utc(self) -> None:
        """Data sem fuso é UTC; microssegundos são descartados."""
        assert parse_timestamp(" 2021-03-01T10:00:00.123456 ") == datetime(2021, 3, 1, 10, tzinfo=timezone.utc)

    def test_invalid(self) -> None:
        """Texto inválido gera ValueError."""
        with pytest.raises(ValueError):
            parse_timestamp("ontem")

    def test_utc_date(self) -> None:
        """O dia é o do calendário UTC."""
        local = parse_timestamp("2021-12-31T23:00:00-05:00")
        assert utc_date(local) == date(2022, 1, 1)


class TestCalendar:
    """Testes para add_months e days_between."""

    @pytest.mark.parametrize(
        ("start", "months", "expected"),
        [
            (date(2021, 1, 31), 1, date(2021, 2, 28)),
            (date(2020, 1, 31), 1, date(2020, 2, 29)),
            (date(2021, 1, 1), 3, date(2021, 4, 1)),
            (date(2021, 11, 15), 12, date(2022, 11, 15)),
        ],
    )
    def test_add_months(self, start: date, months: int, expected: date) -> None:
        """Meses de calendário, com o dia limitado ao fim do mês."""
        assert add_months(start, months) == expected

    def test_days_between(self) -> None:
        """Diferença em dias, negativa quando invertida."""
        assert days_between(date(2021, 1, 1), date(2021, 3, 1)) == 59
        assert days_between(date(2021, 3, 1), date(2021, 1, 1)) == -59


class TestMatchesAny:
    """Testes para matches_any."""

    @pytest.mark.parametrize(
        ("path", "expected"),
        [
            ("README.md", True),
            ("src/Guia.RST", True),
            ("docs/api/index.html", True),
            ("pkg/docs/api/index.html", True),
            ("LICENSE", True),
            ("src/main.py", False),
            ("documents/x.py", False),
        ],
    )
    def test_doc_patterns(self, path: str, expected: bool) -> None:
        """Nome de arquivo ou diretório, sem diferenciar maiúsculas."""
        patterns = ("*.md", "*.rst", "docs/**", "LICENSE*")
        assert matches_any(path, patterns) is expected

    def test_blank_patterns_ignored(self) -> None:
        """Padrões vazios não casam com nada."""
        assert not matches_any("a.py", ["", "  "])


class TestSlugify:
    """Testes para slugify."""

    def test_scope_names(self) -> None:
        """Nomes de organização viram nomes de arquivo."""
        assert slugify("Apache Foundation") == "apache_foundation"
        assert slugify("org/app") == "orgapp"

    def test_empty(self) -> None:
        """Texto sem caracteres válidos recebe nome padrão."""
        assert slugify("///") == "sem_nome"
