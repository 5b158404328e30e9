"""Funções utilitárias de datas e caminhos compartilhadas entre os módulos."""

from __future__ import annotations

import fnmatch
import re
from collections.abc import Iterable
from datetime import date, datetime, timezone

from dateutil import parser as dateparser
from dateutil.relativedelta import relativedelta


def parse_timestamp(text: str) -> datetime:
    """
    Converte um texto ISO-8601 em datetime UTC com precisão de segundos.

    Datas sem fuso são tratadas como UTC.

    Raises:
        ValueError: Se o texto não for uma data válida
    """
    value = dateparser.isoparse(str(text).strip())
    return to_utc(value)


def to_utc(value: datetime) -> datetime:
    """Normaliza um datetime para UTC, descartando microssegundos."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


def utc_date(value: datetime) -> date:
    """Data de calendário UTC de um timestamp."""
    return to_utc(value).date()


def add_months(start: date, months: int) -> date:
    """Soma meses de calendário (31/jan + 1 mês = 28 ou 29/fev)."""
    return start + relativedelta(months=months)


def days_between(start: date, end: date) -> int:
    return (end - start).days


def matches_any(path: str, patterns: Iterable[str]) -> bool:
    """
    Verifica se um caminho casa com algum padrão (case-insensitive).

    Padrões sem '/' são comparados com o nome do arquivo; padrões com '/'
    são comparados com o caminho a partir de qualquer diretório.
    """
    normalized = path.replace("\\", "/").strip("/").lower()
    basename = normalized.rsplit("/", 1)[-1]
    parts = normalized.split("/")
    suffixes = ["/".join(parts[i:]) for i in range(len(parts))]

    for pattern in patterns:
        pat = pattern.strip().lower()
        if not pat:
            continue
        if "/" in pat:
            if any(fnmatch.fnmatchcase(s, pat) for s in suffixes):
                return True
        elif fnmatch.fnmatchcase(basename, pat):
            return True
    return False


def slugify(text: str) -> str:
    # Gera nomes de arquivos seguros
    text = str(text)
    text = re.sub(r"[^\w\s-]", "", text, flags=re.UNICODE)
    text = re.sub(r"[-\s]+", "_", text).strip("_").lower()
    return text or "sem_nome"
