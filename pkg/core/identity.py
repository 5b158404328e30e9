"""Resolução de identidades: e-mails, logins e nomes para uma chave canônica."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
import unidecode
from rapidfuzz import fuzz, process

from core.exceptions import IngestError
from core.logging_config import get_logger

logger = get_logger("identity")

ALIAS_COLUMNS = ("alias", "canonical")


def normalize_alias(value: str) -> str:
    """Remove acentos, espaços das bordas e diferenças de caixa."""
    return unidecode.unidecode(str(value)).strip().casefold()


@dataclass
class IdentityMap:
    """
    Mapa de aliases (nome, e-mail ou login) para a chave canônica do desenvolvedor.

    A resolução é exata: primeiro o e-mail, depois login e nome pelo arquivo
    de aliases. Casamento aproximado de nomes só é usado quando
    `fuzzy_threshold` é definido.
    """

    aliases: dict[str, str] = field(default_factory=dict)
    fuzzy_threshold: float | None = None

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], fuzzy_threshold: float | None = None) -> IdentityMap:
        aliases = {normalize_alias(k): str(v).strip() for k, v in mapping.items() if str(k).strip()}
        return cls(aliases=aliases, fuzzy_threshold=fuzzy_threshold)

    @classmethod
    def from_file(cls, file_path: str | Path, fuzzy_threshold: float | None = None) -> IdentityMap:
        """
        Carrega um CSV com colunas `alias,canonical`.

        Raises:
            IngestError: Se o arquivo não existir ou não tiver as colunas esperadas
        """
        path = Path(file_path)
        if not path.is_file():
            raise IngestError(str(path), "Arquivo de aliases não encontrado")
        try:
            df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
        except (UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise IngestError(str(path), f"Arquivo de aliases ilegível: {e}") from e
        missing = [c for c in ALIAS_COLUMNS if c not in df.columns]
        if missing:
            raise IngestError(str(path), f"Colunas ausentes: {', '.join(missing)}")

        mapping = dict(zip(df["alias"], df["canonical"], strict=True))
        logger.info(f"{len(mapping)} aliases carregados de {path.name}")
        return cls.from_mapping(mapping, fuzzy_threshold)

    def resolve(self, *candidates: str) -> tuple[str, bool]:
        """
        Resolve a identidade a partir dos candidatos em ordem de prioridade.

        Returns:
            (chave, resolvida). Sem correspondência, a chave é o primeiro
            candidato não vazio, normalizado, e `resolvida` é False.
        """
        normalized = [normalize_alias(c) for c in candidates if c and str(c).strip()]
        if not normalized:
            return "", False

        for alias in normalized:
            if alias in self.aliases:
                return self.aliases[alias], True

        if self.fuzzy_threshold is not None and self.aliases:
            # Só nomes (sem '@') participam do casamento aproximado
            names = [a for a in self.aliases if "@" not in a]
            for alias in normalized:
                if "@" in alias or not names:
                    continue
                match = process.extractOne(
                    alias, names, scorer=fuzz.token_sort_ratio, score_cutoff=self.fuzzy_threshold
                )
                if match is not None:
                    logger.debug(f"Alias aproximado: {alias!r} -> {match[0]!r} ({match[1]:.0f})")
                    return self.aliases[match[0]], True

        return normalized[0], False
