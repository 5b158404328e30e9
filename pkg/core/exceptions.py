"""
Exceções customizadas da aplicação.
Centraliza tratamento de erros com mensagens claras e códigos de saída.
"""


class AnalyzerError(Exception):
    """Exceção base para erros da aplicação."""

    exit_code: int = 1

    def __init__(self, message: str, details: str | None = None):
        self.message = message
        self.details = details
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} | Detalhes: {self.details}"
        return self.message


class IngestError(AnalyzerError):
    """Erro ao ler ou decodificar uma fonte de entrada."""

    exit_code = 2

    def __init__(self, source: str, reason: str):
        super().__init__(
            message=f"Erro ao ingerir fonte: {source}",
            details=reason,
        )
        self.source = source


class MalformedLogError(IngestError):
    """Proporção de registros malformados indica formato errado."""

    def __init__(self, source: str, malformed: int, total: int):
        super().__init__(
            source,
            f"{malformed} de {total} registros malformados; verifique o formato de entrada",
        )
        self.malformed = malformed
        self.total = total


class ConfigError(AnalyzerError):
    """Valor de configuração inválido."""

    exit_code = 2

    def __init__(self, parameter: str, reason: str):
        super().__init__(
            message=f"Configuração inválida: '{parameter}'",
            details=reason,
        )
        self.parameter = parameter


class CacheError(AnalyzerError):
    """Erro ao ler ou gravar o cache de timelines."""

    exit_code = 2

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Erro no cache: {path}",
            details=reason,
        )
        self.path = path


class CacheVersionError(CacheError):
    """Versão do cache diferente da suportada."""

    def __init__(self, path: str, found: object, expected: int):
        super().__init__(path, f"versão {found!r} encontrada, esperada {expected}")
        self.found = found
        self.expected = expected


class CacheCorruptedError(CacheError):
    """Arquivo de cache ilegível ou incompleto."""


class EmptyProjectError(AnalyzerError):
    """Projeto sem dados suficientes para identificar core developers."""

    def __init__(self, project: str, reason: str = "empty project"):
        super().__init__(
            message=f"Projeto vazio: {project}",
            details=reason,
        )
        self.project = project


class PreconditionError(AnalyzerError):
    """Entrada viola a pré-condição de uma operação."""

    exit_code = 3

    def __init__(self, operation: str, reason: str):
        super().__init__(
            message=f"Pré-condição violada em '{operation}'",
            details=reason,
        )
        self.operation = operation


class ConsistencyError(AnalyzerError):
    """Violação de consistência interna."""

    exit_code = 3

    def __init__(self, stage: str, reason: str):
        super().__init__(
            message=f"Inconsistência na etapa '{stage}'",
            details=reason,
        )
        self.stage = stage
