"""
Configuração centralizada de logging para a aplicação.
"""

import logging
import sys
from pathlib import Path

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(
    level: int = logging.INFO,
    log_file: Path | None = None,
    log_format: str | None = None,
) -> logging.Logger:
    """
    Configura o logging da aplicação de forma centralizada.

    Args:
        level: Nível de logging (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Caminho opcional para arquivo de log
        log_format: Formato customizado do log

    Returns:
        Logger raiz da aplicação
    """
    if log_format is None:
        log_format = LOG_FORMAT

    # Remove handlers existentes para evitar duplicação
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.setLevel(level)

    # Handler para console; stdout fica livre para tabelas, logs vão ao stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(log_format, datefmt=DATE_FORMAT))
    root_logger.addHandler(console_handler)

    # Handler para arquivo (opcional)
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(log_format, datefmt=DATE_FORMAT))
        root_logger.addHandler(file_handler)

    # Conexões do fetcher só aparecem em WARNING ou acima
    logging.getLogger("urllib3").setLevel(max(level, logging.WARNING))

    logger = logging.getLogger("ritmo")
    logger.setLevel(level)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Obtém um logger no namespace `ritmo.<name>`."""
    return logging.getLogger(f"ritmo.{name}")
