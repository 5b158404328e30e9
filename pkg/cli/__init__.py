"""Linha de comando do analisador de ritmo."""
