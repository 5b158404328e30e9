# tests/__init__.py
"""Testes do analisador de ritmo de core developers."""
