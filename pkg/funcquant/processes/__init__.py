"""Gaussian process catalog for funcquant."""

from .base import AsymptoticForm, LawForm, Process
from .catalog import build_default_catalog, known_processes, parse_process_spec, resolve_process

__all__ = [
    "AsymptoticForm",
    "LawForm",
    "Process",
    "build_default_catalog",
    "known_processes",
    "parse_process_spec",
    "resolve_process",
]
