"""
Módulo core con utilidades centrales de la herramienta.
"""

from app.core.exceptions import (
    ConfigError,
    EditScriptError,
    FixpointError,
    InternalError,
    MigratorException,
    SourceReadError,
)

__all__ = [
    "MigratorException",
    "ConfigError",
    "SourceReadError",
    "EditScriptError",
    "FixpointError",
    "InternalError",
]
