"""
Exportación de todos los repositorios.
"""

from app.repositories.source import SourceFileRepository

__all__ = [
    "SourceFileRepository",
]
