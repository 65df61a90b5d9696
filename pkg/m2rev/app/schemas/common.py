"""
Schemas comunes reutilizables.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class ProfileId(str, Enum):
    """Dialecto del lenguaje"""

    LEGACY = "legacy"
    REVISED = "revised"


class Severity(str, Enum):
    """Severidad de un diagnóstico"""

    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


class Action(str, Enum):
    """Método de mitigación asociado a un diagnóstico"""

    WARNING = "warning"
    CHANGE = "change"
    DEPRECATION = "deprecation"
    REMOVAL = "removal"
    ACCEPTANCE = "acceptance"


class SourceSpan(BaseModel):
    """Rango en el archivo fuente: offsets en bytes, línea/columna 1-based"""

    start: int = Field(ge=0, description="Offset inicial (inclusive)")
    end: int = Field(ge=0, description="Offset final (exclusive)")
    start_line: int = Field(default=1, ge=1)
    start_col: int = Field(default=1, ge=1)
    end_line: int = Field(default=1, ge=1)
    end_col: int = Field(default=1, ge=1)

    model_config = ConfigDict(frozen=True)

    @property
    def length(self) -> int:
        return self.end - self.start

    def contains(self, other: "SourceSpan") -> bool:
        """True si other está completamente dentro de este span"""
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "SourceSpan") -> bool:
        """True si ambos spans comparten al menos un byte"""
        return self.start < other.end and other.start < self.end

    def cover(self, other: "SourceSpan") -> "SourceSpan":
        """Span mínimo que cubre a ambos"""
        first = self if self.start <= other.start else other
        last = self if self.end >= other.end else other
        return SourceSpan(
            start=first.start,
            end=last.end,
            start_line=first.start_line,
            start_col=first.start_col,
            end_line=last.end_line,
            end_col=last.end_col,
        )
