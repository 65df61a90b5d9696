"""
Schemas para diagnósticos, planes de corrección y scripts de edición.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.common import Action, Severity, SourceSpan


class TextEdit(BaseModel):
    """Reemplazo de un rango de texto"""

    span: SourceSpan
    replacement: str

    model_config = ConfigDict(frozen=True)


def _check_sorted_disjoint(edits) -> None:
    for previous, current in zip(edits, edits[1:]):
        if current.span.start < previous.span.end:
            raise ValueError("edits must be sorted and pairwise non-overlapping")


class FixPlan(BaseModel):
    """Corrección propuesta por una regla"""

    edits: Tuple[TextEdit, ...]
    note: Optional[str] = Field(None, description="Advertencia legible para el usuario")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_edits(self) -> "FixPlan":
        if not self.edits:
            raise ValueError("a fix needs at least one edit")
        _check_sorted_disjoint(self.edits)
        return self

    @property
    def span(self) -> SourceSpan:
        """Span que cubre todas las ediciones"""
        span = self.edits[0].span
        for edit in self.edits[1:]:
            span = span.cover(edit.span)
        return span


class Diagnostic(BaseModel):
    """Un hallazgo: regla, severidad, acción, ubicación y corrección opcional"""

    rule: str
    severity: Severity
    action: Optional[Action] = None
    span: SourceSpan
    message: str
    fix: Optional[FixPlan] = None
    file: str = ""

    model_config = ConfigDict(frozen=True)

    @property
    def sort_key(self):
        return (self.file, self.span.start, self.rule, self.span.end, self.message)

    @property
    def is_blocking(self) -> bool:
        """True si el diagnóstico afecta el código de salida"""
        return self.severity in (Severity.ERROR, Severity.WARNING)


class DroppedFix(BaseModel):
    """Corrección descartada al planificar ediciones"""

    rule: str
    span: SourceSpan
    reason: str

    model_config = ConfigDict(frozen=True)


class EditScript(BaseModel):
    """Ediciones ordenadas y sin solapamiento sobre un archivo"""

    file: str
    edits: List[TextEdit] = Field(default_factory=list)
    dropped: List[DroppedFix] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_edits(self) -> "EditScript":
        _check_sorted_disjoint(self.edits)
        return self

    @property
    def is_empty(self) -> bool:
        return not self.edits
