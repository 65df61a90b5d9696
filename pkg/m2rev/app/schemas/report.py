"""
Schemas del reporte JSON de la CLI.
"""

from typing import Dict, Iterable, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.schemas.common import Action, Severity
from app.schemas.diagnostic import Diagnostic


class ReportRange(BaseModel):
    """Rango de un diagnóstico en líneas y columnas (1-based)"""

    start_line: int = Field(alias="startLine")
    start_col: int = Field(alias="startCol")
    end_line: int = Field(alias="endLine")
    end_col: int = Field(alias="endCol")

    model_config = ConfigDict(populate_by_name=True)


class ReportDiagnostic(BaseModel):
    """Diagnóstico tal como aparece en el reporte"""

    file: str
    range: ReportRange
    rule: str
    severity: Severity
    action: Optional[Action] = None
    message: str
    fix_available: bool = Field(alias="fixAvailable")

    model_config = ConfigDict(populate_by_name=True)

    @classmethod
    def from_diagnostic(cls, diagnostic: Diagnostic) -> "ReportDiagnostic":
        span = diagnostic.span
        return cls(
            file=diagnostic.file,
            range=ReportRange(
                start_line=span.start_line,
                start_col=span.start_col,
                end_line=span.end_line,
                end_col=span.end_col,
            ),
            rule=diagnostic.rule,
            severity=diagnostic.severity,
            action=diagnostic.action,
            message=diagnostic.message,
            fix_available=diagnostic.fix is not None,
        )


class Report(BaseModel):
    """Documento JSON completo"""

    version: str = Field(default_factory=lambda: settings.REPORT_VERSION)
    diagnostics: List[ReportDiagnostic] = Field(default_factory=list)
    summary: Dict[str, int] = Field(default_factory=dict, description="Cantidad por regla")

    @classmethod
    def build(cls, diagnostics: Iterable[Diagnostic]) -> "Report":
        items = [ReportDiagnostic.from_diagnostic(d) for d in diagnostics]
        summary: Dict[str, int] = {}
        for item in items:
            summary[item.rule] = summary.get(item.rule, 0) + 1
        return cls(diagnostics=items, summary=dict(sorted(summary.items())))

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)
