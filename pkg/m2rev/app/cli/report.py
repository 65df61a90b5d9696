"""
Renderizado de diagnósticos: texto (una línea por hallazgo) y JSON.
"""

from typing import Iterable

from app.schemas.config import ReportFormat
from app.schemas.diagnostic import Diagnostic
from app.schemas.report import Report


def format_diagnostic(diagnostic: Diagnostic) -> str:
    """file:line:col: severity [rule] message"""
    span = diagnostic.span
    return (
        f"{diagnostic.file}:{span.start_line}:{span.start_col}: "
        f"{diagnostic.severity.value} [{diagnostic.rule}] {diagnostic.message}"
    )


def render_text(diagnostics: Iterable[Diagnostic]) -> str:
    lines = []
    for diagnostic in diagnostics:
        lines.append(format_diagnostic(diagnostic))
        if diagnostic.fix is not None and diagnostic.fix.note:
            lines.append(f"    note: {diagnostic.fix.note}")
    return "".join(line + "\n" for line in lines)


def render_json(diagnostics: Iterable[Diagnostic]) -> str:
    return Report.build(diagnostics).to_json() + "\n"


def render(diagnostics: Iterable[Diagnostic], report_format: ReportFormat) -> str:
    if report_format == ReportFormat.JSON:
        return render_json(diagnostics)
    return render_text(diagnostics)
