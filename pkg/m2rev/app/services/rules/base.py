"""
Infraestructura común de las reglas: contexto de análisis, resolución de
severidad y construcción de diagnósticos.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from app.models.ast import (
    CompilationUnit,
    Designator,
    Expression,
    FunctionCall,
    Literal,
    SetConstructor,
)
from app.models.symbols import ScopedSymbols
from app.schemas.common import Action, ProfileId, Severity, SourceSpan
from app.schemas.config import RuleConfig
from app.schemas.diagnostic import Diagnostic, FixPlan, TextEdit
from app.schemas.rule import CATALOGUE, RuleId, cite
from app.schemas.token import Token
from app.services.dialect import DialectProfile

# Under the legacy profile only these rules carry fixes; the others would
# introduce constructs that legacy compilers reject.
LEGACY_FIXABLE = frozenset({RuleId.L01, RuleId.L02, RuleId.S01})

# Expressions that remain factors once their parentheses are dropped
FACTOR_NODES = (Literal, Designator, FunctionCall, SetConstructor)


def gap_between(before: SourceSpan, after: SourceSpan) -> SourceSpan:
    """Span entre el final de before y el inicio de after"""
    return SourceSpan(
        start=before.end,
        end=after.start,
        start_line=before.end_line,
        start_col=before.end_col,
        end_line=after.start_line,
        end_col=after.start_col,
    )


def join_spans(first: SourceSpan, last: SourceSpan) -> SourceSpan:
    """Span desde el inicio de first hasta el final de last"""
    return SourceSpan(
        start=first.start,
        end=last.end,
        start_line=first.start_line,
        start_col=first.start_col,
        end_line=last.end_line,
        end_col=last.end_col,
    )


def resolve_severity(
    rule: RuleId,
    action: Optional[Action],
    config: RuleConfig,
    advisory: bool = False,
) -> Severity:
    """
    Severidad efectiva de un diagnóstico.

    Args:
        rule: Regla emisora
        action: Acción de mitigación (None para D01)
        config: Configuración activa (perfil y switches)
        advisory: Hallazgo informativo (p. ej. diferencia de conjuntos dudosa)
    """
    if action is None:
        return Severity.ERROR
    if advisory or action == Action.ACCEPTANCE:
        return Severity.INFO
    if action == Action.WARNING:
        if rule == RuleId.S04 and config.private_imports_as_errors:
            return Severity.ERROR
        return Severity.WARNING
    if config.profile == ProfileId.LEGACY:
        return Severity.INFO
    if action == Action.DEPRECATION and config.deprecation_enabled(rule.value):
        return Severity.WARNING
    return Severity.ERROR


@dataclass
class RuleContext:
    """Todo lo que una regla puede consultar sobre el archivo analizado"""

    file: str
    source: str
    tokens: Sequence[Token]
    unit: CompilationUnit
    symbols: ScopedSymbols
    config: RuleConfig
    project: object = None

    @property
    def profile(self) -> DialectProfile:
        return self.config.dialect

    @property
    def revised(self) -> bool:
        return self.config.profile == ProfileId.REVISED

    def text(self, span: SourceSpan) -> str:
        return self.source[span.start:span.end]

    def operand_text(self, expr: Expression) -> str:
        """Texto de una expresión apto como operando de '::'"""
        inner = self.text(expr.span)
        if isinstance(expr, FACTOR_NODES):
            return inner
        return f"({inner})"

    def diagnostic(
        self,
        rule: RuleId,
        span: SourceSpan,
        message: str,
        edits: Optional[Iterable[TextEdit]] = None,
        note: Optional[str] = None,
        advisory: bool = False,
    ) -> Diagnostic:
        action = CATALOGUE[rule].action
        fix = None
        edits = list(edits or ())
        if edits and (self.revised or rule in LEGACY_FIXABLE):
            fix = FixPlan(edits=tuple(sorted(edits, key=lambda e: e.span.start)), note=note)
        return Diagnostic(
            rule=rule.value,
            severity=resolve_severity(rule, action, self.config, advisory),
            action=action,
            span=span,
            message=cite(rule, message),
            fix=fix,
            file=self.file,
        )


class Rule:
    """Regla del catálogo; las subclases implementan check()"""

    id: RuleId

    @property
    def topic(self) -> str:
        return CATALOGUE[self.id].topic

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        raise NotImplementedError
