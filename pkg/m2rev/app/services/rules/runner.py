"""
Ejecución del catálogo de reglas sobre una unidad analizada.
"""

import logging
from typing import Iterable, List, Optional, Sequence

from app.core.exceptions import InternalError
from app.models.ast import CompilationUnit
from app.models.symbols import ScopedSymbols
from app.schemas.common import Severity
from app.schemas.config import RuleConfig
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import CATALOGUE, RuleId, cite
from app.schemas.token import Token
from app.services.rules.base import Rule, RuleContext, resolve_severity
from app.services.rules.dialect import RevisedConstructRule
from app.services.rules.lexical import OctalLiteralRule, SetDifferenceRule, SynonymSymbolRule
from app.services.rules.pervasives import ConversionFunctionRule
from app.services.rules.semantics import (
    ConstantCastRule,
    ImportedWriteRule,
    NilCompatibilityRule,
    ShiftCastRule,
    VariantRecordRule,
)
from app.services.rules.syntax import ForeignInterfaceRule, LocalModuleRule, LongFormArrayRule

logger = logging.getLogger(__name__)

ALL_RULES: List[Rule] = [
    SynonymSymbolRule(),
    OctalLiteralRule(),
    SetDifferenceRule(),
    LongFormArrayRule(),
    LocalModuleRule(),
    ForeignInterfaceRule(),
    ConversionFunctionRule(),
    NilCompatibilityRule(),
    ConstantCastRule(),
    ImportedWriteRule(),
    ShiftCastRule(),
    VariantRecordRule(),
    RevisedConstructRule(),
]

_PRAGMA_RULES = (RuleId.S04.value, RuleId.S05.value)


def adopt_pragma_diagnostics(
    diagnostics: Iterable[Diagnostic],
    config: RuleConfig,
) -> List[Diagnostic]:
    """
    Completa los hallazgos de directivas emitidos por el parser.

    Los avisos sobre directivas mal formadas reciben la acción y la severidad
    de su regla; los avisos informativos de ubicación se mantienen en info.
    Se descartan si la regla está deshabilitada.
    """
    adopted = []
    for diagnostic in diagnostics:
        if diagnostic.rule not in _PRAGMA_RULES:
            adopted.append(diagnostic)
            continue
        if not config.is_enabled(diagnostic.rule):
            continue
        rule = RuleId(diagnostic.rule)
        action = CATALOGUE[rule].action
        severity = diagnostic.severity
        if severity != Severity.INFO:
            severity = resolve_severity(rule, action, config)
        adopted.append(diagnostic.model_copy(update={
            "action": action,
            "severity": severity,
            "message": cite(rule, diagnostic.message),
        }))
    return adopted


def run_rules(
    unit: CompilationUnit,
    symbols: ScopedSymbols,
    project,
    config: RuleConfig,
    *,
    tokens: Sequence[Token],
    source: str,
    file: str = "",
    rules: Optional[Sequence[Rule]] = None,
) -> List[Diagnostic]:
    """
    Ejecuta las reglas habilitadas sobre una unidad.

    Args:
        unit: AST de la unidad
        symbols: Tabla de símbolos de la unidad
        project: ProjectModel (o None para un archivo aislado)
        config: Perfil, selección de reglas y switches
        tokens: Tokens del archivo (reglas léxicas)
        source: Texto del archivo (reglas que generan reemplazos)
        file: Ruta que se asigna a cada diagnóstico
        rules: Reglas a ejecutar (por defecto ALL_RULES)

    Returns:
        Diagnósticos ordenados por (archivo, inicio del span). Una regla que
        falla produce un diagnóstico de error en lugar de abortar el análisis
    """
    ctx = RuleContext(
        file=file,
        source=source,
        tokens=tokens,
        unit=unit,
        symbols=symbols,
        config=config,
        project=project,
    )
    diagnostics: List[Diagnostic] = []
    for rule in rules if rules is not None else ALL_RULES:
        if not config.is_enabled(rule.id.value):
            continue
        try:
            diagnostics.extend(rule.check(ctx))
        except Exception as e:
            error = InternalError(
                code="RULE_FAILED",
                message=f"internal error while checking {rule.topic}: {e}",
                details={"rule": rule.id.value, "file": file},
            )
            logger.exception(
                "rule %s failed on %s", rule.id.value, file or "<source>",
                extra={"code": error.code, **error.details},
            )
            diagnostics.append(Diagnostic(
                rule=rule.id.value,
                severity=Severity.ERROR,
                action=CATALOGUE[rule.id].action,
                span=unit.span,
                message=cite(rule.id, error.message),
                file=file,
            ))
    return sorted(diagnostics, key=lambda d: d.sort_key)
