"""
M2R-S04: importaciones de módulos marcados con PRIVATETO.

Un módulo marcado solo puede importarse en la parte de implementación de
alguno de sus clientes designados. Las importaciones dentro de módulos
locales cuentan como otro alcance aunque estén en un cliente. La
reexportación de nombres privados no se verifica.
"""

import logging
from typing import Iterator, List, Tuple

from app.models.ast import CompilationUnit, Ident, LocalModuleDecl, UnitKind, walk
from app.models.project import ProjectModel
from app.schemas.common import Severity
from app.schemas.config import RuleConfig
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import CATALOGUE, RuleId, cite
from app.services.rules.base import resolve_severity

logger = logging.getLogger(__name__)


def _import_sites(unit: CompilationUnit) -> Iterator[Tuple[Ident, bool]]:
    """(módulo importado, dentro de un módulo local) para cada cláusula"""
    for clause in unit.imports:
        for ident in clause.imported_modules:
            yield ident, False
    for node in walk(unit):
        if isinstance(node, LocalModuleDecl):
            local_names = {n.name.name for n in walk(node) if isinstance(n, LocalModuleDecl)}
            for clause in node.imports:
                for ident in clause.imported_modules:
                    if ident.name not in local_names:
                        yield ident, True


def check_private_imports(project: ProjectModel, config: RuleConfig) -> List[Diagnostic]:
    """
    Verifica cada importación de un módulo marcado con PRIVATETO.

    Args:
        project: Proyecto cargado
        config: Configuración de reglas (habilitación y severidad)

    Returns:
        Un diagnóstico M2R-S04 por importación fuera de un cliente designado,
        ordenados por archivo y posición
    """
    if not config.is_enabled(RuleId.S04.value):
        return []
    action = CATALOGUE[RuleId.S04].action
    severity = resolve_severity(RuleId.S04, action, config)
    diagnostics: List[Diagnostic] = []

    for entry in project.units:
        unit = entry.unit
        if unit is None:
            continue
        for ident, in_local_module in _import_sites(unit):
            clients = project.private_to(ident.name)
            if clients is None or ident.name == unit.name.name:
                continue
            if (
                not in_local_module
                and unit.kind == UnitKind.IMPLEMENTATION
                and unit.name.name in clients
            ):
                continue
            allowed = ", ".join(clients) if clients else "no module"
            if unit.name.name in clients and unit.kind == UnitKind.DEFINITION:
                where = f"the definition part of {unit.name.name}"
            elif in_local_module:
                where = f"a local module of {unit.name.name}"
            else:
                where = f"module {unit.name.name}"
            diagnostics.append(Diagnostic(
                rule=RuleId.S04.value,
                severity=severity,
                action=action,
                span=ident.span,
                message=cite(RuleId.S04, (
                    f"module {ident.name} is private to {allowed} and may only be imported "
                    f"by their implementation parts, not by {where}"
                )),
                file=entry.path,
            ))

    if diagnostics and severity == Severity.ERROR:
        logger.info("%d private imports reported as errors", len(diagnostics))
    return sorted(diagnostics, key=lambda d: d.sort_key)
