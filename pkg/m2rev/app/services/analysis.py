"""
Orquestación de check y fix sobre un proyecto cargado.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from typing import Dict, List

from app.config import settings
from app.core.exceptions import EditScriptError, FixpointError, MigratorException
from app.models.project import ProjectModel, ProjectUnit
from app.schemas.config import RuleConfig, RunConfig, Subcommand
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import RuleId
from app.services.project import analyze_source, load_project
from app.services.rules import adopt_pragma_diagnostics, check_private_imports, run_rules
from app.services.transform import FixResult, fix_source

logger = logging.getLogger(__name__)


def check_unit(entry: ProjectUnit, project: ProjectModel, config: RuleConfig) -> List[Diagnostic]:
    """
    Diagnósticos de un archivo: hallazgos del frontend más las reglas.

    Args:
        entry: Archivo analizado
        project: Proyecto al que pertenece
        config: Configuración de reglas

    Returns:
        Diagnósticos ordenados (sin los de PRIVATETO, que son de proyecto)
    """
    diagnostics = adopt_pragma_diagnostics(entry.diagnostics, config)
    if entry.unit is not None and entry.symbols is not None:
        diagnostics.extend(run_rules(
            entry.unit,
            entry.symbols,
            project,
            config,
            tokens=entry.tokens,
            source=entry.source,
            file=entry.path,
        ))
    return sorted(diagnostics, key=lambda d: d.sort_key)


def check_text(path: str, source: str, project: ProjectModel, config: RuleConfig) -> List[Diagnostic]:
    """Analiza un texto como si fuera el contenido actual de path"""
    entry = analyze_source(path, source, config.dialect, project)
    return check_unit(entry, project, config)


async def check_project(project: ProjectModel, config: RuleConfig) -> List[Diagnostic]:
    """Diagnósticos de todo el proyecto, en orden determinista"""
    semaphore = asyncio.Semaphore(settings.MAX_WORKERS)

    async def one(entry: ProjectUnit) -> List[Diagnostic]:
        async with semaphore:
            return await asyncio.to_thread(check_unit, entry, project, config)

    per_file = await asyncio.gather(*(one(entry) for entry in project.units))
    diagnostics = [d for group in per_file for d in group]
    diagnostics.extend(project.diagnostics)
    diagnostics.extend(check_private_imports(project, config))
    return sorted(diagnostics, key=lambda d: d.sort_key)


def fix_unit(entry: ProjectUnit, project: ProjectModel, config: RuleConfig, max_passes: int) -> FixResult:
    """
    Corrige un archivo hasta punto fijo.

    Raises:
        EditScriptError: Una edición inválida; el archivo no se modifica
        FixpointError: No converge dentro de max_passes
    """
    return fix_source(
        entry.source,
        lambda text: check_text(entry.path, text, project, config),
        config.dialect,
        file=entry.path,
        config=config,
        max_passes=max_passes,
    )


@dataclass
class AnalysisResult:
    """Resultado de una ejecución de check o fix"""

    project: ProjectModel
    diagnostics: List[Diagnostic] = field(default_factory=list)
    fixes: Dict[str, FixResult] = field(default_factory=dict)
    failures: Dict[str, MigratorException] = field(default_factory=dict)


async def fix_project(project: ProjectModel, config: RuleConfig, max_passes: int) -> AnalysisResult:
    """
    Corrige cada archivo de forma independiente.

    Los diagnósticos del resultado son los que quedan tras corregir; un
    archivo cuya corrección falla conserva sus diagnósticos originales.
    """
    semaphore = asyncio.Semaphore(settings.MAX_WORKERS)
    result = AnalysisResult(project=project)

    async def one(entry: ProjectUnit) -> None:
        if entry.unit is None:
            result.diagnostics.extend(check_unit(entry, project, config))
            return
        async with semaphore:
            try:
                fixed = await asyncio.to_thread(fix_unit, entry, project, config, max_passes)
            except (EditScriptError, FixpointError) as e:
                logger.error("cannot fix %s: %s", entry.path, e.message)
                result.failures[entry.path] = e
                result.diagnostics.extend(check_unit(entry, project, config))
                return
        result.fixes[entry.path] = fixed
        result.diagnostics.extend(fixed.diagnostics)
        # loading findings are not reproduced when re-checking the fixed text
        result.diagnostics.extend(d for d in entry.diagnostics if d.rule == RuleId.E04.value)

    await asyncio.gather(*(one(entry) for entry in project.units))
    result.diagnostics.extend(project.diagnostics)
    result.diagnostics.extend(check_private_imports(project, config))
    result.diagnostics.sort(key=lambda d: d.sort_key)
    return result


async def run_analysis(config: RunConfig) -> AnalysisResult:
    """
    Carga el proyecto indicado por config y ejecuta check o fix.

    Raises:
        SourceReadError: Una ruta no existe
    """
    project = await load_project(config.targets, config)
    rule_config = config.rule_config()
    if config.subcommand == Subcommand.FIX:
        return await fix_project(project, rule_config, config.max_fix_passes)
    diagnostics = await check_project(project, rule_config)
    return AnalysisResult(project=project, diagnostics=diagnostics)
