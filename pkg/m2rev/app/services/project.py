"""
Carga de proyectos: descubre los archivos, los analiza en paralelo y
construye el índice de módulos, el grafo de importaciones y las tablas de
símbolos (primero las partes de definición, luego el resto).
"""

import asyncio
import logging
from pathlib import Path
from typing import Iterable, Optional, Set

from app.config import settings
from app.core.exceptions import SourceReadError
from app.models.ast import UnitKind
from app.models.project import (
    PSEUDO_MODULES,
    ImportEdge,
    ModuleEntry,
    ProjectModel,
    ProjectUnit,
    distinct_imports,
)
from app.repositories.source import SourceFileRepository
from app.schemas.common import Severity, SourceSpan
from app.schemas.config import RunConfig
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import RuleId
from app.services.dialect import DialectProfile
from app.services.lexer import tokenize
from app.services.parser import parse_compilation_unit
from app.services.sema import build_symbols

logger = logging.getLogger(__name__)

_FILE_START = SourceSpan(start=0, end=0)


def _project_diagnostic(file: str, message: str, severity: Severity = Severity.ERROR,
                        span: SourceSpan = _FILE_START) -> Diagnostic:
    return Diagnostic(rule=RuleId.E04.value, severity=severity, span=span, message=message, file=file)


def parse_source(path: str, source: str, profile: DialectProfile) -> ProjectUnit:
    """
    Tokeniza y analiza sintácticamente un texto (sin tabla de símbolos).

    Args:
        path: Ruta asignada a los diagnósticos
        source: Texto del archivo
        profile: Perfil de dialecto activo

    Returns:
        ProjectUnit con tokens, AST y diagnósticos M2R-E01/M2R-E02
    """
    result = tokenize(source, profile)
    diagnostics = [
        Diagnostic(rule=RuleId.E01.value, severity=Severity.ERROR, span=error.span,
                   message=error.message, file=path)
        for error in result.errors
    ]
    unit, parse_diagnostics = parse_compilation_unit(result.tokens)
    diagnostics.extend(d.model_copy(update={"file": path}) for d in parse_diagnostics)
    return ProjectUnit(path=path, source=source, tokens=result.tokens, unit=unit,
                       diagnostics=diagnostics)


def analyze_source(
    path: str,
    source: str,
    profile: DialectProfile,
    project: Optional[ProjectModel] = None,
) -> ProjectUnit:
    """Analiza un texto completo: léxico, sintaxis y símbolos"""
    entry = parse_source(path, source, profile)
    entry.symbols = build_symbols(entry.unit, profile, project, path)
    entry.diagnostics.extend(entry.symbols.diagnostics)
    return entry


class ProjectLoader:
    """Construye un ProjectModel a partir de rutas en disco"""

    def __init__(self, config: RunConfig, repository: Optional[SourceFileRepository] = None):
        """
        Inicializa el cargador.

        Args:
            config: Configuración de la ejecución (perfil, extensiones, externos)
            repository: Acceso a archivos (por defecto según config.extensions)
        """
        self.config = config
        self.profile = config.rule_config().dialect
        self.repository = repository or SourceFileRepository(config.extensions)
        self.semaphore = asyncio.Semaphore(settings.MAX_WORKERS)

    async def load(self, roots: Iterable[str]) -> ProjectModel:
        paths = self.repository.discover(roots)
        units = await asyncio.gather(*(self._load_file(path) for path in paths))
        model = ProjectModel(
            units=list(units),
            externals=PSEUDO_MODULES | frozenset(self.config.external_modules),
        )
        self._index_modules(model)
        self._build_symbols(model)
        self._build_import_graph(model)
        logger.info(
            "loaded %d files, %d modules, %d import edges",
            len(model.units), len(model.module_index), len(model.import_graph),
        )
        return model

    async def _load_file(self, path: str) -> ProjectUnit:
        async with self.semaphore:
            try:
                source = await asyncio.to_thread(self.repository.read, path)
            except SourceReadError as e:
                logger.warning("cannot read %s: %s", path, e.message)
                return ProjectUnit(
                    path=path, source="", unit=None,
                    diagnostics=[_project_diagnostic(path, e.message)],
                )
            return await asyncio.to_thread(parse_source, path, source, self.profile)

    # -- index ---------------------------------------------------------

    def _index_modules(self, model: ProjectModel) -> None:
        for entry in model.units:
            name = entry.module_name
            if not name:
                continue
            stem = Path(entry.path).stem
            if stem != name:
                entry.diagnostics.append(_project_diagnostic(
                    entry.path,
                    f"module {name} is declared in a file named {Path(entry.path).name}",
                    Severity.WARNING,
                    entry.unit.name.span,
                ))
            module = model.module_index.setdefault(name, ModuleEntry())
            role = "definition_path" if entry.kind == UnitKind.DEFINITION else "implementation_path"
            existing = getattr(module, role)
            if existing is not None:
                part = "definition" if role == "definition_path" else "implementation"
                entry.diagnostics.append(_project_diagnostic(
                    entry.path,
                    f"duplicate {part} part for module {name}: {existing} and {entry.path}",
                    span=entry.unit.name.span,
                ))
                continue
            setattr(module, role, entry.path)
            if entry.unit.pragmas:
                model.pragma_index.setdefault(name, entry.unit.pragmas)

    # -- symbols -------------------------------------------------------

    def _build_symbols(self, model: ProjectModel) -> None:
        done: Set[str] = set()

        def build_definition(name: str, visiting: Set[str]) -> None:
            if name in done or name in visiting:
                return
            entry = model.definition_unit(name)
            if entry is None:
                return
            visiting.add(name)
            for ident in distinct_imports(entry.unit):
                build_definition(ident.name, visiting)
            visiting.discard(name)
            self._attach_symbols(entry, model)
            done.add(name)

        for entry in model.units:
            if entry.unit is not None and entry.kind == UnitKind.DEFINITION:
                if model.definition_unit(entry.module_name) is entry:
                    build_definition(entry.module_name, set())
        for entry in model.units:
            if entry.unit is not None and entry.symbols is None:
                self._attach_symbols(entry, model)

    def _attach_symbols(self, entry: ProjectUnit, model: ProjectModel) -> None:
        entry.symbols = build_symbols(entry.unit, self.profile, model, entry.path)
        entry.diagnostics.extend(entry.symbols.diagnostics)

    # -- import graph --------------------------------------------------

    def _build_import_graph(self, model: ProjectModel) -> None:
        for entry in model.units:
            if entry.unit is None or not entry.module_name:
                continue
            for ident in distinct_imports(entry.unit):
                model.import_graph.append(ImportEdge(
                    importer=entry.module_name,
                    importer_kind=entry.kind,
                    imported=ident.name,
                    file=entry.path,
                    span=ident.span,
                ))
                if not model.is_known(ident.name):
                    entry.diagnostics.append(_project_diagnostic(
                        entry.path,
                        f"module {ident.name} is not part of the project; "
                        "its symbols are treated as external",
                        Severity.INFO,
                        ident.span,
                    ))


async def load_project(roots: Iterable[str], config: RunConfig) -> ProjectModel:
    """
    Carga un proyecto.

    Args:
        roots: Directorios o archivos
        config: Configuración de la ejecución

    Returns:
        ProjectModel. Los errores por archivo quedan como diagnósticos en
        su ProjectUnit; la carga nunca se aborta por un archivo

    Raises:
        SourceReadError: Una de las raíces no existe
    """
    return await ProjectLoader(config).load(roots)
