"""
Modelo de proyecto multiarchivo: unidades analizadas, índice de módulos,
grafo de importaciones y directivas por módulo.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from app.models.ast import CompilationUnit, Ident, ModulePragma, UnitKind
from app.models.symbols import ScopedSymbols
from app.schemas.common import SourceSpan
from app.schemas.diagnostic import Diagnostic
from app.schemas.token import Token

# Modules supplied by every implementation; never reported as missing
PSEUDO_MODULES: FrozenSet[str] = frozenset(
    {"SYSTEM", "COROUTINES", "EXCEPTIONS", "M2EXCEPTION", "TERMINATION"}
)


@dataclass
class ProjectUnit:
    """Un archivo fuente analizado"""

    path: str
    source: str
    tokens: List[Token] = field(default_factory=list)
    unit: Optional[CompilationUnit] = None
    symbols: Optional[ScopedSymbols] = None
    # lexical, syntax and declaration findings for this file
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def module_name(self) -> Optional[str]:
        return self.unit.name.name if self.unit is not None else None

    @property
    def kind(self) -> Optional[UnitKind]:
        return self.unit.kind if self.unit is not None else None


@dataclass
class ModuleEntry:
    """Archivos que aportan las partes de un módulo"""

    definition_path: Optional[str] = None
    implementation_path: Optional[str] = None


@dataclass(frozen=True)
class ImportEdge:
    """Arista importador → importado (una por módulo distinto en cada unidad)"""

    importer: str
    importer_kind: UnitKind
    imported: str
    file: str
    span: SourceSpan


@dataclass
class ProjectModel:
    """Resultado de load_project; de solo lectura una vez cargado"""

    units: List[ProjectUnit] = field(default_factory=list)
    module_index: Dict[str, ModuleEntry] = field(default_factory=dict)
    import_graph: List[ImportEdge] = field(default_factory=list)
    pragma_index: Dict[str, Tuple[ModulePragma, ...]] = field(default_factory=dict)
    externals: FrozenSet[str] = PSEUDO_MODULES
    diagnostics: List[Diagnostic] = field(default_factory=list)

    def unit_at(self, path: str) -> Optional[ProjectUnit]:
        return next((u for u in self.units if u.path == path), None)

    def definition_unit(self, name: str) -> Optional[ProjectUnit]:
        entry = self.module_index.get(name)
        if entry is None or entry.definition_path is None:
            return None
        return self.unit_at(entry.definition_path)

    def definition_table(self, name: str) -> Optional[ScopedSymbols]:
        """Tabla de símbolos de la parte de definición de name, si está cargada"""
        unit = self.definition_unit(name)
        return unit.symbols if unit is not None else None

    def private_to(self, name: str) -> Optional[Tuple[str, ...]]:
        """Módulos cliente de la directiva PRIVATETO de name (None si no la tiene)"""
        unit = self.definition_unit(name)
        if unit is None or unit.unit is None:
            return None
        return unit.unit.private_to

    def is_known(self, name: str) -> bool:
        return name in self.module_index or name in self.externals

    def imports_of(self, name: str) -> List[ImportEdge]:
        return [edge for edge in self.import_graph if edge.importer == name]


def distinct_imports(unit: CompilationUnit) -> List[Ident]:
    """Primer uso de cada módulo importado por la unidad (nivel módulo)"""
    seen: Dict[str, Ident] = {}
    for clause in unit.imports:
        for ident in clause.imported_modules:
            seen.setdefault(ident.name, ident)
    return list(seen.values())
