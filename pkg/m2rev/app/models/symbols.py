"""
Tablas de símbolos con alcances anidados.

Los símbolos son objetos mutables mientras se construye la tabla y se
tratan como de solo lectura una vez que el proyecto está cargado.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set

from app.models.ast import Expression, Ident, ProcedureHeading, TypeExpr
from app.schemas.common import SourceSpan
from app.schemas.diagnostic import Diagnostic


class SymbolKind(str, Enum):
    CONST = "const"
    TYPE = "type"
    VAR = "var"
    PROCEDURE = "procedure"
    MODULE = "module"
    IMPORT = "import"  # imported name whose defining module is not loaded
    FIELD = "field"    # record field visible inside WITH


class Origin(str, Enum):
    LOCAL = "local"
    IMPORTED = "imported"
    PERVASIVE = "pervasive"


class ScopeKind(str, Enum):
    PERVASIVE = "pervasive"
    MODULE = "module"
    PROCEDURE = "procedure"
    LOCAL_MODULE = "localModule"


class SetTypedness(str, Enum):
    IS_SET = "isSet"
    NOT_SET = "notSet"
    UNKNOWN = "unknown"


class NilCompatibility(str, Enum):
    ALLOWED = "allowed"
    LEGACY_RESTRICTED = "legacyRestricted"


@dataclass(eq=False)
class Symbol:
    """Entidad declarada, importada o pervasiva"""

    name: str
    kind: SymbolKind
    origin: Origin = Origin.LOCAL
    module: Optional[str] = None
    decl_span: Optional[SourceSpan] = None
    type_ref: Optional[TypeExpr] = None
    value: Optional[Expression] = None
    heading: Optional[ProcedureHeading] = None
    is_var_param: bool = False
    scope: Optional["Scope"] = None
    target: Optional["Symbol"] = None
    members: Dict[str, "Symbol"] = field(default_factory=dict)
    removed: bool = False
    revised_only: bool = False
    external: bool = False

    @property
    def definition(self) -> "Symbol":
        """Símbolo de origen: sigue las importaciones resueltas hasta la declaración"""
        symbol = self
        seen = 0
        while symbol.target is not None and seen < 32:
            symbol = symbol.target
            seen += 1
        return symbol

    @property
    def is_imported(self) -> bool:
        return self.origin == Origin.IMPORTED


@dataclass(eq=False)
class Scope:
    """Un nivel de la jerarquía módulo → procedimiento → módulo local"""

    kind: ScopeKind
    name: str
    parent: Optional["Scope"] = None
    table: Optional["ScopedSymbols"] = None
    symbols: Dict[str, Symbol] = field(default_factory=dict)
    children: List["Scope"] = field(default_factory=list)
    span: Optional[SourceSpan] = None

    @property
    def closed(self) -> bool:
        """Los módulos locales solo ven lo que importan explícitamente"""
        return self.kind == ScopeKind.LOCAL_MODULE

    def root(self) -> "Scope":
        scope = self
        while scope.parent is not None:
            scope = scope.parent
        return scope

    def lookup(self, name: str) -> Optional[Symbol]:
        scope: Optional[Scope] = self
        while scope is not None:
            if name in scope.symbols:
                return scope.symbols[name]
            if scope.closed:
                pervasive = scope.root()
                return pervasive.symbols.get(name)
            scope = scope.parent
        return None


@dataclass(eq=False)
class ScopedSymbols:
    """Resultado de build_symbols para una unidad de compilación"""

    module_name: str
    pervasive: Scope
    module_scope: Scope
    resolutions: Dict[int, Symbol] = field(default_factory=dict)
    unresolved: Dict[int, str] = field(default_factory=dict)
    uncertain: Set[int] = field(default_factory=set)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    def symbol_for(self, ident: Ident) -> Optional[Symbol]:
        """Símbolo al que resuelve un uso de identificador (None si no resuelve)"""
        return self.resolutions.get(ident.span.start)

    def is_unresolved(self, ident: Ident) -> bool:
        return ident.span.start in self.unresolved

    def is_uncertain(self, ident: Ident) -> bool:
        """True si el uso está dentro de un WITH cuyo tipo de registro se desconoce"""
        return ident.span.start in self.uncertain

    @property
    def exports(self) -> Dict[str, Symbol]:
        """Símbolos de nivel módulo (para unidades de definición)"""
        return self.module_scope.symbols


@dataclass(frozen=True)
class WriteSite:
    """Escritura sobre una variable importada"""

    span: SourceSpan
    module: str
    name: str
    kind: str  # "assignment" | "var-argument"
