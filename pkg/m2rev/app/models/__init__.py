"""
Modelos de dominio: AST, tablas de símbolos y proyecto.
"""

from app.models.ast import CompilationUnit, Node, UnitKind, walk
from app.models.project import ModuleEntry, ProjectModel, ProjectUnit
from app.models.symbols import Scope, ScopedSymbols, Symbol, SymbolKind

__all__ = [
    "CompilationUnit",
    "ModuleEntry",
    "Node",
    "ProjectModel",
    "ProjectUnit",
    "Scope",
    "ScopedSymbols",
    "Symbol",
    "SymbolKind",
    "UnitKind",
    "walk",
]
