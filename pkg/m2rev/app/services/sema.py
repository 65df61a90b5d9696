"""
Análisis semántico mínimo: tablas de símbolos con alcances, resolución de
identificadores y los hechos de tipo que necesitan las reglas.

No es un verificador de tipos completo. La inferencia de conjuntos es de
tres valores y responde "unknown" cuando falta evidencia.
"""

import logging
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from app.models.ast import (
    ArrayType,
    Assignment,
    Binary,
    Block,
    CaseStmt,
    CompilationUnit,
    ConstDecl,
    Designator,
    DerefSelector,
    EnumerationType,
    Expression,
    FieldDecl,
    FieldSelector,
    ForStmt,
    FormalType,
    FunctionCall,
    Ident,
    IfStmt,
    ImportClause,
    IndexSelector,
    Literal,
    LocalModuleDecl,
    LoopStmt,
    NamedType,
    OpaqueType,
    PointerType,
    ProcedureCall,
    ProcedureDecl,
    ProcedureType,
    QualIdent,
    RangeExpr,
    RecordType,
    RepeatStmt,
    ReturnStmt,
    SetConstructor,
    SetType,
    Statement,
    SubrangeType,
    TypeConversion,
    TypeDecl,
    TypeExpr,
    Unary,
    UnitKind,
    VarDecl,
    VariantPart,
    WhileStmt,
    WithStmt,
    walk,
)
from app.models.symbols import (
    NilCompatibility,
    Origin,
    Scope,
    ScopeKind,
    ScopedSymbols,
    SetTypedness,
    Symbol,
    SymbolKind,
    WriteSite,
)
from app.schemas.common import Severity
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import RuleId
from app.services.dialect import REVISED_ADDITIONS, DialectProfile

logger = logging.getLogger(__name__)

PERVASIVE_TYPES = frozenset({
    "BITSET", "BOOLEAN", "CARDINAL", "CHAR", "COMPLEX", "INTEGER", "LONGCOMPLEX",
    "LONGINT", "LONGREAL", "PROC", "PROTECTION", "REAL", "LONGCARD", "UNICHAR",
})
PERVASIVE_CONSTANTS = frozenset({"FALSE", "NIL", "TRUE", "INTERRUPTIBLE", "UNINTERRUPTIBLE"})

# Pervasive procedures whose first parameter is VAR
VAR_FIRST_PERVASIVES = frozenset({"INC", "DEC", "INCL", "EXCL", "NEW", "DISPOSE"})

PERVASIVE_RESULTS: Dict[str, str] = {
    "ABS": "INTEGER", "CAP": "CHAR", "CHR": "CHAR", "ORD": "CARDINAL", "ODD": "BOOLEAN",
    "HIGH": "CARDINAL", "SIZE": "CARDINAL", "LENGTH": "CARDINAL", "MAX": "CARDINAL",
    "MIN": "CARDINAL", "INT": "INTEGER", "CARD": "CARDINAL", "FLOAT": "REAL",
    "LFLOAT": "LONGREAL", "TRUNC": "CARDINAL", "UCHR": "UNICHAR", "CMPLX": "COMPLEX",
    "RE": "REAL", "IM": "REAL",
}

SYSTEM_MODULE = "SYSTEM"
BITSET_FAMILY = re.compile(r"BITSET\d*")

MAX_TYPE_DEPTH = 32


class TypeCategory(str, Enum):
    SET = "set"
    SCALAR = "scalar"
    POINTER = "pointer"
    OPAQUE = "opaque"
    PROCEDURE = "procedure"
    RECORD = "record"
    ARRAY = "array"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TypeFact:
    """Tipo resuelto: una expresión de tipo con su alcance, o un tipo incorporado"""

    expr: Optional[TypeExpr] = None
    scope: Optional[Scope] = None
    builtin: Optional[str] = None


@dataclass(frozen=True)
class RootInfo:
    """Raíz efectiva de un designador (M.v cuenta como raíz v del módulo M)"""

    symbol: Optional[Symbol]
    module: Optional[str]
    name: str
    consumed: int


@dataclass(frozen=True)
class NilContext:
    """Sitio donde NIL se asigna o compara con un operando de la categoría dada"""

    profile: DialectProfile
    category: TypeCategory


# ----------------------------------------------------------------------
# Symbol table construction


def _pervasive_symbol(name: str, profile: DialectProfile) -> Symbol:
    if name in PERVASIVE_TYPES:
        kind = SymbolKind.TYPE
    elif name in PERVASIVE_CONSTANTS:
        kind = SymbolKind.CONST
    else:
        kind = SymbolKind.PROCEDURE
    return Symbol(
        name=name,
        kind=kind,
        origin=Origin.PERVASIVE,
        removed=name in profile.removed_pervasives,
        revised_only=name in REVISED_ADDITIONS,
    )


class SymbolBuilder:
    """Construye la tabla de símbolos de una unidad"""

    def __init__(self, unit: CompilationUnit, profile: DialectProfile, project=None, file: str = ""):
        self.unit = unit
        self.profile = profile
        self.project = project
        self.file = file

        pervasive = Scope(kind=ScopeKind.PERVASIVE, name="")
        for name in sorted(profile.pervasive_idents):
            pervasive.symbols[name] = _pervasive_symbol(name, profile)
        module_scope = Scope(
            kind=ScopeKind.MODULE, name=unit.name.name, parent=pervasive, span=unit.span
        )
        pervasive.children.append(module_scope)
        self.table = ScopedSymbols(
            module_name=unit.name.name, pervasive=pervasive, module_scope=module_scope
        )
        pervasive.table = module_scope.table = self.table
        for symbol in pervasive.symbols.values():
            symbol.scope = pervasive

        self.inherited: Set[str] = set()
        self.forward: Set[int] = set()
        self.scope_of: Dict[int, Scope] = {}
        self.with_stack: List[Optional[Dict[str, Symbol]]] = []

    # -- entry point ---------------------------------------------------

    def build(self) -> ScopedSymbols:
        unit = self.unit
        scope = self.table.module_scope

        if unit.kind == UnitKind.IMPLEMENTATION and self.project is not None:
            definition = self.project.definition_table(unit.name.name)
            if definition is not None:
                scope.symbols.update(definition.exports)
                self.inherited = set(definition.exports)

        for clause in unit.imports:
            self.import_clause(scope, clause)
        self.declare_all(scope, unit.declarations)

        self.resolve_declarations(scope, unit.declarations)
        if unit.body is not None:
            self.resolve_block(scope, unit.body)
        logger.debug(
            "symbols for %s: %d resolved, %d unresolved",
            unit.name.name, len(self.table.resolutions), len(self.table.unresolved),
        )
        return self.table

    # -- declarations --------------------------------------------------

    def declare(self, scope: Scope, ident: Ident, symbol: Symbol) -> None:
        existing = scope.symbols.get(ident.name)
        if existing is not None and existing is not symbol:
            if scope is self.table.module_scope and ident.name in self.inherited:
                self.inherited.discard(ident.name)
            elif id(existing) in self.forward and symbol.kind == SymbolKind.PROCEDURE:
                self.forward.discard(id(existing))
            else:
                self.table.diagnostics.append(Diagnostic(
                    rule=RuleId.E03.value,
                    severity=Severity.ERROR,
                    span=ident.span,
                    message=f"'{ident.name}' is already declared in this scope",
                    file=self.file,
                ))
                return
        if symbol.scope is None:
            symbol.scope = scope
        if symbol.decl_span is None:
            symbol.decl_span = ident.span
        scope.symbols[ident.name] = symbol

    def declare_all(self, scope: Scope, declarations) -> None:
        local_modules: List[LocalModuleDecl] = []
        for decl in declarations:
            if isinstance(decl, ConstDecl):
                self.declare(scope, decl.name, Symbol(
                    name=decl.name.name, kind=SymbolKind.CONST, value=decl.value,
                ))
            elif isinstance(decl, TypeDecl):
                self.declare(scope, decl.name, Symbol(
                    name=decl.name.name, kind=SymbolKind.TYPE, type_ref=decl.type,
                ))
                self.declare_enumeration(scope, decl.type)
            elif isinstance(decl, VarDecl):
                for name in decl.names:
                    self.declare(scope, name, Symbol(
                        name=name.name, kind=SymbolKind.VAR, type_ref=decl.type,
                    ))
                self.declare_enumeration(scope, decl.type)
            elif isinstance(decl, ProcedureDecl):
                self.declare_procedure(scope, decl)
            elif isinstance(decl, LocalModuleDecl):
                local_modules.append(decl)
        for decl in local_modules:
            self.declare_local_module(scope, decl)

    def declare_enumeration(self, scope: Scope, type_expr: TypeExpr) -> None:
        if isinstance(type_expr, EnumerationType):
            for value in type_expr.values:
                self.declare(scope, value, Symbol(
                    name=value.name, kind=SymbolKind.CONST, type_ref=type_expr,
                ))

    def declare_procedure(self, scope: Scope, decl: ProcedureDecl) -> None:
        heading = decl.heading
        symbol = Symbol(name=heading.name.name, kind=SymbolKind.PROCEDURE, heading=heading)
        self.declare(scope, heading.name, symbol)
        if decl.forward:
            self.forward.add(id(symbol))
            return

        proc_scope = Scope(kind=ScopeKind.PROCEDURE, name=heading.name.name,
                           parent=scope, table=self.table, span=decl.span)
        scope.children.append(proc_scope)
        self.scope_of[id(decl)] = proc_scope
        for param in heading.params:
            for name in param.names:
                self.declare(proc_scope, name, Symbol(
                    name=name.name, kind=SymbolKind.VAR, type_ref=param.type,
                    is_var_param=param.is_var,
                ))
        self.declare_all(proc_scope, decl.declarations)

    def declare_local_module(self, scope: Scope, decl: LocalModuleDecl) -> None:
        module_scope = Scope(kind=ScopeKind.LOCAL_MODULE, name=decl.name.name,
                             parent=scope, table=self.table, span=decl.span)
        scope.children.append(module_scope)
        self.scope_of[id(decl)] = module_scope

        for clause in decl.imports:
            self.import_clause(module_scope, clause)
        self.declare_all(module_scope, decl.declarations)

        exported: Dict[str, Symbol] = {}
        if decl.export is not None:
            for name in decl.export.names:
                symbol = module_scope.symbols.get(name.name)
                if symbol is None:
                    self.record(name, None)
                    continue
                self.record(name, symbol)
                exported[name.name] = symbol
        module_symbol = Symbol(name=decl.name.name, kind=SymbolKind.MODULE, members=exported)
        self.declare(scope, decl.name, module_symbol)
        if decl.export is not None and not decl.export.qualified:
            for name in decl.export.names:
                if name.name in exported:
                    self.declare(scope, name, exported[name.name])

    # -- imports -------------------------------------------------------

    def module_symbol(self, name: str) -> Symbol:
        table = self.project.definition_table(name) if self.project is not None else None
        return Symbol(
            name=name,
            kind=SymbolKind.MODULE,
            origin=Origin.IMPORTED,
            module=name,
            members=dict(table.exports) if table is not None else {},
            external=table is None,
        )

    def import_clause(self, scope: Scope, clause: ImportClause) -> None:
        if clause.module is None:
            for name in clause.names:
                if scope.kind == ScopeKind.LOCAL_MODULE and scope.parent is not None:
                    outer = scope.parent.lookup(name.name)
                    if outer is not None:
                        self.declare(scope, name, outer)
                        self.record(name, outer)
                        continue
                self.declare(scope, name, self.module_symbol(name.name))
            return

        source_name = clause.module.name
        if scope.kind == ScopeKind.LOCAL_MODULE and scope.parent is not None:
            outer = scope.parent.lookup(source_name)
            if outer is not None and outer.kind == SymbolKind.MODULE and not outer.is_imported:
                self.record(clause.module, outer)
                for name in clause.names:
                    member = outer.members.get(name.name)
                    self.record(name, member)
                    if member is not None:
                        self.declare(scope, name, member)
                return

        source = self.module_symbol(source_name)
        for name in clause.names:
            target = source.members.get(name.name)
            self.declare(scope, name, Symbol(
                name=name.name,
                kind=target.definition.kind if target is not None else SymbolKind.IMPORT,
                origin=Origin.IMPORTED,
                module=source_name,
                target=target,
                external=target is None,
            ))

    # -- resolution ----------------------------------------------------

    def record(self, ident: Ident, symbol: Optional[Symbol]) -> None:
        if symbol is None:
            self.table.unresolved[ident.span.start] = ident.name
        else:
            self.table.resolutions[ident.span.start] = symbol

    def lookup_plain(self, ident: Ident, scope: Scope) -> Optional[Symbol]:
        for fields in reversed(self.with_stack):
            if fields is None:
                self.table.uncertain.add(ident.span.start)
                break
            if ident.name in fields:
                return fields[ident.name]
        return scope.lookup(ident.name)

    def resolve_qualident(self, qualident: QualIdent, scope: Scope) -> None:
        first = qualident.parts[0]
        symbol = scope.lookup(first.name)
        self.record(first, symbol)
        if len(qualident.parts) > 1:
            member = None
            if symbol is not None and symbol.definition.kind == SymbolKind.MODULE:
                member = symbol.definition.members.get(qualident.parts[1].name)
            self.record(qualident.parts[1], member)

    def resolve_type(self, type_expr: Optional[TypeExpr], scope: Scope) -> None:
        if type_expr is None:
            return
        if isinstance(type_expr, (NamedType, FormalType)):
            self.resolve_qualident(type_expr.name, scope)
        elif isinstance(type_expr, SubrangeType):
            if type_expr.base is not None:
                self.resolve_qualident(type_expr.base, scope)
            self.resolve_expr(type_expr.low, scope)
            self.resolve_expr(type_expr.high, scope)
        elif isinstance(type_expr, ArrayType):
            for dimension in type_expr.dimensions:
                self.resolve_type(dimension, scope)
            self.resolve_type(type_expr.element, scope)
        elif isinstance(type_expr, RecordType):
            if type_expr.base_type is not None and type_expr.base_type.name is not None:
                self.resolve_qualident(type_expr.base_type.name, scope)
            self.resolve_field_items(type_expr.items, scope)
        elif isinstance(type_expr, (SetType,)):
            self.resolve_type(type_expr.base, scope)
        elif isinstance(type_expr, PointerType):
            self.resolve_type(type_expr.target, scope)
        elif isinstance(type_expr, ProcedureType):
            for param in type_expr.params:
                self.resolve_type(param.type, scope)
            if type_expr.result is not None:
                self.resolve_qualident(type_expr.result, scope)

    def resolve_field_items(self, items, scope: Scope) -> None:
        for item in items:
            if isinstance(item, FieldDecl):
                self.resolve_type(item.type, scope)
            elif isinstance(item, VariantPart):
                self.resolve_qualident(item.tag_type, scope)
                for variant in item.variants:
                    for label in variant.labels:
                        self.resolve_expr(label.low, scope)
                        self.resolve_expr(label.high, scope)
                    self.resolve_field_items(variant.items, scope)
                if item.else_items:
                    self.resolve_field_items(item.else_items, scope)

    def resolve_declarations(self, scope: Scope, declarations) -> None:
        for decl in declarations:
            if isinstance(decl, ConstDecl):
                self.resolve_expr(decl.value, scope)
            elif isinstance(decl, (TypeDecl, VarDecl)):
                self.resolve_type(decl.type, scope)
            elif isinstance(decl, ProcedureDecl):
                for param in decl.heading.params:
                    self.resolve_type(param.type, scope)
                if decl.heading.result is not None:
                    self.resolve_qualident(decl.heading.result, scope)
                inner = self.scope_of.get(id(decl))
                if inner is not None:
                    self.resolve_declarations(inner, decl.declarations)
                    if decl.body is not None:
                        self.resolve_block(inner, decl.body)
            elif isinstance(decl, LocalModuleDecl):
                inner = self.scope_of.get(id(decl))
                if inner is not None:
                    self.resolve_declarations(inner, decl.declarations)
                    if decl.body is not None:
                        self.resolve_block(inner, decl.body)

    def resolve_block(self, scope: Scope, block: Block) -> None:
        for sequence in (block.body, block.except_body, block.finally_body, block.finally_except):
            if sequence:
                self.resolve_statements(sequence, scope)

    def resolve_statements(self, statements, scope: Scope) -> None:
        for statement in statements or ():
            self.resolve_statement(statement, scope)

    def resolve_statement(self, statement: Statement, scope: Scope) -> None:
        if isinstance(statement, Assignment):
            self.resolve_designator(statement.target, scope)
            self.resolve_expr(statement.value, scope)
        elif isinstance(statement, ProcedureCall):
            self.resolve_designator(statement.callee, scope)
            for arg in statement.args:
                self.resolve_expr(arg, scope)
        elif isinstance(statement, IfStmt):
            for branch in statement.branches:
                self.resolve_expr(branch.condition, scope)
                self.resolve_statements(branch.body, scope)
            self.resolve_statements(statement.else_body, scope)
        elif isinstance(statement, CaseStmt):
            self.resolve_expr(statement.selector, scope)
            for arm in statement.arms:
                for label in arm.labels:
                    self.resolve_expr(label.low, scope)
                    self.resolve_expr(label.high, scope)
                self.resolve_statements(arm.body, scope)
            self.resolve_statements(statement.else_body, scope)
        elif isinstance(statement, (WhileStmt, RepeatStmt)):
            self.resolve_expr(statement.condition, scope)
            self.resolve_statements(statement.body, scope)
        elif isinstance(statement, LoopStmt):
            self.resolve_statements(statement.body, scope)
        elif isinstance(statement, ForStmt):
            self.record(statement.control, self.lookup_plain(statement.control, scope))
            self.resolve_expr(statement.start, scope)
            self.resolve_expr(statement.stop, scope)
            self.resolve_expr(statement.step, scope)
            self.resolve_statements(statement.body, scope)
        elif isinstance(statement, WithStmt):
            self.resolve_designator(statement.designator, scope)
            self.with_stack.append(self.with_fields(statement.designator))
            self.resolve_statements(statement.body, scope)
            self.with_stack.pop()
        elif isinstance(statement, ReturnStmt):
            self.resolve_expr(statement.value, scope)

    def resolve_expr(self, expr, scope: Scope) -> None:
        if expr is None or isinstance(expr, Literal):
            return
        if isinstance(expr, Designator):
            self.resolve_designator(expr, scope)
        elif isinstance(expr, FunctionCall):
            self.resolve_designator(expr.callee, scope)
            for arg in expr.args:
                self.resolve_expr(arg, scope)
        elif isinstance(expr, SetConstructor):
            if expr.type_name is not None:
                self.resolve_qualident(expr.type_name, scope)
            for element in expr.elements:
                self.resolve_expr(element, scope)
        elif isinstance(expr, RangeExpr):
            self.resolve_expr(expr.low, scope)
            self.resolve_expr(expr.high, scope)
        elif isinstance(expr, Unary):
            self.resolve_expr(expr.operand, scope)
        elif isinstance(expr, Binary):
            self.resolve_expr(expr.lhs, scope)
            self.resolve_expr(expr.rhs, scope)
        elif isinstance(expr, TypeConversion):
            self.resolve_expr(expr.operand, scope)
            self.resolve_qualident(expr.target, scope)

    def resolve_designator(self, designator: Designator, scope: Scope) -> None:
        symbol = self.lookup_plain(designator.root, scope)
        self.record(designator.root, symbol)
        selectors = designator.selectors
        if (
            symbol is not None
            and symbol.definition.kind == SymbolKind.MODULE
            and selectors
            and isinstance(selectors[0], FieldSelector)
        ):
            self.record(selectors[0].name, symbol.definition.members.get(selectors[0].name.name))
        for selector in selectors:
            if isinstance(selector, IndexSelector):
                for index in selector.indices:
                    self.resolve_expr(index, scope)

    def with_fields(self, designator: Designator) -> Optional[Dict[str, Symbol]]:
        fact = designator_type(designator, self.table)
        if type_category(fact) != TypeCategory.RECORD:
            return None
        info = root_info(designator, self.table)
        fields: Dict[str, Symbol] = {}
        for name, (field_type, field_scope) in record_fields(fact).items():
            fields[name] = Symbol(
                name=name,
                kind=SymbolKind.FIELD,
                origin=Origin.IMPORTED if info.module else Origin.LOCAL,
                module=info.module,
                type_ref=field_type,
                scope=field_scope,
            )
        return fields


def build_symbols(
    unit: CompilationUnit,
    profile: DialectProfile,
    project=None,
    file: str = "",
) -> ScopedSymbols:
    """
    Construye la tabla de símbolos de una unidad.

    Args:
        unit: Unidad analizada
        profile: Perfil activo (define los pervasivos)
        project: ProjectModel opcional para resolver importaciones
        file: Ruta usada en los diagnósticos de declaración

    Returns:
        ScopedSymbols con resoluciones, marcas de no resueltos y
        diagnósticos M2R-E03 por declaraciones duplicadas
    """
    return SymbolBuilder(unit, profile, project, file).build()


# ----------------------------------------------------------------------
# Type facts


def lookup_type_symbol(qualident: QualIdent, scope: Optional[Scope]) -> Optional[Symbol]:
    if scope is None:
        return None
    symbol = scope.lookup(qualident.parts[0].name)
    if symbol is not None and len(qualident.parts) > 1:
        if symbol.definition.kind != SymbolKind.MODULE:
            return None
        symbol = symbol.definition.members.get(qualident.parts[1].name)
    return symbol


def type_of_type_symbol(symbol: Optional[Symbol], depth: int = 0) -> Optional[TypeFact]:
    """Hecho de tipo denotado por un símbolo de tipo"""
    if symbol is None or depth > MAX_TYPE_DEPTH:
        return None
    definition = symbol.definition
    if definition.kind == SymbolKind.IMPORT:
        if definition.module == SYSTEM_MODULE:
            return TypeFact(builtin=definition.name)
        return None
    if definition.kind != SymbolKind.TYPE:
        return None
    if definition.origin == Origin.PERVASIVE:
        return TypeFact(builtin=definition.name)
    return resolve_type_fact(definition.type_ref, definition.scope, depth + 1)


def resolve_type_fact(
    type_expr: Optional[TypeExpr],
    scope: Optional[Scope],
    depth: int = 0,
) -> Optional[TypeFact]:
    """Sigue los alias con nombre hasta una expresión de tipo estructural"""
    if type_expr is None or depth > MAX_TYPE_DEPTH:
        return None
    if isinstance(type_expr, NamedType) or (
        isinstance(type_expr, FormalType) and type_expr.open_levels == 0
    ):
        return type_of_type_symbol(lookup_type_symbol(type_expr.name, scope), depth + 1)
    return TypeFact(expr=type_expr, scope=scope)


def type_category(fact: Optional[TypeFact]) -> TypeCategory:
    if fact is None:
        return TypeCategory.UNKNOWN
    if fact.builtin is not None:
        if BITSET_FAMILY.fullmatch(fact.builtin):
            return TypeCategory.SET
        if fact.builtin == "PROC":
            return TypeCategory.PROCEDURE
        if fact.builtin in ("ADDRESS", "NIL"):
            return TypeCategory.POINTER
        return TypeCategory.SCALAR
    expr = fact.expr
    if isinstance(expr, SetType):
        return TypeCategory.SET
    if isinstance(expr, PointerType):
        return TypeCategory.POINTER
    if isinstance(expr, OpaqueType):
        return TypeCategory.OPAQUE
    if isinstance(expr, ProcedureType):
        return TypeCategory.PROCEDURE
    if isinstance(expr, RecordType):
        return TypeCategory.RECORD
    if isinstance(expr, (ArrayType, FormalType)):
        return TypeCategory.ARRAY
    if isinstance(expr, (SubrangeType, EnumerationType)):
        return TypeCategory.SCALAR
    return TypeCategory.UNKNOWN


def record_fields(fact: TypeFact, depth: int = 0) -> Dict[str, Tuple[TypeExpr, Optional[Scope]]]:
    """Campos visibles de un registro, incluidos los del tipo base y las variantes"""
    fields: Dict[str, Tuple[TypeExpr, Optional[Scope]]] = {}
    record = fact.expr
    if not isinstance(record, RecordType) or depth > MAX_TYPE_DEPTH:
        return fields
    if record.base_type is not None and record.base_type.name is not None:
        base = type_of_type_symbol(lookup_type_symbol(record.base_type.name, fact.scope))
        if base is not None:
            fields.update(record_fields(base, depth + 1))

    def collect(items) -> None:
        for item in items:
            if isinstance(item, FieldDecl):
                for name in item.names:
                    fields[name.name] = (item.type, fact.scope)
            elif isinstance(item, VariantPart):
                if item.tag_field is not None:
                    tag_type = NamedType(span=item.tag_type.span, name=item.tag_type)
                    fields[item.tag_field.name] = (tag_type, fact.scope)
                for variant in item.variants:
                    collect(variant.items)
                if item.else_items:
                    collect(item.else_items)

    collect(record.items)
    return fields


def _select(fact: Optional[TypeFact], selector) -> Optional[TypeFact]:
    if fact is None:
        return None
    if isinstance(selector, FieldSelector):
        if type_category(fact) != TypeCategory.RECORD:
            return None
        entry = record_fields(fact).get(selector.name.name)
        if entry is None:
            return None
        return resolve_type_fact(entry[0], entry[1])
    if isinstance(selector, DerefSelector):
        if isinstance(fact.expr, PointerType):
            return resolve_type_fact(fact.expr.target, fact.scope)
        return None
    if isinstance(selector, IndexSelector):
        remaining = len(selector.indices)
        current: Optional[TypeFact] = fact
        while remaining > 0 and current is not None:
            expr = current.expr
            if isinstance(expr, ArrayType):
                if remaining < len(expr.dimensions):
                    return None
                remaining -= len(expr.dimensions)
                current = resolve_type_fact(expr.element, current.scope)
            elif isinstance(expr, FormalType) and expr.open_levels > 0:
                remaining -= 1
                current = resolve_type_fact(
                    replace(expr, open_levels=expr.open_levels - 1), current.scope
                )
            else:
                return None
        return current
    return None


def root_info(designator: Designator, table: ScopedSymbols) -> RootInfo:
    """Raíz efectiva del designador y módulo de origen si es importada"""
    symbol = table.symbol_for(designator.root)
    if symbol is None:
        return RootInfo(symbol=None, module=None, name=designator.root.name, consumed=0)
    selectors = designator.selectors
    if (
        symbol.definition.kind == SymbolKind.MODULE
        and selectors
        and isinstance(selectors[0], FieldSelector)
    ):
        member = table.symbol_for(selectors[0].name)
        module = symbol.module if symbol.is_imported else None
        return RootInfo(symbol=member, module=module, name=selectors[0].name.name, consumed=1)
    module = symbol.module if symbol.is_imported else None
    return RootInfo(symbol=symbol, module=module, name=designator.root.name, consumed=0)


def is_system_name(info: RootInfo, name: str) -> bool:
    """True si la raíz designa el identificador name del pseudo-módulo SYSTEM"""
    if info.name != name:
        return False
    if info.symbol is None:
        return info.module == SYSTEM_MODULE
    definition = info.symbol.definition
    return definition.kind == SymbolKind.IMPORT and definition.module == SYSTEM_MODULE


def _value_type(symbol: Symbol) -> Optional[TypeFact]:
    definition = symbol.definition
    if definition.kind in (SymbolKind.VAR, SymbolKind.FIELD):
        if isinstance(definition.type_ref, FormalType) and definition.type_ref.open_levels > 0:
            return TypeFact(expr=definition.type_ref, scope=definition.scope)
        return resolve_type_fact(definition.type_ref, definition.scope)
    if definition.kind == SymbolKind.CONST:
        if definition.origin == Origin.PERVASIVE:
            return TypeFact(builtin="NIL" if definition.name == "NIL" else "BOOLEAN")
        if definition.type_ref is not None:
            return TypeFact(expr=definition.type_ref, scope=definition.scope)
        return None
    if definition.kind == SymbolKind.PROCEDURE:
        return TypeFact(builtin="PROC")
    return None


def designator_type(designator: Designator, table: ScopedSymbols) -> Optional[TypeFact]:
    """Tipo de un designador a través de selectores de campo, índice y desreferencia"""
    if table.is_uncertain(designator.root):
        return None
    info = root_info(designator, table)
    if info.symbol is None:
        return None
    fact = _value_type(info.symbol)
    for selector in designator.selectors[info.consumed:]:
        fact = _select(fact, selector)
        if fact is None:
            return None
    return fact


def _type_designator_fact(expr: Expression, table: ScopedSymbols) -> Optional[TypeFact]:
    if not isinstance(expr, Designator):
        return None
    info = root_info(expr, table)
    if len(expr.selectors) != info.consumed:
        return None
    if info.symbol is None:
        return None
    return type_of_type_symbol(info.symbol)


def _call_type(call: FunctionCall, table: ScopedSymbols) -> Optional[TypeFact]:
    info = root_info(call.callee, table)
    args = call.args
    if is_system_name(info, "CAST") and args:
        return _type_designator_fact(args[0], table)
    if (is_system_name(info, "SHIFT") or is_system_name(info, "ROTATE")) and args:
        return expression_type(args[0], table)
    symbol = info.symbol
    if symbol is None or len(call.callee.selectors) != info.consumed:
        return None
    definition = symbol.definition
    if definition.origin == Origin.PERVASIVE:
        if definition.name == "VAL" and args:
            return _type_designator_fact(args[0], table)
        result = PERVASIVE_RESULTS.get(definition.name)
        return TypeFact(builtin=result) if result else None
    if definition.kind == SymbolKind.TYPE:
        return type_of_type_symbol(definition)
    if definition.kind == SymbolKind.PROCEDURE and definition.heading is not None:
        result = definition.heading.result
        if result is None:
            return None
        return type_of_type_symbol(lookup_type_symbol(result, definition.scope))
    if definition.kind in (SymbolKind.VAR, SymbolKind.FIELD):
        fact = _value_type(definition)
        if fact is not None and isinstance(fact.expr, ProcedureType) and fact.expr.result:
            return type_of_type_symbol(lookup_type_symbol(fact.expr.result, fact.scope))
    return None


def expression_type(expr: Optional[Expression], table: ScopedSymbols) -> Optional[TypeFact]:
    """Tipo de una expresión cuando hay evidencia; None en caso contrario"""
    if isinstance(expr, Designator):
        return designator_type(expr, table)
    if isinstance(expr, FunctionCall):
        return _call_type(expr, table)
    if isinstance(expr, TypeConversion):
        return type_of_type_symbol(table.symbol_for(expr.target.last))
    return None


def _from_fact(fact: Optional[TypeFact]) -> SetTypedness:
    category = type_category(fact)
    if category == TypeCategory.SET:
        return SetTypedness.IS_SET
    if category == TypeCategory.UNKNOWN:
        return SetTypedness.UNKNOWN
    return SetTypedness.NOT_SET


def set_typedness(expr: Expression, table: ScopedSymbols, depth: int = 0) -> SetTypedness:
    """
    Determina si una expresión es de tipo conjunto.

    Args:
        expr: Expresión de una unidad analizada
        table: Tabla de símbolos de esa unidad

    Returns:
        isSet / notSet con evidencia, unknown en otro caso
    """
    if depth > MAX_TYPE_DEPTH:
        return SetTypedness.UNKNOWN
    if isinstance(expr, SetConstructor):
        return SetTypedness.IS_SET
    if isinstance(expr, Literal):
        return SetTypedness.NOT_SET
    if isinstance(expr, Designator):
        if table.is_uncertain(expr.root):
            return SetTypedness.UNKNOWN
        info = root_info(expr, table)
        if info.symbol is None:
            return SetTypedness.UNKNOWN
        definition = info.symbol.definition
        if (
            definition.kind == SymbolKind.CONST
            and definition.value is not None
            and len(expr.selectors) == info.consumed
            and definition.scope is not None
            and definition.scope.table is not None
        ):
            return set_typedness(definition.value, definition.scope.table, depth + 1)
        return _from_fact(designator_type(expr, table))
    if isinstance(expr, FunctionCall):
        info = root_info(expr.callee, table)
        if (is_system_name(info, "SHIFT") or is_system_name(info, "ROTATE")) and expr.args:
            return set_typedness(expr.args[0], table, depth + 1)
        return _from_fact(_call_type(expr, table))
    if isinstance(expr, TypeConversion):
        return _from_fact(expression_type(expr, table))
    if isinstance(expr, Unary):
        return SetTypedness.NOT_SET
    if isinstance(expr, Binary):
        if expr.op == "\\":
            return SetTypedness.IS_SET
        if expr.op in ("+", "-", "*", "/"):
            left = set_typedness(expr.lhs, table, depth + 1)
            right = set_typedness(expr.rhs, table, depth + 1)
            if SetTypedness.NOT_SET in (left, right):
                return SetTypedness.NOT_SET
            if left == right == SetTypedness.IS_SET:
                return SetTypedness.IS_SET
            return SetTypedness.UNKNOWN
        return SetTypedness.NOT_SET
    return SetTypedness.UNKNOWN


# ----------------------------------------------------------------------
# Imported writes


def var_parameter_flags(callee: Designator, table: ScopedSymbols) -> Optional[List[bool]]:
    """Marca VAR por argumento si la firma del procedimiento llamado es conocida"""
    info = root_info(callee, table)
    if info.symbol is None or len(callee.selectors) != info.consumed:
        return None
    definition = info.symbol.definition
    if definition.origin == Origin.PERVASIVE and definition.name in VAR_FIRST_PERVASIVES:
        return [True]
    if definition.kind == SymbolKind.PROCEDURE and definition.heading is not None:
        return [param.is_var for param in definition.heading.params for _ in param.names]
    if definition.kind in (SymbolKind.VAR, SymbolKind.FIELD):
        fact = _value_type(definition)
        if fact is not None and isinstance(fact.expr, ProcedureType):
            return [param.is_var for param in fact.expr.params]
    return None


def _written_root(designator: Designator, table: ScopedSymbols) -> Optional[RootInfo]:
    if table.is_uncertain(designator.root):
        return None
    info = root_info(designator, table)
    if info.module is None:
        return None
    if info.symbol is not None and info.symbol.definition.kind not in (
        SymbolKind.VAR, SymbolKind.IMPORT, SymbolKind.FIELD
    ):
        return None
    return info


def find_imported_writes(unit: CompilationUnit, table: ScopedSymbols) -> List[WriteSite]:
    """
    Localiza escrituras sobre variables importadas.

    Args:
        unit: Unidad analizada
        table: Su tabla de símbolos

    Returns:
        Asignaciones con raíz importada y argumentos pasados a parámetros VAR
        cuando la firma es conocida, en orden de aparición
    """
    sites: List[WriteSite] = []
    for node in walk(unit):
        if isinstance(node, Assignment):
            info = _written_root(node.target, table)
            if info is not None:
                sites.append(WriteSite(
                    span=node.span, module=info.module, name=info.name, kind="assignment",
                ))
        elif isinstance(node, (ProcedureCall, FunctionCall)):
            flags = var_parameter_flags(node.callee, table)
            if not flags:
                continue
            for arg, is_var in zip(node.args, flags):
                if not is_var or not isinstance(arg, Designator):
                    continue
                info = _written_root(arg, table)
                if info is not None:
                    sites.append(WriteSite(
                        span=arg.span, module=info.module, name=info.name, kind="var-argument",
                    ))
    sites.sort(key=lambda site: site.span.start)
    return sites


# ----------------------------------------------------------------------
# NIL compatibility


def classify_nil_compatibility(context: NilContext) -> NilCompatibility:
    """
    Clasifica un sitio de asignación o comparación con NIL.

    Bajo el perfil legado, los operandos opacos y de tipo procedimiento son
    solo una advertencia informativa; la herramienta nunca rechaza código
    legal en ese dialecto.
    """
    if context.profile.is_revised:
        return NilCompatibility.ALLOWED
    if context.category in (TypeCategory.OPAQUE, TypeCategory.PROCEDURE):
        return NilCompatibility.LEGACY_RESTRICTED
    return NilCompatibility.ALLOWED


def is_nil(expr: Optional[Expression], table: ScopedSymbols) -> bool:
    """True si la expresión es el pervasivo NIL"""
    if not isinstance(expr, Designator) or expr.selectors:
        return False
    symbol = table.symbol_for(expr.root)
    return symbol is not None and symbol.origin == Origin.PERVASIVE and symbol.name == "NIL"
