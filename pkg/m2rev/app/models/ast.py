"""
Modelo del árbol sintáctico (AST) de una unidad de compilación.

Los nodos son inmutables. Los spans y la cantidad de paréntesis no
participan en la igualdad: dos árboles son iguales si su estructura lo es.
"""

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Iterator, Optional, Tuple, Union

from app.schemas.common import SourceSpan


@dataclass(frozen=True, kw_only=True)
class Node:
    span: SourceSpan = field(compare=False, repr=False)


def children(node: Node) -> Iterator[Node]:
    """Hijos directos de un nodo, en orden de declaración de campos"""
    for f in fields(node):
        yield from _nodes_in(getattr(node, f.name))


def _nodes_in(value) -> Iterator[Node]:
    if isinstance(value, Node):
        yield value
    elif isinstance(value, tuple):
        for item in value:
            yield from _nodes_in(item)


def walk(node: Node) -> Iterator[Node]:
    """Recorrido en preorden"""
    yield node
    for child in children(node):
        yield from walk(child)


def walk_with_parent(node: Node, parent: Optional[Node] = None) -> Iterator[Tuple[Node, Optional[Node]]]:
    """Recorrido en preorden que incluye el padre de cada nodo"""
    yield node, parent
    for child in children(node):
        yield from walk_with_parent(child, node)


# ----------------------------------------------------------------------
# Names


@dataclass(frozen=True, kw_only=True)
class Ident(Node):
    name: str


@dataclass(frozen=True, kw_only=True)
class QualIdent(Node):
    parts: Tuple[Ident, ...]

    @property
    def name(self) -> str:
        return ".".join(part.name for part in self.parts)

    @property
    def last(self) -> Ident:
        return self.parts[-1]


# ----------------------------------------------------------------------
# Expressions


@dataclass(frozen=True, kw_only=True)
class Expression(Node):
    parens: int = field(default=0, compare=False, repr=False)

    @property
    def is_factor(self) -> bool:
        """True si la expresión puede usarse como operando de '::' sin paréntesis"""
        return self.parens > 0


class LiteralKind(str, Enum):
    NUMBER = "number"
    OCTAL = "octal"
    CHAR = "char"
    REAL = "real"
    STRING = "string"


@dataclass(frozen=True, kw_only=True)
class Literal(Expression):
    kind: LiteralKind
    value: Union[int, float, str]
    text: str

    @property
    def is_factor(self) -> bool:
        return True


@dataclass(frozen=True, kw_only=True)
class FieldSelector(Node):
    name: Ident


@dataclass(frozen=True, kw_only=True)
class IndexSelector(Node):
    indices: Tuple[Expression, ...]


@dataclass(frozen=True, kw_only=True)
class DerefSelector(Node):
    pass


Selector = Union[FieldSelector, IndexSelector, DerefSelector]


@dataclass(frozen=True, kw_only=True)
class Designator(Expression):
    root: Ident
    selectors: Tuple[Selector, ...] = ()

    @property
    def is_factor(self) -> bool:
        return True

    @property
    def is_plain(self) -> bool:
        return not self.selectors


@dataclass(frozen=True, kw_only=True)
class FunctionCall(Expression):
    callee: Designator
    args: Tuple[Expression, ...] = ()

    @property
    def is_factor(self) -> bool:
        return True


@dataclass(frozen=True, kw_only=True)
class RangeExpr(Node):
    low: Expression
    high: Expression


@dataclass(frozen=True, kw_only=True)
class SetConstructor(Expression):
    type_name: Optional[QualIdent] = None
    elements: Tuple[Union[Expression, RangeExpr], ...] = ()

    @property
    def is_factor(self) -> bool:
        return True


@dataclass(frozen=True, kw_only=True)
class Unary(Expression):
    op: str
    operand: Expression
    op_span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True, kw_only=True)
class Binary(Expression):
    op: str
    lhs: Expression
    rhs: Expression
    op_span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True, kw_only=True)
class TypeConversion(Expression):
    operand: Expression
    target: QualIdent


# ----------------------------------------------------------------------
# Types


@dataclass(frozen=True, kw_only=True)
class TypeExpr(Node):
    pass


@dataclass(frozen=True, kw_only=True)
class NamedType(TypeExpr):
    name: QualIdent


@dataclass(frozen=True, kw_only=True)
class SubrangeType(TypeExpr):
    base: Optional[QualIdent] = None
    low: Expression
    high: Expression


@dataclass(frozen=True, kw_only=True)
class EnumerationType(TypeExpr):
    values: Tuple[Ident, ...]


@dataclass(frozen=True, kw_only=True)
class ArrayType(TypeExpr):
    dimensions: Tuple[TypeExpr, ...]
    element: TypeExpr
    long_form: Tuple[bool, ...] = field(default=(), compare=False)


def flatten_array(array: ArrayType) -> ArrayType:
    """Forma abreviada equivalente: los arreglos anidados con OF ARRAY se unen en un solo nivel"""
    dimensions = list(array.dimensions)
    element = array.element
    while isinstance(element, ArrayType):
        dimensions.extend(element.dimensions)
        element = element.element
    return ArrayType(
        span=array.span,
        dimensions=tuple(dimensions),
        element=element,
        long_form=(False,) * len(dimensions),
    )


@dataclass(frozen=True, kw_only=True)
class RecordBase(Node):
    name: Optional[QualIdent] = None

    @property
    def is_nil(self) -> bool:
        return self.name is None


@dataclass(frozen=True, kw_only=True)
class FieldDecl(Node):
    names: Tuple[Ident, ...]
    type: TypeExpr


@dataclass(frozen=True, kw_only=True)
class CaseLabel(Node):
    low: Expression
    high: Optional[Expression] = None

    @property
    def is_identifier(self) -> bool:
        """Etiqueta formada por un único identificador (constante o tipo, lo decide sema)"""
        return self.high is None and isinstance(self.low, Designator) and self.low.is_plain


@dataclass(frozen=True, kw_only=True)
class Variant(Node):
    labels: Tuple[CaseLabel, ...]
    items: Tuple["FieldItem", ...] = ()


@dataclass(frozen=True, kw_only=True)
class VariantPart(Node):
    tag_field: Optional[Ident] = None
    tag_type: QualIdent
    variants: Tuple[Variant, ...]
    else_items: Optional[Tuple["FieldItem", ...]] = None


FieldItem = Union[FieldDecl, VariantPart]


@dataclass(frozen=True, kw_only=True)
class RecordType(TypeExpr):
    base_type: Optional[RecordBase] = None
    items: Tuple[FieldItem, ...] = ()

    @property
    def fields(self) -> Tuple[FieldDecl, ...]:
        return tuple(item for item in self.items if isinstance(item, FieldDecl))

    @property
    def variant_parts(self) -> Tuple[VariantPart, ...]:
        return tuple(item for item in self.items if isinstance(item, VariantPart))

    @property
    def variant_part(self) -> Optional[VariantPart]:
        parts = self.variant_parts
        return parts[0] if parts else None


@dataclass(frozen=True, kw_only=True)
class SetType(TypeExpr):
    base: TypeExpr
    packed: bool = False


@dataclass(frozen=True, kw_only=True)
class PointerType(TypeExpr):
    target: TypeExpr


@dataclass(frozen=True, kw_only=True)
class FormalType(TypeExpr):
    open_levels: int = 0
    name: QualIdent


@dataclass(frozen=True, kw_only=True)
class FormalTypeParam(Node):
    is_var: bool
    type: FormalType


@dataclass(frozen=True, kw_only=True)
class ProcedureType(TypeExpr):
    params: Tuple[FormalTypeParam, ...] = ()
    result: Optional[QualIdent] = None


@dataclass(frozen=True, kw_only=True)
class OpaqueType(TypeExpr):
    pass


# ----------------------------------------------------------------------
# Statements


@dataclass(frozen=True, kw_only=True)
class Statement(Node):
    pass


StatementSeq = Tuple[Statement, ...]


@dataclass(frozen=True, kw_only=True)
class Assignment(Statement):
    target: Designator
    value: Expression


@dataclass(frozen=True, kw_only=True)
class ProcedureCall(Statement):
    callee: Designator
    args: Tuple[Expression, ...] = ()


@dataclass(frozen=True, kw_only=True)
class CondBranch(Node):
    condition: Expression
    body: StatementSeq = ()


@dataclass(frozen=True, kw_only=True)
class IfStmt(Statement):
    branches: Tuple[CondBranch, ...]
    else_body: Optional[StatementSeq] = None


@dataclass(frozen=True, kw_only=True)
class CaseArm(Node):
    labels: Tuple[CaseLabel, ...]
    body: StatementSeq = ()


@dataclass(frozen=True, kw_only=True)
class CaseStmt(Statement):
    selector: Expression
    arms: Tuple[CaseArm, ...] = ()
    else_body: Optional[StatementSeq] = None


@dataclass(frozen=True, kw_only=True)
class WhileStmt(Statement):
    condition: Expression
    body: StatementSeq = ()


@dataclass(frozen=True, kw_only=True)
class RepeatStmt(Statement):
    body: StatementSeq = ()
    condition: Expression


@dataclass(frozen=True, kw_only=True)
class LoopStmt(Statement):
    body: StatementSeq = ()


@dataclass(frozen=True, kw_only=True)
class ForStmt(Statement):
    control: Ident
    start: Expression
    stop: Expression
    step: Optional[Expression] = None
    body: StatementSeq = ()


@dataclass(frozen=True, kw_only=True)
class WithStmt(Statement):
    designator: Designator
    body: StatementSeq = ()


@dataclass(frozen=True, kw_only=True)
class ReturnStmt(Statement):
    value: Optional[Expression] = None


@dataclass(frozen=True, kw_only=True)
class ExitStmt(Statement):
    pass


@dataclass(frozen=True, kw_only=True)
class RetryStmt(Statement):
    pass


@dataclass(frozen=True, kw_only=True)
class ErrorStmt(Statement):
    pass


@dataclass(frozen=True, kw_only=True)
class Block(Node):
    body: StatementSeq = ()
    except_body: Optional[StatementSeq] = None
    finally_body: Optional[StatementSeq] = None
    finally_except: Optional[StatementSeq] = None


# ----------------------------------------------------------------------
# Declarations


@dataclass(frozen=True, kw_only=True)
class Declaration(Node):
    pass


@dataclass(frozen=True, kw_only=True)
class ConstDecl(Declaration):
    name: Ident
    value: Expression


@dataclass(frozen=True, kw_only=True)
class TypeDecl(Declaration):
    name: Ident
    type: TypeExpr


@dataclass(frozen=True, kw_only=True)
class VarDecl(Declaration):
    names: Tuple[Ident, ...]
    type: TypeExpr


@dataclass(frozen=True, kw_only=True)
class FormalParam(Node):
    is_var: bool
    names: Tuple[Ident, ...]
    type: FormalType


@dataclass(frozen=True, kw_only=True)
class ProcedureHeading(Node):
    name: Ident
    params: Tuple[FormalParam, ...] = ()
    result: Optional[QualIdent] = None


@dataclass(frozen=True, kw_only=True)
class ProcedureDecl(Declaration):
    heading: ProcedureHeading
    declarations: Tuple[Declaration, ...] = ()
    body: Optional[Block] = None
    forward: bool = False


@dataclass(frozen=True, kw_only=True)
class ImportClause(Node):
    module: Optional[Ident] = None
    names: Tuple[Ident, ...]

    @property
    def imported_modules(self) -> Tuple[Ident, ...]:
        """Módulos referenciados: el de FROM, o cada nombre de IMPORT M, N"""
        return (self.module,) if self.module is not None else self.names


@dataclass(frozen=True, kw_only=True)
class ExportClause(Node):
    qualified: bool = False
    names: Tuple[Ident, ...]


@dataclass(frozen=True, kw_only=True)
class LocalModuleDecl(Declaration):
    name: Ident
    imports: Tuple[ImportClause, ...] = ()
    export: Optional[ExportClause] = None
    declarations: Tuple[Declaration, ...] = ()
    body: Optional[Block] = None


@dataclass(frozen=True, kw_only=True)
class ErrorDecl(Declaration):
    pass


# ----------------------------------------------------------------------
# Compilation unit


class UnitKind(str, Enum):
    DEFINITION = "definitionModule"
    IMPLEMENTATION = "implementationModule"
    PROGRAM = "programModule"


class PragmaKind(str, Enum):
    PRIVATE_TO = "privateTo"
    FFI = "ffi"
    OTHER = "other"


@dataclass(frozen=True, kw_only=True)
class ModulePragma(Node):
    kind: PragmaKind
    client_modules: Tuple[Ident, ...] = ()
    foreign_api: Optional[str] = None
    text: str = ""


@dataclass(frozen=True, kw_only=True)
class CompilationUnit(Node):
    kind: UnitKind
    name: Ident
    pragmas: Tuple[ModulePragma, ...] = ()
    imports: Tuple[ImportClause, ...] = ()
    export: Optional[ExportClause] = None
    declarations: Tuple[Declaration, ...] = ()
    body: Optional[Block] = None

    @property
    def private_to(self) -> Optional[Tuple[str, ...]]:
        """Clientes designados por PRIVATETO, o None si el módulo no está marcado"""
        clients = [
            ident.name
            for pragma in self.pragmas
            if pragma.kind == PragmaKind.PRIVATE_TO
            for ident in pragma.client_modules
        ]
        if not any(p.kind == PragmaKind.PRIVATE_TO for p in self.pragmas):
            return None
        return tuple(clients)
