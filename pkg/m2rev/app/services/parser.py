"""
Analizador sintáctico descendente recursivo.

Cubre el superconjunto de las gramáticas legada y revisada; la legalidad
según el dialecto la decide el módulo de reglas. Los errores se recogen
como diagnósticos y el análisis se recupera en los límites de sentencia y
de declaración, de modo que siempre se devuelve un AST.
"""

import logging
from dataclasses import replace
from typing import FrozenSet, List, Optional, Sequence, Tuple

from app.models.ast import (
    ArrayType,
    Assignment,
    Binary,
    Block,
    CaseArm,
    CaseLabel,
    CaseStmt,
    CompilationUnit,
    CondBranch,
    ConstDecl,
    Declaration,
    Designator,
    DerefSelector,
    EnumerationType,
    ErrorDecl,
    ErrorStmt,
    ExitStmt,
    ExportClause,
    Expression,
    FieldDecl,
    FieldItem,
    FieldSelector,
    ForStmt,
    FormalParam,
    FormalType,
    FormalTypeParam,
    FunctionCall,
    Ident,
    IfStmt,
    ImportClause,
    IndexSelector,
    Literal,
    LiteralKind,
    LocalModuleDecl,
    LoopStmt,
    ModulePragma,
    NamedType,
    OpaqueType,
    PointerType,
    PragmaKind,
    ProcedureCall,
    ProcedureDecl,
    ProcedureHeading,
    ProcedureType,
    QualIdent,
    RangeExpr,
    RecordBase,
    RecordType,
    RepeatStmt,
    RetryStmt,
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
    Variant,
    VariantPart,
    WhileStmt,
    WithStmt,
)
from app.schemas.common import Severity, SourceSpan
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import RuleId
from app.schemas.token import SYNONYMS, Token, TokenKind, Trivia
from app.services.dialect import REVISED_PROFILE
from app.services.lexer import Lexer

logger = logging.getLogger(__name__)

K = TokenKind

KNOWN_FOREIGN_APIS = frozenset({"ASM", "C", "Fortran", "Pascal"})

RELATIONS = frozenset({K.EQ, K.HASH, K.LT, K.LE, K.GT, K.GE, K.IN})
ADD_OPERATORS = frozenset({K.PLUS, K.MINUS, K.OR, K.BACKSLASH})
MUL_OPERATORS = frozenset({K.STAR, K.SLASH, K.DIV, K.MOD, K.REM, K.AND})

STATEMENT_END = frozenset({K.END, K.ELSE, K.ELSIF, K.UNTIL, K.BAR, K.EXCEPT, K.FINALLY, K.EOF})
DECLARATION_START = frozenset({K.CONST, K.TYPE, K.VAR, K.PROCEDURE, K.MODULE})
BLOCK_START = frozenset({K.BEGIN, K.END, K.FINALLY, K.EXCEPT, K.EOF})

LITERAL_TOKENS = {
    K.NUMBER: LiteralKind.NUMBER,
    K.OCTAL_NUMBER: LiteralKind.OCTAL,
    K.OCTAL_CHAR: LiteralKind.CHAR,
    K.REAL: LiteralKind.REAL,
    K.STRING: LiteralKind.STRING,
}


class ParseError(Exception):
    """Señal interna para la recuperación de errores"""


def _operator_spelling(token: Token) -> str:
    if token.kind in SYNONYMS:
        return SYNONYMS[token.kind][1]
    return token.canonical_kind.value


def _diagnostic(rule: RuleId, severity: Severity, span: SourceSpan, message: str) -> Diagnostic:
    return Diagnostic(rule=rule.value, severity=severity, span=span, message=message)


class Parser:
    """Parser de una unidad de compilación a partir de su lista de tokens"""

    def __init__(self, tokens: Sequence[Token]):
        """
        Inicializa el parser.

        Args:
            tokens: Tokens producidos por lexer.tokenize (con o sin EOF final)
        """
        self.tokens: List[Token] = list(tokens)
        if not self.tokens or self.tokens[-1].kind != K.EOF:
            end = self.tokens[-1].span.end if self.tokens else 0
            line = self.tokens[-1].span.end_line if self.tokens else 1
            col = self.tokens[-1].span.end_col if self.tokens else 1
            self.tokens.append(
                Token(
                    kind=K.EOF,
                    span=SourceSpan(start=end, end=end, start_line=line, start_col=col,
                                    end_line=line, end_col=col),
                    text="",
                )
            )
        self.index = 0
        self.diagnostics: List[Diagnostic] = []

    # ------------------------------------------------------------------
    # Token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def kind(self, offset: int = 0) -> TokenKind:
        return self.peek(offset).canonical_kind

    def at(self, *kinds: TokenKind) -> bool:
        return self.kind() in kinds

    @property
    def previous(self) -> Token:
        return self.tokens[max(self.index - 1, 0)]

    def advance(self) -> Token:
        token = self.peek()
        if token.kind != K.EOF:
            self.index += 1
        return token

    def span_from(self, start: Token) -> SourceSpan:
        """Span desde el token start hasta el último token consumido"""
        if self.index == 0 or self.previous.span.start < start.span.start:
            return start.span
        return start.span.cover(self.previous.span)

    def error(self, message: str, span: Optional[SourceSpan] = None) -> None:
        span = span or self.peek().span
        if self.diagnostics and self.diagnostics[-1].span.start == span.start:
            return
        self.diagnostics.append(_diagnostic(RuleId.E02, Severity.ERROR, span, message))

    def fail(self, message: str) -> ParseError:
        token = self.peek()
        found = "end of file" if token.kind == K.EOF else f"'{token.text}'"
        self.error(f"{message}, found {found}")
        return ParseError(message)

    def expect(self, kind: TokenKind, what: Optional[str] = None) -> Token:
        if self.kind() != kind:
            raise self.fail(f"expected {what or repr(kind.value)}")
        return self.advance()

    def sync(self, stop: FrozenSet[TokenKind]) -> None:
        while not self.at(K.EOF) and self.kind() not in stop:
            self.advance()

    # ------------------------------------------------------------------
    # Names

    def ident(self) -> Ident:
        token = self.expect(K.IDENT, "identifier")
        return Ident(span=token.span, name=token.text)

    def ident_list(self) -> Tuple[Ident, ...]:
        names = [self.ident()]
        while self.at(K.COMMA):
            self.advance()
            names.append(self.ident())
        return tuple(names)

    def qualident(self) -> QualIdent:
        start = self.peek()
        parts = [self.ident()]
        while self.at(K.DOT) and self.kind(1) == K.IDENT:
            self.advance()
            parts.append(self.ident())
        return QualIdent(span=self.span_from(start), parts=tuple(parts))

    # ------------------------------------------------------------------
    # Compilation unit

    def parse_unit(self) -> Tuple[CompilationUnit, List[Trivia]]:
        """Analiza la unidad completa; retorna el AST y las pragmas tras la cabecera"""
        start = self.peek()
        kind = UnitKind.PROGRAM
        name = Ident(span=start.span, name="")
        pragma_trivia: List[Trivia] = []
        imports: Tuple[ImportClause, ...] = ()
        export: Optional[ExportClause] = None
        declarations: List[Declaration] = []
        body: Optional[Block] = None

        try:
            if self.at(K.DEFINITION):
                self.advance()
                kind = UnitKind.DEFINITION
            elif self.at(K.IMPLEMENTATION):
                self.advance()
                kind = UnitKind.IMPLEMENTATION
            self.expect(K.MODULE, "'MODULE'")
            name = self.ident()
            if kind != UnitKind.DEFINITION and self.at(K.LBRACK):
                self.advance()
                self.expression()
                self.expect(K.RBRACK, "']'")
            self.expect(K.SEMI, "';'")
            pragma_trivia = self.peek().pragmas

            imports = self.import_lists()
            if self.at(K.EXPORT):
                export = self.export_clause()
            self.declarations(declarations, definition=kind == UnitKind.DEFINITION)
            if kind != UnitKind.DEFINITION:
                body = self.block()
            self.expect(K.END, "'END'")
            self.end_name(name)
            self.expect(K.DOT, "'.'")
            if not self.at(K.EOF):
                self.error("unexpected text after the end of the module")
        except ParseError:
            pass

        unit = CompilationUnit(
            span=self.span_from(start),
            kind=kind,
            name=name,
            imports=imports,
            export=export,
            declarations=tuple(declarations),
            body=body,
        )
        return unit, pragma_trivia

    def end_name(self, expected: Ident) -> None:
        if self.at(K.IDENT):
            found = self.ident()
            if found.name != expected.name:
                self.error(
                    f"name at END '{found.name}' does not match '{expected.name}'",
                    found.span,
                )
        else:
            raise self.fail(f"expected '{expected.name}' after END")

    def import_lists(self) -> Tuple[ImportClause, ...]:
        clauses: List[ImportClause] = []
        while self.at(K.FROM, K.IMPORT):
            start = self.peek()
            try:
                module = None
                if self.at(K.FROM):
                    self.advance()
                    module = self.ident()
                self.expect(K.IMPORT, "'IMPORT'")
                names = self.ident_list()
                clauses.append(ImportClause(span=self.span_from(start), module=module, names=names))
                self.expect(K.SEMI, "';'")
            except ParseError:
                self.sync(frozenset({K.SEMI}) | DECLARATION_START | BLOCK_START | {K.FROM, K.IMPORT})
                if self.at(K.SEMI):
                    self.advance()
        return tuple(clauses)

    def export_clause(self) -> ExportClause:
        start = self.advance()
        qualified = False
        if self.at(K.QUALIFIED):
            self.advance()
            qualified = True
        names = self.ident_list()
        clause = ExportClause(span=self.span_from(start), qualified=qualified, names=names)
        self.expect(K.SEMI, "';'")
        return clause

    # ------------------------------------------------------------------
    # Declarations

    def declarations(self, into: List[Declaration], definition: bool) -> None:
        while True:
            kind = self.kind()
            if kind in (K.CONST, K.TYPE, K.VAR):
                self.advance()
                while self.at(K.IDENT):
                    self._declaration(into, kind, definition)
            elif kind == K.PROCEDURE:
                self._declaration(into, kind, definition)
            elif kind == K.MODULE and not definition:
                self._declaration(into, kind, definition)
            elif kind in BLOCK_START:
                return
            else:
                start = self.peek()
                self.error(f"unexpected '{start.text}' in declarations")
                self.advance()
                self.sync(DECLARATION_START | BLOCK_START)
                into.append(ErrorDecl(span=self.span_from(start)))

    def _declaration(self, into: List[Declaration], section: TokenKind, definition: bool) -> None:
        start = self.peek()
        try:
            if section == K.CONST:
                into.append(self.const_declaration())
            elif section == K.TYPE:
                into.append(self.type_declaration())
            elif section == K.VAR:
                into.append(self.var_declaration())
            elif section == K.PROCEDURE:
                into.append(self.procedure_declaration(definition))
            else:
                into.append(self.local_module())
            self.expect(K.SEMI, "';'")
        except ParseError:
            self.sync(frozenset({K.SEMI}) | DECLARATION_START | BLOCK_START)
            into.append(ErrorDecl(span=self.span_from(start)))
            if self.at(K.SEMI):
                self.advance()

    def const_declaration(self) -> ConstDecl:
        start = self.peek()
        name = self.ident()
        self.expect(K.EQ, "'='")
        value = self.expression()
        return ConstDecl(span=self.span_from(start), name=name, value=value)

    def type_declaration(self) -> TypeDecl:
        start = self.peek()
        name = self.ident()
        if self.at(K.SEMI):
            return TypeDecl(span=self.span_from(start), name=name,
                            type=OpaqueType(span=name.span))
        self.expect(K.EQ, "'='")
        type_expr = self.type_expr()
        return TypeDecl(span=self.span_from(start), name=name, type=type_expr)

    def var_declaration(self) -> VarDecl:
        start = self.peek()
        names = self.ident_list()
        self.expect(K.COLON, "':'")
        type_expr = self.type_expr()
        return VarDecl(span=self.span_from(start), names=names, type=type_expr)

    def procedure_heading(self) -> ProcedureHeading:
        start = self.expect(K.PROCEDURE)
        name = self.ident()
        params: List[FormalParam] = []
        result = None
        if self.at(K.LPAREN):
            self.advance()
            if not self.at(K.RPAREN):
                params.append(self.formal_param())
                while self.at(K.SEMI):
                    self.advance()
                    params.append(self.formal_param())
            self.expect(K.RPAREN, "')'")
            if self.at(K.COLON):
                self.advance()
                result = self.qualident()
        return ProcedureHeading(span=self.span_from(start), name=name,
                                params=tuple(params), result=result)

    def formal_param(self) -> FormalParam:
        start = self.peek()
        is_var = False
        if self.at(K.VAR):
            self.advance()
            is_var = True
        names = self.ident_list()
        self.expect(K.COLON, "':'")
        formal = self.formal_type()
        return FormalParam(span=self.span_from(start), is_var=is_var, names=names, type=formal)

    def formal_type(self) -> FormalType:
        start = self.peek()
        levels = 0
        while self.at(K.ARRAY):
            self.advance()
            self.expect(K.OF, "'OF'")
            levels += 1
        name = self.qualident()
        return FormalType(span=self.span_from(start), open_levels=levels, name=name)

    def procedure_declaration(self, definition: bool) -> ProcedureDecl:
        start = self.peek()
        heading = self.procedure_heading()
        if definition:
            return ProcedureDecl(span=self.span_from(start), heading=heading)
        self.expect(K.SEMI, "';'")
        if self.at(K.FORWARD):
            self.advance()
            return ProcedureDecl(span=self.span_from(start), heading=heading, forward=True)
        declarations: List[Declaration] = []
        self.declarations(declarations, definition=False)
        body = self.block()
        self.expect(K.END, "'END'")
        self.end_name(heading.name)
        return ProcedureDecl(
            span=self.span_from(start),
            heading=heading,
            declarations=tuple(declarations),
            body=body,
        )

    def local_module(self) -> LocalModuleDecl:
        start = self.expect(K.MODULE)
        name = self.ident()
        if self.at(K.LBRACK):
            self.advance()
            self.expression()
            self.expect(K.RBRACK, "']'")
        self.expect(K.SEMI, "';'")
        imports = self.import_lists()
        export = self.export_clause() if self.at(K.EXPORT) else None
        declarations: List[Declaration] = []
        self.declarations(declarations, definition=False)
        body = self.block()
        self.expect(K.END, "'END'")
        self.end_name(name)
        return LocalModuleDecl(
            span=self.span_from(start),
            name=name,
            imports=imports,
            export=export,
            declarations=tuple(declarations),
            body=body,
        )

    def block(self) -> Optional[Block]:
        start = self.peek()
        body: Tuple[Statement, ...] = ()
        except_body = finally_body = finally_except = None
        present = False
        if self.at(K.BEGIN):
            self.advance()
            present = True
            body = self.statement_sequence()
            if self.at(K.EXCEPT):
                self.advance()
                except_body = self.statement_sequence()
        if self.at(K.FINALLY):
            self.advance()
            present = True
            finally_body = self.statement_sequence()
            if self.at(K.EXCEPT):
                self.advance()
                finally_except = self.statement_sequence()
        if not present:
            return None
        return Block(
            span=self.span_from(start),
            body=body,
            except_body=except_body,
            finally_body=finally_body,
            finally_except=finally_except,
        )

    # ------------------------------------------------------------------
    # Types

    def type_expr(self) -> TypeExpr:
        start = self.peek()
        kind = self.kind()
        if kind == K.IDENT:
            name = self.qualident()
            if self.at(K.LBRACK):
                return self.subrange(start, name)
            return NamedType(span=self.span_from(start), name=name)
        if kind == K.LBRACK:
            return self.subrange(start, None)
        if kind == K.LPAREN:
            self.advance()
            values = self.ident_list()
            self.expect(K.RPAREN, "')'")
            return EnumerationType(span=self.span_from(start), values=values)
        if kind == K.ARRAY:
            return self.array_type()
        if kind == K.RECORD:
            return self.record_type()
        if kind in (K.SET, K.PACKEDSET):
            self.advance()
            self.expect(K.OF, "'OF'")
            base = self.type_expr()
            return SetType(span=self.span_from(start), base=base, packed=kind == K.PACKEDSET)
        if kind == K.POINTER:
            self.advance()
            self.expect(K.TO, "'TO'")
            target = self.type_expr()
            return PointerType(span=self.span_from(start), target=target)
        if kind == K.PROCEDURE:
            return self.procedure_type()
        raise self.fail("expected a type")

    def subrange(self, start: Token, base: Optional[QualIdent]) -> SubrangeType:
        self.expect(K.LBRACK, "'['")
        low = self.expression()
        self.expect(K.RANGE, "'..'")
        high = self.expression()
        self.expect(K.RBRACK, "']'")
        return SubrangeType(span=self.span_from(start), base=base, low=low, high=high)

    def array_type(self) -> ArrayType:
        start = self.expect(K.ARRAY)
        dimensions = [self.type_expr()]
        while self.at(K.COMMA):
            self.advance()
            dimensions.append(self.type_expr())
        self.expect(K.OF, "'OF'")
        element = self.type_expr()
        nested = isinstance(element, ArrayType)
        if nested:
            element = replace(element, long_form=(True,) * len(element.dimensions))
        return ArrayType(
            span=self.span_from(start),
            dimensions=tuple(dimensions),
            element=element,
            long_form=(nested,) * len(dimensions),
        )

    def record_type(self) -> RecordType:
        start = self.expect(K.RECORD)
        base_type = None
        if self.at(K.LPAREN):
            base_start = self.advance()
            if self.at(K.IDENT) and self.peek().text == "NIL":
                self.advance()
                name = None
            else:
                name = self.qualident()
            self.expect(K.RPAREN, "')'")
            base_type = RecordBase(span=self.span_from(base_start), name=name)
        items = self.field_list_sequence()
        if base_type is not None:
            for item in items:
                if isinstance(item, VariantPart):
                    self.error("an extensible record cannot have a variant part", item.span)
        self.expect(K.END, "'END'")
        return RecordType(span=self.span_from(start), base_type=base_type, items=items)

    def field_list_sequence(self) -> Tuple[FieldItem, ...]:
        items: List[FieldItem] = []
        while True:
            start = self.peek()
            if self.at(K.IDENT):
                names = self.ident_list()
                self.expect(K.COLON, "':'")
                field_type = self.type_expr()
                items.append(FieldDecl(span=self.span_from(start), names=names, type=field_type))
            elif self.at(K.CASE):
                items.append(self.variant_part())
            if self.at(K.SEMI):
                self.advance()
                continue
            return tuple(items)

    def variant_part(self) -> VariantPart:
        start = self.expect(K.CASE)
        tag_field = None
        if self.at(K.IDENT) and self.kind(1) == K.COLON:
            tag_field = self.ident()
            self.advance()
        elif self.at(K.COLON):
            self.advance()
        tag_type = self.qualident()
        self.expect(K.OF, "'OF'")
        variants: List[Variant] = []
        while True:
            if self.at(K.ELSE, K.END):
                break
            if self.at(K.BAR):
                self.advance()
                continue
            variant_start = self.peek()
            labels = self.case_labels()
            self.expect(K.COLON, "':'")
            items = self.field_list_sequence()
            variants.append(Variant(span=self.span_from(variant_start), labels=labels, items=items))
            if self.at(K.BAR):
                self.advance()
            else:
                break
        else_items = None
        if self.at(K.ELSE):
            self.advance()
            else_items = self.field_list_sequence()
        self.expect(K.END, "'END'")
        if not variants:
            self.error("variant part needs at least one variant", start.span)
        return VariantPart(
            span=self.span_from(start),
            tag_field=tag_field,
            tag_type=tag_type,
            variants=tuple(variants),
            else_items=else_items,
        )

    def procedure_type(self) -> ProcedureType:
        start = self.expect(K.PROCEDURE)
        params: List[FormalTypeParam] = []
        result = None
        if self.at(K.LPAREN):
            self.advance()
            if not self.at(K.RPAREN):
                params.append(self.formal_type_param())
                while self.at(K.COMMA):
                    self.advance()
                    params.append(self.formal_type_param())
            self.expect(K.RPAREN, "')'")
            if self.at(K.COLON):
                self.advance()
                result = self.qualident()
        return ProcedureType(span=self.span_from(start), params=tuple(params), result=result)

    def formal_type_param(self) -> FormalTypeParam:
        start = self.peek()
        is_var = False
        if self.at(K.VAR):
            self.advance()
            is_var = True
        formal = self.formal_type()
        return FormalTypeParam(span=self.span_from(start), is_var=is_var, type=formal)

    # ------------------------------------------------------------------
    # Statements

    def statement_sequence(self) -> Tuple[Statement, ...]:
        statements: List[Statement] = []
        while True:
            if self.kind() in STATEMENT_END:
                break
            start_index = self.index
            start = self.peek()
            try:
                statement = self.statement()
                if statement is not None:
                    statements.append(statement)
            except ParseError:
                self.sync(frozenset({K.SEMI}) | STATEMENT_END)
                statements.append(ErrorStmt(span=self.span_from(start)))
            if self.at(K.SEMI):
                self.advance()
                continue
            if self.kind() in STATEMENT_END:
                break
            self.error("expected ';' between statements")
            if self.index == start_index:
                self.advance()
        return tuple(statements)

    def statement(self) -> Optional[Statement]:
        start = self.peek()
        kind = self.kind()
        if kind == K.IDENT:
            target = self.designator()
            if self.at(K.ASSIGN):
                self.advance()
                value = self.expression()
                return Assignment(span=self.span_from(start), target=target, value=value)
            if self.at(K.COLONCOLON):
                raise self.fail("type conversion is not allowed here")
            args: Tuple[Expression, ...] = ()
            if self.at(K.LPAREN):
                args = self.actual_parameters()
            return ProcedureCall(span=self.span_from(start), callee=target, args=args)
        if kind == K.IF:
            return self.if_statement()
        if kind == K.CASE:
            return self.case_statement()
        if kind == K.WHILE:
            self.advance()
            condition = self.expression()
            self.expect(K.DO, "'DO'")
            body = self.statement_sequence()
            self.expect(K.END, "'END'")
            return WhileStmt(span=self.span_from(start), condition=condition, body=body)
        if kind == K.REPEAT:
            self.advance()
            body = self.statement_sequence()
            self.expect(K.UNTIL, "'UNTIL'")
            condition = self.expression()
            return RepeatStmt(span=self.span_from(start), body=body, condition=condition)
        if kind == K.LOOP:
            self.advance()
            body = self.statement_sequence()
            self.expect(K.END, "'END'")
            return LoopStmt(span=self.span_from(start), body=body)
        if kind == K.FOR:
            return self.for_statement()
        if kind == K.WITH:
            self.advance()
            designator = self.designator()
            self.expect(K.DO, "'DO'")
            body = self.statement_sequence()
            self.expect(K.END, "'END'")
            return WithStmt(span=self.span_from(start), designator=designator, body=body)
        if kind == K.RETURN:
            self.advance()
            value = None
            if not self.at(K.SEMI) and self.kind() not in STATEMENT_END:
                value = self.expression()
            return ReturnStmt(span=self.span_from(start), value=value)
        if kind == K.EXIT:
            self.advance()
            return ExitStmt(span=start.span)
        if kind == K.RETRY:
            self.advance()
            return RetryStmt(span=start.span)
        if kind == K.SEMI:
            return None
        raise self.fail("expected a statement")

    def if_statement(self) -> IfStmt:
        start = self.expect(K.IF)
        branches: List[CondBranch] = []
        branch_start = start
        condition = self.expression()
        self.expect(K.THEN, "'THEN'")
        body = self.statement_sequence()
        branches.append(CondBranch(span=self.span_from(branch_start), condition=condition, body=body))
        while self.at(K.ELSIF):
            branch_start = self.advance()
            condition = self.expression()
            self.expect(K.THEN, "'THEN'")
            body = self.statement_sequence()
            branches.append(CondBranch(span=self.span_from(branch_start), condition=condition, body=body))
        else_body = None
        if self.at(K.ELSE):
            self.advance()
            else_body = self.statement_sequence()
        self.expect(K.END, "'END'")
        return IfStmt(span=self.span_from(start), branches=tuple(branches), else_body=else_body)

    def case_statement(self) -> CaseStmt:
        start = self.expect(K.CASE)
        selector = self.expression()
        self.expect(K.OF, "'OF'")
        arms: List[CaseArm] = []
        while True:
            if self.at(K.ELSE, K.END, K.EOF):
                break
            if self.at(K.BAR):
                self.advance()
                continue
            arm_start = self.peek()
            labels = self.case_labels()
            self.expect(K.COLON, "':'")
            body = self.statement_sequence()
            arms.append(CaseArm(span=self.span_from(arm_start), labels=labels, body=body))
            if self.at(K.BAR):
                self.advance()
            else:
                break
        else_body = None
        if self.at(K.ELSE):
            self.advance()
            else_body = self.statement_sequence()
        self.expect(K.END, "'END'")
        return CaseStmt(span=self.span_from(start), selector=selector,
                        arms=tuple(arms), else_body=else_body)

    def case_labels(self) -> Tuple[CaseLabel, ...]:
        labels = [self.case_label()]
        while self.at(K.COMMA):
            self.advance()
            labels.append(self.case_label())
        return tuple(labels)

    def case_label(self) -> CaseLabel:
        start = self.peek()
        low = self.expression()
        high = None
        if self.at(K.RANGE):
            self.advance()
            high = self.expression()
        return CaseLabel(span=self.span_from(start), low=low, high=high)

    def for_statement(self) -> ForStmt:
        start = self.expect(K.FOR)
        control = self.ident()
        self.expect(K.ASSIGN, "':='")
        first = self.expression()
        self.expect(K.TO, "'TO'")
        last = self.expression()
        step = None
        if self.at(K.BY):
            self.advance()
            step = self.expression()
        self.expect(K.DO, "'DO'")
        body = self.statement_sequence()
        self.expect(K.END, "'END'")
        return ForStmt(span=self.span_from(start), control=control, start=first,
                       stop=last, step=step, body=body)

    # ------------------------------------------------------------------
    # Expressions

    def expression(self) -> Expression:
        start = self.peek()
        left = self.simple_expression()
        if self.kind() in RELATIONS:
            op = self.advance()
            right = self.simple_expression()
            left = Binary(span=self.span_from(start), op=_operator_spelling(op),
                          lhs=left, rhs=right, op_span=op.span)
        return left

    def simple_expression(self) -> Expression:
        start = self.peek()
        if self.at(K.PLUS, K.MINUS):
            op = self.advance()
            operand = self.term()
            left: Expression = Unary(span=self.span_from(start), op=op.text,
                                     operand=operand, op_span=op.span)
        else:
            left = self.term()
        while self.kind() in ADD_OPERATORS:
            op = self.advance()
            right = self.term()
            left = Binary(span=self.span_from(start), op=_operator_spelling(op),
                          lhs=left, rhs=right, op_span=op.span)
        return left

    def term(self) -> Expression:
        start = self.peek()
        left = self.not_factor()
        while self.kind() in MUL_OPERATORS:
            op = self.advance()
            right = self.not_factor()
            left = Binary(span=self.span_from(start), op=_operator_spelling(op),
                          lhs=left, rhs=right, op_span=op.span)
        return left

    def not_factor(self) -> Expression:
        # NOT binds looser than '::'
        start = self.peek()
        if self.at(K.NOT):
            op = self.advance()
            operand = self.not_factor()
            return Unary(span=self.span_from(start), op="NOT", operand=operand, op_span=op.span)
        return self.conversion()

    def conversion(self) -> Expression:
        start = self.peek()
        operand = self.factor()
        if not self.at(K.COLONCOLON):
            return operand
        self.advance()
        target = self.qualident()
        converted = TypeConversion(span=self.span_from(start), operand=operand, target=target)
        if self.at(K.COLONCOLON):
            raise self.fail("type conversions cannot be chained without parentheses")
        return converted

    def factor(self) -> Expression:
        start = self.peek()
        kind = self.kind()
        if kind in LITERAL_TOKENS:
            token = self.advance()
            return Literal(span=token.span, kind=LITERAL_TOKENS[kind],
                           value=token.value, text=token.text)
        if kind == K.LBRACE:
            return self.set_constructor(start, None)
        if kind == K.LPAREN:
            self.advance()
            inner = self.expression()
            self.expect(K.RPAREN, "')'")
            return replace(inner, parens=inner.parens + 1)
        if kind == K.IDENT:
            designator = self.designator()
            if self.at(K.LBRACE) and all(isinstance(s, FieldSelector) for s in designator.selectors):
                parts = (designator.root,) + tuple(s.name for s in designator.selectors)
                return self.set_constructor(start, QualIdent(span=designator.span, parts=parts))
            if self.at(K.LPAREN):
                args = self.actual_parameters()
                return FunctionCall(span=self.span_from(start), callee=designator, args=args)
            return designator
        raise self.fail("expected an expression")

    def set_constructor(self, start: Token, type_name: Optional[QualIdent]) -> SetConstructor:
        self.expect(K.LBRACE, "'{'")
        elements: List = []
        if not self.at(K.RBRACE):
            elements.append(self.set_element())
            while self.at(K.COMMA):
                self.advance()
                elements.append(self.set_element())
        self.expect(K.RBRACE, "'}'")
        return SetConstructor(span=self.span_from(start), type_name=type_name,
                              elements=tuple(elements))

    def set_element(self):
        start = self.peek()
        low = self.expression()
        if self.at(K.RANGE):
            self.advance()
            high = self.expression()
            return RangeExpr(span=self.span_from(start), low=low, high=high)
        return low

    def actual_parameters(self) -> Tuple[Expression, ...]:
        self.expect(K.LPAREN, "'('")
        args: List[Expression] = []
        if not self.at(K.RPAREN):
            args.append(self.expression())
            while self.at(K.COMMA):
                self.advance()
                args.append(self.expression())
        self.expect(K.RPAREN, "')'")
        return tuple(args)

    def designator(self) -> Designator:
        start = self.peek()
        root = self.ident()
        selectors: List = []
        while True:
            if self.at(K.DOT) and self.kind(1) == K.IDENT:
                dot = self.advance()
                name = self.ident()
                selectors.append(FieldSelector(span=self.span_from(dot), name=name))
            elif self.at(K.LBRACK):
                bracket = self.advance()
                indices = [self.expression()]
                while self.at(K.COMMA):
                    self.advance()
                    indices.append(self.expression())
                self.expect(K.RBRACK, "']'")
                selectors.append(IndexSelector(span=self.span_from(bracket), indices=tuple(indices)))
            elif self.at(K.CARET):
                caret = self.advance()
                selectors.append(DerefSelector(span=caret.span))
            else:
                break
        return Designator(span=self.span_from(start), root=root, selectors=tuple(selectors))


# ----------------------------------------------------------------------
# Module pragmas


def _relex_pragma(trivia: Trivia) -> List[Token]:
    text = trivia.text
    interior = text[2:-2] if text.endswith("*>") and len(text) >= 4 else text[2:]
    lexer = Lexer(
        interior,
        REVISED_PROFILE,
        base_offset=trivia.span.start + 2,
        base_line=trivia.span.start_line,
        base_col=trivia.span.start_col + 2,
    )
    return [t for t in lexer.tokenize().tokens if t.kind != K.EOF]


def parse_module_pragmas(
    unit: CompilationUnit,
    pragma_trivia: Sequence[Trivia],
) -> Tuple[List[ModulePragma], List[Diagnostic]]:
    """
    Reconoce las directivas PRIVATETO y FFI tras la cabecera del módulo.

    Args:
        unit: Unidad de compilación (se usa su clase de módulo)
        pragma_trivia: Pragmas encontradas tras la cabecera

    Returns:
        Pragmas reconocidas (las desconocidas quedan como kind=other, intactas)
        y diagnósticos para cargas mal formadas o ubicaciones no previstas
    """
    pragmas: List[ModulePragma] = []
    diagnostics: List[Diagnostic] = []

    for trivia in pragma_trivia:
        tokens = _relex_pragma(trivia)
        keyword = tokens[0].text if tokens and tokens[0].kind == K.IDENT else None

        if keyword == "PRIVATETO":
            rule = RuleId.S04
            clients: List[Ident] = []
            well_formed = len(tokens) >= 3 and tokens[1].kind == K.EQ
            if well_formed:
                rest = tokens[2:]
                for position, token in enumerate(rest):
                    expected = K.IDENT if position % 2 == 0 else K.COMMA
                    if token.kind != expected:
                        well_formed = False
                        break
                    if token.kind == K.IDENT:
                        clients.append(Ident(span=token.span, name=token.text))
                if rest and rest[-1].kind != K.IDENT:
                    well_formed = False
            if not well_formed or not clients:
                diagnostics.append(_diagnostic(
                    rule, Severity.WARNING, trivia.span,
                    "malformed PRIVATETO directive: expected <*PRIVATETO=Client{,Client}*>",
                ))
                pragmas.append(ModulePragma(span=trivia.span, kind=PragmaKind.OTHER, text=trivia.text))
                continue
            pragmas.append(ModulePragma(
                span=trivia.span, kind=PragmaKind.PRIVATE_TO,
                client_modules=tuple(clients), text=trivia.text,
            ))

        elif keyword == "FFI":
            rule = RuleId.S05
            api = None
            if (
                len(tokens) == 3
                and tokens[1].kind == K.EQ
                and tokens[2].kind == K.STRING
                and len(tokens[2].text) >= 2
                and tokens[2].text[0] == tokens[2].text[-1]
            ):
                api = str(tokens[2].value)
            if not api:
                diagnostics.append(_diagnostic(
                    rule, Severity.WARNING, trivia.span,
                    'malformed FFI directive: expected <*FFI="api"*> with a non-empty quoted name',
                ))
                pragmas.append(ModulePragma(span=trivia.span, kind=PragmaKind.OTHER, text=trivia.text))
                continue
            pragmas.append(ModulePragma(
                span=trivia.span, kind=PragmaKind.FFI, foreign_api=api, text=trivia.text,
            ))

        else:
            pragmas.append(ModulePragma(span=trivia.span, kind=PragmaKind.OTHER, text=trivia.text))
            continue

        if unit.kind != UnitKind.DEFINITION:
            diagnostics.append(_diagnostic(
                rule, Severity.INFO, trivia.span,
                f"{keyword} directive is only recognized after the header of a definition module",
            ))

    return pragmas, diagnostics


def parse_compilation_unit(tokens: Sequence[Token]) -> Tuple[CompilationUnit, List[Diagnostic]]:
    """
    Analiza una unidad de compilación.

    Args:
        tokens: Lista de tokens de lexer.tokenize

    Returns:
        AST (siempre, posiblemente con nodos de error) y diagnósticos de sintaxis
    """
    parser = Parser(tokens)
    unit, pragma_trivia = parser.parse_unit()
    diagnostics = list(parser.diagnostics)
    if pragma_trivia:
        pragmas, pragma_diagnostics = parse_module_pragmas(unit, pragma_trivia)
        unit = replace(unit, pragmas=tuple(pragmas))
        diagnostics.extend(pragma_diagnostics)
    logger.debug("parsed module %s with %d diagnostics", unit.name.name, len(diagnostics))
    return unit, diagnostics
