"""
Reglas semánticas: compatibilidad de NIL, CAST de constantes, escrituras a
variables importadas, SHIFT sobre valores no BITSET y registros variantes.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Set

from app.models.ast import (
    Assignment,
    Binary,
    Designator,
    Expression,
    FunctionCall,
    Literal,
    RangeExpr,
    RecordType,
    SetConstructor,
    TypeDecl,
    Unary,
    Variant,
    VariantPart,
    walk,
    walk_with_parent,
)
from app.models.symbols import NilCompatibility, Origin, SymbolKind
from app.schemas.diagnostic import Diagnostic, TextEdit
from app.schemas.rule import RuleId
from app.services.rules.base import Rule, RuleContext
from app.services.sema import (
    BITSET_FAMILY,
    NilContext,
    TypeCategory,
    classify_nil_compatibility,
    expression_type,
    find_imported_writes,
    is_nil,
    is_system_name,
    root_info,
    type_category,
    type_of_type_symbol,
)
from app.services.transform import NotFixable, NotFixableReason, transform_variant_record


class NilCompatibilityRule(Rule):
    """M2R-M01: NIL frente a tipos opacos y de procedimiento (solo perfil legado)"""

    id = RuleId.M01

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        if ctx.revised:
            return []
        diagnostics = []
        for node in walk(ctx.unit):
            other: Optional[Expression] = None
            if isinstance(node, Assignment) and is_nil(node.value, ctx.symbols):
                other = node.target
            elif isinstance(node, Binary) and node.op in ("=", "#"):
                if is_nil(node.rhs, ctx.symbols):
                    other = node.lhs
                elif is_nil(node.lhs, ctx.symbols):
                    other = node.rhs
            if other is None:
                continue
            category = type_category(expression_type(other, ctx.symbols))
            verdict = classify_nil_compatibility(NilContext(profile=ctx.profile, category=category))
            if verdict == NilCompatibility.LEGACY_RESTRICTED:
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    node.span,
                    f"NIL used with a value of {category.value} type; the revised dialect makes "
                    "NIL compatible with opaque and procedure types",
                ))
        return diagnostics


def _is_constant(expr, ctx: RuleContext) -> bool:
    if isinstance(expr, Literal):
        return True
    if isinstance(expr, Designator):
        if expr.selectors:
            return False
        symbol = ctx.symbols.symbol_for(expr.root)
        return symbol is not None and symbol.definition.kind == SymbolKind.CONST
    if isinstance(expr, SetConstructor):
        return all(_is_constant(element, ctx) for element in expr.elements)
    if isinstance(expr, RangeExpr):
        return _is_constant(expr.low, ctx) and _is_constant(expr.high, ctx)
    if isinstance(expr, Unary):
        return _is_constant(expr.operand, ctx)
    if isinstance(expr, Binary):
        return _is_constant(expr.lhs, ctx) and _is_constant(expr.rhs, ctx)
    return False


def _is_system_call(call, name: str, ctx: RuleContext) -> bool:
    """True si call invoca SYSTEM.name (importado de SYSTEM o sin resolver)"""
    if not isinstance(call, FunctionCall):
        return False
    info = root_info(call.callee, ctx.symbols)
    if info.name != name or len(call.callee.selectors) != info.consumed:
        return False
    if info.symbol is None:
        return True
    return is_system_name(info, name)


class ConstantCastRule(Rule):
    """M2R-M02: CAST de un valor constante (solo perfil legado)"""

    id = RuleId.M02

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        if ctx.revised:
            return []
        diagnostics = []
        for node in walk(ctx.unit):
            if _is_system_call(node, "CAST", ctx) and len(node.args) == 2:
                if _is_constant(node.args[1], ctx):
                    diagnostics.append(ctx.diagnostic(
                        self.id,
                        node.span,
                        "CAST of a constant value; the revised dialect permits it",
                    ))
        return diagnostics


class ImportedWriteRule(Rule):
    """M2R-M04: escritura a una variable importada"""

    id = RuleId.M04

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for site in find_imported_writes(ctx.unit, ctx.symbols):
            if site.kind == "assignment":
                message = (
                    f"write to imported variable '{site.name}' of module {site.module} "
                    f"is deprecated; export a procedure from {site.module} that performs the update"
                )
            else:
                message = (
                    f"imported variable '{site.name}' of module {site.module} is passed as a VAR "
                    "argument; this counts as a write to an imported variable, which is deprecated"
                )
            diagnostics.append(ctx.diagnostic(self.id, site.span, message))
        return diagnostics


@dataclass(frozen=True)
class ShiftClutter:
    """Coincidencia de CAST(T, SHIFT(CAST(B, value), amount))"""

    target: str
    value: Expression
    amount: Expression


class ShiftCastRule(Rule):
    """
    M2R-M05: CAST(T, SHIFT(CAST(B, e), k)) con B de la familia BITSET.

    En el perfil revisado SHIFT opera sobre cualquier valor de 8, 16, 32 o
    64 bits, así que el patrón se simplifica a SHIFT(e, k). Los operandos
    CAST(T, ORD(c)) de la misma expresión aritmética se simplifican a ORD(c).
    """

    id = RuleId.M05

    def shift_clutter(self, node, ctx: RuleContext) -> Optional[ShiftClutter]:
        if not _is_system_call(node, "CAST", ctx) or len(node.args) != 2:
            return None
        shift = node.args[1]
        if not _is_system_call(shift, "SHIFT", ctx) or len(shift.args) != 2:
            return None
        inner = shift.args[0]
        if not _is_system_call(inner, "CAST", ctx) or len(inner.args) != 2:
            return None
        if not self.is_bitset_type(inner.args[0], ctx):
            return None
        return ShiftClutter(
            target=ctx.text(node.args[0].span),
            value=inner.args[1],
            amount=shift.args[1],
        )

    def is_bitset_type(self, expr, ctx: RuleContext) -> bool:
        if not isinstance(expr, Designator) or expr.selectors:
            return False
        symbol = ctx.symbols.symbol_for(expr.root)
        fact = type_of_type_symbol(symbol) if symbol is not None else None
        if fact is not None:
            return type_category(fact) == TypeCategory.SET
        return BITSET_FAMILY.fullmatch(expr.root.name) is not None

    def ord_cast(self, node, ctx: RuleContext) -> Optional[FunctionCall]:
        if not _is_system_call(node, "CAST", ctx) or len(node.args) != 2:
            return None
        ord_call = node.args[1]
        if not isinstance(ord_call, FunctionCall) or ord_call.callee.selectors:
            return None
        symbol = ctx.symbols.symbol_for(ord_call.callee.root)
        if symbol is None or symbol.origin != Origin.PERVASIVE or symbol.name != "ORD":
            return None
        return ord_call

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for node in walk(ctx.unit):
            match = self.shift_clutter(node, ctx)
            if match is None:
                continue
            replacement = f"SHIFT({ctx.text(match.value.span)}, {ctx.text(match.amount.span)})"
            edits = [TextEdit(span=node.span, replacement=replacement)] if ctx.revised else None
            diagnostics.append(ctx.diagnostic(
                self.id,
                node.span,
                "cast clutter around SHIFT; the revised dialect lets SHIFT operate on any "
                f"8, 16, 32 or 64 bit value, so write {replacement}",
                edits=edits,
            ))

        # ORD casts are companions only within the outermost arithmetic expression
        for node, parent in walk_with_parent(ctx.unit):
            if not isinstance(node, Binary) or isinstance(parent, Binary):
                continue
            targets: Set[str] = set()
            for inner in walk(node):
                match = self.shift_clutter(inner, ctx)
                if match is not None:
                    targets.add(match.target)
            if not targets:
                continue
            for inner in walk(node):
                ord_call = self.ord_cast(inner, ctx)
                if ord_call is None or ctx.text(inner.args[0].span) not in targets:
                    continue
                replacement = ctx.text(ord_call.span)
                edits = [TextEdit(span=inner.span, replacement=replacement)] if ctx.revised else None
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    inner.span,
                    f"cast of {replacement} is only needed to match the SHIFT cast clutter "
                    f"in this expression; write {replacement}",
                    edits=edits,
                ))
        return diagnostics


class VariantRecordRule(Rule):
    """M2R-M06: registros variantes"""

    id = RuleId.M06

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        owners: Dict[int, TypeDecl] = {
            id(node.type): node
            for node in walk(ctx.unit)
            if isinstance(node, TypeDecl) and isinstance(node.type, RecordType)
        }

        for node, parent in walk_with_parent(ctx.unit):
            if not isinstance(node, VariantPart):
                continue
            message = (
                "variant records are removed in the revised dialect; "
                "replace them with extensible records"
            )
            edits = None
            note = None
            decl = owners.get(id(parent))
            if ctx.revised and isinstance(parent, (Variant, VariantPart)):
                message += f" (not fixable: {NotFixableReason.NESTED.value})"
            elif ctx.revised and decl is None:
                message += " (not fixable: the record is not a named type declaration)"
            elif ctx.revised:
                result = transform_variant_record(decl, ctx.source, ctx.symbols, ctx.unit)
                if isinstance(result, NotFixable):
                    message += f" (not fixable: {result.reason.value})"
                else:
                    edits, note = list(result.edits), result.note
            diagnostics.append(ctx.diagnostic(self.id, node.span, message, edits=edits, note=note))
        return diagnostics
