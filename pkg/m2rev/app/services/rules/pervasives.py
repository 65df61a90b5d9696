"""
M2R-P04: funciones de conversión INT, CARD, FLOAT, LFLOAT, TRUNC y VAL.
"""

from typing import List, Optional

from app.models.ast import Designator, FunctionCall, TypeConversion, walk_with_parent
from app.models.symbols import Origin
from app.schemas.diagnostic import Diagnostic, TextEdit
from app.schemas.rule import RuleId
from app.services.dialect import CONVERSION_FUNCTIONS
from app.services.rules.base import Rule, RuleContext

# conversion function → target type of the '::' replacement
CONVERSION_TARGETS = {
    "INT": "INTEGER",
    "CARD": "CARDINAL",
    "FLOAT": "REAL",
    "LFLOAT": "LONGREAL",
    "TRUNC": "CARDINAL",
}


class ConversionFunctionRule(Rule):
    """Sustituye las funciones de conversión por el operador '::'"""

    id = RuleId.P04

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for node, parent in walk_with_parent(ctx.unit):
            if not isinstance(node, FunctionCall) or node.callee.selectors:
                continue
            name = node.callee.root.name
            if name not in CONVERSION_FUNCTIONS:
                continue
            symbol = ctx.symbols.symbol_for(node.callee.root)
            if symbol is None or symbol.origin != Origin.PERVASIVE:
                continue

            replacement = self.replacement(ctx, node, name)
            if replacement is not None and isinstance(parent, TypeConversion):
                replacement = f"({replacement})"
            edits = [TextEdit(span=node.span, replacement=replacement)] if replacement else None

            if name == "TRUNC":
                message = (
                    "TRUNC() is removed in the revised dialect; '::' does not specify how reals "
                    "are rounded and ENTIER-style rounding differs from truncation, so check "
                    "the intended rounding before converting"
                )
            else:
                suggested = replacement or "the '::' conversion operator"
                message = f"{name}() is removed in the revised dialect; use {suggested}"
            diagnostics.append(ctx.diagnostic(self.id, node.span, message, edits=edits))
        return diagnostics

    def replacement(self, ctx: RuleContext, call: FunctionCall, name: str) -> Optional[str]:
        if name == "TRUNC" and not ctx.config.assume_trunc_is_conversion:
            return None
        if name == "VAL":
            if len(call.args) != 2 or not isinstance(call.args[0], Designator):
                return None
            target = ctx.text(call.args[0].span)
            operand = call.args[1]
        else:
            if len(call.args) != 1:
                return None
            target = CONVERSION_TARGETS[name]
            operand = call.args[0]
        return f"{ctx.operand_text(operand)} :: {target}"
