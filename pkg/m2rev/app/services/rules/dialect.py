"""
M2R-D01: construcciones del dialecto revisado usadas bajo el perfil legado.
"""

from typing import List

from app.models.ast import CaseStmt, RecordType, walk
from app.models.symbols import SymbolKind
from app.schemas.diagnostic import Diagnostic
from app.schemas.rule import RuleId
from app.schemas.token import TokenKind
from app.services.dialect import REVISED_ADDITIONS
from app.services.rules.base import Rule, RuleContext

_REVISED_TOKENS = {
    TokenKind.COLONCOLON: "the '::' conversion operator",
    TokenKind.BACKSLASH: "the '\\' set difference operator",
}


class RevisedConstructRule(Rule):
    """Solo activa con el perfil legado; el perfil revisado acepta todo esto"""

    id = RuleId.D01

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        if ctx.revised:
            return []
        diagnostics = []

        for token in ctx.tokens:
            if token.kind in _REVISED_TOKENS:
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    token.span,
                    f"{_REVISED_TOKENS[token.kind]} is only available in the revised dialect",
                ))

        for node in walk(ctx.unit):
            if isinstance(node, RecordType) and node.base_type is not None:
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    node.base_type.span,
                    "extensible record types are only available in the revised dialect",
                ))
            elif isinstance(node, CaseStmt):
                for arm in node.arms:
                    for label in arm.labels:
                        if not label.is_identifier:
                            continue
                        symbol = ctx.symbols.symbol_for(label.low.root)
                        if symbol is not None and symbol.definition.kind == SymbolKind.TYPE:
                            diagnostics.append(ctx.diagnostic(
                                self.id,
                                label.span,
                                "CASE labels that name types (type guards) are only "
                                "available in the revised dialect",
                            ))

        tokens_at = {token.span.start: token for token in ctx.tokens}
        for offset, name in sorted(ctx.symbols.unresolved.items()):
            if name in REVISED_ADDITIONS and offset in tokens_at:
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    tokens_at[offset].span,
                    f"pervasive {name} is only available in the revised dialect",
                ))
        return diagnostics
