"""
Reglas léxicas: símbolos sinónimos, literales octales y el operador de
diferencia de conjuntos.
"""

from typing import List

from app.models.ast import Binary, walk
from app.models.symbols import SetTypedness
from app.schemas.diagnostic import Diagnostic, TextEdit
from app.schemas.rule import RuleId
from app.schemas.token import SYNONYMS, TokenKind
from app.services.rules.base import Rule, RuleContext
from app.services.sema import set_typedness
from app.utils.numerals import format_char_replacement, format_octal_replacement

WORD_CHARS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_0123456789")


class SynonymSymbolRule(Rule):
    """M2R-L01: '!', '@', '<>', '&' y '~'"""

    id = RuleId.L01

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for token in ctx.tokens:
            if token.kind not in SYNONYMS:
                continue
            spelling = SYNONYMS[token.kind][1]
            replacement = spelling
            if spelling.isalpha():
                start, end = token.span.start, token.span.end
                if start > 0 and ctx.source[start - 1] in WORD_CHARS:
                    replacement = " " + replacement
                if end < len(ctx.source) and ctx.source[end] in WORD_CHARS:
                    replacement = replacement + " "
            diagnostics.append(ctx.diagnostic(
                self.id,
                token.span,
                f"synonym symbol '{token.text}' is removed in the revised dialect; use '{spelling}'",
                edits=[TextEdit(span=token.span, replacement=replacement)],
            ))
        return diagnostics


class OctalLiteralRule(Rule):
    """M2R-L02: literales con sufijo B y C"""

    id = RuleId.L02

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for token in ctx.tokens:
            if token.kind == TokenKind.OCTAL_NUMBER:
                replacement = format_octal_replacement(int(token.value))
                message = (
                    f"octal literal '{token.text}' is removed in the revised dialect; "
                    f"write {replacement}"
                )
            elif token.kind == TokenKind.OCTAL_CHAR:
                replacement = format_char_replacement(int(token.value))
                message = (
                    f"octal character literal '{token.text}' is removed in the revised dialect; "
                    f"use {replacement}"
                )
            else:
                continue
            diagnostics.append(ctx.diagnostic(
                self.id,
                token.span,
                message,
                edits=[TextEdit(span=token.span, replacement=replacement)],
            ))
        return diagnostics


class SetDifferenceRule(Rule):
    """M2R-L03: '-' entre operandos de tipo conjunto"""

    id = RuleId.L03

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for node in walk(ctx.unit):
            if not isinstance(node, Binary) or node.op != "-":
                continue
            left = set_typedness(node.lhs, ctx.symbols)
            right = set_typedness(node.rhs, ctx.symbols)
            if SetTypedness.NOT_SET in (left, right):
                continue
            if left == right == SetTypedness.IS_SET:
                edits = [TextEdit(span=node.op_span, replacement="\\")] if ctx.revised else None
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    node.op_span,
                    "set difference is written '\\' in the revised dialect, not '-'",
                    edits=edits,
                ))
            else:
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    node.op_span,
                    "possible set difference: if both operands are sets, write '\\' instead of '-'",
                    advisory=True,
                ))
        return diagnostics
