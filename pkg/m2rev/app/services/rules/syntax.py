"""
Reglas sintácticas: arreglos multidimensionales en forma larga, módulos
locales y módulos de definición foráneos.
"""

from typing import List

from app.models.ast import ArrayType, LocalModuleDecl, PragmaKind, UnitKind, walk
from app.schemas.diagnostic import Diagnostic, TextEdit
from app.schemas.rule import RuleId
from app.services.parser import KNOWN_FOREIGN_APIS
from app.services.rules.base import Rule, RuleContext, gap_between, join_spans


class LongFormArrayRule(Rule):
    """M2R-S01: ARRAY A OF ARRAY B OF T"""

    id = RuleId.S01

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for node in walk(ctx.unit):
            if not isinstance(node, ArrayType) or not isinstance(node.element, ArrayType):
                continue
            inner = node.element
            gap = gap_between(node.dimensions[-1].span, inner.dimensions[0].span)
            between = ctx.text(gap)
            edits = None
            if "(*" not in between and "<*" not in between:
                edits = [TextEdit(span=gap, replacement=", ")]
            diagnostics.append(ctx.diagnostic(
                self.id,
                join_spans(node.span, inner.dimensions[0].span),
                "long-form multi-dimensional array 'OF ARRAY' is deprecated; "
                "list the index types separated by commas",
                edits=edits,
            ))
        return diagnostics


class LocalModuleRule(Rule):
    """M2R-S03: MODULE anidado dentro de un bloque"""

    id = RuleId.S03

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        diagnostics = []
        for node in walk(ctx.unit):
            if isinstance(node, LocalModuleDecl):
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    join_spans(node.span, node.name.span),
                    f"local module '{node.name.name}' is deprecated; "
                    "move it into a separate library module",
                ))
        return diagnostics


class ForeignInterfaceRule(Rule):
    """M2R-S05: FFI con una API fuera de {ASM, C, Fortran, Pascal}"""

    id = RuleId.S05

    def check(self, ctx: RuleContext) -> List[Diagnostic]:
        if ctx.unit.kind != UnitKind.DEFINITION:
            return []
        diagnostics = []
        for pragma in ctx.unit.pragmas:
            if pragma.kind == PragmaKind.FFI and pragma.foreign_api not in KNOWN_FOREIGN_APIS:
                diagnostics.append(ctx.diagnostic(
                    self.id,
                    pragma.span,
                    f"unknown foreign API \"{pragma.foreign_api}\" in FFI directive; "
                    f"expected one of {', '.join(sorted(KNOWN_FOREIGN_APIS))}",
                ))
        return diagnostics
