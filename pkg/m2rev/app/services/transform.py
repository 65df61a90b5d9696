"""
Transformación de código: planificación y aplicación de ediciones, ciclo
de corrección hasta punto fijo y conversión de registros variantes.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple, Union

from app.config import settings
from app.core.exceptions import EditScriptError, FixpointError
from app.models.ast import (
    CompilationUnit,
    Designator,
    FieldDecl,
    FieldSelector,
    NamedType,
    RecordType,
    TypeDecl,
    VariantPart,
    walk,
)
from app.models.symbols import Scope, ScopedSymbols, SymbolKind
from app.schemas.common import SourceSpan
from app.schemas.diagnostic import Diagnostic, DroppedFix, EditScript, TextEdit
from app.schemas.rule import FIX_PRIORITY
from app.services.dialect import DialectProfile
from app.services.lexer import tokenize
from app.services.sema import TypeCategory, designator_type, record_fields, type_category

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Edit planning


def _conflicts(edit: TextEdit, other: TextEdit) -> bool:
    """True si dos ediciones no pueden aplicarse juntas"""
    a, b = edit.span, other.span
    if a.overlaps(b):
        return True
    # insertions collide at the same point or strictly inside a replacement
    if a.length == 0 and b.length == 0:
        return a.start == b.start
    if a.length == 0:
        return b.start < a.start < b.end
    if b.length == 0:
        return a.start < b.start < a.end
    return False


def plan_edits(diagnostics: Iterable[Diagnostic], config=None) -> Dict[str, EditScript]:
    """
    Combina las correcciones de los diagnósticos en un EditScript por archivo.

    Args:
        diagnostics: Diagnósticos producidos por las reglas
        config: RuleConfig opcional; las reglas deshabilitadas no aportan ediciones

    Returns:
        Diccionario archivo → EditScript. Los conflictos se resuelven por
        prioridad de regla y, a igual prioridad, gana el span más interno;
        las correcciones perdedoras quedan en EditScript.dropped y se
        re-derivan en la siguiente pasada
    """
    by_file: Dict[str, List[Diagnostic]] = {}
    for diagnostic in diagnostics:
        if diagnostic.fix is None:
            continue
        if config is not None and not config.is_enabled(diagnostic.rule):
            continue
        by_file.setdefault(diagnostic.file, []).append(diagnostic)

    scripts: Dict[str, EditScript] = {}
    for file in sorted(by_file):
        candidates = sorted(
            by_file[file],
            key=lambda d: (
                FIX_PRIORITY.get(d.rule, len(FIX_PRIORITY)),
                d.fix.span.length,
                d.fix.span.start,
            ),
        )
        winners: List[Tuple[TextEdit, str]] = []
        dropped: List[DroppedFix] = []
        for diagnostic in candidates:
            blocking = next(
                (rule for other, rule in winners
                 if any(_conflicts(edit, other) for edit in diagnostic.fix.edits)),
                None,
            )
            if blocking is not None:
                dropped.append(DroppedFix(
                    rule=diagnostic.rule,
                    span=diagnostic.fix.span,
                    reason=f"overlaps a fix of {blocking}",
                ))
                continue
            for edit in diagnostic.fix.edits:
                winners.append((edit, diagnostic.rule))
        accepted = sorted((edit for edit, _ in winners), key=lambda e: (e.span.start, e.span.end))
        scripts[file] = EditScript(file=file, edits=accepted, dropped=dropped)
    return scripts


def apply_edits(source: str, script: EditScript) -> str:
    """
    Aplica un EditScript; el texto fuera de los spans editados no cambia.

    Raises:
        EditScriptError: Span fuera de los límites o ediciones solapadas
    """
    parts: List[str] = []
    cursor = 0
    for edit in script.edits:
        if edit.span.end > len(source) or edit.span.start < cursor:
            raise EditScriptError(
                code="EDIT_OUT_OF_BOUNDS",
                message=f"edit at {edit.span.start}..{edit.span.end} does not fit {script.file or 'source'}",
                details={"file": script.file, "length": len(source)},
            )
        parts.append(source[cursor:edit.span.start])
        parts.append(edit.replacement)
        cursor = edit.span.end
    parts.append(source[cursor:])
    return "".join(parts)


@dataclass
class FixResult:
    """Resultado del ciclo de corrección de un archivo"""

    text: str
    passes: int
    applied: int = 0
    dropped: List[DroppedFix] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return self.applied > 0


def fix_source(
    source: str,
    check: Callable[[str], List[Diagnostic]],
    profile: DialectProfile,
    file: str = "",
    config=None,
    max_passes: Optional[int] = None,
) -> FixResult:
    """
    Corrige un texto fuente repitiendo check → plan → apply hasta punto fijo.

    Args:
        source: Texto original
        check: Función que analiza un texto y devuelve sus diagnósticos
        profile: Perfil usado para verificar que no aparezcan errores léxicos nuevos
        file: Ruta del archivo (clave de los diagnósticos)
        config: RuleConfig opcional para filtrar correcciones
        max_passes: Máximo de pasadas (por defecto settings.MAX_FIX_PASSES)

    Returns:
        FixResult con el texto final y los diagnósticos que quedan

    Raises:
        FixpointError: No converge dentro del máximo de pasadas
        EditScriptError: Una edición queda fuera de rango o introduce errores léxicos
    """
    limit = max_passes or settings.MAX_FIX_PASSES
    text = source
    passes = 0
    applied = 0
    dropped: List[DroppedFix] = []
    lex_errors = len(tokenize(text, profile).errors)

    while True:
        diagnostics = check(text)
        script = plan_edits(diagnostics, config).get(file)
        if script is None or script.is_empty:
            return FixResult(text=text, passes=passes, applied=applied,
                             dropped=dropped, diagnostics=diagnostics)
        if passes == limit:
            logger.error("fix for %s did not converge after %d passes", file or "<source>", limit)
            raise FixpointError(
                code="FIXPOINT_NOT_REACHED",
                message=f"fixes for {file or 'source'} did not converge after {limit} passes",
                details={"file": file, "passes": limit},
            )

        new_text = apply_edits(text, script)
        new_errors = len(tokenize(new_text, profile).errors)
        if new_errors > lex_errors:
            raise EditScriptError(
                code="FIX_BREAKS_LEXING",
                message=f"fixes for {file or 'source'} introduced lexical errors",
                details={"file": file, "pass": passes + 1},
            )
        passes += 1
        applied += len(script.edits)
        dropped.extend(script.dropped)
        logger.debug("fix pass %d on %s: %d edits, %d dropped",
                     passes, file or "<source>", len(script.edits), len(script.dropped))
        text, lex_errors = new_text, new_errors


# ----------------------------------------------------------------------
# Variant records → extensible records


class NotFixableReason(str, Enum):
    NESTED = "nested"
    ELSE_PART = "else-part"
    MULTIPLE_LABELS = "multiple-labels"
    MULTIPLE_VARIANT_PARTS = "multiple-variant-parts"
    LABEL = "label"
    BASE_TYPE = "base-type"
    COLLISION = "collision"


@dataclass(frozen=True)
class NotFixable:
    reason: NotFixableReason
    detail: str = ""


@dataclass(frozen=True)
class VariantRecordFix:
    """Declaraciones generadas para reemplazar un registro variante"""

    declarations: Tuple[str, ...]
    edits: Tuple[TextEdit, ...]
    note: Optional[str] = None


def _declared_names(scope: Scope, into: Set[str]) -> None:
    into.update(scope.symbols)
    for child in scope.children:
        _declared_names(child, into)


def _field_text(source: str, decl: FieldDecl) -> str:
    names = ", ".join(name.name for name in decl.names)
    return f"{names} : {source[decl.type.span.start:decl.type.span.end]}"


def _record_text(base: str, fields: List[FieldDecl], source: str) -> str:
    body = "; ".join(_field_text(source, f) for f in fields)
    return f"RECORD ({base}) {body} END" if body else f"RECORD ({base}) END"


def _indentation(source: str, offset: int) -> str:
    line_start = source.rfind("\n", 0, offset) + 1
    return "".join(ch if ch == "\t" else " " for ch in source[line_start:offset])


def _has_nested_variant(record: RecordType) -> bool:
    for part in record.variant_parts:
        arms = [variant.items for variant in part.variants] + [part.else_items or ()]
        if any(isinstance(item, VariantPart) for items in arms for item in items):
            return True
    return False


def _is_tag_field(field_type, part: VariantPart) -> bool:
    # record_fields comparte el QualIdent del discriminante
    return isinstance(field_type, NamedType) and field_type.name is part.tag_type


def _tag_uses(unit: Optional[CompilationUnit], part: VariantPart, symbols: ScopedSymbols) -> List[SourceSpan]:
    """Usos del campo discriminante: selectores r.tag y nombres sueltos dentro de WITH"""
    tag = part.tag_field.name
    uses: List[SourceSpan] = []
    for node in walk(unit) if unit is not None else ():
        if not isinstance(node, Designator):
            continue
        symbol = symbols.symbol_for(node.root)
        if (
            node.root.name == tag
            and symbol is not None
            and symbol.kind == SymbolKind.FIELD
            and _is_tag_field(symbol.type_ref, part)
        ):
            uses.append(node.root.span)
        for index, selector in enumerate(node.selectors):
            if not isinstance(selector, FieldSelector) or selector.name.name != tag:
                continue
            owner = designator_type(replace(node, selectors=node.selectors[:index]), symbols)
            if type_category(owner) != TypeCategory.RECORD:
                continue
            entry = record_fields(owner).get(tag)
            if entry is not None and _is_tag_field(entry[0], part):
                uses.append(node.span)
    return uses


def transform_variant_record(
    decl: TypeDecl,
    source: str,
    symbols: ScopedSymbols,
    unit: Optional[CompilationUnit] = None,
) -> Union[VariantRecordFix, NotFixable]:
    """
    Convierte un registro variante simple en un registro base extensible
    más una extensión por cada brazo.

    Args:
        decl: Declaración de tipo cuyo tipo es un RECORD con parte variante
        source: Texto del archivo (para copiar los tipos de los campos)
        symbols: Tabla de símbolos (detección de colisiones de nombres)
        unit: Unidad donde buscar usos del campo discriminante

    Returns:
        VariantRecordFix con la edición que reemplaza la declaración, o
        NotFixable con el motivo cuando la forma no es simple
    """
    record = decl.type
    if not isinstance(record, RecordType) or not record.variant_parts:
        return NotFixable(NotFixableReason.LABEL, "no variant part")
    if _has_nested_variant(record):
        return NotFixable(NotFixableReason.NESTED)
    if record.base_type is not None:
        return NotFixable(NotFixableReason.BASE_TYPE)
    if len(record.variant_parts) != 1:
        return NotFixable(NotFixableReason.MULTIPLE_VARIANT_PARTS)
    part = record.variant_part
    if part.else_items is not None:
        return NotFixable(NotFixableReason.ELSE_PART)

    base_name = decl.name.name
    arm_names: List[str] = []
    for variant in part.variants:
        if len(variant.labels) != 1:
            return NotFixable(NotFixableReason.MULTIPLE_LABELS)
        label = variant.labels[0]
        if not label.is_identifier:
            return NotFixable(NotFixableReason.LABEL, source[label.span.start:label.span.end])
        text = label.low.root.name
        arm_names.append(base_name + text[:1].upper() + text[1:])

    taken: Set[str] = set()
    _declared_names(symbols.module_scope, taken)
    seen: Set[str] = set()
    for name in arm_names:
        if name in taken or name in seen:
            return NotFixable(NotFixableReason.COLLISION, name)
        seen.add(name)

    indent = _indentation(source, decl.span.start)
    declarations = [f"{base_name} = {_record_text('NIL', list(record.fields), source)}"]
    for name, variant in zip(arm_names, part.variants):
        fields = [item for item in variant.items if isinstance(item, FieldDecl)]
        declarations.append(f"{name} = {_record_text(base_name, fields, source)}")
    replacement = (";\n" + indent).join(declarations)

    note = None
    if part.tag_field is not None:
        tag = part.tag_field.name
        uses = _tag_uses(unit, part, symbols)
        note = f"tag field '{tag}' was dropped; use CASE type guards instead"
        if uses:
            sites = ", ".join(f"{span.start_line}:{span.start_col}" for span in uses)
            note += f" (uses at {sites})"

    return VariantRecordFix(
        declarations=tuple(declarations),
        edits=(TextEdit(span=decl.span, replacement=replacement),),
        note=note,
    )
