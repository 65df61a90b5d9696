"""
Tests para la planificación de ediciones y el ciclo de corrección.
"""

import pytest

from app.core.exceptions import EditScriptError, FixpointError
from app.models.ast import TypeDecl
from app.schemas.common import Severity, SourceSpan
from app.schemas.config import RuleConfig
from app.schemas.diagnostic import Diagnostic, EditScript, FixPlan, TextEdit
from app.services.dialect import REVISED_PROFILE
from app.services.project import analyze_source
from app.services.transform import (
    NotFixable,
    NotFixableReason,
    VariantRecordFix,
    apply_edits,
    fix_source,
    plan_edits,
    transform_variant_record,
)


def span(start, end):
    return SourceSpan(start=start, end=end)


def fixable(rule, start, end, replacement, file="F.mod"):
    edit = TextEdit(span=span(start, end), replacement=replacement)
    return Diagnostic(
        rule=rule, severity=Severity.ERROR, span=span(start, end), message=rule,
        fix=FixPlan(edits=(edit,)), file=file,
    )


def variant_fix(source, name="R"):
    entry = analyze_source("T.mod", source, REVISED_PROFILE)
    decl = next(d for d in entry.unit.declarations if isinstance(d, TypeDecl) and d.name.name == name)
    return transform_variant_record(decl, source, entry.symbols, entry.unit)


class TestPlanEdits:
    """Tests para la combinación de correcciones por archivo"""

    def test_disjoint_fixes_are_sorted(self):
        """Test correcciones disjuntas se aceptan en orden de posición"""
        scripts = plan_edits([fixable("M2R-L02", 10, 14, "0FFH"), fixable("M2R-L01", 2, 3, "#")])
        script = scripts["F.mod"]
        assert [e.span.start for e in script.edits] == [2, 10]
        assert script.dropped == []

    def test_rule_priority_wins(self):
        """Test ante solapamiento gana la regla de menor rango"""
        scripts = plan_edits([
            fixable("M2R-P04", 0, 20, "x :: INTEGER"),
            fixable("M2R-L01", 5, 6, "#"),
        ])
        script = scripts["F.mod"]
        assert [e.replacement for e in script.edits] == ["#"]
        [dropped] = script.dropped
        assert dropped.rule == "M2R-P04"
        assert dropped.reason == "overlaps a fix of M2R-L01"

    def test_inner_span_wins_on_equal_priority(self):
        """Test a igual regla gana la corrección más interna"""
        scripts = plan_edits([
            fixable("M2R-P04", 0, 30, "outer"),
            fixable("M2R-P04", 5, 20, "inner"),
        ])
        assert [e.replacement for e in scripts["F.mod"].edits] == ["inner"]

    def test_insertions_at_same_point_conflict(self):
        """Test dos inserciones en el mismo offset no se aplican juntas"""
        scripts = plan_edits([fixable("M2R-L01", 4, 4, "a"), fixable("M2R-L02", 4, 4, "b")])
        script = scripts["F.mod"]
        assert len(script.edits) == 1
        assert len(script.dropped) == 1

    def test_adjacent_edits_do_not_conflict(self):
        """Test ediciones contiguas sin bytes compartidos son compatibles"""
        scripts = plan_edits([fixable("M2R-L01", 0, 2, "a"), fixable("M2R-L01", 2, 4, "b")])
        assert len(scripts["F.mod"].edits) == 2

    def test_disabled_rules_contribute_nothing(self):
        """Test una regla deshabilitada no aporta ediciones"""
        config = RuleConfig(disabled_rules={"M2R-L01"})
        scripts = plan_edits([fixable("M2R-L01", 0, 1, "#")], config)
        assert scripts == {}

    def test_one_script_per_file(self):
        """Test las correcciones se agrupan por archivo"""
        scripts = plan_edits([
            fixable("M2R-L01", 0, 1, "#", file="B.mod"),
            fixable("M2R-L01", 0, 1, "#", file="A.mod"),
        ])
        assert list(scripts) == ["A.mod", "B.mod"]


class TestApplyEdits:
    """Tests para la aplicación de un EditScript"""

    def test_text_outside_edits_is_preserved(self):
        """Test solo cambian los rangos editados"""
        script = EditScript(file="F.mod", edits=[
            TextEdit(span=span(2, 4), replacement="<>"),
            TextEdit(span=span(6, 6), replacement="!"),
        ])
        assert apply_edits("0123456789", script) == "01<>45!6789"

    def test_out_of_bounds(self):
        """Test un span fuera del texto es un EditScriptError"""
        script = EditScript(file="F.mod", edits=[TextEdit(span=span(5, 10), replacement="x")])
        with pytest.raises(EditScriptError) as exc_info:
            apply_edits("abc", script)
        assert exc_info.value.code == "EDIT_OUT_OF_BOUNDS"

    def test_overlapping_edits_are_rejected(self):
        """Test EditScript no admite ediciones solapadas"""
        with pytest.raises(ValueError):
            EditScript(file="F.mod", edits=[
                TextEdit(span=span(0, 5), replacement="a"),
                TextEdit(span=span(3, 6), replacement="b"),
            ])


class TestFixSource:
    """Tests para el ciclo de corrección hasta punto fijo"""

    def test_nested_conversions_need_two_passes(self, fixtures_dir, fix_text):
        """Test CARD(VAL(CARDINAL, i)) converge en dos pasadas"""
        source = (fixtures_dir / "legacy" / "Conversions.mod").read_text(encoding="latin-1")
        result = fix_text(source)
        assert result.passes == 2
        assert "c := (i :: CARDINAL) :: CARDINAL;" in result.text
        assert "i := c :: INTEGER;" in result.text
        assert "c := TRUNC(r)" in result.text
        assert any(d.reason == "overlaps a fix of M2R-P04" for d in result.dropped)

    def test_pass_limit(self, fixtures_dir, fix_text):
        """Test sin pasadas suficientes se lanza FixpointError"""
        source = (fixtures_dir / "legacy" / "Conversions.mod").read_text(encoding="latin-1")
        with pytest.raises(FixpointError) as exc_info:
            fix_text(source, max_passes=1)
        assert exc_info.value.code == "FIXPOINT_NOT_REACHED"

    def test_clean_source_is_untouched(self, fixtures_dir, fix_text):
        """Test un archivo sin correcciones queda igual y sin pasadas"""
        source = (fixtures_dir / "revised" / "Stacks.mod").read_text(encoding="latin-1")
        result = fix_text(source, path="Stacks.mod")
        assert result.text == source
        assert result.passes == 0
        assert not result.changed

    def test_fix_that_breaks_lexing(self):
        """Test una corrección que introduce errores léxicos se rechaza"""
        quote = fixable("M2R-L01", 0, 0, '"', file="")
        with pytest.raises(EditScriptError) as exc_info:
            fix_source("MODULE T;\nEND T.\n", lambda text: [quote], REVISED_PROFILE)
        assert exc_info.value.code == "FIX_BREAKS_LEXING"

    def test_remaining_diagnostics_are_reported(self, fixtures_dir, fix_text):
        """Test los hallazgos sin corrección quedan en el resultado"""
        source = (fixtures_dir / "legacy" / "Counter.mod").read_text(encoding="latin-1")
        result = fix_text(source, path="Counter.mod")
        assert [d.rule for d in result.diagnostics] == ["M2R-S03"]
        assert result.text == source

    def test_legacy_profile_applies_only_lexical_fixes(self, fixtures_dir, fix_text):
        """Test bajo el perfil legado L02 se corrige pero P04 no"""
        source = "MODULE T;\nVAR i : INTEGER; c : CARDINAL;\nBEGIN c := 17B; i := INT(c) END T.\n"
        result = fix_text(source, profile="legacy")
        assert "c := 0FH;" in result.text
        assert "INT(c)" in result.text


class TestVariantRecords:
    """Tests para la conversión de registros variantes"""

    def test_simple_record(self):
        """Test base extensible y una extensión por brazo"""
        source = (
            "MODULE T;\nTYPE\n  K = (circle, square);\n"
            "  R = RECORD x : REAL; CASE k : K OF circle : r : REAL | square : s, t : REAL END END;\n"
            "END T.\n"
        )
        result = variant_fix(source)
        assert isinstance(result, VariantRecordFix)
        assert result.declarations == (
            "R = RECORD (NIL) x : REAL END",
            "RCircle = RECORD (R) r : REAL END",
            "RSquare = RECORD (R) s, t : REAL END",
        )
        assert result.note == "tag field 'k' was dropped; use CASE type guards instead"

    def test_record_without_common_fields(self):
        """Test sin campos comunes la base queda vacía"""
        source = "MODULE T;\nTYPE\n  K = (a, b);\n  R = RECORD CASE : K OF a : i : INTEGER | b : c : CHAR END END;\nEND T.\n"
        result = variant_fix(source)
        assert result.declarations[0] == "R = RECORD (NIL) END"
        assert result.note is None

    @pytest.mark.parametrize(
        "record,reason",
        [
            ("RECORD CASE k : K OF a, b : i : INTEGER END END", NotFixableReason.MULTIPLE_LABELS),
            ("RECORD CASE k : CARDINAL OF 1 : i : INTEGER END END", NotFixableReason.LABEL),
            ("RECORD CASE k : K OF a : i : INTEGER ELSE c : CHAR END END", NotFixableReason.ELSE_PART),
            (
                "RECORD CASE k : K OF a : CASE j : K OF a : x : CHAR END | b : i : INTEGER END END",
                NotFixableReason.NESTED,
            ),
            (
                "RECORD CASE k : K OF a : i : INTEGER END; CASE j : K OF b : c : CHAR END END",
                NotFixableReason.MULTIPLE_VARIANT_PARTS,
            ),
        ],
    )
    def test_not_fixable(self, record, reason):
        """Test formas no simples devuelven el motivo"""
        source = f"MODULE T;\nTYPE\n  K = (a, b);\n  R = {record};\nEND T.\n"
        result = variant_fix(source)
        assert isinstance(result, NotFixable)
        assert result.reason == reason

    @pytest.mark.parametrize(
        "record",
        [
            "RECORD CASE k : K OF a : i : INTEGER ELSE CASE j : K OF a : x : CHAR END END END",
            "RECORD CASE k : K OF a, b : CASE j : K OF a : x : CHAR END END END",
            "RECORD CASE k : K OF a : i : INTEGER END; CASE j : K OF b : CASE m : K OF a : c : CHAR END END END",
        ],
    )
    def test_nested_takes_precedence(self, record):
        """Test una parte variante anidada se informa aunque apliquen otros motivos"""
        source = f"MODULE T;\nTYPE\n  K = (a, b);\n  R = {record};\nEND T.\n"
        result = variant_fix(source)
        assert result.reason == NotFixableReason.NESTED

    def test_tag_uses_ignore_unrelated_records(self):
        """Test un campo homónimo de otro registro no se lista como uso del discriminante"""
        source = (
            "MODULE T;\nTYPE\n  K = (a, b);\n"
            "  R = RECORD CASE k : K OF a : i : INTEGER | b : c : CHAR END END;\n"
            "  Other = RECORD k : K END;\n"
            "VAR r : R; o : Other;\n"
            "BEGIN\n  o.k := a;\n  r.k := b\nEND T.\n"
        )
        result = variant_fix(source)
        assert result.note.endswith("(uses at 9:3)")

    def test_tag_uses_inside_with(self):
        """Test un uso del discriminante sin calificar dentro de WITH se lista"""
        source = (
            "MODULE T;\nTYPE\n  K = (a, b);\n"
            "  R = RECORD CASE k : K OF a : i : INTEGER | b : c : CHAR END END;\n"
            "VAR r : R; k : K;\n"
            "BEGIN\n  k := a;\n  WITH r DO\n    k := b\n  END\nEND T.\n"
        )
        result = variant_fix(source)
        assert result.note.endswith("(uses at 9:5)")

    def test_tag_uses_through_pointer(self):
        """Test p^.k se resuelve a través del tipo apuntado"""
        source = (
            "MODULE T;\nTYPE\n  K = (a, b);\n"
            "  R = RECORD CASE k : K OF a : i : INTEGER | b : c : CHAR END END;\n"
            "  P = POINTER TO R;\n"
            "VAR p : P;\n"
            "BEGIN\n  p^.k := a\nEND T.\n"
        )
        result = variant_fix(source)
        assert result.note.endswith("(uses at 8:3)")

    def test_name_collision(self):
        """Test un nombre generado que ya existe impide la conversión"""
        source = (
            "MODULE T;\nTYPE\n  K = (a, b);\n  RA = INTEGER;\n"
            "  R = RECORD CASE k : K OF a : i : INTEGER | b : c : CHAR END END;\nEND T.\n"
        )
        result = variant_fix(source)
        assert result.reason == NotFixableReason.COLLISION
        assert result.detail == "RA"
