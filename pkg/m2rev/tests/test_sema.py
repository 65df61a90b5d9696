"""
Tests para la tabla de símbolos y los hechos semánticos.
"""

from pathlib import Path

import pytest

from app.models.ast import Assignment, Binary, Designator, walk
from app.models.symbols import NilCompatibility, Origin, SetTypedness, SymbolKind
from app.schemas.config import RunConfig
from app.schemas.rule import RuleId
from app.services.dialect import LEGACY_PROFILE, REVISED_PROFILE
from app.services.project import load_project, parse_source
from app.services.sema import (
    NilContext,
    TypeCategory,
    build_symbols,
    classify_nil_compatibility,
    find_imported_writes,
    set_typedness,
)


def symbols_for(source, profile=REVISED_PROFILE):
    entry = parse_source("Test.mod", source, profile)
    return entry.unit, build_symbols(entry.unit, profile, None, "Test.mod")


def idents_named(unit, name):
    return [n.root for n in walk(unit) if isinstance(n, Designator) and n.root.name == name]


def subtractions(unit):
    return [n for n in walk(unit) if isinstance(n, Binary) and n.op == "-"]


class TestSymbolTable:
    """Tests para declaración y resolución de nombres"""

    def test_local_declarations_resolve(self):
        """Test un uso de variable resuelve a su declaración"""
        unit, table = symbols_for("MODULE T;\nVAR n : INTEGER;\nBEGIN n := 1 END T.\n")
        use = idents_named(unit, "n")[0]
        symbol = table.symbol_for(use)
        assert symbol.kind == SymbolKind.VAR
        assert symbol.origin == Origin.LOCAL
        assert symbol.decl_span.start_line == 2

    def test_procedure_scope_shadows_module(self):
        """Test una variable local de procedimiento oculta la del módulo"""
        unit, table = symbols_for(
            "MODULE T;\nVAR n : INTEGER;\nPROCEDURE P;\nVAR n : CHAR;\nBEGIN n := 'a' END P;\n"
            "BEGIN n := 1 END T.\n"
        )
        inner, outer = idents_named(unit, "n")
        assert table.symbol_for(inner) is not table.symbol_for(outer)
        assert table.symbol_for(inner).decl_span.start_line == 4

    def test_system_imports(self):
        """Test FROM SYSTEM IMPORT registra nombres importados de SYSTEM"""
        unit, table = symbols_for(
            "MODULE T;\nFROM SYSTEM IMPORT SHIFT;\nVAR b : BITSET;\nBEGIN b := SHIFT(b, 1) END T.\n"
        )
        symbol = table.exports["SHIFT"]
        assert symbol.kind == SymbolKind.IMPORT
        assert symbol.module == "SYSTEM"
        assert symbol.is_imported

    def test_duplicate_declaration(self):
        """Test declarar dos veces el mismo nombre produce M2R-E03"""
        _, table = symbols_for("MODULE T;\nVAR x : INTEGER;\nCONST x = 1;\nEND T.\n")
        assert [d.rule for d in table.diagnostics] == [RuleId.E03.value]
        assert table.diagnostics[0].message == "'x' is already declared in this scope"
        assert table.diagnostics[0].file == "Test.mod"

    def test_forward_declaration_is_not_duplicate(self):
        """Test PROCEDURE P; FORWARD seguido de su cuerpo no es duplicado"""
        _, table = symbols_for(
            "MODULE T;\nPROCEDURE P; FORWARD;\nPROCEDURE P;\nBEGIN END P;\nEND T.\n"
        )
        assert table.diagnostics == []

    def test_unresolved_names(self):
        """Test un nombre desconocido queda registrado como no resuelto"""
        unit, table = symbols_for("MODULE T;\nBEGIN Missing := 1 END T.\n")
        use = idents_named(unit, "Missing")[0]
        assert table.is_unresolved(use)
        assert table.symbol_for(use) is None

    def test_revised_pervasives(self):
        """Test los pervasivos propios del dialecto revisado y los retirados"""
        _, revised = symbols_for("MODULE T;\nEND T.\n", REVISED_PROFILE)
        _, legacy = symbols_for("MODULE T;\nEND T.\n", LEGACY_PROFILE)
        assert revised.pervasive.symbols["LONGCARD"].revised_only
        assert revised.pervasive.symbols["INT"].removed
        assert "LONGCARD" not in legacy.pervasive.symbols
        assert not legacy.pervasive.symbols["INT"].removed

    def test_local_module_is_closed(self):
        """Test un módulo local solo ve lo que importa"""
        unit, table = symbols_for(
            "MODULE T;\nVAR a, b : INTEGER;\nMODULE L;\n  IMPORT a;\n"
            "BEGIN a := 1; b := 2 END L;\nEND T.\n"
        )
        assert table.symbol_for(idents_named(unit, "a")[0]) is not None
        assert table.is_unresolved(idents_named(unit, "b")[0])

    def test_with_statement_fields(self):
        """Test dentro de WITH los campos del registro resuelven como FIELD"""
        unit, table = symbols_for(
            "MODULE T;\nTYPE R = RECORD x : INTEGER END;\nVAR r : R;\n"
            "BEGIN WITH r DO x := 1 END END T.\n"
        )
        use = idents_named(unit, "x")[0]
        assert table.symbol_for(use).kind == SymbolKind.FIELD


class TestSetTypedness:
    """Tests para la clasificación de expresiones de conjunto"""

    def test_set_variables(self):
        """Test s - t con variables BITSET es conjunto"""
        unit, table = symbols_for(
            "MODULE T;\nVAR s, t : BITSET;\nBEGIN s := s - t END T.\n"
        )
        assert set_typedness(subtractions(unit)[0], table) == SetTypedness.IS_SET

    def test_integers(self):
        """Test i - j con enteros no es conjunto"""
        unit, table = symbols_for("MODULE T;\nVAR i, j : INTEGER;\nBEGIN i := i - j END T.\n")
        assert set_typedness(subtractions(unit)[0], table) == SetTypedness.NOT_SET

    def test_set_constructor(self):
        """Test un constructor de conjunto hace evidente el tipo"""
        unit, table = symbols_for(
            "MODULE T;\nVAR s : BITSET;\nBEGIN s := s - {1, 2} END T.\n"
        )
        assert set_typedness(subtractions(unit)[0], table) == SetTypedness.IS_SET

    def test_declared_set_type(self):
        """Test un tipo SET OF declarado por el usuario"""
        unit, table = symbols_for(
            "MODULE T;\nTYPE Day = (Mon, Tue); Days = SET OF Day;\nVAR a, b : Days;\n"
            "BEGIN a := a - b END T.\n"
        )
        assert set_typedness(subtractions(unit)[0], table) == SetTypedness.IS_SET

    def test_unknown_operands(self):
        """Test operandos no resueltos dan unknown"""
        unit, table = symbols_for("MODULE T;\nBEGIN a := b - c END T.\n")
        assert set_typedness(subtractions(unit)[0], table) == SetTypedness.UNKNOWN

    def test_constant_set_value(self):
        """Test una constante con valor conjunto se sigue hasta su definición"""
        unit, table = symbols_for(
            "MODULE T;\nCONST Low = {0..3};\nVAR s : BITSET;\nBEGIN s := s - Low END T.\n"
        )
        assert set_typedness(subtractions(unit)[0], table) == SetTypedness.IS_SET


class TestNilCompatibility:
    """Tests para la clasificación de NIL"""

    @pytest.mark.parametrize(
        "category,expected",
        [
            (TypeCategory.OPAQUE, NilCompatibility.LEGACY_RESTRICTED),
            (TypeCategory.PROCEDURE, NilCompatibility.LEGACY_RESTRICTED),
            (TypeCategory.POINTER, NilCompatibility.ALLOWED),
        ],
    )
    def test_legacy_profile(self, category, expected):
        """Test bajo el perfil legado solo opacos y procedimientos están restringidos"""
        assert classify_nil_compatibility(NilContext(profile=LEGACY_PROFILE, category=category)) == expected

    def test_revised_profile(self):
        """Test bajo el perfil revisado NIL siempre es compatible"""
        context = NilContext(profile=REVISED_PROFILE, category=TypeCategory.OPAQUE)
        assert classify_nil_compatibility(context) == NilCompatibility.ALLOWED


class TestProjectSymbols:
    """Tests para resolución entre módulos de un proyecto cargado"""

    @pytest.mark.asyncio
    async def test_imports_resolve_to_definitions(self, fixtures_dir):
        """Test FROM Stacks IMPORT Stack apunta al símbolo de Stacks.def"""
        project = await load_project([str(fixtures_dir / "revised")], RunConfig())
        main = next(u for u in project.units if Path(u.path).name == "Main.mod")
        definition = project.definition_table("Stacks")
        stack = main.symbols.exports["Stack"]
        assert stack.is_imported
        assert stack.target is definition.exports["Stack"]
        assert stack.definition.kind == SymbolKind.TYPE

    @pytest.mark.asyncio
    async def test_implementation_inherits_definition(self, fixtures_dir):
        """Test la parte de implementación ve lo declarado en su definición sin duplicados"""
        project = await load_project([str(fixtures_dir / "revised")], RunConfig())
        implementation = next(u for u in project.units if Path(u.path).name == "Stacks.mod")
        assert [d for d in implementation.diagnostics if d.rule == RuleId.E03.value] == []
        assert "IsEmpty" in implementation.symbols.exports

    @pytest.mark.asyncio
    async def test_imported_writes(self, fixtures_dir):
        """Test asignaciones y argumentos VAR sobre variables de Globals"""
        project = await load_project([str(fixtures_dir / "legacy")], RunConfig(profile="legacy"))
        writer = next(u for u in project.units if Path(u.path).name == "Writer.mod")
        sites = find_imported_writes(writer.unit, writer.symbols)
        assert [(s.module, s.name, s.kind) for s in sites] == [
            ("Globals", "counter", "assignment"),
            ("Globals", "counter", "var-argument"),
            ("Globals", "name", "assignment"),
        ]

    def test_local_writes_are_not_reported(self):
        """Test escribir variables propias no es una escritura importada"""
        unit, table = symbols_for("MODULE T;\nVAR n : CARDINAL;\nBEGIN n := 1; INC(n) END T.\n")
        assert find_imported_writes(unit, table) == []
        assert isinstance(unit.body.body[0], Assignment)
