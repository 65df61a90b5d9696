"""
Tests para la carga de proyectos y la verificación de PRIVATETO.
"""

from pathlib import Path

import pytest

from app.core.exceptions import SourceReadError
from app.models.ast import UnitKind
from app.schemas.common import Severity
from app.schemas.config import RuleConfig, RunConfig
from app.schemas.rule import RuleId
from app.services.project import load_project
from app.services.rules import check_private_imports


def write(root: Path, name: str, text: str) -> Path:
    path = root / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="latin-1")
    return path


def loading_findings(project):
    return [d for unit in project.units for d in unit.diagnostics if d.rule == RuleId.E04.value]


class TestProjectLoading:
    """Tests para descubrimiento, índice de módulos y grafo de importaciones"""

    @pytest.mark.asyncio
    async def test_revised_corpus(self, fixtures_dir):
        """Test índice de módulos y aristas de importación del corpus revisado"""
        project = await load_project([str(fixtures_dir / "revised")], RunConfig())
        assert sorted(project.module_index) == [
            "Counters", "Hashing", "Main", "Matrices", "SetOps", "Shapes", "Stacks",
        ]
        stacks = project.module_index["Stacks"]
        assert Path(stacks.definition_path).name == "Stacks.def"
        assert Path(stacks.implementation_path).name == "Stacks.mod"
        assert [edge.imported for edge in project.imports_of("Main")] == ["Counters", "Stacks"]
        assert loading_findings(project) == []

    @pytest.mark.asyncio
    async def test_units_are_sorted_and_complete(self, fixtures_dir):
        """Test cada archivo descubierto tiene AST y tabla de símbolos"""
        project = await load_project([str(fixtures_dir / "legacy")], RunConfig(profile="legacy"))
        paths = [unit.path for unit in project.units]
        assert paths == sorted(paths)
        assert all(unit.unit is not None and unit.symbols is not None for unit in project.units)

    @pytest.mark.asyncio
    async def test_duplicate_definition_part(self, tmp_path):
        """Test dos partes de definición del mismo módulo"""
        write(tmp_path, "A.def", "DEFINITION MODULE A;\nEND A.\n")
        write(tmp_path, "copy/A.def", "DEFINITION MODULE A;\nEND A.\n")
        project = await load_project([str(tmp_path)], RunConfig())
        [finding] = loading_findings(project)
        assert finding.severity == Severity.ERROR
        assert finding.message.startswith("duplicate definition part for module A")

    @pytest.mark.asyncio
    async def test_filename_must_match_module(self, tmp_path):
        """Test un archivo cuyo nombre no coincide con su módulo es un warning"""
        write(tmp_path, "Wrong.mod", "MODULE Right;\nEND Right.\n")
        project = await load_project([str(tmp_path)], RunConfig())
        [finding] = loading_findings(project)
        assert finding.severity == Severity.WARNING
        assert finding.message == "module Right is declared in a file named Wrong.mod"

    @pytest.mark.asyncio
    async def test_missing_module_is_external(self, tmp_path):
        """Test importar un módulo ausente es informativo salvo que se declare externo"""
        write(tmp_path, "P.mod", "MODULE P;\nIMPORT InOut, SYSTEM;\nEND P.\n")
        project = await load_project([str(tmp_path)], RunConfig())
        [finding] = loading_findings(project)
        assert finding.severity == Severity.INFO
        assert finding.message.startswith("module InOut is not part of the project")

        declared = await load_project([str(tmp_path)], RunConfig(external_modules=["InOut"]))
        assert loading_findings(declared) == []

    @pytest.mark.asyncio
    async def test_explicit_file_with_other_extension(self, tmp_path):
        """Test un archivo nombrado explícitamente se carga aunque su extensión no coincida"""
        explicit = write(tmp_path, "Legacy.m2", "MODULE Legacy;\nEND Legacy.\n")
        write(tmp_path, "Ignored.txt", "not a module")
        project = await load_project([str(explicit)], RunConfig())
        assert [Path(unit.path).name for unit in project.units] == ["Legacy.m2"]
        scanned = await load_project([str(tmp_path)], RunConfig())
        assert scanned.units == []

    @pytest.mark.asyncio
    async def test_missing_root(self, tmp_path):
        """Test una raíz inexistente es un SourceReadError"""
        with pytest.raises(SourceReadError) as exc_info:
            await load_project([str(tmp_path / "nowhere")], RunConfig())
        assert exc_info.value.code == "PATH_NOT_FOUND"

    @pytest.mark.asyncio
    async def test_broken_files_still_load(self, fixtures_dir):
        """Test los archivos con errores quedan en el proyecto con sus diagnósticos"""
        project = await load_project([str(fixtures_dir / "broken")], RunConfig())
        rules = {Path(unit.path).name: sorted({d.rule for d in unit.diagnostics}) for unit in project.units}
        assert rules == {
            "BadSyntax.mod": [RuleId.E02.value],
            "Duplicate.mod": [RuleId.E03.value],
            "Unterminated.mod": [RuleId.E01.value],
        }


class TestPrivateImports:
    """Tests para M2R-S04"""

    @pytest.mark.asyncio
    async def test_privacy_matrix(self, fixtures_dir):
        """Test la parte de implementación del cliente puede importar; el resto no"""
        project = await load_project([str(fixtures_dir / "privacy")], RunConfig())
        diagnostics = check_private_imports(project, RuleConfig())
        assert [(Path(d.file).name, d.severity) for d in diagnostics] == [
            ("App.def", Severity.WARNING),
            ("Other.mod", Severity.WARNING),
        ]
        assert diagnostics[0].message == (
            "module Lib is private to App and may only be imported by their implementation "
            "parts, not by the definition part of App (§5.4)"
        )
        assert diagnostics[1].message.endswith("not by module Other (§5.4)")

    @pytest.mark.asyncio
    async def test_private_imports_as_errors(self, fixtures_dir):
        """Test con private_imports_as_errors las violaciones son errores"""
        project = await load_project([str(fixtures_dir / "privacy")], RunConfig())
        diagnostics = check_private_imports(project, RuleConfig(private_imports_as_errors=True))
        assert {d.severity for d in diagnostics} == {Severity.ERROR}

    @pytest.mark.asyncio
    async def test_disabled(self, fixtures_dir):
        """Test deshabilitar M2R-S04 suprime la verificación"""
        project = await load_project([str(fixtures_dir / "privacy")], RunConfig())
        assert check_private_imports(project, RuleConfig(disabled_rules={"M2R-S04"})) == []

    @pytest.mark.asyncio
    async def test_local_module_of_client(self, tmp_path):
        """Test un módulo local dentro del cliente no puede importar el módulo privado"""
        write(tmp_path, "Lib.def", "DEFINITION MODULE Lib; <*PRIVATETO=App*>\nPROCEDURE Secret;\nEND Lib.\n")
        write(
            tmp_path, "App.mod",
            "IMPLEMENTATION MODULE App;\nMODULE Inner;\n  FROM Lib IMPORT Secret;\n"
            "BEGIN Secret END Inner;\nEND App.\n",
        )
        project = await load_project([str(tmp_path)], RunConfig())
        [diagnostic] = check_private_imports(project, RuleConfig())
        assert diagnostic.message.endswith("not by a local module of App (§5.4)")
        assert diagnostic.span.start_line == 3

    @pytest.mark.asyncio
    async def test_unmarked_modules_are_free(self, fixtures_dir):
        """Test los módulos sin PRIVATETO pueden importarse desde cualquier parte"""
        project = await load_project([str(fixtures_dir / "revised")], RunConfig())
        assert project.private_to("Stacks") is None
        assert check_private_imports(project, RuleConfig()) == []

    @pytest.mark.asyncio
    async def test_pragma_index(self, fixtures_dir):
        """Test el índice de directivas registra PRIVATETO por módulo"""
        project = await load_project([str(fixtures_dir / "privacy")], RunConfig())
        assert project.private_to("Lib") == ("App",)
        assert project.definition_unit("Lib").kind == UnitKind.DEFINITION
        assert "Lib" in project.pragma_index
