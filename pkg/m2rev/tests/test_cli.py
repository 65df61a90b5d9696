"""
Tests para la línea de comandos: códigos de salida, reportes, modos de fix
y archivo de configuración.
"""

import hashlib
import io
import json
from pathlib import Path

import pytest

from app.cli.config_file import parse_config
from app.cli.main import EXIT_CLEAN, EXIT_DIAGNOSTICS, EXIT_ERROR, run
from app.core.exceptions import ConfigError


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    """Cada test corre en un directorio sin m2rev.conf"""
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    return workdir


class TestExitCodes:
    """Tests para los códigos 0, 1 y 2"""

    def test_clean_corpus(self, fixtures_dir):
        """Test el corpus revisado sale con 0 y sin salida"""
        code, out, _ = invoke("check", str(fixtures_dir / "revised"))
        assert code == EXIT_CLEAN
        assert out == ""

    def test_single_octal_literal(self, tmp_path):
        """Test un archivo con 377B sale con 1 y una línea M2R-L02"""
        source = tmp_path / "Mask.mod"
        source.write_text("MODULE Mask;\nCONST M = 377B;\nEND Mask.\n")
        code, out, _ = invoke("check", str(source))
        assert code == EXIT_DIAGNOSTICS
        assert out.splitlines() == [
            f"{source}:2:11: error [M2R-L02] octal literal '377B' is removed in the "
            "revised dialect; write 0FFH (§4.2)"
        ]

    def test_info_only_is_clean(self, fixtures_dir):
        """Test los hallazgos informativos no cambian el código de salida"""
        code, out, _ = invoke("check", str(fixtures_dir / "legacy" / "Hash.mod"))
        assert code == EXIT_CLEAN
        assert out.count("info [M2R-M05]") == 3

    def test_warnings_are_blocking(self, fixtures_dir):
        """Test una violación de PRIVATETO (warning) sale con 1"""
        code, out, _ = invoke("check", str(fixtures_dir / "privacy"))
        assert code == EXIT_DIAGNOSTICS
        assert out.count("warning [M2R-S04]") == 2

    def test_legacy_corpus_under_legacy_profile(self, fixtures_dir):
        """Test el corpus legado no tiene errores bajo su propio perfil"""
        code, out, _ = invoke("check", "--profile=legacy", str(fixtures_dir / "legacy"))
        assert code == EXIT_DIAGNOSTICS
        assert " error [" not in out
        assert "warning [M2R-S05]" in out

    def test_missing_path(self, tmp_path):
        """Test una ruta inexistente sale con 2"""
        code, _, err = invoke("check", str(tmp_path / "nowhere"))
        assert code == EXIT_ERROR
        assert "PATH_NOT_FOUND" in err

    def test_no_paths(self):
        """Test sin rutas ni source_dirs sale con 2"""
        code, _, err = invoke("check")
        assert code == EXIT_ERROR
        assert "NO_PATHS" in err

    def test_unknown_rule(self, fixtures_dir):
        """Test un id de regla desconocido sale con 2"""
        code, _, err = invoke("check", "--enable=M2R-Z01", str(fixtures_dir / "revised"))
        assert code == EXIT_ERROR
        assert "INVALID_CONFIG" in err

    def test_fix_mode_requires_fix(self, fixtures_dir):
        """Test --dry-run no es válido con check"""
        code, _, _ = invoke("check", "--dry-run", str(fixtures_dir / "revised"))
        assert code == EXIT_ERROR


class TestReports:
    """Tests para los formatos text y json"""

    def test_json_schema(self, fixtures_dir):
        """Test claves del documento JSON y de cada diagnóstico"""
        code, out, _ = invoke("check", "--format=json", str(fixtures_dir / "legacy" / "Octal.mod"))
        assert code == EXIT_DIAGNOSTICS
        report = json.loads(out)
        assert set(report) == {"version", "diagnostics", "summary"}
        assert report["summary"] == {"M2R-L02": 4}
        first = report["diagnostics"][0]
        assert set(first) == {"file", "range", "rule", "severity", "action", "message", "fixAvailable"}
        assert first["range"] == {"startLine": 4, "startCol": 10, "endLine": 4, "endCol": 14}
        assert first["severity"] == "error"
        assert first["action"] == "removal"
        assert first["fixAvailable"] is True

    def test_deterministic_output(self, fixtures_dir):
        """Test dos ejecuciones producen exactamente el mismo reporte"""
        first = invoke("check", "--format=json", str(fixtures_dir))
        second = invoke("check", "--format=json", str(fixtures_dir))
        assert first == second

    def test_fix_note_in_text_report(self, fixtures_dir):
        """Test la nota de una corrección aparece bajo su diagnóstico"""
        _, out, _ = invoke("check", str(fixtures_dir / "legacy" / "Variants.mod"))
        assert "    note: tag field 'kind' was dropped" in out


class TestFixModes:
    """Tests para fix --in-place, --stdout y --dry-run"""

    def test_dry_run_writes_nothing(self, corpus):
        """Test --dry-run muestra un diff y no modifica archivos"""
        root = corpus("legacy")
        target = root / "Hash.mod"
        before = digest(target)
        code, out, _ = invoke("fix", "--dry-run", str(target))
        assert code == EXIT_CLEAN
        assert digest(target) == before
        assert out.startswith(f"--- a/{target}\n+++ b/{target}\n")
        assert "+  RETURN ORD(ch) +" in out
        assert "SHIFT(hash, 6)" in out

    def test_in_place(self, corpus):
        """Test la corrección por defecto reescribe el archivo"""
        target = corpus("legacy") / "Synonyms.mod"
        code, _, _ = invoke("fix", str(target))
        assert code == EXIT_CLEAN
        text = target.read_text(encoding="latin-1")
        assert "b := NOT a AND TRUE;" in text
        assert "IF n # 0 THEN" in text
        assert "n := p^.value" in text
        assert "| 2 : n := 3" in text
        assert invoke("check", str(target))[0] == EXIT_CLEAN

    def test_stdout(self, corpus):
        """Test --stdout imprime el texto corregido y deja el reporte en stderr"""
        target = corpus("legacy") / "Octal.mod"
        before = digest(target)
        code, out, err = invoke("fix", "--stdout", str(target))
        assert code == EXIT_CLEAN
        assert "Mask = 0FFH;" in out
        assert "Letter = CHR(65);" in out
        assert digest(target) == before
        assert err == ""

    def test_fixpoint_failure(self, corpus):
        """Test un archivo que no converge sale con 2 y no se modifica"""
        target = corpus("legacy") / "Conversions.mod"
        before = digest(target)
        code, _, err = invoke("fix", "--max-fix-passes=1", str(target))
        assert code == EXIT_ERROR
        assert "FIXPOINT_NOT_REACHED" in err
        assert digest(target) == before

    def test_selected_fixes_only(self, corpus):
        """Test --enable limita las correcciones a las reglas elegidas"""
        target = corpus("legacy") / "Conversions.mod"
        invoke("fix", "--enable=M2R-L02", str(target))
        assert "INT(c)" in target.read_text(encoding="latin-1")


class TestDeprecationFlags:
    """Tests para --enable-deprecated y --deprecated-rules"""

    def test_bare_flag_before_path(self, fixtures_dir):
        """Test el flag sin valor antes de la ruta no consume la ruta"""
        code, out, err = invoke("check", "--enable-deprecated", str(fixtures_dir / "legacy" / "Arrays.mod"))
        assert code == EXIT_DIAGNOSTICS
        assert err == ""
        assert out.count("warning [M2R-S01]") == 3
        assert "error [" not in out

    @pytest.mark.parametrize(
        "flags",
        [("--enable-deprecated=M2R-S01",), ("--deprecated-rules", "M2R-S01")],
    )
    def test_rule_list(self, fixtures_dir, flags):
        """Test la lista de reglas se acepta con '=' o con --deprecated-rules"""
        code, out, _ = invoke("check", *flags, str(fixtures_dir / "legacy" / "Arrays.mod"))
        assert code == EXIT_DIAGNOSTICS
        assert out.count("warning [M2R-S01]") == 3
        assert "error [" not in out

    def test_rule_list_is_selective(self, tmp_path):
        """Test solo las reglas listadas bajan a warning"""
        source = tmp_path / "Mixed.mod"
        source.write_text("MODULE Mixed;\nTYPE A = ARRAY [0..1] OF ARRAY [0..1] OF CHAR;\nCONST M = 377B;\nEND Mixed.\n")
        code, out, _ = invoke("check", "--enable-deprecated=M2R-S01", str(source))
        assert code == EXIT_DIAGNOSTICS
        assert "warning [M2R-S01]" in out
        assert "error [M2R-L02]" in out


class TestConfigFile:
    """Tests para m2rev.conf"""

    def test_unknown_key(self, isolated_cwd, fixtures_dir):
        """Test una clave desconocida sale con 2"""
        (isolated_cwd / "m2rev.conf").write_text("colour = red\n")
        code, _, err = invoke("check", str(fixtures_dir / "revised"))
        assert code == EXIT_ERROR
        assert "CONFIG_UNKNOWN_KEY" in err

    def test_deprecation_switch_per_rule(self, isolated_cwd, fixtures_dir):
        """Test enable_deprecated con una lista de reglas"""
        (isolated_cwd / "m2rev.conf").write_text("enable_deprecated = M2R-S01  # arrays only\n")
        code, out, _ = invoke("check", str(fixtures_dir / "legacy" / "Arrays.mod"))
        assert code == EXIT_DIAGNOSTICS
        assert out.count("warning [M2R-S01]") == 3
        assert "error [" not in out

    def test_source_dirs(self, isolated_cwd, fixtures_dir):
        """Test source_dirs reemplaza a las rutas posicionales"""
        (isolated_cwd / "m2rev.conf").write_text(f"source_dirs = {fixtures_dir / 'revised'}\n")
        code, out, _ = invoke("check")
        assert code == EXIT_CLEAN
        assert out == ""

    def test_flags_override_file(self, isolated_cwd, fixtures_dir):
        """Test los flags tienen prioridad sobre el archivo"""
        (isolated_cwd / "m2rev.conf").write_text("profile = legacy\n")
        code, _, _ = invoke("check", "--profile=revised", str(fixtures_dir / "revised"))
        assert code == EXIT_CLEAN

    def test_fix_mode_is_ignored_for_check(self, isolated_cwd, fixtures_dir):
        """Test fix_mode en el archivo no invalida check"""
        (isolated_cwd / "m2rev.conf").write_text("fix_mode = dry-run\n")
        code, _, _ = invoke("check", str(fixtures_dir / "revised"))
        assert code == EXIT_CLEAN

    def test_parse_config(self):
        """Test interpretación de listas, booleanos y comentarios"""
        overlay = parse_config(
            "# project settings\nprofile = legacy\ndisable = M2R-L01, M2R-L02\n"
            "assume_trunc_is_conversion = yes\nenable_deprecated = true\n"
        )
        assert overlay == {
            "profile": "legacy",
            "disabled_rules": ["M2R-L01", "M2R-L02"],
            "assume_trunc_is_conversion": True,
            "enable_deprecated": True,
        }

    @pytest.mark.parametrize(
        "text,code",
        [
            ("profile\n", "CONFIG_SYNTAX"),
            ("max_fix_passes = many\n", "CONFIG_INVALID_VALUE"),
            ("fix_mode = sideways\n", "CONFIG_INVALID_VALUE"),
        ],
    )
    def test_invalid_config(self, text, code):
        """Test errores de sintaxis y de valor"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config(text)
        assert exc_info.value.code == code
