"""
Tests de extremo a extremo sobre el corpus: listados conocidos,
idempotencia de fix y pasadas limpias por perfil.
"""

import io
import re
from collections import Counter

import pytest

from app.cli.main import EXIT_CLEAN, EXIT_DIAGNOSTICS, run
from app.models.ast import ArrayType, TypeDecl, flatten_array
from app.schemas.rule import RuleId
from app.schemas.token import TriviaKind
from app.services.dialect import REVISED_PROFILE
from app.services.lexer import tokenize
from app.services.project import parse_source


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def squeeze(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def comments(text: str):
    tokens = tokenize(text, REVISED_PROFILE).tokens
    return Counter(
        trivia.text for token in tokens for trivia in token.leading_trivia
        if trivia.kind in (TriviaKind.COMMENT, TriviaKind.PRAGMA)
    )


def array_types(source: str):
    entry = parse_source("Arrays.mod", source, REVISED_PROFILE)
    return [d.type for d in entry.unit.declarations if isinstance(d, TypeDecl) and isinstance(d.type, ArrayType)]


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    monkeypatch.chdir(workdir)


class TestKnownListings:
    """Tests para transformaciones de ejemplos conocidos"""

    def test_hash_function(self, fixtures_dir, fix_text):
        """Test el cuerpo de la función hash queda en su forma de una línea"""
        source = (fixtures_dir / "legacy" / "Hash.mod").read_text(encoding="latin-1")
        result = fix_text(source, path="Hash.mod")
        body = squeeze(result.text.split("BEGIN", 1)[1].split("END NextHash", 1)[0])
        assert body == "RETURN ORD(ch) + SHIFT(hash, 6) + SHIFT(hash, 16) - hash"

    def test_all_synonyms(self, fixtures_dir, check_source, fix_text):
        """Test cinco sinónimos, cinco diagnósticos y ninguno tras corregir"""
        source = (fixtures_dir / "legacy" / "Synonyms.mod").read_text(encoding="latin-1")
        found = [d for d in check_source(source, path="Synonyms.mod") if d.rule == RuleId.L01.value]
        assert len(found) == 5
        fixed = fix_text(source, path="Synonyms.mod").text
        assert [d for d in check_source(fixed, path="Synonyms.mod") if d.rule == RuleId.L01.value] == []
        for spelling in ("NOT a", "AND", "#", "p^", "| 2"):
            assert spelling in fixed

    def test_array_forms_are_equivalent(self, fixtures_dir, fix_text):
        """Test la forma larga pasa a la abreviada con el mismo árbol salvo longForm"""
        source = (fixtures_dir / "legacy" / "Arrays.mod").read_text(encoding="latin-1")
        fixed = fix_text(source, path="Arrays.mod").text
        assert "OF ARRAY" not in fixed
        before, after = array_types(source), array_types(fixed)
        assert [flatten_array(t) for t in before] == after
        assert [t.long_form for t in before] != [t.long_form for t in after]

    @pytest.mark.parametrize(
        "statement,expected",
        [
            ("i := INT(c)", "i := c :: INTEGER"),
            ("c := CARD(i + 1)", "c := (i + 1) :: CARDINAL"),
            ("r := FLOAT(c)", "r := c :: REAL"),
            ("l := LFLOAT(r)", "l := r :: LONGREAL"),
            ("c := VAL(CARDINAL, i)", "c := i :: CARDINAL"),
        ],
    )
    def test_conversion_table(self, fix_text, statement, expected):
        """Test cada función de conversión se reescribe con ::"""
        source = (
            "MODULE T;\nVAR i : INTEGER; c : CARDINAL; r : REAL; l : LONGREAL;\n"
            f"BEGIN\n  {statement}\nEND T.\n"
        )
        assert f"  {expected}\n" in fix_text(source, path="T.mod").text

    def test_trunc_needs_the_switch(self, fix_text):
        """Test TRUNC solo se reescribe con assume_trunc_is_conversion"""
        source = "MODULE T;\nVAR c : CARDINAL; r : REAL;\nBEGIN\n  c := TRUNC(r)\nEND T.\n"
        default = fix_text(source, path="T.mod")
        assert "TRUNC(r)" in default.text
        assert [d.rule for d in default.diagnostics] == [RuleId.P04.value]
        switched = fix_text(source, path="T.mod", assume_trunc_is_conversion=True)
        assert "c := r :: CARDINAL" in switched.text


class TestCorpus:
    """Tests sobre el corpus completo"""

    def test_fix_is_idempotent(self, corpus):
        """Test fix aplicado dos veces no cambia nada la segunda vez"""
        root = corpus("legacy")
        invoke("fix", str(root))
        first = {path.name: path.read_bytes() for path in root.iterdir()}
        code, out, _ = invoke("fix", "--dry-run", str(root))
        assert "--- a/" not in out
        assert {path.name: path.read_bytes() for path in root.iterdir()} == first
        assert code in (EXIT_CLEAN, EXIT_DIAGNOSTICS)

    def test_comments_and_pragmas_survive(self, corpus):
        """Test comentarios y directivas se conservan tal cual tras corregir"""
        root = corpus("legacy")
        originals = {path.name: path.read_text(encoding="latin-1") for path in root.iterdir()}
        invoke("fix", str(root))
        for path in root.iterdir():
            assert comments(path.read_text(encoding="latin-1")) == comments(originals[path.name]), path.name

    def test_untouched_files_are_byte_identical(self, corpus):
        """Test un archivo sin correcciones no se reescribe"""
        root = corpus("revised")
        before = {path.name: path.read_bytes() for path in root.iterdir()}
        assert invoke("fix", str(root))[0] == EXIT_CLEAN
        assert {path.name: path.read_bytes() for path in root.iterdir()} == before

    def test_revised_corpus_is_clean(self, fixtures_dir):
        """Test el corpus conforme sale con 0 bajo el perfil revisado"""
        assert invoke("check", "--profile=revised", str(fixtures_dir / "revised"))[0] == EXIT_CLEAN

    def test_legacy_corpus_has_no_errors_under_legacy(self, fixtures_dir):
        """Test el corpus legado no produce errores bajo el perfil legado"""
        _, out, _ = invoke("check", "--profile=legacy", "--format=json", str(fixtures_dir / "legacy"))
        assert '"severity": "error"' not in out
