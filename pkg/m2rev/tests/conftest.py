"""
Fixtures compartidas: corpus de ejemplo y atajos para analizar y corregir
textos sin pasar por el sistema de archivos.
"""

import shutil
from pathlib import Path
from typing import Callable, List

import pytest

from app.schemas.config import RuleConfig
from app.schemas.diagnostic import Diagnostic
from app.services.analysis import check_text, check_unit
from app.services.project import analyze_source
from app.services.transform import FixResult, fix_source

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    """Directorio raíz del corpus de archivos .def/.mod"""
    return FIXTURES_DIR


@pytest.fixture
def corpus(tmp_path: Path) -> Callable[[str], Path]:
    """Copia un subdirectorio del corpus a tmp_path (para tests que escriben)"""

    def copy(name: str) -> Path:
        target = tmp_path / name
        shutil.copytree(FIXTURES_DIR / name, target)
        return target

    return copy


@pytest.fixture
def check_source() -> Callable[..., List[Diagnostic]]:
    """Analiza un texto aislado y devuelve sus diagnósticos"""

    def check(source: str, path: str = "Test.mod", project=None, **options) -> List[Diagnostic]:
        config = RuleConfig(**options)
        entry = analyze_source(path, source, config.dialect, project)
        return check_unit(entry, project, config)

    return check


@pytest.fixture
def fix_text() -> Callable[..., FixResult]:
    """Corrige un texto aislado hasta punto fijo"""

    def fix(source: str, path: str = "Test.mod", project=None, max_passes=None, **options) -> FixResult:
        config = RuleConfig(**options)
        return fix_source(
            source,
            lambda text: check_text(path, text, project, config),
            config.dialect,
            file=path,
            config=config,
            max_passes=max_passes,
        )

    return fix
