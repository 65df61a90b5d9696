"""
Repositorio de archivos fuente: descubrimiento, lectura y escritura atómica.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Sequence

from app.core.exceptions import SourceReadError

logger = logging.getLogger(__name__)

# Source files are 8-bit text; latin-1 maps every byte to one character
SOURCE_ENCODING = "latin-1"


class SourceFileRepository:
    """Acceso al sistema de archivos para los módulos del proyecto"""

    def __init__(self, extensions: Sequence[str]):
        """
        Inicializa el repositorio.

        Args:
            extensions: Extensiones reconocidas como fuentes (p. ej. ".def", ".mod")
        """
        self.extensions = tuple(extensions)

    def is_source(self, path: Path) -> bool:
        return path.suffix in self.extensions

    def discover(self, roots: Iterable[str]) -> List[str]:
        """
        Lista los archivos fuente bajo las raíces dadas.

        Args:
            roots: Directorios o archivos

        Returns:
            Rutas ordenadas y sin duplicados. Un archivo nombrado
            explícitamente se incluye aunque su extensión no coincida

        Raises:
            SourceReadError: Una raíz no existe
        """
        found = set()
        for root in roots:
            path = Path(root)
            if path.is_dir():
                for candidate in path.rglob("*"):
                    if candidate.is_file() and self.is_source(candidate):
                        found.add(str(candidate))
            elif path.is_file():
                found.add(str(path))
            else:
                raise SourceReadError(
                    code="PATH_NOT_FOUND",
                    message=f"{root}: no such file or directory",
                    details={"path": str(root)},
                )
        logger.debug("discovered %d source files", len(found))
        return sorted(found)

    def read(self, path: str) -> str:
        """
        Lee un archivo fuente.

        Raises:
            SourceReadError: El archivo no se puede leer
        """
        try:
            return Path(path).read_bytes().decode(SOURCE_ENCODING)
        except OSError as e:
            raise SourceReadError(
                code="READ_FAILED",
                message=f"{path}: {e.strerror or e}",
                details={"path": path},
            ) from e

    def write_atomic(self, path: str, text: str) -> None:
        """
        Reemplaza el contenido de path: escribe un temporal en el mismo
        directorio y lo renombra sobre el original. Si algo falla, el
        original queda intacto.
        """
        target = Path(path)
        fd, tmp_path = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(text.encode(SOURCE_ENCODING))
            if target.exists():
                os.chmod(tmp_path, target.stat().st_mode & 0o7777)
            os.replace(tmp_path, target)
        except BaseException:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise
        logger.info("rewrote %s", path)
