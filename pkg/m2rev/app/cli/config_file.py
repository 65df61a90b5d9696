"""
Archivo de configuración por proyecto: líneas "clave = valor", '#' comenta
hasta el final de la línea.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from app.config import settings
from app.core.exceptions import ConfigError

logger = logging.getLogger(__name__)


def _split_list(value: str) -> List[str]:
    return [item.strip() for item in value.replace(";", ",").split(",") if item.strip()]


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got '{value}'")


def _parse_deprecated(value: str) -> Dict[str, Any]:
    try:
        return {"enable_deprecated": _parse_bool(value)}
    except ValueError:
        return {"deprecated_rules": _split_list(value)}


_FIX_MODES = {"in-place": "inPlace", "inplace": "inPlace", "stdout": "stdout",
              "dry-run": "dryRun", "dryrun": "dryRun"}


def _parse_fix_mode(value: str) -> str:
    mode = _FIX_MODES.get(value.lower())
    if mode is None:
        raise ValueError(f"expected one of in-place, stdout, dry-run, got '{value}'")
    return mode


# config key → parser returning the RunConfig fields it sets
_KEYS: Dict[str, Callable[[str], Dict[str, Any]]] = {
    "profile": lambda v: {"profile": v},
    "enable": lambda v: {"enabled_rules": _split_list(v)},
    "disable": lambda v: {"disabled_rules": _split_list(v)},
    "enable_deprecated": _parse_deprecated,
    "format": lambda v: {"format": v},
    "fix_mode": lambda v: {"fix_mode": _parse_fix_mode(v)},
    "assume_trunc_is_conversion": lambda v: {"assume_trunc_is_conversion": _parse_bool(v)},
    "private_imports_as_errors": lambda v: {"private_imports_as_errors": _parse_bool(v)},
    "source_dirs": lambda v: {"source_dirs": _split_list(v)},
    "extensions": lambda v: {"extensions": _split_list(v)},
    "external_modules": lambda v: {"external_modules": _split_list(v)},
    "max_fix_passes": lambda v: {"max_fix_passes": int(v)},
}


def parse_config(text: str, origin: str = "<config>") -> Dict[str, Any]:
    """
    Interpreta el contenido de un archivo de configuración.

    Args:
        text: Contenido del archivo
        origin: Nombre usado en los mensajes de error

    Returns:
        Valores para RunConfig (solo las claves presentes)

    Raises:
        ConfigError: Clave desconocida, línea sin '=' o valor inválido
    """
    overlay: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                code="CONFIG_SYNTAX",
                message=f"{origin}:{number}: expected 'key = value'",
                details={"line": number},
            )
        key, value = (part.strip() for part in line.split("=", 1))
        parser = _KEYS.get(key)
        if parser is None:
            raise ConfigError(
                code="CONFIG_UNKNOWN_KEY",
                message=f"{origin}:{number}: unknown key '{key}'",
                details={"line": number, "key": key},
            )
        try:
            overlay.update(parser(value))
        except ValueError as e:
            raise ConfigError(
                code="CONFIG_INVALID_VALUE",
                message=f"{origin}:{number}: invalid value for '{key}': {e}",
                details={"line": number, "key": key},
            ) from e
    return overlay


def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Carga el archivo de configuración.

    Args:
        path: Ruta explícita (--config). Sin ella se busca
            settings.CONFIG_FILENAME en el directorio actual

    Returns:
        Overlay para RunConfig; vacío si no hay archivo implícito

    Raises:
        ConfigError: El archivo explícito no existe o es inválido
    """
    explicit = path is not None
    target = Path(path) if explicit else Path(settings.CONFIG_FILENAME)
    if not target.is_file():
        if explicit:
            raise ConfigError(
                code="CONFIG_NOT_FOUND",
                message=f"{target}: configuration file not found",
                details={"path": str(target)},
            )
        return {}
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(
            code="CONFIG_UNREADABLE",
            message=f"{target}: {e.strerror or e}",
            details={"path": str(target)},
        ) from e
    logger.debug("using configuration file %s", target)
    return parse_config(text, str(target))
