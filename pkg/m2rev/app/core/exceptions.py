"""
Excepciones personalizadas de la herramienta.
"""

from typing import Any, Dict, Optional


class MigratorException(Exception):
    """Excepción base para todas las excepciones de la herramienta"""

    def __init__(
        self,
        code: str,
        message: str,
        details: Optional[Dict[str, Any]] = None
    ):
        """
        Inicializa la excepción.

        Args:
            code: Código de error único
            message: Mensaje de error legible
            details: Detalles adicionales del error
        """
        self.code = code
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ConfigError(MigratorException):
    """Configuración o flags inválidos (exit 2)"""
    pass


class SourceReadError(MigratorException):
    """Error de E/S al leer un archivo fuente"""
    pass


class EditScriptError(MigratorException):
    """EditScript inválido: span fuera de rango o ediciones solapadas"""
    pass


class FixpointError(MigratorException):
    """El ciclo de corrección no converge dentro del máximo de pasadas"""
    pass


class InternalError(MigratorException):
    """Fallo inesperado dentro de una regla"""
    pass
