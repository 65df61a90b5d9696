"""
Configuración centralizada de la herramienta usando Pydantic Settings.
Las variables de entorno (prefijo M2REV_) se cargan también desde .env
"""

from typing import List

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configuración global de la herramienta"""

    # Application
    APP_NAME: str = "m2rev"
    APP_VERSION: str = "0.1.0"
    REPORT_VERSION: str = Field(default="1", description="Versión del esquema del reporte JSON")

    # Dialect
    DEFAULT_PROFILE: str = Field(default="revised", pattern="^(legacy|revised)$")

    # Project discovery
    SOURCE_EXTENSIONS: str = Field(
        default=".def,.mod",
        description="Extensiones de archivos fuente (separadas por coma)"
    )
    CONFIG_FILENAME: str = Field(
        default="m2rev.conf",
        description="Archivo de configuración buscado en el directorio actual"
    )

    @property
    def source_extensions_list(self) -> List[str]:
        """Parse source extensions from string"""
        return [ext.strip() for ext in self.SOURCE_EXTENSIONS.split(",") if ext.strip()]

    # Fixing
    MAX_FIX_PASSES: int = Field(default=16, ge=1, le=64)

    # Concurrency
    MAX_WORKERS: int = Field(default=8, ge=1, le=64)

    # Logging
    LOG_LEVEL: str = Field(
        default="WARNING",
        pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$"
    )
    LOG_FORMAT: str = Field(default="text", pattern="^(json|text)$")

    model_config = SettingsConfigDict(
        env_prefix="M2REV_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    @field_validator("SOURCE_EXTENSIONS")
    @classmethod
    def validate_extensions(cls, v):
        for ext in v.split(","):
            ext = ext.strip()
            if ext and not ext.startswith("."):
                raise ValueError("SOURCE_EXTENSIONS debe contener extensiones que empiecen con '.'")
        return v


# Singleton instance
settings = Settings()
