"""
Schemas de configuración por ejecución.
"""

from enum import Enum
from typing import FrozenSet, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.schemas.common import ProfileId
from app.schemas.rule import is_catalogue_rule
from app.services.dialect import DialectProfile, get_profile


class Subcommand(str, Enum):
    CHECK = "check"
    FIX = "fix"


class ReportFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class FixMode(str, Enum):
    IN_PLACE = "inPlace"
    STDOUT = "stdout"
    DRY_RUN = "dryRun"


def _check_rule_ids(values) -> FrozenSet[str]:
    unknown = sorted(v for v in values if not is_catalogue_rule(v))
    if unknown:
        raise ValueError(f"unknown rule id(s): {', '.join(unknown)}")
    return frozenset(values)


class RuleConfig(BaseModel):
    """Selección de reglas y switches que afectan a la severidad y a las correcciones"""

    profile: ProfileId = ProfileId.REVISED
    enabled_rules: FrozenSet[str] = Field(
        default=frozenset(),
        description="Si no está vacío, solo estas reglas se ejecutan",
    )
    disabled_rules: FrozenSet[str] = frozenset()
    enable_deprecated: bool = Field(default=False, description="Switch global de deprecación")
    deprecated_rules: FrozenSet[str] = Field(
        default=frozenset(),
        description="Reglas cuyo switch de deprecación está activo",
    )
    assume_trunc_is_conversion: bool = False
    private_imports_as_errors: bool = False

    model_config = ConfigDict(frozen=True)

    @field_validator("enabled_rules", "disabled_rules", "deprecated_rules", mode="before")
    @classmethod
    def validate_rule_ids(cls, v):
        return _check_rule_ids(v or ())

    @property
    def dialect(self) -> DialectProfile:
        return get_profile(self.profile)

    def is_enabled(self, rule_id: str) -> bool:
        if rule_id in self.disabled_rules:
            return False
        return not self.enabled_rules or rule_id in self.enabled_rules

    def deprecation_enabled(self, rule_id: str) -> bool:
        return self.enable_deprecated or rule_id in self.deprecated_rules


class RunConfig(BaseModel):
    """Configuración completa de una ejecución de la CLI"""

    subcommand: Subcommand = Subcommand.CHECK
    profile: ProfileId = Field(default_factory=lambda: ProfileId(settings.DEFAULT_PROFILE))
    enabled_rules: List[str] = Field(default_factory=list)
    disabled_rules: List[str] = Field(default_factory=list)
    enable_deprecated: bool = False
    deprecated_rules: List[str] = Field(default_factory=list)
    format: ReportFormat = ReportFormat.TEXT
    fix_mode: Optional[FixMode] = None
    assume_trunc_is_conversion: bool = False
    private_imports_as_errors: bool = False
    paths: List[str] = Field(default_factory=list)
    source_dirs: List[str] = Field(default_factory=list)
    extensions: List[str] = Field(default_factory=lambda: list(settings.source_extensions_list))
    external_modules: List[str] = Field(default_factory=list)
    max_fix_passes: int = Field(default_factory=lambda: settings.MAX_FIX_PASSES, ge=1, le=64)

    @field_validator("enabled_rules", "disabled_rules", "deprecated_rules")
    @classmethod
    def validate_rule_ids(cls, v: List[str]) -> List[str]:
        _check_rule_ids(v)
        return v

    @field_validator("extensions")
    @classmethod
    def validate_extensions(cls, v: List[str]) -> List[str]:
        for ext in v:
            if not ext.startswith("."):
                raise ValueError(f"extension '{ext}' must start with '.'")
        return v

    @model_validator(mode="after")
    def check_fix_mode(self) -> "RunConfig":
        if self.fix_mode is not None and self.subcommand != Subcommand.FIX:
            raise ValueError("fix mode options are only valid with the fix subcommand")
        return self

    @property
    def effective_fix_mode(self) -> FixMode:
        return self.fix_mode or FixMode.IN_PLACE

    @property
    def targets(self) -> List[str]:
        """Rutas a analizar: argumentos posicionales, o source_dirs del archivo de configuración"""
        return self.paths or self.source_dirs

    def rule_config(self) -> RuleConfig:
        return RuleConfig(
            profile=self.profile,
            enabled_rules=frozenset(self.enabled_rules),
            disabled_rules=frozenset(self.disabled_rules),
            enable_deprecated=self.enable_deprecated,
            deprecated_rules=frozenset(self.deprecated_rules),
            assume_trunc_is_conversion=self.assume_trunc_is_conversion,
            private_imports_as_errors=self.private_imports_as_errors,
        )


