"""
Catálogo normativo de identificadores de regla.
"""

from enum import Enum
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.common import Action


class RuleId(str, Enum):
    """Identificadores de regla y de diagnósticos del frontend"""

    L01 = "M2R-L01"  # synonym symbols
    L02 = "M2R-L02"  # octal literals
    L03 = "M2R-L03"  # set difference minus
    S01 = "M2R-S01"  # long-form multi-dimensional arrays
    S03 = "M2R-S03"  # local modules
    S04 = "M2R-S04"  # PRIVATETO
    S05 = "M2R-S05"  # FFI
    P04 = "M2R-P04"  # conversion functions
    M01 = "M2R-M01"  # NIL compatibility
    M02 = "M2R-M02"  # CAST of constants
    M04 = "M2R-M04"  # writes to imported variables
    M05 = "M2R-M05"  # SHIFT cast clutter
    M06 = "M2R-M06"  # variant records
    D01 = "M2R-D01"  # revised-only construct under legacy profile

    # Frontend findings; not rules, cannot be disabled
    E01 = "M2R-E01"  # lexical error
    E02 = "M2R-E02"  # syntax error
    E03 = "M2R-E03"  # declaration error
    E04 = "M2R-E04"  # project loading


class RuleInfo(BaseModel):
    """Metadatos de una regla del catálogo"""

    id: RuleId
    action: Optional[Action]
    fixable: bool
    topic: str
    section: str = Field(pattern=r"^\d+(\.\d+)*$")

    model_config = ConfigDict(frozen=True)


def _info(rule: RuleId, action: Optional[Action], fixable: bool, topic: str, section: str) -> RuleInfo:
    return RuleInfo(id=rule, action=action, fixable=fixable, topic=topic, section=section)


CATALOGUE: Dict[RuleId, RuleInfo] = {
    info.id: info
    for info in (
        _info(RuleId.L01, Action.REMOVAL, True, "synonym symbols", "4.1"),
        _info(RuleId.L02, Action.REMOVAL, True, "octal literals", "4.2"),
        _info(RuleId.L03, Action.CHANGE, True, "set difference operator", "4.3"),
        _info(RuleId.S01, Action.DEPRECATION, True, "long-form multi-dimensional arrays", "5.1"),
        _info(RuleId.S03, Action.DEPRECATION, False, "local modules", "5.3"),
        _info(RuleId.S04, Action.WARNING, False, "private-use modules", "5.4"),
        _info(RuleId.S05, Action.WARNING, False, "foreign definition modules", "5.5"),
        _info(RuleId.P04, Action.REMOVAL, True, "conversion functions", "6.4"),
        _info(RuleId.M01, Action.ACCEPTANCE, False, "NIL compatibility", "7.1"),
        _info(RuleId.M02, Action.ACCEPTANCE, False, "CAST of constant values", "7.2"),
        _info(RuleId.M04, Action.DEPRECATION, False, "writes to imported variables", "7.4"),
        _info(RuleId.M05, Action.ACCEPTANCE, True, "SHIFT on non-bitset values", "7.5"),
        _info(RuleId.M06, Action.REMOVAL, True, "variant records", "7.6"),
        _info(RuleId.D01, None, False, "revised-only constructs", "3.3"),
    )
}

FRONTEND_IDS = frozenset({RuleId.E01, RuleId.E02, RuleId.E03, RuleId.E04})

# Lower rank applies first when fixes overlap
FIX_PRIORITY: Dict[str, int] = {
    rule.value: rank
    for rank, rule in enumerate(
        (RuleId.L01, RuleId.L02, RuleId.L03, RuleId.P04, RuleId.S01, RuleId.M05, RuleId.M06)
    )
}


def is_catalogue_rule(rule_id: str) -> bool:
    """True si el id pertenece al catálogo de reglas configurables"""
    try:
        return RuleId(rule_id) in CATALOGUE
    except ValueError:
        return False


def cite(rule: RuleId, message: str) -> str:
    """Agrega al mensaje la sección de la revisión que motiva la regla"""
    return f"{message} (§{CATALOGUE[rule].section})"
