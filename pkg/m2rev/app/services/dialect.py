"""
Perfiles de dialecto: legado (IS 10514-1 publicado) y revisado.
"""

from typing import FrozenSet

from pydantic import BaseModel, ConfigDict

from app.schemas.common import ProfileId
from app.schemas.token import SYNONYMS, TokenKind


BASE_PERVASIVES: FrozenSet[str] = frozenset({
    # types
    "BITSET", "BOOLEAN", "CARDINAL", "CHAR", "COMPLEX", "INTEGER", "LONGCOMPLEX",
    "LONGINT", "LONGREAL", "PROC", "PROTECTION", "REAL",
    # constants
    "FALSE", "NIL", "TRUE", "INTERRUPTIBLE", "UNINTERRUPTIBLE",
    # procedures and functions
    "ABS", "CAP", "CARD", "CHR", "CMPLX", "DEC", "DISPOSE", "EXCL", "FLOAT", "HALT",
    "HIGH", "IM", "INC", "INCL", "INT", "LENGTH", "LFLOAT", "MAX", "MIN", "NEW",
    "ODD", "ORD", "RE", "SIZE", "TRUNC", "VAL",
})

REVISED_ADDITIONS: FrozenSet[str] = frozenset({"LONGCARD", "UNICHAR", "UCHR"})

CONVERSION_FUNCTIONS: FrozenSet[str] = frozenset({"INT", "CARD", "FLOAT", "LFLOAT", "TRUNC", "VAL"})

_ALL_KINDS = frozenset(TokenKind)


class DialectProfile(BaseModel):
    """Configuración léxica y de pervasivos de un dialecto"""

    id: ProfileId
    enabled_tokens: FrozenSet[TokenKind]
    pervasive_idents: FrozenSet[str]
    removed_pervasives: FrozenSet[str]

    model_config = ConfigDict(frozen=True)

    @property
    def is_revised(self) -> bool:
        return self.id == ProfileId.REVISED

    def is_foreign(self, kind: TokenKind) -> bool:
        """True si la clase de token no pertenece a este dialecto"""
        return kind not in self.enabled_tokens

    def is_pervasive(self, name: str) -> bool:
        return name in self.pervasive_idents


LEGACY_PROFILE = DialectProfile(
    id=ProfileId.LEGACY,
    enabled_tokens=_ALL_KINDS - {TokenKind.COLONCOLON, TokenKind.BACKSLASH},
    pervasive_idents=BASE_PERVASIVES,
    removed_pervasives=frozenset(),
)

REVISED_PROFILE = DialectProfile(
    id=ProfileId.REVISED,
    enabled_tokens=_ALL_KINDS - set(SYNONYMS) - {TokenKind.OCTAL_NUMBER, TokenKind.OCTAL_CHAR},
    pervasive_idents=BASE_PERVASIVES | REVISED_ADDITIONS,
    removed_pervasives=CONVERSION_FUNCTIONS,
)


def get_profile(profile_id) -> DialectProfile:
    """
    Retorna uno de los dos perfiles incorporados.

    Args:
        profile_id: ProfileId o su valor textual ("legacy" / "revised")
    """
    if ProfileId(profile_id) == ProfileId.LEGACY:
        return LEGACY_PROFILE
    return REVISED_PROFILE
