"""
Schemas para tokens, trivia y errores léxicos.
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.common import SourceSpan


class TokenKind(str, Enum):
    """Clases de token del superconjunto de ambos dialectos"""

    IDENT = "IDENT"
    NUMBER = "NUMBER"                # decimal o hexadecimal (sufijo H)
    OCTAL_NUMBER = "OCTAL_NUMBER"    # sufijo B
    OCTAL_CHAR = "OCTAL_CHAR"        # sufijo C
    REAL = "REAL"
    STRING = "STRING"

    # Reserved words
    AND = "AND"
    ARRAY = "ARRAY"
    BEGIN = "BEGIN"
    BY = "BY"
    CASE = "CASE"
    CONST = "CONST"
    DEFINITION = "DEFINITION"
    DIV = "DIV"
    DO = "DO"
    ELSE = "ELSE"
    ELSIF = "ELSIF"
    END = "END"
    EXCEPT = "EXCEPT"
    EXIT = "EXIT"
    EXPORT = "EXPORT"
    FINALLY = "FINALLY"
    FOR = "FOR"
    FORWARD = "FORWARD"
    FROM = "FROM"
    IF = "IF"
    IMPLEMENTATION = "IMPLEMENTATION"
    IMPORT = "IMPORT"
    IN = "IN"
    LOOP = "LOOP"
    MOD = "MOD"
    MODULE = "MODULE"
    NOT = "NOT"
    OF = "OF"
    OR = "OR"
    PACKEDSET = "PACKEDSET"
    POINTER = "POINTER"
    PROCEDURE = "PROCEDURE"
    QUALIFIED = "QUALIFIED"
    RECORD = "RECORD"
    REM = "REM"
    REPEAT = "REPEAT"
    RETRY = "RETRY"
    RETURN = "RETURN"
    SET = "SET"
    THEN = "THEN"
    TO = "TO"
    TYPE = "TYPE"
    UNTIL = "UNTIL"
    VAR = "VAR"
    WHILE = "WHILE"
    WITH = "WITH"

    # Symbols
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    BACKSLASH = "\\"
    ASSIGN = ":="
    DOT = "."
    RANGE = ".."
    COMMA = ","
    SEMI = ";"
    COLON = ":"
    COLONCOLON = "::"
    LPAREN = "("
    RPAREN = ")"
    LBRACK = "["
    RBRACK = "]"
    LBRACE = "{"
    RBRACE = "}"
    CARET = "^"
    BAR = "|"
    EQ = "="
    HASH = "#"
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    # Synonyms
    BAR_SYNONYM = "!"
    CARET_SYNONYM = "@"
    NOTEQ_SYNONYM = "<>"
    AND_SYNONYM = "&"
    NOT_SYNONYM = "~"

    ERROR = "ERROR"
    EOF = "EOF"


RESERVED_WORDS: Dict[str, TokenKind] = {
    kind.value: kind
    for kind in TokenKind
    if kind.value.isalpha() and kind.value.isupper() and kind not in (
        TokenKind.IDENT, TokenKind.NUMBER, TokenKind.REAL, TokenKind.STRING,
        TokenKind.ERROR, TokenKind.EOF,
    )
}

LITERAL_KINDS = frozenset({
    TokenKind.NUMBER,
    TokenKind.OCTAL_NUMBER,
    TokenKind.OCTAL_CHAR,
    TokenKind.REAL,
    TokenKind.STRING,
})

# synonym kind → (canonical kind, canonical spelling)
SYNONYMS: Dict[TokenKind, Tuple[TokenKind, str]] = {
    TokenKind.BAR_SYNONYM: (TokenKind.BAR, "|"),
    TokenKind.CARET_SYNONYM: (TokenKind.CARET, "^"),
    TokenKind.NOTEQ_SYNONYM: (TokenKind.HASH, "#"),
    TokenKind.AND_SYNONYM: (TokenKind.AND, "AND"),
    TokenKind.NOT_SYNONYM: (TokenKind.NOT, "NOT"),
}


class TriviaKind(str, Enum):
    WHITESPACE = "whitespace"
    COMMENT = "comment"
    PRAGMA = "pragma"


class Trivia(BaseModel):
    """Texto sin significado sintáctico adjunto al token siguiente"""

    kind: TriviaKind
    span: SourceSpan
    text: str

    model_config = ConfigDict(frozen=True)


LiteralValue = Union[int, float, str]


class Token(BaseModel):
    """Unidad léxica mínima con su texto original exacto"""

    kind: TokenKind
    span: SourceSpan
    text: str
    leading_trivia: Tuple[Trivia, ...] = ()
    value: Optional[LiteralValue] = None
    foreign: bool = Field(default=False, description="Token ajeno al dialecto activo")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_invariants(self) -> "Token":
        if self.span.end - self.span.start != len(self.text):
            raise ValueError("span length must equal text length")
        if (self.kind in LITERAL_KINDS) != (self.value is not None):
            raise ValueError(f"value presence does not match kind {self.kind.name}")
        return self

    @property
    def canonical_kind(self) -> TokenKind:
        """Clase gramatical: los sinónimos se comportan como su forma canónica"""
        if self.kind in SYNONYMS:
            return SYNONYMS[self.kind][0]
        return self.kind

    @property
    def pragmas(self) -> List[Trivia]:
        return [t for t in self.leading_trivia if t.kind == TriviaKind.PRAGMA]


class LexError(BaseModel):
    """Error léxico con su ubicación"""

    code: str = Field(description="unterminated-string | unterminated-comment | malformed-literal | illegal-character")
    message: str
    span: SourceSpan

    model_config = ConfigDict(frozen=True)


class TokenizeResult(BaseModel):
    """Resultado de tokenize(): tokens sin pérdida + errores léxicos"""

    tokens: List[Token] = Field(default_factory=list)
    errors: List[LexError] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors
