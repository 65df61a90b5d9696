"""
Analizador léxico sin pérdida para ambos dialectos de Modula-2.

Cada carácter de la entrada termina como texto de un token o como trivia
(espacios, comentarios anidados, pragmas) adjunta al token siguiente.
"""

from bisect import bisect_right
from typing import Iterable, List, Optional, Tuple

from app.schemas.common import SourceSpan
from app.schemas.token import (
    LexError,
    LiteralValue,
    RESERVED_WORDS,
    Token,
    TokenizeResult,
    TokenKind,
    Trivia,
    TriviaKind,
)
from app.services.dialect import DialectProfile
from app.utils.numerals import DECIMAL_DIGITS, HEX_DIGITS, OCTAL_DIGITS, hex_value, octal_value

WHITESPACE = frozenset(" \t\r\n\f\v")
LETTERS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_")
ALNUM = LETTERS | DECIMAL_DIGITS

TWO_CHAR_SYMBOLS = {
    ":=": TokenKind.ASSIGN,
    "::": TokenKind.COLONCOLON,
    "..": TokenKind.RANGE,
    "<=": TokenKind.LE,
    ">=": TokenKind.GE,
    "<>": TokenKind.NOTEQ_SYNONYM,
}

ONE_CHAR_SYMBOLS = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
    "\\": TokenKind.BACKSLASH,
    ".": TokenKind.DOT,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMI,
    ":": TokenKind.COLON,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACK,
    "]": TokenKind.RBRACK,
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "^": TokenKind.CARET,
    "|": TokenKind.BAR,
    "=": TokenKind.EQ,
    "#": TokenKind.HASH,
    "<": TokenKind.LT,
    ">": TokenKind.GT,
    "!": TokenKind.BAR_SYNONYM,
    "@": TokenKind.CARET_SYNONYM,
    "&": TokenKind.AND_SYNONYM,
    "~": TokenKind.NOT_SYNONYM,
}


class Lexer:
    """Tokenizador escrito a mano; una instancia por texto fuente"""

    def __init__(
        self,
        source: str,
        profile: DialectProfile,
        base_offset: int = 0,
        base_line: int = 1,
        base_col: int = 1,
    ):
        """
        Inicializa el lexer.

        Args:
            source: Texto fuente (bytes decodificados como latin-1)
            profile: Perfil de dialecto para marcar tokens ajenos
            base_offset: Offset absoluto del primer carácter (re-lexing de pragmas)
            base_line: Línea absoluta del primer carácter
            base_col: Columna absoluta del primer carácter
        """
        self.source = source
        self.profile = profile
        self.base_offset = base_offset
        self.base_line = base_line
        self.base_col = base_col
        self.pos = 0
        self._line_starts = [0] + [i + 1 for i, ch in enumerate(source) if ch == "\n"]
        self._trivia: List[Trivia] = []
        self.tokens: List[Token] = []
        self.errors: List[LexError] = []

    # ------------------------------------------------------------------
    # Positions

    def _location(self, offset: int) -> Tuple[int, int]:
        index = bisect_right(self._line_starts, offset) - 1
        col = offset - self._line_starts[index] + 1
        if index == 0:
            col += self.base_col - 1
        return self.base_line + index, col

    def span(self, start: int, end: int) -> SourceSpan:
        """Construye el SourceSpan absoluto de source[start:end]"""
        start_line, start_col = self._location(start)
        end_line, end_col = self._location(end)
        return SourceSpan(
            start=self.base_offset + start,
            end=self.base_offset + end,
            start_line=start_line,
            start_col=start_col,
            end_line=end_line,
            end_col=end_col,
        )

    # ------------------------------------------------------------------
    # Emission

    def _error(self, code: str, message: str, start: int, end: int) -> None:
        self.errors.append(LexError(code=code, message=message, span=self.span(start, end)))

    def _add_trivia(self, kind: TriviaKind, start: int, end: int) -> None:
        self._trivia.append(
            Trivia(kind=kind, span=self.span(start, end), text=self.source[start:end])
        )

    def _emit(
        self,
        kind: TokenKind,
        start: int,
        end: int,
        value: Optional[LiteralValue] = None,
    ) -> None:
        self.tokens.append(
            Token(
                kind=kind,
                span=self.span(start, end),
                text=self.source[start:end],
                leading_trivia=tuple(self._trivia),
                value=value,
                foreign=self.profile.is_foreign(kind),
            )
        )
        self._trivia = []

    # ------------------------------------------------------------------
    # Scanning

    def tokenize(self) -> TokenizeResult:
        """Recorre todo el texto y produce tokens + errores"""
        src = self.source
        length = len(src)
        while self.pos < length:
            ch = src[self.pos]
            if ch in WHITESPACE:
                self._scan_whitespace()
            elif src.startswith("(*", self.pos):
                self._scan_comment()
            elif src.startswith("<*", self.pos):
                self._scan_pragma()
            elif ch in LETTERS:
                self._scan_identifier()
            elif ch in DECIMAL_DIGITS:
                self._scan_number()
            elif ch in "'\"":
                self._scan_string(ch)
            else:
                self._scan_symbol()

        if self.tokens or self._trivia:
            self._emit(TokenKind.EOF, length, length)
        return TokenizeResult(tokens=self.tokens, errors=self.errors)

    def _scan_whitespace(self) -> None:
        start = self.pos
        while self.pos < len(self.source) and self.source[self.pos] in WHITESPACE:
            self.pos += 1
        self._add_trivia(TriviaKind.WHITESPACE, start, self.pos)

    def _scan_comment(self) -> None:
        src = self.source
        start = self.pos
        self.pos += 2
        depth = 1
        while self.pos < len(src):
            if src.startswith("(*", self.pos):
                depth += 1
                self.pos += 2
            elif src.startswith("*)", self.pos):
                depth -= 1
                self.pos += 2
                if depth == 0:
                    break
            else:
                self.pos += 1
        if depth > 0:
            self._error("unterminated-comment", "comment is not terminated", start, self.pos)
        self._add_trivia(TriviaKind.COMMENT, start, self.pos)

    def _scan_pragma(self) -> None:
        start = self.pos
        close = self.source.find("*>", start + 2)
        if close < 0:
            self.pos = len(self.source)
            self._error("unterminated-pragma", "pragma is not terminated", start, self.pos)
        else:
            self.pos = close + 2
        self._add_trivia(TriviaKind.PRAGMA, start, self.pos)

    def _scan_identifier(self) -> None:
        src = self.source
        start = self.pos
        while self.pos < len(src) and src[self.pos] in ALNUM:
            self.pos += 1
        word = src[start:self.pos]
        self._emit(RESERVED_WORDS.get(word, TokenKind.IDENT), start, self.pos)

    def _scan_number(self) -> None:
        # Maximal munch: the whole digit/letter run first, then classify by its last character
        src = self.source
        start = self.pos
        while self.pos < len(src) and src[self.pos] in ALNUM:
            self.pos += 1
        text = src[start:self.pos]
        body, suffix = text[:-1], text[-1]

        if set(text) <= DECIMAL_DIGITS:
            if self._at_fraction():
                self._scan_real(start)
            else:
                self._emit(TokenKind.NUMBER, start, self.pos, int(text))
        elif suffix == "H" and body and set(body) <= HEX_DIGITS:
            self._emit(TokenKind.NUMBER, start, self.pos, hex_value(body))
        elif suffix == "B" and body and set(body) <= OCTAL_DIGITS:
            self._emit(TokenKind.OCTAL_NUMBER, start, self.pos, octal_value(body))
        elif suffix == "C" and body and set(body) <= OCTAL_DIGITS:
            self._emit(TokenKind.OCTAL_CHAR, start, self.pos, octal_value(body))
        else:
            self._error("malformed-literal", f"malformed number literal '{text}'", start, self.pos)
            self._emit(TokenKind.ERROR, start, self.pos)

    def _at_fraction(self) -> bool:
        src = self.source
        return (
            self.pos < len(src)
            and src[self.pos] == "."
            and not src.startswith("..", self.pos)
        )

    def _scan_real(self, start: int) -> None:
        src = self.source
        self.pos += 1  # "."
        while self.pos < len(src) and src[self.pos] in DECIMAL_DIGITS:
            self.pos += 1
        if self.pos < len(src) and src[self.pos] == "E":
            exponent = self.pos + 1
            if exponent < len(src) and src[exponent] in "+-":
                exponent += 1
            if exponent < len(src) and src[exponent] in DECIMAL_DIGITS:
                self.pos = exponent
                while self.pos < len(src) and src[self.pos] in DECIMAL_DIGITS:
                    self.pos += 1
        text = src[start:self.pos]
        self._emit(TokenKind.REAL, start, self.pos, float(text))

    def _scan_string(self, quote: str) -> None:
        src = self.source
        start = self.pos
        self.pos += 1
        while self.pos < len(src) and src[self.pos] != quote and src[self.pos] != "\n":
            self.pos += 1
        if self.pos < len(src) and src[self.pos] == quote:
            self.pos += 1
            self._emit(TokenKind.STRING, start, self.pos, src[start + 1:self.pos - 1])
        else:
            self._error("unterminated-string", "string is not terminated", start, self.pos)
            self._emit(TokenKind.STRING, start, self.pos, src[start + 1:self.pos])

    def _scan_symbol(self) -> None:
        src = self.source
        start = self.pos
        pair = src[start:start + 2]
        if pair in TWO_CHAR_SYMBOLS:
            self.pos += 2
            self._emit(TWO_CHAR_SYMBOLS[pair], start, self.pos)
            return
        ch = src[start]
        self.pos += 1
        if ch in ONE_CHAR_SYMBOLS:
            self._emit(ONE_CHAR_SYMBOLS[ch], start, self.pos)
        else:
            self._error("illegal-character", f"illegal character {ch!r}", start, self.pos)
            self._emit(TokenKind.ERROR, start, self.pos)


def tokenize(source: str, profile: DialectProfile) -> TokenizeResult:
    """
    Tokeniza un texto fuente sin pérdida.

    Args:
        source: Texto fuente (8 bits, decodificado como latin-1)
        profile: Perfil de dialecto activo

    Returns:
        TokenizeResult con los tokens (terminados en EOF salvo entrada vacía)
        y los errores léxicos; el análisis continúa tras cada error
    """
    return Lexer(source, profile).tokenize()


def render_tokens(tokens: Iterable[Token]) -> str:
    """Reconstruye el texto: trivia + texto de cada token, en orden"""
    parts: List[str] = []
    for token in tokens:
        parts.extend(trivia.text for trivia in token.leading_trivia)
        parts.append(token.text)
    return "".join(parts)
