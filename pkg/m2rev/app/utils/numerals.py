"""
Conversión de literales numéricos entre bases.
"""

from typing import Optional

OCTAL_DIGITS = frozenset("01234567")
DECIMAL_DIGITS = frozenset("0123456789")
HEX_DIGITS = frozenset("0123456789ABCDEF")

# Octal literals up to this value are rewritten as hexadecimal, larger ones as decimal
HEX_REWRITE_LIMIT = 255


def octal_value(digits: str) -> int:
    """Valor de una cadena de dígitos octales (sin sufijo)"""
    value = 0
    for digit in digits:
        value = value * 8 + (ord(digit) - ord("0"))
    return value


def hex_value(digits: str) -> int:
    """Valor de una cadena de dígitos hexadecimales en mayúsculas (sin sufijo)"""
    return int(digits, 16)


def whole_number_value(text: str) -> Optional[int]:
    """
    Evalúa un literal entero de Modula-2.

    Args:
        text: Texto del literal, p. ej. "377B", "0FFH" o "42"

    Returns:
        Valor entero, o None si el literal no es válido
    """
    if not text:
        return None
    body, suffix = text[:-1], text[-1]
    if suffix == "H" and body and body[0] in DECIMAL_DIGITS and set(body) <= HEX_DIGITS:
        return hex_value(body)
    if suffix in "BC" and body and set(body) <= OCTAL_DIGITS:
        return octal_value(body)
    if set(text) <= DECIMAL_DIGITS:
        return int(text)
    return None


def format_hex(value: int) -> str:
    """Formato hexadecimal Modula-2: 255 → 0FFH, 10 → 0AH, 8 → 8H"""
    digits = format(value, "X")
    if digits[0] not in DECIMAL_DIGITS:
        digits = "0" + digits
    return digits + "H"


def format_octal_replacement(value: int) -> str:
    """Reemplazo de un literal octal numérico: hexadecimal si es pequeño, decimal si no"""
    if value <= HEX_REWRITE_LIMIT:
        return format_hex(value)
    return str(value)


def format_char_replacement(code_point: int) -> str:
    """Reemplazo de un literal de carácter octal"""
    return f"CHR({code_point})"
