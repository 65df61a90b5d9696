"""
Diff unificado para fix --dry-run.
"""

import difflib


def unified_diff(path: str, before: str, after: str) -> str:
    """
    Diff unificado entre dos versiones de un archivo.

    Args:
        path: Ruta mostrada en las cabeceras ---/+++
        before: Texto original
        after: Texto corregido

    Returns:
        Texto del diff terminado en salto de línea, o "" si no hay cambios
    """
    if before == after:
        return ""
    lines = difflib.unified_diff(
        before.splitlines(keepends=True),
        after.splitlines(keepends=True),
        fromfile=f"a/{path}",
        tofile=f"b/{path}",
    )
    out = []
    for line in lines:
        out.append(line if line.endswith("\n") else line + "\n\\ No newline at end of file\n")
    return "".join(out)
