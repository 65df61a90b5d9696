"""
Línea de comandos: subcomandos check y fix.

Códigos de salida: 0 sin diagnósticos de error o warning, 1 con
diagnósticos, 2 ante errores de uso, configuración o internos.
"""

import argparse
import asyncio
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO

from pydantic import ValidationError

from app.cli.config_file import load_config
from app.cli.report import render
from app.config import settings
from app.core.exceptions import ConfigError, MigratorException
from app.core.logging import setup_logging
from app.repositories.source import SourceFileRepository
from app.schemas.config import FixMode, RunConfig, Subcommand
from app.services.analysis import AnalysisResult, run_analysis
from app.utils.diff import unified_diff

logger = logging.getLogger(__name__)

EXIT_CLEAN = 0
EXIT_DIAGNOSTICS = 1
EXIT_ERROR = 2


def _rule_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


_DEPRECATED_PREFIX = "--enable-deprecated="


def normalize_argv(argv: Sequence[str]) -> List[str]:
    """
    Reescribe --enable-deprecated=RULES como --deprecated-rules RULES.

    Sin '=' la opción es un interruptor y nunca consume la ruta siguiente.
    """
    normalized: List[str] = []
    for index, arg in enumerate(argv):
        if arg == "--":
            normalized.extend(argv[index:])
            break
        if arg.startswith(_DEPRECATED_PREFIX):
            normalized.extend(["--deprecated-rules", arg[len(_DEPRECATED_PREFIX):]])
        else:
            normalized.append(arg)
    return normalized


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Linter and migrator for the revised Modula-2 dialect",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    m2rev check src/                           # report offending facilities
    m2rev check --profile=legacy src/          # advisory audit of legacy code
    m2rev check --format=json src/ > report.json
    m2rev fix --dry-run src/hash.mod           # preview fixes as a unified diff
    m2rev fix --enable=M2R-L01,M2R-L02 src/    # apply only the selected fixes
        """,
    )
    parser.add_argument("--version", action="version",
                        version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("paths", nargs="*", help="Source files or directories")
    common.add_argument("--profile", choices=["legacy", "revised"], default=None,
                        help="Dialect profile (default: revised)")
    common.add_argument("--enable", type=_rule_list, action="extend", default=None,
                        metavar="RULES", help="Run only these rules (comma separated)")
    common.add_argument("--disable", type=_rule_list, action="extend", default=None,
                        metavar="RULES", help="Do not run these rules (comma separated)")
    common.add_argument("--enable-deprecated", action="store_true", default=None,
                        help="Downgrade all deprecated constructs to warnings")
    common.add_argument("--deprecated-rules", type=_rule_list, action="extend", default=None,
                        metavar="RULES",
                        help="Downgrade only these deprecated rules to warnings "
                             "(also written --enable-deprecated=RULES)")
    common.add_argument("--format", choices=["text", "json"], default=None,
                        help="Report format (default: text)")
    common.add_argument("--assume-trunc-is-conversion", action="store_true", default=None,
                        help="Rewrite TRUNC(x) as x :: CARDINAL")
    common.add_argument("--private-imports-as-errors", action="store_true", default=None,
                        help="Report PRIVATETO violations as errors")
    common.add_argument("--external", type=_rule_list, action="extend", default=None,
                        metavar="MODULES", help="Library modules that are not part of the project")
    common.add_argument("--extensions", type=_rule_list, default=None,
                        help="Source file extensions (default: .def,.mod)")
    common.add_argument("--config", default=None, help=f"Configuration file (default: ./{settings.CONFIG_FILENAME})")
    common.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])

    subparsers.add_parser("check", parents=[common], help="Report diagnostics")

    fix = subparsers.add_parser("fix", parents=[common], help="Apply available fixes")
    modes = fix.add_mutually_exclusive_group()
    modes.add_argument("--in-place", dest="fix_mode", action="store_const",
                       const=FixMode.IN_PLACE.value, help="Rewrite files (default)")
    modes.add_argument("--stdout", dest="fix_mode", action="store_const",
                       const=FixMode.STDOUT.value, help="Print fixed sources")
    modes.add_argument("--dry-run", dest="fix_mode", action="store_const",
                       const=FixMode.DRY_RUN.value, help="Print a unified diff, write nothing")
    fix.add_argument("--max-fix-passes", type=int, default=None)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    Combina valores por defecto, archivo de configuración y flags.

    Raises:
        ConfigError: Archivo inválido o valores rechazados por RunConfig
    """
    values: Dict[str, Any] = load_config(args.config)
    values["subcommand"] = args.subcommand
    if args.subcommand != Subcommand.FIX.value:
        values.pop("fix_mode", None)

    flags = {
        "profile": args.profile,
        "enabled_rules": args.enable,
        "disabled_rules": args.disable,
        "format": args.format,
        "assume_trunc_is_conversion": args.assume_trunc_is_conversion,
        "private_imports_as_errors": args.private_imports_as_errors,
        "external_modules": args.external,
        "extensions": args.extensions,
        "fix_mode": getattr(args, "fix_mode", None),
        "max_fix_passes": getattr(args, "max_fix_passes", None),
        "enable_deprecated": args.enable_deprecated,
        "deprecated_rules": args.deprecated_rules,
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    if args.paths:
        values["paths"] = args.paths

    try:
        config = RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in error['loc']) or 'config'}: {error['msg']}"
            for error in e.errors()
        )
        raise ConfigError(code="INVALID_CONFIG", message=problems) from e
    if not config.targets:
        raise ConfigError(code="NO_PATHS", message="no source files or directories given")
    return config


def emit_fixes(result: AnalysisResult, config: RunConfig, out: TextIO) -> None:
    """Escribe o muestra los archivos corregidos según el modo de fix"""
    mode = config.effective_fix_mode
    changed = [(path, fix) for path, fix in sorted(result.fixes.items()) if fix.changed]

    if mode == FixMode.IN_PLACE:
        repository = SourceFileRepository(config.extensions)
        for path, fix in changed:
            repository.write_atomic(path, fix.text)
    elif mode == FixMode.STDOUT:
        several = len(result.fixes) > 1
        for path, fix in sorted(result.fixes.items()):
            if several:
                out.write(f"==> {path} <==\n")
            out.write(fix.text)
    else:
        for path, fix in changed:
            entry = result.project.unit_at(path)
            out.write(unified_diff(path, entry.source, fix.text))
    logger.info("%d of %d files changed", len(changed), len(result.fixes))


def run(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    """
    Ejecuta la CLI.

    Args:
        argv: Argumentos (sin el nombre del programa)
        out: Flujo del reporte (por defecto stdout)
        err: Flujo de errores operativos (por defecto stderr)

    Returns:
        Código de salida 0, 1 o 2
    """
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(normalize_argv(sys.argv[1:] if argv is None else argv))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR

    setup_logging(args.log_level)
    try:
        config = build_config(args)
        result = asyncio.run(run_analysis(config))
        report_stream = out
        if config.subcommand == Subcommand.FIX:
            emit_fixes(result, config, out)
            if config.effective_fix_mode == FixMode.STDOUT:
                report_stream = err
        report_stream.write(render(result.diagnostics, config.format))
    except MigratorException as e:
        err.write(f"{settings.APP_NAME}: {e.code}: {e.message}\n")
        return EXIT_ERROR
    except Exception as e:
        logger.exception("unexpected failure")
        err.write(f"{settings.APP_NAME}: internal error: {e}\n")
        return EXIT_ERROR

    if result.failures:
        for path, failure in sorted(result.failures.items()):
            err.write(f"{settings.APP_NAME}: {path}: {failure.code}: {failure.message}\n")
        return EXIT_ERROR
    if any(d.is_blocking for d in result.diagnostics):
        return EXIT_DIAGNOSTICS
    return EXIT_CLEAN


def main() -> None:
    sys.exit(run())
