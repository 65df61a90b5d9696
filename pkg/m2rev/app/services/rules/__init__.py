"""
Catálogo de reglas de migración.
"""

from app.services.rules.base import Rule, RuleContext, resolve_severity
from app.services.rules.privacy import check_private_imports
from app.services.rules.runner import ALL_RULES, adopt_pragma_diagnostics, run_rules

__all__ = [
    "ALL_RULES",
    "Rule",
    "RuleContext",
    "adopt_pragma_diagnostics",
    "check_private_imports",
    "resolve_severity",
    "run_rules",
]
