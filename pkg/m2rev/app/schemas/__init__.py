"""
Exportación de los schemas Pydantic.
"""

from app.schemas.common import Action, ProfileId, Severity, SourceSpan
from app.schemas.diagnostic import Diagnostic, DroppedFix, EditScript, FixPlan, TextEdit
from app.schemas.rule import CATALOGUE, RuleId

__all__ = [
    "Action",
    "CATALOGUE",
    "Diagnostic",
    "DroppedFix",
    "EditScript",
    "FixPlan",
    "ProfileId",
    "RuleId",
    "Severity",
    "SourceSpan",
    "TextEdit",
]
