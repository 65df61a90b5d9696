"""
Configuración de logging según LOG_LEVEL y LOG_FORMAT.
"""

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Optional

from app.config import settings

# Atributos estándar de LogRecord que no se copian como "extra"
_RESERVED = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class JsonFormatter(logging.Formatter):
    """Formatea cada registro como un objeto JSON en una línea"""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def setup_logging(level: Optional[str] = None, log_format: Optional[str] = None) -> None:
    """
    Configura el handler raíz sobre stderr.

    Args:
        level: Nivel de logging (por defecto settings.LOG_LEVEL)
        log_format: "json" o "text" (por defecto settings.LOG_FORMAT)
    """
    handler = logging.StreamHandler(sys.stderr)
    if (log_format or settings.LOG_FORMAT) == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )

    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(level or settings.LOG_LEVEL)
