"""Logging setup.

Filtering follows an env-filter convention: ``STOPRULE_LOG=info`` sets the
package level, ``STOPRULE_LOG=stoprule.oracle=debug,warning`` sets a level for
one module and a default for the rest.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from datetime import datetime, timezone
from typing import Dict, Optional, Tuple

LOG_ENV = "STOPRULE_LOG"
ROOT_LOGGER = "stoprule"

# Attributes every LogRecord carries; anything else came in through ``extra``.
_RESERVED = frozenset(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class JsonFormatter(logging.Formatter):
    """One JSON object per record, structured ``extra`` fields included."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "ts": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "target": record.name,
            "message": record.getMessage(),
        }
        for key, value in vars(record).items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def parse_filter(spec: str) -> Tuple[Optional[int], Dict[str, int]]:
    """Split an env-filter string into a default level and per-module levels.

    Unknown level names are ignored.
    """
    default: Optional[int] = None
    targets: Dict[str, int] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        target, _, level_name = part.rpartition("=")
        level = logging.getLevelName(level_name.strip().upper())
        if not isinstance(level, int):
            continue
        if target:
            targets[target.strip()] = level
        else:
            default = level
    return default, targets


def init_logging(level: Optional[int] = None, json_output: bool = False) -> logging.Logger:
    """Install a single stderr handler on the package logger.

    Args:
        level: Explicit level; wins over ``STOPRULE_LOG``.
        json_output: Emit JSON lines instead of plain text.

    Returns:
        The configured package logger.
    """
    default, targets = parse_filter(os.environ.get(LOG_ENV, ""))
    root = logging.getLogger(ROOT_LOGGER)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    if json_output:
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
    root.addHandler(handler)
    root.propagate = False

    if level is not None:
        root.setLevel(level)
    else:
        root.setLevel(default if default is not None else logging.WARNING)
    for target, target_level in targets.items():
        logging.getLogger(target).setLevel(target_level)
    return root
