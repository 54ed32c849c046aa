"""Flat ``dotted.key = value`` config files.

Grammar, one entry per line::

    # comment
    outputs.dir = runs/#3   # trailing comment
    model.kappa_s = 10
    model.psi_s.kind = power_law
    init.drift1 = [0.5, 0.0]
    certificates = theorem41, lemma_inequalities

Values that parse as JSON are taken as JSON, anything else is a bare string.
A bare ``certificates`` value is split on commas. Later lines win.
"""

import json
import re
from pathlib import Path
from typing import Any, Dict, Union

from loguru import logger

from ..core.errors import ConfigError

LIST_KEYS = {"certificates"}
# "#" opens a comment only at line start or after whitespace.
COMMENT = re.compile(r"(^|\s)#.*$")


def parse_value(key: str, raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        pass
    if key in LIST_KEYS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Flat mapping of dotted keys to parsed values."""
    entries: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = COMMENT.sub("", line).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got '{line}'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if not key or any(not part for part in key.split(".")):
            raise ConfigError(f"{source}:{lineno}: malformed key '{key}'")
        if key in entries:
            logger.debug(f"{source}:{lineno}: '{key}' overrides an earlier value")
        entries[key] = parse_value(key, raw)
    return entries


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    return parse_config_text(text, source=str(path))


def nest(entries: Dict[str, Any]) -> Dict[str, Any]:
    """Dotted keys to nested dicts."""
    tree: Dict[str, Any] = {}
    for key, value in entries.items():
        node = tree
        *parents, leaf = key.split(".")
        for part in parents:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"'{key}' conflicts with a scalar set earlier")
            node = child
        node[leaf] = value
    return tree
