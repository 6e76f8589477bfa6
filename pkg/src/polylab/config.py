"""Flat key=value run configuration.

Files hold one ``key = value`` pair per line ('#' comments allowed); flags
given on the command line win over file values.  parse -> serialize ->
parse is the identity on the mapping.
"""

from __future__ import annotations

from .errors import DomainError


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def serialize_config(cfg: dict) -> str:
    lines = [f"{k} = {cfg[k]}" for k in sorted(cfg)]
    return "\n".join(lines) + ("\n" if lines else "")


def load_config(path: str) -> dict:
    with open(path) as fh:
        return parse_config(fh.read())
