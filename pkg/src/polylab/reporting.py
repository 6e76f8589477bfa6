"""Deterministic artifact emission: CSV, JSON, run manifests, figures.

Every run writes artifacts whose bytes are a pure function of (command,
params, seed), so replaying a manifest must reproduce identical hashes.
Floats are serialized with repr (shortest round-trip), rows in fixed order.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, is_dataclass

SCHEMA_COMMENT = "# polylab-schema v1"


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    return str(x)


def write_csv(path: str, fieldnames, rows) -> str:
    """CSV with the schema comment line; returns the path."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(SCHEMA_COMMENT + "\n")
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            if is_dataclass(row):
                row = asdict(row)
            fh.write(",".join(_fmt(row.get(k) if isinstance(row, dict)
                                   else getattr(row, k))
                              for k in fieldnames) + "\n")
    return path


def write_json(path: str, obj) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True, default=_fmt)
        fh.write("\n")
    return path


def write_jsonl(path: str, objs) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        for o in objs:
            fh.write(json.dumps(o, sort_keys=True, default=_fmt) + "\n")
    return path


def write_series(path: str, x, y, labels=("x", "y")) -> str:
    """Two-column plot-data series."""
    rows = [{"x": float(a), "y": float(b)} for a, b in zip(x, y)]
    return write_csv(path, ["x", "y"] if labels == ("x", "y") else list(labels),
                     [{labels[0]: r["x"], labels[1]: r["y"]} for r in rows])


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int
    outputs: dict = field(default_factory=dict)
    schema: str = "polylab-manifest v1"

    def add(self, path: str) -> None:
        self.outputs[os.path.basename(path)] = sha256_file(path)

    def write(self, path: str) -> str:
        return write_json(path, {"command": self.command, "params": self.params,
                                 "seed": self.seed, "outputs": self.outputs,
                                 "schema": self.schema})


def render_figure(path: str, plot_fn) -> str:
    """Render a matplotlib figure to ``path`` deterministically."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=110)
    plot_fn(ax)
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, metadata={"Software": "polylab"})
    plt.close(fig)
    return path
