"""Flat-file results: CSV with a provenance header, JSON for fits."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path


def digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _version() -> str:
    from . import __version__
    return __version__


def header_lines(config: dict, seed) -> list[str]:
    return [
        f"# qboolearn {_version()}",
        f"# config_digest {digest(config)}",
        f"# seed {seed}",
        f"# config {json.dumps(config, sort_keys=True, default=str)}",
    ]


def write_csv(path, columns, rows, config: dict, seed, notes=()) -> Path:
    """Write rows under a commented header; returns the path.

    Floats are written with ``repr`` so identical runs give identical bytes.
    """
    buf = io.StringIO()
    for line in header_lines(config, seed):
        buf.write(line + "\n")
    for note in notes:
        buf.write(f"# note {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


def read_csv(path) -> list[dict]:
    """Rows of a results CSV as dicts, skipping ``#`` header lines."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_json(path, payload: dict, config: dict | None = None, seed=None) -> Path:
    if config is not None:
        payload = {
            "version": _version(),
            "config_digest": digest(config),
            "seed": seed,
            **payload,
        }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
