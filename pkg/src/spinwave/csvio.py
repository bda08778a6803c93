"""Deterministic CSV and manifest emission.

All floats are printed with 17 significant digits so re-running an
identical configuration reproduces byte-identical files; parameter
snapshots ride along as '#'-prefixed comment lines.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

from .errors import OutputError


def format_value(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int,)) or hasattr(x, "is_integer") and isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    try:
        import numpy as np

        if isinstance(x, np.integer):
            return str(int(x))
        if isinstance(x, np.floating):
            return f"{float(x):.17g}"
    except ImportError:  # pragma: no cover
        pass
    return str(x)


def snapshot_comments(snapshot: dict) -> list[str]:
    """Flatten a nested parameter snapshot into sorted comment lines."""
    flat = {}

    def walk(prefix: str, obj):
        for key in sorted(obj):
            name = f"{prefix}{key}"
            if isinstance(obj[key], dict):
                walk(name + ".", obj[key])
            else:
                flat[name] = obj[key]

    walk("", snapshot)
    return [f"{k} = {format_value(v)}" for k, v in sorted(flat.items())]


def write_csv(path: str, comments: list[str], header: list[str], rows) -> str:
    """Write one CSV file; returns the sha256 of its bytes."""
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    payload = ("\n".join(lines) + "\n").encode()
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return hashlib.sha256(payload).hexdigest()


def hash_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class ArtifactManifest:
    """Emitted files with content hashes plus the parameter snapshot."""

    params: dict
    files: list[dict] = field(default_factory=list)

    def add(self, path: str, digest: str | None = None):
        if digest is None:
            digest = hash_file(path)
        self.files.append({"path": os.path.basename(path), "sha256": digest})

    def write(self, path: str) -> str:
        payload = json.dumps(
            {"files": sorted(self.files, key=lambda f: f["path"]), "params": self.params},
            indent=2,
            sort_keys=True,
        ).encode()
        try:
            with open(path, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        return hashlib.sha256(payload).hexdigest()
