"""Deterministic CSV/JSON writers and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path


def fmt_float(x: float) -> str:
    """17 significant digits, lowercase scientific; non-finite values as nan/inf/-inf."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, complex):
        im = fmt_float(v.imag)
        return f"{fmt_float(v.real)}{'' if im.startswith('-') else '+'}{im}j"
    return str(v)


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = fmt_float(obj)
        return s if math.isfinite(obj) else json.dumps(s)
    if isinstance(obj, complex):
        return dumps_json([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "to_json"):
        return dumps_json(obj.to_json(), indent, _level)
    if hasattr(obj, "item"):            # numpy scalars
        return dumps_json(obj.item(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


class OutputTree:
    """Writes files under one directory and records each in a manifest with its sha256."""

    def __init__(self, root, command: str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.files = []

    def _record(self, name: str, data: bytes):
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        self.files.append({"path": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})

    def write_json(self, name: str, obj):
        self._record(name, (dumps_json(obj) + "\n").encode("utf-8"))

    def write_csv(self, name: str, columns, rows):
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])
        self._record(name, buf.getvalue().encode("utf-8"))

    def finish(self, complete: bool, exit_code: int, notes=()):
        manifest = {"command": self.command, "complete": bool(complete), "exit_code": int(exit_code),
                    "notes": list(notes), "files": self.files}
        data = (dumps_json(manifest) + "\n").encode("utf-8")
        (self.root / "manifest.json").write_bytes(data)
        return manifest
