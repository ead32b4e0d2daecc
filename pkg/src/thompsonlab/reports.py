"""Atomic CSV/JSON report emission for the experiment runner."""

import csv
import io
import json
import os


def render_rows(rows, fmt):
    """Rows (list of dicts with a shared key set) to report text."""
    if fmt == "json":
        return json.dumps([{k: _jsonable(v) for k, v in r.items()}
                           for r in rows], indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    fields = list(rows[0].keys()) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _plain(v) for k, v in r.items()})
    return buf.getvalue()


def _jsonable(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, tuple):
        return list(v)
    return v


def _plain(v):
    if isinstance(v, bool):
        return v
    if hasattr(v, "item"):  # numpy scalars
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return " ".join(str(x) for x in v)
    return v


def write_report(rows, path, fmt):
    """Write-then-rename so readers never see a partial file."""
    text = render_rows(rows, fmt)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path
