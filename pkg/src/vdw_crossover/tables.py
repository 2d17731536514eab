"""Plot-ready tables: CSV with ``#`` comment headers, or versioned JSON.

Floats are written with 17 significant digits so that reading a CSV back
and writing it again reproduces the file byte for byte.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigurationError

SCHEMA_VERSION = 1
FORMATS = ("csv", "json")


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(v)


def parse_value(text):
    # a cell becomes a number only if writing it back reproduces the text
    for kind in (int, float):
        try:
            value = kind(text)
        except ValueError:
            continue
        if format_value(value) == text:
            return value
    if text in ("true", "false"):
        return text == "true"
    return text


@dataclass
class Table:
    """Named columns, row tuples and free-text notes (title first)."""

    columns: list
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        for note in self.notes:
            for line in str(note).splitlines() or [""]:
                buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()

    def to_json(self, command=None, meta=None):
        doc = {
            "schema": SCHEMA_VERSION,
            "command": command,
            "notes": list(self.notes),
            "columns": list(self.columns),
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }
        if meta:
            doc["meta"] = meta
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def render(self, fmt, command=None, meta=None):
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json(command, meta)
        raise ConfigurationError(f"output format must be one of {FORMATS}, got {fmt!r}")

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _json_value(v):
    if hasattr(v, "dtype"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def read_csv(text):
    notes = []
    body = []
    for line in text.splitlines(keepends=True):
        if line.startswith("#") and not body:
            notes.append(line[2:].rstrip("\n") if line.startswith("# ") else line[1:].rstrip("\n"))
        else:
            body.append(line)
    reader = csv.reader(io.StringIO("".join(body)))
    try:
        columns = next(reader)
    except StopIteration:
        raise ConfigurationError("CSV table has no header row") from None
    rows = [tuple(parse_value(v) for v in row) for row in reader]
    return Table(columns, rows, notes)


def read_json(text):
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported table schema {doc.get('schema')!r}")
    return Table(doc["columns"], [tuple(r) for r in doc["rows"]], doc.get("notes", []))
