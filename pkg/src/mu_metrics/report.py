"""Scenario reports and their byte-stable JSON / CSV serialisation."""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

FORMATS = ("json", "csv")


@dataclass
class Report:
    scenario: str
    config: dict
    metrics: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    table: dict = None  # {"columns": [...], "rows": [[...], ...]} for sweeps

    @property
    def passed(self):
        return all(self.verdicts.values())

    def to_dict(self):
        out = {
            "scenario": self.scenario,
            "config": self.config,
            "metrics": self.metrics,
            "verdicts": self.verdicts,
            "provenance": self.provenance,
        }
        if self.table is not None:
            out["table"] = self.table
        return out


def _float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def canonical_json(obj, indent=2, _level=0):
    """JSON with sorted keys and 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {canonical_json(obj[k], indent, _level + 1)}"
            for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(canonical_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + canonical_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    return json.dumps(str(obj))


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _float(v).strip('"')
    return str(v)


def report_csv(r):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if r.table is not None:
        w.writerow(r.table["columns"])
        for row in r.table["rows"]:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()
    w.writerow(["section", "key", "value"])
    for section in ("metrics", "verdicts"):
        values = getattr(r, section)
        for k in sorted(values):
            w.writerow([section, k, _cell(values[k])])
    return buf.getvalue()


def render(r, fmt):
    if fmt == "json":
        return canonical_json(r.to_dict()) + "\n"
    if fmt == "csv":
        return report_csv(r)
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


def emit_report(r, path, fmt="json"):
    text = render(r, fmt)
    if path in (None, "-"):
        print(text, end="")
        return text
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text
