"""Result tables and their CSV/JSON persistence.

CSV bodies are deterministic: header row, comma separators, LF endings and
17-significant-digit decimals, with no timestamps.  Run metadata (config
hash, package versions, wall time) goes into the JSON summary only, so
re-running a preset with the same seed reproduces byte-identical CSV files.
"""

from dataclasses import dataclass, field
import hashlib
import json


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} does not match {len(self.columns)} columns"
            )
        self.rows.append(list(values))

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(table, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def write_summary(summary, path):
    with open(path, "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
