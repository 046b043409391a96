"""Line-oriented experiment reports, schema v1.

Layout: a versioned header, ``# param`` lines, a ``# columns`` line, one
whitespace-separated row per trial, then ``# aggregate`` lines.  Values are
kept as strings on parse so a parse/write round trip is byte-identical and
downstream plotting needs nothing from this repo.
"""

from __future__ import annotations

from pathlib import Path

REPORT_HEADER = "# rsham-report v1"


def write_report(path: str | Path, lemma: str, params: dict[str, str],
                 columns: list[str], rows: list[tuple], aggregates: dict[str, str]) -> None:
    lines = [REPORT_HEADER, f"# lemma {lemma}"]
    for k, v in params.items():
        lines.append(f"# param {k} {v}")
    lines.append("# columns " + " ".join(columns))
    for row in rows:
        lines.append(" ".join(str(x) for x in row))
    for k, v in aggregates.items():
        lines.append(f"# aggregate {k} {v}")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_report(path: str | Path) -> dict:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0] != REPORT_HEADER:
        raise ValueError(f"{path}: not a v1 report")
    doc = {"lemma": None, "params": {}, "columns": [], "rows": [], "aggregates": {}}
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("# lemma "):
            doc["lemma"] = line[len("# lemma "):]
        elif line.startswith("# param "):
            k, _, v = line[len("# param "):].partition(" ")
            doc["params"][k] = v
        elif line.startswith("# columns "):
            doc["columns"] = line[len("# columns "):].split()
        elif line.startswith("# aggregate "):
            k, _, v = line[len("# aggregate "):].partition(" ")
            doc["aggregates"][k] = v
        elif line.startswith("#"):
            raise ValueError(f"unrecognised header line: {line}")
        else:
            doc["rows"].append(tuple(line.split()))
    return doc


def rewrite_report(path: str | Path, doc: dict) -> None:
    """Inverse of parse_report; writing a parsed report reproduces the file."""
    write_report(path, doc["lemma"], doc["params"], doc["columns"],
                 doc["rows"], doc["aggregates"])
