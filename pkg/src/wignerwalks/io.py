"""File formats: walk JSONL, edge-list CSV, report CSVs.

Rationals are written as ``num/den`` strings.  Writers go through a
temporary file and an atomic rename so a failed run leaves nothing behind.
"""

from __future__ import annotations

import csv
import numbers
import io as _io
import json
import os
import tempfile
from contextlib import contextmanager
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError
from .walks import Walk

FIXTURE_VERSION = "v1"


def fmt_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def fmt_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, numbers.Integral):
        return str(int(x))
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


@contextmanager
def atomic_writer(path: str | os.PathLike, newline: str | None = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline=newline) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


# -------------------------------------------------------------------- walks


def walk_record(w: Walk, **extra) -> dict:
    return {"s": w.s, "labels": list(w.labels), **extra}


def dumps_walk(w: Walk, **extra) -> str:
    return json.dumps(walk_record(w, **extra), separators=(",", ":"))


def loads_walk(line: str, require_even: bool = True) -> Walk:
    try:
        rec = json.loads(line)
        labels = rec["labels"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ValidationError(f"bad walk record: {line.strip()!r}") from exc
    if not isinstance(labels, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in labels):
        raise ValidationError(f"labels must be a list of integers: {line.strip()!r}")
    w = Walk(tuple(labels))
    if "s" in rec and rec["s"] * 2 != w.n_steps:
        raise ValidationError(f"record says s={rec['s']} but has {w.n_steps} steps")
    if require_even and not w.is_even:
        raise ValidationError(f"walk {w} is not even")
    return w


def write_walks(path, walks: Iterable[Walk]) -> int:
    count = 0
    with atomic_writer(path) as fh:
        for w in walks:
            fh.write(dumps_walk(w) + "\n")
            count += 1
    return count


def read_walks(path, require_even: bool = True) -> list[Walk]:
    with open(path, encoding="utf-8") as fh:
        return [loads_walk(line, require_even) for line in fh if line.strip()]


def read_named_walks(lines: Iterable[str]) -> dict[str, Walk]:
    out = {}
    for line in lines:
        if line.strip():
            rec = json.loads(line)
            out[rec["name"]] = loads_walk(line)
    return out


def fixture_walks(version: str = FIXTURE_VERSION) -> dict[str, Walk]:
    """Example walks shipped with the package."""
    ref = resources.files("wignerwalks") / "fixtures" / version / "walks.jsonl"
    return read_named_walks(ref.read_text(encoding="utf-8").splitlines())


# --------------------------------------------------------------------- CSVs


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_value(x) for x in row])
    return buf.getvalue()


def write_text(path, text: str) -> None:
    with atomic_writer(path, newline="") as fh:
        fh.write(text)


EDGE_HEADER = ("t", "tail", "head", "marked")
REPORT_HEADER = ("bound_id", "params_json", "lhs", "rhs", "satisfied", "slack")
MOMENTS_HEADER = ("s", "n", "method", "value_numerator", "value_denominator", "estimate", "stderr")
CENSUS_HEADER = ("s", "m", "count", "bound")


def edges_csv(w: Walk) -> str:
    return csv_text(EDGE_HEADER, [(e.t, e.tail, e.head, int(e.marked)) for e in w.edges()])


def reports_csv(reports) -> str:
    return csv_text(
        REPORT_HEADER,
        [(r.bound_id, r.params_json(), r.lhs, r.rhs, r.satisfied, f"{r.slack:.6g}") for r in reports],
    )


def moment_row(s: int, n: int, method: str, value: Fraction | None = None, estimate: float | None = None, stderr: float | None = None) -> tuple:
    if value is not None:
        value = Fraction(value)
        return (s, n, method, str(value.numerator), str(value.denominator), "", "")
    return (s, n, method, "", "", repr(estimate), repr(stderr))


def read_reports(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
