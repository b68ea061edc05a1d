"""CSV artifacts: ``#`` metadata header, one header row, 12 significant digits.

Writes are atomic (temporary file in the target directory, then rename).
"""

import csv
import io
import math
import os
import tempfile

FORMAT_VERSION = "1"
SIG_DIGITS = 12

SIMULATE_COLUMNS = ("ebn0_db", "scheme", "ber_sim", "ci95", "bits", "errors", "ber_analytic", "flagged")
ANALYZE_COLUMNS = ("ebn0_db", "ber_1a", "ber_1b", "ber_2b", "ber_e2e",
                   "throughput_s2", "throughput_s3", "gamma_t", "gamma_f")
COMPARE_COLUMNS = ("config", "scheme", "ebn0_db", "metric", "value")

_INT_COLUMNS = {"bits", "errors"}
_TEXT_COLUMNS = {"config", "scheme", "metric"}
_BOOL_COLUMNS = {"flagged"}


def fmt(value):
    """Format one cell; ``None`` is the empty string."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def parse_cell(column, text):
    if text == "":
        return None
    if column in _TEXT_COLUMNS:
        return text
    if column in _BOOL_COLUMNS:
        return text == "true"
    if column in _INT_COLUMNS:
        return int(text)
    return float(text)


def render(columns, rows, meta):
    """CSV text with ``# key: value`` metadata lines (LF endings)."""
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_atomic(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_text(text):
    """Inverse of :func:`render`: ``(meta, columns, rows)`` with typed cells."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = tuple(next(reader))
    rows = [{c: parse_cell(c, v) for c, v in zip(columns, rec)} for rec in reader]
    return meta, columns, rows


def read(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_text(fh.read())
