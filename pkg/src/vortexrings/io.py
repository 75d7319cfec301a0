"""Atomic file output and the fixed CSV number format."""

import csv
import io
import json
import os
import tempfile


def fmt(x):
    """Decimal, 17 significant digits, '.' radix; round-trips any double."""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a temp file in the same directory plus rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    atomic_write_text(path, csv_text(header, rows))


def read_csv(path):
    """Return ``(header, rows)`` with every row a list of strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def _plain(o):
    # numpy scalars reach reports through reductions
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"{type(o).__name__} is not JSON serialisable")


def write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n")
