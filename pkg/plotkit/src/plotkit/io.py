"""Parsing of the solver CLI's plain-text outputs.

All files share the layout: optional `# key=value` metadata lines, one
whitespace-separated header row, then numeric rows.
"""

from __future__ import annotations

import numpy as np


class SchemaError(Exception):
    """Input file does not match the documented column contract."""


def load_table(path):
    """(meta, columns, data) from a delimited text table.

    meta is a dict of the `#`-prefixed key=value lines, columns the
    header names, data a 2D float array (possibly with zero rows).
    """
    meta = {}
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val
                continue
            if header is None:
                header = line.split()
                continue
            rows.append([float(tok) for tok in line.split()])
    if header is None:
        raise SchemaError(f"{path}: no header row found")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header) if rows else 0)
    if rows and data.shape[1] != len(header):
        raise SchemaError(f"{path}: rows have {data.shape[1]} fields, "
                          f"header has {len(header)}")
    return meta, header, data


def column(header, data, name, path="<input>"):
    """One named column as a 1D array, with a helpful failure message."""
    if name not in header:
        raise SchemaError(f"{path}: no column {name!r}; available: {', '.join(header)}")
    if data.size == 0:
        raise SchemaError(f"{path}: table has no data rows")
    return data[:, header.index(name)]


def require_rows(data, path):
    if data.size == 0:
        raise SchemaError(f"{path}: table has no data rows")
