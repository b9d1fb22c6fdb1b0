"""Matrix Market ``array`` format for dense complex matrices and vectors.

Entries are stored column by column, one ``real imag`` pair per line, with
17 significant digits so that a write/read cycle is bit-exact.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .linalg import as_cmatrix

HEADER = "%%MatrixMarket matrix array complex general"


def _fmt(x):
    return format(float(x), ".17g")


def write_matrix_market(path, M, comment=None):
    M = as_cmatrix(M)
    rows, cols = M.shape
    lines = [HEADER]
    if comment:
        lines.extend("% " + c for c in comment.splitlines())
    lines.append(f"{rows} {cols}")
    for z in M.reshape(-1, order="F"):
        lines.append(f"{_fmt(z.real)} {_fmt(z.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_market(path):
    """Read a dense ``array`` file (complex, real or integer field)."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty file")
    header = text[0].split()
    if len(header) < 5 or header[0].lower() != "%%matrixmarket":
        raise ValueError(f"{path}: missing MatrixMarket header")
    obj, fmt, field, symmetry = (h.lower() for h in header[1:5])
    if obj != "matrix" or fmt != "array":
        raise ValueError(f"{path}: only dense 'matrix array' files are supported")
    if field not in ("complex", "real", "integer", "double"):
        raise ValueError(f"{path}: unsupported field {field!r}")
    if symmetry != "general":
        raise ValueError(f"{path}: unsupported symmetry {symmetry!r}")
    body = [ln for ln in text[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    rows, cols = (int(t) for t in body[0].split()[:2])
    values = []
    for ln in body[1:]:
        parts = ln.split()
        if field == "complex":
            values.append(complex(float(parts[0]), float(parts[1])))
        else:
            values.append(complex(float(parts[0]), 0.0))
    if len(values) != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} entries, found {len(values)}")
    return np.array(values, dtype=complex).reshape((rows, cols), order="F")


def read_vector(path):
    M = read_matrix_market(path)
    if 1 not in M.shape:
        raise ValueError(f"{path}: expected a vector, got shape {M.shape}")
    return M.reshape(-1)
