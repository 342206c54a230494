"""Matrix Market coordinate files.

Symmetric, skew-symmetric and hermitian files are expanded to general form
while parsing. Explicit zeros stay as stored entries.
"""

from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .csr import CsrMatrix, from_coo

FIELDS = ("real", "integer", "pattern", "complex")
SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


class MatrixMarketError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class MatrixMarketHeader:
    object: str = "matrix"
    format: str = "coordinate"
    field: str = "pattern"
    symmetry: str = "general"

    @classmethod
    def parse(cls, line: str, lineno: int = 1) -> "MatrixMarketHeader":
        parts = line.strip().split()
        if len(parts) != 5 or parts[0].lower() != "%%matrixmarket":
            raise MatrixMarketError("malformed header, expected '%%MatrixMarket matrix coordinate <field> <symmetry>'", lineno)
        obj, fmt, field, symmetry = (p.lower() for p in parts[1:])
        if obj != "matrix":
            raise MatrixMarketError(f"unsupported object '{obj}'", lineno)
        if fmt != "coordinate":
            raise MatrixMarketError(f"unsupported format '{fmt}'", lineno)
        if field not in FIELDS:
            raise MatrixMarketError(f"unsupported field '{field}'", lineno)
        if symmetry not in SYMMETRIES:
            raise MatrixMarketError(f"unsupported symmetry '{symmetry}'", lineno)
        return cls(obj, fmt, field, symmetry)

    def __str__(self):
        return f"%%MatrixMarket {self.object} {self.format} {self.field} {self.symmetry}"

    @property
    def tokens_per_entry(self) -> int:
        return {"pattern": 2, "real": 3, "integer": 3, "complex": 4}[self.field]


def _open_text(path):
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="ascii", errors="replace")
    return open(path, "r", encoding="ascii", errors="replace")


def read_matrix_market(path, keep_values: bool = False) -> CsrMatrix:
    """Parse a coordinate Matrix Market file into a general CsrMatrix.

    Values are kept only when ``keep_values`` is set and the field is real or
    integer; complex entries contribute their positions only.
    """
    with _open_text(path) as fh:
        header_line = fh.readline()
        if not header_line:
            raise MatrixMarketError("empty file", 1)
        header = MatrixMarketHeader.parse(header_line, 1)
        lineno = 1
        size_line = None
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = stripped
            break
        if size_line is None:
            raise MatrixMarketError("missing size line", lineno)
        try:
            rows, cols, nnz = (int(t) for t in size_line.split())
        except ValueError:
            raise MatrixMarketError(f"malformed size line '{size_line}'", lineno) from None
        if rows < 0 or cols < 0 or nnz < 0:
            raise MatrixMarketError("negative size", lineno)
        body_start = lineno + 1
        body = fh.read()

    width = header.tokens_per_entry
    tokens = body.split()
    data = None
    if len(tokens) == nnz * width:
        try:
            data = np.array(tokens, dtype=np.float64).reshape(nnz, width) if nnz else np.zeros((0, width))
        except ValueError:
            data = None
    if data is None:
        data = _parse_slow(body, body_start, nnz, width)

    r = data[:, 0]
    c = data[:, 1]
    if not (np.all(r == np.floor(r)) and np.all(c == np.floor(c))):
        bad = int(np.flatnonzero((r != np.floor(r)) | (c != np.floor(c)))[0])
        raise MatrixMarketError("non-integer index", _entry_line(body, body_start, bad))
    r = r.astype(np.int64) - 1
    c = c.astype(np.int64) - 1
    out = (r < 0) | (r >= rows) | (c < 0) | (c >= cols)
    if out.any():
        bad = int(np.flatnonzero(out)[0])
        raise MatrixMarketError(
            f"index ({r[bad] + 1}, {c[bad] + 1}) out of declared bounds {rows}x{cols}",
            _entry_line(body, body_start, bad),
        )

    vals = data[:, 2] if keep_values and header.field in ("real", "integer") else None
    if header.symmetry != "general":
        off = r != c
        mr, mc = c[off], r[off]
        r = np.concatenate([r, mr])
        c = np.concatenate([c, mc])
        if vals is not None:
            mirrored = -vals[off] if header.symmetry == "skew-symmetric" else vals[off]
            vals = np.concatenate([vals, mirrored])
    return from_coo(rows, cols, r, c, vals)


def _parse_slow(body: str, body_start: int, nnz: int, width: int) -> np.ndarray:
    """Line-by-line parse, used only to locate the error in a bad file."""
    out = np.zeros((nnz, width))
    k = 0
    lineno = body_start - 1
    for lineno, line in enumerate(body.splitlines(), start=body_start):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if k >= nnz:
            raise MatrixMarketError(f"more entries than the declared {nnz}", lineno)
        parts = stripped.split()
        if len(parts) != width:
            raise MatrixMarketError(f"expected {width} fields, got {len(parts)}", lineno)
        try:
            out[k] = [float(p) for p in parts]
        except ValueError:
            raise MatrixMarketError(f"unparseable entry '{stripped}'", lineno) from None
        k += 1
    if k < nnz:
        raise MatrixMarketError(f"truncated entry list: {k} of {nnz} entries", lineno + 1)
    return out


def _entry_line(body: str, body_start: int, entry: int) -> int:
    k = -1
    for lineno, line in enumerate(body.splitlines(), start=body_start):
        stripped = line.strip()
        if stripped and not stripped.startswith("%"):
            k += 1
            if k == entry:
                return lineno
    return body_start


def write_matrix_market(m: CsrMatrix, path, comment: str | None = None) -> Path:
    """Write the structure of ``m`` as a general pattern file."""
    path = Path(path)
    rows = np.repeat(np.arange(m.rows, dtype=np.int64), m.row_lengths()) + 1
    cols = m.col.astype(np.int64) + 1
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(str(MatrixMarketHeader()) + "\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{m.rows} {m.cols} {m.nnz}\n")
        if m.nnz:
            np.savetxt(fh, np.column_stack([rows, cols]), fmt="%d")
    os.replace(tmp, path)
    return path
