"""
MatrixMarket I/O for plant matrices.

Reading runs a line-numbered structural check first so malformed files fail
with a precise location, then delegates parsing to ``scipy.io.mmread``.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import scipy.io
import scipy.sparse as sp

from ..core.linalg import as_matrix
from ..exceptions import MatrixMarketError

logger = logging.getLogger(__name__)

FORMATS = ('array', 'coordinate')
FIELDS = ('real', 'integer', 'double')
SYMMETRIES = ('general', 'symmetric', 'skew-symmetric')
PRECISION = 17


def _parse_ints(tokens, path: str, lineno: int, count: int):
    if len(tokens) != count:
        raise MatrixMarketError(f"expected {count} integers, got {len(tokens)}", path, lineno)
    try:
        values = [int(tok) for tok in tokens]
    except ValueError as exc:
        raise MatrixMarketError(f"bad integer in size line: {exc}", path, lineno) from exc
    if any(v < 0 for v in values):
        raise MatrixMarketError("negative size", path, lineno)
    return values


def _parse_float(token: str, path: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise MatrixMarketError(f"bad numeric entry {token!r}", path, lineno) from exc


def check_matrix_market(path: Union[str, Path]) -> None:
    """
    Validate header, size line and body of a real MatrixMarket file.

    Raises:
        MatrixMarketError: with the offending line number
    """
    path = str(path)
    try:
        with open(path, 'r', encoding='ascii', errors='replace') as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MatrixMarketError(f"cannot read file: {exc}", path) from exc
    if not lines:
        raise MatrixMarketError("empty file", path, 1)

    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != '%%matrixmarket' or header[1].lower() != 'matrix':
        raise MatrixMarketError("header must read '%%MatrixMarket matrix <format> <field> <symmetry>'", path, 1)
    fmt, fld, sym = (h.lower() for h in header[2:])
    if fmt not in FORMATS:
        raise MatrixMarketError(f"unsupported format {fmt!r}", path, 1)
    if fld not in FIELDS:
        raise MatrixMarketError(f"unsupported field {fld!r}; only real matrices are accepted", path, 1)
    if sym not in SYMMETRIES:
        raise MatrixMarketError(f"unsupported symmetry {sym!r}", path, 1)

    body = [(i + 1, line.split()) for i, line in enumerate(lines[1:], start=1)
            if line.strip() and not line.lstrip().startswith('%')]
    if not body:
        raise MatrixMarketError("missing size line", path, len(lines))
    size_line, size_tokens = body[0]
    entries = body[1:]

    if fmt == 'array':
        rows, cols = _parse_ints(size_tokens, path, size_line, 2)
        expected = rows * cols
        if sym != 'general':
            if rows != cols:
                raise MatrixMarketError("symmetric array must be square", path, size_line)
            expected = rows * (rows + 1) // 2 if sym == 'symmetric' else rows * (rows - 1) // 2
        for lineno, tokens in entries:
            if len(tokens) != 1:
                raise MatrixMarketError(f"array entry must hold one value, got {len(tokens)}", path, lineno)
            _parse_float(tokens[0], path, lineno)
    else:
        rows, cols, expected = _parse_ints(size_tokens, path, size_line, 3)
        for lineno, tokens in entries:
            if len(tokens) != 3:
                raise MatrixMarketError(f"coordinate entry must be 'i j value', got {len(tokens)} fields",
                                        path, lineno)
            i, j = _parse_ints(tokens[:2], path, lineno, 2)
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(f"index ({i}, {j}) outside {rows}x{cols}", path, lineno)
            _parse_float(tokens[2], path, lineno)

    if len(entries) != expected:
        last = entries[-1][0] if entries else size_line
        raise MatrixMarketError(f"expected {expected} entries, found {len(entries)}", path, last)


def load_matrix_market(path: Union[str, Path]) -> np.ndarray:
    """
    Read a real MatrixMarket file (array or coordinate) as a dense matrix.

    Symmetric and skew-symmetric storage is expanded.

    Raises:
        MatrixMarketError: malformed file
    """
    check_matrix_market(path)
    with open(path, 'rb') as fh:
        data = scipy.io.mmread(fh)
    dense = data.toarray() if sp.issparse(data) else np.asarray(data)
    logger.debug("read %s: %dx%d", path, *np.atleast_2d(dense).shape)
    return as_matrix(dense, str(path))


def write_matrix_market(path: Union[str, Path], M) -> Path:
    """Write M in array format with round-trip exact decimal printing."""
    path = Path(path)
    M = as_matrix(M, "M")
    with open(path, 'wb') as fh:
        scipy.io.mmwrite(fh, M, precision=PRECISION)
    return path
