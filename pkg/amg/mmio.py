"""
Matrix Market reading and writing.

Parsing and formatting are delegated to ``scipy.io``; this module adds the
canonical-CSR conversion, the field checks, and error messages that carry
the file path and, for malformed content, the offending line.
"""
import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.io
import scipy.sparse as sp

from amg.errors import EmptyVectorError, MatrixMarketError
from amg.sparse import SparseMatrix, TripletList, as_vector, triplets_to_csr

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# 17 significant digits round-trip every float64 exactly
PRECISION = 17

_LINE_IN_MESSAGE = re.compile(r"[Ll]ine (\d+)")


def _entry_problem(tokens, expected: int, fmt: str, rows: int, cols: int) -> Optional[str]:
    if len(tokens) < expected:
        return f"expected {expected} fields, got {len(tokens)}"
    if len(tokens) > expected:
        return f"unexpected trailing field {tokens[expected]!r}"
    values = tokens
    if fmt == "coordinate":
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            return f"non-integer index in {' '.join(tokens[:2])!r}"
        if not (1 <= i <= rows and 1 <= j <= cols):
            return f"index ({i}, {j}) outside the {rows}x{cols} matrix"
        values = tokens[2:]
    try:
        [float(token) for token in values]
    except ValueError:
        return f"non-numeric value in {' '.join(values)!r}"
    return None


def _check_entries(path: Path, rows: int, cols: int, entries: int, fmt: str, field: str, symmetry: str) -> None:
    """Scan the data lines, raising on the first malformed entry or a wrong entry count."""
    if fmt == "coordinate":
        expected = 2 if field == "pattern" else 3
    else:
        expected = 1
    count = 0
    last = 0
    size_seen = False
    try:
        with open(path, "r") as f:
            for number, line in enumerate(f, start=1):
                last = number
                stripped = line.strip()
                if not stripped or stripped.startswith("%"):
                    continue
                if not size_seen:
                    size_seen = True
                    continue
                count += 1
                if count > entries:
                    raise MatrixMarketError(path, f"more than the {entries} entries declared", line=number)
                problem = _entry_problem(stripped.split(), expected, fmt, rows, cols)
                if problem:
                    raise MatrixMarketError(path, problem, line=number)
    except OSError as e:
        raise OSError(f"{path}: {e}") from e
    # array files with symmetric storage hold fewer values than rows * cols
    if count < entries and (fmt == "coordinate" or symmetry == "general"):
        raise MatrixMarketError(path, f"file ends after {count} of {entries} entries", line=last + 1)


def _header(path: Path):
    if not path.is_file():
        raise FileNotFoundError(f"{path}: no such file")
    try:
        return scipy.io.mminfo(str(path))
    except OSError as e:
        raise OSError(f"{path}: {e}") from e
    except Exception as e:
        raise MatrixMarketError(path, f"invalid Matrix Market header: {e}", line=1) from e


def _read(path: Path, info):
    _check_entries(path, *info)
    try:
        return scipy.io.mmread(str(path))
    except OSError as e:
        raise OSError(f"{path}: {e}") from e
    except Exception as e:
        found = _LINE_IN_MESSAGE.search(str(e))
        raise MatrixMarketError(path, f"cannot parse entries: {e}",
                                line=int(found.group(1)) if found else None) from e


def read_matrix_market(path: PathLike, pattern_as_ones: bool = False) -> SparseMatrix:
    """
    Read a real Matrix Market matrix (coordinate or array format).

    Symmetric files are expanded to the full pattern; duplicate coordinate
    entries are summed.

    Args:
        path: File to read
        pattern_as_ones: Accept pattern-only files, giving every entry the value 1

    Returns:
        Canonical CSR matrix
    """
    path = Path(path)
    info = _header(path)
    rows, cols, entries, fmt, field, symmetry = info
    if field == "complex":
        raise MatrixMarketError(path, "complex matrices are not supported", line=1)
    if field == "pattern" and not pattern_as_ones:
        raise MatrixMarketError(path, "pattern-only matrix; pass pattern_as_ones to read it "
                                      "with unit values", line=1)
    data = _read(path, info)
    if sp.issparse(data):
        coo = sp.coo_matrix(data)
        matrix = triplets_to_csr(TripletList(coo.row, coo.col, coo.data, coo.shape))
    else:
        matrix = SparseMatrix.from_dense(np.asarray(data, dtype=np.float64))
    logger.info("read %s: %dx%d, %d nonzeros (%s, %s)", path, matrix.n_rows, matrix.n_cols,
                matrix.nnz, fmt, symmetry)
    return matrix


def write_matrix_market(A: SparseMatrix, path: PathLike, comment: str = "") -> None:
    """
    Write a matrix in coordinate format with full precision.

    Explicitly stored zeros are written as entries so the pattern survives.
    """
    path = Path(path)
    try:
        with open(path, "wb") as f:
            scipy.io.mmwrite(f, sp.coo_matrix(A.to_scipy()), comment=comment,
                             field="real", precision=PRECISION, symmetry="general")
    except OSError as e:
        raise OSError(f"{path}: {e}") from e


def read_vector(path: PathLike) -> np.ndarray:
    """Read a Matrix Market array (or single-column coordinate) file as a vector."""
    path = Path(path)
    info = _header(path)
    rows, cols, entries, fmt, field, symmetry = info
    if field == "complex":
        raise MatrixMarketError(path, "complex vectors are not supported", line=1)
    if min(rows, cols) != 1 and rows * cols != 0:
        raise MatrixMarketError(path, f"expected a single column, got shape {rows}x{cols}", line=1)
    if rows * cols == 0:
        raise EmptyVectorError(path)
    data = _read(path, info)
    if sp.issparse(data):
        data = data.toarray()
    return as_vector(np.asarray(data, dtype=np.float64))


def write_vector(path: PathLike, values) -> None:
    """Write a vector as a Matrix Market array file with full precision."""
    path = Path(path)
    values = as_vector(values)
    if values.shape[0] == 0:
        raise EmptyVectorError(path)
    try:
        with open(path, "wb") as f:
            scipy.io.mmwrite(f, values.reshape(-1, 1), field="real", precision=PRECISION)
    except OSError as e:
        raise OSError(f"{path}: {e}") from e
