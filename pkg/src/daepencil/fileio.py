"""File formats: Matrix Market matrices, plain vectors, trajectory CSV.

The Matrix Market reader accepts the dense `array` and sparse `coordinate`
variants for real general matrices and reports malformed input with 1-based
line numbers.  All writers serialize floats with 17 significant digits so a
write/parse round trip reproduces every double exactly.
"""

from __future__ import annotations

import numpy as np

from .exceptions import MatrixMarketError

__all__ = [
    "parse_matrix_market",
    "write_matrix_market",
    "read_vector",
    "write_vector",
    "write_trajectory_csv",
]

_HEADER_PREFIX = "%%matrixmarket"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _data_lines(lines):
    """Yield (line_number, stripped_text) skipping comments and blanks."""
    for idx, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        yield idx, text


def parse_matrix_market(path) -> np.ndarray:
    """Read a square real general matrix in array or coordinate format."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    if not lines:
        raise MatrixMarketError("empty file", path=path, line=1)

    header = lines[0].strip().lower().split()
    if len(header) != 5 or header[0] != _HEADER_PREFIX or header[1] != "matrix":
        raise MatrixMarketError(
            "expected header '%%MatrixMarket matrix <format> real general'",
            path=path,
            line=1,
        )
    fmt, field_kind, symmetry = header[2], header[3], header[4]
    if fmt not in ("array", "coordinate"):
        raise MatrixMarketError(f"unsupported format {fmt!r}", path=path, line=1)
    if field_kind != "real":
        raise MatrixMarketError(f"unsupported field {field_kind!r}", path=path, line=1)
    if symmetry != "general":
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", path=path, line=1)

    entries = _data_lines(lines[1:])
    try:
        size_line_no, size_text = next(entries)
    except StopIteration:
        raise MatrixMarketError("missing size line", path=path, line=len(lines)) from None
    size_line_no += 1  # offset for the header line
    parts = size_text.split()

    if fmt == "array":
        if len(parts) != 2:
            raise MatrixMarketError(
                "array size line must be 'rows cols'", path=path, line=size_line_no
            )
        rows, cols = _parse_dims(parts, path, size_line_no)
        values = np.empty(rows * cols)
        count = 0
        last_line = size_line_no
        for line_no, text in entries:
            line_no += 1
            for token in text.split():
                if count >= rows * cols:
                    raise MatrixMarketError(
                        f"more than {rows * cols} entries", path=path, line=line_no
                    )
                values[count] = _parse_value(token, path, line_no)
                count += 1
            last_line = line_no
        if count < rows * cols:
            raise MatrixMarketError(
                f"expected {rows * cols} entries, found {count}",
                path=path,
                line=last_line,
            )
        matrix = values.reshape((cols, rows)).T  # array format is column-major
    else:
        if len(parts) != 3:
            raise MatrixMarketError(
                "coordinate size line must be 'rows cols nnz'",
                path=path,
                line=size_line_no,
            )
        rows, cols = _parse_dims(parts[:2], path, size_line_no)
        try:
            nnz = int(parts[2])
        except ValueError:
            raise MatrixMarketError(
                f"bad entry count {parts[2]!r}", path=path, line=size_line_no
            ) from None
        matrix = np.zeros((rows, cols))
        seen = set()
        count = 0
        last_line = size_line_no
        for line_no, text in entries:
            line_no += 1
            fields = text.split()
            if len(fields) != 3:
                raise MatrixMarketError(
                    "coordinate entries must be 'row col value'", path=path, line=line_no
                )
            try:
                i, j = int(fields[0]), int(fields[1])
            except ValueError:
                raise MatrixMarketError(
                    f"bad coordinates {fields[0]!r} {fields[1]!r}", path=path, line=line_no
                ) from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(
                    f"coordinates ({i}, {j}) outside {rows} x {cols}",
                    path=path,
                    line=line_no,
                )
            if (i, j) in seen:
                raise MatrixMarketError(
                    f"duplicate entry for ({i}, {j})", path=path, line=line_no
                )
            seen.add((i, j))
            matrix[i - 1, j - 1] = _parse_value(fields[2], path, line_no)
            count += 1
            last_line = line_no
        if count != nnz:
            raise MatrixMarketError(
                f"declared {nnz} entries, found {count}", path=path, line=last_line
            )

    if rows != cols:
        raise MatrixMarketError(f"matrix is {rows} x {cols}, expected square", path=path)
    return matrix


def _parse_dims(parts, path, line_no):
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise MatrixMarketError(
            f"bad dimensions {' '.join(parts)!r}", path=path, line=line_no
        ) from None
    if rows < 1 or cols < 1:
        raise MatrixMarketError(f"dimensions must be positive", path=path, line=line_no)
    return rows, cols


def _parse_value(token, path, line_no):
    try:
        return float(token)
    except ValueError:
        raise MatrixMarketError(
            f"non-numeric entry {token!r}", path=path, line=line_no
        ) from None


def write_matrix_market(path, matrix) -> None:
    """Write a real matrix in dense array format (column-major)."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={M.ndim}")
    rows, cols = M.shape
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{rows} {cols}\n")
        for j in range(cols):
            for i in range(rows):
                fh.write(_fmt(M[i, j]) + "\n")


def read_vector(path) -> np.ndarray:
    """Read a whitespace-separated vector of reals (any line layout)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    values = []
    for line_no, text in _data_lines(lines):
        for token in text.split():
            values.append(_parse_value(token, path, line_no))
    if not values:
        raise MatrixMarketError("no numeric entries found", path=path)
    return np.array(values)


def write_vector(path, vector) -> None:
    v = np.asarray(vector, dtype=float)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for x in v:
            fh.write(_fmt(x) + "\n")


def write_trajectory_csv(fh, trajectory) -> None:
    """Write `t,u_1,...,u_n,residual` rows to an open text stream.

    CSV output is real-only; complex arithmetic stays internal.
    """
    states = np.real_if_close(trajectory.states, tol=1000)
    if np.iscomplexobj(states):
        raise ValueError("trajectory states are complex; CSV output is real-only")
    n = states.shape[1]
    fh.write("t," + ",".join(f"u_{i + 1}" for i in range(n)) + ",residual\n")
    for t, state, res in zip(trajectory.times, states, trajectory.derivative_residuals):
        row = [_fmt(t)] + [_fmt(x) for x in state] + [_fmt(res)]
        fh.write(",".join(row) + "\n")
