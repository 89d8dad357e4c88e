"""Snapshot matrices, window views and file I/O.

A snapshot matrix stores the time series ``x_1, ..., x_L`` as the columns of
an ``N x L`` array. All user-facing indices are 1-based: ``column(1)`` is the
first snapshot and ``window(m, WindowSpec(start=2, width=3))`` holds
``x_2, x_3, x_4``.

Two on-disk formats are supported:

``csv``
    One matrix row per line, comma separated, no header.
``gdmd``
    Binary: magic ``b"GDMD"``, ``u32`` version (1), ``u64`` N, ``u64`` L,
    followed by ``N*L`` float64 values in column-major order. Every field is
    little-endian.
"""
from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import BoundsError, MatrixIOError, ParseError, ValidationError

__all__ = [
    "SnapshotMatrix",
    "WindowSpec",
    "window",
    "load_matrix",
    "save_matrix",
    "format_float",
    "infer_format",
    "write_text",
]

PathLike = Union[str, os.PathLike]

MAGIC = b"GDMD"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")
FORMATS = ("csv", "gdmd")


class SnapshotMatrix:
    """Immutable ``N x L`` matrix whose columns are snapshots.

    Parameters
    ----------
    data : array_like
        Real 2-D array. It is converted to float64 and marked read-only; no
        copy is made when the input already is a float64 array, so window
        views share memory with their parent.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValidationError(f"snapshot matrix must be 2-D, got shape {arr.shape}")
        n_rows, n_cols = arr.shape
        if n_rows < 1:
            raise ValidationError("snapshot matrix needs at least one row (N >= 1)")
        if n_cols < 2:
            raise ValidationError(f"snapshot matrix needs at least two snapshots (L >= 2), got L={n_cols}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValidationError(
                f"non-finite entry {arr[bad[0], bad[1]]!r} at row {bad[0] + 1}, column {bad[1] + 1}"
            )
        if arr.flags.writeable:
            arr = arr.view()
            arr.flags.writeable = False
        self._data = arr

    @classmethod
    def _view(cls, arr: np.ndarray) -> "SnapshotMatrix":
        # windows of an already validated matrix skip the finiteness scan
        obj = cls.__new__(cls)
        obj._data = arr
        return obj

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def N(self) -> int:
        return self._data.shape[0]

    @property
    def L(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self):
        return self._data.shape

    def column(self, t: int) -> np.ndarray:
        """Return snapshot ``x_t`` (1-based)."""
        if not 1 <= t <= self.L:
            raise BoundsError(f"snapshot index {t} outside 1..{self.L}")
        return self._data[:, t - 1]

    def window(self, start: int, width: int) -> "SnapshotMatrix":
        return window(self, WindowSpec(start, width))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SnapshotMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    __hash__ = None

    def __repr__(self):
        return f"SnapshotMatrix(N={self.N}, L={self.L})"


@dataclass(frozen=True)
class WindowSpec:
    """Column range ``start .. start+width-1`` (1-based, inclusive)."""

    start: int
    width: int

    def __post_init__(self):
        if self.start < 1:
            raise BoundsError(f"window start must be >= 1, got {self.start}")
        if self.width < 1:
            raise BoundsError(f"window width must be >= 1, got {self.width}")

    @property
    def stop(self) -> int:
        """Last column index included in the window (1-based)."""
        return self.start + self.width - 1


def window(m: SnapshotMatrix, w: WindowSpec) -> SnapshotMatrix:
    """View of columns ``w.start .. w.stop`` of `m`.

    A width-1 window is returned as a bare view as well; it only violates the
    ``L >= 2`` invariant of loaded matrices, which windows are exempt from.
    """
    if w.stop > m.L:
        raise BoundsError(f"window [{w.start}, {w.stop}] exceeds L={m.L}")
    return SnapshotMatrix._view(m.data[:, w.start - 1 : w.stop])


def infer_format(path: PathLike, fmt: str | None = None) -> str:
    if fmt is not None:
        if fmt not in FORMATS:
            raise ValidationError(f"unknown matrix format {fmt!r}; expected one of {FORMATS}")
        return fmt
    return "csv" if str(path).lower().endswith(".csv") else "gdmd"


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips to `x`.

    Integral values are written without a trailing ``.0`` (``1`` not ``1.0``).
    """
    x = float(x)
    if x == 0.0:
        return "-0" if math.copysign(1.0, x) < 0 else "0"
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _parse_csv(text: str, path) -> np.ndarray:
    rows = []
    width = None
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(f"expected {width} fields, found {len(fields)}", path, row=i)
        values = []
        for j, field in enumerate(fields, start=1):
            try:
                values.append(float(field))
            except ValueError:
                raise ParseError(f"cannot parse {field.strip()!r} as a number", path, row=i, column=j) from None
        rows.append(values)
    if not rows:
        raise ParseError("file contains no data", path)
    return np.array(rows, dtype=np.float64)


def _parse_gdmd(raw: bytes, path) -> np.ndarray:
    if len(raw) < _HEADER.size:
        raise ParseError(f"truncated header ({len(raw)} bytes)", path)
    magic, version, n_rows, n_cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}", path)
    if version != VERSION:
        raise ParseError(f"unsupported version {version}", path)
    expected = _HEADER.size + 8 * n_rows * n_cols
    if len(raw) != expected:
        raise ParseError(f"payload size {len(raw)} bytes, expected {expected} for {n_rows}x{n_cols}", path)
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return flat.reshape((n_rows, n_cols), order="F").astype(np.float64)


def read_array(path: PathLike, fmt: str | None = None) -> np.ndarray:
    """Read a raw 2-D float64 array (no snapshot invariants applied)."""
    fmt = infer_format(path, fmt)
    try:
        if fmt == "csv":
            with open(path, "r", encoding="utf-8") as fh:
                return _parse_csv(fh.read(), path)
        with open(path, "rb") as fh:
            return _parse_gdmd(fh.read(), path)
    except OSError as exc:
        raise MatrixIOError(f"{path}: {exc.strerror or exc}") from exc


def write_array(arr: np.ndarray, path: PathLike, fmt: str | None = None) -> None:
    """Write a raw 2-D float64 array in the requested format."""
    fmt = infer_format(path, fmt)
    arr = np.asarray(arr, dtype=np.float64)
    if fmt == "csv":
        payload = "".join(",".join(format_float(v) for v in row) + "\n" for row in arr).encode("utf-8")
    else:
        header = _HEADER.pack(MAGIC, VERSION, arr.shape[0], arr.shape[1])
        payload = header + arr.astype("<f8").tobytes(order="F")
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise MatrixIOError(f"{path}: {exc.strerror or exc}") from exc


def load_matrix(path: PathLike, format: str | None = None) -> SnapshotMatrix:
    """Load a snapshot matrix from `path`.

    Parameters
    ----------
    path : str or path-like
    format : {"csv", "gdmd"}, optional
        Defaults to ``csv`` for ``*.csv`` files and ``gdmd`` otherwise.

    Raises
    ------
    ParseError
        Malformed file; the message carries the row/column location.
    ValidationError
        Non-finite entries or fewer than two snapshots.
    MatrixIOError
        The file cannot be opened.
    """
    return SnapshotMatrix(read_array(path, format))


def save_matrix(m: SnapshotMatrix, path: PathLike, format: str | None = None) -> None:
    """Write `m` to `path`. Binary output is byte-deterministic."""
    write_array(np.asarray(m), Path(path), format)


def write_text(text: str, dest) -> None:
    """Write `text` to a path or to an open text stream."""
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")
