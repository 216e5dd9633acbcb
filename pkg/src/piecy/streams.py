"""Point-stream file formats and one-pass readers.

Two formats are supported:

* ``csv``  — one point per line, comma-separated decimal fields. The
  weighted variant puts an integer weight in the leading column.
* ``bin``  — magic ``SCPT``, little-endian u32 version (currently 1),
  little-endian u32 dimension, then one record per point: d little-endian
  float64 coordinates. The weighted variant prefixes each record with a
  little-endian u64 weight.

Binary round-trips are bitwise exact. Readers stream in bounded memory and
report the first malformed position (1-based line for csv, byte offset for
bin).
"""

import struct
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

MAGIC = b"SCPT"
VERSION = 1
FORMATS = ("csv", "bin")

_HEADER = struct.Struct("<4sII")


class StreamFormatError(ValueError):
    """Malformed stream file; the message names the offending position."""


def _format_float(v: float) -> str:
    return repr(float(v))


# -- writers ---------------------------------------------------------------

def write_csv(path, rows: Iterable, *, weighted: bool = False) -> int:
    """Write points (or ``(point, weight)`` pairs when weighted) as csv.

    Returns the number of points written.
    """
    count = 0
    with open(path, "w", encoding="ascii") as fh:
        for item in rows:
            if weighted:
                point, weight = item
                fh.write(str(int(weight)))
                fh.write(",")
            else:
                point = item
            fh.write(",".join(_format_float(v) for v in point))
            fh.write("\n")
            count += 1
    return count


def write_bin(path, rows: Iterable, dim: int, *, weighted: bool = False) -> int:
    """Write points (or ``(point, weight)`` pairs) in the binary format."""
    count = 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim))
        for item in rows:
            if weighted:
                point, weight = item
                fh.write(struct.pack("<Q", int(weight)))
            else:
                point = item
            arr = np.ascontiguousarray(point, dtype="<f8")
            if arr.shape != (dim,):
                raise ValueError(f"point of dimension {arr.shape} does not match d={dim}")
            fh.write(arr.tobytes())
            count += 1
    return count


def write_stream(path, rows: Iterable, dim: int, fmt: str, *,
                 weighted: bool = False) -> int:
    if fmt == "csv":
        return write_csv(path, rows, weighted=weighted)
    if fmt == "bin":
        return write_bin(path, rows, dim, weighted=weighted)
    raise ValueError(f"unknown format {fmt!r}")


# -- readers ---------------------------------------------------------------

@dataclass
class PointSource:
    """A re-iterable reader: ``dim`` is known up front (None for an empty
    csv file) and each ``__iter__`` opens a fresh one-pass scan."""

    path: str
    fmt: str
    weighted: bool = False
    dim: int | None = None

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise StreamFormatError(f"unknown format {self.fmt!r}")
        self.dim = _probe_dim(self.path, self.fmt, self.weighted)

    def __iter__(self) -> Iterator:
        if self.fmt == "csv":
            return _read_csv(self.path, self.weighted)
        return _read_bin(self.path, self.weighted)

    def points(self) -> Iterator[np.ndarray]:
        """Iterate coordinates only, dropping weights if present."""
        if not self.weighted:
            return iter(self)
        return (point for point, _ in self)


def _probe_dim(path, fmt: str, weighted: bool):
    if fmt == "bin":
        with open(path, "rb") as fh:
            header = fh.read(_HEADER.size)
        if len(header) == 0:
            return None
        if len(header) < _HEADER.size:
            raise StreamFormatError(
                f"{path}: truncated header at byte {len(header)}")
        magic, version, dim = _HEADER.unpack(header)
        if magic != MAGIC:
            raise StreamFormatError(f"{path}: bad magic at byte 0")
        if version != VERSION:
            raise StreamFormatError(f"{path}: unsupported version {version}")
        if dim < 1:
            raise StreamFormatError(f"{path}: dimension {dim} in header")
        return dim
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            if not line.strip():
                continue
            fields = line.rstrip("\n").split(",")
            dim = len(fields) - (1 if weighted else 0)
            if dim < 1:
                raise StreamFormatError(f"{path}: line 1: no coordinates")
            return dim
    return None


def _read_csv(path, weighted: bool):
    dim = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split(",")
            try:
                if weighted:
                    weight = int(fields[0])
                    coords = np.array([float(f) for f in fields[1:]])
                else:
                    coords = np.array([float(f) for f in fields])
            except (ValueError, IndexError) as exc:
                raise StreamFormatError(f"{path}: line {lineno}: {exc}") from exc
            if dim is None:
                dim = coords.shape[0]
            elif coords.shape[0] != dim:
                raise StreamFormatError(
                    f"{path}: line {lineno}: expected {dim} coordinates, "
                    f"got {coords.shape[0]}")
            if weighted:
                if weight < 1:
                    raise StreamFormatError(
                        f"{path}: line {lineno}: weight must be >= 1")
                yield coords, weight
            else:
                yield coords


def _read_bin(path, weighted: bool, block_bytes: int = 1 << 20):
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) == 0:
            return
        if len(header) < _HEADER.size:
            raise StreamFormatError(f"{path}: truncated header at byte {len(header)}")
        magic, version, dim = _HEADER.unpack(header)
        if magic != MAGIC:
            raise StreamFormatError(f"{path}: bad magic at byte 0")
        if version != VERSION:
            raise StreamFormatError(f"{path}: unsupported version {version}")
        if weighted:
            rec_size = 8 + 8 * dim
            rec = np.dtype([("w", "<u8"), ("x", "<f8", (dim,))])
        else:
            rec_size = 8 * dim
        # constant-bounded read buffer, framing only
        block_records = max(1, block_bytes // rec_size)
        offset = _HEADER.size
        while True:
            raw = fh.read(rec_size * block_records)
            if not raw:
                return
            if len(raw) % rec_size:
                raise StreamFormatError(
                    f"{path}: truncated record at byte "
                    f"{offset + len(raw) - (len(raw) % rec_size)}")
            if weighted:
                block = np.frombuffer(raw, dtype=rec)
                coords = block["x"]
                ws = block["w"]
                for i in range(block.shape[0]):
                    yield coords[i], int(ws[i])
            else:
                block = np.frombuffer(raw, dtype="<f8").reshape(-1, dim)
                for i in range(block.shape[0]):
                    yield block[i]
            offset += len(raw)
