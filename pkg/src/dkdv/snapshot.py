"""DKDV1 binary snapshots.

Layout (little-endian): magic ``b"DKDV1\\0"``, u64 N, f64 period, f64 time,
then N (f64 re, f64 im) pairs in FFT mode order 0, 1, ..., N/2, -N/2+1, ..., -1.
"""
import os
import struct
import tempfile

import numpy as np

from .spectral import PeriodicGrid, SpectralField

MAGIC = b"DKDV1\x00"
_HEADER = struct.Struct("<Qdd")
HEADER_SIZE = len(MAGIC) + _HEADER.size


class SnapshotFormatError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


def encode_snapshot(field, time=0.0):
    grid = field.grid
    header = MAGIC + _HEADER.pack(grid.n_modes, grid.period, float(time))
    return header + np.ascontiguousarray(field.coeffs, dtype="<c16").tobytes()


def decode_snapshot(data):
    """Parse DKDV1 bytes into ``(field, time)``."""
    data = bytes(data)
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise SnapshotFormatError("bad magic", 0)
    if len(data) < HEADER_SIZE:
        raise SnapshotFormatError("truncated header", len(data))
    n, period, time = _HEADER.unpack_from(data, len(MAGIC))
    if n < 4 or n % 2:
        raise SnapshotFormatError(f"mode count {n} is not an even integer >= 4", len(MAGIC))
    if not np.isfinite(period) or period <= 0:
        raise SnapshotFormatError(f"period {period!r} is not positive", len(MAGIC) + 8)
    if not np.isfinite(time):
        raise SnapshotFormatError(f"time stamp {time!r} is not finite", len(MAGIC) + 16)
    expected = HEADER_SIZE + 16 * n
    if len(data) < expected:
        raise SnapshotFormatError(f"truncated payload: expected {expected} bytes, got {len(data)}", len(data))
    if len(data) > expected:
        raise SnapshotFormatError("trailing bytes after payload", expected)
    coeffs = np.frombuffer(data, dtype="<c16", count=n, offset=HEADER_SIZE).astype(complex)
    return SpectralField(PeriodicGrid(period, n), coeffs), time


def atomic_write_bytes(path, payload):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_snapshot(field, path, time=0.0):
    atomic_write_bytes(path, encode_snapshot(field, time))


def load_snapshot(path):
    with open(path, "rb") as fh:
        return decode_snapshot(fh.read())
