"""Frame-level log-probability matrices and the CTCM v1 file format.

CTCM v1 layout, little-endian::

    b"CTCM"  u32 version=1  u32 T  u32 V  u32 blank_id  f32 frame_duration_s
    T*V float32, row-major
"""
from __future__ import annotations

import struct
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..errors import PodcorpusError

MAGIC = b"CTCM"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIf")

NONPOSITIVE_TOL = 1e-4
ROW_NORM_TOL = 1e-3
_VALIDATE_CHUNK = 4096


class MatrixError(PodcorpusError):
    pass


class InvalidMatrix(MatrixError):
    pass


class IncompatibleParts(MatrixError):
    pass


class CtcmFormatError(MatrixError):
    pass


class LogProbMatrix:
    """``T x V`` natural-log probabilities with a designated blank column.

    Values are held as C-contiguous float32, and ``frame_duration_s`` is
    rounded to float32 too so in-memory and file-loaded matrices agree. With
    ``validate=True`` every row must be log-softmax normalised (within
    ``ROW_NORM_TOL``).
    """

    __slots__ = ("values", "blank_id", "frame_duration_s")

    def __init__(self, values, blank_id: int, frame_duration_s: float, validate: bool = True):
        values = np.ascontiguousarray(values, dtype=np.float32)
        if values.ndim != 2:
            raise InvalidMatrix(f"expected a 2-D array, got shape {values.shape}")
        T, V = values.shape
        if T < 1 or V < 2:
            raise InvalidMatrix(f"need T >= 1 and V >= 2, got T={T}, V={V}")
        if not 0 <= blank_id < V:
            raise InvalidMatrix(f"blank_id {blank_id} outside [0, {V})")
        if not frame_duration_s > 0:
            raise InvalidMatrix(f"frame_duration_s must be positive, got {frame_duration_s}")
        self.values = values
        self.blank_id = int(blank_id)
        self.frame_duration_s = float(np.float32(frame_duration_s))
        if validate:
            self.validate()

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.values.shape[1]

    @property
    def duration_s(self) -> float:
        return self.frames * self.frame_duration_s

    def validate(self) -> None:
        for offset in range(0, self.frames, _VALIDATE_CHUNK):
            v = self.values[offset : offset + _VALIDATE_CHUNK].astype(np.float64)
            if np.isnan(v).any() or np.isposinf(v).any():
                raise InvalidMatrix("matrix contains NaN or +inf")
            worst = v.max()
            if worst > NONPOSITIVE_TOL:
                raise InvalidMatrix(f"log-probability {worst} > 0")
            top = v.max(axis=1, keepdims=True)
            with np.errstate(invalid="ignore"):
                lse = (top + np.log(np.exp(v - top).sum(axis=1, keepdims=True))).ravel()
            bad = np.flatnonzero(~(np.abs(lse) <= ROW_NORM_TOL))
            if bad.size:
                t = int(bad[0])
                raise InvalidMatrix(f"row {offset + t} log-sum-exp is {lse[t]:.6g}, not 0")

    def __eq__(self, other):
        if not isinstance(other, LogProbMatrix):
            return NotImplemented
        return (
            self.blank_id == other.blank_id
            and self.frame_duration_s == other.frame_duration_s
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return (
            f"LogProbMatrix(T={self.frames}, V={self.vocab_size}, "
            f"blank_id={self.blank_id}, frame_duration_s={self.frame_duration_s})"
        )


def stitch(parts: Sequence[LogProbMatrix]) -> LogProbMatrix:
    """Concatenate chunked exports frame-wise."""
    if not parts:
        raise IncompatibleParts("no parts to stitch")
    first = parts[0]
    if len(parts) == 1:
        return first
    for i, p in enumerate(parts[1:], 1):
        if (p.vocab_size, p.blank_id, p.frame_duration_s) != (
            first.vocab_size,
            first.blank_id,
            first.frame_duration_s,
        ):
            raise IncompatibleParts(
                f"part {i} has V={p.vocab_size}, blank_id={p.blank_id}, "
                f"frame_duration_s={p.frame_duration_s}; part 0 has V={first.vocab_size}, "
                f"blank_id={first.blank_id}, frame_duration_s={first.frame_duration_s}"
            )
    values = np.concatenate([p.values for p in parts], axis=0)
    return LogProbMatrix(values, first.blank_id, first.frame_duration_s, validate=False)


def write_ctcm(m: LogProbMatrix, path: str | Path) -> None:
    header = _HEADER.pack(MAGIC, VERSION, m.frames, m.vocab_size, m.blank_id, m.frame_duration_s)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(m.values.astype("<f4", copy=False).tobytes(order="C"))


def read_ctcm(path: str | Path, validate: bool = True) -> LogProbMatrix:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise CtcmFormatError(f"{path}: truncated header")
        magic, version, T, V, blank_id, frame_duration_s = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise CtcmFormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise CtcmFormatError(f"{path}: unsupported CTCM version {version}")
        payload = fh.read()
    if len(payload) != T * V * 4:
        raise CtcmFormatError(f"{path}: expected {T * V * 4} payload bytes, found {len(payload)}")
    values = np.frombuffer(payload, dtype="<f4").reshape(T, V)
    return LogProbMatrix(values, blank_id, frame_duration_s, validate=validate)
