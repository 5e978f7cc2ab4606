"""Near-lossless correction of predicted bands.

Pixels whose relative reconstruction error exceeds the tolerance get a
transmitted integer offset. The corrected value aims at round(target *
(1 + tol)) when the prediction is low and round(target * (1 - tol)) when
it is high, so after compensation every flagged pixel sits within
tol * |target| + q_step/2 of the target. With tol = 0 and q_step = 1 the
mechanism is exactly lossless on integer bands.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptStreamError, DimensionError
from .rounding import round_half_away
from .wire import read_varint, write_varint, zigzag_decode, zigzag_encode


@dataclass
class CompensationConfig:
    lam: float = 0.0      # maximum acceptable relative reconstruction error
    q_step: int = 1       # quantization step applied to transmitted offsets
    enabled: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if not 1 <= self.q_step <= 32767:
            raise ValueError("q_step must be a positive integer below 32768")


@dataclass
class OffsetMap:
    """Sparse nonzero corrections, indices strictly increasing row-major."""

    indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    offsets: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.offsets = np.asarray(self.offsets, dtype=np.int64)
        if self.indices.shape != self.offsets.shape or self.indices.ndim != 1:
            raise DimensionError("indices and offsets must be matching 1-D arrays")
        if self.indices.size:
            if np.any(np.diff(self.indices) <= 0):
                raise DimensionError("offset indices must be strictly increasing")
            if np.any(self.offsets == 0):
                raise DimensionError("zero offsets must be dropped")

    def __len__(self) -> int:
        return int(self.indices.size)


def compute_offsets(
    target: np.ndarray, recon: np.ndarray, cfg: CompensationConfig
) -> OffsetMap:
    """Offsets for every pixel whose relative error exceeds cfg.lam."""
    target = np.asarray(target, dtype=np.int64)
    recon = np.asarray(recon, dtype=np.int64)
    if target.shape != recon.shape:
        raise DimensionError(f"shape mismatch {target.shape} vs {recon.shape}")

    t = target.ravel()
    r = recon.ravel()
    denom = np.maximum(np.abs(t), 1).astype(np.float64)
    violating = np.abs(t - r) / denom > cfg.lam

    aim = np.where(
        r < t,
        round_half_away(t * (1.0 + cfg.lam)),
        round_half_away(t * (1.0 - cfg.lam)),
    ).astype(np.int64)
    raw = aim - r
    offs = cfg.q_step * round_half_away(raw / cfg.q_step).astype(np.int64)

    keep = violating & (offs != 0)
    idx = np.nonzero(keep)[0]
    return OffsetMap(indices=idx, offsets=offs[idx])


def apply_offsets(recon: np.ndarray, off_map: OffsetMap) -> np.ndarray:
    """Add transmitted offsets at their pixel indices; other pixels unchanged."""
    recon = np.asarray(recon)
    out = recon.astype(np.int64).ravel().copy()
    if off_map.indices.size:
        if off_map.indices[-1] >= out.size or off_map.indices[0] < 0:
            raise CorruptStreamError(
                f"offset index {int(off_map.indices[-1])} outside band of {out.size} pixels"
            )
        out[off_map.indices] += off_map.offsets
    return out.reshape(recon.shape)


def offsets_to_bytes(off_map: OffsetMap) -> bytes:
    """Varint entry count, then per entry a varint index delta and a zigzag offset."""
    out = bytearray()
    write_varint(out, len(off_map))
    prev = 0
    for idx, off in zip(off_map.indices.tolist(), off_map.offsets.tolist()):
        write_varint(out, idx - prev)
        write_varint(out, zigzag_encode(off))
        prev = idx
    return bytes(out)


def offsets_from_bytes(blob: bytes) -> OffsetMap:
    count, offset = read_varint(blob, 0)
    indices = np.empty(count, dtype=np.int64)
    offsets = np.empty(count, dtype=np.int64)
    prev = 0
    for k in range(count):
        delta, offset = read_varint(blob, offset)
        zz, offset = read_varint(blob, offset)
        prev += delta
        indices[k] = prev
        offsets[k] = zigzag_decode(zz)
    if offset != len(blob):
        raise CorruptStreamError("trailing bytes after offset entries")
    try:
        return OffsetMap(indices=indices, offsets=offsets)
    except DimensionError as exc:
        raise CorruptStreamError(f"invalid offset map: {exc}") from exc
