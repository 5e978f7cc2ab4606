"""Low-level byte-stream primitives shared by the coded formats.

Unsigned LEB128 varints and zigzag mapping for signed values. Decoders
take (buffer, offset) and return (value, new_offset) so callers can walk
a stream without copying.
"""

from __future__ import annotations

from .errors import CorruptStreamError


def write_varint(out: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varint requires a non-negative value")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def read_varint(buf, offset: int) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if offset >= len(buf):
            raise CorruptStreamError("truncated varint")
        byte = buf[offset]
        offset += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, offset
        shift += 7
        if shift > 63:
            raise CorruptStreamError("varint too long")


def zigzag_encode(value: int) -> int:
    return -2 * value - 1 if value < 0 else 2 * value


def zigzag_decode(value: int) -> int:
    return (value >> 1) ^ -(value & 1)
