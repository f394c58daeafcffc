"""LEB128 varints: unsigned, and zigzag-signed for arbitrary-size ints.

Encoders always emit the minimal form; decoders reject non-minimal input so
that canonical byte strings stay injective.
"""

from __future__ import annotations

from .errors import DecodeError


def append_uvarint(buf: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("uvarint requires a non-negative value")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


def append_svarint(buf: bytearray, value: int) -> None:
    zig = value << 1 if value >= 0 else ((-value) << 1) - 1
    append_uvarint(buf, zig)


def read_uvarint(data: bytes, pos: int) -> tuple[int, int]:
    """Return (value, new_pos); raise DecodeError on truncation or padding."""
    result = 0
    shift = 0
    start = pos
    while True:
        if pos >= len(data):
            raise DecodeError("truncated varint")
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            if byte == 0 and pos - start > 1:
                raise DecodeError("non-minimal varint")
            return result, pos
        shift += 7


def read_svarint(data: bytes, pos: int) -> tuple[int, int]:
    raw, pos = read_uvarint(data, pos)
    value = raw >> 1 if not raw & 1 else -((raw + 1) >> 1)
    return value, pos
