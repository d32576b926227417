"""Bit-level writer/reader plus the integer codes used by the aux record."""
from __future__ import annotations

import binascii

import numpy as np

from ..errors import CorruptAux


class BitWriter:
    def __init__(self):
        self.bits: list[int] = []

    def __len__(self):
        return len(self.bits)

    def uint(self, value: int, width: int):
        if value < 0 or value >= 1 << width:
            raise ValueError(f"{value} does not fit in {width} unsigned bits")
        self.bits.extend((value >> (width - 1 - i)) & 1 for i in range(width))

    def sint(self, value: int, width: int):
        """Two's complement."""
        if not -(1 << (width - 1)) <= value < 1 << (width - 1):
            raise ValueError(f"{value} does not fit in {width} signed bits")
        self.uint(value & ((1 << width) - 1), width)

    def varint(self, value: int):
        """8-bit chunks, most significant group first: continuation flag + 7 data bits."""
        if value < 0:
            raise ValueError("varint must be nonnegative")
        groups = [value & 0x7F]
        value >>= 7
        while value:
            groups.append(value & 0x7F)
            value >>= 7
        for i, g in enumerate(reversed(groups)):
            self.uint(1 if i < len(groups) - 1 else 0, 1)
            self.uint(g, 7)

    def expgolomb(self, value: int):
        """Order-0 Exp-Golomb code of a nonnegative integer."""
        if value < 0:
            raise ValueError("Exp-Golomb value must be nonnegative")
        v = value + 1
        n = v.bit_length()
        self.bits.extend([0] * (n - 1))
        self.uint(v, n)

    def extend(self, bits):
        self.bits.extend(int(b) for b in bits)

    def array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.uint8)


class BitReader:
    """Cursor over a bit sequence; reading past the end raises CorruptAux."""

    def __init__(self, bits):
        self.bits = np.asarray(bits, dtype=np.uint8)
        self.cursor = 0

    def remaining(self) -> int:
        return len(self.bits) - self.cursor

    def take(self, n: int) -> np.ndarray:
        if n > self.remaining():
            raise CorruptAux("aux record truncated")
        out = self.bits[self.cursor:self.cursor + n]
        self.cursor += n
        return out

    def uint(self, width: int) -> int:
        value = 0
        for b in self.take(width):
            value = (value << 1) | int(b)
        return value

    def sint(self, width: int) -> int:
        value = self.uint(width)
        return value - (1 << width) if value >> (width - 1) else value

    def varint(self, max_groups: int = 5) -> int:
        value = 0
        for _ in range(max_groups):
            more = self.uint(1)
            value = (value << 7) | self.uint(7)
            if not more:
                return value
        raise CorruptAux("varint too long")

    def expgolomb(self, max_zeros: int = 16) -> int:
        zeros = 0
        while self.uint(1) == 0:
            zeros += 1
            if zeros > max_zeros:
                raise CorruptAux("Exp-Golomb prefix too long")
        rest = self.uint(zeros) if zeros else 0
        return ((1 << zeros) | rest) - 1


def signed_width(T: int) -> int:
    """Bits for a signed value in [-T, T]: ceil(log2(2T + 1))."""
    return max(1, (2 * T).bit_length())


def rle_pairs(values) -> list[tuple[int, int]]:
    pairs = []
    for v in values:
        if pairs and pairs[-1][0] == v:
            pairs[-1] = (v, pairs[-1][1] + 1)
        else:
            pairs.append((v, 1))
    return pairs


def crc16(bits, init: int = 0xFFFF) -> int:
    """CRC-16/CCITT over the bit sequence, zero-padded to whole bytes."""
    packed = np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()
    return binascii.crc_hqx(packed, init)


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) % 8:
        raise ValueError("bit count is not a multiple of 8")
    return np.packbits(bits).tobytes()
