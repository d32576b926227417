import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsmatch.codec.bitstream import (BitReader, BitWriter, bits_to_bytes, bytes_to_bits, crc16, rle_pairs,
                                     signed_width)
from hsmatch.errors import CorruptAux


@given(st.lists(st.tuples(st.sampled_from(["u", "s", "v", "g"]), st.integers(0, 2 ** 20)), max_size=30))
def test_mixed_roundtrip(items):
    w = BitWriter()
    want = []
    for kind, v in items:
        if kind == "u":
            w.uint(v, 21)
        elif kind == "s":
            v -= 2 ** 19
            w.sint(v, 21)
        elif kind == "v":
            w.varint(v)
        else:
            v &= 0xFFFF  # the reader caps the prefix at 16 zeros
            w.expgolomb(v)
        want.append(v)
    r = BitReader(w.bits)
    got = []
    for kind, _ in items:
        got.append({"u": lambda: r.uint(21), "s": lambda: r.sint(21), "v": r.varint, "g": r.expgolomb}[kind]())
    assert got == want and r.remaining() == 0


def test_varint_layout():
    w = BitWriter()
    w.varint(5)
    assert w.bits == [0, 0, 0, 0, 0, 1, 0, 1]
    w = BitWriter()
    w.varint(200)  # 1|0000001  0|1001000
    assert w.bits == [1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0]


def test_signed_width():
    assert [signed_width(T) for T in (1, 2, 3, 4, 7, 8)] == [2, 3, 3, 4, 4, 5]


def test_range_checks():
    with pytest.raises(ValueError):
        BitWriter().uint(16, 4)
    with pytest.raises(ValueError):
        BitWriter().sint(-3, 2)


def test_reading_past_end():
    with pytest.raises(CorruptAux):
        BitReader([1, 0]).uint(3)


def test_rle_pairs():
    assert rle_pairs([1, 1, -1, -1, -1, 0]) == [(1, 2), (-1, 3), (0, 1)]
    assert rle_pairs([]) == []


def test_crc_known_value():
    # CRC-16/CCITT-FALSE check value
    assert crc16(bytes_to_bits(b"123456789"), 0xFFFF) == 0x29B1


def test_bytes_bits():
    assert bits_to_bytes(bytes_to_bits(b"\x00\xa5")) == b"\x00\xa5"
    assert bytes_to_bits(b"\x80").tolist() == [1, 0, 0, 0, 0, 0, 0, 0]
