import numpy as np
import pytest

from hsmatch.codec.aux import AuxPayload, deserialize_aux, serialize_aux
from hsmatch.codec.bitstream import BitReader, signed_width
from hsmatch.errors import CorruptAux
from hsmatch.histogram import PEHistogram
from hsmatch.planner import ShiftPlan, check_plan, traditional_plan

from oracles import SAMPLE_COUNTS, SAMPLE_LEVELS, random_location_map, random_plan


def strip(plan):
    return ShiftPlan(plan.peaks, plan.g0, plan.g1, plan.f, plan.T)


def test_header_only():
    aux = AuxPayload(ShiftPlan((0,), (0,), (1,), (), 1))
    bits = serialize_aux(aux)
    back, n = deserialize_aux(bits)
    assert back == aux and n == len(bits)
    # magic, unit, T, m, length, 1 peak, 2 deltas, count, map pairs, reserved, crc
    assert len(bits) == 4 + 4 + 4 + 4 + 24 + 9 + 2 + 2 + 9 + 8 + 16 + 16


def test_header_fields_are_msb_first():
    aux = AuxPayload(ShiftPlan((3,), (3,), (2,), (), 1), payload_length=5, layer_index=9)
    r = BitReader(serialize_aux(aux))
    assert [r.uint(4), r.uint(4), r.uint(4), r.uint(4), r.uint(24)] == [0b1010, 9, 1, 1, 5]
    assert r.sint(9) == 3


def test_two_peak_deltas_collapse():
    plan = strip(traditional_plan(PEHistogram.from_counts(SAMPLE_COUNTS, SAMPLE_LEVELS), (0, 1)))
    deltas = [t - y for y, t in plan.f]
    assert deltas == [-1, -1, -1, 1, 1, 1]
    aux = AuxPayload(plan)
    bits = serialize_aux(aux)
    assert deserialize_aux(bits)[0] == aux
    # after the fixed header and the sorted-domain block the f block is two (value, run) pairs
    w = signed_width(1)
    head = 40 + 2 * 9 + 2 * 2 * w + 9 + 9
    r = BitReader(bits[head:])
    r.expgolomb(); r.varint()   # gap 1 x 2  (-3, -2, -1)
    r.expgolomb(); r.varint()   # gap 3 x 1  (-1 -> 2)
    r.expgolomb(); r.varint()   # gap 1 x 2  (2, 3, 4)
    assert (r.sint(w), r.varint(), r.sint(w), r.varint()) == (-1, 3, 1, 3)


def test_random_roundtrip(rng):
    for _ in range(300):
        plan = random_plan(rng)
        check_plan(plan, levels=256)
        aux = AuxPayload(plan, random_location_map(rng, plan.T), int(rng.integers(0, 2 ** 16)),
                         int(rng.integers(0, 2 ** 24)), int(rng.integers(0, 16)))
        bits = serialize_aux(aux)
        tail = rng.integers(0, 2, 50).tolist()
        back, n = deserialize_aux(bits + tail)
        assert back == aux and n == len(bits)


def test_key_seeded_crc_rejects_other_seed():
    bits = serialize_aux(AuxPayload(ShiftPlan((0,), (0,), (1,), (), 1)), crc_init=0x1234)
    deserialize_aux(bits, crc_init=0x1234)
    with pytest.raises(CorruptAux):
        deserialize_aux(bits, crc_init=0x1235)


def test_single_flips_detected(rng):
    for _ in range(200):
        plan = random_plan(rng, max_bins=12)
        aux = AuxPayload(plan, random_location_map(rng, plan.T, 10), 256, 100, 3)
        bits = serialize_aux(aux)
        i = int(rng.integers(0, len(bits)))
        bits[i] ^= 1
        with pytest.raises(CorruptAux):
            deserialize_aux(bits)


def test_bad_magic():
    bits = serialize_aux(AuxPayload(ShiftPlan((0,), (0,), (1,), (), 1)))
    bits[0] ^= 1
    with pytest.raises(CorruptAux, match="magic"):
        deserialize_aux(bits)


def test_truncated():
    bits = serialize_aux(AuxPayload(ShiftPlan((0,), (0,), (1,), (), 1)))
    with pytest.raises(CorruptAux):
        deserialize_aux(bits[:-3])


def test_rejects_out_of_range_fields():
    with pytest.raises(ValueError):
        serialize_aux(AuxPayload(ShiftPlan((0,), (0,), (1,), (), 1), layer_index=16))
