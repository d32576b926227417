"""Self-embedded side information for one embedding unit.

Bit layout, MSB first::

    magic 1010 | unit u4 | T u4 | m u4 | payload_length u24
    peaks: m x s9 | g0 deltas: m x sW | g1 deltas: m x sW
    |B\\P| u9 | first bin s9 | gap RLE | f-delta RLE
    location-map RLE | displaced LSB count u16 | CRC-16

W = ceil(log2(2T + 1)). RLE blocks are (value, run) pairs with runs as
8-bit-chunk varints. Gap values are Exp-Golomb coded (gap - 1); the gap and
f blocks stop once their known symbol count is reached, the location-map
block is prefixed by its pair count.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import CorruptAux, InvalidPlan
from ..planner import ShiftPlan, check_plan
from .bitstream import BitReader, BitWriter, crc16, rle_pairs, signed_width

MAGIC = 0b1010
MAX_UNITS = 16


@dataclass(frozen=True)
class AuxPayload:
    plan: ShiftPlan
    location_map: tuple = ()
    reserved_bits: int = 0
    payload_length: int = 0
    layer_index: int = 0


def _write_rle(w: BitWriter, pairs, width: int):
    for value, run in pairs:
        w.sint(value, width)
        w.varint(run)


def _read_rle(r: BitReader, total: int, width: int, T: int) -> list[int]:
    out: list[int] = []
    while len(out) < total:
        value = r.sint(width)
        run = r.varint()
        if abs(value) > T or run < 1 or len(out) + run > total:
            raise CorruptAux("bad RLE pair")
        out.extend([value] * run)
    return out


def serialize_aux(aux: AuxPayload, crc_init: int = 0xFFFF) -> list[int]:
    plan = aux.plan
    T, m = plan.T, len(plan.peaks)
    if not 1 <= T < 16 or not 1 <= m < 16:
        raise ValueError("T and m must lie in [1, 15]")
    if not 0 <= aux.layer_index < MAX_UNITS:
        raise ValueError("unit index must lie in [0, 15]")
    width = signed_width(T)
    w = BitWriter()
    w.uint(MAGIC, 4)
    w.uint(aux.layer_index, 4)
    w.uint(T, 4)
    w.uint(m, 4)
    w.uint(aux.payload_length, 24)
    for p in plan.peaks:
        w.sint(p, 9)
    for p, a in zip(plan.peaks, plan.g0):
        w.sint(a - p, width)
    for p, b in zip(plan.peaks, plan.g1):
        w.sint(b - p, width)
    src = [y for y, _ in plan.f]
    w.uint(len(src), 9)
    if src:
        w.sint(src[0], 9)
        gaps = [b - a for a, b in zip(src, src[1:])]
        for gap, run in rle_pairs(gaps):
            w.expgolomb(gap - 1)
            w.varint(run)
        _write_rle(w, rle_pairs([t - y for y, t in plan.f]), width)
    lm_pairs = rle_pairs(aux.location_map)
    w.varint(len(lm_pairs))
    _write_rle(w, lm_pairs, width)
    w.uint(aux.reserved_bits, 16)
    w.uint(crc16(w.bits, crc_init), 16)
    return w.bits


def deserialize_aux(bits, crc_init: int = 0xFFFF) -> tuple[AuxPayload, int]:
    """Parse one record from the front of ``bits``; returns it and its length in bits."""
    r = BitReader(bits)
    if r.uint(4) != MAGIC:
        raise CorruptAux("bad magic")
    unit = r.uint(4)
    T = r.uint(4)
    m = r.uint(4)
    if T == 0 or m == 0:
        raise CorruptAux("T and m must be positive")
    width = signed_width(T)
    payload_length = r.uint(24)
    peaks = tuple(r.sint(9) for _ in range(m))
    g0 = tuple(p + r.sint(width) for p in peaks)
    g1 = tuple(p + r.sint(width) for p in peaks)
    count = r.uint(9)
    f = ()
    if count:
        src = [r.sint(9)]
        while len(src) < count:
            gap = r.expgolomb() + 1
            run = r.varint()
            if run < 1 or len(src) + run > count:
                raise CorruptAux("bad gap run")
            for _ in range(run):
                src.append(src[-1] + gap)
        deltas = _read_rle(r, count, width, T)
        f = tuple((y, y + d) for y, d in zip(src, deltas))
    n_pairs = r.varint()
    location_map = []
    for _ in range(n_pairs):
        value = r.sint(width)
        run = r.varint()
        if abs(value) > T or run < 1:
            raise CorruptAux("bad location-map pair")
        location_map.extend([value] * run)
    reserved = r.uint(16)
    body_len = r.cursor
    stored = r.uint(16)
    if crc16(r.bits[:body_len], crc_init) != stored:
        raise CorruptAux("CRC mismatch (corrupted record or wrong key)")
    plan = ShiftPlan(peaks, g0, g1, f, T)
    try:
        check_plan(plan, levels=256)
    except InvalidPlan as exc:
        raise CorruptAux(f"decoded plan is invalid: {exc}") from exc
    return AuxPayload(plan, tuple(location_map), reserved, payload_length, unit), r.cursor
