"""Embedding and extraction.

An embedding unit is one checkerboard pass of one layer: unit 2t is pass 0
of layer t, unit 2t + 1 is pass 1. Each unit

1. pulls the pass sites into [T, 255 - T] and records a location map,
2. predicts the sites and picks a shift plan,
3. prepends the border LSBs it is about to overwrite to the payload,
4. maps every site error through the plan,
5. writes its aux record into the border LSB pool.

Sites next to the border are visited after all other sites. Their
predictions read border pixels, so the decoder first recovers the displaced
LSBs from the inner sites, restores the border, then decodes the ring.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..costs import compute_shift_costs, peak_bit_moments
from ..errors import (AmbiguousBin, AuxOverflow, CapacityExceeded, CorruptAux,
                      MessageTooLarge, NoFeasiblePlan)
from ..histogram import build_histogram
from ..image import MAX_VALUE, GrayImage, sse
from ..planner import (HEURISTIC, ShiftPlan, _with_distortion, best_traditional_plan,
                       check_plan, enumerate_plans, max_capacity, plan_distortion)
from ..predictor import border_indices, pass_sites, predict, rhombus_predict
from .aux import MAX_UNITS, AuxPayload, deserialize_aux, serialize_aux

log = logging.getLogger(__name__)

OPTIMIZED = "optimized"
TRADITIONAL = "traditional"
METHODS = (OPTIMIZED, TRADITIONAL)


@dataclass(frozen=True)
class EmbedConfig:
    T: int = 2
    m: int = 2
    payload_step: int = 4096
    max_layers: int = 8
    policy: str = HEURISTIC
    method: str = OPTIMIZED
    reserve_bits: int = 64
    lsb_planes: int = 2
    # also run the step-1 plan sequence and keep whichever trajectory ends closer to the cover
    witness: bool = True

    def __post_init__(self):
        if not 1 <= self.T <= 15:
            raise ValueError("T must lie in [1, 15]")
        if not 1 <= self.m <= 4:
            raise ValueError("m must lie in [1, 4]")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not 1 <= self.max_layers <= MAX_UNITS // 2:
            raise ValueError(f"max_layers must lie in [1, {MAX_UNITS // 2}]")
        if self.payload_step < 1:
            raise ValueError("payload_step must be positive")


@dataclass(frozen=True)
class UnitRecord:
    unit: int
    plan: ShiftPlan
    message_bits: int
    reserved_bits: int
    aux_bits: int
    realized_sse: int
    # random-bit model cost of the same plan, for comparison with the exact one
    estimated_sse: object = None


@dataclass(frozen=True)
class MarkedImage:
    image: GrayImage
    layers_embedded: int
    units: tuple = field(default=())
    trajectory: str = OPTIMIZED


def _digest(key) -> bytes:
    return hashlib.sha256(b"hsmatch:" + str(key).encode("utf-8")).digest()


def key_fingerprint(key) -> str:
    return _digest(key)[:8].hex()


def key_crc_init(key) -> int:
    """CRC register seed derived from the key, so a wrong key fails the CRC."""
    return int.from_bytes(_digest(key)[8:10], "big")


def site_order(ring: np.ndarray, key, unit: int) -> np.ndarray:
    """Keyed visiting order: inner sites first, border-adjacent sites last."""
    seed = int.from_bytes(_digest(key)[16:24], "big")
    rng = np.random.default_rng([seed, unit])
    inner = np.flatnonzero(~ring)
    outer = np.flatnonzero(ring)
    return np.concatenate([inner[rng.permutation(len(inner))], outer[rng.permutation(len(outer))]])


class LSBPool:
    """Border-pixel LSB slots: plane 0 of every border pixel, then plane 1, ..."""

    def __init__(self, width: int, height: int, planes: int = 2):
        self.pixels = border_indices(width, height)
        self.planes = planes

    @property
    def capacity(self) -> int:
        return self.planes * len(self.pixels)

    def _slots(self, n: int):
        s = np.arange(n)
        return self.pixels[s % len(self.pixels)], s // len(self.pixels)

    def read(self, flat: np.ndarray, n: int) -> np.ndarray:
        if n > self.capacity:
            raise AuxOverflow(f"{n} bits exceed the {self.capacity}-bit LSB pool")
        idx, plane = self._slots(n)
        return ((flat[idx] >> plane) & 1).astype(np.uint8)

    def write(self, flat: np.ndarray, bits) -> None:
        bits = np.asarray(bits, dtype=np.int64)
        if len(bits) > self.capacity:
            raise AuxOverflow(f"{len(bits)} bits exceed the {self.capacity}-bit LSB pool")
        idx, plane = self._slots(len(bits))
        # one plane at a time so a pixel is never written twice in one fancy assignment
        for pl in np.unique(plane):
            sel = plane == pl
            i = idx[sel]
            flat[i] = (flat[i] & ~(1 << pl)) | (bits[sel] << pl)


# ------------------------------------------------------------ preprocessing


def _interior_sites(img: GrayImage) -> np.ndarray:
    mask = np.zeros(img.pixels.shape, dtype=bool)
    mask[1:-1, 1:-1] = True
    return np.flatnonzero(mask.ravel())


def preprocess_boundaries(img: GrayImage, T: int, sites=None):
    """Pull site pixels into [T, 255 - T].

    Returns the adjusted image and the location map: one symbol per site
    whose adjusted value is T or 255 - T, in site order, holding how far it
    was moved (0 if it was already there).
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    sites = _interior_sites(img) if sites is None else np.sort(np.asarray(sites))
    flat = img.pixels.ravel().astype(np.int64)
    before = flat[sites]
    after = np.clip(before, T, MAX_VALUE - T)
    flat[sites] = after
    cand = (after == T) | (after == MAX_VALUE - T)
    symbols = tuple((after[cand] - before[cand]).tolist())
    return GrayImage(flat.reshape(img.pixels.shape)), symbols


def restore_boundaries(img: GrayImage, T: int, location_map, sites=None) -> GrayImage:
    sites = _interior_sites(img) if sites is None else np.sort(np.asarray(sites))
    flat = img.pixels.ravel().astype(np.int64)
    vals = flat[sites]
    cand = np.flatnonzero((vals == T) | (vals == MAX_VALUE - T))
    if len(cand) != len(location_map):
        raise CorruptAux(f"location map has {len(location_map)} entries, image needs {len(cand)}")
    flat[sites[cand]] = vals[cand] - np.asarray(location_map, dtype=np.int64)
    if flat.min() < 0 or flat.max() > MAX_VALUE:
        raise CorruptAux("location map restores an out-of-range pixel")
    return GrayImage(flat.reshape(img.pixels.shape))


# ------------------------------------------------------------ error mapping


def map_errors(errors, plan: ShiftPlan, bits) -> np.ndarray:
    """Marked errors: peaks go to g0/g1 by bit, other bins through f.

    Bits are consumed by peak sites in order; peak sites past the end of
    ``bits`` carry 0. Bins outside the plan are left alone.
    """
    errors = np.asarray(errors, dtype=np.int64)
    out = errors.copy()
    fmap = plan.f_map
    for y, t in fmap.items():
        out[errors == y] = t
    peak_pos = np.flatnonzero(np.isin(errors, plan.peaks))
    bits = np.asarray(bits, dtype=np.int64)
    if len(bits) > len(peak_pos):
        raise CapacityExceeded(f"{len(bits)} bits but only {len(peak_pos)} peak sites")
    carried = np.zeros(len(peak_pos), dtype=np.int64)
    carried[:len(bits)] = bits
    src = errors[peak_pos]
    for p, a, b in zip(plan.peaks, plan.g0, plan.g1):
        sel = src == p
        out[peak_pos[sel]] = np.where(carried[sel] == 1, b, a)
    return out


def _decode_table(plan: ShiftPlan) -> dict:
    table = {}
    entries = [(a, (p, 0)) for p, a in zip(plan.peaks, plan.g0)]
    entries += [(b, (p, 1)) for p, b in zip(plan.peaks, plan.g1)]
    entries += [(t, (y, -1)) for y, t in plan.f]
    for target, value in entries:
        if target in table:
            raise AmbiguousBin(f"marked bin {target} decodes two ways")
        table[target] = value
    return table


def unmap_errors(marked, plan: ShiftPlan):
    """Original errors and per-site bits (-1 where the site carries no bit)."""
    marked = np.asarray(marked, dtype=np.int64)
    table = _decode_table(plan)
    errors = marked.copy()
    bits = np.full(len(marked), -1, dtype=np.int64)
    for target, (src, bit) in table.items():
        sel = marked == target
        errors[sel] = src
        bits[sel] = bit
    return errors, bits


# ------------------------------------------------------------ one unit


def _select_plan(config: EmbedConfig, hist, costs, pred, payload):
    if config.method == TRADITIONAL:
        return best_traditional_plan(hist, costs, len(payload), config.T, config.m, pred=pred, bits=payload)
    return enumerate_plans(hist, costs, len(payload), config.T, config.m, config.policy,
                           pred=pred, bits=payload)


def embed_unit(x0: GrayImage, xt: GrayImage, unit: int, message, key, config: EmbedConfig,
               plan: ShiftPlan | None = None):
    """Embed as much of ``message`` as this unit takes; returns (image, UnitRecord).

    With ``plan`` given the whole message must fit and the plan is used as is
    (it must match the unit's histogram); otherwise a plan is searched for.
    """
    if not 0 <= unit < MAX_UNITS:
        raise ValueError(f"unit index {unit} outside [0, {MAX_UNITS - 1}]")
    message = np.asarray(message, dtype=np.uint8)
    T = config.T if plan is None else plan.T
    pass_id = unit % 2
    sites = pass_sites(xt, pass_id)
    pre, location_map = preprocess_boundaries(xt, T, sites)
    pred = predict(pre, pass_id, x0)
    pred = pred.reordered(site_order(pred.ring, key, unit))
    hist = build_histogram(pred)
    costs = compute_shift_costs(pred, hist, T)
    pool = LSBPool(xt.width, xt.height, config.lsb_planes)
    flat = pre.pixels.ravel().astype(np.int64)
    crc_init = key_crc_init(key)

    n_res = min(config.reserve_bits, pool.capacity)
    if plan is not None:
        check_plan(plan, hist)
        room = sum(hist[p] for p in plan.peaks)
    else:
        room = max_capacity(hist, config.m, adjacent_only=config.method == TRADITIONAL)

    def chunk_for(n_res):
        avail = room - n_res
        if len(message) <= avail:
            return len(message)
        if plan is not None:
            raise CapacityExceeded(f"{len(message)} bits do not fit the given plan ({avail} free)")
        return (avail // config.payload_step) * config.payload_step

    chunk = chunk_for(n_res)
    while True:
        if chunk <= 0 < len(message):
            raise CapacityExceeded(f"unit {unit} cannot take {min(len(message), config.payload_step)} more bits")
        payload = np.concatenate([pool.read(flat, n_res), message[:chunk]])
        if plan is None:
            try:
                chosen = _select_plan(config, hist, costs, pred, payload)
            except NoFeasiblePlan:
                if chunk < len(message) and chunk > config.payload_step:
                    chunk -= config.payload_step
                    continue
                raise
        else:
            chosen = _with_distortion(plan, costs, peak_bit_moments(pred, plan.peaks, payload))
        aux = AuxPayload(chosen, location_map, n_res, chunk, unit)
        aux_bits = serialize_aux(aux, crc_init)
        if len(aux_bits) <= n_res:
            break
        n_res = -(-len(aux_bits) // 32) * 32
        if n_res > pool.capacity:
            raise AuxOverflow(f"aux record of {len(aux_bits)} bits exceeds the {pool.capacity}-bit pool")
        chunk = min(chunk, chunk_for(n_res))

    inner_peaks = int(np.isin(pred.errors[~pred.ring], chosen.peaks).sum())
    if inner_peaks < n_res:
        raise AuxOverflow(f"only {inner_peaks} inner peak sites for {n_res} displaced bits")

    marked = map_errors(pred.errors, chosen, payload)
    flat[pred.sites] = pred.predictions + marked
    pool.write(flat, aux_bits)
    out = GrayImage(flat.reshape(xt.pixels.shape))
    d = flat[pred.sites] - pred.originals
    record = UnitRecord(unit, chosen, chunk, n_res, len(aux_bits), int(np.sum(d * d)),
                        plan_distortion(chosen, costs))
    log.debug("unit %d: %d message bits, plan %s", unit, chunk, chosen.summary())
    return out, record


def extract_unit(img: GrayImage, key):
    """Undo the topmost unit; returns (previous image, message chunk, AuxPayload)."""
    pool = LSBPool(img.width, img.height)
    flat = img.pixels.ravel().astype(np.int64)
    aux, _ = deserialize_aux(pool.read(flat, pool.capacity), key_crc_init(key))
    plan, unit, T = aux.plan, aux.layer_index, aux.plan.T
    pass_id = unit % 2
    pred = predict(img, pass_id)
    pred = pred.reordered(site_order(pred.ring, key, unit))
    n_inner = int((~pred.ring).sum())

    e_inner, b_inner = unmap_errors(pred.errors[:n_inner], plan)
    bits_inner = b_inner[b_inner >= 0]
    if len(bits_inner) < aux.reserved_bits:
        raise CorruptAux("not enough carried bits to restore the LSB pool")
    pool.write(flat, bits_inner[:aux.reserved_bits])

    ring_sites = pred.sites[n_inner:]
    z_ring = rhombus_predict(flat.reshape(img.pixels.shape), ring_sites)
    e_ring, b_ring = unmap_errors(flat[ring_sites] - z_ring, plan)

    bits = np.concatenate([bits_inner, b_ring[b_ring >= 0]]).astype(np.uint8)
    end = aux.reserved_bits + aux.payload_length
    if len(bits) < end:
        raise CorruptAux("payload length exceeds the carried bits")
    message = bits[aux.reserved_bits:end]

    flat[pred.sites[:n_inner]] = pred.predictions[:n_inner] + e_inner
    flat[ring_sites] = z_ring + e_ring
    if flat.min() < 0 or flat.max() > MAX_VALUE:
        raise CorruptAux("restored pixel out of range")
    restored = restore_boundaries(GrayImage(flat.reshape(img.pixels.shape)), T,
                                  aux.location_map, pass_sites(img, pass_id))
    return restored, message, aux


# ------------------------------------------------------------ layers


def embed_layer(x0: GrayImage, xt: GrayImage, layer: int, message, key, config: EmbedConfig):
    """Pass 0 then pass 1 of ``layer``; returns (image, records, bits consumed)."""
    message = np.asarray(message, dtype=np.uint8)
    pos = 0
    records = []
    img = xt
    for pass_id in (0, 1):
        if pos >= len(message) and records:
            break
        img, rec = embed_unit(x0, img, 2 * layer + pass_id, message[pos:], key, config)
        pos += rec.message_bits
        records.append(rec)
    return img, records, pos


def extract_layer(marked: GrayImage, key):
    """Undo every unit of the topmost layer; returns (image, message bits, layer index)."""
    img, chunk, aux = extract_unit(marked, key)
    chunks = [chunk]
    if aux.layer_index % 2 == 1:
        img, chunk, aux0 = extract_unit(img, key)
        if aux0.layer_index != aux.layer_index - 1:
            raise CorruptAux("unit sequence broken")
        chunks.insert(0, chunk)
    return img, np.concatenate(chunks), aux.layer_index // 2


def _greedy_embed(x0: GrayImage, message, key, config: EmbedConfig) -> MarkedImage:
    img = x0
    pos = 0
    records = []
    unit = 0
    while pos < len(message):
        if unit >= 2 * config.max_layers:
            raise MessageTooLarge(f"{len(message) - pos} bits left after {config.max_layers} layers")
        try:
            img, rec = embed_unit(x0, img, unit, message[pos:], key, config)
        except (CapacityExceeded, NoFeasiblePlan, AuxOverflow) as exc:
            raise MessageTooLarge(f"{len(message) - pos} bits left, unit {unit}: {exc}") from exc
        records.append(rec)
        pos += rec.message_bits
        unit += 1
    return MarkedImage(img, (unit + 1) // 2, tuple(records), config.method)


def multi_layer_embed(x0: GrayImage, message, key, config: EmbedConfig = EmbedConfig()) -> MarkedImage:
    """Fill units greedily, pass 0 then pass 1 of each layer, until the message is consumed.

    Each optimized unit is no worse than step-1 shifting from the same image, but greedy
    choices can steer later units into costlier states. With ``config.witness`` the step-1
    trajectory is run as well and the one with lower total SSE is kept; both decode the same way.
    """
    message = np.asarray(message, dtype=np.uint8)
    if config.method != OPTIMIZED or not config.witness:
        return _greedy_embed(x0, message, key, config)
    found, err = [], None
    for cfg in (config, replace(config, method=TRADITIONAL)):
        try:
            found.append(_greedy_embed(x0, message, key, cfg))
        except MessageTooLarge as exc:
            err = err or exc
    if not found:
        raise err
    # ties keep the optimized trajectory
    return min(found, key=lambda mk: sse(x0, mk.image))


def multi_layer_extract(marked: GrayImage, key):
    """Peel units off last-first; returns (original image, message bits)."""
    img = marked
    chunks = []
    expected = None
    while True:
        img, chunk, aux = extract_unit(img, key)
        if expected is not None and aux.layer_index != expected:
            raise CorruptAux(f"expected unit {expected}, found {aux.layer_index}")
        chunks.append(chunk)
        if aux.layer_index == 0:
            break
        expected = aux.layer_index - 1
    return img, np.concatenate(chunks[::-1]).astype(np.uint8)
