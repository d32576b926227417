"""Command-line front end: embed, extract, verify, sweep, generate."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .bench import run_sweep
from .codec import (METHODS, OPTIMIZED, EmbedConfig, key_fingerprint, multi_layer_embed,
                    multi_layer_extract)
from .errors import HSMatchError
from .image import load_pgm, save_pgm
from .planner import HEURISTIC, POLICIES
from .synth import KINDS, generate

log = logging.getLogger("hsmatch")

LOG_ENV = "HSMATCH_LOG_LEVEL"


def _bits_from_file(path) -> np.ndarray:
    data = np.frombuffer(Path(path).read_bytes(), dtype=np.uint8)
    return np.unpackbits(data)


def _config(args) -> EmbedConfig:
    return EmbedConfig(T=args.T, m=args.m, policy=args.policy, method=args.method,
                       payload_step=args.step, max_layers=args.layers, witness=not args.no_witness)


def cmd_embed(args) -> int:
    img = load_pgm(args.input)
    bits = _bits_from_file(args.msg)
    marked = multi_layer_embed(img, bits, args.key, _config(args))
    save_pgm(marked.image, args.out)
    meta = {
        "key_fingerprint": key_fingerprint(args.key),
        "message_bits": int(len(bits)),
        "layers": marked.layers_embedded,
        "method": args.method,
        "trajectory": marked.trajectory,
        "policy": args.policy,
        "T": args.T,
        "m": args.m,
        "units": [{"unit": r.unit, "message_bits": r.message_bits, "reserved_bits": r.reserved_bits,
                   "aux_bits": r.aux_bits, "plan": r.plan.summary(),
                   "predicted_sse": str(r.plan.predicted_distortion),
                   "estimated_sse": str(r.estimated_sse), "sse": r.realized_sse}
                  for r in marked.units],
    }
    Path(str(args.out) + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"embedded {len(bits)} bits in {marked.layers_embedded} layer(s) -> {args.out}")
    return 0


def cmd_extract(args) -> int:
    img = load_pgm(args.input)
    original, bits = multi_layer_extract(img, args.key)
    save_pgm(original, args.out_img)
    Path(args.out_msg).write_bytes(np.packbits(bits).tobytes())
    print(f"extracted {len(bits)} bits -> {args.out_msg}; image -> {args.out_img}")
    return 0


def cmd_verify(args) -> int:
    marked = load_pgm(args.input)
    original, bits = multi_layer_extract(marked, args.key)
    ok = True
    if args.original:
        same = original == load_pgm(args.original)
        print(f"image {'match' if same else 'MISMATCH'}")
        ok &= same
    if args.msg:
        same = np.array_equal(bits, _bits_from_file(args.msg))
        print(f"message {'match' if same else 'MISMATCH'}")
        ok &= same
    if not (args.original or args.msg):
        print(f"aux records valid, {len(bits)} message bits recovered")
    return 0 if ok else 1


def _sweep_images(args):
    images = [(Path(p).stem, load_pgm(p)) for p in args.input or []]
    for kind in args.synthetic or []:
        images.append((f"{kind}{args.size}", generate(kind, args.size, args.size, args.seed)))
    if not images:
        raise SystemExit("sweep needs --in images or --synthetic kinds")
    return images


def cmd_sweep(args) -> int:
    from .plotting import plot_sweep

    cfg = EmbedConfig(T=args.T, m=args.m, policy=args.policy, payload_step=args.step, max_layers=args.layers,
                      witness=not args.no_witness)
    result = run_sweep(_sweep_images(args), args.bpp, args.methods, cfg, args.seed, args.jobs,
                       timing=not args.no_timing)
    result.write_csv(args.csv)
    svg = args.svg or str(Path(args.csv).with_suffix(".svg"))
    plot_sweep(result, svg)
    bad = 0
    for c in result.dominance():
        flag = "ok" if c.holds else "VIOLATION"
        bad += not c.holds
        print(f"dominance image={c.image} bpp={c.bpp:g} layers={c.layers} "
              f"optimized={c.optimized:.6f} traditional={c.traditional:.6f} {flag}")
    failed = sum(not r.ok for r in result.rows)
    print(f"{len(result.rows)} cells, {failed} failed, {bad} dominance violations; csv {args.csv}, svg {svg}")
    return 0


def cmd_generate(args) -> int:
    save_pgm(generate(args.kind, args.width, args.height or args.width, args.seed), args.out)
    return 0


def _codec_options(p):
    p.add_argument("--T", type=int, default=2, help="largest per-bin shift")
    p.add_argument("--m", type=int, default=2, help="number of peak bins")
    p.add_argument("--policy", choices=POLICIES, default=HEURISTIC)
    p.add_argument("--step", type=int, default=4096, help="payload granularity per layer pass")
    p.add_argument("--layers", type=int, default=8, help="maximum layers")
    p.add_argument("--no-witness", action="store_true",
                   help="optimized method: keep the greedy trajectory even if step-1 shifting ends cheaper")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsmatch", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide a message file in a PGM image")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--msg", required=True, help="message file (raw bytes)")
    p.add_argument("--key", required=True)
    p.add_argument("--method", choices=METHODS, default=OPTIMIZED)
    _codec_options(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the original image and message")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-img", required=True)
    p.add_argument("--out-msg", required=True)
    p.add_argument("--key", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="extract and compare against the expected image/message")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--original")
    p.add_argument("--msg")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="payload/distortion sweep, optimized vs step-1 shifting")
    p.add_argument("--in", dest="input", nargs="*", help="PGM images")
    p.add_argument("--synthetic", nargs="*", choices=KINDS, help="synthetic image kinds")
    p.add_argument("--size", type=int, default=128, help="synthetic image side")
    p.add_argument("--bpp", type=float, nargs="+", required=True)
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True)
    p.add_argument("--svg", help="chart path (default: next to the CSV)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (default: all CPUs)")
    p.add_argument("--no-timing", action="store_true", help="write 0 in the ms column")
    _codec_options(p)
    p.set_defaults(func=cmd_sweep, step=256)

    p = sub.add_parser("generate", help="write a synthetic PGM")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HSMatchError as exc:
        print(f"error: {exc.code_path()}: {exc}", file=sys.stderr)
        return exc.exit_status


if __name__ == "__main__":
    sys.exit(main())
