"""``kpsc`` command line: encode, decode, bench, inspect."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import bench, codec, ingest, synth
from .errors import KpscError
from .modesel import ModeWeights
from .profiles import builtin_id, get_profile, load_profile_file

log = logging.getLogger("kpsc")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    return values


def _weights(text):
    parts = _int_list(text)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("weights need three values A,B,C")
    try:
        return ModeWeights(*parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scale(text):
    try:
        return ingest.QuantSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _configs(text):
    names = [c.strip() for c in text.split(",") if c.strip()]
    valid = {p.value for p in codec.Policy}
    bad = [c for c in names if c not in valid]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown config(s) {bad}; choose from {sorted(valid)}")
    return names


def _resolve_profile(args):
    if getattr(args, "profile_file", None):
        return load_profile_file(args.profile_file)
    if getattr(args, "profile", None):
        return get_profile(args.profile)
    return None


def _load_input(path, fmt, profile, scale):
    text = Path(path).read_text()
    if fmt == "mot":
        return ingest.parse_mot(text, scale or ingest.QuantSpec())
    seq = ingest.parse_kpjson(text, profile)
    if scale is not None:
        seq = replace(seq, scale=(scale.num, scale.den))
    return seq


def cmd_encode(args) -> int:
    profile = _resolve_profile(args)
    seq = _load_input(args.input, args.format, profile, args.scale)
    stream = codec.encode_sequence(seq, args.weights)
    out = Path(args.output) if args.output else Path(args.input).with_suffix(".kpsc")
    codec.write_file(out, stream)
    log.debug("mode counts %s", stream.stats.mode_counts)
    points = seq.n_visible
    bpp = stream.stats.total_bits / points if points else 0.0
    ratio = bench.compression_ratio(stream, seq) if points else 0.0
    print(f"{out}: {len(seq.frames)} frames, {points} points, "
          f"{stream.stats.total_bits} bits, {bpp:.3f} bits/point, {ratio:.2f}% of fixed 16-bit")
    return 0


def cmd_decode(args) -> int:
    result = codec.read_file(args.input)
    text = ingest.write_kpjson(result.sequence)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return 0


def cmd_bench(args) -> int:
    sequences = []
    if args.synthetic:
        seq = synth.synth_generate(
            args.synthetic,
            _resolve_profile(args) or "skeleton15",
            n_objects=args.objects,
            n_frames=args.frames,
            step_std=args.step_std,
            seed=args.seed,
        )
        sequences.append((f"{args.synthetic}-{seq.profile.name}", seq))
    for path in args.input or ():
        profile = _resolve_profile(args)
        sequences.append((Path(path).stem, _load_input(path, args.format, profile, None)))
    rows = bench.run_matrix(sequences, args.skips, args.sigmas, args.configs, seed=args.seed)
    csv_text = bench.rows_to_csv(rows)
    if args.out_csv:
        Path(args.out_csv).write_text(csv_text)
    if args.out_json:
        Path(args.out_json).write_text(bench.rows_to_json(rows) + "\n")
    if not args.out_csv and not args.out_json:
        sys.stdout.write(csv_text)
    return 0


def cmd_inspect(args) -> int:
    data = Path(args.input).read_bytes()
    result = codec.decode_stream(data)
    h, stats = result.header, result.stats
    kind = "builtin" if builtin_id(h.profile) is not None else "custom"
    print(f"version: {h.version}")
    print(f"profile: {h.profile.name} ({kind}, N={h.profile.n_points}, D={h.profile.dims})")
    print(f"weights: {','.join(map(str, h.weights.as_tuple()))}")
    print(f"scale: {h.scale[0]}/{h.scale[1]}")
    print(f"frames: {h.frame_count}")
    print(f"header bytes: {len(h.to_bytes())}, payload bytes: {len(data) - len(h.to_bytes())}")
    print(f"payload bits: {stats.total_bits} (coordinates {stats.coord_bits}, auxiliary {stats.aux_bits}, "
          f"frame index {stats.index_bits}, padding {stats.padding_bits})")
    names = ("independent", "temporal", "spatial_temporal", "trajectory")
    print("modes: " + ", ".join(f"{n}={c}" for n, c in zip(names, stats.mode_counts)))
    for frame, bits in zip(result.sequence.frames, stats.frame_bits):
        print(f"frame {frame.index}: {len(frame.objects)} objects, {bits} bits")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpsc", description="Lossless key-point sequence codec")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def profile_opts(p):
        p.add_argument("--format", choices=("kpjson", "mot"), default="kpjson")
        p.add_argument("--profile", help="built-in profile name")
        p.add_argument("--profile-file", help="custom profile text file")

    enc = sub.add_parser("encode", help="compress kpjson or MOT text to .kpsc")
    enc.add_argument("input")
    profile_opts(enc)
    enc.add_argument("--weights", type=_weights, default=ModeWeights(), help="A,B,C (t-1, t-2, spatial)")
    enc.add_argument("--scale", type=_scale, default=None, help="N or N/D grid units per input unit")
    enc.add_argument("-o", "--output")
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help="expand .kpsc to kpjson")
    dec.add_argument("input")
    dec.add_argument("-o", "--output")
    dec.set_defaults(func=cmd_decode)

    bn = sub.add_parser("bench", help="run the skip x noise x mode matrix")
    src = bn.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", choices=synth.KINDS)
    src.add_argument("--input", nargs="+")
    profile_opts(bn)
    bn.add_argument("--frames", type=int, default=50)
    bn.add_argument("--objects", type=int, default=3)
    bn.add_argument("--step-std", type=float, default=2.0)
    bn.add_argument("--skips", type=_int_list, default=[0])
    bn.add_argument("--sigmas", type=_float_list, default=[0.0])
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--configs", type=_configs, default=[p.value for p in codec.Policy])
    bn.add_argument("--out-csv")
    bn.add_argument("--out-json")
    bn.set_defaults(func=cmd_bench)

    ins = sub.add_parser("inspect", help="print header and bit budgets of a .kpsc file")
    ins.add_argument("input")
    ins.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "bench":
        if any(s < 0 for s in args.skips):
            parser.error("--skips must be non-negative")
        if any(s < 0 for s in args.sigmas):
            parser.error("--sigmas must be non-negative")
        if args.seed < 0 or args.seed >= 1 << 64:
            parser.error("--seed must be an unsigned 64-bit integer")
    try:
        return args.func(args)
    except (KpscError, OSError, ValueError) as exc:
        print(f"kpsc {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
