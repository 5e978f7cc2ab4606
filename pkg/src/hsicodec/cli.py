"""Command-line front end.

Commands: encode, decode, metrics, rd, info. Human-readable progress goes
to stderr; machine output (CSV tables, stream dumps) goes to stdout.

Exit codes: 0 ok, 2 usage, 3 I/O or input format, 4 corrupt stream,
5 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import metrics as qm
from .codec import (
    Bitstream,
    EncoderConfig,
    TAG_NAMES,
    bitrate,
    decode_cube,
    encode_cube_full,
)
from .compensate import CompensationConfig
from .cube import HyperCube, load_cube, store_cube
from .entropy import segment_from_bytes
from .errors import (
    CodecError,
    CorruptInputError,
    CorruptStreamError,
    FormatError,
    NumericError,
    WriteError,
)
from .lm import TrainConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_NUMERIC = 5


def _parse_exclusions(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad exclusion list {text!r}") from exc


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        mse_goal=args.mse_goal,
        max_epochs=args.max_epochs,
        max_seconds=args.max_seconds,
        seed=args.seed,
        init_range=(-args.init_range, args.init_range),
    )


def _encoder_config(args) -> EncoderConfig:
    comp = CompensationConfig(
        lam=args.lam, q_step=args.qstep, enabled=not args.no_compensation
    )
    return EncoderConfig(
        train=_train_config(args),
        compensation=comp,
        band_exclusions=_parse_exclusions(args.exclude),
    )


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="training RNG seed")
    p.add_argument("--mse-goal", type=float, default=1e-4, dest="mse_goal")
    p.add_argument("--max-epochs", type=int, default=1000, dest="max_epochs")
    p.add_argument("--max-seconds", type=float, default=1000.0, dest="max_seconds")
    p.add_argument("--init-range", type=float, default=1.0, dest="init_range",
                   help="weights start uniform in [-r, r]; smaller values "
                        "tend to quantize better")
    p.add_argument("--exclude", default="", help="comma-separated damaged band indices")


def _add_comp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", type=float, default=0.0, dest="lam",
                   help="maximum acceptable relative reconstruction error")
    p.add_argument("--qstep", type=int, default=1, help="offset quantization step")
    p.add_argument("--no-compensation", action="store_true")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsicodec",
        description="Inter-band predictive hyperspectral image codec",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="cube file -> bitstream file")
    enc.add_argument("input", help="input cube (.raw with .hdr sidecar)")
    enc.add_argument("output", help="output bitstream (.bip)")
    _add_train_flags(enc)
    _add_comp_flags(enc)
    enc.add_argument("--emit-resized", metavar="PATH", default=None,
                     help="also write the resized original bands (the metrics reference)")

    dec = sub.add_parser("decode", help="bitstream file -> cube file")
    dec.add_argument("input", help="input bitstream")
    dec.add_argument("output", help="output cube (.raw)")

    met = sub.add_parser("metrics", help="per-band report comparing two cubes")
    met.add_argument("reference", help="reference cube (.raw)")
    met.add_argument("test", help="test cube (.raw)")
    met.add_argument("--peak", type=int, default=255)

    rd = sub.add_parser("rd", help="rate-distortion sweep, CSV to stdout")
    rd.add_argument("input", help="input cube (.raw)")
    rd.add_argument("--lambdas", default="0.0,0.01,0.02,0.05",
                    help="comma-separated tolerance sweep")
    _add_train_flags(rd)
    _add_comp_flags(rd)

    info = sub.add_parser("info", help="dump bitstream header and segments")
    info.add_argument("input", help="input bitstream")
    return parser


def _cmd_encode(args) -> int:
    cube = load_cube(args.input)
    cfg = _encoder_config(args)
    result = encode_cube_full(cube, cfg)
    blob = result.bitstream.to_bytes()
    try:
        Path(args.output).write_bytes(blob)
    except OSError as exc:
        raise WriteError(f"cannot write {args.output}: {exc}") from exc

    if args.emit_resized:
        resized = HyperCube(data=np.stack(result.resized_bands).astype(np.int16))
        store_cube(resized, args.emit_resized)

    rate = bitrate(result.bitstream)
    print(f"coded {len(result.band_indices)} bands, {len(blob)} bytes, "
          f"{rate:.4f} bpppb", file=sys.stderr)
    for k, band_idx in enumerate(result.band_indices):
        ref = result.resized_bands[k]
        rec = result.recon_bands[k]
        line = (f"band {band_idx}: psnr {qm.psnr(ref, rec):.2f} dB, "
                f"ssim {qm.ssim(ref, rec):.4f}")
        if k > 0:
            line += f", epochs {result.train_reports[k - 1].epochs_run}"
        print(line, file=sys.stderr)
    return EXIT_OK


def _cmd_decode(args) -> int:
    try:
        blob = Path(args.input).read_bytes()
    except OSError as exc:
        raise CorruptInputError(f"cannot read {args.input}: {exc}") from exc
    cube = decode_cube(Bitstream.from_bytes(blob))
    store_cube(cube, args.output)
    print(f"decoded {cube.bands} bands to {args.output}", file=sys.stderr)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    ref = load_cube(args.reference)
    test = load_cube(args.test)
    records = qm.band_records(
        [ref.band(k) for k in range(ref.bands)],
        [test.band(k) for k in range(test.bands)],
        peak=args.peak,
    )
    print("band,mse,ssim,psnr_db,cc_next")
    for r in records:
        cc = f"{r.cc_next:.6g}" if r.cc_next is not None else ""
        print(f"{r.band_index},{r.mse:.6g},{r.ssim:.6g},{r.psnr_db:.6g},{cc}")
    return EXIT_OK


def _cmd_rd(args) -> int:
    cube = load_cube(args.input)
    cfg = _encoder_config(args)
    if args.no_compensation:
        lambdas = [0.0]
    else:
        lambdas = [float(part) for part in args.lambdas.split(",") if part.strip()]
    points = qm.rd_points(cube, lambdas, cfg)
    sys.stdout.write(qm.rd_csv(points))
    return EXIT_OK


def _cmd_info(args) -> int:
    try:
        blob = Path(args.input).read_bytes()
    except OSError as exc:
        raise CorruptInputError(f"cannot read {args.input}: {exc}") from exc
    bs = Bitstream.from_bytes(blob)
    h = bs.header
    print(f"geometry: {h.rows}x{h.cols}, {h.coded_bands} coded bands")
    print(f"exclusions: {list(h.exclusions)}")
    print(f"compensation: enabled={h.comp_enabled} lambda={h.comp_lambda:.6g} "
          f"qstep={h.comp_qstep}")
    print(f"total: {len(blob)} bytes, {bitrate(bs):.4f} bpppb")
    for k, (tag, body) in enumerate(bs.segments):
        try:
            seg = segment_from_bytes(body if tag != 0x01 else body[8:])
            detail = f"mode={seg.mode} original={seg.original_len}"
        except CodecError:
            detail = "unparsed"
        print(f"segment {k}: {TAG_NAMES[tag]}, {len(body)} bytes, {detail}")
    return EXIT_OK


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "metrics": _cmd_metrics,
    "rd": _cmd_rd,
    "info": _cmd_info,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except CorruptStreamError as exc:
        print(f"error: corrupt stream: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except NumericError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CorruptInputError, FormatError, WriteError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CodecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
