"""Command-line entry point: ``bbtpolar <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import fer_bounds
from .channel import sigma_from_ebn0
from .codec import CRC11, attach_crc, ca_scl_decode, encode, sc_decode, sc_op_count, scl_decode
from .construction import METHODS, RateProfile, construct
from .psc import ca_pscl_decode, extract_subtree, llr_op_count, psc_decode, pscl_decode
from .sim import DECODERS, SimConfig, run_simulation
from .tree import format_matrix, generator_matrix

NOISELESS_LLR = 50.0


def parse_bits(text: str, length: int | None = None) -> np.ndarray:
    """Binary string, or hex with a ``0x`` prefix (left-padded to ``length`` bits)."""
    text = text.strip().replace("_", "")
    if text.lower().startswith("0x"):
        value = int(text, 16)
        width = length if length is not None else 4 * (len(text) - 2)
        if value >> width:
            raise ValueError(f"hex value {text} does not fit in {width} bits")
        return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)
    if set(text) - {"0", "1"}:
        raise ValueError(f"not a binary string: {text!r}")
    return np.array([int(c) for c in text], dtype=np.uint8)


def format_bits(bits, fmt: str = "bin") -> str:
    s = "".join(str(int(b)) for b in bits)
    if fmt == "hex":
        return hex(int(s, 2)) if s else "0x0"
    return s


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _crc_len(value: str) -> int:
    return 0 if value == "none" else 11


def _load_profile(args) -> RateProfile:
    if args.profile:
        return RateProfile.load(args.profile)
    if args.n is None or args.k is None:
        raise SystemExit("either --profile or both --n and --k are required")
    crc = _crc_len(getattr(args, "crc", "none"))
    return construct(args.n, args.k + crc, args.construction, args.design_snr, rate_for_sigma=args.k / args.n)


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", help="rate-profile JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, help="data bits (excluding CRC)")
    p.add_argument("--construction", choices=METHODS, default="pw")
    p.add_argument("--design-snr", type=float, default=3.0)
    p.add_argument("--crc", choices=("none", "11"), default="none")


def cmd_construct(args) -> int:
    profile = _load_profile(args)
    if args.out:
        profile.save(args.out)
    else:
        print(json.dumps(profile.to_dict()))
    return 0


def cmd_gen_matrix(args) -> int:
    text = format_matrix(generator_matrix(args.n))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_encode(args) -> int:
    profile = _load_profile(args)
    crc = _crc_len(args.crc)
    data = parse_bits(args.data, profile.K - crc)
    block = attach_crc(data, CRC11) if crc else data
    print(format_bits(encode(profile, block), args.format))
    return 0


def _read_llrs(args, N: int) -> np.ndarray:
    if args.codeword:
        c = parse_bits(args.codeword, N)
        return NOISELESS_LLR * (1.0 - 2.0 * c.astype(np.float64))
    text = Path(args.llr_file).read_text() if args.llr_file else args.llrs
    if text is None:
        raise SystemExit("one of --llrs, --llr-file or --codeword is required")
    return np.array(parse_floats(text))


def cmd_decode(args) -> int:
    profile = _load_profile(args)
    crc = CRC11 if args.crc == "11" else None
    llrs = _read_llrs(args, profile.N)
    passed = None
    if args.psc:
        if args.tau is None:
            raise SystemExit("--psc needs --tau")
        subtree = extract_subtree(profile, args.tau)
        if crc:
            data, passed = ca_pscl_decode(subtree, llrs, args.list_size, crc)
        elif args.list_size > 1:
            data = pscl_decode(subtree, llrs, args.list_size)
        else:
            data = psc_decode(subtree, llrs)
    elif crc:
        data, passed = ca_scl_decode(profile, llrs, args.list_size, crc)
    elif args.list_size > 1:
        data = scl_decode(profile, llrs, args.list_size)
    else:
        data = sc_decode(profile, llrs)
    if passed is not None:
        print(f"crc: {'pass' if passed else 'fail'}", file=sys.stderr)
    print(format_bits(data, args.format))
    return 0


def cmd_simulate(args) -> int:
    config = SimConfig(
        n=args.n,
        k=args.k,
        construction=args.construction,
        decoder=args.decoder,
        list_size=args.list_size,
        tau=args.tau,
        crc=_crc_len(args.crc),
        design_snr_db=args.design_snr,
        ebn0_db=parse_floats(args.ebn0),
        max_trials=args.max_trials,
        min_frame_errors=args.min_errors,
        seed=args.seed,
        batch_size=args.batch_size,
    )
    try:
        result = run_simulation(config)
    except ValueError as exc:
        raise SystemExit(f"config error: {exc}")
    text = result.to_csv() if args.out and args.out.endswith(".csv") else result.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bounds(args) -> int:
    profile = construct(args.n, args.k, args.construction, args.design_snr, rate_for_sigma=args.k / args.n)
    subtree = extract_subtree(profile, args.tau)
    print("ebn0_db,g_ub,b_ub,lb")
    for ebn0 in parse_floats(args.ebn0):
        rep = fer_bounds(subtree, sigma_from_ebn0(ebn0, args.k / args.n))
        print(",".join([format(ebn0, ".17g")] + [format(v, ".17g") for v in (rep.g_ub, rep.b_ub, rep.lb)]))
    return 0


def cmd_analyze(args) -> int:
    if not args.op_count:
        raise SystemExit("analyze currently supports --op-count only")
    rates = [Fraction(r) for r in args.rates.split(",")]
    taus = [int(t) for t in args.taus.split(",")]
    ks = [int(r * args.n) for r in rates]
    print("decoder," + ",".join(f"R={r}" for r in rates))
    print("SC," + ",".join(str(sc_op_count(args.n)) for _ in ks))
    for tau in taus:
        counts = [llr_op_count(extract_subtree(construct(args.n, k, args.construction, args.design_snr), tau)) for k in ks]
        print(f"PSC tau={tau}," + ",".join(str(c) for c in counts))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbtpolar", description="Length-flexible polar codes on balanced binary trees")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a rate profile")
    _add_code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("gen-matrix", help="print the generator matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_matrix)

    p = sub.add_parser("encode", help="encode data bits")
    _add_code_args(p)
    p.add_argument("--data", required=True, help="binary string or 0x-prefixed hex")
    p.add_argument("--format", choices=("bin", "hex"), default="bin")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode channel LLRs")
    _add_code_args(p)
    p.add_argument("--llrs", help="comma/space separated LLRs")
    p.add_argument("--llr-file")
    p.add_argument("--codeword", help="hard codeword, treated as noiseless")
    p.add_argument("--list-size", type=int, default=1)
    p.add_argument("--psc", action="store_true")
    p.add_argument("--tau", type=int)
    p.add_argument("--format", choices=("bin", "hex"), default="bin")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte-Carlo FER/BER over BPSK-AWGN")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--construction", choices=METHODS, default="pw")
    p.add_argument("--design-snr", type=float, default=3.0)
    p.add_argument("--decoder", choices=DECODERS, default="sc")
    p.add_argument("--list-size", type=int, default=8)
    p.add_argument("--tau", type=int)
    p.add_argument("--crc", choices=("none", "11"), default="none")
    p.add_argument("--ebn0", required=True, help="comma list in dB")
    p.add_argument("--max-trials", type=int, default=10_000_000)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=1000)
    p.add_argument("--out", help="output path; .csv selects CSV, anything else JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="G-UB / B-UB / LB for PSC decoding")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--construction", choices=METHODS, default="pw")
    p.add_argument("--design-snr", type=float, default=3.0)
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--ebn0", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("analyze", help="static analyses")
    p.add_argument("--op-count", action="store_true")
    p.add_argument("--n", type=int, default=384)
    p.add_argument("--rates", default="1/4,1/2,3/4")
    p.add_argument("--taus", default="1,2,3")
    p.add_argument("--construction", choices=METHODS, default="pw")
    p.add_argument("--design-snr", type=float, default=3.0)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
