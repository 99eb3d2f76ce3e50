"""FER of SC, SCL, PSC and PSCL on one code over an Eb/N0 sweep, written as CSV."""
import argparse
import csv
import sys

from bbtpolar.sim import SimConfig, run_simulation

DECODERS = [
    ("SC", dict(decoder="sc")),
    ("SCL8", dict(decoder="scl", list_size=8)),
    ("PSC tau=2", dict(decoder="psc", tau=2)),
    ("PSCL8 tau=2", dict(decoder="pscl", list_size=8, tau=2)),
    ("CA-SCL8", dict(decoder="ca-scl", list_size=8, crc=11)),
    ("CA-PSCL8 tau=2", dict(decoder="ca-pscl", list_size=8, tau=2, crc=11)),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=384)
    parser.add_argument("--k", type=int, default=192)
    parser.add_argument("--construction", default="pw")
    parser.add_argument("--ebn0", default="1.0,1.5,2.0,2.5,3.0")
    parser.add_argument("--min-errors", type=int, default=100)
    parser.add_argument("--max-trials", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    ebn0 = [float(x) for x in args.ebn0.split(",")]
    writer = csv.writer(sys.stdout)
    writer.writerow(["decoder", "ebn0_db", "trials", "frame_errors", "fer", "ber", "llr_ops"])
    for name, opts in DECODERS:
        cfg = SimConfig(
            n=args.n,
            k=args.k,
            construction=args.construction,
            ebn0_db=ebn0,
            min_frame_errors=args.min_errors,
            max_trials=args.max_trials,
            seed=args.seed,
            **opts,
        )
        for p in run_simulation(cfg).results:
            writer.writerow([name, p.ebn0_db, p.trials, p.frame_errors, f"{p.fer:.6g}", f"{p.ber:.6g}", f"{p.llr_ops:.1f}"])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
