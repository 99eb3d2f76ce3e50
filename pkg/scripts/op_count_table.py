"""Print LLR operation counts of SC and PSC for a range of rates and thresholds."""
import argparse
from fractions import Fraction

from bbtpolar.codec import sc_op_count
from bbtpolar.construction import construct
from bbtpolar.psc import extract_subtree, llr_op_count


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[384, 768])
    parser.add_argument("--rates", default="1/4,1/2,3/4")
    parser.add_argument("--taus", default="1,2,3,4")
    parser.add_argument("--construction", default="pw")
    args = parser.parse_args()

    rates = [Fraction(r) for r in args.rates.split(",")]
    taus = [int(t) for t in args.taus.split(",")]
    for n in args.n:
        print(f"N={n}  (SC: {sc_op_count(n)})")
        print("tau  " + "  ".join(f"R={str(r):>4}" for r in rates))
        for tau in taus:
            counts = [llr_op_count(extract_subtree(construct(n, int(r * n), args.construction), tau)) for r in rates]
            print(f"{tau:<4} " + "  ".join(f"{c:>6}" for c in counts))
        print()


if __name__ == "__main__":
    main()
