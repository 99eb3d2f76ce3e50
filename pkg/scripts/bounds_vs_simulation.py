"""Compare PSC FER bounds against Monte-Carlo PSC FER."""
import argparse

from bbtpolar.channel import sigma_from_ebn0
from bbtpolar.construction import construct
from bbtpolar.psc import extract_subtree
from bbtpolar.bounds import fer_bounds
from bbtpolar.sim import SimConfig, run_simulation


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=384)
    parser.add_argument("--k", type=int, default=192)
    parser.add_argument("--tau", type=int, default=1)
    parser.add_argument("--construction", default="pw")
    parser.add_argument("--ebn0", default="1.0,1.5,2.0,2.5,3.0,3.5")
    parser.add_argument("--min-errors", type=int, default=200)
    parser.add_argument("--max-trials", type=int, default=500_000)
    args = parser.parse_args()

    ebn0 = [float(x) for x in args.ebn0.split(",")]
    sub = extract_subtree(construct(args.n, args.k, args.construction), args.tau)
    cfg = SimConfig(
        n=args.n,
        k=args.k,
        construction=args.construction,
        decoder="psc",
        tau=args.tau,
        ebn0_db=ebn0,
        min_frame_errors=args.min_errors,
        max_trials=args.max_trials,
    )
    sim = run_simulation(cfg)
    print(f"{'Eb/N0':>6} {'LB':>10} {'FER':>10} {'SE':>9} {'G-UB':>10} {'B-UB':>10}")
    for e, p in zip(ebn0, sim.results):
        rep = fer_bounds(sub, sigma_from_ebn0(e, args.k / args.n))
        print(f"{e:6.2f} {rep.lb:10.3e} {p.fer:10.3e} {p.fer_stderr:9.2e} {rep.g_ub:10.3e} {rep.b_ub:10.3e}")


if __name__ == "__main__":
    main()
