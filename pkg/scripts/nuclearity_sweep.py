"""Sweep the modular spread of K against a fixed H: one-particle L2 index and the
Fock-space trace norms τ_n, compared with x^n.

    python scripts/nuclearity_sweep.py [--q 0.5] [--N 4] [--csv out.csv]
"""
import argparse
import csv
import sys

import numpy as np

from twistlab.nuclearity import fock_l2_check
from twistlab.standard_subspace import diagonal_subspace
from twistlab.twist import gallery


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--lam-h", type=float, default=4.0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()
    T = gallery("q_flip", q=args.q)
    H = diagonal_subspace([args.lam_h, 1 / args.lam_h])
    fields = ["lambda_k", "index"] + [f"tau_{n}" for n in range(args.N + 1)] + ["deviation"]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    writer = csv.writer(out)
    writer.writerow(fields)
    for lam in np.geomspace(1.0, 256.0, 17):
        K = diagonal_subspace([lam, 1 / lam])
        rep = fock_l2_check(T, H, K, args.N)
        writer.writerow([f"{lam:.6g}", f"{rep.one_particle_index:.12g}"]
                        + [f"{t:.12g}" for t in rep.tau] + [f"{rep.deviation:.3e}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
