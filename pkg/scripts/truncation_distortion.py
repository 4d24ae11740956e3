"""Relative L2 distortion of the truncated kernel for a sweep of K and epsilon.

distortion = ||h - h_hat|| / ||h||, which by Parseval is the root of the
discarded share of sum_k H_k^2.
"""

import argparse
import csv
import math
import sys


from fskde.kernel import make_kernel, truncation_mask


def distortion(order, eps, mode=None):
    kernel = make_kernel(order, mode)
    mask = truncation_mask(order, eps)
    h2 = kernel.coeffs ** 2
    total = h2[0] + 2 * h2[1:].sum()
    tail = 2 * h2[mask.cutoff + 1:].sum()
    return mask, math.sqrt(tail / total)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orders", default="8,16,32,64,128,256")
    ap.add_argument("--epsilons", default="1e-2,1e-3,1e-4,1e-5,1e-6,1e-8")
    ap.add_argument("--output", help="CSV path (default stdout)")
    args = ap.parse_args()

    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["K", "epsilon", "mode", "cutoff", "retained", "n_reals", "distortion"])
    for order in (int(k) for k in args.orders.split(",")):
        for eps in (float(e) for e in args.epsilons.split(",")):
            for mode in ("exact", "approx"):
                mask, d = distortion(order, eps, mode)
                writer.writerow([order, eps, mode, mask.cutoff, mask.retained, 2 * mask.retained, f"{d:.6e}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
